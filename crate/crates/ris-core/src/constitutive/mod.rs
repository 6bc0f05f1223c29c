//! Constitutive functions: damage coefficient, stored energy densities for
//! the non-simple and polyconvex-simple material modes, the damage-gradient
//! penalty, and their analytic derivatives.

mod energy;
mod schedule;

pub use energy::{Model, ZStepContext};
pub use schedule::{GronwallData, LoadSchedule, LoadsAt};

use crate::error::{Result, RisError};
use crate::tensor::{MatD, Tensor3};

/// Which energy ansatz drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaterialMode {
    /// Second-gradient material: W depends on (grad y, grad^2 y) and the
    /// damage-gradient penalty acts on the Eulerian gradient
    /// (grad y)^{-T} grad z.  Time-discrete runs add the tau-regularization
    /// and Lipschitz-truncate the initial damage.
    Nonsimple,
    /// Polyconvex simple material: W depends on grad y only, the penalty
    /// acts on cof(grad y) grad z, and the discrete scheme carries neither
    /// the tau-regularization nor the truncated initial condition.
    PolyconvexSimple,
}

/// First-gradient part of the stored energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiKind {
    /// a|F|^p + b|cof F|^q + c (det F)^r - d_log ln((det F)^2).
    Ogden,
    /// St. Venant-Kirchhoff: (1/8) C(F^T F - I) : (F^T F - I) with the
    /// isotropic tensor C E = lambda tr(E) I + 2 mu E.
    SaintVenantKirchhoff { lambda: f64, mu: f64 },
}

/// All constitutive constants and exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub dim: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d_log: f64,
    /// Coefficient of the second-gradient term (eps/p)|grad^2 y|^p.
    pub eps_reg: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub rho0: f64,
    /// Fracture toughness G.
    pub toughness: f64,
    /// Residual stiffness in gamma(z) = z^2 + eps_gamma.
    pub eps_gamma: f64,
    /// Dirichlet penalty 1/(2 eps_pen) |y - y_D|^2.
    pub eps_pen: f64,
    pub material_mode: MaterialMode,
    pub psi: PsiKind,
    pub cn_resolution: usize,
}

impl ModelParams {
    /// Defaults for 2D runs; all config-overridable.
    pub fn defaults(dim: usize) -> ModelParams {
        let (a, b, c, p, q, r) = (1.0, 1.0, 1.0, 4.0, 2.0, 2.0);
        ModelParams {
            dim,
            a,
            b,
            c,
            d_log: stress_free_d_log(dim, a, b, c, p, q, r),
            eps_reg: 1e-3,
            p,
            q,
            r,
            s: 4.0,
            alpha: 4.0,
            beta: 6.0,
            kappa: 1.0,
            rho0: 1.0,
            toughness: 0.06,
            eps_gamma: 0.01,
            eps_pen: 1e-4,
            material_mode: MaterialMode::Nonsimple,
            psi: PsiKind::Ogden,
            cn_resolution: 128,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim as f64;
        let positive: [(&str, f64); 10] = [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d_log", self.d_log),
            ("eps_reg", self.eps_reg),
            ("kappa", self.kappa),
            ("rho0", self.rho0),
            ("G", self.toughness),
            ("eps_gamma", self.eps_gamma),
            ("eps_pen", self.eps_pen),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(RisError::invalid(key, "must be a positive real"));
            }
        }
        if !(1..=3).contains(&self.dim) {
            return Err(RisError::invalid("dim", "must be 1, 2 or 3"));
        }
        if !(self.p > dim) {
            return Err(RisError::invalid("p", format!("must satisfy p > d = {}", self.dim)));
        }
        if !(self.q > 1.0) {
            return Err(RisError::invalid("q", "must satisfy q > 1"));
        }
        if !(self.r > 1.0) {
            return Err(RisError::invalid("r", "must satisfy r > 1"));
        }
        let s_min = dim * self.p / (self.p - dim);
        if !(self.s >= s_min) {
            return Err(RisError::invalid(
                "s",
                format!("must be >= d*p/(p-d) = {s_min}"),
            ));
        }
        if !(self.alpha > dim) {
            return Err(RisError::invalid(
                "alpha",
                format!("must satisfy alpha > d = {}", self.dim),
            ));
        }
        if !(self.beta > self.alpha + self.kappa) {
            return Err(RisError::invalid(
                "beta",
                format!(
                    "must satisfy beta > alpha + kappa = {}",
                    self.alpha + self.kappa
                ),
            ));
        }
        if self.material_mode == MaterialMode::PolyconvexSimple {
            let lhs = 1.0 / self.p + 1.0 / self.s + 1.0 / self.alpha;
            let rhs = (self.q - 1.0) / self.q;
            if !(lhs <= rhs) {
                return Err(RisError::invalid(
                    "q",
                    format!(
                        "polyconvex mode requires 1/p + 1/s + 1/alpha <= (q-1)/q, got {lhs} > {rhs}"
                    ),
                ));
            }
        }
        if let PsiKind::SaintVenantKirchhoff { lambda, mu } = self.psi {
            if !(mu > 0.0) || lambda < 0.0 {
                return Err(RisError::invalid(
                    "svk",
                    "St. Venant-Kirchhoff needs mu > 0 and lambda >= 0",
                ));
            }
            if self.material_mode == MaterialMode::PolyconvexSimple {
                return Err(RisError::invalid(
                    "psi",
                    "the polyconvex-simple mode uses the Ogden density",
                ));
            }
        }
        Ok(())
    }

    pub fn gamma(&self, z: f64) -> f64 {
        if z >= 0.0 {
            z * z + self.eps_gamma
        } else {
            self.eps_gamma
        }
    }

    pub fn gamma_prime(&self, z: f64) -> f64 {
        if z >= 0.0 {
            2.0 * z
        } else {
            0.0
        }
    }

    /// Damage-gradient penalty phi(u) = (rho0/alpha)|u|^alpha.
    pub fn phi(&self, u: &[f64]) -> f64 {
        let nsq: f64 = u.iter().map(|x| x * x).sum();
        (self.rho0 / self.alpha) * nsq.powf(self.alpha / 2.0)
    }

    /// Gradient of phi: rho0 |u|^{alpha-2} u.
    pub fn phi_grad(&self, u: &[f64], out: &mut [f64]) {
        let nsq: f64 = u.iter().map(|x| x * x).sum();
        if nsq == 0.0 {
            out[..u.len()].fill(0.0);
            return;
        }
        let scale = self.rho0 * nsq.powf(self.alpha / 2.0 - 1.0);
        for (o, ui) in out.iter_mut().zip(u.iter()) {
            *o = scale * ui;
        }
    }

    /// Uncalibrated stored density of the non-simple material.
    pub fn stored_density_nonsimple(&self, f: &MatD, g: &Tensor3) -> Result<f64> {
        let det = f.det();
        if det <= 0.0 {
            return Err(RisError::NonOrientationPreserving { det });
        }
        let first = match self.psi {
            PsiKind::Ogden => self.ogden_psi(f, det),
            PsiKind::SaintVenantKirchhoff { lambda, mu } => svk_psi(f, lambda, mu),
        };
        Ok(first + self.eps_reg / self.p * g.frob_sq().powf(self.p / 2.0))
    }

    /// Uncalibrated stored density of the polyconvex simple material
    /// (Ogden terms only, no second-gradient contribution).
    pub fn stored_density_simple(&self, f: &MatD) -> Result<f64> {
        let det = f.det();
        if det <= 0.0 {
            return Err(RisError::NonOrientationPreserving { det });
        }
        Ok(self.ogden_psi(f, det))
    }

    fn ogden_psi(&self, f: &MatD, det: f64) -> f64 {
        let fp = f.frob_sq().powf(self.p / 2.0);
        let cq = f.cofactor().frob_sq().powf(self.q / 2.0);
        self.a * fp + self.b * cq + self.c * det.powf(self.r) - self.d_log * (det * det).ln()
    }

    /// Derivative of the first-gradient density with respect to F.
    pub(crate) fn d_psi_d_f(&self, f: &MatD, det: f64) -> MatD {
        match self.psi {
            PsiKind::Ogden => {
                let cof = f.cofactor();
                let fsq = f.frob_sq();
                let csq = cof.frob_sq();
                let mut out = MatD::zeros(f.d);
                if fsq > 0.0 {
                    out = out.add(&f.scale(self.a * self.p * fsq.powf(self.p / 2.0 - 1.0)));
                }
                if csq > 0.0 {
                    let coef = self.b * self.q * csq.powf(self.q / 2.0 - 1.0);
                    out = out.add(&f.dcof_adjoint(&cof).scale(coef));
                }
                let vol = self.c * self.r * det.powf(self.r - 1.0) - 2.0 * self.d_log / det;
                out.add(&cof.scale(vol))
            }
            PsiKind::SaintVenantKirchhoff { lambda, mu } => {
                let e = f.transpose().matmul(f).sub(&MatD::identity(f.d));
                let s = MatD::identity(f.d)
                    .scale(lambda * e.trace())
                    .add(&e.scale(2.0 * mu));
                f.matmul(&s).scale(0.5)
            }
        }
    }

    /// Derivative of the second-gradient term with respect to G.
    pub(crate) fn d_w_d_g(&self, g: &Tensor3) -> Tensor3 {
        let gsq = g.frob_sq();
        if gsq == 0.0 {
            return Tensor3::zeros(g.d);
        }
        g.scale(self.eps_reg * gsq.powf(self.p / 2.0 - 1.0))
    }
}

fn svk_psi(f: &MatD, lambda: f64, mu: f64) -> f64 {
    let e = f.transpose().matmul(f).sub(&MatD::identity(f.d));
    0.125 * (lambda * e.trace() * e.trace() + 2.0 * mu * e.frob_sq())
}

/// The value of d_log that makes the identity a stress-free state of the
/// Ogden density (and, for q >= d/(d-1), its global minimizer).
pub fn stress_free_d_log(dim: usize, a: f64, b: f64, c: f64, p: f64, q: f64, r: f64) -> f64 {
    let d = dim as f64;
    0.5 * (a * p * d.powf(p / 2.0 - 1.0) + b * q * (d - 1.0) * d.powf(q / 2.0 - 1.0) + c * r)
}

/// Sandwich constants (c_low, c_low_offset, c_up) such that on the band
/// det F in [t_min, t_max] (and for q (d-1) <= p):
/// `c_low (|F|^p + (det F)^{-s} + |G|^p) - c_low_offset <= W <= c_up (|F|^p + (det F)^{-s} + |G|^p + 1)`.
pub fn ogden_sandwich_constants(params: &ModelParams, t_min: f64, t_max: f64) -> (f64, f64, f64) {
    assert!(t_min > 0.0 && t_max > 1.0);
    assert!(
        params.q * (params.dim as f64 - 1.0) <= params.p,
        "upper bound derivation needs q (d-1) <= p"
    );
    let d = params.dim as f64;
    let c_low = params.a.min(params.eps_reg / params.p);
    let c_low_offset = c_low * t_min.powf(-params.s) + 2.0 * params.d_log * t_max.ln();
    let bdq = params.b * d.powf(params.q / 2.0);
    let c_up = (params.a + bdq)
        .max(params.eps_reg / params.p)
        .max(bdq + params.c * t_max.powf(params.r) + 2.0 * params.d_log * t_min.ln().abs());
    (c_low, c_low_offset, c_up)
}
