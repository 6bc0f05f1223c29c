//! Certificate generation: checks the discrete stability, semi-stability,
//! energy-inequality and Gronwall conditions of the computed trajectory
//! against explicit competitor families, plus injectivity and determinant
//! diagnostics.  Failures are reported, never hidden.

pub mod compare;
pub mod sweep;

use crate::constitutive::{GronwallData, MaterialMode, Model};
use crate::error::{Result, RisError};
use crate::grid::{Grid, ScalarField, VectorField};
use crate::kinematics;
use crate::optim::{solve_y_step, SolverOptions};
use crate::rothe::{lipschitz_truncate, truncation_schedule, Trajectory};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Stability tolerance, relative to 1 + |E|.
    pub stability_tol_rel: f64,
    /// Semi-stability tolerance, relative to 1 + |E|.
    pub semistab_tol_rel: f64,
    /// Energy-inequality tolerance per step, relative to 1 + |E|.
    pub eineq_tol_rel: f64,
    /// Random deformation competitors per amplitude.
    pub stability_draws: usize,
    pub stability_amplitudes: Vec<f64>,
    /// Multistart re-solves per step (0 disables the family).
    pub multistart: usize,
    /// Random feasible damage competitors per step.
    pub semistab_random: usize,
    /// Lipschitz-truncated damage competitors per step.
    pub semistab_truncated: usize,
    pub semistab_shifts: Vec<f64>,
    /// Long-range energy-inequality pairs; `None` takes ceil(N/4).
    pub long_range_pairs: Option<usize>,
    pub cn_enabled: bool,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            stability_tol_rel: 1e-6,
            semistab_tol_rel: 1e-8,
            eineq_tol_rel: 1e-8,
            stability_draws: 20,
            stability_amplitudes: vec![1e-3, 1e-2, 5e-2],
            multistart: 0,
            semistab_random: 200,
            semistab_truncated: 20,
            semistab_shifts: vec![0.01, 0.05, 0.1],
            long_range_pairs: None,
            cn_enabled: true,
            seed: 0,
        }
    }
}

/// One line of the certificate: `passed == (margin >= -tolerance)`.
#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub name: &'static str,
    pub step: usize,
    /// Second index for pair checks (energy inequality); equals `step`
    /// otherwise.
    pub step2: usize,
    pub margin: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRecord {
    fn new(name: &'static str, step: usize, step2: usize, margin: f64, tolerance: f64) -> Self {
        CheckRecord {
            name,
            step,
            step2,
            margin,
            tolerance,
            passed: margin >= -tolerance,
        }
    }
}

/// Aggregated per-step view of the four conditions.
#[derive(Debug, Clone)]
pub struct StepCertificate {
    pub step: usize,
    pub stability_margin: f64,
    pub semistability_margin: f64,
    pub energy_inequality_slack: f64,
    pub gronwall_slack: f64,
    pub det_min: f64,
    pub cn_defect: Option<f64>,
}

#[derive(Debug)]
pub struct CertificateBundle {
    pub records: Vec<CheckRecord>,
    pub steps: Vec<StepCertificate>,
    pub gronwall: GronwallData,
    pub pass: bool,
}

impl CertificateBundle {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }
}

fn scale_tol(rel: f64, energy: f64) -> f64 {
    rel * (1.0 + energy.abs())
}

/// Smooth low-frequency perturbation field with one value per (node, comp).
fn smooth_vector_perturbation(grid: &Grid, rng: &mut SmallRng, amplitude: f64) -> Vec<f64> {
    let d = grid.dim();
    let n = grid.node_count();
    // Random coefficients for tensor cosine modes with indices 0..=2.
    let modes_per_axis = 3usize;
    let mode_count = modes_per_axis.pow(d as u32);
    let mut coefs = vec![0.0; d * mode_count];
    let mut phases = vec![0.0; d * mode_count];
    for v in coefs.iter_mut() {
        *v = rng.random_range(-1.0..1.0);
    }
    for v in phases.iter_mut() {
        *v = rng.random_range(0.0..std::f64::consts::TAU);
    }
    let mut out = vec![0.0; n * d];
    for i in 0..n {
        let x = grid.node_position(i);
        for c in 0..d {
            let mut val = 0.0;
            for m in 0..mode_count {
                let mut rem = m;
                let mut arg = phases[c * mode_count + m];
                let mut order = 0usize;
                for a in 0..d {
                    let ma = rem % modes_per_axis;
                    rem /= modes_per_axis;
                    order += ma;
                    arg += std::f64::consts::PI * ma as f64 * x[a] / grid.extents()[a];
                }
                val += coefs[c * mode_count + m] * arg.cos() / (1.0 + order as f64 * order as f64);
            }
            out[i * d + c] = amplitude * val;
        }
    }
    out
}

fn smooth_scalar_field(grid: &Grid, rng: &mut SmallRng) -> Vec<f64> {
    let d = grid.dim();
    let n = grid.node_count();
    let freq: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..3.0)).collect();
    let phase: Vec<f64> = (0..d)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    let offset = rng.random_range(0.2..0.8);
    let amp = rng.random_range(0.1..0.5);
    (0..n)
        .map(|i| {
            let x = grid.node_position(i);
            let mut s = 0.0;
            for a in 0..d {
                s += (freq[a] * std::f64::consts::TAU * x[a] / grid.extents()[a] + phase[a]).sin();
            }
            (offset + amp * s / d as f64).clamp(0.0, 1.0)
        })
        .collect()
}

/// Stability check at step k: minimum over the competitor families of
/// `E(k tau, y~, z_{k-1}) - E(k tau, y_k, z_{k-1})`.
pub fn check_stability(
    model: &Model,
    trajectory: &Trajectory,
    k: usize,
    opts: &VerifyOptions,
    solver_opts: &SolverOptions,
) -> Result<(f64, usize)> {
    let t = trajectory.time_grid.node_time(k);
    let loads = model.schedule.loads_at(t)?;
    let (y_k, _) = &trajectory.states[k];
    let z_ref = &trajectory.states[k.saturating_sub(1)].1;
    let e_base = model.energy_with_loads(&loads, y_k.values(), z_ref.values(), None);

    // Family (i): random smooth feasible perturbations of y_k.
    let mut competitors: Vec<Vec<f64>> = Vec::new();
    let mut rng = SmallRng::seed_from_u64(
        opts.seed ^ (0x5741_u64 << 32) ^ (k as u64).wrapping_mul(0x9E3779B97F4A7C15),
    );
    for &amp in &opts.stability_amplitudes {
        for _ in 0..opts.stability_draws {
            let delta = smooth_vector_perturbation(model.grid, &mut rng, amp);
            let cand: Vec<f64> = y_k.values().iter().zip(&delta).map(|(a, b)| a + b).collect();
            competitors.push(cand);
        }
    }
    // Family (ii): all previous iterates.
    for (y_j, _) in trajectory.states[..k].iter() {
        competitors.push(y_j.values().to_vec());
    }
    // Family (iii): multistart re-solves.
    for _ in 0..opts.multistart {
        let delta = smooth_vector_perturbation(model.grid, &mut rng, 0.05);
        let start: Vec<f64> = y_k.values().iter().zip(&delta).map(|(a, b)| a + b).collect();
        if model.min_det(&start) < solver_opts.det_floor {
            continue;
        }
        let start = VectorField::new(model.grid, start)?;
        if let Ok((resolved, _)) = solve_y_step(model, t, &start, z_ref, solver_opts) {
            competitors.push(resolved.values().to_vec());
        }
    }

    let margins: Vec<Option<f64>> = competitors
        .par_iter()
        .map(|cand| {
            if model.min_det(cand) <= 0.0 {
                return None;
            }
            Some(model.energy_with_loads(&loads, cand, z_ref.values(), None) - e_base)
        })
        .collect();
    let skipped = margins.iter().filter(|m| m.is_none()).count();
    let margin = margins
        .iter()
        .flatten()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    Ok((margin, skipped))
}

/// Semi-stability check at step k: minimum over damage competitors of
/// `E(k tau, y_k, z~) + H(z~) + R(z~ - z_k) - E(k tau, y_k, z_k) - H(z_k)`.
pub fn check_semistability(
    model: &Model,
    trajectory: &Trajectory,
    k: usize,
    tau_reg: Option<f64>,
    opts: &VerifyOptions,
) -> Result<f64> {
    let t = trajectory.time_grid.node_time(k);
    let loads = model.schedule.loads_at(t)?;
    let (y_k, z_k) = &trajectory.states[k];
    let e_base = model.energy_with_loads(&loads, y_k.values(), z_k.values(), tau_reg);

    let mut rng = SmallRng::seed_from_u64(
        opts.seed ^ (0x53u64 << 40) ^ (k as u64).wrapping_mul(0x2545F4914F6CDD1D),
    );
    let mut competitors: Vec<Vec<f64>> = Vec::new();
    // Family (i): random feasible fields below z_k (finite dissipation).
    for j in 0..opts.semistab_random {
        let cand: Vec<f64> = if j % 2 == 0 {
            let smooth = smooth_scalar_field(model.grid, &mut rng);
            let amp = rng.random_range(0.02..0.4);
            z_k.values()
                .iter()
                .zip(&smooth)
                .map(|(zk, s)| (zk - amp * s).clamp(0.0, *zk))
                .collect()
        } else {
            z_k.values()
                .iter()
                .map(|zk| rng.random_range(0.0..=1.0) * zk)
                .collect()
        };
        competitors.push(cand);
    }
    // Family (ii): Lipschitz truncations of random fields, mirroring the
    // competitor used in the refinement argument.
    if opts.semistab_truncated > 0 {
        let tau = trajectory.time_grid.tau();
        let lambda = truncation_schedule(tau, model.params.kappa, model.params.beta, 1.0);
        for _ in 0..opts.semistab_truncated {
            let raw = smooth_scalar_field(model.grid, &mut rng);
            let field = ScalarField::new(model.grid, raw)?;
            let trunc = lipschitz_truncate(&field, lambda)?;
            let cand: Vec<f64> = trunc
                .truncated
                .values()
                .iter()
                .zip(z_k.values())
                .map(|(a, zk)| a.min(*zk))
                .collect();
            competitors.push(cand);
        }
    }
    // Family (iii): uniform shifts clamped at zero.
    for &c in &opts.semistab_shifts {
        competitors.push(z_k.values().iter().map(|zk| (zk - c).max(0.0)).collect());
    }

    let slacks: Vec<f64> = competitors
        .par_iter()
        .map(|cand| {
            let diff: Vec<f64> = cand.iter().zip(z_k.values()).map(|(a, b)| a - b).collect();
            let r = model.dissipation_values(&diff);
            model.energy_with_loads(&loads, y_k.values(), cand, tau_reg) + r - e_base
        })
        .collect();
    Ok(slacks.iter().fold(f64::INFINITY, |a, &b| a.min(b)))
}

/// Energy-inequality slack between node indices k1 < k2, from the logged
/// energies, regularizations, dissipation increments and work integrals.
pub fn check_energy_inequality(trajectory: &Trajectory, k1: usize, k2: usize) -> f64 {
    let r1 = &trajectory.records[k1];
    let r2 = &trajectory.records[k2];
    let work: f64 = trajectory.records[k1 + 1..=k2]
        .iter()
        .map(|r| r.work_increment)
        .sum();
    let diss: f64 = trajectory.records[k1 + 1..=k2]
        .iter()
        .map(|r| r.diss_increment)
        .sum();
    (r1.energy + r1.reg + work) - (r2.energy + r2.reg + diss)
}

/// Per-step Gronwall slacks: `rhs - lhs` of the uniform estimate
/// `E_k + H_k + C0 + sum R_j <= (E_0 + H_0 + C0) exp(Lambda(k tau))`.
pub fn check_gronwall(trajectory: &Trajectory, gronwall: &GronwallData) -> Vec<f64> {
    let base = trajectory.records[0].energy + trajectory.records[0].reg + gronwall.c0;
    let mut cumulative_diss = 0.0;
    trajectory
        .records
        .iter()
        .map(|r| {
            cumulative_diss += r.diss_increment;
            let lhs = r.energy + r.reg + gronwall.c0 + cumulative_diss;
            let rhs = base * gronwall.capital_lambda(r.t).exp();
            rhs - lhs
        })
        .collect()
}

/// Full certificate: initial condition, stability and semi-stability at
/// every step, energy inequality over consecutive plus random long-range
/// pairs, the Gronwall estimate, the determinant lower bound and (when
/// enabled) the Ciarlet-Necas defect.
pub fn check_separately_global_certificate(
    model: &Model,
    trajectory: &Trajectory,
    z0: &ScalarField,
    opts: &VerifyOptions,
    solver_opts: &SolverOptions,
) -> Result<CertificateBundle> {
    if trajectory.failure.is_some() {
        return Err(RisError::Infeasible(
            "cannot certify a truncated trajectory".into(),
        ));
    }
    let n = trajectory.time_grid.steps;
    let tau = trajectory.time_grid.tau();
    let tau_reg = match model.params.material_mode {
        MaterialMode::Nonsimple => Some(tau),
        MaterialMode::PolyconvexSimple => None,
    };
    let mut records = Vec::new();

    // Initial condition: the stored z_0 must be the truncation of z0 at the
    // scheduled parameter (or z0 itself in the polyconvex mode).
    {
        let expected = match model.params.material_mode {
            MaterialMode::Nonsimple => {
                let lambda = truncation_schedule(tau, model.params.kappa, model.params.beta, 1.0);
                lipschitz_truncate(z0, lambda)?.truncated
            }
            MaterialMode::PolyconvexSimple => z0.clone(),
        };
        let max_diff = expected
            .values()
            .iter()
            .zip(trajectory.states[0].1.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        records.push(CheckRecord::new("initial_condition", 0, 0, -max_diff, 0.0));
    }

    let gronwall = {
        let states: Vec<(&VectorField, &ScalarField)> = trajectory
            .states
            .iter()
            .map(|(y, z)| (y, z))
            .collect();
        model.gronwall_estimate(&states)?
    };
    let gronwall_slacks = check_gronwall(trajectory, &gronwall);

    let mut steps = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let energy_k = trajectory.records[k].energy;
        let (stab_margin, _skipped) = check_stability(model, trajectory, k, opts, solver_opts)?;
        records.push(CheckRecord::new(
            "stability",
            k,
            k,
            stab_margin,
            scale_tol(opts.stability_tol_rel, energy_k),
        ));
        let semi_margin = if k == 0 {
            f64::INFINITY
        } else {
            let m = check_semistability(model, trajectory, k, tau_reg, opts)?;
            records.push(CheckRecord::new(
                "semistability",
                k,
                k,
                m,
                scale_tol(opts.semistab_tol_rel, energy_k),
            ));
            m
        };
        let eineq_slack = if k == 0 {
            0.0
        } else {
            let s = check_energy_inequality(trajectory, k - 1, k);
            records.push(CheckRecord::new(
                "energy_inequality",
                k - 1,
                k,
                s,
                scale_tol(opts.eineq_tol_rel, energy_k),
            ));
            s
        };
        records.push(CheckRecord::new(
            "gronwall",
            k,
            k,
            gronwall_slacks[k],
            scale_tol(opts.eineq_tol_rel, energy_k),
        ));
        let det_min = trajectory.records[k].det_min;
        records.push(CheckRecord::new(
            "det_lower_bound",
            k,
            k,
            det_min - solver_opts.det_floor,
            0.0,
        ));
        let cn_defect = if opts.cn_enabled {
            let rep =
                kinematics::ciarlet_necas_defect(&trajectory.states[k].0, model.params.cn_resolution)?;
            records.push(CheckRecord::new(
                "ciarlet_necas",
                k,
                k,
                rep.tolerance - rep.defect,
                0.0,
            ));
            Some(rep.defect)
        } else {
            None
        };
        steps.push(StepCertificate {
            step: k,
            stability_margin: stab_margin,
            semistability_margin: semi_margin,
            energy_inequality_slack: eineq_slack,
            gronwall_slack: gronwall_slacks[k],
            det_min,
            cn_defect,
        });
    }

    // Long-range energy-inequality pairs.
    let pair_count = opts.long_range_pairs.unwrap_or_else(|| n.div_ceil(4));
    let mut rng = SmallRng::seed_from_u64(opts.seed ^ 0x4C52_5047u64);
    for _ in 0..pair_count {
        if n < 2 {
            break;
        }
        let k1 = rng.random_range(0..n - 1);
        let k2 = rng.random_range(k1 + 2..=n);
        let s = check_energy_inequality(trajectory, k1, k2);
        let scale = (k2 - k1) as f64;
        records.push(CheckRecord::new(
            "energy_inequality",
            k1,
            k2,
            s,
            scale * scale_tol(opts.eineq_tol_rel, trajectory.records[k2].energy),
        ));
    }

    let pass = records.iter().all(|r| r.passed);
    Ok(CertificateBundle {
        records,
        steps,
        gronwall,
        pass,
    })
}

/// Render the certificate in the line-oriented text format.
pub fn certificate_to_string(bundle: &CertificateBundle, config_hash: &str) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(out, "RISCERT v1 config_sha256={config_hash}");
    for r in &bundle.records {
        let step = if r.name == "energy_inequality" {
            format!("pair={},{}", r.step, r.step2)
        } else {
            format!("step={}", r.step)
        };
        let _ = writeln!(
            out,
            "check={} {} margin={:.16e} tol={:.16e} {}",
            r.name,
            step,
            r.margin,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    let _ = writeln!(
        out,
        "CERTIFICATE {}",
        if bundle.pass { "PASS" } else { "FAIL" }
    );
    out
}
