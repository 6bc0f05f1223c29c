//! Assembled energy, loading, power, dissipation, regularization and the
//! analytic gradients with respect to nodal deformation and damage values.
//!
//! The nodal gradients are exact derivatives of the discretized functionals:
//! the chain rule runs through the same difference stencils and quadrature
//! weights as the forward evaluation.

use super::schedule::{GronwallData, LoadSchedule, LoadsAt};
use super::{MaterialMode, ModelParams};
use crate::error::{Result, RisError};
use crate::grid::{Grid, ScalarField, VectorField, MAX_DIM};
use crate::tensor::{pairwise_sum, MatD, Tensor3};

/// Sign tolerance for the unidirectionality check in the dissipation.
pub const DISSIPATION_SIGN_TOL: f64 = 1e-12;

/// Grid + constitutive parameters + load schedule, with cached quadrature
/// and boundary data.  All evaluations are pure.
pub struct Model<'a> {
    pub grid: &'a Grid,
    pub params: &'a ModelParams,
    pub schedule: &'a LoadSchedule,
    w_cal: f64,
    weights: Vec<f64>,
    /// (node, accumulated surface weight) over the Dirichlet faces.
    dirichlet_nodes: Vec<(usize, f64)>,
    /// Same for the Neumann faces (complement of the Dirichlet selection).
    neumann_nodes: Vec<(usize, f64)>,
}

impl<'a> Model<'a> {
    pub fn new(
        grid: &'a Grid,
        params: &'a ModelParams,
        schedule: &'a LoadSchedule,
    ) -> Result<Model<'a>> {
        params.validate()?;
        if params.dim != grid.dim() {
            return Err(RisError::invalid("dim", "params dimension differs from grid"));
        }
        if schedule.grid() != grid {
            return Err(RisError::GridMismatch);
        }
        let id = MatD::identity(grid.dim());
        let w_cal = match params.material_mode {
            MaterialMode::Nonsimple => {
                params.stored_density_nonsimple(&id, &Tensor3::zeros(grid.dim()))?
            }
            MaterialMode::PolyconvexSimple => params.stored_density_simple(&id)?,
        };
        let weights = (0..grid.node_count()).map(|i| grid.node_weight(i)).collect();
        let mut dir = std::collections::BTreeMap::<usize, f64>::new();
        for face in schedule.dirichlet_faces() {
            for node in grid.face_nodes(*face) {
                *dir.entry(node).or_insert(0.0) += grid.surface_weight(*face, node);
            }
        }
        let mut neu = std::collections::BTreeMap::<usize, f64>::new();
        for face in grid.all_faces() {
            if schedule.dirichlet_faces().contains(&face) {
                continue;
            }
            for node in grid.face_nodes(face) {
                *neu.entry(node).or_insert(0.0) += grid.surface_weight(face, node);
            }
        }
        Ok(Model {
            grid,
            params,
            schedule,
            w_cal,
            weights,
            dirichlet_nodes: dir.into_iter().collect(),
            neumann_nodes: neu.into_iter().collect(),
        })
    }

    /// Calibration constant: the stored density of the reference state, so
    /// the undamaged identity has zero energy.
    pub fn calibration(&self) -> f64 {
        self.w_cal
    }

    fn check_fields(&self, y: &VectorField, z: &ScalarField) -> Result<()> {
        if y.grid() != self.grid || z.grid() != self.grid {
            return Err(RisError::GridMismatch);
        }
        Ok(())
    }

    /// Calibrated stored density `W(F, G) - W(I, 0)` at one node of a
    /// deformation given by nodal values.  `None` when det F <= 0.
    fn calibrated_density(&self, yv: &[f64], node: usize) -> Option<f64> {
        let f = self.grid.vector_gradient_at(yv, node);
        if f.det() <= 0.0 {
            return None;
        }
        let w = match self.params.material_mode {
            MaterialMode::Nonsimple => {
                let g = self.grid.vector_hessian_at(yv, node);
                self.params.stored_density_nonsimple(&f, &g).ok()?
            }
            MaterialMode::PolyconvexSimple => self.params.stored_density_simple(&f).ok()?,
        };
        Some(w - self.w_cal)
    }

    /// Damage-gradient penalty argument at one node: `F^{-T} grad z` for the
    /// non-simple mode, `cof F grad z` in the polyconvex-simple mode.
    fn penalty_argument(&self, f: &MatD, gz: &[f64; MAX_DIM]) -> [f64; MAX_DIM] {
        let d = self.grid.dim();
        let mut u = [0.0; MAX_DIM];
        match self.params.material_mode {
            MaterialMode::Nonsimple => {
                let det = f.det();
                f.cofactor().matvec(&gz[..d], &mut u);
                for ui in u.iter_mut().take(d) {
                    *ui /= det;
                }
            }
            MaterialMode::PolyconvexSimple => {
                f.cofactor().matvec(&gz[..d], &mut u);
            }
        }
        u
    }

    /// Total energy `E(t, y, z)`; with `tau` supplied the discrete
    /// regularization `H_tau(z)` is added.  Returns +infinity when the
    /// deformation is not orientation-preserving at some quadrature point.
    pub fn total_energy(
        &self,
        t: f64,
        y: &VectorField,
        z: &ScalarField,
        tau: Option<f64>,
    ) -> Result<f64> {
        self.check_fields(y, z)?;
        let loads = self.schedule.loads_at(t)?;
        Ok(self.energy_with_loads(&loads, y.values(), z.values(), tau))
    }

    pub fn energy_with_loads(
        &self,
        loads: &LoadsAt,
        yv: &[f64],
        zv: &[f64],
        tau: Option<f64>,
    ) -> f64 {
        let n = self.grid.node_count();
        let mut densities = vec![0.0; n];
        for i in 0..n {
            let Some(wt) = self.calibrated_density(yv, i) else {
                return f64::INFINITY;
            };
            let f = self.grid.vector_gradient_at(yv, i);
            let gz = self.grid.scalar_gradient_at(zv, i);
            let u = self.penalty_argument(&f, &gz);
            densities[i] = self.params.gamma(zv[i]) * wt + self.params.phi(&u[..self.grid.dim()]);
        }
        let mut e = self
            .grid
            .integrate(&densities)
            .expect("density count matches grid");
        if let Some(tau) = tau {
            e += self.regularization_values(zv, tau);
        }
        e - self.loading_with_loads(loads, yv)
    }

    /// The loading functional ell(t, y, z).  The damage argument is unused in
    /// the default model but kept so semi-stability competitors can carry it.
    pub fn loading(&self, t: f64, y: &VectorField, _z: &ScalarField, ) -> Result<f64> {
        self.check_fields(y, _z)?;
        let loads = self.schedule.loads_at(t)?;
        Ok(self.loading_with_loads(&loads, y.values()))
    }

    pub fn loading_with_loads(&self, loads: &LoadsAt, yv: &[f64]) -> f64 {
        let d = self.grid.dim();
        let n = self.grid.node_count();
        let mut bulk_terms = vec![0.0; n];
        for i in 0..n {
            let mut dot = 0.0;
            for c in 0..d {
                dot += loads.bulk[i * d + c] * yv[i * d + c];
            }
            bulk_terms[i] = dot * self.weights[i];
        }
        let mut ell = pairwise_sum(&bulk_terms);
        for &(i, ws) in &self.neumann_nodes {
            let mut dot = 0.0;
            for c in 0..d {
                dot += loads.surface[i * d + c] * yv[i * d + c];
            }
            ell += ws * dot;
        }
        let inv2eps = 0.5 / self.params.eps_pen;
        for &(i, ws) in &self.dirichlet_nodes {
            let mut dist = 0.0;
            for c in 0..d {
                let diff = yv[i * d + c] - loads.dirichlet[i * d + c];
                dist += diff * diff;
            }
            ell -= inv2eps * ws * dist;
        }
        if self.schedule.has_pressure() && loads.pressure != 0.0 {
            let dets: Vec<f64> = (0..n)
                .map(|i| self.grid.vector_gradient_at(yv, i).det() * self.weights[i])
                .collect();
            ell -= loads.pressure * pairwise_sum(&dets);
        }
        ell
    }

    /// Reduced power `-d_t ell(t, y, z)`, using the in-piece slopes
    /// (one-sided at breakpoints, left-sided at the final time).
    pub fn power(&self, t: f64, y: &VectorField, z: &ScalarField) -> Result<f64> {
        self.check_fields(y, z)?;
        let loads = self.schedule.loads_at(t)?;
        Ok(self.power_with_loads(&loads, y.values()))
    }

    pub fn power_with_loads(&self, loads: &LoadsAt, yv: &[f64]) -> f64 {
        let d = self.grid.dim();
        let n = self.grid.node_count();
        let mut bulk_terms = vec![0.0; n];
        for i in 0..n {
            let mut dot = 0.0;
            for c in 0..d {
                dot += loads.bulk_rate[i * d + c] * yv[i * d + c];
            }
            bulk_terms[i] = dot * self.weights[i];
        }
        let mut dt_ell = pairwise_sum(&bulk_terms);
        for &(i, ws) in &self.neumann_nodes {
            let mut dot = 0.0;
            for c in 0..d {
                dot += loads.surface_rate[i * d + c] * yv[i * d + c];
            }
            dt_ell += ws * dot;
        }
        let inv_eps = 1.0 / self.params.eps_pen;
        for &(i, ws) in &self.dirichlet_nodes {
            let mut dot = 0.0;
            for c in 0..d {
                dot += (yv[i * d + c] - loads.dirichlet[i * d + c])
                    * loads.dirichlet_rate[i * d + c];
            }
            dt_ell += inv_eps * ws * dot;
        }
        if self.schedule.has_pressure() && loads.pressure_rate != 0.0 {
            let dets: Vec<f64> = (0..n)
                .map(|i| self.grid.vector_gradient_at(yv, i).det() * self.weights[i])
                .collect();
            dt_ell -= loads.pressure_rate * pairwise_sum(&dets);
        }
        -dt_ell
    }

    /// Dissipation R(v): `G rho0 integral |v|` when v <= 0 a.e. (nodewise,
    /// tolerance 1e-12), +infinity otherwise.
    pub fn dissipation(&self, v: &ScalarField) -> Result<f64> {
        if v.grid() != self.grid {
            return Err(RisError::GridMismatch);
        }
        Ok(self.dissipation_values(v.values()))
    }

    pub fn dissipation_values(&self, vv: &[f64]) -> f64 {
        if vv.iter().any(|&x| x > DISSIPATION_SIGN_TOL) {
            return f64::INFINITY;
        }
        let gro = self.params.toughness * self.params.rho0;
        let terms: Vec<f64> = vv
            .iter()
            .enumerate()
            .map(|(i, &x)| x.abs() * self.weights[i])
            .collect();
        gro * pairwise_sum(&terms)
    }

    /// Discrete regularization `H_tau(z) = tau^kappa integral |grad z|^beta`.
    pub fn regularization(&self, z: &ScalarField, tau: f64) -> Result<f64> {
        if z.grid() != self.grid {
            return Err(RisError::GridMismatch);
        }
        if !(tau > 0.0) {
            return Err(RisError::invalid("tau", "must be positive"));
        }
        Ok(self.regularization_values(z.values(), tau))
    }

    pub fn regularization_values(&self, zv: &[f64], tau: f64) -> f64 {
        let n = self.grid.node_count();
        let d = self.grid.dim();
        let beta = self.params.beta;
        let terms: Vec<f64> = (0..n)
            .map(|i| {
                let gz = self.grid.scalar_gradient_at(zv, i);
                let nsq: f64 = gz[..d].iter().map(|x| x * x).sum();
                nsq.powf(beta / 2.0) * self.weights[i]
            })
            .collect();
        tau.powf(self.params.kappa) * pairwise_sum(&terms)
    }

    /// Exact nodal gradient of `E(t, ., z)`.
    pub fn grad_energy_y(&self, t: f64, y: &VectorField, z: &ScalarField) -> Result<VectorField> {
        self.check_fields(y, z)?;
        let loads = self.schedule.loads_at(t)?;
        let g = self.grad_y_with_loads(&loads, y.values(), z.values())?;
        VectorField::new(self.grid, g)
    }

    pub fn grad_y_with_loads(
        &self,
        loads: &LoadsAt,
        yv: &[f64],
        zv: &[f64],
    ) -> Result<Vec<f64>> {
        let d = self.grid.dim();
        let n = self.grid.node_count();
        let mut out = vec![0.0; n * d];
        for i in 0..n {
            let f = self.grid.vector_gradient_at(yv, i);
            let det = f.det();
            if det <= 0.0 {
                return Err(RisError::Infeasible(format!(
                    "det grad y = {det} at node {i}"
                )));
            }
            let w_i = self.weights[i];
            let gamma_i = self.params.gamma(zv[i]);
            // First-gradient stress, scaled by the damage coefficient.
            let mut a = self.params.d_psi_d_f(&f, det).scale(gamma_i);
            // Damage-gradient penalty coupling.
            let gz = self.grid.scalar_gradient_at(zv, i);
            let u = self.penalty_argument(&f, &gz);
            let mut v = [0.0; MAX_DIM];
            self.params.phi_grad(&u[..d], &mut v);
            match self.params.material_mode {
                MaterialMode::Nonsimple => {
                    // u = F^{-T} gz; dphi/dF = -u (F^{-1} v)^T.
                    let cof = f.cofactor();
                    let mut finv_v = [0.0; MAX_DIM];
                    cof.matvec_t(&v, &mut finv_v);
                    for fv in finv_v.iter_mut().take(d) {
                        *fv /= det;
                    }
                    for l in 0..d {
                        for m in 0..d {
                            a.add_to(l, m, -u[l] * finv_v[m]);
                        }
                    }
                }
                MaterialMode::PolyconvexSimple => {
                    // u = cof F gz; dphi/dF = dcof-adjoint(v x gz).
                    let mut vxg = MatD::zeros(d);
                    for l in 0..d {
                        for m in 0..d {
                            vxg.set(l, m, v[l] * gz[m]);
                        }
                    }
                    a = a.add(&f.dcof_adjoint(&vxg));
                }
            }
            // Pressure potential +pi int det in E.
            if self.schedule.has_pressure() && loads.pressure != 0.0 {
                a = a.add(&f.cofactor().scale(loads.pressure));
            }
            let a = a.scale(w_i);
            // Scatter through the first-derivative stencils.
            let multi = self.grid.multi(i);
            for axis in 0..d {
                let st = self.grid.d1_stencil(axis, multi[axis]);
                let mut mm = multi;
                for k in 0..st.len {
                    mm[axis] = st.idx[k];
                    let j = self.grid.flat(&mm[..d]);
                    for c in 0..d {
                        out[j * d + c] += st.coeff[k] * a.get(c, axis);
                    }
                }
            }
            // Second-gradient term (non-simple mode only).
            if self.params.material_mode == MaterialMode::Nonsimple {
                let g = self.grid.vector_hessian_at(yv, i);
                let b = self.params.d_w_d_g(&g).scale(gamma_i * w_i);
                for axis in 0..d {
                    let st = self.grid.d2_stencil(axis, multi[axis]);
                    let mut mm = multi;
                    for k in 0..st.len {
                        mm[axis] = st.idx[k];
                        let j = self.grid.flat(&mm[..d]);
                        for c in 0..d {
                            out[j * d + c] += st.coeff[k] * b.get(c, axis, axis);
                        }
                    }
                    for bxs in (axis + 1)..d {
                        let sa = self.grid.d1_stencil(axis, multi[axis]);
                        let sb = self.grid.d1_stencil(bxs, multi[bxs]);
                        let mut mm = multi;
                        for ka in 0..sa.len {
                            mm[axis] = sa.idx[ka];
                            for kb in 0..sb.len {
                                mm[bxs] = sb.idx[kb];
                                let j = self.grid.flat(&mm[..d]);
                                let cf = sa.coeff[ka] * sb.coeff[kb];
                                for c in 0..d {
                                    out[j * d + c] +=
                                        cf * (b.get(c, axis, bxs) + b.get(c, bxs, axis));
                                }
                            }
                        }
                    }
                }
            }
        }
        // Loading terms, E = material - ell.
        for i in 0..n {
            for c in 0..d {
                out[i * d + c] -= self.weights[i] * loads.bulk[i * d + c];
            }
        }
        for &(i, ws) in &self.neumann_nodes {
            for c in 0..d {
                out[i * d + c] -= ws * loads.surface[i * d + c];
            }
        }
        let inv_eps = 1.0 / self.params.eps_pen;
        for &(i, ws) in &self.dirichlet_nodes {
            for c in 0..d {
                out[i * d + c] += inv_eps * ws * (yv[i * d + c] - loads.dirichlet[i * d + c]);
            }
        }
        Ok(out)
    }

    /// Exact nodal gradient of `z -> E(t, y, z) + H_tau(z)` (dissipation not
    /// included; the z-solver adds its linear term).
    pub fn grad_energy_z(
        &self,
        t: f64,
        y: &VectorField,
        z: &ScalarField,
        tau: Option<f64>,
    ) -> Result<ScalarField> {
        self.check_fields(y, z)?;
        let ctx = self.z_step_context(t, y, z, tau)?;
        let mut out = vec![0.0; self.grid.node_count()];
        ctx.gradient_energy(z.values(), &mut out);
        ScalarField::new(self.grid, out)
    }

    /// Precomputed data for the damage step at fixed (t, y): calibrated
    /// densities, the per-node linear map sending grad z to the penalty
    /// argument, and the z-independent loading value.
    pub fn z_step_context(
        &self,
        t: f64,
        y: &VectorField,
        z_prev: &ScalarField,
        tau: Option<f64>,
    ) -> Result<ZStepContext<'_, 'a>> {
        self.check_fields(y, z_prev)?;
        let loads = self.schedule.loads_at(t)?;
        let n = self.grid.node_count();
        let mut w_tilde = Vec::with_capacity(n);
        let mut umap = Vec::with_capacity(n);
        for i in 0..n {
            let Some(wt) = self.calibrated_density(y.values(), i) else {
                return Err(RisError::Infeasible(format!(
                    "non-orientation-preserving deformation at node {i}"
                )));
            };
            w_tilde.push(wt);
            let f = self.grid.vector_gradient_at(y.values(), i);
            let m = match self.params.material_mode {
                MaterialMode::Nonsimple => f.cofactor().scale(1.0 / f.det()),
                MaterialMode::PolyconvexSimple => f.cofactor(),
            };
            umap.push(m);
        }
        let loading_const = self.loading_with_loads(&loads, y.values());
        Ok(ZStepContext {
            model: self,
            w_tilde,
            umap,
            loading_const,
            z_prev: z_prev.values().to_vec(),
            tau,
        })
    }

    /// A-posteriori Gronwall data: `C0` clears the minimum sampled energy and
    /// the per-piece rate is the padded maximum of |power| / (E + C0) over
    /// the sampled states and piece endpoints.
    pub fn gronwall_estimate(
        &self,
        states: &[(&VectorField, &ScalarField)],
    ) -> Result<GronwallData> {
        if states.is_empty() {
            return Err(RisError::invalid("states", "need at least one sampled state"));
        }
        let breakpoints = self.schedule.breakpoints().to_vec();
        let pieces = breakpoints.len() - 1;
        // Material part is t-independent; compute once per state.
        let mut samples: Vec<Vec<(f64, f64)>> = vec![Vec::new(); pieces];
        for (y, z) in states {
            self.check_fields(y, z)?;
            let e_mat = {
                let n = self.grid.node_count();
                let mut densities = vec![0.0; n];
                let mut feasible = true;
                for i in 0..n {
                    match self.calibrated_density(y.values(), i) {
                        Some(wt) => {
                            let f = self.grid.vector_gradient_at(y.values(), i);
                            let gz = self.grid.scalar_gradient_at(z.values(), i);
                            let u = self.penalty_argument(&f, &gz);
                            densities[i] = self.params.gamma(z.values()[i]) * wt
                                + self.params.phi(&u[..self.grid.dim()]);
                        }
                        None => {
                            feasible = false;
                            break;
                        }
                    }
                }
                if !feasible {
                    continue;
                }
                self.grid.integrate(&densities).unwrap()
            };
            for piece in 0..pieces {
                for &t in &[breakpoints[piece], breakpoints[piece + 1]] {
                    let loads = self.schedule.loads_on_piece(piece, t);
                    let e = e_mat - self.loading_with_loads(&loads, y.values());
                    let pw = self.power_with_loads(&loads, y.values());
                    samples[piece].push((e, pw));
                }
            }
        }
        let min_e = samples
            .iter()
            .flatten()
            .map(|(e, _)| *e)
            .fold(f64::INFINITY, f64::min);
        let c0 = 1.0 + (-min_e).max(0.0);
        let rates = samples
            .iter()
            .map(|piece| {
                1.1 * piece
                    .iter()
                    .map(|(e, pw)| pw.abs() / (e + c0))
                    .fold(0.0, f64::max)
            })
            .collect();
        Ok(GronwallData {
            c0,
            piece_times: breakpoints,
            rates,
        })
    }

    pub fn min_det(&self, yv: &[f64]) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.grid.node_count() {
            let det = self.grid.vector_gradient_at(yv, i).det();
            if det < min {
                min = det;
            }
        }
        min
    }

    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Damage-step evaluation context at fixed (t, y): the objective
/// `E(t, y, z) + H_tau(z) + G rho0 integral (z_prev - z)` over the box
/// `0 <= z <= z_prev`, where the unidirectional dissipation is finite and
/// linear.
pub struct ZStepContext<'m, 'a> {
    model: &'m Model<'a>,
    w_tilde: Vec<f64>,
    umap: Vec<MatD>,
    loading_const: f64,
    pub z_prev: Vec<f64>,
    pub tau: Option<f64>,
}

impl ZStepContext<'_, '_> {
    /// Full objective including the linear dissipation term.
    pub fn objective(&self, zv: &[f64]) -> f64 {
        let grid = self.model.grid;
        let params = self.model.params;
        let d = grid.dim();
        let n = grid.node_count();
        let gro = params.toughness * params.rho0;
        let kappa_tau = self.tau.map(|tau| tau.powf(params.kappa));
        let mut terms = vec![0.0; n];
        for i in 0..n {
            let gz = grid.scalar_gradient_at(zv, i);
            let mut u = [0.0; MAX_DIM];
            self.umap[i].matvec(&gz[..d], &mut u);
            let mut dens = params.gamma(zv[i]) * self.w_tilde[i]
                + params.phi(&u[..d])
                + gro * (self.z_prev[i] - zv[i]);
            if let Some(kt) = kappa_tau {
                let nsq: f64 = gz[..d].iter().map(|x| x * x).sum();
                dens += kt * nsq.powf(params.beta / 2.0);
            }
            terms[i] = dens * self.model.weights[i];
        }
        pairwise_sum(&terms) - self.loading_const
    }

    /// Gradient of `E + H_tau` (without the linear dissipation term).
    pub fn gradient_energy(&self, zv: &[f64], out: &mut [f64]) {
        let grid = self.model.grid;
        let params = self.model.params;
        let d = grid.dim();
        let n = grid.node_count();
        let kappa_tau = self.tau.map(|tau| tau.powf(params.kappa));
        out.fill(0.0);
        for i in 0..n {
            let w_i = self.model.weights[i];
            out[i] += params.gamma_prime(zv[i]) * self.w_tilde[i] * w_i;
            let gz = grid.scalar_gradient_at(zv, i);
            let mut u = [0.0; MAX_DIM];
            self.umap[i].matvec(&gz[..d], &mut u);
            let mut v = [0.0; MAX_DIM];
            params.phi_grad(&u[..d], &mut v);
            // dphi/d(gz) = M^T v.
            let mut mv = [0.0; MAX_DIM];
            self.umap[i].matvec_t(&v, &mut mv);
            if let Some(kt) = kappa_tau {
                let nsq: f64 = gz[..d].iter().map(|x| x * x).sum();
                if nsq > 0.0 {
                    let coef = kt * params.beta * nsq.powf(params.beta / 2.0 - 1.0);
                    for a in 0..d {
                        mv[a] += coef * gz[a];
                    }
                }
            }
            let multi = grid.multi(i);
            for axis in 0..d {
                let st = grid.d1_stencil(axis, multi[axis]);
                let mut mm = multi;
                for k in 0..st.len {
                    mm[axis] = st.idx[k];
                    let j = grid.flat(&mm[..d]);
                    out[j] += st.coeff[k] * mv[axis] * w_i;
                }
            }
        }
    }

    /// Gradient of the full objective (adds the linear dissipation slope).
    pub fn gradient(&self, zv: &[f64], out: &mut [f64]) {
        self.gradient_energy(zv, out);
        let gro = self.model.params.toughness * self.model.params.rho0;
        for (i, o) in out.iter_mut().enumerate() {
            *o -= gro * self.model.weights[i];
        }
    }

    pub fn weights(&self) -> &[f64] {
        self.model.weights()
    }
}
