//! Energetic versus separately-global evolution on a 0-D toy: a scalar
//! stretch with a double-well stored energy, a scalar damage variable and a
//! quadratic load penalty.  Small enough for exhaustive search, it exhibits
//! the early jumps of the energetic incremental problem.

use crate::error::{Result, RisError};

#[derive(Debug, Clone)]
pub struct ToyParams {
    /// Residual stiffness in gamma(z) = z^2 + eps.
    pub eps_gamma: f64,
    /// Dissipation coefficient G (rho0 = 1).
    pub toughness: f64,
    /// Load penalty coefficient: pen * (y - load)^2.
    pub penalty: f64,
    /// Double-well scale: psi(y) = well * (y^2 - 1)^2.
    pub well: f64,
    pub load_start: f64,
    pub load_end: f64,
    pub steps: usize,
    /// Number of damage grid intervals (grid step = 1 / z_divisions).
    pub z_divisions: usize,
    pub y_min: f64,
    pub y_max: f64,
    /// Stretch grid step for the dense minimization.
    pub y_step: f64,
}

impl ToyParams {
    pub fn frozen_fixture() -> ToyParams {
        ToyParams {
            eps_gamma: 0.01,
            toughness: 0.15,
            penalty: 0.3,
            well: 1.0,
            load_start: 1.0,
            load_end: 3.5,
            steps: 40,
            z_divisions: 1000,
            y_min: -0.5,
            y_max: 4.5,
            y_step: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.z_divisions == 0 {
            return Err(RisError::invalid("toy", "steps and z grid must be positive"));
        }
        if !(self.y_step > 0.0 && self.y_max > self.y_min) {
            return Err(RisError::invalid("toy", "invalid stretch grid"));
        }
        for (k, v) in [
            ("toy.eps_gamma", self.eps_gamma),
            ("toy.G", self.toughness),
            ("toy.penalty", self.penalty),
            ("toy.well", self.well),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(RisError::invalid(k, "must be a nonnegative real"));
            }
        }
        Ok(())
    }

    fn gamma(&self, z: f64) -> f64 {
        if z >= 0.0 {
            z * z + self.eps_gamma
        } else {
            self.eps_gamma
        }
    }

    fn psi(&self, y: f64) -> f64 {
        let w = y * y - 1.0;
        self.well * w * w
    }

    pub fn energy(&self, y: f64, z: f64, load: f64) -> f64 {
        self.gamma(z) * self.psi(y) + self.penalty * (y - load) * (y - load)
    }

    pub fn load_at(&self, k: usize) -> f64 {
        self.load_start + (self.load_end - self.load_start) * k as f64 / self.steps as f64
    }

    fn z_value(&self, m: usize) -> f64 {
        m as f64 / self.z_divisions as f64
    }

    /// Dense scan over the stretch grid: global minimum of y -> energy.
    fn min_over_y(&self, z: f64, load: f64) -> (f64, f64) {
        let count = ((self.y_max - self.y_min) / self.y_step).round() as usize;
        let mut best_y = self.y_min;
        let mut best_v = f64::INFINITY;
        for i in 0..=count {
            let y = self.y_min + i as f64 * self.y_step;
            let v = self.energy(y, z, load);
            if v < best_v {
                best_v = v;
                best_y = y;
            }
        }
        (best_y, best_v)
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonRecord {
    pub loads: Vec<f64>,
    /// z-path of the energetic incremental problem (joint global minimum).
    pub z_energetic: Vec<f64>,
    /// z-path of the alternating (separately global) scheme.
    pub z_alternating: Vec<f64>,
    /// First step with damage below the initial value, if any.
    pub onset_energetic: Option<usize>,
    pub onset_alternating: Option<usize>,
    pub paths_differ: bool,
    /// Continuous-solve cross-check of the alternating z-path (independent
    /// route; should match the grid path to one grid cell).
    pub z_alternating_continuous: Vec<f64>,
}

impl ComparisonRecord {
    /// The energetic onset never trails the separately-global one; absent
    /// onsets count as past the horizon.
    pub fn ordering_holds(&self, steps: usize) -> bool {
        let en = self.onset_energetic.unwrap_or(steps + 1);
        let alt = self.onset_alternating.unwrap_or(steps + 1);
        en <= alt
    }
}

fn onset(path: &[f64], z0: f64, grid: f64) -> Option<usize> {
    path.iter().position(|&z| z < z0 - 0.5 * grid)
}

/// Compute both incremental solution concepts by exhaustive search.
///
/// Per time step, the energetic path takes the joint global minimum of
/// `E(k, y, z) + G (z_prev - z)` over the full (y, z) grid, while the
/// alternating path first minimizes over y at frozen damage and then solves
/// the convex damage problem at the frozen stretch.  Damage is scanned from
/// the previous level downward and moves only on strict improvement, so
/// ties keep the least-damaged state.
pub fn compare_solution_concepts(p: &ToyParams) -> Result<ComparisonRecord> {
    p.validate()?;
    let m_max = p.z_divisions;
    let grid_step = 1.0 / m_max as f64;
    let mut z_en = 1.0;
    let mut z_alt = 1.0;
    let mut z_alt_cont = 1.0;
    let mut loads = Vec::with_capacity(p.steps + 1);
    let mut path_en = Vec::with_capacity(p.steps + 1);
    let mut path_alt = Vec::with_capacity(p.steps + 1);
    let mut path_alt_cont = Vec::with_capacity(p.steps + 1);
    loads.push(p.load_at(0));
    path_en.push(z_en);
    path_alt.push(z_alt);
    path_alt_cont.push(z_alt_cont);

    for k in 1..=p.steps {
        let load = p.load_at(k);
        loads.push(load);

        // Energetic: joint global minimization over the z-grid (largest-z
        // tie break via strict improvement scanning downward).
        {
            let m_prev = (z_en * m_max as f64).round() as usize;
            let mut best_m = m_prev;
            let mut best_v = p.min_over_y(p.z_value(m_prev), load).1;
            for m in (0..m_prev).rev() {
                let z = p.z_value(m);
                let v = p.min_over_y(z, load).1 + p.toughness * (z_en - z);
                if v < best_v {
                    best_v = v;
                    best_m = m;
                }
            }
            z_en = p.z_value(best_m);
            path_en.push(z_en);
        }

        // Alternating: global y at frozen z, then the convex z-problem.
        {
            let (y_k, _) = p.min_over_y(z_alt, load);
            let m_prev = (z_alt * m_max as f64).round() as usize;
            let mut best_m = m_prev;
            let mut best_v = p.energy(y_k, p.z_value(m_prev), load);
            for m in (0..m_prev).rev() {
                let z = p.z_value(m);
                let v = p.energy(y_k, z, load) + p.toughness * (z_alt - z);
                if v < best_v {
                    best_v = v;
                    best_m = m;
                }
            }
            z_alt = p.z_value(best_m);
            path_alt.push(z_alt);

            // Independent continuous route: stationarity of the convex
            // damage objective gives z* = G / (2 psi(y)), clamped to the box.
            let (y_c, _) = p.min_over_y(z_alt_cont, load);
            let psi = p.psi(y_c);
            z_alt_cont = if psi > 0.0 {
                (p.toughness / (2.0 * psi)).clamp(0.0, z_alt_cont)
            } else {
                z_alt_cont
            };
            path_alt_cont.push(z_alt_cont);
        }
    }

    let paths_differ = path_en
        .iter()
        .zip(&path_alt)
        .any(|(a, b)| (a - b).abs() > 0.5 * grid_step);
    Ok(ComparisonRecord {
        loads,
        onset_energetic: onset(&path_en, 1.0, grid_step),
        onset_alternating: onset(&path_alt, 1.0, grid_step),
        z_energetic: path_en,
        z_alternating: path_alt,
        paths_differ,
        z_alternating_continuous: path_alt_cont,
    })
}
