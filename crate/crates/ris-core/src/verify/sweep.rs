//! Time-step refinement sweeps: runs a scenario at a nested sequence of
//! step counts and reports the vanishing-regularization, uniform-determinant
//! and dissipation-curve diagnostics.

use crate::constitutive::Model;
use crate::error::{Result, RisError};
use crate::grid::{ScalarField, VectorField};
use crate::optim::SolverOptions;
use crate::rothe::{self, InterpolantSide, TimeGrid, Trajectory};
use rayon::prelude::*;

/// Number of probe times (inclusive endpoints) for the dissipation curves.
pub const PROBE_POINTS: usize = 9;

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub n_steps: usize,
    pub tau: f64,
    pub final_energy: f64,
    pub total_dissipation: f64,
    /// max_k H_tau(z_k).
    pub max_reg: f64,
    /// H_tau(z_0^tau) for the truncated initial datum.
    pub init_reg: f64,
    /// min over steps of the determinant lower bound.
    pub min_det: f64,
    /// Cumulative dissipation sampled at the probe times.
    pub diss_curve: Vec<f64>,
    /// L2 distance of the damage interpolant to the previous tau level,
    /// maximized over probe times (reported, not asserted).
    pub z_diff_prev: Option<f64>,
    pub y_diff_prev: Option<f64>,
}

#[derive(Debug)]
pub struct SweepReport {
    pub probe_times: Vec<f64>,
    pub entries: Vec<SweepEntry>,
    /// Convenience flags; the acceptance suite asserts on them.
    pub reg_strictly_decreasing: bool,
    pub uniform_min_det: f64,
}

/// Run the scenario at every step count in `n_list` (strictly increasing,
/// each a multiple of the previous so the node sets nest).
#[allow(clippy::too_many_arguments)]
pub fn tau_sweep(
    model: &Model,
    z0: &ScalarField,
    y_guess: &VectorField,
    horizon: f64,
    n_list: &[usize],
    lambda0: f64,
    opts_y: &SolverOptions,
    opts_z: &SolverOptions,
) -> Result<SweepReport> {
    if n_list.is_empty() {
        return Err(RisError::invalid("taus", "need at least one step count"));
    }
    for w in n_list.windows(2) {
        if w[1] <= w[0] || w[1] % w[0] != 0 {
            return Err(RisError::invalid(
                "taus",
                "step counts must be strictly increasing and nested (each a multiple of the previous)",
            ));
        }
    }
    let trajectories: Vec<Result<Trajectory>> = n_list
        .par_iter()
        .map(|&n| {
            let tg = TimeGrid::new(horizon, n)?;
            rothe::run(model, z0, y_guess, tg, lambda0, opts_y, opts_z)
        })
        .collect();
    let mut trajs = Vec::with_capacity(n_list.len());
    for t in trajectories {
        let t = t?;
        if let Some(f) = &t.failure {
            return Err(RisError::SolverFailure {
                step: f.step,
                reason: format!("sweep run with N = {}: {}", t.time_grid.steps, f.reason),
            });
        }
        trajs.push(t);
    }

    let probe_times: Vec<f64> = (0..PROBE_POINTS)
        .map(|j| horizon * j as f64 / (PROBE_POINTS - 1) as f64)
        .collect();
    let weights: Vec<f64> = (0..model.grid.node_count())
        .map(|i| model.grid.node_weight(i))
        .collect();

    let mut entries: Vec<SweepEntry> = Vec::with_capacity(trajs.len());
    for (idx, traj) in trajs.iter().enumerate() {
        let records = &traj.records;
        let diss_curve = probe_times
            .iter()
            .map(|&t| rothe::total_variation(traj, 0.0, t))
            .collect::<Result<Vec<f64>>>()?;
        let (z_diff_prev, y_diff_prev) = if idx == 0 {
            (None, None)
        } else {
            let prev = &trajs[idx - 1];
            let mut zmax: f64 = 0.0;
            let mut ymax: f64 = 0.0;
            for &t in &probe_times {
                let (y_a, z_a) = rothe::interpolant(traj, InterpolantSide::Left, t)?;
                let (y_b, z_b) = rothe::interpolant(prev, InterpolantSide::Left, t)?;
                let mut zsq = 0.0;
                for ((a, b), w) in z_a.values().iter().zip(z_b.values()).zip(&weights) {
                    zsq += (a - b) * (a - b) * w;
                }
                zmax = zmax.max(zsq.sqrt());
                let d = model.grid.dim();
                let mut ysq = 0.0;
                for i in 0..model.grid.node_count() {
                    for c in 0..d {
                        let diff = y_a.values()[i * d + c] - y_b.values()[i * d + c];
                        ysq += diff * diff * weights[i];
                    }
                }
                ymax = ymax.max(ysq.sqrt());
            }
            (Some(zmax), Some(ymax))
        };
        entries.push(SweepEntry {
            n_steps: traj.time_grid.steps,
            tau: traj.time_grid.tau(),
            final_energy: records.last().unwrap().energy,
            total_dissipation: traj.cumulative_dissipation(traj.last_step()),
            max_reg: records.iter().map(|r| r.reg).fold(0.0, f64::max),
            init_reg: records[0].reg,
            min_det: records.iter().map(|r| r.det_min).fold(f64::INFINITY, f64::min),
            diss_curve,
            z_diff_prev,
            y_diff_prev,
        });
    }

    let reg_strictly_decreasing = entries.windows(2).all(|w| w[1].max_reg < w[0].max_reg);
    let uniform_min_det = entries.iter().map(|e| e.min_det).fold(f64::INFINITY, f64::min);
    Ok(SweepReport {
        probe_times,
        entries,
        reg_strictly_decreasing,
        uniform_min_det,
    })
}
