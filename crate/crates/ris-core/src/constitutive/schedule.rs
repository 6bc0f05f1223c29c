//! Time-dependent loading data: bulk and surface loads, penalized Dirichlet
//! data and an optional pressure, all continuous and piecewise-affine in
//! time over a shared breakpoint sequence.

use crate::error::{Result, RisError};
use crate::grid::{Face, Grid, VectorField};

#[derive(Debug, Clone)]
pub struct LoadSchedule {
    breakpoints: Vec<f64>,
    bulk: Vec<VectorField>,
    surface: Vec<VectorField>,
    dirichlet: Vec<VectorField>,
    pressure: Option<Vec<f64>>,
    dirichlet_faces: Vec<Face>,
}

/// Loads evaluated at a fixed time: affine blend of the bracketing
/// breakpoint fields plus the in-piece rates (time slopes).
#[derive(Debug, Clone)]
pub struct LoadsAt {
    pub t: f64,
    pub piece: usize,
    pub bulk: Vec<f64>,
    pub bulk_rate: Vec<f64>,
    pub surface: Vec<f64>,
    pub surface_rate: Vec<f64>,
    pub dirichlet: Vec<f64>,
    pub dirichlet_rate: Vec<f64>,
    pub pressure: f64,
    pub pressure_rate: f64,
}

impl LoadSchedule {
    pub fn new(
        breakpoints: Vec<f64>,
        bulk: Vec<VectorField>,
        surface: Vec<VectorField>,
        dirichlet: Vec<VectorField>,
        pressure: Option<Vec<f64>>,
        dirichlet_faces: Vec<Face>,
    ) -> Result<LoadSchedule> {
        if breakpoints.len() < 2 {
            return Err(RisError::invalid(
                "load.breakpoints",
                "need at least two breakpoints (t = 0 and t = T)",
            ));
        }
        if breakpoints[0] != 0.0 {
            return Err(RisError::invalid("load.breakpoints", "must start at t = 0"));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RisError::invalid(
                "load.breakpoints",
                "must be strictly increasing",
            ));
        }
        let m = breakpoints.len();
        if bulk.len() != m || surface.len() != m || dirichlet.len() != m {
            return Err(RisError::invalid(
                "load",
                "each breakpoint needs bulk, surface and dirichlet fields",
            ));
        }
        if let Some(p) = &pressure {
            if p.len() != m {
                return Err(RisError::invalid(
                    "load.pressure",
                    "one pressure value per breakpoint",
                ));
            }
        }
        let grid = bulk[0].grid();
        for f in bulk.iter().chain(surface.iter()).chain(dirichlet.iter()) {
            if f.grid() != grid {
                return Err(RisError::GridMismatch);
            }
        }
        let mut seen = Vec::new();
        for f in &dirichlet_faces {
            if f.axis >= grid.dim() {
                return Err(RisError::invalid(
                    "grid.dirichlet_faces",
                    "face axis exceeds grid dimension",
                ));
            }
            if seen.contains(f) {
                return Err(RisError::invalid("grid.dirichlet_faces", "duplicate face"));
            }
            seen.push(*f);
        }
        Ok(LoadSchedule {
            breakpoints,
            bulk,
            surface,
            dirichlet,
            pressure,
            dirichlet_faces,
        })
    }

    /// A schedule constant in time (both breakpoints carry the same data).
    pub fn static_schedule(
        grid: &Grid,
        dirichlet_faces: Vec<Face>,
        dirichlet: VectorField,
        horizon: f64,
    ) -> Result<LoadSchedule> {
        let zero = VectorField::zeros(grid);
        LoadSchedule::new(
            vec![0.0, horizon],
            vec![zero.clone(), zero.clone()],
            vec![zero.clone(), zero],
            vec![dirichlet.clone(), dirichlet],
            None,
            dirichlet_faces,
        )
    }

    pub fn horizon(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn dirichlet_faces(&self) -> &[Face] {
        &self.dirichlet_faces
    }

    pub fn grid(&self) -> &Grid {
        self.bulk[0].grid()
    }

    /// Index of the piece containing `t`, right-continuous at breakpoints
    /// (the final time belongs to the last piece).
    pub fn piece_of(&self, t: f64) -> Result<usize> {
        let horizon = self.horizon();
        if !(0.0..=horizon).contains(&t) {
            return Err(RisError::invalid(
                "t",
                format!("time {t} outside the schedule [0, {horizon}]"),
            ));
        }
        if t == horizon {
            return Ok(self.breakpoints.len() - 2);
        }
        let mut piece = 0;
        while self.breakpoints[piece + 1] <= t {
            piece += 1;
        }
        Ok(piece)
    }

    pub fn loads_at(&self, t: f64) -> Result<LoadsAt> {
        let piece = self.piece_of(t)?;
        Ok(self.loads_on_piece(piece, t))
    }

    /// Blend on a specific piece (used to take one-sided values at
    /// breakpoints from a chosen side).
    pub fn loads_on_piece(&self, piece: usize, t: f64) -> LoadsAt {
        let (t0, t1) = (self.breakpoints[piece], self.breakpoints[piece + 1]);
        let dt = t1 - t0;
        let w = (t - t0) / dt;
        let blend = |lo: &VectorField, hi: &VectorField| -> (Vec<f64>, Vec<f64>) {
            let vals = lo
                .values()
                .iter()
                .zip(hi.values())
                .map(|(a, b)| a + w * (b - a))
                .collect();
            let rates = lo
                .values()
                .iter()
                .zip(hi.values())
                .map(|(a, b)| (b - a) / dt)
                .collect();
            (vals, rates)
        };
        let (bulk, bulk_rate) = blend(&self.bulk[piece], &self.bulk[piece + 1]);
        let (surface, surface_rate) = blend(&self.surface[piece], &self.surface[piece + 1]);
        let (dirichlet, dirichlet_rate) =
            blend(&self.dirichlet[piece], &self.dirichlet[piece + 1]);
        let (pressure, pressure_rate) = match &self.pressure {
            None => (0.0, 0.0),
            Some(p) => {
                let (a, b) = (p[piece], p[piece + 1]);
                (a + w * (b - a), (b - a) / dt)
            }
        };
        LoadsAt {
            t,
            piece,
            bulk,
            bulk_rate,
            surface,
            surface_rate,
            dirichlet,
            dirichlet_rate,
            pressure,
            pressure_rate,
        }
    }

    pub fn has_pressure(&self) -> bool {
        self.pressure.is_some()
    }
}

/// A-posteriori power-control data: `|d_t E| <= lambda(t) (E + C0)` on the
/// sampled states, with piecewise-constant `lambda`.
#[derive(Debug, Clone)]
pub struct GronwallData {
    pub c0: f64,
    /// Shared with the schedule breakpoints.
    pub piece_times: Vec<f64>,
    /// One rate per piece, nonnegative.
    pub rates: Vec<f64>,
}

impl GronwallData {
    /// Running integral Lambda(t) of the piecewise-constant rate.
    pub fn capital_lambda(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (piece, rate) in self.rates.iter().enumerate() {
            let (t0, t1) = (self.piece_times[piece], self.piece_times[piece + 1]);
            if t <= t0 {
                break;
            }
            acc += rate * (t.min(t1) - t0);
        }
        acc
    }

    pub fn rate_at(&self, t: f64) -> f64 {
        for (piece, rate) in self.rates.iter().enumerate() {
            if t < self.piece_times[piece + 1] || piece == self.rates.len() - 1 {
                return *rate;
            }
        }
        0.0
    }

    /// Uniformly scaled copy (used by the checker-sensitivity tests).
    pub fn scaled(&self, factor: f64) -> GronwallData {
        GronwallData {
            c0: self.c0,
            piece_times: self.piece_times.clone(),
            rates: self.rates.iter().map(|r| r * factor).collect(),
        }
    }
}
