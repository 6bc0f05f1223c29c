//! Run configuration: flat key-value sections in plain text.
//!
//! Sections: `[grid]`, `[model]`, `[init]`, `[load]`, `[time]`,
//! `[solver.y]`, `[solver.z]`, `[verify]`, `[run]`, `[output]` and the
//! optional `[toy]` block for the solution-concept comparison.  Unknown keys
//! are rejected; every constitutive constraint is re-validated at parse
//! time with a diagnostic naming the offending key.

use crate::constitutive::{LoadSchedule, MaterialMode, ModelParams, PsiKind};
use crate::error::{Result, RisError};
use crate::grid::{Face, Grid, ScalarField, Side, VectorField};
use crate::optim::SolverOptions;
use crate::verify::compare::ToyParams;
use crate::verify::VerifyOptions;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct RunConfig {
    pub grid: Grid,
    pub params: ModelParams,
    pub schedule: LoadSchedule,
    pub z0: ScalarField,
    pub y_guess: VectorField,
    pub horizon: f64,
    pub steps: usize,
    pub solver_y: SolverOptions,
    pub solver_z: SolverOptions,
    pub verify: VerifyOptions,
    pub seed: u64,
    pub lambda0: f64,
    pub output_dir: PathBuf,
    pub snapshot_steps: Vec<usize>,
    pub toy: Option<ToyParams>,
}

struct Sections {
    // section -> key -> (value, consumed flag)
    map: BTreeMap<String, BTreeMap<String, (String, bool)>>,
}

impl Sections {
    fn parse(text: &str) -> Result<Sections> {
        let mut map: BTreeMap<String, BTreeMap<String, (String, bool)>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(RisError::Config {
                        location: format!("line {}", lineno + 1),
                        message: "malformed section header".into(),
                    });
                }
                current = line[1..line.len() - 1].trim().to_string();
                map.entry(current.clone()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(RisError::Config {
                    location: format!("line {}", lineno + 1),
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            if current.is_empty() {
                return Err(RisError::Config {
                    location: format!("line {}", lineno + 1),
                    message: "key outside of any [section]".into(),
                });
            }
            let prev = map
                .get_mut(&current)
                .unwrap()
                .insert(key.trim().to_string(), (value.trim().to_string(), false));
            if prev.is_some() {
                return Err(RisError::Config {
                    location: format!("line {}", lineno + 1),
                    message: format!("duplicate key `{}`", key.trim()),
                });
            }
        }
        Ok(Sections { map })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<String> {
        self.map.get_mut(section).and_then(|s| {
            s.get_mut(key).map(|(v, used)| {
                *used = true;
                v.clone()
            })
        })
    }

    fn require(&mut self, section: &str, key: &str) -> Result<String> {
        self.take(section, key).ok_or_else(|| RisError::Config {
            location: format!("[{section}]"),
            message: format!("missing required key `{key}`"),
        })
    }

    fn unknown_keys(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (section, keys) in &self.map {
            for (key, (_, used)) in keys {
                if !used {
                    v.push(format!("[{section}] {key}"));
                }
            }
        }
        v
    }

    fn has_section(&self, section: &str) -> bool {
        self.map.contains_key(section)
    }
}

fn parse_f64(section: &str, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| RisError::Config {
        location: format!("[{section}] {key}"),
        message: format!("`{v}` is not a real number"),
    })
}

fn parse_usize(section: &str, key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| RisError::Config {
        location: format!("[{section}] {key}"),
        message: format!("`{v}` is not a nonnegative integer"),
    })
}

fn parse_list_f64(section: &str, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| parse_f64(section, key, s.trim()))
        .collect()
}

fn parse_list_usize(section: &str, key: &str, v: &str) -> Result<Vec<usize>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|s| parse_usize(section, key, s.trim()))
        .collect()
}

fn parse_bool(section: &str, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(RisError::Config {
            location: format!("[{section}] {key}"),
            message: format!("`{v}` is not a boolean"),
        }),
    }
}

fn parse_faces(grid_dim: usize, v: &str) -> Result<Vec<Face>> {
    let mut faces = Vec::new();
    if v.trim().is_empty() || v.trim() == "none" {
        return Ok(faces);
    }
    for tok in v.split(',') {
        let tok = tok.trim();
        let err = || RisError::Config {
            location: "[grid] dirichlet_faces".into(),
            message: format!("`{tok}` is not a face (expected x<axis>min or x<axis>max)"),
        };
        let rest = tok.strip_prefix('x').ok_or_else(err)?;
        let (axis_str, side) = if let Some(a) = rest.strip_suffix("min") {
            (a, Side::Min)
        } else if let Some(a) = rest.strip_suffix("max") {
            (a, Side::Max)
        } else {
            return Err(err());
        };
        let axis: usize = axis_str.parse().map_err(|_| err())?;
        if axis >= grid_dim {
            return Err(RisError::Config {
                location: "[grid] dirichlet_faces".into(),
                message: format!("axis {axis} exceeds dimension {grid_dim}"),
            });
        }
        faces.push(Face { axis, side });
    }
    Ok(faces)
}

/// Vector-field specs: `zero`, `identity`, `constant:<c1,..,cd>`,
/// `stretch:<s1,..,sd>`, `affine:<row-major d*d matrix>;<d shift>`.
fn parse_vector_field(grid: &Grid, section: &str, key: &str, v: &str) -> Result<VectorField> {
    let d = grid.dim();
    let bad = |msg: String| RisError::Config {
        location: format!("[{section}] {key}"),
        message: msg,
    };
    if v == "zero" {
        return Ok(VectorField::zeros(grid));
    }
    if v == "identity" {
        return Ok(VectorField::identity_map(grid));
    }
    if let Some(args) = v.strip_prefix("constant:") {
        let c = parse_list_f64(section, key, args)?;
        if c.len() != d {
            return Err(bad(format!("constant needs {d} components")));
        }
        return Ok(VectorField::from_fn(grid, |_, comp| c[comp]));
    }
    if let Some(args) = v.strip_prefix("stretch:") {
        let s = parse_list_f64(section, key, args)?;
        if s.len() != d {
            return Err(bad(format!("stretch needs {d} factors")));
        }
        return Ok(VectorField::from_fn(grid, |x, comp| s[comp] * x[comp]));
    }
    if let Some(args) = v.strip_prefix("affine:") {
        let (mat, shift) = args.split_once(';').ok_or_else(|| {
            bad("affine spec needs `<matrix>;<shift>`".into())
        })?;
        let m = parse_list_f64(section, key, mat)?;
        let b = parse_list_f64(section, key, shift)?;
        if m.len() != d * d || b.len() != d {
            return Err(bad(format!("affine needs {} matrix entries and {d} shifts", d * d)));
        }
        return Ok(VectorField::from_fn(grid, |x, comp| {
            let mut val = b[comp];
            for a in 0..d {
                val += m[comp * d + a] * x[a];
            }
            val
        }));
    }
    Err(bad(format!("unknown field spec `{v}`")))
}

/// Damage specs: `constant:<v>`, `ramp:<axis,from,to>`,
/// `notch:<axis,center,halfwidth,floor>`.
fn parse_damage_field(grid: &Grid, v: &str) -> Result<ScalarField> {
    let bad = |msg: String| RisError::Config {
        location: "[init] z0".into(),
        message: msg,
    };
    if let Some(args) = v.strip_prefix("constant:") {
        let c = parse_f64("init", "z0", args)?;
        if !(0.0..=1.0).contains(&c) {
            return Err(bad("initial damage must lie in [0, 1]".into()));
        }
        return Ok(ScalarField::constant(grid, c));
    }
    if let Some(args) = v.strip_prefix("ramp:") {
        let a = parse_list_f64("init", "z0", args)?;
        if a.len() != 3 {
            return Err(bad("ramp needs axis,from,to".into()));
        }
        let axis = a[0] as usize;
        if axis >= grid.dim() {
            return Err(bad("ramp axis exceeds dimension".into()));
        }
        let (from, to) = (a[1], a[2]);
        let ext = grid.extents()[axis];
        return ScalarField::new(
            grid,
            (0..grid.node_count())
                .map(|i| {
                    let x = grid.node_position(i);
                    (from + (to - from) * x[axis] / ext).clamp(0.0, 1.0)
                })
                .collect(),
        );
    }
    if let Some(args) = v.strip_prefix("notch:") {
        let a = parse_list_f64("init", "z0", args)?;
        if a.len() != 4 {
            return Err(bad("notch needs axis,center,halfwidth,floor".into()));
        }
        let axis = a[0] as usize;
        if axis >= grid.dim() {
            return Err(bad("notch axis exceeds dimension".into()));
        }
        let (center, halfwidth, floor) = (a[1], a[2], a[3]);
        if !(0.0..=1.0).contains(&floor) {
            return Err(bad("notch floor must lie in [0, 1]".into()));
        }
        return ScalarField::new(
            grid,
            (0..grid.node_count())
                .map(|i| {
                    let x = grid.node_position(i);
                    if (x[axis] - center).abs() <= halfwidth {
                        floor
                    } else {
                        1.0
                    }
                })
                .collect(),
        );
    }
    Err(bad(format!("unknown damage spec `{v}`")))
}

fn solver_options(sec: &mut Sections, section: &str, defaults: SolverOptions) -> Result<SolverOptions> {
    let mut o = defaults;
    if let Some(v) = sec.take(section, "grad_tol") {
        o.grad_tol = parse_f64(section, "grad_tol", &v)?;
    }
    if let Some(v) = sec.take(section, "max_iters") {
        o.max_iters = parse_usize(section, "max_iters", &v)?;
    }
    if let Some(v) = sec.take(section, "ls_shrink") {
        o.ls_shrink = parse_f64(section, "ls_shrink", &v)?;
    }
    if let Some(v) = sec.take(section, "ls_armijo") {
        o.ls_armijo = parse_f64(section, "ls_armijo", &v)?;
    }
    if let Some(v) = sec.take(section, "det_floor") {
        o.det_floor = parse_f64(section, "det_floor", &v)?;
    }
    if let Some(v) = sec.take(section, "memory") {
        o.memory = parse_usize(section, "memory", &v)?;
    }
    o.validate()?;
    Ok(o)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| RisError::Config {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let mut sec = Sections::parse(text)?;

    // [grid]
    let dim = parse_usize("grid", "dim", &sec.require("grid", "dim")?)?;
    let nodes = parse_list_usize("grid", "nodes", &sec.require("grid", "nodes")?)?;
    let extents = parse_list_f64("grid", "extents", &sec.require("grid", "extents")?)?;
    let grid = Grid::new(dim, &extents, &nodes)?;
    let faces = parse_faces(dim, &sec.require("grid", "dirichlet_faces")?)?;

    // [model]
    let mut params = ModelParams::defaults(dim);
    macro_rules! take_f64_into {
        ($section:literal, { $($key:literal => $field:expr),+ $(,)? }) => {
            $(if let Some(v) = sec.take($section, $key) {
                $field = parse_f64($section, $key, &v)?;
            })+
        };
    }
    take_f64_into!("model", {
        "a" => params.a,
        "b" => params.b,
        "c" => params.c,
        "eps_reg" => params.eps_reg,
        "p" => params.p,
        "q" => params.q,
        "r" => params.r,
        "s" => params.s,
        "alpha" => params.alpha,
        "beta" => params.beta,
        "kappa" => params.kappa,
        "rho0" => params.rho0,
        "G" => params.toughness,
        "eps_gamma" => params.eps_gamma,
        "eps_pen" => params.eps_pen,
    });
    match sec.take("model", "mode").as_deref() {
        None | Some("nonsimple") => params.material_mode = MaterialMode::Nonsimple,
        Some("polyconvex_simple") => params.material_mode = MaterialMode::PolyconvexSimple,
        Some(other) => {
            return Err(RisError::Config {
                location: "[model] mode".into(),
                message: format!("unknown mode `{other}` (nonsimple | polyconvex_simple)"),
            })
        }
    }
    match sec.take("model", "psi").as_deref() {
        None | Some("ogden") => params.psi = PsiKind::Ogden,
        Some("svk") => {
            let lambda = parse_f64(
                "model",
                "lambda_svk",
                &sec.require("model", "lambda_svk")?,
            )?;
            let mu = parse_f64("model", "mu_svk", &sec.require("model", "mu_svk")?)?;
            params.psi = PsiKind::SaintVenantKirchhoff { lambda, mu };
        }
        Some(other) => {
            return Err(RisError::Config {
                location: "[model] psi".into(),
                message: format!("unknown psi `{other}` (ogden | svk)"),
            })
        }
    }
    match sec.take("model", "d_log").as_deref() {
        None | Some("auto") => {
            params.d_log = crate::constitutive::stress_free_d_log(
                dim, params.a, params.b, params.c, params.p, params.q, params.r,
            )
        }
        Some(v) => params.d_log = parse_f64("model", "d_log", v)?,
    }
    if let Some(v) = sec.take("model", "cn_resolution") {
        params.cn_resolution = parse_usize("model", "cn_resolution", &v)?;
    }
    params.validate()?;

    // [time]
    let horizon = parse_f64("time", "T", &sec.require("time", "T")?)?;
    let steps = parse_usize("time", "N", &sec.require("time", "N")?)?;
    if steps == 0 {
        return Err(RisError::Config {
            location: "[time] N".into(),
            message: "need at least one time step".into(),
        });
    }

    // [load]
    let breakpoints = parse_list_f64("load", "breakpoints", &sec.require("load", "breakpoints")?)?;
    let m = breakpoints.len();
    let mut bulk = Vec::with_capacity(m);
    let mut surface = Vec::with_capacity(m);
    let mut dirichlet = Vec::with_capacity(m);
    let mut pressure: Option<Vec<f64>> = None;
    for i in 0..m {
        let b = sec.require("load", &format!("bulk.{i}"))?;
        bulk.push(parse_vector_field(&grid, "load", &format!("bulk.{i}"), &b)?);
        let s = sec.require("load", &format!("surface.{i}"))?;
        surface.push(parse_vector_field(&grid, "load", &format!("surface.{i}"), &s)?);
        let d = sec.require("load", &format!("dirichlet.{i}"))?;
        dirichlet.push(parse_vector_field(&grid, "load", &format!("dirichlet.{i}"), &d)?);
        if let Some(p) = sec.take("load", &format!("pressure.{i}")) {
            pressure
                .get_or_insert_with(Vec::new)
                .push(parse_f64("load", &format!("pressure.{i}"), &p)?);
        }
    }
    if let Some(p) = &pressure {
        if p.len() != m {
            return Err(RisError::Config {
                location: "[load] pressure.*".into(),
                message: "pressure must be given at every breakpoint or not at all".into(),
            });
        }
    }
    let schedule = LoadSchedule::new(breakpoints, bulk, surface, dirichlet, pressure, faces)?;
    if (schedule.horizon() - horizon).abs() > 1e-12 * horizon.max(1.0) {
        return Err(RisError::Config {
            location: "[time] T".into(),
            message: format!(
                "horizon {horizon} does not match the final load breakpoint {}",
                schedule.horizon()
            ),
        });
    }

    // [init]
    let z0 = parse_damage_field(&grid, &sec.require("init", "z0")?)?;
    let y_guess = match sec.take("init", "y0") {
        None => VectorField::identity_map(&grid),
        Some(v) => parse_vector_field(&grid, "init", "y0", &v)?,
    };

    // [solver.y] / [solver.z]
    let solver_y = solver_options(&mut sec, "solver.y", SolverOptions::default_y())?;
    let solver_z = solver_options(&mut sec, "solver.z", SolverOptions::default_z())?;

    // [verify]
    let mut verify = VerifyOptions::default();
    if let Some(v) = sec.take("verify", "stability_tol_rel") {
        verify.stability_tol_rel = parse_f64("verify", "stability_tol_rel", &v)?;
    }
    if let Some(v) = sec.take("verify", "semistab_tol_rel") {
        verify.semistab_tol_rel = parse_f64("verify", "semistab_tol_rel", &v)?;
    }
    if let Some(v) = sec.take("verify", "eineq_tol_rel") {
        verify.eineq_tol_rel = parse_f64("verify", "eineq_tol_rel", &v)?;
    }
    if let Some(v) = sec.take("verify", "stability_draws") {
        verify.stability_draws = parse_usize("verify", "stability_draws", &v)?;
    }
    if let Some(v) = sec.take("verify", "stability_amplitudes") {
        verify.stability_amplitudes = parse_list_f64("verify", "stability_amplitudes", &v)?;
    }
    if let Some(v) = sec.take("verify", "multistart") {
        verify.multistart = parse_usize("verify", "multistart", &v)?;
    }
    if let Some(v) = sec.take("verify", "semistab_random") {
        verify.semistab_random = parse_usize("verify", "semistab_random", &v)?;
    }
    if let Some(v) = sec.take("verify", "semistab_truncated") {
        verify.semistab_truncated = parse_usize("verify", "semistab_truncated", &v)?;
    }
    if let Some(v) = sec.take("verify", "semistab_shifts") {
        verify.semistab_shifts = parse_list_f64("verify", "semistab_shifts", &v)?;
    }
    if let Some(v) = sec.take("verify", "long_range_pairs") {
        verify.long_range_pairs = Some(parse_usize("verify", "long_range_pairs", &v)?);
    }
    if let Some(v) = sec.take("verify", "cn_enabled") {
        verify.cn_enabled = parse_bool("verify", "cn_enabled", &v)?;
    }
    if verify.cn_enabled && grid.dim() >= 2 && params.cn_resolution < 64 {
        return Err(RisError::Config {
            location: "[model] cn_resolution".into(),
            message: "the image-measure estimate needs at least 64 pixels per unit length".into(),
        });
    }

    // [run]
    let seed = match sec.take("run", "seed") {
        None => 0,
        Some(v) => v.parse::<u64>().map_err(|_| RisError::Config {
            location: "[run] seed".into(),
            message: format!("`{v}` is not an unsigned integer"),
        })?,
    };
    verify.seed = seed;
    let lambda0 = match sec.take("run", "lambda0") {
        None => 1.0,
        Some(v) => parse_f64("run", "lambda0", &v)?,
    };
    if !(lambda0 > 0.0) {
        return Err(RisError::Config {
            location: "[run] lambda0".into(),
            message: "truncation scale must be positive".into(),
        });
    }

    // [output]
    let output_dir = PathBuf::from(sec.require("output", "directory")?);
    let snapshot_steps = match sec.take("output", "snapshot_steps") {
        None => Vec::new(),
        Some(v) => {
            let list = parse_list_usize("output", "snapshot_steps", &v)?;
            if let Some(bad) = list.iter().find(|&&k| k > steps) {
                return Err(RisError::Config {
                    location: "[output] snapshot_steps".into(),
                    message: format!("snapshot step {bad} exceeds N = {steps}"),
                });
            }
            list
        }
    };

    // [toy] (optional)
    let toy = if sec.has_section("toy") {
        let mut t = ToyParams::frozen_fixture();
        take_f64_into!("toy", {
            "eps_gamma" => t.eps_gamma,
            "G" => t.toughness,
            "penalty" => t.penalty,
            "well" => t.well,
            "load_start" => t.load_start,
            "load_end" => t.load_end,
            "y_min" => t.y_min,
            "y_max" => t.y_max,
            "y_step" => t.y_step,
        });
        if let Some(v) = sec.take("toy", "steps") {
            t.steps = parse_usize("toy", "steps", &v)?;
        }
        if let Some(v) = sec.take("toy", "z_divisions") {
            t.z_divisions = parse_usize("toy", "z_divisions", &v)?;
        }
        t.validate()?;
        Some(t)
    } else {
        None
    };

    let unknown = sec.unknown_keys();
    if !unknown.is_empty() {
        return Err(RisError::Config {
            location: unknown.join(", "),
            message: "unknown key(s)".into(),
        });
    }

    Ok(RunConfig {
        grid,
        params,
        schedule,
        z0,
        y_guess,
        horizon,
        steps,
        solver_y,
        solver_z,
        verify,
        seed,
        lambda0,
        output_dir,
        snapshot_steps,
        toy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_cfg() -> String {
        "
[grid]
dim = 1
nodes = 8
extents = 1.0
dirichlet_faces = x0min,x0max

[model]
G = 0.06

[init]
z0 = constant:1

[load]
breakpoints = 0,1
bulk.0 = zero
bulk.1 = zero
surface.0 = zero
surface.1 = zero
dirichlet.0 = identity
dirichlet.1 = stretch:1.08

[time]
T = 1.0
N = 40

[output]
directory = out/test
"
        .to_string()
    }

    #[test]
    fn minimal_config_parses() {
        let cfg = parse_config_str(&minimal_cfg()).unwrap();
        assert_eq!(cfg.steps, 40);
        assert_eq!(cfg.grid.node_count(), 8);
        assert_eq!(cfg.schedule.dirichlet_faces().len(), 2);
        // Auto d_log makes the reference stress-free.
        assert!((cfg.params.d_log - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_alpha_at_most_dim() {
        let text = minimal_cfg().replace("[model]\nG = 0.06", "[model]\nG = 0.06\nalpha = 1.0");
        let err = parse_config_str(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha"), "{msg}");
        assert!(msg.contains("alpha > d"), "{msg}");
    }

    #[test]
    fn rejects_beta_equal_alpha() {
        let text = minimal_cfg().replace("[model]\nG = 0.06", "[model]\nG = 0.06\nbeta = 4.0");
        let err = parse_config_str(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("beta > alpha + kappa"), "{msg}");
    }

    #[test]
    fn rejects_small_s() {
        let text = minimal_cfg().replace("[model]\nG = 0.06", "[model]\nG = 0.06\ns = 0.5");
        let err = parse_config_str(&text).unwrap_err();
        assert!(err.to_string().contains("d*p/(p-d)"), "{err}");
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = minimal_cfg() + "\n[model]\n"; // duplicate section is fine, but...
        let text = text.replace("[output]", "[outputs]\nbogus = 1\n[output]");
        let err = parse_config_str(&text).unwrap_err();
        assert!(err.to_string().contains("unknown key"), "{err}");
    }

    #[test]
    fn rejects_missing_file() {
        assert!(parse_config(Path::new("/nonexistent/path.cfg")).is_err());
    }
}
