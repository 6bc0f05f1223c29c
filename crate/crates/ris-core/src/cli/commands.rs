//! The run/sweep/compare/truncate commands: drive the time stepper and the
//! certificate suite, and emit the CSV, field-dump and certificate files.
//!
//! Exit-code contract: 0 = run completed and certificate PASS, 1 = solver or
//! input failure, 2 = run completed but a certificate check FAILED.

use crate::cli::config::{parse_config, RunConfig};
use crate::constitutive::Model;
use crate::error::{Result, RisError};
use crate::field_io;
use crate::rothe::{self, TimeGrid, Trajectory};
use crate::verify::{self, compare, sweep, CertificateBundle};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CERT_FAIL: i32 = 2;

fn config_hash(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    Ok(out)
}

fn trajectory_csv(trajectory: &Trajectory, bundle: Option<&CertificateBundle>) -> String {
    let mut out = String::new();
    out.push_str("k,t,energy,reg,diss_increment,cum_diss,power,det_min,cn_defect\n");
    let mut cum = 0.0;
    for (k, r) in trajectory.records.iter().enumerate() {
        cum += r.diss_increment;
        let cn = bundle
            .and_then(|b| b.steps.get(k))
            .and_then(|s| s.cn_defect)
            .map(|d| format!("{d:.16e}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.step, r.t, r.energy, r.reg, r.diss_increment, cum, r.power_sample, r.det_min, cn
        );
    }
    out
}

fn write_snapshots(dir: &Path, cfg: &RunConfig, trajectory: &Trajectory) -> Result<()> {
    if cfg.snapshot_steps.is_empty() {
        return Ok(());
    }
    let fields_dir = dir.join("fields");
    std::fs::create_dir_all(&fields_dir)?;
    for &k in &cfg.snapshot_steps {
        if k >= trajectory.states.len() {
            continue;
        }
        let (y, z) = &trajectory.states[k];
        field_io::write_vector(&fields_dir.join(format!("step_{k}.y.risfield")), y)?;
        field_io::write_scalar(&fields_dir.join(format!("step_{k}.z.risfield")), z)?;
    }
    Ok(())
}

/// Run the scenario, verify the certificate and write all outputs.
pub fn cmd_run(cfg_path: &Path) -> Result<i32> {
    let cfg = parse_config(cfg_path)?;
    let hash = config_hash(cfg_path)?;
    let model = Model::new(&cfg.grid, &cfg.params, &cfg.schedule)?;
    let time_grid = TimeGrid::new(cfg.horizon, cfg.steps)?;
    let trajectory = rothe::run(
        &model,
        &cfg.z0,
        &cfg.y_guess,
        time_grid,
        cfg.lambda0,
        &cfg.solver_y,
        &cfg.solver_z,
    )?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    if let Some(failure) = &trajectory.failure {
        // Keep the partial trajectory for post-mortems.
        std::fs::write(
            cfg.output_dir.join("trajectory.csv"),
            trajectory_csv(&trajectory, None),
        )?;
        eprintln!(
            "solver failure at step {} ({} stage): {}",
            failure.step, failure.stage, failure.reason
        );
        return Ok(EXIT_FAILURE);
    }
    let bundle = verify::check_separately_global_certificate(
        &model,
        &trajectory,
        &cfg.z0,
        &cfg.verify,
        &cfg.solver_y,
    )?;
    std::fs::write(
        cfg.output_dir.join("trajectory.csv"),
        trajectory_csv(&trajectory, Some(&bundle)),
    )?;
    std::fs::write(
        cfg.output_dir.join("certificate.txt"),
        verify::certificate_to_string(&bundle, &hash),
    )?;
    write_snapshots(&cfg.output_dir, &cfg, &trajectory)?;
    if bundle.pass {
        println!("CERTIFICATE PASS ({} checks)", bundle.records.len());
        Ok(EXIT_OK)
    } else {
        let failures: Vec<String> = bundle
            .failures()
            .map(|r| format!("{} at step {}", r.name, r.step))
            .collect();
        eprintln!("CERTIFICATE FAIL: {}", failures.join("; "));
        Ok(EXIT_CERT_FAIL)
    }
}

fn sweep_csv(report: &sweep::SweepReport) -> String {
    let mut out = String::new();
    out.push_str("n,tau,final_energy,total_dissipation,max_reg,init_reg,min_det,z_diff_prev,y_diff_prev");
    for (j, t) in report.probe_times.iter().enumerate() {
        let _ = write!(out, ",diss_at_p{j}_t{t:.3}");
    }
    out.push('\n');
    for e in &report.entries {
        let zd = e.z_diff_prev.map(|v| format!("{v:.16e}")).unwrap_or_default();
        let yd = e.y_diff_prev.map(|v| format!("{v:.16e}")).unwrap_or_default();
        let _ = write!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            e.n_steps,
            e.tau,
            e.final_energy,
            e.total_dissipation,
            e.max_reg,
            e.init_reg,
            e.min_det,
            zd,
            yd
        );
        for v in &e.diss_curve {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}

/// Refinement sweep over the given step counts.
pub fn cmd_sweep(cfg_path: &Path, taus: &[usize]) -> Result<i32> {
    let cfg = parse_config(cfg_path)?;
    let model = Model::new(&cfg.grid, &cfg.params, &cfg.schedule)?;
    let report = match sweep::tau_sweep(
        &model,
        &cfg.z0,
        &cfg.y_guess,
        cfg.horizon,
        taus,
        cfg.lambda0,
        &cfg.solver_y,
        &cfg.solver_z,
    ) {
        Ok(r) => r,
        Err(RisError::SolverFailure { step, reason }) => {
            eprintln!("sweep run failed at step {step}: {reason}");
            return Ok(EXIT_FAILURE);
        }
        Err(e) => return Err(e),
    };
    std::fs::create_dir_all(&cfg.output_dir)?;
    std::fs::write(cfg.output_dir.join("sweep.csv"), sweep_csv(&report))?;
    println!(
        "sweep complete: max_reg decreasing = {}, uniform min det = {:.6e}",
        report.reg_strictly_decreasing, report.uniform_min_det
    );
    Ok(EXIT_OK)
}

fn compare_report(rec: &compare::ComparisonRecord) -> String {
    let mut out = String::new();
    out.push_str("RISCOMPARE v1\n");
    let fmt_onset = |o: Option<usize>| o.map(|k| k.to_string()).unwrap_or_else(|| "none".into());
    let _ = writeln!(out, "onset_energetic={}", fmt_onset(rec.onset_energetic));
    let _ = writeln!(out, "onset_alternating={}", fmt_onset(rec.onset_alternating));
    let _ = writeln!(out, "paths_differ={}", rec.paths_differ);
    out.push_str("k,load,z_energetic,z_alternating,z_alternating_continuous\n");
    for k in 0..rec.loads.len() {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e}",
            k, rec.loads[k], rec.z_energetic[k], rec.z_alternating[k],
            rec.z_alternating_continuous[k]
        );
    }
    out
}

/// Energetic-versus-separately-global comparison on the configured toy.
pub fn cmd_compare(cfg_path: &Path) -> Result<i32> {
    let cfg = parse_config(cfg_path)?;
    let Some(toy) = &cfg.toy else {
        return Err(RisError::Config {
            location: "[toy]".into(),
            message: "the compare command needs a [toy] section".into(),
        });
    };
    let rec = compare::compare_solution_concepts(toy)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    std::fs::write(cfg.output_dir.join("compare.txt"), compare_report(&rec))?;
    println!(
        "onsets: energetic {:?}, alternating {:?}, ordering holds: {}",
        rec.onset_energetic,
        rec.onset_alternating,
        rec.ordering_holds(toy.steps)
    );
    Ok(EXIT_OK)
}

/// Stand-alone Lipschitz truncation of a scalar field file.
pub fn cmd_truncate(field_path: &Path, lambda: f64, out_path: Option<&Path>) -> Result<i32> {
    if !(lambda > 0.0) {
        return Err(RisError::invalid("lambda", "must be positive"));
    }
    let field = field_io::read_field(field_path)?.into_scalar()?;
    let result = rothe::lipschitz_truncate(&field, lambda)?;
    let default_out = field_path.with_extension("trunc.risfield");
    let out = out_path.unwrap_or(&default_out);
    field_io::write_scalar(out, &result.truncated)?;
    println!(
        "truncated at lambda = {lambda}: {} of {} nodes changed, edge Lipschitz {:.6e}",
        result.mismatch_nodes.len(),
        field.values().len(),
        result.edge_lipschitz()
    );
    Ok(EXIT_OK)
}
