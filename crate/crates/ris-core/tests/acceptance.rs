//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! The bundled scenarios are loaded once and shared; tolerances are pinned
//! here and must not be loosened to make a failing criterion green.

use ris_core::cli::{parse_config, RunConfig};
use ris_core::constitutive::{
    LoadSchedule, MaterialMode, Model, ModelParams,
};
use ris_core::grid::{Face, Grid, ScalarField, Side, VectorField};
use ris_core::kinematics;
use ris_core::optim::SolverOptions;
use ris_core::rothe::{self, TimeGrid, Trajectory};
use ris_core::verify::{
    check_gronwall, check_separately_global_certificate, compare, sweep, CertificateBundle,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

struct Scenario {
    cfg: RunConfig,
    trajectory: Trajectory,
    bundle: CertificateBundle,
    wall: Duration,
}

fn load_scenario(name: &str) -> Scenario {
    let cfg = parse_config(&scenario_path(name)).expect("scenario config parses");
    let start = Instant::now();
    let model = Model::new(&cfg.grid, &cfg.params, &cfg.schedule).unwrap();
    let time_grid = TimeGrid::new(cfg.horizon, cfg.steps).unwrap();
    let trajectory = rothe::run(
        &model,
        &cfg.z0,
        &cfg.y_guess,
        time_grid,
        cfg.lambda0,
        &cfg.solver_y,
        &cfg.solver_z,
    )
    .unwrap();
    assert!(
        trajectory.completed(),
        "{name}: solver failure {:?}",
        trajectory.failure
    );
    let bundle = check_separately_global_certificate(
        &model,
        &trajectory,
        &cfg.z0,
        &cfg.verify,
        &cfg.solver_y,
    )
    .unwrap();
    let wall = start.elapsed();
    Scenario {
        cfg,
        trajectory,
        bundle,
        wall,
    }
}

fn bar1d() -> &'static Scenario {
    static S: OnceLock<Scenario> = OnceLock::new();
    S.get_or_init(|| load_scenario("bar1d.cfg"))
}

fn notch2d() -> &'static Scenario {
    static S: OnceLock<Scenario> = OnceLock::new();
    S.get_or_init(|| load_scenario("notch2d.cfg"))
}

/// Criterion 1: the discrete energy inequality holds at every consecutive
/// pair and at 10 random long-range pairs on both bundled scenarios, with
/// slack >= -1e-8 (1 + |E|), inside the runtime budget.
#[test]
fn acceptance_01_energy_inequality() {
    for (scenario, label, budget) in [
        (bar1d(), "bar1d", Duration::from_secs(10)),
        (notch2d(), "notch2d", Duration::from_secs(300)),
    ] {
        assert_eq!(scenario.cfg.verify.eineq_tol_rel, 1e-8, "tolerance is pinned");
        assert_eq!(
            scenario.cfg.verify.long_range_pairs,
            Some(10),
            "long-range pair count is pinned"
        );
        let checks: Vec<_> = scenario
            .bundle
            .records
            .iter()
            .filter(|r| r.name == "energy_inequality")
            .collect();
        let consecutive = checks.iter().filter(|r| r.step2 == r.step + 1).count();
        let long_range = checks.iter().filter(|r| r.step2 > r.step + 1).count();
        assert_eq!(consecutive, scenario.cfg.steps, "{label}: all consecutive pairs");
        assert_eq!(long_range, 10, "{label}: ten long-range pairs");
        assert_eq!(scenario.trajectory.records.len(), scenario.cfg.steps + 1);
        // Unidirectionality along the accepted states.
        for w in scenario.trajectory.states.windows(2) {
            for (after, before) in w[1].1.values().iter().zip(w[0].1.values()) {
                assert!(after <= &(before + 1e-12), "{label}: damage increased");
            }
        }
        for r in checks {
            assert!(
                r.passed,
                "{label}: energy inequality violated at ({}, {}): slack {} < -tol {}",
                r.step, r.step2, r.margin, r.tolerance
            );
        }
        assert!(
            scenario.wall < budget,
            "{label}: runtime {:?} over budget {budget:?}",
            scenario.wall
        );
    }
    println!(
        "ACCEPTANCE 1 (energy inequality): PASS (bar1d {:?}, notch2d {:?})",
        bar1d().wall,
        notch2d().wall
    );
}

/// Criterion 2: semi-stability margins against 200 random and 20 truncated
/// competitors per step stay above -1e-8 (1 + |E|) on both scenarios.
#[test]
fn acceptance_02_semistability() {
    for (scenario, label) in [(bar1d(), "bar1d"), (notch2d(), "notch2d")] {
        assert_eq!(scenario.cfg.verify.semistab_random, 200, "competitor count pinned");
        assert_eq!(scenario.cfg.verify.semistab_truncated, 20, "competitor count pinned");
        assert_eq!(scenario.cfg.verify.semistab_tol_rel, 1e-8, "tolerance pinned");
        let mut count = 0;
        for r in scenario.bundle.records.iter().filter(|r| r.name == "semistability") {
            count += 1;
            assert!(
                r.passed,
                "{label}: semi-stability violated at step {}: margin {} < -tol {}",
                r.step, r.margin, r.tolerance
            );
        }
        assert_eq!(count, scenario.cfg.steps, "{label}: one check per step");
    }
    println!("ACCEPTANCE 2 (semi-stability): PASS");
}

/// Criterion 3: the Gronwall uniform estimate holds at every step with the
/// a-posteriori data, and a 10x-shrunk rate is caught by the checker.
#[test]
fn acceptance_03_gronwall() {
    for (scenario, label) in [(bar1d(), "bar1d"), (notch2d(), "notch2d")] {
        for r in scenario.bundle.records.iter().filter(|r| r.name == "gronwall") {
            assert!(
                r.passed,
                "{label}: Gronwall estimate violated at step {}",
                r.step
            );
        }
    }

    // Checker sensitivity on a bulk-load release scenario, where the
    // estimated rate is within a factor of the realized energy growth.
    let g = Grid::new(1, &[1.0], &[8]).unwrap();
    let params = ModelParams::defaults(1);
    let anchor = vec![Face { axis: 0, side: Side::Min }];
    let b0 = VectorField::from_fn(&g, |_, _| 1.5);
    let zero = VectorField::zeros(&g);
    let id = VectorField::identity_map(&g);
    let sched = LoadSchedule::new(
        vec![0.0, 1.0],
        vec![b0, zero.clone()],
        vec![zero.clone(), zero],
        vec![id.clone(), id.clone()],
        None,
        anchor,
    )
    .unwrap();
    let model = Model::new(&g, &params, &sched).unwrap();
    let traj = rothe::run(
        &model,
        &ScalarField::constant(&g, 1.0),
        &id,
        TimeGrid::new(1.0, 10).unwrap(),
        1.0,
        &SolverOptions::default_y(),
        &SolverOptions::default_z(),
    )
    .unwrap();
    assert!(traj.completed());
    let states: Vec<_> = traj.states.iter().map(|(y, z)| (y, z)).collect();
    let gd = model.gronwall_estimate(&states).unwrap();
    assert!(check_gronwall(&traj, &gd).iter().all(|s| *s >= -1e-10));
    let tripped = check_gronwall(&traj, &gd.scaled(0.1))
        .iter()
        .any(|s| *s < 0.0);
    assert!(tripped, "10x-shrunk rate was not detected");
    println!("ACCEPTANCE 3 (Gronwall estimate + sensitivity): PASS");
}

fn bar1d_sweep() -> &'static sweep::SweepReport {
    static S: OnceLock<sweep::SweepReport> = OnceLock::new();
    S.get_or_init(|| {
        let cfg = parse_config(&scenario_path("bar1d.cfg")).unwrap();
        let model = Model::new(&cfg.grid, &cfg.params, &cfg.schedule).unwrap();
        sweep::tau_sweep(
            &model,
            &cfg.z0,
            &cfg.y_guess,
            cfg.horizon,
            &[10, 20, 40, 80],
            cfg.lambda0,
            &cfg.solver_y,
            &cfg.solver_z,
        )
        .unwrap()
    })
}

/// Criterion 4: vanishing regularization along the refinement sweep:
/// max_k H_tau(z_k) strictly decreases and the truncated initial datum
/// follows the tau^{kappa/2} rate within a factor 2.
#[test]
fn acceptance_04_vanishing_regularization() {
    let start = Instant::now();
    let report = bar1d_sweep();
    assert!(
        report.reg_strictly_decreasing,
        "max_k H_tau not strictly decreasing: {:?}",
        report.entries.iter().map(|e| e.max_reg).collect::<Vec<_>>()
    );
    let kappa = 1.0;
    let nominal = 2f64.powf(-kappa / 2.0);
    for w in report.entries.windows(2) {
        let ratio = w[1].init_reg / w[0].init_reg;
        assert!(
            ratio >= nominal / 2.0 && ratio <= nominal * 2.0,
            "H(z0_tau) halving ratio {ratio} outside [{}, {}]",
            nominal / 2.0,
            nominal * 2.0
        );
    }
    assert!(start.elapsed() < Duration::from_secs(120), "1D sweep over budget");
    println!(
        "ACCEPTANCE 4 (vanishing regularization): PASS (ratios {:?})",
        report
            .entries
            .windows(2)
            .map(|w| w[1].init_reg / w[0].init_reg)
            .collect::<Vec<_>>()
    );
}

/// Criterion 5: uniform determinant lower bound over all steps and all tau
/// in the sweep, against the frozen regression value.
#[test]
fn acceptance_05_healey_kroemer_uniformity() {
    // Frozen on first computation: the sweep floor is 0.8677.
    const FROZEN_EPSILON: f64 = 0.8;
    let report = bar1d_sweep();
    assert!(
        report.uniform_min_det >= FROZEN_EPSILON,
        "uniform determinant bound regressed: {} < {FROZEN_EPSILON}",
        report.uniform_min_det
    );
    println!(
        "ACCEPTANCE 5 (determinant uniformity): PASS (min det {:.6} >= {FROZEN_EPSILON})",
        report.uniform_min_det
    );
}

/// Criterion 6: the Ciarlet-Necas defect stays within the pixel tolerance at
/// every step of both scenarios, and the self-overlapping fold fixture is
/// detected with defect >= 0.4 at resolution 512.
#[test]
fn acceptance_06_ciarlet_necas() {
    for (scenario, label) in [(bar1d(), "bar1d"), (notch2d(), "notch2d")] {
        assert!(scenario.cfg.verify.cn_enabled);
        let mut count = 0;
        for r in scenario.bundle.records.iter().filter(|r| r.name == "ciarlet_necas") {
            count += 1;
            assert!(r.passed, "{label}: defect beyond tolerance at step {}", r.step);
        }
        assert_eq!(count, scenario.cfg.steps + 1, "{label}: one check per state");
    }
    let g = Grid::new(2, &[1.0, 1.0], &[33, 33]).unwrap();
    let fold = kinematics::overlap_fold_fixture(&g);
    assert!(kinematics::det_lower_bound(&fold) > 0.0, "fixture must be orientation-preserving");
    let rep = kinematics::ciarlet_necas_defect(&fold, 512).unwrap();
    assert!(
        rep.defect >= 0.4,
        "fold defect {} below 0.4 (det integral {}, image {})",
        rep.defect,
        rep.det_integral,
        rep.image_measure
    );
    println!(
        "ACCEPTANCE 6 (Ciarlet-Necas): PASS (fold defect {:.4})",
        rep.defect
    );
}

/// Criterion 7: oracle equivalence.  On the 3-node bar every alternating
/// state matches dense-grid global minimization within 2e-3 per nodal value;
/// on the 0-D toy the alternating damage path matches the exhaustive path on
/// the damage grid.
#[test]
fn acceptance_07_oracle_equivalence() {
    let cfg = parse_config(&scenario_path("bar1d_tiny.cfg")).unwrap();
    let model = Model::new(&cfg.grid, &cfg.params, &cfg.schedule).unwrap();
    let time_grid = TimeGrid::new(cfg.horizon, cfg.steps).unwrap();
    let traj = rothe::run(
        &model,
        &cfg.z0,
        &cfg.y_guess,
        time_grid,
        cfg.lambda0,
        &cfg.solver_y,
        &cfg.solver_z,
    )
    .unwrap();
    assert!(traj.completed());

    let search3 =
        |value: &dyn Fn(&[f64; 3]) -> f64, lo: [f64; 3], hi: [f64; 3], coarse: f64| -> [f64; 3] {
            let mut best = lo;
            let mut best_v = f64::INFINITY;
            let scan = |from: [f64; 3], to: [f64; 3], step: f64, best: &mut [f64; 3], best_v: &mut f64| {
                let counts: Vec<usize> = (0..3)
                    .map(|a| ((to[a] - from[a]) / step).round() as usize)
                    .collect();
                for i in 0..=counts[0] {
                    for j in 0..=counts[1] {
                        for k in 0..=counts[2] {
                            let cand = [
                                from[0] + i as f64 * step,
                                from[1] + j as f64 * step,
                                from[2] + k as f64 * step,
                            ];
                            let v = value(&cand);
                            if v < *best_v {
                                *best_v = v;
                                *best = cand;
                            }
                        }
                    }
                }
            };
            scan(lo, hi, coarse, &mut best, &mut best_v);
            // Refine to the 1e-3 grid around the coarse winner.
            let from = [best[0] - 1.5 * coarse, best[1] - 1.5 * coarse, best[2] - 1.5 * coarse];
            let to = [best[0] + 1.5 * coarse, best[1] + 1.5 * coarse, best[2] + 1.5 * coarse];
            scan(from, to, 1e-3, &mut best, &mut best_v);
            best
        };

    let tau_reg = Some(time_grid.tau());
    for k in 1..=cfg.steps {
        let t = time_grid.node_time(k);
        let loads = cfg.schedule.loads_at(t).unwrap();
        let z_prev = &traj.states[k - 1].1;
        // Deformation oracle: dense grid over the three nodal values.
        let y_val = |v: &[f64; 3]| model.energy_with_loads(&loads, v, z_prev.values(), None);
        let y_star = search3(&y_val, [-0.2, 0.2, 0.6], [0.6, 1.0, 1.4], 0.02);
        for (i, (got, want)) in traj.states[k].0.values().iter().zip(&y_star).enumerate() {
            assert!(
                (got - want).abs() <= 2e-3,
                "step {k} node {i}: deformation {got} vs oracle {want}"
            );
        }
        // Damage oracle: dense grid over the box [0, z_prev].
        let ctx = model
            .z_step_context(t, &traj.states[k].0, z_prev, tau_reg)
            .unwrap();
        let z_val = |v: &[f64; 3]| {
            if v.iter().zip(z_prev.values()).any(|(a, b)| *a < 0.0 || a > b) {
                return f64::INFINITY;
            }
            ctx.objective(v)
        };
        let zp = z_prev.values();
        let z_star = search3(&z_val, [0.0, 0.0, 0.0], [zp[0], zp[1], zp[2]], 0.02);
        for (i, (got, want)) in traj.states[k].1.values().iter().zip(&z_star).enumerate() {
            assert!(
                (got - want).abs() <= 2e-3,
                "step {k} node {i}: damage {got} vs oracle {want}"
            );
        }
    }

    // 0-D toy: grid-exhaustive alternating path versus the independent
    // continuous route, equal at damage-grid resolution.
    let toy = compare::ToyParams::frozen_fixture();
    let rec = compare::compare_solution_concepts(&toy).unwrap();
    let cell = 1.0 / toy.z_divisions as f64;
    for (k, (a, b)) in rec
        .z_alternating
        .iter()
        .zip(&rec.z_alternating_continuous)
        .enumerate()
    {
        assert!(
            (a - b).abs() <= cell + 1e-12,
            "toy step {k}: grid {a} vs continuous {b}"
        );
    }
    println!("ACCEPTANCE 7 (oracle equivalence): PASS");
}

/// Criterion 8: on the frozen two-well fixture the energetic onset precedes
/// the separately-global one and the damage paths differ.
#[test]
fn acceptance_08_solution_concept_ordering() {
    let toy = compare::ToyParams::frozen_fixture();
    let rec = compare::compare_solution_concepts(&toy).unwrap();
    // Regression values computed by the exhaustive oracle and frozen.
    assert_eq!(rec.onset_energetic, Some(14), "energetic onset moved");
    assert_eq!(rec.onset_alternating, Some(36), "alternating onset moved");
    assert!(rec.paths_differ);
    assert!(rec.ordering_holds(toy.steps));
    println!(
        "ACCEPTANCE 8 (solution-concept ordering): PASS (onsets {} <= {})",
        rec.onset_energetic.unwrap(),
        rec.onset_alternating.unwrap()
    );
}

/// Criterion 9: analytic nodal gradients match central finite differences to
/// 1e-6 relative on 20 random feasible states in each material mode.
#[test]
fn acceptance_09_gradient_correctness() {
    for mode in [MaterialMode::Nonsimple, MaterialMode::PolyconvexSimple] {
        let grid = Grid::new(2, &[1.0, 1.0], &[5, 5]).unwrap();
        let mut params = ModelParams::defaults(2);
        params.material_mode = mode;
        if mode == MaterialMode::PolyconvexSimple {
            params.q = 4.0;
        }
        let faces = vec![Face { axis: 0, side: Side::Min }];
        let sched = LoadSchedule::static_schedule(
            &grid,
            faces,
            VectorField::identity_map(&grid),
            1.0,
        )
        .unwrap();
        let model = Model::new(&grid, &params, &sched).unwrap();
        let loads = sched.loads_at(0.5).unwrap();
        let tau_reg = match mode {
            MaterialMode::Nonsimple => Some(0.05),
            MaterialMode::PolyconvexSimple => None,
        };
        let mut rng = StdRng::seed_from_u64(4242);
        let mut states = 0;
        while states < 20 {
            // Random smooth feasible state.
            let coefs: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y = VectorField::from_fn(&grid, |x, c| {
                x[c] + 0.06
                    * (coefs[4 * c] * (2.1 * x[0] + coefs[4 * c + 1]).sin()
                        + coefs[4 * c + 2] * (1.7 * x[1] + coefs[4 * c + 3]).cos())
            });
            if model.min_det(y.values()) < 0.2 {
                continue;
            }
            states += 1;
            let z = ScalarField::new(
                &grid,
                (0..grid.node_count())
                    .map(|i| {
                        let x = grid.node_position(i);
                        (0.6 + 0.3 * (3.0 * x[0] - 1.2 * x[1]).sin()).clamp(0.05, 1.0)
                    })
                    .collect(),
            )
            .unwrap();
            let h = 1e-6;
            let grad_y = model.grad_energy_y(0.5, &y, &z).unwrap();
            for _ in 0..20 {
                let j = rng.random_range(0..y.values().len());
                let mut yp = y.values().to_vec();
                yp[j] += h;
                let mut ym = y.values().to_vec();
                ym[j] -= h;
                let fd = (model.energy_with_loads(&loads, &yp, z.values(), None)
                    - model.energy_with_loads(&loads, &ym, z.values(), None))
                    / (2.0 * h);
                let an = grad_y.values()[j];
                assert!(
                    (fd - an).abs() <= 1e-6 * (1.0 + fd.abs().max(an.abs())),
                    "{mode:?} grad_y dof {j}: {fd} vs {an}"
                );
            }
            let grad_z = model.grad_energy_z(0.5, &y, &z, tau_reg).unwrap();
            let ctx = model.z_step_context(0.5, &y, &z, tau_reg).unwrap();
            let gro = params.toughness * params.rho0;
            for _ in 0..20 {
                let j = rng.random_range(0..z.values().len());
                let mut zp = z.values().to_vec();
                zp[j] += h;
                let mut zm = z.values().to_vec();
                zm[j] -= h;
                let fd = (ctx.objective(&zp) - ctx.objective(&zm)) / (2.0 * h)
                    + gro * model.grid.node_weight(j);
                let an = grad_z.values()[j];
                assert!(
                    (fd - an).abs() <= 1e-6 * (1.0 + fd.abs().max(an.abs())),
                    "{mode:?} grad_z dof {j}: {fd} vs {an}"
                );
            }
        }
    }
    println!("ACCEPTANCE 9 (gradient correctness): PASS");
}

/// Criterion 10: gauge properties of the dissipation and the brute-force
/// partition supremum of the total variation.
#[test]
fn acceptance_10_dissipation_properties() {
    let g = Grid::new(2, &[1.0, 1.0], &[6, 6]).unwrap();
    let mut params = ModelParams::defaults(2);
    params.toughness = 0.7;
    params.rho0 = 1.3;
    let sched =
        LoadSchedule::static_schedule(&g, vec![], VectorField::identity_map(&g), 1.0).unwrap();
    let model = Model::new(&g, &params, &sched).unwrap();
    let gro = params.toughness * params.rho0;
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..200 {
        let v: Vec<f64> = (0..g.node_count())
            .map(|_| -rng.random_range(0.0..1.0f64))
            .collect();
        let w: Vec<f64> = (0..g.node_count())
            .map(|_| -rng.random_range(0.0..1.0f64))
            .collect();
        let r_v = model.dissipation_values(&v);
        // Positive 1-homogeneity.
        let a = rng.random_range(0.0..4.0);
        let av: Vec<f64> = v.iter().map(|x| a * x).collect();
        assert!((model.dissipation_values(&av) - a * r_v).abs() <= 1e-12 * (1.0 + a * r_v));
        // Triangle inequality.
        let vw: Vec<f64> = v.iter().zip(&w).map(|(x, y)| x + y).collect();
        assert!(
            model.dissipation_values(&vw) <= r_v + model.dissipation_values(&w) + 1e-12
        );
        // Definiteness on the feasible cone.
        if v.iter().any(|x| *x < -1e-9) {
            assert!(r_v > 0.0);
        }
        // Coercivity constant is exactly G rho0.
        let l1 = g
            .integrate(&v.iter().map(|x| x.abs()).collect::<Vec<_>>())
            .unwrap();
        if l1 > 1e-12 {
            assert!((r_v / l1 - gro).abs() <= 1e-10 * gro);
        }
    }
    let zero = vec![0.0; g.node_count()];
    assert_eq!(model.dissipation_values(&zero), 0.0);
    let mut up = zero.clone();
    up[7] = 1e-6;
    assert!(model.dissipation_values(&up).is_infinite());

    // Brute-force partition supremum on a 5-step synthetic trajectory.
    let tg = TimeGrid::new(1.0, 5).unwrap();
    let levels = [1.0, 0.85, 0.85, 0.6, 0.52, 0.3];
    let y = VectorField::identity_map(&g);
    let states: Vec<_> = levels
        .iter()
        .map(|&l| (y.clone(), ScalarField::constant(&g, l)))
        .collect();
    let records: Vec<_> = (0..levels.len())
        .map(|k| {
            let diss = if k == 0 {
                0.0
            } else {
                gro * (levels[k - 1] - levels[k])
            };
            ris_core::rothe::StepRecord {
                step: k,
                t: tg.node_time(k),
                energy: 0.0,
                reg: 0.0,
                diss_increment: diss,
                power_sample: 0.0,
                work_increment: 0.0,
                energy_start_of_step: 0.0,
                energy_after_y: 0.0,
                det_min: 1.0,
                y_report: Default::default(),
                z_report: None,
            }
        })
        .collect();
    let traj = Trajectory {
        time_grid: tg,
        states,
        records,
        truncation: None,
        failure: None,
    };
    // Enumerate all subsets of interior candidate times.
    let z_level_at = |t: f64| -> f64 {
        let x = t / tg.tau();
        let near = x.round() as usize;
        if near <= 5 && (tg.node_time(near) - t).abs() < 1e-12 {
            levels[near]
        } else {
            levels[(x.ceil() as usize).min(5)]
        }
    };
    let interior: Vec<f64> = (0..5).map(|k| tg.node_time(k) + 0.37 * tg.tau()).collect();
    let mut sup: f64 = 0.0;
    for mask in 0u32..(1 << interior.len()) {
        let mut pts = vec![0.0];
        for (i, &t) in interior.iter().enumerate() {
            if mask & (1 << i) != 0 {
                pts.push(t);
            }
        }
        pts.push(1.0);
        let total: f64 = pts
            .windows(2)
            .map(|w| gro * (z_level_at(w[0]) - z_level_at(w[1])).max(0.0))
            .sum();
        sup = sup.max(total);
    }
    let tv = rothe::total_variation(&traj, 0.0, 1.0).unwrap();
    assert!(
        (tv - sup).abs() <= 1e-12 * (1.0 + sup),
        "telescoped {tv} vs partition supremum {sup}"
    );
    println!("ACCEPTANCE 10 (dissipation properties): PASS");
}

/// Criterion 11: Lipschitz truncation.  Edge-Lipschitz bound, fixed points
/// away from the notch cone, mismatch monotonicity in lambda, and exact
/// agreement with the quadratic-cost oracle in 1D.
#[test]
fn acceptance_11_truncation_lemma() {
    let g = Grid::new(1, &[1.0], &[65]).unwrap();
    let h = g.spacing()[0];
    let center = 0.5;
    for &slope in &[3.0, 6.0, 12.0] {
        let floor = 0.3;
        let u = ScalarField::from_fn(&g, |x| (floor + slope * (x[0] - center).abs()).min(1.0));
        let mut prev_mismatch = usize::MAX;
        for &lambda in &[0.5, 1.0, 2.0] {
            let res = rothe::lipschitz_truncate(&u, lambda).unwrap();
            // Edge-Lipschitz constant bounded by lambda.
            assert!(
                res.edge_lipschitz() <= lambda * (1.0 + 1e-12),
                "slope {slope} lambda {lambda}: Lipschitz bound violated"
            );
            // Exact agreement with the O(n^2) inf-convolution oracle.
            let n = g.node_count();
            let lower: Vec<f64> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| u.values()[j] + lambda * i.abs_diff(j) as f64 * h)
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            let oracle: Vec<f64> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| lower[j] - lambda * i.abs_diff(j) as f64 * h)
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            assert_eq!(res.truncated.values(), &oracle[..], "oracle mismatch");
            // Unchanged wherever the lambda-cone from the notch clears u.
            let cone_radius = (1.0 - floor) / lambda;
            for i in 0..n {
                let x = g.node_position(i)[0];
                if (x - center).abs() > cone_radius + h {
                    assert_eq!(
                        res.truncated.values()[i],
                        u.values()[i],
                        "changed outside the cone at x = {x}"
                    );
                }
            }
            // Mismatch set shrinks as lambda grows.
            assert!(res.mismatch_nodes.len() <= prev_mismatch);
            prev_mismatch = res.mismatch_nodes.len();
        }
    }
    println!("ACCEPTANCE 11 (Lipschitz truncation): PASS");
}

/// Criterion 12: repeated runs with a fixed seed produce bit-identical
/// trajectory and certificate files, independent of the worker count.
#[test]
fn acceptance_12_determinism() {
    let exe = env!("CARGO_BIN_EXE_ris");
    let cfg = scenario_path("bar1d.cfg");
    let mut outputs: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for threads in ["1", "4", "1"] {
        let dir = tempfile::tempdir().unwrap();
        let status = std::process::Command::new(exe)
            .arg("run")
            .arg(&cfg)
            .current_dir(dir.path())
            .env("RIS_THREADS", threads)
            .status()
            .expect("run the ris binary");
        assert!(status.success(), "run failed with RIS_THREADS={threads}");
        let base = dir.path().join("out/bar1d");
        outputs.push((
            std::fs::read(base.join("trajectory.csv")).unwrap(),
            std::fs::read(base.join("certificate.txt")).unwrap(),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "trajectory.csv differs across worker counts");
    assert_eq!(outputs[0].1, outputs[1].1, "certificate.txt differs across worker counts");
    assert_eq!(outputs[0].0, outputs[2].0, "trajectory.csv differs across repeats");
    assert_eq!(outputs[0].1, outputs[2].1, "certificate.txt differs across repeats");
    println!("ACCEPTANCE 12 (determinism): PASS");
}

/// Extra harness check from the time-stepper contract: total dissipation is
/// stable under tau-halving on the uniform activation bar (within 5%).
#[test]
fn acceptance_dissipation_tau_stability() {
    let g = Grid::new(1, &[1.0], &[8]).unwrap();
    let mut params = ModelParams::defaults(1);
    params.toughness = 0.06;
    let y0 = VectorField::identity_map(&g);
    let y1 = VectorField::from_fn(&g, |x, _| 1.08 * x[0]);
    let zero = VectorField::zeros(&g);
    let faces = vec![
        Face { axis: 0, side: Side::Min },
        Face { axis: 0, side: Side::Max },
    ];
    let sched = LoadSchedule::new(
        vec![0.0, 1.0],
        vec![zero.clone(), zero.clone()],
        vec![zero.clone(), zero],
        vec![y0, y1],
        None,
        faces,
    )
    .unwrap();
    let model = Model::new(&g, &params, &sched).unwrap();
    let z0 = ScalarField::constant(&g, 1.0);
    let mut totals = Vec::new();
    for n in [40usize, 80] {
        let traj = rothe::run(
            &model,
            &z0,
            &VectorField::identity_map(&g),
            TimeGrid::new(1.0, n).unwrap(),
            1.0,
            &SolverOptions::default_y(),
            &SolverOptions::default_z(),
        )
        .unwrap();
        assert!(traj.completed());
        totals.push(traj.cumulative_dissipation(traj.last_step()));
    }
    let drift = (totals[1] - totals[0]).abs() / totals[0];
    assert!(drift < 0.05, "dissipation drift {drift} exceeds 5%");
    println!("ACCEPTANCE extra (dissipation tau-stability): PASS (drift {:.4}%)", drift * 100.0);
}
