// temporary probe: dissipation drift under tau-halving on the uniform bar
use ris_core::constitutive::{LoadSchedule, Model, ModelParams};
use ris_core::grid::{Face, Grid, ScalarField, Side, VectorField};
use ris_core::optim::SolverOptions;
use ris_core::rothe::{run, TimeGrid};

fn main() {
    let g = Grid::new(1, &[1.0], &[8]).unwrap();
    let mut params = ModelParams::defaults(1);
    params.toughness = 0.06;
    let y0 = VectorField::identity_map(&g);
    let y1 = VectorField::from_fn(&g, |x, _| 1.08 * x[0]);
    let zero = VectorField::zeros(&g);
    let faces = vec![Face { axis: 0, side: Side::Min }, Face { axis: 0, side: Side::Max }];
    let sched = LoadSchedule::new(vec![0.0, 1.0], vec![zero.clone(), zero.clone()], vec![zero.clone(), zero], vec![y0, y1], None, faces).unwrap();
    let model = Model::new(&g, &params, &sched).unwrap();
    let z0 = ScalarField::constant(&g, 1.0);
    let mut prev: Option<f64> = None;
    for n in [10usize, 20, 40, 80] {
        let tg = TimeGrid::new(1.0, n).unwrap();
        let traj = run(&model, &z0, &VectorField::identity_map(&g), tg, 1.0, &SolverOptions::default_y(), &SolverOptions::default_z()).unwrap();
        assert!(traj.completed());
        let total: f64 = traj.records.iter().map(|r| r.diss_increment).sum();
        let drift = prev.map(|p: f64| ((total - p) / p * 100.0)).unwrap_or(0.0);
        println!("N={n:3} total_diss={total:.8} drift={drift:+.3}%");
        prev = Some(total);
    }
}
