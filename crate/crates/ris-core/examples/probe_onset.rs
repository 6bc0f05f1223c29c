// temporary probe for the onset discrepancy
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
    let tg = TimeGrid::new(1.0, 20).unwrap();
    let traj = run(&model, &z0, &VectorField::identity_map(&g), tg, 1.0, &SolverOptions::default_y(), &SolverOptions::default_z()).unwrap();
    for (k, (y, z)) in traj.states.iter().enumerate() {
        let minz = z.values().iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let mut maxwt = f64::NEG_INFINITY;
        for i in 0..g.node_count() {
            let f = g.vector_gradient(y, &g.quadrature_points()[i]).unwrap();
            let wt = params.stored_density_nonsimple(&f, &ris_core::tensor::Tensor3::zeros(1)).unwrap() - model.calibration();
            maxwt = maxwt.max(wt);
        }
        let stretch_ideal = 1.0 + 0.08 * tg.node_time(k);
        let fid = ris_core::tensor::MatD::diag(1, &[stretch_ideal]);
        let wt_ideal = params.stored_density_nonsimple(&fid, &ris_core::tensor::Tensor3::zeros(1)).unwrap() - model.calibration();
        println!("k={k:2} minz={minz:.8} maxWt={maxwt:.6} 2Wt={:.6} idealWt={wt_ideal:.6} Gro={:.4} yend={:.6}", 2.0*maxwt, params.toughness*params.rho0, y.values()[7]);
    }
}
