//! Structured-grid discretization of a box domain in 1, 2 or 3 dimensions.
//!
//! Nodal fields, second-order finite-difference gradients and Hessians
//! (central stencils in the interior, one-sided at the boundary), and
//! trapezoid-type nodal quadrature.  Quadrature points are co-located with
//! the grid nodes, so fields and integrands share node indices.

use crate::error::{Result, RisError};
use crate::tensor::{pairwise_sum, MatD, Tensor3};

pub const MAX_DIM: usize = 3;

/// Structured rectangular grid.
///
/// `spacing[i] = extents[i] / (nodes_per_axis[i] - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    extents: [f64; MAX_DIM],
    nodes_per_axis: [usize; MAX_DIM],
    spacing: [f64; MAX_DIM],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Min,
    Max,
}

/// One face of the box domain, e.g. `{axis: 0, side: Min}` is the face
/// where the first coordinate is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub axis: usize,
    pub side: Side,
}

/// Quadrature point co-located with a grid node.
#[derive(Debug, Clone, Copy)]
pub struct QuadraturePoint {
    pub location: [f64; MAX_DIM],
    pub weight: f64,
    pub cell_index: usize,
}

/// A finite-difference stencil along one axis: up to four (index, coefficient)
/// pairs, where the index runs along that axis.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub len: usize,
    pub idx: [usize; 4],
    pub coeff: [f64; 4],
}

impl Stencil {
    fn new(entries: &[(usize, f64)]) -> Self {
        let mut s = Stencil {
            len: entries.len(),
            idx: [0; 4],
            coeff: [0.0; 4],
        };
        for (k, (i, c)) in entries.iter().enumerate() {
            s.idx[k] = *i;
            s.coeff[k] = *c;
        }
        s
    }
}

impl Grid {
    pub fn new(dim: usize, extents: &[f64], nodes_per_axis: &[usize]) -> Result<Grid> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(RisError::invalid("grid.dim", "dimension must be 1, 2 or 3"));
        }
        if extents.len() != dim || nodes_per_axis.len() != dim {
            return Err(RisError::invalid(
                "grid",
                "extents and nodes must have one entry per dimension",
            ));
        }
        let mut e = [1.0; MAX_DIM];
        let mut n = [1usize; MAX_DIM];
        let mut h = [1.0; MAX_DIM];
        for a in 0..dim {
            if !(extents[a] > 0.0 && extents[a].is_finite()) {
                return Err(RisError::invalid("grid.extents", "extents must be positive"));
            }
            if nodes_per_axis[a] < 3 {
                return Err(RisError::invalid(
                    "grid.nodes",
                    "at least 3 nodes per axis are required",
                ));
            }
            e[a] = extents[a];
            n[a] = nodes_per_axis[a];
            h[a] = extents[a] / (nodes_per_axis[a] - 1) as f64;
        }
        Ok(Grid {
            dim,
            extents: e,
            nodes_per_axis: n,
            spacing: h,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents[..self.dim]
    }

    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.nodes_per_axis[..self.dim]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dim]
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_axis[..self.dim].iter().product()
    }

    /// Domain measure (length/area/volume of the box).
    pub fn measure(&self) -> f64 {
        self.extents[..self.dim].iter().product()
    }

    /// Flat node index from a multi-index (last axis fastest).
    pub fn flat(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        for a in 0..self.dim {
            idx = idx * self.nodes_per_axis[a] + multi[a];
        }
        idx
    }

    /// Multi-index of a flat node index.
    pub fn multi(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut m = [0usize; MAX_DIM];
        for a in (0..self.dim).rev() {
            m[a] = flat % self.nodes_per_axis[a];
            flat /= self.nodes_per_axis[a];
        }
        m
    }

    pub fn node_position(&self, flat: usize) -> [f64; MAX_DIM] {
        let m = self.multi(flat);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = m[a] as f64 * self.spacing[a];
        }
        x
    }

    fn weight_1d(&self, axis: usize, i: usize) -> f64 {
        let h = self.spacing[axis];
        if i == 0 || i == self.nodes_per_axis[axis] - 1 {
            0.5 * h
        } else {
            h
        }
    }

    /// Quadrature weight of the node (tensor-product trapezoid rule).
    pub fn node_weight(&self, flat: usize) -> f64 {
        let m = self.multi(flat);
        let mut w = 1.0;
        for a in 0..self.dim {
            w *= self.weight_1d(a, m[a]);
        }
        w
    }

    pub fn quadrature_points(&self) -> Vec<QuadraturePoint> {
        (0..self.node_count())
            .map(|i| QuadraturePoint {
                location: self.node_position(i),
                weight: self.node_weight(i),
                cell_index: i,
            })
            .collect()
    }

    /// First-derivative stencil along `axis` at position `i` on that axis.
    /// Central in the interior, one-sided second order at the boundary;
    /// exact for quadratics.
    pub fn d1_stencil(&self, axis: usize, i: usize) -> Stencil {
        let n = self.nodes_per_axis[axis];
        let h = self.spacing[axis];
        if i == 0 {
            Stencil::new(&[(0, -1.5 / h), (1, 2.0 / h), (2, -0.5 / h)])
        } else if i == n - 1 {
            Stencil::new(&[(n - 3, 0.5 / h), (n - 2, -2.0 / h), (n - 1, 1.5 / h)])
        } else {
            Stencil::new(&[(i - 1, -0.5 / h), (i + 1, 0.5 / h)])
        }
    }

    /// Pure second-derivative stencil along `axis`; exact for quadratics.
    pub fn d2_stencil(&self, axis: usize, i: usize) -> Stencil {
        let n = self.nodes_per_axis[axis];
        let h2 = self.spacing[axis] * self.spacing[axis];
        if i > 0 && i < n - 1 {
            return Stencil::new(&[(i - 1, 1.0 / h2), (i, -2.0 / h2), (i + 1, 1.0 / h2)]);
        }
        if n == 3 {
            // With three nodes the second difference is constant along the
            // axis; reuse the interior stencil at the edges.
            return Stencil::new(&[(0, 1.0 / h2), (1, -2.0 / h2), (2, 1.0 / h2)]);
        }
        if i == 0 {
            Stencil::new(&[(0, 2.0 / h2), (1, -5.0 / h2), (2, 4.0 / h2), (3, -1.0 / h2)])
        } else {
            Stencil::new(&[
                (n - 4, -1.0 / h2),
                (n - 3, 4.0 / h2),
                (n - 2, -5.0 / h2),
                (n - 1, 2.0 / h2),
            ])
        }
    }

    fn check_field_grid(&self, grid: &Grid) -> Result<()> {
        if grid != self {
            return Err(RisError::GridMismatch);
        }
        Ok(())
    }

    fn check_qp(&self, qp: &QuadraturePoint) -> Result<()> {
        if qp.cell_index >= self.node_count() {
            return Err(RisError::GridMismatch);
        }
        Ok(())
    }

    /// Apply a stencil along one axis to a per-node function.
    #[inline]
    fn apply_axis(
        &self,
        stencil: &Stencil,
        axis: usize,
        multi: &[usize; MAX_DIM],
        f: &mut impl FnMut(usize, f64),
    ) {
        let mut m = *multi;
        for k in 0..stencil.len {
            m[axis] = stencil.idx[k];
            f(self.flat(&m[..self.dim]), stencil.coeff[k]);
        }
    }

    /// Gradient of a scalar field at a quadrature point.
    pub fn scalar_gradient(&self, f: &ScalarField, qp: &QuadraturePoint) -> Result<[f64; MAX_DIM]> {
        self.check_field_grid(&f.grid)?;
        self.check_qp(qp)?;
        Ok(self.scalar_gradient_at(f.values(), qp.cell_index))
    }

    pub(crate) fn scalar_gradient_at(&self, values: &[f64], node: usize) -> [f64; MAX_DIM] {
        let m = self.multi(node);
        let mut g = [0.0; MAX_DIM];
        for a in 0..self.dim {
            let st = self.d1_stencil(a, m[a]);
            let mut s = 0.0;
            self.apply_axis(&st, a, &m, &mut |j, c| s += c * values[j]);
            g[a] = s;
        }
        g
    }

    /// Deformation gradient of a vector field at a quadrature point:
    /// `F[c][a] = d y_c / d x_a`.
    pub fn vector_gradient(&self, y: &VectorField, qp: &QuadraturePoint) -> Result<MatD> {
        self.check_field_grid(&y.grid)?;
        self.check_qp(qp)?;
        Ok(self.vector_gradient_at(y.values(), qp.cell_index))
    }

    pub(crate) fn vector_gradient_at(&self, values: &[f64], node: usize) -> MatD {
        let d = self.dim;
        let m = self.multi(node);
        let mut f = MatD::zeros(d);
        for a in 0..d {
            let st = self.d1_stencil(a, m[a]);
            let mut acc = [0.0; MAX_DIM];
            self.apply_axis(&st, a, &m, &mut |j, c| {
                for comp in 0..d {
                    acc[comp] += c * values[j * d + comp];
                }
            });
            for comp in 0..d {
                f.set(comp, a, acc[comp]);
            }
        }
        f
    }

    /// Second gradient of a vector field at a quadrature point:
    /// `G[c][a][b] = d^2 y_c / d x_a d x_b`, symmetric in (a, b).
    pub fn vector_hessian(&self, y: &VectorField, qp: &QuadraturePoint) -> Result<Tensor3> {
        self.check_field_grid(&y.grid)?;
        self.check_qp(qp)?;
        Ok(self.vector_hessian_at(y.values(), qp.cell_index))
    }

    pub(crate) fn vector_hessian_at(&self, values: &[f64], node: usize) -> Tensor3 {
        let d = self.dim;
        let m = self.multi(node);
        let mut g = Tensor3::zeros(d);
        for a in 0..d {
            // Pure second derivative.
            let st = self.d2_stencil(a, m[a]);
            let mut acc = [0.0; MAX_DIM];
            self.apply_axis(&st, a, &m, &mut |j, c| {
                for comp in 0..d {
                    acc[comp] += c * values[j * d + comp];
                }
            });
            for comp in 0..d {
                g.set(comp, a, a, acc[comp]);
            }
            // Mixed derivatives: composition of first-derivative stencils,
            // stored symmetrically.
            for b in (a + 1)..d {
                let sa = self.d1_stencil(a, m[a]);
                let sb = self.d1_stencil(b, m[b]);
                let mut acc = [0.0; MAX_DIM];
                let mut mm = m;
                for ka in 0..sa.len {
                    mm[a] = sa.idx[ka];
                    for kb in 0..sb.len {
                        mm[b] = sb.idx[kb];
                        let j = self.flat(&mm[..self.dim]);
                        let c = sa.coeff[ka] * sb.coeff[kb];
                        for comp in 0..d {
                            acc[comp] += c * values[j * d + comp];
                        }
                    }
                }
                for comp in 0..d {
                    g.set(comp, a, b, acc[comp]);
                    g.set(comp, b, a, acc[comp]);
                }
            }
        }
        g
    }

    /// Integrate a per-quadrature-point density over the domain.
    /// Weighted sum with a fixed-order pairwise reduction, so the result is
    /// bit-reproducible regardless of how the density array was produced.
    pub fn integrate(&self, density_at_qp: &[f64]) -> Result<f64> {
        let n = self.node_count();
        if density_at_qp.len() != n {
            return Err(RisError::DensityCountMismatch {
                got: density_at_qp.len(),
                expected: n,
            });
        }
        let weighted: Vec<f64> = (0..n).map(|i| density_at_qp[i] * self.node_weight(i)).collect();
        Ok(pairwise_sum(&weighted))
    }

    pub fn all_faces(&self) -> Vec<Face> {
        let mut v = Vec::new();
        for axis in 0..self.dim {
            v.push(Face { axis, side: Side::Min });
            v.push(Face { axis, side: Side::Max });
        }
        v
    }

    pub fn node_on_face(&self, flat: usize, face: Face) -> bool {
        let m = self.multi(flat);
        match face.side {
            Side::Min => m[face.axis] == 0,
            Side::Max => m[face.axis] == self.nodes_per_axis[face.axis] - 1,
        }
    }

    pub fn face_nodes(&self, face: Face) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&i| self.node_on_face(i, face))
            .collect()
    }

    /// Surface quadrature weight of a node on a face: the (d-1)-dimensional
    /// trapezoid weight over the face grid.  For d = 1 the face is a single
    /// node with counting weight 1.
    pub fn surface_weight(&self, face: Face, flat: usize) -> f64 {
        debug_assert!(self.node_on_face(flat, face));
        let m = self.multi(flat);
        let mut w = 1.0;
        for a in 0..self.dim {
            if a != face.axis {
                w *= self.weight_1d(a, m[a]);
            }
        }
        w
    }

    /// Total surface measure of a face.
    pub fn face_measure(&self, face: Face) -> f64 {
        (0..self.dim)
            .filter(|&a| a != face.axis)
            .map(|a| self.extents[a])
            .product()
    }
}

/// Scalar nodal field (damage, densities).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<ScalarField> {
        if values.len() != grid.node_count() {
            return Err(RisError::DensityCountMismatch {
                got: values.len(),
                expected: grid.node_count(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RisError::Infeasible("non-finite scalar field value".into()));
        }
        Ok(ScalarField {
            grid: grid.clone(),
            values,
        })
    }

    pub fn constant(grid: &Grid, v: f64) -> ScalarField {
        ScalarField {
            grid: grid.clone(),
            values: vec![v; grid.node_count()],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> ScalarField {
        let values = (0..grid.node_count())
            .map(|i| {
                let x = grid.node_position(i);
                f(&x[..grid.dim()])
            })
            .collect();
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Vector nodal field (deformations, loads); layout `values[node * d + comp]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    values: Vec<f64>,
}

impl VectorField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<VectorField> {
        if values.len() != grid.node_count() * grid.dim() {
            return Err(RisError::DensityCountMismatch {
                got: values.len(),
                expected: grid.node_count() * grid.dim(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RisError::Infeasible("non-finite vector field value".into()));
        }
        Ok(VectorField {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &Grid) -> VectorField {
        VectorField {
            grid: grid.clone(),
            values: vec![0.0; grid.node_count() * grid.dim()],
        }
    }

    /// The identity deformation y(x) = x.
    pub fn identity_map(grid: &Grid) -> VectorField {
        Self::from_fn(grid, |x, c| x[c])
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64], usize) -> f64) -> VectorField {
        let d = grid.dim();
        let mut values = vec![0.0; grid.node_count() * d];
        for i in 0..grid.node_count() {
            let x = grid.node_position(i);
            for c in 0..d {
                values[i * d + c] = f(&x[..d], c);
            }
        }
        VectorField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let d = self.grid.dim();
        &self.values[i * d..(i + 1) * d]
    }
}
