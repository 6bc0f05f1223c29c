//! Pointwise and global kinematic quantities: determinant, cofactor, Cramer
//! inverse-transpose, Eulerian damage gradient, Ciarlet-Necas injectivity
//! defect, determinant lower bound and distortion norm.

use crate::error::{Result, RisError};
use crate::grid::{Grid, VectorField, MAX_DIM};
use crate::tensor::MatD;

/// Deformation-gradient state at a point, valid only for det F > 0.
#[derive(Debug, Clone, Copy)]
pub struct KinematicState {
    pub f: MatD,
    pub det_f: f64,
    pub cof_f: MatD,
    pub f_inv_t: MatD,
}

impl KinematicState {
    pub fn new(f: MatD) -> Result<KinematicState> {
        let det_f = f.det();
        if det_f <= 0.0 {
            return Err(RisError::NonOrientationPreserving { det: det_f });
        }
        let cof_f = f.cofactor();
        let f_inv_t = cof_f.scale(1.0 / det_f);
        Ok(KinematicState {
            f,
            det_f,
            cof_f,
            f_inv_t,
        })
    }
}

/// Cofactor matrix; satisfies `F (cof F)^T = det F * I` (d=1: cof F = 1).
pub fn cofactor(f: &MatD) -> MatD {
    f.cofactor()
}

/// Eulerian damage gradient `F^{-T} gz`, computed via Cramer's rule
/// (cofactor over determinant), never via a generic inversion.
pub fn eulerian_gradient(f: &MatD, gz: &[f64]) -> Result<[f64; MAX_DIM]> {
    let mut out = [0.0; MAX_DIM];
    f.inv_transpose_vec(gz, &mut out)?;
    Ok(out)
}

/// Minimum of det(grad y) over all quadrature points (boundary included).
/// May return a nonpositive value; positivity is the caller's certificate.
pub fn det_lower_bound(y: &VectorField) -> f64 {
    let grid = y.grid();
    let mut min = f64::INFINITY;
    for i in 0..grid.node_count() {
        let det = grid.vector_gradient_at(y.values(), i).det();
        if det < min {
            min = det;
        }
    }
    min
}

/// `L^delta` norm of |grad y|^d / det(grad y) over the domain.
/// Finiteness together with the Ciarlet-Necas condition certifies
/// everywhere-injectivity (for delta > 2 in the continuous theory).
pub fn distortion_norm(y: &VectorField, delta: f64) -> Result<f64> {
    if delta <= 2.0 {
        return Err(RisError::invalid("delta", "distortion exponent must be > 2"));
    }
    let grid = y.grid();
    let d = grid.dim() as f64;
    let mut densities = Vec::with_capacity(grid.node_count());
    for i in 0..grid.node_count() {
        let f = grid.vector_gradient_at(y.values(), i);
        let det = f.det();
        if det <= 0.0 {
            return Err(RisError::NonOrientationPreserving { det });
        }
        let dist = f.frob().powf(d) / det;
        densities.push(dist.powf(delta));
    }
    Ok(grid.integrate(&densities)?.powf(1.0 / delta))
}

/// Result of the Ciarlet-Necas check.
///
/// `defect = integral of det(grad y) - estimated measure of y(Omega)`.
/// A defect that is nonpositive up to `tolerance` certifies almost-everywhere
/// injectivity of an orientation-preserving deformation.
#[derive(Debug, Clone, Copy)]
pub struct CnReport {
    pub defect: f64,
    pub det_integral: f64,
    pub image_measure: f64,
    /// Pixel-resolution error band: pixel measure times the number of
    /// boundary-touching pixels.
    pub tolerance: f64,
}

/// Ciarlet-Necas injectivity defect.  The image measure is estimated by
/// rasterizing the union of deformed cells (multilinear patches) on a pixel
/// grid with `resolution` pixels per unit length; covered pixels are counted
/// once.  In 1D the image is an exact union of intervals.
pub fn ciarlet_necas_defect(y: &VectorField, resolution: usize) -> Result<CnReport> {
    let grid = y.grid();
    let det_integral = {
        let dets: Vec<f64> = (0..grid.node_count())
            .map(|i| grid.vector_gradient_at(y.values(), i).det())
            .collect();
        grid.integrate(&dets)?
    };
    match grid.dim() {
        1 => cn_1d(grid, y, det_integral),
        2 => cn_2d(grid, y, resolution, det_integral),
        3 => cn_3d(grid, y, resolution, det_integral),
        _ => unreachable!(),
    }
}

fn cn_1d(grid: &Grid, y: &VectorField, _det_integral: f64) -> Result<CnReport> {
    let n = grid.nodes_per_axis()[0];
    // The exact integral of the piecewise-affine interpolant's derivative is
    // the telescoping cell sum; the nodal-quadrature value differs by the
    // boundary-stencil error and would drown the defect.
    let det_integral: f64 = (0..n - 1).map(|i| y.values()[i + 1] - y.values()[i]).sum();
    let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let a = y.values()[i];
        let b = y.values()[i + 1];
        intervals.push((a.min(b), a.max(b)));
    }
    intervals.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut length = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (lo, hi) in intervals {
        match cur {
            None => cur = Some((lo, hi)),
            Some((clo, chi)) => {
                if lo <= chi {
                    cur = Some((clo, chi.max(hi)));
                } else {
                    length += chi - clo;
                    cur = Some((lo, hi));
                }
            }
        }
    }
    if let Some((clo, chi)) = cur {
        length += chi - clo;
    }
    Ok(CnReport {
        defect: det_integral - length,
        det_integral,
        image_measure: length,
        tolerance: 1e-12 * (1.0 + length),
    })
}

/// Point-in-quadrilateral by crossing number; the quad edges are straight
/// because the bilinear image of a cell edge is affine.
fn point_in_quad(px: f64, py: f64, q: &[[f64; 2]; 4]) -> bool {
    let mut inside = false;
    let mut j = 3;
    for i in 0..4 {
        let (xi, yi) = (q[i][0], q[i][1]);
        let (xj, yj) = (q[j][0], q[j][1]);
        if (yi > py) != (yj > py) {
            let t = (py - yi) / (yj - yi);
            if px < xi + t * (xj - xi) {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn quad_signed_area(q: &[[f64; 2]; 4]) -> f64 {
    let mut s = 0.0;
    let mut j = 3;
    for i in 0..4 {
        s += q[j][0] * q[i][1] - q[i][0] * q[j][1];
        j = i;
    }
    0.5 * s
}

fn cn_2d(grid: &Grid, y: &VectorField, resolution: usize, det_integral: f64) -> Result<CnReport> {
    if resolution == 0 {
        return Err(RisError::invalid("resolution", "must be positive"));
    }
    let (n0, n1) = (grid.nodes_per_axis()[0], grid.nodes_per_axis()[1]);
    let at = |i0: usize, i1: usize| -> [f64; 2] {
        let f = grid.flat(&[i0, i1]);
        [y.values()[2 * f], y.values()[2 * f + 1]]
    };
    // Bounding box over all mapped nodes.
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..grid.node_count() {
        let v = y.node(i);
        xmin = xmin.min(v[0]);
        xmax = xmax.max(v[0]);
        ymin = ymin.min(v[1]);
        ymax = ymax.max(v[1]);
    }
    let px = 1.0 / resolution as f64;
    let nx = (((xmax - xmin) / px).ceil() as usize).max(1) + 2;
    let ny = (((ymax - ymin) / px).ceil() as usize).max(1) + 2;
    if nx.saturating_mul(ny) > 256_000_000 {
        return Err(RisError::invalid(
            "resolution",
            "pixel grid would exceed the rasterization budget",
        ));
    }
    let x0 = xmin - px;
    let y0 = ymin - px;
    let mut mask = vec![false; nx * ny];
    let mut patch_area_sum = 0.0;

    for c0 in 0..n0 - 1 {
        for c1 in 0..n1 - 1 {
            let quad = [
                at(c0, c1),
                at(c0 + 1, c1),
                at(c0 + 1, c1 + 1),
                at(c0, c1 + 1),
            ];
            let signed = quad_signed_area(&quad);
            if signed <= 0.0 {
                return Err(RisError::DegenerateCell {
                    cell: c0 * (n1 - 1) + c1,
                });
            }
            patch_area_sum += signed;
            let qxmin = quad.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let qxmax = quad.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let qymin = quad.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
            let qymax = quad.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
            let ix0 = (((qxmin - x0) / px).floor() as isize).max(0) as usize;
            let ix1 = ((((qxmax - x0) / px).ceil() as isize) as usize).min(nx - 1);
            let iy0 = (((qymin - y0) / px).floor() as isize).max(0) as usize;
            let iy1 = ((((qymax - y0) / px).ceil() as isize) as usize).min(ny - 1);
            for iy in iy0..=iy1 {
                let cy = y0 + (iy as f64 + 0.5) * px;
                for ix in ix0..=ix1 {
                    if mask[iy * nx + ix] {
                        continue;
                    }
                    let cx = x0 + (ix as f64 + 0.5) * px;
                    if point_in_quad(cx, cy, &quad) {
                        mask[iy * nx + ix] = true;
                    }
                }
            }
        }
    }

    let count = mask.iter().filter(|m| **m).count();
    let mut boundary = 0usize;
    for iy in 0..ny {
        for ix in 0..nx {
            if !mask[iy * nx + ix] {
                continue;
            }
            let edge = ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1;
            if edge
                || !mask[iy * nx + ix - 1]
                || !mask[iy * nx + ix + 1]
                || !mask[(iy - 1) * nx + ix]
                || !mask[(iy + 1) * nx + ix]
            {
                boundary += 1;
            }
        }
    }
    let image_measure = count as f64 * px * px;
    // The pixel band plus the gap between the nodal-quadrature determinant
    // integral and the exact patch areas (the two sides of the defect are
    // discretized differently).
    let tolerance = boundary as f64 * px * px + (det_integral - patch_area_sum).abs();
    Ok(CnReport {
        defect: det_integral - image_measure,
        det_integral,
        image_measure,
        tolerance,
    })
}

fn cn_3d(grid: &Grid, y: &VectorField, resolution: usize, det_integral: f64) -> Result<CnReport> {
    if resolution == 0 {
        return Err(RisError::invalid("resolution", "must be positive"));
    }
    let n = grid.nodes_per_axis();
    let d = 3usize;
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for i in 0..grid.node_count() {
        let v = y.node(i);
        for a in 0..3 {
            lo[a] = lo[a].min(v[a]);
            hi[a] = hi[a].max(v[a]);
        }
    }
    let px = 1.0 / resolution as f64;
    let mut nvox = [0usize; 3];
    for a in 0..3 {
        nvox[a] = (((hi[a] - lo[a]) / px).ceil() as usize).max(1) + 2;
    }
    let total = nvox[0] * nvox[1] * nvox[2];
    if total > 256_000_000 {
        return Err(RisError::invalid(
            "resolution",
            "voxel grid would exceed the rasterization budget",
        ));
    }
    let mut mask = vec![false; total];
    let vox_index = |p: &[f64; 3]| -> usize {
        let mut idx = 0usize;
        for a in 0..3 {
            let ia = (((p[a] - (lo[a] - px)) / px).floor() as isize).clamp(0, nvox[a] as isize - 1)
                as usize;
            idx = idx * nvox[a] + ia;
        }
        idx
    };

    for c0 in 0..n[0] - 1 {
        for c1 in 0..n[1] - 1 {
            for c2 in 0..n[2] - 1 {
                let mut corners = [[0.0f64; 3]; 8];
                let mut spread: f64 = 0.0;
                for (k, corner) in corners.iter_mut().enumerate() {
                    let m = [c0 + (k & 1), c1 + ((k >> 1) & 1), c2 + ((k >> 2) & 1)];
                    let f = grid.flat(&m);
                    for a in 0..3 {
                        corner[a] = y.values()[f * d + a];
                    }
                }
                let cell_index = (c0 * (n[1] - 1) + c1) * (n[2] - 1) + c2;
                // Cells are sampled through the trilinear map; degenerate
                // orientation is detected from the corner determinant signs.
                for a in 0..3 {
                    let mut cmin = f64::INFINITY;
                    let mut cmax = f64::NEG_INFINITY;
                    for corner in &corners {
                        cmin = cmin.min(corner[a]);
                        cmax = cmax.max(corner[a]);
                    }
                    spread = spread.max(cmax - cmin);
                }
                let det0 = grid
                    .vector_gradient_at(y.values(), grid.flat(&[c0, c1, c2]))
                    .det();
                if det0 <= 0.0 {
                    return Err(RisError::DegenerateCell { cell: cell_index });
                }
                let s = ((spread / px).ceil() as usize * 2).clamp(2, 32);
                let step = 1.0 / s as f64;
                for i in 0..=s {
                    let u = i as f64 * step;
                    for j in 0..=s {
                        let v = j as f64 * step;
                        for k in 0..=s {
                            let w = k as f64 * step;
                            let mut p = [0.0f64; 3];
                            for (ci, corner) in corners.iter().enumerate() {
                                let bu = if ci & 1 == 1 { u } else { 1.0 - u };
                                let bv = if (ci >> 1) & 1 == 1 { v } else { 1.0 - v };
                                let bw = if (ci >> 2) & 1 == 1 { w } else { 1.0 - w };
                                let b = bu * bv * bw;
                                for a in 0..3 {
                                    p[a] += b * corner[a];
                                }
                            }
                            mask[vox_index(&p)] = true;
                        }
                    }
                }
            }
        }
    }
    let count = mask.iter().filter(|m| **m).count();
    let image_measure = count as f64 * px * px * px;
    // Boundary layer estimate: voxels on the surface of the marked set.
    let boundary = (count as f64).powf(2.0 / 3.0) * 6.0;
    Ok(CnReport {
        defect: det_integral - image_measure,
        det_integral,
        image_measure,
        tolerance: boundary * px * px * px,
    })
}

/// Orientation-preserving two-to-one self-overlap of the unit square:
/// wraps the square twice around an annulus of area `half` of the covered
/// mass, so `det > 0` everywhere, the det-integral is about 1 and the image
/// measure about 0.5.  Test fixture for the defect estimator.
pub fn overlap_fold_fixture(grid: &Grid) -> VectorField {
    assert_eq!(grid.dim(), 2);
    // Annulus inner radius 0.5, thickness chosen so pi*a*(1+a) = 1/2.
    let a = 0.5 * ((1.0 + 2.0 / std::f64::consts::PI).sqrt() - 1.0);
    let omega = 4.0 * std::f64::consts::PI;
    VectorField::from_fn(grid, |x, c| {
        let r = 0.5 + a * x[1];
        let th = omega * x[0];
        if c == 0 {
            r * th.sin()
        } else {
            r * th.cos()
        }
    })
}
