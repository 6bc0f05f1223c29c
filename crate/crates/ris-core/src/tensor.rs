//! Small dense tensors for dimensions 1..=3.
//!
//! Deformation gradients, cofactors and second-gradient blocks never exceed
//! 3x3(x3), so everything is stack-allocated with the runtime dimension
//! carried alongside a fixed backing array.

use crate::error::{Result, RisError};

/// Square d x d matrix, d in {1,2,3}, row-major in a fixed 3x3 backing store.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatD {
    pub d: usize,
    a: [f64; 9],
}

impl MatD {
    pub fn zeros(d: usize) -> Self {
        debug_assert!((1..=3).contains(&d));
        MatD { d, a: [0.0; 9] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = MatD::zeros(d);
        for i in 0..d {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = MatD::zeros(d);
        for r in 0..d {
            for c in 0..d {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn diag(d: usize, entries: &[f64]) -> Self {
        let mut m = MatD::zeros(d);
        for i in 0..d {
            m.set(i, i, entries[i]);
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.a[r * 3 + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * 3 + c] = v;
    }

    #[inline]
    pub fn add_to(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * 3 + c] += v;
    }

    pub fn det(&self) -> f64 {
        match self.d {
            1 => self.get(0, 0),
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            3 => {
                self.get(0, 0) * (self.get(1, 1) * self.get(2, 2) - self.get(1, 2) * self.get(2, 1))
                    - self.get(0, 1)
                        * (self.get(1, 0) * self.get(2, 2) - self.get(1, 2) * self.get(2, 0))
                    + self.get(0, 2)
                        * (self.get(1, 0) * self.get(2, 1) - self.get(1, 1) * self.get(2, 0))
            }
            _ => unreachable!(),
        }
    }

    /// Cofactor matrix (transposed adjugate): F (cof F)^T = (det F) I.
    ///
    /// Convention for d = 1: cof F = 1.
    pub fn cofactor(&self) -> MatD {
        let mut c = MatD::zeros(self.d);
        match self.d {
            1 => c.set(0, 0, 1.0),
            2 => {
                c.set(0, 0, self.get(1, 1));
                c.set(0, 1, -self.get(1, 0));
                c.set(1, 0, -self.get(0, 1));
                c.set(1, 1, self.get(0, 0));
            }
            3 => {
                for r in 0..3 {
                    for s in 0..3 {
                        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
                        let (s1, s2) = ((s + 1) % 3, (s + 2) % 3);
                        c.set(
                            r,
                            s,
                            self.get(r1, s1) * self.get(r2, s2)
                                - self.get(r1, s2) * self.get(r2, s1),
                        );
                    }
                }
            }
            _ => unreachable!(),
        }
        c
    }

    /// Squared Frobenius norm.
    pub fn frob_sq(&self) -> f64 {
        let mut s = 0.0;
        for r in 0..self.d {
            for c in 0..self.d {
                s += self.get(r, c) * self.get(r, c);
            }
        }
        s
    }

    pub fn frob(&self) -> f64 {
        self.frob_sq().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|i| self.get(i, i)).sum()
    }

    /// Matrix-vector product, `out = self * v`.
    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        for r in 0..self.d {
            let mut s = 0.0;
            for c in 0..self.d {
                s += self.get(r, c) * v[c];
            }
            out[r] = s;
        }
    }

    /// Transposed matrix-vector product, `out = self^T * v`.
    pub fn matvec_t(&self, v: &[f64], out: &mut [f64]) {
        for c in 0..self.d {
            let mut s = 0.0;
            for r in 0..self.d {
                s += self.get(r, c) * v[r];
            }
            out[c] = s;
        }
    }

    pub fn matmul(&self, other: &MatD) -> MatD {
        let mut m = MatD::zeros(self.d);
        for r in 0..self.d {
            for c in 0..self.d {
                let mut s = 0.0;
                for k in 0..self.d {
                    s += self.get(r, k) * other.get(k, c);
                }
                m.set(r, c, s);
            }
        }
        m
    }

    pub fn transpose(&self) -> MatD {
        MatD::from_fn(self.d, |r, c| self.get(c, r))
    }

    pub fn scale(&self, s: f64) -> MatD {
        let mut m = *self;
        for v in m.a.iter_mut() {
            *v *= s;
        }
        m
    }

    pub fn add(&self, other: &MatD) -> MatD {
        let mut m = *self;
        for (v, w) in m.a.iter_mut().zip(other.a.iter()) {
            *v += w;
        }
        m
    }

    pub fn sub(&self, other: &MatD) -> MatD {
        let mut m = *self;
        for (v, w) in m.a.iter_mut().zip(other.a.iter()) {
            *v -= w;
        }
        m
    }

    pub fn dot(&self, other: &MatD) -> f64 {
        let mut s = 0.0;
        for r in 0..self.d {
            for c in 0..self.d {
                s += self.get(r, c) * other.get(r, c);
            }
        }
        s
    }

    /// Inverse-transpose applied to a vector via Cramer's rule,
    /// `F^{-T} v = (cof F / det F) v`; never forms a generic inverse.
    pub fn inv_transpose_vec(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        let det = self.det();
        if det <= 0.0 {
            return Err(RisError::NonOrientationPreserving { det });
        }
        self.cofactor().matvec(v, out);
        for o in out.iter_mut().take(self.d) {
            *o /= det;
        }
        Ok(())
    }

    /// Adjoint of the map H -> dcof(F)[H] applied to A, i.e. the matrix M
    /// with M : H = A : dcof(F)[H] for all H.  Needed for derivatives of
    /// |cof F|^q and of cofactor-vector couplings.
    pub fn dcof_adjoint(&self, a: &MatD) -> MatD {
        match self.d {
            // cof is constant in 1D.
            1 => MatD::zeros(1),
            // cof is linear and self-adjoint in 2D: adjoint = cof(A).
            2 => a.cofactor(),
            3 => {
                // (cof F)_{ij} = 1/2 e_{ipq} e_{jrs} F_{pr} F_{qs};
                // d(cof F)[H]_{ij} = e_{ipq} e_{jrs} F_{pr} H_{qs}.
                let mut m = MatD::zeros(3);
                for i in 0..3 {
                    for p in 0..3 {
                        for q in 0..3 {
                            let eipq = levi_civita(i, p, q);
                            if eipq == 0.0 {
                                continue;
                            }
                            for j in 0..3 {
                                let aij = a.get(i, j);
                                if aij == 0.0 {
                                    continue;
                                }
                                for r in 0..3 {
                                    for s in 0..3 {
                                        let ejrs = levi_civita(j, r, s);
                                        if ejrs == 0.0 {
                                            continue;
                                        }
                                        m.add_to(q, s, eipq * ejrs * aij * self.get(p, r));
                                    }
                                }
                            }
                        }
                    }
                }
                m
            }
            _ => unreachable!(),
        }
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Third-order array G[c][a][b] holding second derivatives of a vector field
/// (component c, derivative axes a, b).  Symmetric in (a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor3 {
    pub d: usize,
    a: [f64; 27],
}

impl Tensor3 {
    pub fn zeros(d: usize) -> Self {
        debug_assert!((1..=3).contains(&d));
        Tensor3 { d, a: [0.0; 27] }
    }

    #[inline]
    pub fn get(&self, c: usize, i: usize, j: usize) -> f64 {
        self.a[c * 9 + i * 3 + j]
    }

    #[inline]
    pub fn set(&mut self, c: usize, i: usize, j: usize, v: f64) {
        self.a[c * 9 + i * 3 + j] = v;
    }

    pub fn frob_sq(&self) -> f64 {
        let mut s = 0.0;
        for c in 0..self.d {
            for i in 0..self.d {
                for j in 0..self.d {
                    s += self.get(c, i, j) * self.get(c, i, j);
                }
            }
        }
        s
    }

    pub fn scale(&self, s: f64) -> Tensor3 {
        let mut t = *self;
        for v in t.a.iter_mut() {
            *v *= s;
        }
        t
    }
}

/// Fixed-order pairwise summation.  Deterministic for a given slice content,
/// independent of any parallelism used to fill the slice.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        let mut s = 0.0;
        for x in v {
            s += x;
        }
        s
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}
