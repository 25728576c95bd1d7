//! Fixed-size complex matrix algebra for 2×2 and 4×4 matrices.
//!
//! Everything here is dense, stack-sized and value-semantic; the only
//! nontrivial routine is [`hermitian_eig`], a cyclic complex Jacobi
//! eigensolver chosen for bit-reproducible behavior on 4×4 inputs.

use std::cmp::Ordering;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Hermiticity precondition for the eigensolver: max |m - m†| must not
/// exceed this.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below
/// this.
const JACOBI_OFF_TOL: f64 = 1e-14;

const JACOBI_MAX_SWEEPS: usize = 64;

/// Two eigenvalues closer than this are treated as degenerate and their
/// eigenvectors ordered lexicographically for determinism.
const EIGEN_TIE_TOL: f64 = 1e-12;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A complex 4-vector (two-qubit state amplitudes in the computational
/// basis |00⟩, |01⟩, |10⟩, |11⟩).
pub type Vec4 = [Complex64; 4];

/// Dense 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    e: [[Complex64; 2]; 2],
}

/// Dense 4×4 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4 {
    e: [[Complex64; 4]; 4],
}

/// Which tensor factor an operation acts on: qubit A is the first
/// factor, qubit B the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

impl Mat2 {
    pub const fn new(entries: [[Complex64; 2]; 2]) -> Self {
        Self { e: entries }
    }

    pub const fn zeros() -> Self {
        Self::new([[C_ZERO; 2]; 2])
    }

    pub const fn identity() -> Self {
        Self::new([[C_ONE, C_ZERO], [C_ZERO, C_ONE]])
    }

    /// Builds a real diagonal matrix.
    pub fn diag(d0: f64, d1: f64) -> Self {
        let mut m = Self::zeros();
        m[(0, 0)] = Complex64::new(d0, 0.0);
        m[(1, 1)] = Complex64::new(d1, 0.0);
        m
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        self[(0, 0)] + self[(1, 1)]
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] *= s;
            }
        }
        out
    }

    /// Largest entrywise absolute difference from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self[(i, j)] - other[(i, j)]).norm());
            }
        }
        d
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.e[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat2 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.e[i][j]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] += rhs[(i, j)];
            }
        }
        out
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = C_ZERO;
                for k in 0..2 {
                    acc += self[(i, k)] * rhs[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

impl Mat4 {
    pub const fn new(entries: [[Complex64; 4]; 4]) -> Self {
        Self { e: entries }
    }

    pub const fn zeros() -> Self {
        Self::new([[C_ZERO; 4]; 4])
    }

    pub const fn identity() -> Self {
        let mut e = [[C_ZERO; 4]; 4];
        e[0][0] = C_ONE;
        e[1][1] = C_ONE;
        e[2][2] = C_ONE;
        e[3][3] = C_ONE;
        Self::new(e)
    }

    /// Builds a real diagonal matrix.
    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m[(i, i)] = Complex64::new(d[i], 0.0);
        }
        m
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        self[(0, 0)] + self[(1, 1)] + self[(2, 2)] + self[(3, 3)]
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out[(i, j)] *= s;
            }
        }
        out
    }

    /// Largest entrywise absolute value.
    pub fn max_abs(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max(self[(i, j)].norm());
            }
        }
        d
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out[(i, j)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Largest entrywise absolute difference from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self[(i, j)] - other[(i, j)]).norm());
            }
        }
        d
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += self[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Largest deviation from Hermiticity, max |m[(i,j)] - conj(m[(j,i)])|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for Mat4 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.e[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.e[i][j]
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, rhs: Mat4) -> Mat4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out[(i, j)] += rhs[(i, j)];
            }
        }
        out
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, rhs: Mat4) -> Mat4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out[(i, j)] -= rhs[(i, j)];
            }
        }
        out
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = C_ZERO;
                for k in 0..4 {
                    acc += self[(i, k)] * rhs[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

/// Tensor (Kronecker) product: block (i, j) of the result is a[(i,j)]·b.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Transposes the chosen tensor factor's indices; involutive and
/// trace-preserving.
pub fn partial_transpose(m: &Mat4, subsystem: Subsystem) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let src = match subsystem {
                        // transpose first-factor indices (i, j)
                        Subsystem::A => (2 * j + k, 2 * i + l),
                        // transpose second-factor indices (k, l)
                        Subsystem::B => (2 * i + l, 2 * j + k),
                    };
                    out[(2 * i + k, 2 * j + l)] = m[src];
                }
            }
        }
    }
    out
}

/// ⟨a|b⟩, conjugate-linear in the first argument.
pub fn inner(a: &Vec4, b: &Vec4) -> Complex64 {
    let mut acc = C_ZERO;
    for k in 0..4 {
        acc += a[k].conj() * b[k];
    }
    acc
}

/// Euclidean norm of a 4-vector.
pub fn vec_norm(v: &Vec4) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Rank-1 projector |v⟩⟨v|.
pub fn outer(v: &Vec4) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] = v[i] * v[j].conj();
        }
    }
    out
}

/// Matrix-vector product m·v.
pub fn matvec(m: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = [C_ZERO; 4];
    for i in 0..4 {
        let mut acc = C_ZERO;
        for k in 0..4 {
            acc += m[(i, k)] * v[k];
        }
        out[i] = acc;
    }
    out
}

/// ⟨v|m|v⟩ as a real number; only meaningful for Hermitian `m`.
pub fn expval(m: &Mat4, v: &Vec4) -> f64 {
    inner(v, &matvec(m, v)).re
}

/// Eigendecomposition of a Hermitian 4×4 matrix.
///
/// Eigenvalues are sorted ascending; `eigenvectors[i]` is the
/// orthonormal eigenvector paired with `eigenvalues[i]`, phase-fixed so
/// that its first component of magnitude > 1e-12 is real and positive.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: [f64; 4],
    pub eigenvectors: [Vec4; 4],
}

impl EigenDecomposition {
    /// Σ λ_i |v_i⟩⟨v_i|; used to check reconstruction accuracy.
    pub fn reconstruct(&self) -> Mat4 {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            out = out + outer(&self.eigenvectors[i]).scale(self.eigenvalues[i]);
        }
        out
    }
}

/// Diagonalizes a Hermitian 4×4 matrix by cyclic complex Jacobi
/// rotations.
///
/// Each rotation annihilates one off-diagonal element with a unitary
/// plane rotation; sweeps repeat until the off-diagonal Frobenius norm
/// falls below 1e-14. Output is deterministic for identical input bits:
/// the sweep order is fixed and degenerate eigenvalues are ordered by a
/// lexicographic comparison of their phase-normalized eigenvectors.
pub fn hermitian_eig(m: &Mat4) -> Result<EigenDecomposition> {
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITICITY_TOL {
        return Err(Error::NotHermitian { deviation });
    }

    // Symmetrize away sub-tolerance asymmetry so the iteration sees an
    // exactly Hermitian matrix.
    let mut a = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            a[(i, j)] = (m[(i, j)] + m[(j, i)].conj()).scale(0.5);
        }
    }
    let mut v = Mat4::identity();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_frobenius(&a) < JACOBI_OFF_TOL {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, Vec4)> = (0..4)
        .map(|i| {
            let col = [v[(0, i)], v[(1, i)], v[(2, i)], v[(3, i)]];
            (a[(i, i)].re, phase_normalize(col))
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));

    // Reorder degenerate runs lexicographically for determinism.
    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4 && (pairs[end].0 - pairs[end - 1].0).abs() < EIGEN_TIE_TOL {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|x, y| lex_cmp(&x.1, &y.1));
        }
        start = end;
    }

    let mut eigenvalues = [0.0; 4];
    let mut eigenvectors = [[C_ZERO; 4]; 4];
    for (i, (lambda, vec)) in pairs.into_iter().enumerate() {
        eigenvalues[i] = lambda;
        eigenvectors[i] = vec;
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_frobenius(a: &Mat4) -> f64 {
    let mut s = 0.0;
    for p in 0..4 {
        for q in 0..4 {
            if p != q {
                s += a[(p, q)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation zeroing a[(p,q)]: A ← G†AG, V ← VG with
/// G the identity outside the (p,q) plane and
/// G[p][p] = G[q][q] = c, G[p][q] = -s·φ, G[q][p] = s·φ̄,
/// where φ = a_pq/|a_pq|.
fn jacobi_rotate(a: &mut Mat4, v: &mut Mat4, p: usize, q: usize) {
    let apq = a[(p, q)];
    let abs = apq.norm();
    if abs < 1e-300 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / abs;

    let tau = (app - aqq) / (2.0 * abs);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let gpq = -phase.scale(s);
    let gqp = phase.conj().scale(s);

    // A ← A·G (columns p, q)
    for r in 0..4 {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp.scale(c) + arq * gqp;
        a[(r, q)] = arp * gpq + arq.scale(c);
    }
    // A ← G†·A (rows p, q); G†[p][q] = conj(gqp), G†[q][p] = conj(gpq)
    for col in 0..4 {
        let apc = a[(p, col)];
        let aqc = a[(q, col)];
        a[(p, col)] = apc.scale(c) + gqp.conj() * aqc;
        a[(q, col)] = gpq.conj() * apc + aqc.scale(c);
    }
    // V ← V·G
    for r in 0..4 {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp.scale(c) + vrq * gqp;
        v[(r, q)] = vrp * gpq + vrq.scale(c);
    }
}

/// Multiplies by a global phase so the first component of magnitude
/// > 1e-12 becomes real and positive.
fn phase_normalize(mut v: Vec4) -> Vec4 {
    for k in 0..4 {
        let norm = v[k].norm();
        if norm > 1e-12 {
            let factor = v[k].conj() / norm;
            for z in v.iter_mut() {
                *z *= factor;
            }
            break;
        }
    }
    v
}

fn lex_cmp(a: &Vec4, b: &Vec4) -> Ordering {
    for k in 0..4 {
        match a[k].re.partial_cmp(&b[k].re) {
            Some(Ordering::Equal) | None => {}
            Some(ord) => return ord,
        }
        match a[k].im.partial_cmp(&b[k].im) {
            Some(Ordering::Equal) | None => {}
            Some(ord) => return ord,
        }
    }
    Ordering::Equal
}
