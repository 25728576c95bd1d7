//! Two-qubit states: Schmidt-form pure states, density matrices, the
//! Pauli correlation matrix and the magic basis.

use num_complex::Complex64;

use crate::linalg::{hermitian_eig, inner, kron, matvec, outer, vec_norm, Mat2, Mat4, Vec4};
use crate::{Error, Result};

/// Density-matrix invariants are enforced to this tolerance: Hermiticity,
/// unit trace, and eigenvalues ≥ -DM_TOL.
pub const DM_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// σ_x.
pub fn sigma_x() -> Mat2 {
    Mat2::new([[r(0.0), r(1.0)], [r(1.0), r(0.0)]])
}

/// σ_y.
pub fn sigma_y() -> Mat2 {
    Mat2::new([[r(0.0), c(0.0, -1.0)], [c(0.0, 1.0), r(0.0)]])
}

/// σ_z.
pub fn sigma_z() -> Mat2 {
    Mat2::new([[r(1.0), r(0.0)], [r(0.0), r(-1.0)]])
}

/// The three Pauli matrices in (x, y, z) order.
pub fn paulis() -> [Mat2; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// A pure two-qubit state α|00⟩ + β|11⟩ with α ≥ β > 0, parameterized
/// by α² ∈ [1/2, 1). α² = 1/2 is |Φ⁺⟩ exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchmidtState {
    alpha2: f64,
}

/// Constructs a Schmidt state from its canonical parameter α².
pub fn schmidt_state(alpha2: f64) -> Result<SchmidtState> {
    if !(0.5..1.0).contains(&alpha2) {
        return Err(Error::OutOfRange {
            name: "alpha2",
            value: alpha2,
            range: "[1/2, 1)",
        });
    }
    Ok(SchmidtState { alpha2 })
}

/// |Φ⁺⟩ = (|00⟩ + |11⟩)/√2 as a Schmidt state.
pub fn phi_plus() -> SchmidtState {
    SchmidtState { alpha2: 0.5 }
}

impl SchmidtState {
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha2.sqrt()
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.alpha2).sqrt()
    }

    /// Amplitudes in the computational basis.
    pub fn ket(&self) -> Vec4 {
        [r(self.alpha()), r(0.0), r(0.0), r(self.beta())]
    }

    /// Pure-state concurrence C = 2αβ.
    pub fn concurrence(&self) -> f64 {
        2.0 * self.alpha() * self.beta()
    }
}

/// A 4×4 Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: Mat4,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants (Hermitian to 1e-10,
    /// trace 1 to 1e-10, eigenvalues ≥ -1e-10, finite entries).
    pub fn new(mat: Mat4) -> Result<Self> {
        if !mat.is_finite() {
            return Err(Error::InvalidDensityMatrix {
                reason: "non-finite entries".into(),
            });
        }
        let herm = mat.hermiticity_deviation();
        if herm > DM_TOL {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("Hermiticity deviation {herm:.3e}"),
            });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > DM_TOL || tr.im.abs() > DM_TOL {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("trace = {} + {}i", tr.re, tr.im),
            });
        }
        let eig = hermitian_eig(&mat)?;
        if eig.eigenvalues[0] < -DM_TOL {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("negative eigenvalue {:.3e}", eig.eigenvalues[0]),
            });
        }
        Ok(Self { mat })
    }

    /// Rank-1 projector |v⟩⟨v| of a (normalized) pure state.
    pub fn pure(v: &Vec4) -> Result<Self> {
        let n = vec_norm(v);
        if n < 1e-12 {
            return Err(Error::InvalidDensityMatrix {
                reason: "zero state vector".into(),
            });
        }
        let mut u = *v;
        for z in u.iter_mut() {
            *z /= n;
        }
        Self::new(outer(&u))
    }

    pub fn mat(&self) -> &Mat4 {
        &self.mat
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        (self.mat * self.mat).trace().re
    }
}

/// Projector ρ(χ) = |χ⟩⟨χ| of a Schmidt state.
pub fn density_of(chi: &SchmidtState) -> DensityMatrix {
    DensityMatrix::pure(&chi.ket()).expect("Schmidt kets are unit vectors")
}

/// The real 3×3 matrix t_ij = Tr[ρ σ_i⊗σ_j].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationMatrix {
    t: [[f64; 3]; 3],
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.t[i][j]
    }

    pub fn diagonal(&self) -> [f64; 3] {
        [self.t[0][0], self.t[1][1], self.t[2][2]]
    }

    /// Sum of the absolute off-diagonal entries.
    pub fn off_diagonal_mass(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    s += self.t[i][j].abs();
                }
            }
        }
        s
    }

    pub fn det(&self) -> f64 {
        let t = &self.t;
        t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1])
            - t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0])
            + t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0])
    }
}

/// Computes the correlation matrix of a density matrix. Imaginary parts
/// of the traces below 1e-10 are discarded; larger ones are an error.
pub fn correlation_matrix(rho: &DensityMatrix) -> Result<CorrelationMatrix> {
    let sigmas = paulis();
    let mut t = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let tr = (*rho.mat() * kron(&sigmas[i], &sigmas[j])).trace();
            if tr.im.abs() > 1e-10 {
                return Err(Error::NonRealCorrelation {
                    i: i + 1,
                    j: j + 1,
                    imag: tr.im,
                });
            }
            debug_assert!(tr.re.abs() <= 1.0 + 1e-10);
            t[i][j] = tr.re;
        }
    }
    Ok(CorrelationMatrix { t })
}

/// The magic basis {|Φ⁺⟩, i|Φ⁻⟩, i|Ψ⁺⟩, |Ψ⁻⟩}: maximally entangled
/// states are exactly the real unit combinations of these vectors (up to
/// a global phase).
pub fn magic_basis() -> [Vec4; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        [r(s), r(0.0), r(0.0), r(s)],
        [c(0.0, s), r(0.0), r(0.0), c(0.0, -s)],
        [r(0.0), c(0.0, s), c(0.0, s), r(0.0)],
        [r(0.0), r(s), r(-s), r(0.0)],
    ]
}

/// Reduced state of qubit A of a pure two-qubit state.
pub fn reduced_density_a(v: &Vec4) -> Mat2 {
    let mut out = Mat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = c(0.0, 0.0);
            for k in 0..2 {
                acc += v[2 * i + k] * v[2 * j + k].conj();
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Reduced state of qubit B of a pure two-qubit state.
pub fn reduced_density_b(v: &Vec4) -> Mat2 {
    let mut out = Mat2::zeros();
    for k in 0..2 {
        for l in 0..2 {
            let mut acc = c(0.0, 0.0);
            for i in 0..2 {
                acc += v[2 * i + k] * v[2 * i + l].conj();
            }
            out[(k, l)] = acc;
        }
    }
    out
}

/// Whether both reduced states of a pure state are within `tol` of I/2
/// in max-entry norm.
pub fn is_maximally_entangled(v: &Vec4, tol: f64) -> bool {
    let half = Mat2::identity().scale(0.5);
    reduced_density_a(v).max_abs_diff(&half) <= tol
        && reduced_density_b(v).max_abs_diff(&half) <= tol
}

/// ⟨v|ρ|v⟩ for a pure state v (overlap with the projector onto v).
pub fn overlap(rho: &DensityMatrix, v: &Vec4) -> f64 {
    inner(v, &matvec(rho.mat(), v)).re
}
