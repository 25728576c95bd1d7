//! Entanglement and fidelity functionals: the fully entangled fraction
//! through three independent routes, concurrence, negativity, the
//! negativity upper bound on F*, and teleportation fidelity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{
    hermitian_eig, kron, matvec, outer, partial_transpose, Mat2, Mat4, Subsystem, Vec4,
};
use crate::states::{
    correlation_matrix, is_maximally_entangled, magic_basis, overlap, sigma_y, DensityMatrix,
};
use crate::{Error, Result};

fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Which route produced a fully-entangled-fraction value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FefMethod {
    TFormula,
    MagicEig,
    Sampled,
}

/// A fully-entangled-fraction value together with the maximally
/// entangled state achieving it, when available.
#[derive(Clone, Debug)]
pub struct FefResult {
    /// F(ρ) ∈ [1/4, 1].
    pub value: f64,
    pub method: FefMethod,
    /// The optimizing maximally entangled |Ψ⟩ with F = ⟨Ψ|ρ|Ψ⟩.
    pub optimizer_state: Option<Vec4>,
}

/// Clamps rounding excursions of at most 1e-10 back into [1/4, 1].
fn clamp_fef(value: f64) -> f64 {
    debug_assert!(value > 0.25 - 1e-10 && value < 1.0 + 1e-10);
    value.clamp(0.25, 1.0)
}

/// F = ¼(1 + Σ|t_ii|), valid only for states whose correlation matrix T
/// is diagonal (off-diagonal mass ≤ 1e-9) with det T < 0.
pub fn fef_t_formula(rho: &DensityMatrix) -> Result<f64> {
    let t = correlation_matrix(rho).map_err(|e| Error::FormulaInapplicable {
        reason: e.to_string(),
    })?;
    let mass = t.off_diagonal_mass();
    if mass > 1e-9 {
        return Err(Error::FormulaInapplicable {
            reason: format!("T not diagonal, off-diagonal mass {mass:.3e}"),
        });
    }
    let det = t.det();
    if det >= 0.0 {
        return Err(Error::FormulaInapplicable {
            reason: format!("det T = {det:.3e} is not negative"),
        });
    }
    let sum: f64 = t.diagonal().iter().map(|x| x.abs()).sum();
    Ok(clamp_fef(0.25 * (1.0 + sum)))
}

/// F as the largest eigenvalue of the real part of ρ expressed in the
/// magic basis. Total on density matrices; the authoritative route.
pub fn fef_magic(rho: &DensityMatrix) -> FefResult {
    let basis = magic_basis();
    // Re(⟨e_k|ρ|e_l⟩) is real symmetric; feed it to the Hermitian solver.
    let mut s = Mat4::zeros();
    for k in 0..4 {
        let rho_el: [Vec4; 4] = [
            matvec(rho.mat(), &basis[0]),
            matvec(rho.mat(), &basis[1]),
            matvec(rho.mat(), &basis[2]),
            matvec(rho.mat(), &basis[3]),
        ];
        for l in 0..4 {
            let m_kl = crate::linalg::inner(&basis[k], &rho_el[l]);
            s[(k, l)] = r(m_kl.re);
        }
    }
    let eig = hermitian_eig(&s).expect("Re of magic-basis form is symmetric");
    let value = clamp_fef(eig.eigenvalues[3]);

    // Map the real coefficient vector back to the computational basis.
    let coeffs = eig.eigenvectors[3];
    let mut psi = [r(0.0); 4];
    for k in 0..4 {
        for i in 0..4 {
            psi[i] += coeffs[k] * basis[k][i];
        }
    }
    FefResult {
        value,
        method: FefMethod::MagicEig,
        optimizer_state: Some(psi),
    }
}

/// SU(2) element for angles (θ, φ, ψ):
/// [[cosθ·e^{iφ}, sinθ·e^{iψ}], [-sinθ·e^{-iψ}, cosθ·e^{-iφ}]].
fn su2(theta: f64, phi: f64, psi: f64) -> Mat2 {
    let (ct, st) = (theta.cos(), theta.sin());
    Mat2::new([
        [
            Complex64::from_polar(ct, phi),
            Complex64::from_polar(st, psi),
        ],
        [
            -Complex64::from_polar(st, -psi),
            Complex64::from_polar(ct, -phi),
        ],
    ])
}

/// (U⊗I)|Φ⁺⟩: the maximally entangled state generated by U.
fn entangled_from_unitary(u: &Mat2) -> Vec4 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        u[(0, 0)].scale(s),
        u[(0, 1)].scale(s),
        u[(1, 0)].scale(s),
        u[(1, 1)].scale(s),
    ]
}

fn fef_objective(rho: &DensityMatrix, angles: [f64; 3]) -> f64 {
    let u = su2(angles[0], angles[1], angles[2]);
    overlap(rho, &entangled_from_unitary(&u))
}

/// Brute-force lower bound on F(ρ): the identity plus n-1 Haar samples
/// of U(2), keeping the best ⟨Ψ(U)|ρ|Ψ(U)⟩, followed by a
/// coordinate-wise golden-section polish (200 iterations) of the best
/// sample's three angles. Deterministic for a fixed seed.
pub fn fef_sampled(rho: &DensityMatrix, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best_angles = [0.0f64; 3]; // the identity unitary
    let mut best = fef_objective(rho, best_angles);

    for _ in 1..n {
        // Haar on SU(2) = uniform on S³.
        let g: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let u = Complex64::new(g[0] / norm, g[1] / norm);
        let v = Complex64::new(g[2] / norm, g[3] / norm);
        let angles = [v.norm().atan2(u.norm()), u.arg(), v.arg()];
        let value = fef_objective(rho, angles);
        if value > best {
            best = value;
            best_angles = angles;
        }
    }

    // Golden-section polish: rounds over the 3 angles with shrinking
    // brackets, 192 golden iterations in total.
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    let mut angles = best_angles;
    for round in 0..4 {
        let half_width = 0.4 * 0.25f64.powi(round);
        for coord in 0..3 {
            let center = angles[coord];
            let (mut lo, mut hi) = (center - half_width, center + half_width);
            let mut x1 = hi - GOLDEN * (hi - lo);
            let mut x2 = lo + GOLDEN * (hi - lo);
            let eval = |angles: &[f64; 3], x: f64, coord: usize| {
                let mut a = *angles;
                a[coord] = x;
                fef_objective(rho, a)
            };
            let mut f1 = eval(&angles, x1, coord);
            let mut f2 = eval(&angles, x2, coord);
            for _ in 0..16 {
                if f1 >= f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - GOLDEN * (hi - lo);
                    f1 = eval(&angles, x1, coord);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + GOLDEN * (hi - lo);
                    f2 = eval(&angles, x2, coord);
                }
            }
            let x_best = if f1 >= f2 { x1 } else { x2 };
            if eval(&angles, x_best, coord) > fef_objective(rho, angles) {
                angles[coord] = x_best;
            }
        }
    }
    best.max(fef_objective(rho, angles))
}

/// Closed-form fidelity ½(1 + 2αβ√(1-p) - pβ²) of the amplitude-damped
/// Schmidt state.
pub fn fidelity_amp_closed(alpha2: f64, p: f64) -> Result<f64> {
    if !(0.5..1.0).contains(&alpha2) {
        return Err(Error::OutOfRange {
            name: "alpha2",
            value: alpha2,
            range: "[1/2, 1)",
        });
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1)",
        });
    }
    let beta2 = 1.0 - alpha2;
    let ab = (alpha2 * beta2).sqrt();
    Ok(0.5 * (1.0 + 2.0 * ab * (1.0 - p).sqrt() - p * beta2))
}

/// Wootters concurrence: C = max(0, λ₁-λ₂-λ₃-λ₄) where the λ_i are the
/// decreasing square roots of the eigenvalues of ρ·ρ̃ and
/// ρ̃ = (σ_y⊗σ_y)ρ*(σ_y⊗σ_y).
///
/// The eigenvalues of ρ·ρ̃ are computed as those of the Hermitian
/// product √ρ·ρ̃·√ρ, which shares its spectrum.
pub fn concurrence(rho: &DensityMatrix) -> f64 {
    let eig = hermitian_eig(rho.mat()).expect("density matrices are Hermitian");
    let mut sqrt_rho = Mat4::zeros();
    for i in 0..4 {
        let lambda = eig.eigenvalues[i].max(0.0);
        sqrt_rho = sqrt_rho + outer(&eig.eigenvectors[i]).scale(lambda.sqrt());
    }

    let yy = kron(&sigma_y(), &sigma_y());
    let rho_tilde = yy * rho.mat().conj() * yy;
    let product = sqrt_rho * rho_tilde * sqrt_rho;

    let mu = hermitian_eig(&product)
        .expect("√ρ·ρ̃·√ρ is Hermitian")
        .eigenvalues;
    // mu ascending; λ_i descending square roots. Eigenvalues below the
    // relative noise floor are exact zeros of the product (the square
    // root would otherwise amplify 1e-15 noise to 1e-8).
    let floor = mu[3].max(0.0) * 1e-12;
    let lambda: Vec<f64> = mu
        .iter()
        .rev()
        .map(|&m| if m > floor { m.sqrt() } else { 0.0 })
        .collect();
    (lambda[0] - lambda[1] - lambda[2] - lambda[3]).clamp(0.0, 1.0)
}

/// N(ρ) = max(0, -2λ_min(ρ^Γ)).
pub fn negativity(rho: &DensityMatrix) -> f64 {
    let pt = partial_transpose(rho.mat(), Subsystem::B);
    let eig = hermitian_eig(&pt).expect("partial transpose preserves Hermiticity");
    (-2.0 * eig.eigenvalues[0]).max(0.0)
}

/// The negativity bound on F* and whether it is attained.
#[derive(Clone, Copy, Debug)]
pub struct UpperBound {
    /// ½(1 + N(ρ)) ≥ F*(ρ).
    pub bound: f64,
    /// The bound is tight iff the eigenvector of the negative eigenvalue
    /// of ρ^Γ is maximally entangled (within 1e-8). PPT states attain
    /// the bound ½ trivially and report `tight = true`.
    pub tight: bool,
}

/// Computes ½(1 + N(ρ)) and its tightness certificate.
pub fn fstar_upper_bound(rho: &DensityMatrix) -> UpperBound {
    let pt = partial_transpose(rho.mat(), Subsystem::B);
    let eig = hermitian_eig(&pt).expect("partial transpose preserves Hermiticity");
    let lambda_min = eig.eigenvalues[0];
    let negativity = (-2.0 * lambda_min).max(0.0);
    let tight = if lambda_min >= -1e-12 {
        true
    } else {
        is_maximally_entangled(&eig.eigenvectors[0], 1e-8)
    };
    UpperBound {
        bound: 0.5 * (1.0 + negativity),
        tight,
    }
}

/// Optimal teleportation fidelity f = (2F + 1)/3 for a resource state of
/// fidelity F.
pub fn teleport_fidelity(fef: f64) -> Result<f64> {
    if !(0.25..=1.0).contains(&fef) {
        return Err(Error::OutOfRange {
            name: "F",
            value: fef,
            range: "[1/4, 1]",
        });
    }
    Ok((2.0 * fef + 1.0) / 3.0)
}
