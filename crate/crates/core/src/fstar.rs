//! The TP-LOCC-optimal fidelity F*: analytic two-branch formula with
//! its thresholds, a numeric rank-1 SDP search that cross-checks it,
//! and the channel-level optimum.
//!
//! F*(ρ) maximizes ½ - Tr(Xρ^Γ) over 0 ≤ X ≤ I with -I/2 ≤ X^Γ ≤ I/2;
//! the optimum is attained at rank-1 X, which reduces the search to a
//! unit vector x and a weight w ∈ [0, 1] capped by the largest Schmidt
//! coefficient of x.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{
    expval, hermitian_eig, inner, matvec, partial_transpose, Mat4, Subsystem, Vec4,
};
use crate::measures::fidelity_amp_closed;
use crate::states::{magic_basis, schmidt_state, DensityMatrix, SchmidtState};
use crate::{Error, Result};

/// A restart counts as converged once its coordinate-descent step has
/// shrunk below this.
const STATIONARY_STEP: f64 = 1e-8;

/// Enhancement margin: F* counts as a strict improvement over F when it
/// exceeds it by more than this.
pub const ENHANCEMENT_MARGIN: f64 = 1e-9;

/// Configuration of the rank-1 SDP search.
#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Random restarts (the first start is the λ_min eigenvector of ρ^Γ).
    pub restarts: usize,
    pub seed: u64,
    /// Coordinate-descent iteration cap per restart.
    pub max_iters: usize,
    /// Feasibility tolerance carried into the certificate.
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            seed: 7,
            max_iters: 500,
            tol: 1e-9,
        }
    }
}

/// Which analytic branch produced an F* value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// α² ≥ g(p): F* = F, no enhancement.
    Branch1,
    /// α² < g(p) (requires p > p₀): F* = ½(1 + α²(1-p)/p) > F.
    Branch2,
    /// Value did not come from the branch formulas (SDP or endpoint).
    NumericOnly,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Branch1 => "branch1",
            Branch::Branch2 => "branch2",
            Branch::NumericOnly => "numeric_only",
        })
    }
}

/// F* of an amplitude-damped Schmidt state.
#[derive(Clone, Copy, Debug)]
pub struct FStarResult {
    pub value: f64,
    pub branch: Branch,
    pub alpha2: f64,
    pub p: f64,
    /// Whether TP LOCC strictly improves on the pre-processed fidelity
    /// (true exactly on branch 2).
    pub enhanced: bool,
}

/// Rank-1 certificate of the SDP search: X = x_weight·|x⟩⟨x| with
/// 0 ≤ X ≤ I and -I/2 ≤ X^Γ ≤ I/2 holding by construction.
#[derive(Clone, Debug)]
pub struct SdpCertificate {
    /// Unit vector spanning the rank-1 X.
    pub x_vector: Vec4,
    /// Weight w ∈ [0, 1], capped at 1/(2s₁²) by the X^Γ window.
    pub x_weight: f64,
    /// Achieved objective ½ - Tr(Xρ^Γ).
    pub objective: f64,
    pub restarts_used: usize,
    /// False when no restart reached stationarity within the iteration
    /// budget; the best value found is still returned.
    pub converged: bool,
}

fn check_open_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "(0, 1)",
        });
    }
    Ok(())
}

fn check_alpha2(alpha2: f64) -> Result<()> {
    if !(0.5..1.0).contains(&alpha2) {
        return Err(Error::OutOfRange {
            name: "alpha2",
            value: alpha2,
            range: "[1/2, 1)",
        });
    }
    Ok(())
}

/// Branch boundary g(p) = p²/(1 - p + p²).
pub fn g_threshold(p: f64) -> Result<f64> {
    check_open_p(p)?;
    Ok(p * p / (1.0 - p + p * p))
}

/// p₀ = (√5 - 1)/2, the threshold above which branch 2 becomes
/// reachable (g(p) > 1/2 ⟺ p > p₀).
pub fn p_zero() -> f64 {
    (5.0f64.sqrt() - 1.0) / 2.0
}

/// Two-branch analytic F* for the amplitude damping channel:
/// F₁* = F when α² ≥ g(p), else F₂* = ½(1 + α²(1-p)/p).
///
/// The boundary α² = g(p) belongs to branch 1.
pub fn fstar_analytic(alpha2: f64, p: f64) -> Result<FStarResult> {
    check_alpha2(alpha2)?;
    check_open_p(p)?;
    let g = g_threshold(p)?;
    if alpha2 >= g {
        Ok(FStarResult {
            value: fidelity_amp_closed(alpha2, p)?,
            branch: Branch::Branch1,
            alpha2,
            p,
            enhanced: false,
        })
    } else {
        Ok(FStarResult {
            value: 0.5 * (1.0 + alpha2 * (1.0 - p) / p),
            branch: Branch::Branch2,
            alpha2,
            p,
            enhanced: true,
        })
    }
}

/// F* with the endpoint policy: p = 0 gives 1 (the channel is
/// noise-free), p = 1 gives 1/2 (the channel is entanglement breaking
/// and its output separable). Interior p delegates to
/// [`fstar_analytic`]; endpoints carry `Branch::NumericOnly` since
/// neither branch formula applies there.
pub fn fstar_at(alpha2: f64, p: f64) -> Result<FStarResult> {
    check_alpha2(alpha2)?;
    if p == 0.0 {
        return Ok(FStarResult {
            value: 1.0,
            branch: Branch::NumericOnly,
            alpha2,
            p,
            enhanced: alpha2 > 0.5,
        });
    }
    if p == 1.0 {
        return Ok(FStarResult {
            value: 0.5,
            branch: Branch::NumericOnly,
            alpha2,
            p,
            enhanced: false,
        });
    }
    fstar_analytic(alpha2, p)
}

/// The optimal channel input |χ₀⟩ with α² = 1/(2-p).
pub fn chi_zero(p: f64) -> Result<SchmidtState> {
    check_open_p(p)?;
    schmidt_state(1.0 / (2.0 - p))
}

/// F_max = F(ρ(χ₀,Λ)) = 1 - p/2, the channel-level optimum.
pub fn f_max(p: f64) -> Result<f64> {
    check_open_p(p)?;
    Ok(1.0 - p / 2.0)
}

/// True iff TP LOCC can strictly enhance the fidelity of ρ(χ,Λ):
/// p > p₀ and α² < g(p).
pub fn enhancement_predicate(alpha2: f64, p: f64) -> Result<bool> {
    check_alpha2(alpha2)?;
    check_open_p(p)?;
    Ok(p > p_zero() && alpha2 < g_threshold(p)?)
}

/// Result of maximizing F* over the input state for a fixed channel.
#[derive(Clone, Copy, Debug)]
pub struct ChannelOptimum {
    pub value: f64,
    pub argmax_alpha2: f64,
}

/// Maximizes fstar_analytic(·, p) over α² ∈ [1/2, 1): a uniform grid of
/// `grid_n` points followed by golden-section refinement of the bracket
/// around the grid argmax (to 1e-10 in α², with a parabolic vertex step
/// to beat the float-noise plateau of pure value comparisons).
pub fn channel_optimal_fidelity(p: f64, grid_n: usize) -> Result<ChannelOptimum> {
    check_open_p(p)?;
    if grid_n < 100 {
        return Err(Error::OutOfRange {
            name: "grid_n",
            value: grid_n as f64,
            range: "[100, ∞)",
        });
    }

    let lo = 0.5;
    let hi = 1.0 - 1e-6;
    let f = |alpha2: f64| {
        fstar_analytic(alpha2, p)
            .expect("scan stays inside the valid domain")
            .value
    };

    let mut best_i = 0;
    let mut best_f = f64::NEG_INFINITY;
    for i in 0..grid_n {
        let alpha2 = lo + (hi - lo) * i as f64 / (grid_n - 1) as f64;
        let v = f(alpha2);
        if v > best_f {
            best_f = v;
            best_i = i;
        }
    }
    let cell = (hi - lo) / (grid_n - 1) as f64;
    let mut a = (lo + cell * (best_i as f64 - 1.0)).max(lo);
    let mut b = (lo + cell * (best_i as f64 + 1.0)).min(hi);

    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // Triple snapshotted while widths are still above the noise floor,
    // used for the parabolic step.
    let mut snapshot: Option<(f64, f64, f64, f64, f64, f64)> = None;
    while b - a > 1e-10 {
        if snapshot.is_none() && b - a < 2e-5 {
            snapshot = Some((a, x1, b, f(a), f1, f(b)));
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    let mut argmax = 0.5 * (a + b);
    let mut value = f(argmax);

    if let Some((xa, xm, xb, fa, fm, fb)) = snapshot {
        // Parabolic vertex through the snapshot triple.
        let d1 = (xm - xa) * (fm - fb);
        let d2 = (xm - xb) * (fm - fa);
        let denom = 2.0 * (d1 - d2);
        if denom.abs() > 1e-300 {
            let vertex = xm - ((xm - xa) * d1 - (xm - xb) * d2) / denom;
            if vertex > xa && vertex < xb {
                let fv = f(vertex);
                if fv >= value {
                    argmax = vertex;
                    value = fv;
                }
            }
        }
    }

    Ok(ChannelOptimum {
        value,
        argmax_alpha2: argmax,
    })
}

/// Largest squared Schmidt coefficient of a unit 4-vector, from the 2×2
/// Gram matrix of its reshaping (closed form, no eigensolver). The
/// discriminant uses the cancellation-free form (g00-g11)² + 4|g01|² so
/// the result stays accurate at the maximally entangled point s₁ = s₂.
fn top_schmidt_sq(v: &Vec4) -> f64 {
    let g00 = v[0].norm_sqr() + v[1].norm_sqr();
    let g11 = v[2].norm_sqr() + v[3].norm_sqr();
    let g01 = v[0] * v[2].conj() + v[1] * v[3].conj();
    let diff = g00 - g11;
    let disc = (diff * diff + 4.0 * g01.norm_sqr()).sqrt();
    0.5 * (g00 + g11 + disc)
}

fn complexify(x: &[f64; 8]) -> Vec4 {
    [
        Complex64::new(x[0], x[4]),
        Complex64::new(x[1], x[5]),
        Complex64::new(x[2], x[6]),
        Complex64::new(x[3], x[7]),
    ]
}

/// Objective gain w(x)·max(0, -⟨x|ρ^Γ|x⟩); F* candidate = ½ + gain.
/// Scale and global-phase invariant in x.
fn sdp_gain(pt: &Mat4, x: &[f64; 8]) -> f64 {
    let norm_sq: f64 = x.iter().map(|t| t * t).sum();
    if norm_sq < 1e-20 {
        return 0.0;
    }
    let mut v = complexify(x);
    let inv = 1.0 / norm_sq.sqrt();
    for z in v.iter_mut() {
        *z = z.scale(inv);
    }
    let q = expval(pt, &v);
    if q >= 0.0 {
        return 0.0;
    }
    let s1sq = top_schmidt_sq(&v);
    let w = (0.5 / s1sq).min(1.0);
    w * (-q)
}

/// Best maximally entangled rank-1 candidate: on that submanifold x is
/// a real combination of the magic basis, so the gain -⟨x|ρ^Γ|x⟩
/// reduces to a real symmetric eigenproblem. Coordinate descent alone
/// stalls there (the largest Schmidt coefficient has a conical vertex
/// at s₁ = s₂), so this candidate is solved exactly and fed into the
/// search.
fn best_max_entangled_candidate(pt: &Mat4) -> (f64, [f64; 8]) {
    let basis = magic_basis();
    let mut s = Mat4::zeros();
    for k in 0..4 {
        for l in 0..4 {
            let m_kl = inner(&basis[k], &matvec(pt, &basis[l]));
            s[(k, l)] = Complex64::new(m_kl.re, 0.0);
        }
    }
    // real symmetric input keeps the Jacobi iteration real, so the
    // coefficient vector is real and the mapped state maximally entangled
    let eig = hermitian_eig(&s).expect("real part of magic form is symmetric");
    let coeffs = eig.eigenvectors[0];
    let mut x = [Complex64::new(0.0, 0.0); 4];
    for k in 0..4 {
        for i in 0..4 {
            x[i] += coeffs[k] * basis[k][i];
        }
    }
    (
        -eig.eigenvalues[0],
        [
            x[0].re, x[1].re, x[2].re, x[3].re, x[0].im, x[1].im, x[2].im, x[3].im,
        ],
    )
}

/// Maximizes ½ - Tr(Xρ^Γ) over feasible rank-1 X: the exactly-solved
/// maximally entangled candidate plus seeded random restarts with
/// coordinate descent (shrinking steps) on the 8 real parameters of x.
/// Deterministic for a fixed seed. The weight w is chosen exactly
/// feasible for each candidate (w = min(1, 1/(2s₁²))), so the
/// certificate never violates the constraint windows.
pub fn fstar_sdp(rho: &DensityMatrix, config: &SolverConfig) -> (f64, SdpCertificate) {
    let pt = partial_transpose(rho.mat(), Subsystem::B);
    let eig = hermitian_eig(&pt).expect("partial transpose preserves Hermiticity");

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let restarts = config.restarts.max(1);

    let warm = {
        let v = eig.eigenvectors[0];
        [
            v[0].re, v[1].re, v[2].re, v[3].re, v[0].im, v[1].im, v[2].im, v[3].im,
        ]
    };
    let (_, maxent) = best_max_entangled_candidate(&pt);

    let mut best_gain = sdp_gain(&pt, &maxent);
    let mut best_x = maxent;
    let mut converged = false;

    for restart in 0..restarts {
        let mut x = if restart == 0 {
            warm
        } else if restart == 1 {
            maxent
        } else {
            let mut x = [0.0f64; 8];
            for t in x.iter_mut() {
                *t = rng.sample(StandardNormal);
            }
            x
        };
        let norm: f64 = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for t in x.iter_mut() {
                *t /= norm;
            }
        } else {
            x[0] = 1.0;
        }

        let mut cur = sdp_gain(&pt, &x);
        let mut step = 0.5;
        for _ in 0..config.max_iters {
            let mut improved = false;
            for k in 0..8 {
                for delta in [step, -step] {
                    let mut y = x;
                    y[k] += delta;
                    let gain = sdp_gain(&pt, &y);
                    if gain > cur {
                        cur = gain;
                        x = y;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
                if step < STATIONARY_STEP {
                    converged = true;
                    break;
                }
            }
        }
        if cur > best_gain {
            best_gain = cur;
            best_x = x;
        }
    }

    let mut v = complexify(&best_x);
    let norm: f64 = best_x.iter().map(|t| t * t).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z = z.scale(1.0 / norm);
    }
    let q = expval(&pt, &v);
    let x_weight = if q < 0.0 {
        (0.5 / top_schmidt_sq(&v)).min(1.0)
    } else {
        0.0
    };
    debug_assert!(
        x_weight <= 1.0 + config.tol && x_weight * top_schmidt_sq(&v) <= 0.5 + config.tol,
        "certificate left the feasible region"
    );
    let value = 0.5 + best_gain.max(0.0);
    let certificate = SdpCertificate {
        x_vector: v,
        x_weight,
        objective: value,
        restarts_used: restarts,
        converged,
    };
    (value, certificate)
}
