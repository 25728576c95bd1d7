//! Kraus-operator channel families and their action on qubit B of a
//! two-qubit state.

use num_complex::Complex64;

use crate::linalg::{hermitian_eig, kron, Mat2, Mat4, Vec4};
use crate::states::{density_of, is_maximally_entangled, paulis, phi_plus, DensityMatrix};
use crate::{Error, Result};

/// Trace preservation Σ M†M = I is enforced to this tolerance.
pub const TRACE_PRESERVING_TOL: f64 = 1e-12;

/// The top Choi eigenvalue is reported as degenerate when the gap to the
/// next eigenvalue is below this.
pub const DEGENERATE_TOP_TOL: f64 = 1e-10;

/// Maximal-entanglement tolerance for eigenvector classification.
pub const MAX_ENTANGLED_TOL: f64 = 1e-8;

fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A quantum channel as a finite list of 2×2 Kraus operators with
/// Σ M†M = I, tagged with a family name and strength parameter p.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    name: String,
    ops: Vec<Mat2>,
    p: f64,
}

impl KrausChannel {
    /// Generic constructor validating the trace-preserving invariant.
    pub fn from_ops(name: impl Into<String>, ops: Vec<Mat2>, p: f64) -> Result<Self> {
        let mut sum = Mat2::zeros();
        for m in &ops {
            sum = sum + m.dagger() * *m;
        }
        let deviation = sum.max_abs_diff(&Mat2::identity());
        if deviation > TRACE_PRESERVING_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self {
            name: name.into(),
            ops,
            p,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kraus_ops(&self) -> &[Mat2] {
        &self.ops
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Amplitude damping: M₀ = diag(1, √(1-p)), M₁ = √p |0⟩⟨1|.
pub fn amplitude_damping(p: f64) -> Result<KrausChannel> {
    check_p(p)?;
    let m0 = Mat2::diag(1.0, (1.0 - p).sqrt());
    let m1 = Mat2::new([[r(0.0), r(p.sqrt())], [r(0.0), r(0.0)]]);
    KrausChannel::from_ops("amp", vec![m0, m1], p)
}

/// Phase damping: {diag(1, √(1-p)), diag(0, √p)}.
pub fn phase_damping(p: f64) -> Result<KrausChannel> {
    check_p(p)?;
    let m0 = Mat2::diag(1.0, (1.0 - p).sqrt());
    let m1 = Mat2::diag(0.0, p.sqrt());
    KrausChannel::from_ops("phase", vec![m0, m1], p)
}

/// Depolarizing with the "p/4 on each Pauli" convention, so p = 1 maps
/// every input to I/2: {√(1-3p/4)·I, √(p/4)·σ_x, √(p/4)·σ_y, √(p/4)·σ_z}.
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    check_p(p)?;
    let mut ops = vec![Mat2::identity().scale((1.0 - 0.75 * p).sqrt())];
    for sigma in paulis() {
        ops.push(sigma.scale((0.25 * p).sqrt()));
    }
    KrausChannel::from_ops("depol", ops, p)
}

/// Looks a channel family up by its CLI name (`amp`, `phase`, `depol`).
pub fn by_name(name: &str, p: f64) -> Result<KrausChannel> {
    match name {
        "amp" => amplitude_damping(p),
        "phase" => phase_damping(p),
        "depol" => depolarizing(p),
        _ => Err(Error::OutOfRange {
            name: "channel",
            value: f64::NAN,
            range: "{amp, phase, depol}",
        }),
    }
}

/// Sends qubit B through the channel: ρ → Σ (I⊗M_i) ρ (I⊗M_i†).
pub fn apply_to_b(channel: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let mut out = Mat4::zeros();
    for m in channel.kraus_ops() {
        let lifted = kron(&Mat2::identity(), m);
        out = out + lifted * *rho.mat() * lifted.dagger();
    }
    DensityMatrix::new(out).map_err(|e| Error::ChannelOutputInvalid {
        reason: e.to_string(),
    })
}

/// The Choi state ρ(Φ⁺, Λ): half of |Φ⁺⟩ sent through the channel.
pub fn choi_state(channel: &KrausChannel) -> Result<DensityMatrix> {
    apply_to_b(channel, &density_of(&phi_plus()))
}

/// Best fidelity achievable with input pre-processing only: the top
/// eigenpair of the Choi state.
#[derive(Clone, Debug)]
pub struct PreprocessedOptimum {
    /// Maximum eigenvalue of the Choi state.
    pub f_max_pre: f64,
    /// The corresponding eigenstate; sending half of it through the
    /// channel attains `f_max_pre`.
    pub state: Vec4,
    /// Whether `state` is maximally entangled within 1e-8.
    pub maximally_entangled: bool,
    /// Set when the top eigenvalue is degenerate within 1e-10; the
    /// returned vector is then the deterministic tie-broken one.
    pub degenerate_top: bool,
}

/// Computes the eigenpair of the Choi state that governs the best
/// pre-processed input for the channel.
pub fn optimal_preprocessed_input(channel: &KrausChannel) -> Result<PreprocessedOptimum> {
    let choi = choi_state(channel)?;
    let eig = hermitian_eig(choi.mat())?;
    let f_max_pre = eig.eigenvalues[3];
    let state = eig.eigenvectors[3];
    Ok(PreprocessedOptimum {
        f_max_pre,
        state,
        maximally_entangled: is_maximally_entangled(&state, MAX_ENTANGLED_TOL),
        degenerate_top: eig.eigenvalues[3] - eig.eigenvalues[2] < DEGENERATE_TOP_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::outer;
    use crate::states::schmidt_state;

    #[test]
    fn constructors_reject_out_of_range() {
        assert!(matches!(
            amplitude_damping(-0.1),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            amplitude_damping(1.1),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            phase_damping(f64::NAN),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(depolarizing(2.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn all_families_are_trace_preserving() {
        for p in [0.0, 0.3, 0.7, 1.0] {
            for channel in [
                amplitude_damping(p).unwrap(),
                phase_damping(p).unwrap(),
                depolarizing(p).unwrap(),
            ] {
                let mut sum = Mat2::zeros();
                for m in channel.kraus_ops() {
                    sum = sum + m.dagger() * *m;
                }
                assert!(sum.max_abs_diff(&Mat2::identity()) <= 1e-12);
            }
        }
    }

    #[test]
    fn generic_constructor_rejects_non_tp() {
        let bad = vec![Mat2::identity().scale(0.9)];
        assert!(matches!(
            KrausChannel::from_ops("bad", bad, 0.0),
            Err(Error::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn amp_kraus_entries() {
        let ch = amplitude_damping(0.5).unwrap();
        let m0 = &ch.kraus_ops()[0];
        assert!((m0[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((m0[(1, 1)].re - 0.5f64.sqrt()).abs() < 1e-15);
        let m1 = &ch.kraus_ops()[1];
        assert!((m1[(0, 1)].re - 0.5f64.sqrt()).abs() < 1e-15);

        // p = 0 is the identity channel
        let id = amplitude_damping(0.0).unwrap();
        let rho = density_of(&schmidt_state(0.7).unwrap());
        let out = apply_to_b(&id, &rho).unwrap();
        assert!(out.mat().max_abs_diff(rho.mat()) < 1e-15);
    }

    #[test]
    fn phase_damping_zero_is_identity() {
        let ch = phase_damping(0.0).unwrap();
        let rho = density_of(&schmidt_state(0.6).unwrap());
        let out = apply_to_b(&ch, &rho).unwrap();
        assert!(out.mat().max_abs_diff(rho.mat()) < 1e-15);
    }

    #[test]
    fn full_damping_kills_coherence() {
        let ch = amplitude_damping(1.0).unwrap();
        let out = apply_to_b(&ch, &density_of(&schmidt_state(0.7).unwrap())).unwrap();
        // output is diagonal: α²|00⟩⟨00| + β²|10⟩⟨10| (B decayed to |0⟩)
        assert!(out.mat()[(0, 3)].norm() < 1e-15);
        assert!((out.mat()[(0, 0)].re - 0.7).abs() < 1e-14);
        assert!((out.mat()[(2, 2)].re - 0.3).abs() < 1e-14);
    }

    #[test]
    fn damped_output_matches_closed_form() {
        // ρ(χ,Λ) = (1-pβ²)|η⟩⟨η| + pβ²|10⟩⟨10| with
        // |η⟩ = (α|00⟩ + β√(1-p)|11⟩)/√(1-pβ²); the decayed component
        // sits on |10⟩ since qubit B is the damped one.
        for (alpha2, p) in [
            (0.5, 0.5),
            (0.55, 0.8),
            (0.75, 0.3),
            (0.9, 0.95),
            (0.6180, 0.618),
            (0.99, 0.01),
        ] {
            let chi = schmidt_state(alpha2).unwrap();
            let out = apply_to_b(&amplitude_damping(p).unwrap(), &density_of(&chi)).unwrap();

            let (a, b) = (chi.alpha(), chi.beta());
            let w = 1.0 - p * b * b;
            let eta = [
                r(a / w.sqrt()),
                r(0.0),
                r(0.0),
                r(b * (1.0 - p).sqrt() / w.sqrt()),
            ];
            let mut expected = outer(&eta).scale(w);
            expected[(2, 2)] += r(p * b * b);
            assert!(
                out.mat().max_abs_diff(&expected) < 1e-12,
                "closed form mismatch at alpha2={alpha2}, p={p}"
            );
        }
    }

    #[test]
    fn choi_of_identity_is_bell_projector() {
        let choi = choi_state(&amplitude_damping(0.0).unwrap()).unwrap();
        assert!(choi.mat().max_abs_diff(density_of(&phi_plus()).mat()) < 1e-15);
    }

    #[test]
    fn damped_choi_spectrum() {
        let choi = choi_state(&amplitude_damping(0.5).unwrap()).unwrap();
        let eig = hermitian_eig(choi.mat()).unwrap();
        let expected = [0.0, 0.0, 0.25, 0.75];
        for (got, want) in eig.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-13);
        }

        for p in [0.1, 0.25, 0.6, 0.9, 0.99] {
            let choi = choi_state(&amplitude_damping(p).unwrap()).unwrap();
            let top = hermitian_eig(choi.mat()).unwrap().eigenvalues[3];
            assert!((top - (1.0 - p / 2.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn depolarizing_choi_is_werner_form() {
        let p = 0.6;
        let choi = choi_state(&depolarizing(p).unwrap()).unwrap();
        let werner = density_of(&phi_plus()).mat().scale(1.0 - p) + Mat4::identity().scale(p / 4.0);
        assert!(choi.mat().max_abs_diff(&werner) < 1e-13);
    }

    #[test]
    fn preprocessed_optimum_amp() {
        let opt = optimal_preprocessed_input(&amplitude_damping(0.5).unwrap()).unwrap();
        assert!((opt.f_max_pre - 0.75).abs() < 1e-12);
        assert!(!opt.maximally_entangled);
        assert!(!opt.degenerate_top);
        // eigenstate is χ₀(0.5): α² = 2/3
        assert!((opt.state[0].re - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((opt.state[3].re - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn preprocessed_optimum_phase_and_identity() {
        let opt = optimal_preprocessed_input(&phase_damping(0.5).unwrap()).unwrap();
        assert!(opt.maximally_entangled);

        let id = optimal_preprocessed_input(&amplitude_damping(0.0).unwrap()).unwrap();
        assert!((id.f_max_pre - 1.0).abs() < 1e-13);
        assert!(id.maximally_entangled);
        assert!((id.state[0].re - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((id.state[3].re - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_top_eigenvector_maximally_entangled_below_threshold() {
        for p in [0.1, 0.3, 0.5, 0.7] {
            let opt = optimal_preprocessed_input(&depolarizing(p).unwrap()).unwrap();
            assert!(opt.maximally_entangled, "p = {p}");
            assert!((opt.f_max_pre - (1.0 - 0.75 * p)).abs() < 1e-12);
        }
    }
}
