//! Cross-module property tests: linear-algebra invariants on random
//! inputs, channel trace preservation across a dense grid, and the
//! inequality chains tying the entanglement measures together.

use num_complex::Complex64;
use proptest::prelude::*;

use chanfid::channels::{amplitude_damping, apply_to_b};
use chanfid::fstar::fstar_analytic;
use chanfid::linalg::{
    hermitian_eig, inner, kron, matvec, partial_transpose, Mat2, Mat4, Subsystem,
};
use chanfid::measures::{
    concurrence, fef_magic, fef_sampled, fef_t_formula, fidelity_amp_closed, negativity,
};
use chanfid::states::{correlation_matrix, density_of, schmidt_state, DensityMatrix};

fn mat4_from(parts: &[f64; 32]) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = Complex64::new(parts[4 * i + j], parts[16 + 4 * i + j]);
        }
    }
    m
}

fn damped(alpha2: f64, p: f64) -> DensityMatrix {
    let chi = schmidt_state(alpha2).unwrap();
    apply_to_b(&amplitude_damping(p).unwrap(), &density_of(&chi)).unwrap()
}

/// Pure product state (cos θa, e^{iφa} sin θa) ⊗ (cos θb, e^{iφb} sin θb).
fn product_state(theta_a: f64, phi_a: f64, theta_b: f64, phi_b: f64) -> DensityMatrix {
    let a = [
        Complex64::new(theta_a.cos(), 0.0),
        Complex64::from_polar(theta_a.sin(), phi_a),
    ];
    let b = [
        Complex64::new(theta_b.cos(), 0.0),
        Complex64::from_polar(theta_b.sin(), phi_b),
    ];
    let v = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
    DensityMatrix::pure(&v).unwrap()
}

proptest! {
    #[test]
    fn eigen_reconstruction_on_random_hermitian(parts in prop::array::uniform32(-1.0f64..1.0)) {
        let m = mat4_from(&parts);
        let h = (m + m.dagger()).scale(0.5);
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-10);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = inner(&eig.eigenvectors[i], &eig.eigenvectors[j]).norm();
                prop_assert!((got - want).abs() <= 1e-12);
            }
        }
        let norm = h.frobenius();
        for i in 0..4 {
            let mv = matvec(&h, &eig.eigenvectors[i]);
            let res: f64 = mv
                .iter()
                .zip(&eig.eigenvectors[i])
                .map(|(got, v)| (*got - v.scale(eig.eigenvalues[i])).norm_sqr())
                .sum();
            prop_assert!(res.sqrt() <= 1e-12 * norm.max(1e-30));
        }
    }

    #[test]
    fn partial_transpose_involution_and_trace(parts in prop::array::uniform32(-1.0f64..1.0)) {
        let m = mat4_from(&parts);
        for sub in [Subsystem::A, Subsystem::B] {
            let pt = partial_transpose(&m, sub);
            prop_assert_eq!(partial_transpose(&pt, sub), m);
            prop_assert!((pt.trace() - m.trace()).norm() < 1e-15);
        }
    }

    #[test]
    fn kron_bilinearity(parts in prop::array::uniform24(-1.0f64..1.0)) {
        let m2 = |o: usize| {
            Mat2::new([
                [Complex64::new(parts[o], parts[o + 1]), Complex64::new(parts[o + 2], parts[o + 3])],
                [Complex64::new(parts[o + 4], parts[o + 5]), Complex64::new(parts[o + 6], parts[o + 7])],
            ])
        };
        let (a, a2, b) = (m2(0), m2(8), m2(16));
        let lhs = kron(&(a + a2), &b);
        let rhs = kron(&a, &b) + kron(&a2, &b);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-14);
    }

    #[test]
    fn negativity_below_concurrence_on_channel_outputs(
        alpha2 in 0.5f64..0.999,
        p in 0.001f64..0.999,
    ) {
        let rho = damped(alpha2, p);
        prop_assert!(negativity(&rho) <= concurrence(&rho) + 1e-10);
    }

    #[test]
    fn concurrence_ordering_is_preserved(
        a_lo in 0.5f64..0.99,
        bump in 0.0f64..0.009,
        p in 0.001f64..0.999,
    ) {
        // a_lo is the more entangled input (closer to 1/2)
        let a_hi = a_lo + bump;
        let c_lo = concurrence(&damped(a_lo, p));
        let c_hi = concurrence(&damped(a_hi, p));
        prop_assert!(c_lo >= c_hi - 1e-12);
    }

    #[test]
    fn product_states_have_half_fidelity(
        theta_a in 0.0f64..std::f64::consts::FRAC_PI_2,
        phi_a in 0.0f64..std::f64::consts::TAU,
        theta_b in 0.0f64..std::f64::consts::FRAC_PI_2,
        phi_b in 0.0f64..std::f64::consts::TAU,
    ) {
        let rho = product_state(theta_a, phi_a, theta_b, phi_b);
        prop_assert!((fef_magic(&rho).value - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn oracle_triangle_on_random_points(
        alpha2 in 0.5f64..0.999,
        p in 0.001f64..0.999,
        seed in any::<u64>(),
    ) {
        let rho = damped(alpha2, p);
        let magic = fef_magic(&rho).value;
        let t = fef_t_formula(&rho).unwrap();
        prop_assert!((magic - t).abs() <= 1e-10);
        // cheap sampled run stays a lower bound
        let sampled = fef_sampled(&rho, 64, seed);
        prop_assert!(sampled <= magic + 1e-9);
        prop_assert!((fidelity_amp_closed(alpha2, p).unwrap() - magic).abs() <= 1e-9);
    }

    #[test]
    fn fstar_sandwich(
        alpha2 in 0.5f64..0.999,
        p in 0.001f64..0.999,
    ) {
        let rho = damped(alpha2, p);
        let f = fidelity_amp_closed(alpha2, p).unwrap();
        let star = fstar_analytic(alpha2, p).unwrap().value;
        prop_assert!(star >= f - 1e-9);
        prop_assert!(star <= 0.5 * (1.0 + negativity(&rho)) + 1e-9);
    }

    #[test]
    fn channel_output_correlation_is_diagonal_with_negative_det(
        alpha2 in 0.5f64..0.999,
        p in 0.001f64..0.999,
    ) {
        let t = correlation_matrix(&damped(alpha2, p)).unwrap();
        prop_assert!(t.off_diagonal_mass() <= 1e-9);
        prop_assert!(t.det() < 0.0);
    }
}

#[test]
fn channel_preserves_trace_on_dense_grid() {
    // 10⁴ grid points, |Tr - 1| ≤ 1e-12 each
    for i in 0..100 {
        let p = 0.001 + 0.998 * i as f64 / 99.0;
        let channel = amplitude_damping(p).unwrap();
        for j in 0..100 {
            let alpha2 = 0.5 + 0.499 * j as f64 / 99.0;
            let rho = apply_to_b(&channel, &density_of(&schmidt_state(alpha2).unwrap())).unwrap();
            let tr = rho.mat().trace();
            assert!((tr.re - 1.0).abs() <= 1e-12 && tr.im.abs() <= 1e-12);
        }
    }
}

#[test]
fn pure_schmidt_density_is_rank_one() {
    for alpha2 in [0.5, 0.61, 0.73, 0.88, 0.97] {
        let rho = density_of(&schmidt_state(alpha2).unwrap());
        let eig = hermitian_eig(rho.mat()).unwrap();
        assert!((eig.eigenvalues[3] - 1.0).abs() <= 1e-12);
        for lambda in &eig.eigenvalues[..3] {
            assert!(lambda.abs() <= 1e-12);
        }
    }
}
