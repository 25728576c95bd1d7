use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A scalar argument fell outside its documented domain. `value` is
    /// NaN for non-numeric arguments (their text is already in `name`).
    #[error("{name}{} is outside the valid range {range}", if value.is_nan() { String::new() } else { format!(" = {value}") })]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// Input to the eigensolver failed the Hermiticity precondition.
    #[error("matrix is not Hermitian: max |m - m†| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// A Pauli correlation trace had a non-negligible imaginary part.
    #[error("Tr[ρ σ_{i}⊗σ_{j}] has imaginary part {imag:.3e} (> 1e-10)")]
    NonRealCorrelation { i: usize, j: usize, imag: f64 },

    /// The T-matrix fidelity formula requires diagonal T with det T < 0.
    #[error("T-matrix fidelity formula does not apply: {reason}")]
    FormulaInapplicable { reason: String },

    /// A channel produced output violating density-matrix invariants.
    #[error("channel output violates density-matrix invariants: {reason}")]
    ChannelOutputInvalid { reason: String },

    /// Kraus operators do not sum to the identity under the †-product.
    #[error("Kraus operators are not trace preserving: max |ΣM†M - I| = {deviation:.3e}")]
    NotTracePreserving { deviation: f64 },

    /// A matrix failed the density-matrix invariants on construction.
    #[error("not a density matrix: {reason}")]
    InvalidDensityMatrix { reason: String },

    /// Numeric and analytic F* disagree beyond the regression threshold.
    #[error("SDP/analytic F* discrepancy {discrepancy:.3e} exceeds {limit:.1e} at (p, α²) = ({p}, {alpha2})")]
    SolverRegression {
        p: f64,
        alpha2: f64,
        discrepancy: f64,
        limit: f64,
    },
}
