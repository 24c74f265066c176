//! Discrete-time quantum walks on a line used as generalized qubit measurements.
//!
//! The walker's coin is the measured qubit and its final position is the
//! measurement outcome. This crate simulates such walks ([`walk`]), extracts
//! the POVM a walk realizes ([`povm`]), compiles rank-1 and merged rank-2
//! POVMs into walks ([`synthesis`]), and provides seeded outcome sampling
//! ([`sampling`]) and linear-inversion tomography ([`tomography`]).
//!
//! ```
//! use qwalk_core::{build_usd, extract_povm, usd_states, DensityMatrix, outcome_probabilities};
//!
//! let theta = std::f64::consts::FRAC_PI_3;
//! let usd = build_usd(theta).unwrap();
//! let povm = extract_povm(&usd.program).unwrap();
//! let (plus, _) = usd_states(theta);
//! let probs = outcome_probabilities(&povm, &DensityMatrix::pure(&plus).unwrap()).unwrap();
//! assert!(probs[&-1] < 1e-12); // never wrongly concludes "minus"
//! ```

pub mod error;
pub mod linalg;
pub mod povm;
pub mod random;
pub mod sampling;
pub mod synthesis;
pub mod tomography;
pub mod walk;

pub use error::{Error, Result};
pub use linalg::{
    adjoint, herm_eigvals, is_psd, is_unitary, orthogonal_complement, Coin, CoinState, Mat2,
    ARITHMETIC_TOL, STRUCTURAL_TOL,
};
pub use num_complex::Complex64;
pub use povm::{
    extract_povm, extract_povm_reverse, kraus_operator, outcome_probabilities, support_positions,
    validate_povm, DensityMatrix, PovmElement, PovmSet, ValidationReport,
};
pub use sampling::{sample_outcomes, sample_outcomes_sharded, SampleReport};
pub use synthesis::{
    build_sic, build_usd, choose_theta, compute_phi_prime, make_c1, make_c2, merge_rank2,
    sic_complements, sic_spec, sic_states, synthesize, synthesize_traced, usd_states,
    validate_spec, StageReport, SynthesisResult, TargetElement, TargetPovmSpec,
};
pub use tomography::{reconstruct_state, trace_distance, TomographyResult};
pub use walk::{
    apply_coin_layer, position_distribution, run, run_reverse, run_traced, step, translate,
    translate_inverse, CoinLayer, WalkProgram, WalkState,
};
