//! Van der Waerden complexes: the simplicial complex vdW(n,k) whose faces are
//! the subsets of (k+1)-term arithmetic progressions in [1,n], together with
//! discrete Morse matchings on it, an exact integer homology oracle, and the
//! number theory behind the contractibility bounds.
//!
//! ```
//! use vdw::{build_minimal_matching, enumerate_faces, reduced_homology};
//!
//! let fs = enumerate_faces(10, 2).unwrap();
//! let homology = reduced_homology(&fs);
//! assert_eq!(homology.betti, vec![0, 7, 0]); // a wedge of 7 circles
//!
//! let report = build_minimal_matching(&fs).unwrap();
//! assert_eq!(report.morse_vector.count(1), 7); // realized by 7 critical edges
//! ```

pub mod complex;
pub mod face;
pub mod gamma;
pub mod homology;
pub mod morse;
pub mod number_theory;

pub use complex::{
    d_set, decompose, enumerate_faces, facets, fiber_key, gcdtr, is_face, step_set, ApFacet,
    ComplexError, FaceSet, FiberKey,
};
pub use face::{Face, FaceError};
pub use gamma::{
    gamma, gamma_contains, gamma_partner, gamma_partner_choosing, match_gamma, mobius_via_gamma,
    squarefree_critical_cell, GammaError, GammaFamily, GammaMatching, PrimeChoice,
};
pub use homology::{
    boundary_matrix, reduced_homology, smith_normal_form, BettiReport, BoundaryMatrix,
};
pub use morse::{
    build_contraction_matching, build_fiber_matching, build_minimal_matching, critical_cells,
    morse_inequalities_check, parse_matching, patchwork, verify_matching, verify_pairs,
    write_matching, MatchingParseError, MatchingViolation, MorseError, MorseMatching, MorseVector,
    StrategyReport,
};
pub use number_theory::{
    asymptotic_ratio, bound_certificate, contractibility_witness, factorize, is_squarefree,
    lm_monotone_check, mobius, nth_primorial, primorial, r_of_k, radical, BoundCertificate,
    NtError,
};
