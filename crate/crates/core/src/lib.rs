//! Entanglement classification of multiqubit pure states through the
//! structure of partially transposed density operators.
//!
//! A state's global partial transpose with respect to one qubit splits into
//! K-way pieces. The 2x2 amplitude minors ("negativity fonts") that feed each
//! piece determine the negativity, and their pattern in a canonical state
//! fixes the entanglement class.
//!
//! ```
//! use negafont::{classify3, parse_state, ClassLabel};
//!
//! let ghz = parse_state("|000> + |111>").unwrap();
//! let report = classify3(&ghz, 1e-10).unwrap();
//! assert_eq!(report.class, ClassLabel::CII);
//! ```

pub mod canonical;
pub mod classify;
pub mod error;
pub mod fonts;
pub mod ketparse;
pub mod matrix;
pub mod negativity;
mod optimize;
pub mod ptranspose;
pub mod qstate;
pub mod report;

pub use canonical::{
    canonicalize, canonicalize3, canonicalize_heuristic, cluster_invariant, objective, slocc_reduce, CanonicalForm,
    HeuristicOptions, Objective,
};
pub use classify::{
    classify, classify3, classify4, count_classes, gpt_signature, three_tangle, ClassLabel, ClassReport,
    ClassifyOptions, GptSignature,
};
pub use error::{Error, Result};
pub use fonts::{enumerate_fonts, font_census, font_total_identity, FontCensus, NegativityFont};
pub use ketparse::{parse_ket, parse_lines, parse_state, KetExpression, ParseError};
pub use matrix::CMatrix;
pub use negativity::{eigvals_hermitian, global_negativity, kpt_negativity, negativity_of};
pub use ptranspose::{decomposition_residual, global_pt, kway_pt};
pub use qstate::{
    apply_all, apply_local, density, make_state, permute_qubits, random_lu_disguise, random_state, BasisIndex,
    DensityOperator, LocalOperator, OpKind, PureState,
};
