//! Tooling for the triangular-tensor (slice-rank) method on set families
//! with restricted intersections.
//!
//! * [`family`]: subsets of `[n]` as bit-vectors, lex order, families.
//! * [`profile`]: k-intersection profiles and family verification.
//! * [`transforms`]: complement replacement, trace, small-set normalization.
//! * [`linalg`]: exact rank over GF(p) and Q, triangularity certificates.
//! * [`tensors`]: the proof matrices and the slice decomposition.
//! * [`bounds`]: exact upper bounds with their hypotheses.
//! * [`search`]: exhaustive maximum-family search.
//! * [`workbench`]: batch experiments and the results ledger.
//!
//! ```
//! use trislice::{verify_family, IntersectionProfile, SetFamily};
//!
//! let f = SetFamily::from_lists(4, &[vec![1, 2], vec![1, 3], vec![2, 3]]).unwrap();
//! let alpha: IntersectionProfile = "mod:2:0|1".parse().unwrap();
//! assert!(verify_family(&f, &alpha).valid);
//! ```

pub mod bounds;
pub mod error;
pub mod family;
pub mod linalg;
mod par;
pub mod profile;
pub mod search;
pub mod tensors;
pub mod transforms;
pub mod workbench;

pub use bounds::{bound_report, BoundEntry, BoundReport, BoundStatus};
pub use error::{Error, Result};
pub use family::{GroundSize, Prime, SetFamily, Subset};
pub use linalg::{
    rank_exact, rank_mod_p, triangularity, ExactMatrix, ResidueMatrix, TriangularShape,
    TriangularityCertificate,
};
pub use profile::{
    verify_family, verify_liu_config, IntersectionProfile, LiuConfiguration, Mode,
    VerificationReport, Violation,
};
pub use search::{max_family, max_family_with, SearchBudget, SearchOptions, SearchOutcome};
pub use tensors::{slice_decompose, ProofTensor, SliceDecomposition};
pub use transforms::{complement_replace, shrink_small, trace, TraceResult};

/// Whether this build fans work out over a thread pool.
pub const fn parallel_enabled() -> bool {
    par::enabled()
}
