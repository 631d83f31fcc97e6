//! Rigidity analysis for bar and tensegrity frameworks.
//!
//! The crate is organised bottom-up:
//!
//! * [`framework`]: graphs, embeddings and the member-constraint polynomials.
//! * [`rigidity`]: Jacobians, rigidity/incidence matrices, nullspaces, rigid
//!   motions, the moving frame and weighted-Laplacian spectra.
//! * [`prestress`]: self stresses, stress and stiffness matrices and the
//!   prestress certificate.
//! * [`continuation`]: complex polynomial systems, predictor-corrector path
//!   tracking, total-degree solving, deformation exploration and the
//!   ε-local rigidity check.
//!
//! All randomness is drawn from seeded ChaCha streams so every entry point is
//! reproducible given its seed.

pub mod continuation;
pub mod error;
pub mod framework;
pub mod linalg;
pub mod prestress;
pub mod rigidity;

pub use error::{Error, Result};
pub use framework::{
    evaluate_members, load_framework, Configuration, Framework, FrameworkGraph, Member,
    MemberConstraintSystem, MemberEvaluation, MemberKind,
};
