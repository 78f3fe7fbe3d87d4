//! Inner and outer conic approximations of quantum testing regions.
//!
//! A measurement with effects `π₁..πₙ` maps states to probability vectors; a
//! family of states `ρ₁..ρₙ` maps effects to vectors of probabilities. The
//! images are bracketed by closed-form bodies:
//!
//! * [`EllipsoidApprox`]: hyper-ellipsoids `E_r` for measurements, with `E_1`
//!   enclosing and `E_{d−1}` enclosed in the image of the state space.
//! * [`DConeApprox`]: elliptical d-cones for state families, the convex hull
//!   of one ellipsoidal slice per effect trace `k = 0..d`.
//!
//! [`simulability`] compares these bodies with the convex hull of observed
//! probability vectors, and [`verify`] checks the inclusions by sampling.

pub mod ensemble;
pub mod error;
pub mod hull;
pub mod io;
pub mod operator;
pub mod region;
pub mod sample;
pub mod simulability;
pub mod tolerance;
pub mod verify;

pub use ensemble::{builtin, make_mub, make_sic, Ensemble, EnsembleKind, ValidationReport, BUILTIN_NAMES};
pub use error::{Error, Result};
pub use hull::{hull_facets, HalfSpace, HullFacets};
pub use io::{CloudFile, EnsembleFile};
pub use operator::{CMatrix, CVector, HermitianOperator, PinvFactorization};
pub use region::{DConeApprox, EllipsoidApprox, MembershipReport, Verdict};
pub use simulability::{
    dcone_in_hull, ellipsoid_in_hull, ContainmentCertificate, ContainmentMethod, ContainmentMode,
    ContainmentOptions, ContainmentVerdict, ProbabilityCloud, Witness,
};
pub use tolerance::Tolerances;
pub use verify::{DConeOracle, OracleOutcome, VerificationStats};
