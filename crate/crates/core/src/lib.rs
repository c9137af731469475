//! Coherent-state matrix elements of linear symplectic propagators.
//!
//! Exact and semiclassical elements `<X1|U^t|X2>` for hyperbolic cat maps on the
//! torus and for quadratic Hamiltonian flows in the plane. The semiclassical
//! layer offers four approximations ([`Method::Sc1`], [`Method::Sc2`],
//! [`Method::Sc3`], [`Method::Sc3Lin`]); the exact layer offers the Hannay-Berry
//! propagator on the torus and a number-basis propagator in the plane.
//!
//! Conventions: phase-space points are `(p, q)`, `J = [[0,-1],[1,0]]`,
//! `a ∧ b = a_p b_q - a_q b_p`, and on the torus `hbar = 1/(2 pi N)`.

pub mod catmap;
pub mod cli;
pub mod error;
pub mod flows;
pub mod fock;
pub mod phase_space;
mod precise;
pub mod semiclassical;
pub mod torus;
pub mod weyl_ops;

pub use catmap::{CatMap, OrbitSegment};
pub use error::{Error, Result};
pub use flows::{FlowState, QuadraticHamiltonian};
pub use fock::FockTruncation;
pub use phase_space::{CMat2, FrameMatrixSet, HyperbolicFrame, Mat2, PhasePoint};
pub use semiclassical::{CSElement, LinearStep, Method};
pub use torus::{OperatorMatrix, TorusCoherentState, TorusHilbert};
pub use weyl_ops::{LatticeCenter, LatticeChord};

pub use num_complex::Complex64;
