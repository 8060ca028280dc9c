//! Two identical three-level atoms (V, Ξ or Λ configuration) coupled to a
//! single quantized cavity mode and driven by a classical field.
//!
//! A displacement of the field by `γ = λ/g` removes the classical drive, so
//! the dynamics reduce to a generalized Jaynes–Cummings model whose
//! excitation manifolds have closed-form solutions. This crate provides
//!
//! * the closed-form amplitudes and the assembled joint state ([`amplitudes`]),
//! * an independent brute-force path: explicit Hamiltonian matrices, an RK4
//!   Schrödinger integrator and a numerical displacement operator ([`oracle`]),
//! * reduced density matrices and the partial transpose ([`density`]),
//! * von Neumann entropy, negativity, the Mandel parameter and quadrature
//!   squeezing ([`measures`]),
//! * a scenario runner behind the `qutrit-cavity` binary ([`scenario`]).

pub mod amplitudes;
pub mod density;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod model;
pub mod oracle;
pub mod scenario;

pub use error::{Error, Result};
pub use model::{AtomicConfiguration, ConfigKind, Frame, JointState, SystemParams};
