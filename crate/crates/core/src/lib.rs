//! Semiclassical tunneling in a symmetric four-well potential.
//!
//! Two double-well coordinates `p`, `q` coupled through
//! `V = b_p(p²−1)²/8 + b_q(q²−1)²/8 + c(p²−1)(q²−1)/4`. The crate covers the
//! whole instanton pipeline:
//!
//! - [`model`]: parameters, validity region, critical points, normal modes.
//! - [`classical`]: instanton trajectories (diagonal `R`, edge `P`/`Q`),
//!   actions, energy and zero-mode diagnostics, and a Newton BVP solver.
//! - [`fluctuations`]: rotated-frame fluctuation operators, Gelfand–Yaglom
//!   and Pöschl–Teller determinants, primed determinants, stability.
//! - [`gas`]: the three-flavor dilute instanton gas on the four-well graph:
//!   spectrum, amplitudes, real-time well populations.
//! - [`schrodinger`]: finite-difference diagonalization of the 2D Hamiltonian,
//!   used as an independent check on the splittings.
//! - [`composite`]: mapping a 1D diatomic molecule onto the model.
//!
//! ```
//! use fourwell::{classical, model::EqualParams};
//!
//! let eq = EqualParams::new(6.0, -0.2).unwrap();
//! let s = classical::action_r_closed(&eq).unwrap();
//! assert!((s - 6.196773).abs() < 1e-6);
//! ```

pub mod classical;
pub mod cli;
pub mod composite;
pub mod error;
pub mod fluctuations;
pub mod gas;
pub mod linalg;
pub mod model;
pub mod schrodinger;
pub mod special;

pub use error::{Error, Result};
pub use model::{EqualParams, SystemParams};
