//! Strength computation for weighted bipolar argumentation graphs.
//!
//! Arguments carry an initial weight in `[0,1]` and are connected by attack
//! and support edges. Each semantics model turns a graph into a continuous
//! dynamical system whose equilibrium assigns every argument a final
//! strength; this crate bundles the graph model and text format
//! ([`bag`], [`mod@format`]), the semantics ([`semantics`]), fixed-step
//! Euler/RK4 integration with convergence and oscillation monitoring
//! ([`solver`]), an exact linear-time pass for acyclic graphs ([`acyclic`]),
//! seeded generators ([`generator`]) and a benchmark harness
//! ([`mod@bench`]).
//!
//! ```
//! use wbag::{acyclic, parse_bag, Model};
//!
//! let bag = parse_bag("arg(a,0.7). arg(b). att(a,b).").unwrap();
//! let equilibrium = acyclic::acyclic_equilibrium(Model::QuadraticEnergy, &bag).unwrap();
//! assert!(equilibrium.values[1] < 0.5); // b is weakened by the attack
//! ```

pub mod acyclic;
pub mod bag;
pub mod bench;
pub mod format;
pub mod generator;
pub mod semantics;
pub mod solver;

pub use bag::{fixture, weight_from_counts, Argument, Bag, BagBuilder, BagError, Fixture};
pub use format::{parse_bag, serialize_bag};
pub use semantics::{Model, StateVector};
pub use solver::{
    integrate, integrate_with_refinement, Method, SolverConfig, SolverError, SolverResult, Status,
};
