//! Simulator and diagnostics laboratory for vectorial Allen-Cahn (Ginzburg-Landau)
//! systems whose potential vanishes on a pair of disjoint hypersurfaces in the
//! target space.
//!
//! The crate provides the target-space geometry (well manifolds, potential,
//! quasi-distance), the one-dimensional connection problems (surface tension,
//! optimal profile, minimal connections), analytic mean-curvature-flow
//! interfaces with their extended normal/curvature fields, the well-prepared
//! initial data construction, an explicit/IMEX finite-difference solver, and
//! the modulated-energy diagnostics used to observe the sharp-interface limit
//! at desk scale.

pub mod config;
pub mod contour;
pub mod diagnostics;
pub mod grid;
pub mod harness;
pub mod initial_data;
pub mod interface_geometry;
pub mod num_util;
pub mod pde_solver;
pub mod potential;
pub mod profile_1d;
pub mod sweep;
pub mod target_manifold;

pub use potential::Potential;
pub use profile_1d::ProfileTable;
pub use target_manifold::ManifoldPair;
