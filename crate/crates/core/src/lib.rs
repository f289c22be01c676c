//! Geometrically nonlinear Kirchhoff-Love shells on NURBS patches.
//!
//! The crate is organised bottom-up: [`splines`] evaluates the discretisation,
//! [`kinematics`] turns positions into surface measures, [`constitutive`] holds
//! the membrane and bending laws, [`assembly`] and [`solver`] build and solve the
//! discrete equilibrium, [`verifier`] checks the laws on exact deformations, and
//! [`bench`] drives the benchmark problems.

pub mod assembly;
pub mod bench;
pub mod constitutive;
pub mod kinematics;
pub mod solver;
pub mod splines;
pub mod verifier;
