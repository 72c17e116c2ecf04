//! Separatrix structure of monic centered polynomial vector fields `dz/dt = P(z)`,
//! their analytic invariants, and the combinatorics of homoclinic bifurcations.

pub mod combin;
pub mod disk;
pub mod error;
pub mod field;
pub mod gen;
pub mod invariants;
pub mod io;
pub mod ode;
pub mod poly;
pub mod quad;
pub mod realize;
pub mod tracer;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use poly::{classify, from_roots, roots, EquilibriumPoint, Kind, Polynomial, RootSet};
