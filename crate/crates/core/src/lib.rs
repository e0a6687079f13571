//! Spectral singularities of two-channel point-interaction Hamiltonians.
//!
//! The Hamiltonian couples a lower channel (threshold 0) and an upper channel
//! (threshold 1) through a zero-range interaction with parameters
//! (theta0, theta1 = theta1_0 + c eps, b eps). Its resolvent has a rank-two
//! correction whose denominator D_eps(z) vanishes at eigenvalues and, after
//! continuation through the cut [0, inf), at resonances.
//!
//! * [`riemann`]: two-sheeted sqrt and ln, Green's functions, H0^(1).
//! * [`dispersion`]: D_eps, the Gamma matrix, resolvent kernel.
//! * [`rootfinder`]: fixed-point recursions, Newton, real-axis bisection.
//! * [`asymptotics`]: small-eps expansions and remainder-order fits.
//! * [`cli`]: the `resonance-solver` command line.

pub mod asymptotics;
pub mod cli;
pub mod dispersion;
pub mod error;
pub mod riemann;
pub mod rootfinder;

pub use dispersion::{Channel, ModelParams};
pub use error::{Error, Result};
pub use riemann::{Dimension, Sheet, SheetPoint};
pub use rootfinder::{Regime, Singularity};
