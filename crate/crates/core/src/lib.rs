//! Eigenvalues and resonances of even polynomial oscillators
//! `V(x) = sum v_j x^(2j)` by the Riccati-Pade method.
//!
//! The Taylor coefficients of the regularized logarithmic derivative of the
//! wavefunction ([`series`]) fill Hankel determinants ([`hankel`]) whose roots
//! in `E` converge to the spectrum as the dimension grows ([`solver`]).
//! Everything runs in MPFR/MPC arithmetic at caller-controlled precision
//! ([`precision`]); small determinants are also available exactly
//! ([`symbolic`]).

pub mod error;
pub mod hankel;
pub mod models;
pub mod poly;
pub mod potential;
pub mod precision;
pub mod scan;
pub mod series;
pub mod solver;
pub mod symbolic;
pub mod text;

pub use error::{Error, Result};
pub use hankel::{HankelIndex, HankelMethod, HankelTable, HankelValue};
pub use poly::RationalPolynomial;
pub use potential::{Parity, PolynomialPotential};
pub use precision::PrecisionPolicy;
pub use series::SeriesCoefficients;
pub use solver::{EnergyEstimate, Resonance, RootSequence, SlopeFit, Tracker};
