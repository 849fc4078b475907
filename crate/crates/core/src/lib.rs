//! Numerics for the Calogero–Moser derivative NLS equation
//! i∂_t u + ∂_xx u + 2D₊(|u|²)u = 0 on the Hardy space of the line.
//!
//! Chiral fields are stored by their Fourier samples on ξ_k = kΔξ ≥ 0. The
//! crate provides the conserved functionals ([`hardy`]), the Lax operator and
//! its bound states ([`lax`]), exact multi-solitons from poles or spectral data
//! ([`soliton`]), the pole ODE ([`pole_ode`]) and the PDE solver ([`pde`]).

pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod hardy;
pub mod io;
pub mod lax;
pub mod linalg;
pub mod pde;
pub mod pole_ode;
pub mod poly;
pub mod quadrature;
pub mod soliton;
pub mod spectral;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use field::{ChiralField, RealLineField, TWO_PI};
pub use grid::FrequencyGrid;
pub use hardy::Functionals;
pub use lax::{Extraction, LaxMatrix, SpectralData};
pub use pde::{EvolutionConfig, Method, Trajectory};
pub use pole_ode::{PoleState, PoleTrajectory, Termination};
pub use soliton::RationalSoliton;
pub use spectral::{Quadrature, Scheme};
