//! Exact Fourier coefficients of Ikeda lifts over the rationals.
//!
//! The crate computes, without floating point, the Fourier coefficients of
//! the lift of a level-one elliptic eigenform of weight `2κ` to a Siegel cusp
//! form of degree `2n` and weight `κ + n`:
//!
//! ```text
//! a(T) = c(|d_T|) · f_T^(κ-1/2) · ∏_p F̃_p(T, α_p)
//! ```
//!
//! together with every ingredient (plus-space coefficients `c`, local Siegel
//! series `F_p`, Satake data `α_p`) and a set of independent oracles
//! (local density counts, the Maass relation, theta series of the two even
//! unimodular lattices of rank 16).

pub mod arith;
pub mod elliptic;
pub mod error;
pub mod kohnen;
pub mod lift;
pub mod quadform;
pub mod report;
pub mod siegel;
pub mod theta;

pub use arith::{Int, Rat};
pub use error::{Error, Result};
pub use report::Report;
