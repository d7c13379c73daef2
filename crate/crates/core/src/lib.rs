//! Decision toolkit for blow-up (nonexistence) criteria of quasilinear
//! differential inequalities driven by a phi-Laplacian.
//!
//! The library is organized around a small expression DSL for positive scalar
//! functions ([`funcdsl`]), an exact leading-order calculus on power-log
//! scales ([`asymptotics`]), the eta-function machinery the criteria are
//! expressed through ([`eta`]), the criterion integrals and verdicts
//! ([`criteria`]), a radial barrier construction ([`barrier`]), and numeric
//! verification of explicit supersolution witnesses ([`radial_verify`]).

pub mod asymptotics;
pub mod barrier;
pub mod criteria;
pub mod eta;
pub mod funcdsl;
pub mod grid;
pub mod presets;
pub mod quad;
pub mod radial_verify;

// pub use criteria::{
//d
//d2
//};
pub use funcdsl::{parse_expression, Expression, MonotoneFunction};
