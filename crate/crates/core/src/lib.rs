//! Exact computation in Thompson's group F, realized as piecewise-linear
//! homeomorphisms of `[0, ∞)` with dyadic breakpoints and power-of-two
//! slopes, plus the machinery to build and verify marked generating pairs
//! whose markings approach the rank-2 free group: a modified pair
//! `(X0(m, b), X1(m, b))` that still generates F while satisfying no short
//! relation.
//!
//! Modules:
//! - [`dyadic`]: exact arithmetic on `a/2^e`
//! - [`plmap`]: the group elements as breakpoint tables, with composition,
//!   inversion, supports and agreement regions
//! - [`words`]: free words, reduction, enumeration, parsing, evaluation
//! - [`normalform`]: the rewriting engine for the infinite presentation
//! - [`construct`]: the standard generators, block chains and the modified
//!   pair with its word tower
//! - [`verify`]: word-pair equalities, support separation, escape bounds,
//!   exhaustive ball scans, ping-pong certificates, coverage and distance
//!   bounds

pub mod construct;
pub mod dyadic;
pub mod normalform;
pub mod plmap;
pub mod verify;
pub mod words;

pub use construct::{build_generators, std_x, GeneratorSet, Params};
pub use dyadic::Dyadic;
pub use plmap::{Interval, PLMap, Side};
pub use words::{Alphabet, Word};
