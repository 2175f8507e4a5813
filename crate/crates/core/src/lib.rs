//! Null wave fronts in Lorentz-Minkowski space built from Euclidean
//! generating hypersurfaces.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtins;
pub mod cli;
pub mod completion;
pub mod diff;
pub mod frontgen;
pub mod geometry;
pub mod jet;
pub mod lorentz;
pub mod singular;
