// Negated comparisons are how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod ed;
pub mod oracle;
pub mod run;
