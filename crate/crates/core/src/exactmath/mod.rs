//! Exact arithmetic substrate: big rationals, integer matrix normal forms,
//! and cone-membership decisions with certificates.

pub mod cone;
pub mod matrix;
pub mod rational;

pub use cone::{cone_contains, verify_inside, verify_outside, ConeDecision};
pub use matrix::{smith_normal_form, solve_square, IntMatrix, SnfResult};
pub use rational::{
    ceil_int, floor_int, format_rat, frac_part, is_integer, is_nonneg_integer, parse_rat, rat,
    rat_int, Rat,
};
