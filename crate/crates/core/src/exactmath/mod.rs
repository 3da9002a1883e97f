//! Exact rationals, real quadratic fields, integer lattices and exact
//! linear feasibility.

mod lattice;
mod lp;
mod quad;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use lattice::{gcd_with_coefficients, hnf, lattice_saturation, left_kernel, Lattice};
pub use lp::{max_support_zero_combo, strictly_positive_zero_combo, to_primitive_integers, zero_combo_with_bounds};
pub use quad::{denominator_lcm, is_square, qnum_inv, qnum_mul, qnum_sign, squarefree_core, QuadNum};

pub type Rat = BigRational;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

pub fn int_vec(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}
