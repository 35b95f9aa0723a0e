//! Exact rationals, arbitrary-precision floats and named constants shared by
//! the rest of the crate.

pub mod constants;
pub mod float;
pub mod rational;

pub use constants::{constant_lookup, ConstantTable, NamedConstant};
pub use float::{bits_for_digits, float_render, float_to_rational, rational_to_float, BigFloat, BoundedValue};
pub use rational::{
    decimal_exponent, decimal_len, decimal_render, decimal_truncate, format_rational, parse_decimal,
    parse_rational, pochhammer, pow10,
    BigRational, DecimalInput,
};
