//! Sums of squares, Dubouis exceptional sets and the functional equation
//! `f(x_1^2 + ... + x_k^2) = f(x_1)^2 + ... + f(x_k)^2` for multiplicative `f`.

pub mod arith;
pub mod funcsolve;
pub mod repr;
pub mod theorem;
