//! Minimal field abstraction so the polynomial coefficient formulas can be
//! evaluated both at real parameters and at complex scaled parameters (the
//! latter is what the order-projection oracle needs).

use num_complex::Complex64 as C64;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + From<f64>
{
    fn sqrt(self) -> Self;
}

impl Scalar for f64 {
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

impl Scalar for C64 {
    fn sqrt(self) -> Self {
        C64::sqrt(self)
    }
}

/// Horner evaluation of `c[0] + c[1] t + c[2] t^2 + ...`.
pub fn horner<S: Scalar>(c: &[S], t: S) -> S {
    c.iter().rev().fold(S::from(0.0), |acc, &ck| acc * t + ck)
}

/// Product of two coefficient vectors.
pub fn poly_mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = vec![S::from(0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = out[i + j] + ai * bj;
        }
    }
    out
}
