//! Small numeric helpers shared by the demapper and the Log-MAP decoder.

use crate::Scalar;

/// Numerically stable `log(sum(exp(x)))` over a slice.
///
/// Returns `-inf` for an empty slice or when every entry is `-inf`.
pub fn log_sum_exp<S: Scalar>(xs: &[S]) -> S {
    let max = xs
        .iter()
        .copied()
        .fold(S::neg_infinity(), |a, b| if b > a { b } else { a });
    if !max.is_finite() {
        return max;
    }
    let sum = xs
        .iter()
        .fold(S::zero(), |acc, &x| acc + (x - max).exp());
    max + sum.ln()
}

/// Stable two-argument version, the inner loop workhorse.
pub fn lse2<S: Scalar>(a: S, b: S) -> S {
    if a == S::neg_infinity() {
        return b;
    }
    if b == S::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (S::one() + (lo - hi).exp()).ln()
}
