//! Component type abstraction for embedding vectors.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::Float;

/// Real scalar usable as a vector component.
///
/// Implemented for `f32` and `f64`. Parsing goes through [`FromStr`] so that
/// every decimal or scientific literal accepted by the standard library is
/// accepted in vector files.
pub trait Scalar: Float + FromStr + Display + Debug + Sum + Default + Send + Sync + 'static {
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from(v).unwrap_or_else(Self::nan)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Dot product with strict left-to-right accumulation.
///
/// Summation order is fixed so that scores are reproducible bit for bit.
#[inline]
pub fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

/// Euclidean norm, `sqrt(dot(v, v))`.
#[inline]
pub fn norm<T: Scalar>(v: &[T]) -> T {
    dot(v, v).sqrt()
}

/// Formats a value like C's `%g` with six significant digits.
///
/// This is the textual form used by the vector writer: trailing zeros are
/// stripped, and scientific notation is used for exponents below -4 or at
/// least 6.
pub fn format_g6<T: Scalar>(value: T) -> String {
    let v = value.to_f64_lossy();
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    // `{:.5e}` rounds to six significant digits and yields the decimal exponent
    // after rounding, which is what %g bases its choice on.
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
