//! Exact rational helpers on top of `num-rational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Ratio = BigRational;

pub fn int(n: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Ratio {
    Ratio::new(BigInt::from(p), BigInt::from(q))
}

pub fn factorial(n: usize) -> Ratio {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    Ratio::from_integer(acc)
}

pub fn to_f64(x: &Ratio) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite double.
pub fn from_f64(x: f64) -> Result<Ratio> {
    Ratio::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("non-finite value {x}")))
}

/// Parses `"p/q"` or a bare integer.
pub fn parse(s: &str) -> Result<Ratio> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Ratio::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Ratio::from_integer(p))
        }
    }
}

/// Formats as `"p/q"` in lowest terms, always with a denominator.
pub fn format(x: &Ratio) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn sum<'a, I: IntoIterator<Item = &'a Ratio>>(it: I) -> Ratio {
    it.into_iter().fold(Ratio::zero(), |acc, x| acc + x)
}
