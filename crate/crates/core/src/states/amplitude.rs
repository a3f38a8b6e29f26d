use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    ExactInteger,
    ExactRational,
    ComplexFloat,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::ExactInteger => "exact-integer",
            Backend::ExactRational => "exact-rational",
            Backend::ComplexFloat => "complex-float",
        }
    }
}

/// Scalar stored in a [`PureState`](super::PureState) or
/// [`LocalOperator`](crate::slocc::LocalOperator).
///
/// Integer arithmetic is checked: an overflow is a hard error rather than a
/// silently wrong certificate.
pub trait Amplitude: Clone + PartialEq + Debug + Send + Sync + 'static {
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    fn try_add(&self, rhs: &Self) -> Result<Self>;
    fn try_mul(&self, rhs: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn magnitude(&self) -> f64;
    /// Real and (nonzero) imaginary parts in dump syntax.
    fn render(&self) -> (String, Option<String>);
    fn parse(re: &str, im: Option<&str>) -> Result<Self>;

    fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.try_add(&rhs.neg())
    }
}

/// Exact amplitudes, convertible to rationals for elimination.
pub trait ExactAmplitude: Amplitude {
    fn to_rational(&self) -> BigRational;
}

fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub(crate) fn render_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl Amplitude for i64 {
    const BACKEND: Backend = Backend::ExactInteger;

    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(*rhs).ok_or(Error::Overflow)
    }
    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(*rhs).ok_or(Error::Overflow)
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn magnitude(&self) -> f64 {
        self.unsigned_abs() as f64
    }
    fn render(&self) -> (String, Option<String>) {
        (format!("{self}/1"), None)
    }
    fn parse(re: &str, im: Option<&str>) -> Result<Self> {
        if im.is_some_and(|s| !parse_ratio(s).map(|r| Zero::is_zero(&r)).unwrap_or(false)) {
            return Err(Error::Parse("imaginary part on an integer amplitude".into()));
        }
        let r = parse_ratio(re)?;
        if !r.is_integer() {
            return Err(Error::Parse(format!("{re:?} is not an integer")));
        }
        r.to_integer()
            .to_i64()
            .ok_or_else(|| Error::Parse(format!("{re:?} does not fit in i64")))
    }
}

impl ExactAmplitude for i64 {
    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(*self))
    }
}

impl Amplitude for BigRational {
    const BACKEND: Backend = Backend::ExactRational;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn try_add(&self, rhs: &Self) -> Result<Self> {
        Ok(self + rhs)
    }
    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        Ok(self * rhs)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn render(&self) -> (String, Option<String>) {
        (render_ratio(self), None)
    }
    fn parse(re: &str, im: Option<&str>) -> Result<Self> {
        if let Some(im) = im {
            if !Zero::is_zero(&parse_ratio(im)?) {
                return Err(Error::Parse("imaginary part on a rational amplitude".into()));
            }
        }
        parse_ratio(re)
    }
}

impl ExactAmplitude for BigRational {
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
}

impl Amplitude for Complex64 {
    const BACKEND: Backend = Backend::ComplexFloat;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn try_add(&self, rhs: &Self) -> Result<Self> {
        Ok(self + rhs)
    }
    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        Ok(self * rhs)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn render(&self) -> (String, Option<String>) {
        let im = (self.im != 0.0).then(|| format!("{:e}", self.im));
        (format!("{:e}", self.re), im)
    }
    fn parse(re: &str, im: Option<&str>) -> Result<Self> {
        let f = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .or_else(|_| parse_ratio(s).map(|r| r.to_f64().unwrap_or(f64::NAN)))
                .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
        };
        Ok(Complex64::new(f(re)?, im.map(f).transpose()?.unwrap_or(0.0)))
    }
}
