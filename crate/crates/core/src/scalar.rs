//! Scalar backends for the exterior algebra.
//!
//! Everything downstream is generic over [`Scalar`]: `GaussRat` is a complex
//! number with rational real and imaginary parts and admits no rounding at
//! all; [`Cf64`] is `num_complex::Complex<f64>` for chart evaluation, where
//! comparisons must go through an explicit tolerance.

use alloc::string::String;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, ToPrimitive, Zero};

/// Complex double scalar used by the chart (numeric) backend.
pub type Cf64 = num_complex::Complex<f64>;

/// Field operations shared by the exact and floating backends.
///
/// `EXACT` selects pivoting and zero-testing strategies in the linear
/// algebra: exact scalars compare with `==` (and `Zero::is_zero`), floating
/// scalars only ever through `modulus()` against a tolerance.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Sub<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    /// Complex conjugate (identity on real scalars).
    fn conj(&self) -> Self;

    /// |z| as a double, used for pivot selection and residual reporting.
    fn modulus(&self) -> f64;

    /// Best-effort conversion for diagnostics.
    fn to_cf64(&self) -> Cf64;
}

/// Scalars containing the imaginary unit.
pub trait ComplexScalar: Scalar {
    fn i() -> Self;
}

impl Scalar for Cf64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        Cf64::new(n as f64, 0.0)
    }
    fn conj(&self) -> Self {
        num_complex::Complex::conj(self)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn to_cf64(&self) -> Cf64 {
        *self
    }
}

impl ComplexScalar for Cf64 {
    fn i() -> Self {
        Cf64::new(0.0, 1.0)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from(BigInt::from(n))
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn modulus(&self) -> f64 {
        self.to_f64().map(|x| Float::abs(x)).unwrap_or(f64::NAN)
    }
    fn to_cf64(&self) -> Cf64 {
        Cf64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

/// Gaussian rational: `re + im*i` with arbitrary-precision rational parts.
#[derive(Clone, PartialEq, Eq)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat {
            re,
            im: BigRational::zero(),
        }
    }

    /// `p/q` as a real Gaussian rational.
    pub fn ratio(p: i64, q: i64) -> Self {
        GaussRat::real(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// |z|^2, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: GaussRat) -> GaussRat {
        GaussRat {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: GaussRat) -> GaussRat {
        GaussRat {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: GaussRat) -> GaussRat {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        GaussRat { re, im }
    }
}

impl Div for GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: GaussRat) -> GaussRat {
        let d = rhs.norm_sqr();
        assert!(!d.is_zero(), "division by zero Gaussian rational");
        let re = (&self.re * &rhs.re + &self.im * &rhs.im) / &d;
        let im = (&self.im * &rhs.re - &self.re * &rhs.im) / &d;
        GaussRat { re, im }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::real(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::real(BigRational::one())
    }
}

impl Scalar for GaussRat {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        GaussRat::real(BigRational::from(BigInt::from(n)))
    }
    fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }
    fn modulus(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::NAN);
        let im = self.im.to_f64().unwrap_or(f64::NAN);
        Float::sqrt(re * re + im * im)
    }
    fn to_cf64(&self) -> Cf64 {
        Cf64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl ComplexScalar for GaussRat {
    fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }
}

/// Renders a rational as `p/q` (or `p` when the denominator is 1), the
/// format used by every file schema in this workspace.
pub fn rational_string(r: &BigRational) -> String {
    use alloc::format;
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
