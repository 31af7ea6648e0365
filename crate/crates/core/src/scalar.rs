//! Exact scalars: the Gaussian rationals `Q(i)` and the Gaussian integers `Z[i]`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An element `re + i·im` of `Q(i)`, both parts reduced rationals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(n.into()))
    }

    /// `num/den` as a real number. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(num.into(), den.into()))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self { re: BigRational::zero(), im: BigRational::one() }
    }

    /// `c·i` for rational `c`.
    pub fn imag(im: BigRational) -> Self {
        Self { re: BigRational::zero(), im }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        let n = self.norm_sqr();
        Self { re: &self.re / &n, im: -(&self.im / &n) }
    }

    /// Integer power, negative exponents allowed for nonzero values.
    pub fn powi(&self, e: i32) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    /// Multiplies by `scale` (which must clear both denominators) and returns the Gaussian integer.
    pub fn to_gauss_int(&self, scale: &BigInt) -> GaussInt {
        let re = &self.re * BigRational::from_integer(scale.clone());
        let im = &self.im * BigRational::from_integer(scale.clone());
        debug_assert!(re.is_integer() && im.is_integer());
        GaussInt { re: re.to_integer(), im: im.to_integer() }
    }

    /// Nearest `f64` approximation of the real part.
    pub fn re_f64(&self) -> f64 {
        rational_to_f64(&self.re)
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(q: BigRational) -> Self {
        Self::real(q)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: GaussianRational) -> GaussianRational {
        GaussianRational { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        if !rhs.re.is_zero() {
            self.re += &rhs.re;
        }
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: GaussianRational) -> GaussianRational {
        GaussianRational { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        if !rhs.re.is_zero() {
            self.re -= &rhs.re;
        }
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        match (self.im.is_zero(), rhs.im.is_zero()) {
            (true, true) => GaussianRational::real(&self.re * &rhs.re),
            (true, false) => GaussianRational { re: &self.re * &rhs.re, im: &self.re * &rhs.im },
            (false, true) => GaussianRational { re: &self.re * &rhs.re, im: &self.im * &rhs.re },
            (false, false) => GaussianRational {
                re: &self.re * &rhs.re - &self.im * &rhs.im,
                im: &self.re * &rhs.im + &self.im * &rhs.re,
            },
        }
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: GaussianRational) -> GaussianRational {
        &self * &rhs
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self * &rhs.inv()
    }
}

impl Div for GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: GaussianRational) -> GaussianRational {
        &self / &rhs
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}i", self.re, -&self.im)
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An element of `Z[i]`, used by the fraction-free eliminator.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn mul(&self, rhs: &GaussInt) -> GaussInt {
        if self.is_zero() || rhs.is_zero() {
            return GaussInt::default();
        }
        GaussInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    pub fn sub(&self, rhs: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }

    /// Exact division in `Z[i]`; panics in debug builds when `rhs` does not divide `self`.
    pub fn div_exact(&self, rhs: &GaussInt) -> GaussInt {
        let n = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        let re = &self.re * &rhs.re + &self.im * &rhs.im;
        let im = &self.im * &rhs.re - &self.re * &rhs.im;
        debug_assert!((&re % &n).is_zero() && (&im % &n).is_zero(), "inexact Z[i] division");
        GaussInt { re: re / &n, im: im / n }
    }

    /// Divides both parts by a rational integer that divides them.
    pub fn div_int(&self, k: &BigInt) -> GaussInt {
        GaussInt { re: &self.re / k, im: &self.im / k }
    }

    /// gcd of the real and imaginary parts (a rational integer).
    pub fn int_content(&self) -> BigInt {
        self.re.gcd(&self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = GaussianRational::new(BigRational::new(1.into(), 2.into()), BigRational::from_integer(3.into()));
        let b = GaussianRational::new(BigRational::from_integer((-2).into()), BigRational::new(1.into(), 3.into()));
        let prod = &a * &b;
        assert_eq!(&(&prod / &b) - &a, GaussianRational::zero());
        assert_eq!(&GaussianRational::i() * &GaussianRational::i(), GaussianRational::from_int(-1));
        assert_eq!(a.conj().conj(), a);
        assert_eq!(format!("{}", GaussianRational::ratio(-1, 8)), "-1/8");
        assert_eq!(format!("{}", GaussianRational::i()), "1i");
    }

    #[test]
    fn powers() {
        let h = GaussianRational::ratio(1, 2);
        assert_eq!(h.powi(-3), GaussianRational::from_int(8));
        assert_eq!(h.powi(0), GaussianRational::one());
    }

    #[test]
    fn gauss_int_division() {
        let a = GaussInt { re: 3.into(), im: 4.into() };
        let b = GaussInt { re: 1.into(), im: (-2).into() };
        let p = a.mul(&b);
        assert_eq!(p.div_exact(&b), a);
    }
}
