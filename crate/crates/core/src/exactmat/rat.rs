//! Exact rational scalars.
//!
//! [`Rat`] keeps small values inline (a pair of `i32` in lowest terms) and
//! promotes to a heap-allocated [`BigRational`] only when a result no longer
//! fits. The representation is canonical, so structural equality and hashing
//! coincide with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
#[derive(Eq, Hash)]
pub struct Rat(Repr);

#[derive(Eq)]
enum Repr {
    /// `num / den` in lowest terms with `den > 0`.
    Small(i32, i32),
    /// Only used when the value does not fit `Small`.
    Big(Box<BigRational>),
}

// Hand-written so the small case inlines into matrix loops.
impl Clone for Rat {
    #[inline]
    fn clone(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat(Repr::Small(*n, *d)),
            Repr::Big(b) => Rat(Repr::Big(b.clone())),
        }
    }
}

impl PartialEq for Rat {
    #[inline]
    fn eq(&self, other: &Rat) -> bool {
        self.0 == other.0
    }
}

impl PartialEq for Repr {
    #[inline]
    fn eq(&self, other: &Repr) -> bool {
        match (self, other) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

// `BigRational`'s own hash normalizes through repeated division; the
// representation here is already canonical, so the parts suffice.
impl std::hash::Hash for Repr {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            Repr::Small(n, d) => {
                state.write_u8(0);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                state.write_u8(1);
                r.numer().hash(state);
                r.denom().hash(state);
            }
        }
    }
}

/// Error returned when a rational literal cannot be parsed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRatError {
    pub literal: String,
    pub reason: &'static str,
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rat {
    #[inline]
    pub fn zero() -> Rat {
        Rat(Repr::Small(0, 1))
    }

    #[inline]
    pub fn one() -> Rat {
        Rat(Repr::Small(1, 1))
    }

    pub fn from_integer(n: i64) -> Rat {
        Rat::from_i64_parts(n, 1)
    }

    /// `num / den`. Panics when `den == 0`; use [`Rat::checked_ratio`] for
    /// untrusted input.
    pub fn ratio(num: i64, den: i64) -> Rat {
        Rat::checked_ratio(num, den).expect("zero denominator")
    }

    pub fn checked_ratio(num: i64, den: i64) -> Option<Rat> {
        if den == 0 {
            None
        } else {
            Some(Rat::from_i64_parts(num, den))
        }
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Option<Rat> {
        if den.is_zero() {
            None
        } else {
            Some(Rat::from_big(BigRational::new(num, den)))
        }
    }

    fn from_i64_parts(num: i64, den: i64) -> Rat {
        debug_assert!(den != 0);
        Rat::from_i128_parts(num as i128, den as i128)
    }

    fn from_i128_parts(mut num: i128, mut den: i128) -> Rat {
        if den < 0 {
            num = -num;
            den = -den;
        }
        if num == 0 {
            return Rat::zero();
        }
        let g = num.unsigned_abs().gcd(&den.unsigned_abs()) as i128;
        num /= g;
        den /= g;
        Rat::from_reduced_i128(num, den)
    }

    /// `num / den` already in lowest terms with `den > 0`.
    fn from_reduced_i128(num: i128, den: i128) -> Rat {
        match (i32::try_from(num), i32::try_from(den)) {
            (Ok(n), Ok(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(Box::new(BigRational::new_raw(
                BigInt::from(num),
                BigInt::from(den),
            )))),
        }
    }

    fn from_reduced_i64(num: i64, den: i64) -> Rat {
        match (i32::try_from(num), i32::try_from(den)) {
            (Ok(n), Ok(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(Box::new(BigRational::new_raw(
                BigInt::from(num),
                BigInt::from(den),
            )))),
        }
    }

    fn from_big(value: BigRational) -> Rat {
        match (value.numer().to_i32(), value.denom().to_i32()) {
            (Some(n), Some(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(Box::new(value))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum(),
            Repr::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    #[inline]
    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Option<Rat> {
        match &self.0 {
            Repr::Small(0, _) => None,
            Repr::Small(n, d) => Some(Rat::from_i64_parts(*d as i64, *n as i64)),
            Repr::Big(b) => Some(Rat::from_big(b.recip())),
        }
    }

    pub fn pow(&self, exp: u32) -> Rat {
        let mut base = self.clone();
        let mut acc = Rat::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Largest integer not exceeding `self`.
    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(Integer::div_floor(&(*n as i64), &(*d as i64))),
            Repr::Big(b) => b.floor().to_integer(),
        }
    }

    /// Number of bits needed by the numerator and denominator together; a
    /// rough size measure for diagnostics.
    pub fn bit_size(&self) -> u64 {
        match &self.0 {
            Repr::Small(..) => 64,
            Repr::Big(b) => b.numer().bits() + b.denom().bits(),
        }
    }

    fn add_ref(&self, rhs: &Rat) -> Rat {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) => rhs.clone(),
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i64, *b as i64, *c as i64, *d as i64);
                if b == d {
                    let n = a + c;
                    if n == 0 {
                        return Rat::zero();
                    }
                    let g = gcd_u64(n.unsigned_abs(), b as u64) as i64;
                    Rat::from_reduced_i64(n / g, b / g)
                } else {
                    let n = a * d + c * b;
                    if n == 0 {
                        return Rat::zero();
                    }
                    let den = b * d;
                    let g = gcd_u64(n.unsigned_abs(), den as u64) as i64;
                    Rat::from_reduced_i64(n / g, den / g)
                }
            }
            _ => Rat::from_big(self.to_big() + rhs.to_big()),
        }
    }

    fn sub_ref(&self, rhs: &Rat) -> Rat {
        self.add_ref(&rhs.neg_ref())
    }

    fn neg_ref(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat::from_reduced_i64(-(*n as i64), *d as i64),
            Repr::Big(b) => Rat::from_big(-(**b).clone()),
        }
    }

    fn mul_ref(&self, rhs: &Rat) -> Rat {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => Rat::zero(),
            (Repr::Small(1, 1), _) => rhs.clone(),
            (_, Repr::Small(1, 1)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i64, *b as i64, *c as i64, *d as i64);
                Rat::mul_small_parts(a, b, c, d)
            }
            _ => Rat::from_big(self.to_big() * rhs.to_big()),
        }
    }

    /// `(a/b) * (c/d)` for reduced inputs with `b, d > 0` and all magnitudes
    /// at most `2^31`.
    fn mul_small_parts(a: i64, b: i64, c: i64, d: i64) -> Rat {
        let g1 = gcd_u64(a.unsigned_abs(), d as u64) as i64;
        let g2 = gcd_u64(c.unsigned_abs(), b as u64) as i64;
        let n = (a / g1) * (c / g2);
        let den = (b / g2) * (d / g1);
        Rat::from_reduced_i64(n, den)
    }

    fn div_ref(&self, rhs: &Rat) -> Rat {
        match (&self.0, &rhs.0) {
            (_, Repr::Small(0, _)) => panic!("division by zero rational"),
            (Repr::Small(0, _), _) => Rat::zero(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i64, *b as i64, *c as i64, *d as i64);
                // (a/b) / (c/d) = (a * d) / (b * c), with the sign moved to the numerator.
                let (c, d) = if c < 0 { (-c, -d) } else { (c, d) };
                Rat::mul_small_parts(a, b, d, c)
            }
            _ => Rat::from_big(self.to_big() / rhs.to_big()),
        }
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_integer(n)
    }
}

impl From<i32> for Rat {
    fn from(n: i32) -> Self {
        Rat(Repr::Small(n, 1))
    }
}

impl From<u64> for Rat {
    fn from(n: u64) -> Self {
        Rat::from_i128_parts(n as i128, 1)
    }
}

impl From<usize> for Rat {
    fn from(n: usize) -> Self {
        Rat::from_i128_parts(n as i128, 1)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_big(BigRational::from_integer(n))
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat::from_big(r)
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i64 * *d as i64).cmp(&(*c as i64 * *b as i64))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `p`, `-p`, `p/q` and `-p/q` with decimal digits only.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParseRatError {
            literal: s.to_string(),
            reason,
        };
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (num_str, den_str) = match body.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (body, None),
        };
        if !is_digits(num_str) {
            return Err(err("numerator must be a non-empty string of decimal digits"));
        }
        let mut num: BigInt = num_str
            .parse()
            .map_err(|_| err("numerator out of range"))?;
        if negative {
            num = -num;
        }
        let den: BigInt = match den_str {
            None => BigInt::one(),
            Some(d) if is_digits(d) => d.parse().map_err(|_| err("denominator out of range"))?,
            Some(_) => return Err(err("denominator must be a non-empty string of decimal digits")),
        };
        Rat::from_bigints(num, den).ok_or_else(|| err("zero denominator"))
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        self.neg_ref()
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        self.neg_ref()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $imp:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                self.$imp(rhs)
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                self.$imp(&rhs)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                self.$imp(rhs)
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                self.$imp(&rhs)
            }
        }
        impl $assign_trait<&Rat> for Rat {
            fn $assign_method(&mut self, rhs: &Rat) {
                *self = (&*self).$imp(rhs);
            }
        }
        impl $assign_trait<Rat> for Rat {
            fn $assign_method(&mut self, rhs: Rat) {
                *self = (&*self).$imp(&rhs);
            }
        }
    };
}

binop!(Add, add, add_ref, AddAssign, add_assign);
binop!(Sub, sub, sub_ref, SubAssign, sub_assign);
binop!(Mul, mul, mul_ref, MulAssign, mul_assign);
binop!(Div, div, div_ref, DivAssign, div_assign);

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |acc, x| acc * x)
    }
}

impl<'a> Product<&'a Rat> for Rat {
    fn product<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |acc, x| acc * x)
    }
}
