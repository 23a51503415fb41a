use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::Rat;

/// Univariate polynomial in `t` with rational coefficients, lowest degree
/// first. The coefficient list never ends in a zero, so the zero polynomial
/// has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> RatPoly {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> RatPoly {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> RatPoly {
        RatPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> RatPoly {
        RatPoly::new(vec![c])
    }

    /// The monomial `t`.
    pub fn t() -> RatPoly {
        RatPoly::monomial(1)
    }

    pub fn monomial(degree: usize) -> RatPoly {
        let mut coeffs = vec![Rat::zero(); degree + 1];
        coeffs[degree] = Rat::one();
        RatPoly { coeffs }
    }

    /// `prod (t - r)` over the given roots.
    pub fn from_roots(roots: &[Rat]) -> RatPoly {
        roots
            .iter()
            .fold(RatPoly::one(), |acc, r| &acc * &RatPoly::new(vec![-r, Rat::one()]))
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(Rat::is_one)
    }

    pub fn monic(&self) -> RatPoly {
        match self.leading() {
            None => RatPoly::zero(),
            Some(lc) => self.scale(&lc.recip().expect("nonzero leading coefficient")),
        }
    }

    pub fn scale(&self, c: &Rat) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `self * t^k`.
    pub fn shift(&self, k: usize) -> RatPoly {
        if self.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        RatPoly { coeffs }
    }

    /// Splits `self = t^k * q` with `q(0) != 0`, returning `(k, q)`. The zero
    /// polynomial returns `(0, 0)`.
    pub fn split_t_power(&self) -> (usize, RatPoly) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if k == self.coeffs.len() {
            return (0, RatPoly::zero());
        }
        (k, RatPoly { coeffs: self.coeffs[k..].to_vec() })
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| &(&acc * x) + c)
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    /// Panics when `divisor` is zero.
    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc_inv = divisor.leading().unwrap().recip().unwrap();
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return (RatPoly::zero(), RatPoly::zero());
        };
        if sd < dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                if !d.is_zero() {
                    rem[k + i] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    pub fn divides(&self, other: &RatPoly) -> bool {
        other.div_rem(self).1.is_zero()
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl Add<&RatPoly> for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub<&RatPoly> for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul<&RatPoly> for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        RatPoly::new(out)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RatPoly {
    /// Highest degree first, e.g. `t^3 - t^2 + 1/4 t`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 if show_coeff => write!(f, " t")?,
                1 => write!(f, "t")?,
                _ if show_coeff => write!(f, " t^{k}")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::new(c.iter().map(|&x| Rat::from_integer(x)).collect())
    }

    #[test]
    fn arithmetic_and_division() {
        let a = p(&[-1, 0, 1]); // t^2 - 1
        let b = p(&[1, 1]); // t + 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(&q * &b, a);
        assert_eq!(a.gcd(&p(&[1, 2, 1])), b);
        assert_eq!(p(&[3]).gcd(&p(&[0, 1])), RatPoly::one());
        assert_eq!(RatPoly::zero().gcd(&RatPoly::zero()), RatPoly::zero());
    }

    #[test]
    fn t_power_and_display() {
        let c = p(&[0, 0, -1, 1]);
        assert_eq!(c.split_t_power(), (2, p(&[-1, 1])));
        assert_eq!(c.to_string(), "t^3 - t^2");
        let q = RatPoly::new(vec![Rat::ratio(1, 4), Rat::ratio(-3, 2), Rat::one()]);
        assert_eq!(q.to_string(), "t^2 - 3/2 t + 1/4");
        assert_eq!(format!("{}", p(&[-2])), "-2");
        assert_eq!(RatPoly::from_roots(&[Rat::one(), Rat::zero()]), p(&[0, -1, 1]));
        assert_eq!(c.eval(&Rat::from_integer(2)), Rat::from_integer(4));
    }
}
