//! Dense univariate polynomials over Z and Q, coefficients in ascending order.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::group_ring::bigint_json;

/// A polynomial with integer coefficients, `coeffs[k]` the coefficient of `X^k`.
/// The zero polynomial has no coefficients; otherwise the last one is non-zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `X^k`
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        IntPoly { coeffs: c }
    }

    /// `X - r`
    pub fn linear(r: &BigInt) -> Self {
        IntPoly {
            coeffs: vec![-r, BigInt::one()],
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Division by a non-zero divisor, exact over Z or `None`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.degree() < d.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let dl = d.lc();
        let dd = d.degree();
        let mut quot = vec![BigInt::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let top = &rem[k + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&dl);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &q * c;
            }
            quot[k] = q;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(Self::new(quot))
        } else {
            None
        }
    }

    /// Synthetic division by `X - r`: returns quotient and `p(r)`.
    pub fn div_linear(&self, r: &BigInt) -> (Self, BigInt) {
        if self.is_zero() {
            return (Self::zero(), BigInt::zero());
        }
        let n = self.degree();
        let mut quot = vec![BigInt::zero(); n];
        let mut acc = BigInt::zero();
        for k in (0..=n).rev() {
            acc = acc * r + &self.coeffs[k];
            if k > 0 {
                quot[k - 1] = acc.clone();
            }
        }
        (Self::new(quot), acc)
    }

    /// Pseudo-remainder `lc(d)^(deg p - deg d + 1) p mod d`.
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        let mut r = self.clone();
        let dl = d.lc();
        let dd = d.degree();
        while !r.is_zero() && r.degree() >= dd {
            let shift = r.degree() - dd;
            let rl = r.lc();
            let mut next: Vec<BigInt> = r.coeffs.iter().map(|c| c * &dl).collect();
            for (j, c) in d.coeffs.iter().enumerate() {
                next[shift + j] -= &rl * c;
            }
            r = Self::new(next);
        }
        r
    }

    /// Greatest common divisor over Q, returned primitive with positive
    /// leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a.primitive_part()
    }

    /// `p / gcd(p, p')`, primitive. Monic input stays monic.
    pub fn square_free_part(&self) -> Self {
        if self.degree() == 0 {
            return self.primitive_part();
        }
        let g = self.gcd(&self.derivative());
        self.primitive_part()
            .div_exact(&g)
            .expect("a primitive gcd divides a primitive polynomial over Z")
            .primitive_part()
    }

    /// Splits off the largest power of X: `p = X^k q` with `q(0) != 0`.
    pub fn strip_x_power(&self) -> (usize, Self) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (
            k,
            Self::new(self.coeffs[k.min(self.coeffs.len())..].to_vec()),
        )
    }

    /// `t^deg · p(X/t)`, whose roots are `t` times the roots of `p`.
    pub fn rescale_roots(&self, t: &BigInt) -> Self {
        let n = self.degree();
        let mut pw = BigInt::one();
        let mut out = vec![BigInt::zero(); self.coeffs.len()];
        for k in (0..=n).rev() {
            out[k] = &self.coeffs[k] * &pw;
            pw *= t;
        }
        Self::new(out)
    }

    /// Cauchy bound: every root has modulus below `1 + max|c_k / c_n|`.
    pub fn cauchy_bound(&self) -> BigInt {
        let lc = self.lc().abs();
        let m = self.coeffs[..self.degree()]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        BigInt::one() + m.div_ceil(&lc)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(bigint_json).collect())
    }

    /// Parses comma-separated ascending coefficients, e.g. `-12,0,1`.
    pub fn parse_ascending(text: &str) -> Result<Self> {
        let coeffs = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("`{t}` is not an integer coefficient")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs))
    }

    pub fn to_rational(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{k}"),
            };
            if k == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

/// A polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut rem = self.coeffs.clone();
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let inv = d.coeffs[dd].recip();
        let mut quot = vec![BigRational::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] * &inv;
            if q.is_zero() {
                continue;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &q * c;
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Returns `(g, s, t)` with `g = s·a + t·b` monic (or zero).
    pub fn xgcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let one = Self::constant(BigRational::one());
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (one.clone(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), one);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("r1 is non-zero");
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.coeffs.last().expect("non-zero").recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn display_and_trim() {
        assert_eq!(p(&[-12, 0, 1]).to_string(), "X^2 - 12");
        assert_eq!(p(&[0, 0, -3, 1, 0, 0]).to_string(), "X^3 - 3*X^2");
        assert_eq!(p(&[0, 0]).to_string(), "0");
        assert_eq!(p(&[5, -1]).to_string(), "-X + 5");
    }

    #[test]
    fn gcd_and_square_free() {
        // (X-1)^2 (X+2) (X^2+1)
        let f = p(&[-1, 1]).pow(2).mul(&p(&[2, 1])).mul(&p(&[1, 0, 1]));
        let g = f.gcd(&f.derivative());
        assert_eq!(g, p(&[-1, 1]));
        assert_eq!(
            f.square_free_part(),
            p(&[-1, 1]).mul(&p(&[2, 1])).mul(&p(&[1, 0, 1]))
        );
        assert_eq!(p(&[0, 0, 1]).square_free_part(), p(&[0, 1]));
    }

    #[test]
    fn division() {
        let f = p(&[-12, 0, 1]).mul(&p(&[3, 1]));
        assert_eq!(f.div_exact(&p(&[3, 1])), Some(p(&[-12, 0, 1])));
        assert_eq!(f.div_exact(&p(&[1, 1])), None);
        let (q, r) = f.div_linear(&BigInt::from(-3));
        assert!(r.is_zero());
        assert_eq!(q, p(&[-12, 0, 1]));
        let (_, r) = f.div_linear(&BigInt::from(2));
        assert_eq!(r, f.eval(&BigInt::from(2)));
    }

    #[test]
    fn rescale() {
        // roots ±2√3 become ±4√3: X^2 - 48
        assert_eq!(
            p(&[-12, 0, 1]).rescale_roots(&BigInt::from(2)),
            p(&[-48, 0, 1])
        );
        let f = p(&[0, -3, 1]);
        assert_eq!(f.rescale_roots(&BigInt::from(2)), p(&[0, -6, 1]));
        assert_eq!(f.rescale_roots(&BigInt::one()), f);
    }

    #[test]
    fn strip_and_bound() {
        let (k, q) = p(&[0, 0, -3, 1]).strip_x_power();
        assert_eq!(k, 2);
        assert_eq!(q, p(&[-3, 1]));
        assert!(p(&[-12, 0, 1]).cauchy_bound() >= BigInt::from(4));
    }

    #[test]
    fn rational_xgcd() {
        let a = p(&[1, 1, 1, 1, 1]).to_rational();
        let b = p(&[1, 1]).to_rational();
        let (g, s, t) = QPoly::xgcd(&a, &b);
        assert_eq!(g.degree(), 0);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }
}
