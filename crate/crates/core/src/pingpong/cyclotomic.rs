//! Exact arithmetic in `Q(ζ_n)` on the power basis `1, ζ, …, ζ^{φ(n)-1}`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::isolate;
use crate::poly::{IntPoly, QPoly};
use crate::units::bass_cyclic_poly;

/// Precision cap for certified sign decisions.
pub const DEFAULT_MAX_BITS: u32 = 4096;

/// The `n`-th cyclotomic polynomial, cached per conductor.
pub fn cyclotomic_poly(n: u32) -> IntPoly {
    assert!(n >= 1, "conductor must be positive");
    static CACHE: OnceLock<Mutex<HashMap<u32, IntPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cache lock").get(&n) {
        return p.clone();
    }
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    let mut p = IntPoly::new(num);
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = p
                .div_exact(&cyclotomic_poly(d))
                .expect("cyclotomic polynomials divide X^n - 1");
        }
    }
    cache.lock().expect("cache lock").insert(n, p.clone());
    p
}

fn phi(n: u32) -> usize {
    cyclotomic_poly(n).degree()
}

/// An element of `Q(ζ_n)` with `ζ_n = e^{2πi/n}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    n: u32,
    /// Exactly `φ(n)` coefficients.
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero(n: u32) -> Self {
        CyclotomicNumber {
            n,
            coeffs: vec![BigRational::zero(); phi(n)],
        }
    }

    pub fn one(n: u32) -> Self {
        Self::from_integer(n, BigInt::one())
    }

    pub fn from_integer(n: u32, v: BigInt) -> Self {
        Self::from_rational(n, BigRational::from_integer(v))
    }

    pub fn from_i64(n: u32, v: i64) -> Self {
        Self::from_integer(n, BigInt::from(v))
    }

    pub fn from_rational(n: u32, v: BigRational) -> Self {
        let mut z = Self::zero(n);
        z.coeffs[0] = v;
        z
    }

    /// `ζ_n^k`.
    pub fn zeta_pow(n: u32, k: u64) -> Self {
        let mut c = vec![BigRational::zero(); n as usize];
        c[(k % n as u64) as usize] = BigRational::one();
        Self::reduce(n, c)
    }

    pub fn zeta(n: u32) -> Self {
        Self::zeta_pow(n, 1)
    }

    /// `Σ c_k ζ^k` for any number of coefficients.
    pub fn from_exponent_coeffs(n: u32, coeffs: &[BigRational]) -> Self {
        let mut c = vec![BigRational::zero(); n as usize];
        for (k, v) in coeffs.iter().enumerate() {
            c[k % n as usize] += v;
        }
        Self::reduce(n, c)
    }

    /// Reduces a polynomial in `ζ` modulo `Φ_n`.
    fn reduce(n: u32, mut c: Vec<BigRational>) -> Self {
        let phi_n = cyclotomic_poly(n);
        let d = phi_n.degree();
        for top in (d..c.len()).rev() {
            let lead = std::mem::replace(&mut c[top], BigRational::zero());
            if lead.is_zero() {
                continue;
            }
            for i in 0..d {
                let f = phi_n.coeff(i);
                if !f.is_zero() {
                    c[top - d + i] -= &lead * BigRational::from_integer(f);
                }
            }
        }
        c.resize(d, BigRational::zero());
        CyclotomicNumber { n, coeffs: c }
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.n)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ConductorMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(CyclotomicNumber {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(CyclotomicNumber {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn neg(&self) -> Self {
        CyclotomicNumber {
            n: self.n,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        let d = self.coeffs.len();
        let mut c = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        Ok(Self::reduce(self.n, c))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        CyclotomicNumber {
            n: self.n,
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same conductor");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same conductor");
            }
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// `Φ_n`, which is irreducible.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let a = QPoly::new(self.coeffs.clone());
        let (g, s, _) = QPoly::xgcd(&a, &cyclotomic_poly(self.n).to_rational());
        if g.degree() != 0 {
            return Err(Error::Verification(format!(
                "Φ_{} shares a factor with a nonzero element",
                self.n
            )));
        }
        Ok(Self::reduce(self.n, s.coeffs().to_vec()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// The automorphism `ζ ↦ ζ^k`, `gcd(k, n) = 1`.
    pub fn galois(&self, k: u64) -> Result<Self> {
        if k.gcd(&(self.n as u64)) != 1 {
            return Err(Error::Parse(format!(
                "ζ ↦ ζ^{k} is not an automorphism of Q(ζ_{})",
                self.n
            )));
        }
        let mut c = vec![BigRational::zero(); self.n as usize];
        for (i, v) in self.coeffs.iter().enumerate() {
            c[(i as u64 * k % self.n as u64) as usize] += v;
        }
        Ok(Self::reduce(self.n, c))
    }

    /// Complex conjugation, `ζ ↦ ζ^{n-1}`.
    pub fn conj(&self) -> Self {
        if self.n <= 2 {
            return self.clone();
        }
        self.galois(self.n as u64 - 1)
            .expect("n - 1 is a unit mod n")
    }

    /// `|α|² = α·conj(α)`, an element of the real subfield.
    pub fn modulus_sq(&self) -> Self {
        self.mul(&self.conj()).expect("same conductor")
    }

    /// Re-expresses the element in `Q(ζ_m)` for `n | m`.
    pub fn embed(&self, m: u32) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(self.n) {
            return Err(Error::InvalidEmbedding {
                from: self.n,
                to: m,
            });
        }
        let step = (m / self.n) as usize;
        let mut c = vec![BigRational::zero(); m as usize];
        for (i, v) in self.coeffs.iter().enumerate() {
            c[i * step] += v;
        }
        Ok(Self::reduce(m, c))
    }

    pub fn to_complex64(&self) -> Complex64 {
        let theta = 2.0 * std::f64::consts::PI / self.n as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                Complex64::from_polar(1.0, theta * k as f64) * c.to_f64().unwrap_or(f64::NAN)
            })
            .sum()
    }

    /// Sign of a real element, certified by evaluation on an isolating
    /// disk around `ζ_n`.
    pub fn real_sign(&self, max_bits: u32) -> Result<Ordering> {
        if *self != self.conj() {
            return Err(Error::Verification(
                "sign requested for a non-real cyclotomic number".into(),
            ));
        }
        if self.is_zero() {
            return Ok(Ordering::Equal);
        }
        if let Some(r) = self.as_rational() {
            return Ok(r.cmp(&BigRational::zero()));
        }
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let a: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let deg = a.len() - 1;
        // Σ k |a_k| 2^{k-1}, a bound on |p'| over |z| ≤ 2.
        let slope: BigInt = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| (c.abs() * BigInt::from(k)) << (k - 1))
            .sum();
        let target = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.n as f64);
        let phi_n = cyclotomic_poly(self.n);
        let mut bits = 64u32;
        loop {
            if let Some(disks) = isolate(&phi_n, bits, None, &[]) {
                let disk = disks
                    .iter()
                    .min_by(|x, y| {
                        let dx = (x.center_f64() - target).norm();
                        let dy = (y.center_f64() - target).norm();
                        dx.partial_cmp(&dy).unwrap_or(Ordering::Equal)
                    })
                    .expect("Φ_n has roots for n ≥ 3");
                // Radius below 1/2 keeps the disk inside |z| ≤ 2.
                if disk.radius.clone() << 1 < BigInt::one() << disk.bits {
                    let b = disk.bits as usize;
                    let (mut re, mut im) = (a[deg].clone(), BigInt::zero());
                    for k in (0..deg).rev() {
                        let nre = &re * &disk.re - &im * &disk.im;
                        let nim = &re * &disk.im + &im * &disk.re;
                        re = nre + (&a[k] << (b * (deg - k)));
                        im = nim;
                    }
                    // |p(z) - p(c)| ≤ r·slope, scaled by 2^{b·deg}.
                    let err = (&disk.radius * &slope) << (b * deg.saturating_sub(1));
                    if re.abs() > err {
                        return Ok(re.sign_cmp());
                    }
                }
            }
            if bits >= max_bits {
                return Err(Error::PrecisionExhausted {
                    bits,
                    coeffs: self.coeffs_string(),
                });
            }
            bits = (bits * 2).min(max_bits);
        }
    }

    fn coeffs_string(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        format!("[{}]", parts.join(", "))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "conductor": self.n,
            "coeffs": self.coeffs.iter().map(ToString::to_string).collect::<Vec<_>>(),
        })
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

/// Compares `|α|` with `|β|`: exact `Equal` when `|α|² - |β|²` vanishes,
/// otherwise a certified numeric sign.
pub fn modulus_compare(a: &CyclotomicNumber, b: &CyclotomicNumber) -> Result<Ordering> {
    modulus_compare_with(a, b, DEFAULT_MAX_BITS)
}

pub fn modulus_compare_with(
    a: &CyclotomicNumber,
    b: &CyclotomicNumber,
    max_bits: u32,
) -> Result<Ordering> {
    a.same(b)?;
    a.modulus_sq().sub(&b.modulus_sq())?.real_sign(max_bits)
}

/// `u_{k,m,d}(ζ_d^j)`.
pub fn bass_at_root(k: u64, m: u64, d: u64, j: u64) -> Result<CyclotomicNumber> {
    if j >= d {
        return Err(Error::BassParameters(format!(
            "root index j = {j} must be below d = {d}"
        )));
    }
    let poly = bass_cyclic_poly(d, k, m)?;
    let n = u32::try_from(d).map_err(|_| Error::BassParameters("d is too large".into()))?;
    let mut c = vec![BigRational::zero(); d as usize];
    for (i, v) in poly.into_iter().enumerate() {
        c[(i as u64 * j % d) as usize] += BigRational::from_integer(v);
    }
    Ok(CyclotomicNumber::reduce(n, c))
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(z_{})[{}]", self.n, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32, k: u64) -> CyclotomicNumber {
        CyclotomicNumber::zeta_pow(n, k)
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), IntPoly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic_poly(5), IntPoly::from_i64(&[1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic_poly(12), IntPoly::from_i64(&[1, 0, -1, 0, 1]));
        assert_eq!(
            cyclotomic_poly(9),
            IntPoly::from_i64(&[1, 0, 0, 1, 0, 0, 1])
        );
    }

    #[test]
    fn orbit_sum_vanishes() {
        let mut s = CyclotomicNumber::zero(5);
        for k in 0..5 {
            s = s.add(&z(5, k)).unwrap();
        }
        assert!(s.is_zero());
        assert_eq!(z(5, 1).conj(), z(5, 4));
        assert_eq!(z(7, 3).pow(7), CyclotomicNumber::one(7));
    }

    #[test]
    fn inverse_and_mismatch() {
        let a = CyclotomicNumber::one(5).add(&z(5, 1)).unwrap();
        assert!(a.mul(&a.inv().unwrap()).unwrap().is_one());
        assert_eq!(CyclotomicNumber::zero(5).inv(), Err(Error::DivisionByZero));
        assert!(matches!(
            z(5, 1).add(&z(7, 1)),
            Err(Error::ConductorMismatch { .. })
        ));
        let e = z(5, 2).embed(15).unwrap();
        assert_eq!(e, z(15, 6));
        assert!(z(5, 1).embed(12).is_err());
    }

    #[test]
    fn modulus_ordering() {
        assert_eq!(
            modulus_compare(&z(5, 1), &z(5, 2)).unwrap(),
            Ordering::Equal
        );
        let one = CyclotomicNumber::one(5);
        let a = one.add(&z(5, 1)).unwrap();
        let b = one.add(&z(5, 2)).unwrap();
        assert_eq!(modulus_compare(&a, &b).unwrap(), Ordering::Greater);
        assert_eq!(modulus_compare(&b, &a).unwrap(), Ordering::Less);
        assert_eq!(
            modulus_compare(&a, &one.add(&z(5, 4)).unwrap()).unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn bass_values() {
        assert!(bass_at_root(2, 4, 5, 0).unwrap().is_one());
        assert!(bass_at_root(1, 4, 5, 3).unwrap().is_one());
        let one = CyclotomicNumber::one(5);
        let expect = one.add(&z(5, 1)).unwrap().pow(4);
        assert_eq!(bass_at_root(2, 4, 5, 1).unwrap(), expect);
        assert!(bass_at_root(2, 4, 5, 5).is_err());
        assert!(bass_at_root(2, 3, 5, 1).is_err());
    }
}
