//! Certified complex root isolation for square-free integer polynomials.
//!
//! Approximations come from Durand–Kerner iterations, first in `f64` and
//! then in fixed-point big-integer arithmetic. They are certified
//! afterwards with exact Gaussian-dyadic arithmetic: for approximations
//! `z_i` and Weierstrass corrections `W_i = p(z_i) / (lc ∏_{j≠i}(z_i - z_j))`
//! every root lies in the union of the disks `D(z_i, n|W_i|)`, and each
//! connected component of `k` disks holds exactly `k` roots. Pairwise
//! disjoint disks therefore isolate one root each.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::IntPoly;

/// A closed disk with center `(re + i·im) / 2^bits` and radius `radius / 2^bits`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RootDisk {
    pub re: BigInt,
    pub im: BigInt,
    pub radius: BigInt,
    pub bits: u32,
}

/// Position of a disk relative to the circle `|z| = T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CirclePosition {
    /// Every point has modulus at least `T`.
    Outside,
    /// Every point has modulus strictly below `T`.
    Inside,
    Straddles,
}

impl RootDisk {
    pub fn center_f64(&self) -> Complex64 {
        Complex64::new(
            dyadic_f64(&self.re, self.bits),
            dyadic_f64(&self.im, self.bits),
        )
    }

    pub fn radius_f64(&self) -> f64 {
        dyadic_f64(&self.radius, self.bits)
    }

    /// The disk multiplied by a positive integer.
    pub fn scaled(&self, t: &BigInt) -> RootDisk {
        RootDisk {
            re: &self.re * t,
            im: &self.im * t,
            radius: &self.radius * t,
            bits: self.bits,
        }
    }

    pub fn with_bits(&self, bits: u32) -> RootDisk {
        assert!(bits >= self.bits, "precision can only be raised exactly");
        let s = bits - self.bits;
        RootDisk {
            re: &self.re << s,
            im: &self.im << s,
            radius: &self.radius << s,
            bits,
        }
    }

    fn center_norm_sq(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Compares the disk against the circle of radius `threshold`.
    pub fn position(&self, threshold: u64) -> CirclePosition {
        let t = BigInt::from(threshold) << self.bits;
        let c2 = self.center_norm_sq();
        let outer = &t + &self.radius;
        if c2 >= &outer * &outer {
            return CirclePosition::Outside;
        }
        if self.radius < t {
            let inner = &t - &self.radius;
            if c2 < &inner * &inner {
                return CirclePosition::Inside;
            }
        }
        CirclePosition::Straddles
    }

    /// True when the two closed disks do not meet.
    pub fn disjoint(&self, other: &RootDisk) -> bool {
        let bits = self.bits.max(other.bits);
        let (a, b) = (self.with_bits(bits), other.with_bits(bits));
        let dr = &a.re - &b.re;
        let di = &a.im - &b.im;
        let rs = &a.radius + &b.radius;
        &dr * &dr + &di * &di > &rs * &rs
    }

    /// True when `other` lies inside `self`.
    pub fn contains(&self, other: &RootDisk) -> bool {
        let bits = self.bits.max(other.bits);
        let (a, b) = (self.with_bits(bits), other.with_bits(bits));
        let slack = &a.radius - &b.radius;
        if slack.is_negative() {
            return false;
        }
        let dr = &a.re - &b.re;
        let di = &a.im - &b.im;
        &dr * &dr + &di * &di <= &slack * &slack
    }

    /// True when the integer `m` lies outside the closed disk.
    pub fn excludes_integer(&self, m: &BigInt) -> bool {
        let dr = &self.re - (m << self.bits);
        &dr * &dr + &self.im * &self.im > &self.radius * &self.radius
    }

    /// Integers inside the closed disk.
    pub fn integers_inside(&self) -> Vec<BigInt> {
        let one = BigInt::one() << self.bits;
        let lo = (&self.re - &self.radius).div_floor(&one);
        let hi = (&self.re + &self.radius).div_ceil(&one);
        let mut out = Vec::new();
        let mut m = lo;
        while m <= hi {
            if !self.excludes_integer(&m) {
                out.push(m.clone());
            }
            m += 1;
        }
        out
    }

    /// Upper bound for the modulus of any point, as an integer at scale `2^bits`.
    pub fn modulus_upper(&self) -> BigInt {
        ceil_sqrt(&self.center_norm_sq()) + &self.radius
    }

    /// Lower bound for the modulus of any point at scale `2^bits`, clamped at 0.
    pub fn modulus_lower(&self) -> BigInt {
        let lower = self.center_norm_sq().sqrt() - &self.radius;
        if lower.is_negative() {
            BigInt::zero()
        } else {
            lower
        }
    }

    /// Center and radius as decimal strings such that the printed disk
    /// still encloses this one.
    pub fn to_decimal(&self) -> (String, String, String) {
        if self.radius.is_zero() {
            return (
                exact_decimal(&self.re, self.bits),
                exact_decimal(&self.im, self.bits),
                "0".into(),
            );
        }
        // Enough digits to resolve the radius to about three figures.
        let r = self.radius_f64();
        let digits = if r > 0.0 && r.is_finite() {
            (3.0 - r.log10().floor()).max(1.0) as u32
        } else {
            (self.bits as f64 * std::f64::consts::LOG10_2) as u32 + 2
        };
        let digits = digits.min((self.bits as f64 * std::f64::consts::LOG10_2) as u32 + 2);
        let re = round_decimal(&self.re, self.bits, digits, Rounding::Nearest);
        let im = round_decimal(&self.im, self.bits, digits, Rounding::Nearest);
        // Rounding each coordinate moves the center by less than one unit
        // in the last place, so one extra unit keeps the enclosure valid.
        let mut rad = round_decimal_int(&self.radius, self.bits, digits, Rounding::Up);
        rad += 1;
        (re, im, format_fixed(&rad, digits))
    }
}

fn dyadic_f64(n: &BigInt, bits: u32) -> f64 {
    let len = n.bits();
    if len > 900 {
        let shift = len - 900;
        let top = (n >> shift).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi(shift as i32 - bits as i32)
    } else {
        n.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(bits as i32))
    }
}

pub fn ceil_sqrt(x: &BigInt) -> BigInt {
    if x.is_negative() || x.is_zero() {
        return BigInt::zero();
    }
    let s = x.sqrt();
    if &(&s * &s) < x {
        s + 1
    } else {
        s
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rounding {
    Nearest,
    Up,
}

fn round_decimal_int(n: &BigInt, bits: u32, digits: u32, mode: Rounding) -> BigInt {
    let num = n * BigInt::from(10u32).pow(digits);
    let den = BigInt::one() << bits;
    match mode {
        Rounding::Up => num.div_ceil(&den),
        Rounding::Nearest => (num * 2u32 + &den).div_floor(&(den << 1)),
    }
}

fn round_decimal(n: &BigInt, bits: u32, digits: u32, mode: Rounding) -> String {
    format_fixed(&round_decimal_int(n, bits, digits, mode), digits)
}

/// Formats `m / 10^digits` with trailing zeros removed.
pub fn format_fixed(m: &BigInt, digits: u32) -> String {
    let neg = m.is_negative();
    let s = m.abs().to_string();
    let d = digits as usize;
    let (int, frac) = if s.len() > d {
        (s[..s.len() - d].to_string(), s[s.len() - d..].to_string())
    } else {
        ("0".to_string(), format!("{}{}", "0".repeat(d - s.len()), s))
    };
    let frac = frac.trim_end_matches('0');
    let body = if frac.is_empty() {
        int
    } else {
        format!("{int}.{frac}")
    };
    if neg && body != "0" {
        format!("-{body}")
    } else {
        body
    }
}

/// Exact decimal expansion of `n / 2^bits`.
pub fn exact_decimal(n: &BigInt, bits: u32) -> String {
    let m = n * BigInt::from(5u32).pow(bits);
    format_fixed(&m, bits)
}

/// A Gaussian integer.
#[derive(Clone, Debug, PartialEq, Eq)]
struct GInt {
    re: BigInt,
    im: BigInt,
}

impl GInt {
    fn mul(&self, o: &GInt) -> GInt {
        GInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn sub(&self, o: &GInt) -> GInt {
        GInt {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Fixed-point product at scale `2^bits`.
    fn mul_fx(&self, o: &GInt, bits: u32) -> GInt {
        let p = self.mul(o);
        GInt {
            re: p.re >> bits,
            im: p.im >> bits,
        }
    }

    /// Fixed-point quotient at scale `2^bits`.
    fn div_fx(&self, o: &GInt, bits: u32) -> Option<GInt> {
        let den = o.norm();
        if den.is_zero() {
            return None;
        }
        let re = (&self.re * &o.re + &self.im * &o.im) << bits;
        let im = (&self.im * &o.re - &self.re * &o.im) << bits;
        Some(GInt {
            re: re / &den,
            im: im / &den,
        })
    }

    fn magnitude_l1(&self) -> BigInt {
        self.re.abs() + self.im.abs()
    }

    fn from_f64(z: Complex64, bits: u32) -> Option<GInt> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        Some(GInt {
            re: f64_to_fixed(z.re, bits)?,
            im: f64_to_fixed(z.im, bits)?,
        })
    }
}

fn f64_to_fixed(x: f64, bits: u32) -> Option<BigInt> {
    if x == 0.0 {
        return Some(BigInt::zero());
    }
    let (mant, exp, sign) = num_traits::float::FloatCore::integer_decode(x);
    let m = BigInt::from(mant);
    let e = exp as i64 + bits as i64;
    let v = if e >= 0 {
        m << e as u32
    } else {
        m >> (-e) as u32
    };
    Some(if sign < 0 { -v } else { v })
}

/// Durand–Kerner in double precision; returns approximations or `None`
/// when the coefficients do not fit in `f64`.
pub fn approximate_roots_f64(p: &IntPoly) -> Option<Vec<Complex64>> {
    let n = p.degree();
    if n == 0 {
        return Some(Vec::new());
    }
    let lc = p.lc().to_f64()?;
    let a: Vec<f64> = p
        .coeffs()
        .iter()
        .map(|c| c.to_f64().map(|v| v / lc))
        .collect::<Option<_>>()?;
    if a.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let bound = (0..n)
        .map(|k| (a[k].abs()).powf(1.0 / (n - k) as f64))
        .fold(0.0f64, f64::max)
        * 2.0;
    let radius = bound.max(1.0);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    let eval = |x: Complex64| {
        a.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    };
    for _ in 0..2000 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                z[i] += Complex64::new(1e-8 * radius, 1e-8 * radius);
                worst = f64::INFINITY;
                continue;
            }
            let corr = eval(z[i]) / den;
            if corr.re.is_finite() && corr.im.is_finite() {
                z[i] -= corr;
                worst = worst.max(corr.norm() / (1.0 + z[i].norm()));
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    Some(z)
}

fn default_seeds(p: &IntPoly, bits: u32) -> Vec<GInt> {
    let n = p.degree();
    let r = p.cauchy_bound();
    // Points r·e^{i(2πk/n + 0.4)}, generic enough to avoid symmetric stalls.
    (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            let rf = r.to_f64().unwrap_or(1e300).min(1e300);
            GInt::from_f64(Complex64::from_polar(rf, ang), bits).expect("finite seed")
        })
        .collect()
}

/// Fixed-point Durand–Kerner refinement.
fn refine_fixed(p: &IntPoly, z: &mut [GInt], bits: u32) {
    let n = z.len();
    let coeffs: Vec<GInt> = p
        .coeffs()
        .iter()
        .map(|c| GInt {
            re: c << bits,
            im: BigInt::zero(),
        })
        .collect();
    let lc = coeffs[n].clone();
    let tol = BigInt::one() << (bits / 16).clamp(4, 24);
    let max_iter = 80 + 8 * n;
    for _ in 0..max_iter {
        let mut worst = BigInt::zero();
        for i in 0..n {
            let mut num = coeffs[n].clone();
            for k in (0..n).rev() {
                num = num.mul_fx(&z[i], bits);
                num.re += &coeffs[k].re;
            }
            let mut den = lc.clone();
            for j in 0..n {
                if i != j {
                    den = den.mul_fx(&z[i].sub(&z[j]), bits);
                }
            }
            match num.div_fx(&den, bits) {
                Some(corr) => {
                    let m = corr.magnitude_l1();
                    if m > worst {
                        worst = m;
                    }
                    z[i] = z[i].sub(&corr);
                }
                None => {
                    // Coincident approximations: nudge apart and keep going.
                    let nudge = BigInt::one() << (bits / 2);
                    z[i].re += &nudge;
                    z[i].im += &nudge;
                    worst = nudge;
                }
            }
        }
        if worst <= tol {
            break;
        }
    }
}

/// Certifies approximations exactly; `None` if the disks overlap or a
/// denominator vanishes.
fn certify(p: &IntPoly, z: &[GInt], bits: u32, avoid: &[BigInt]) -> Option<Vec<RootDisk>> {
    let n = z.len();
    let c = p.coeffs();
    let lc = GInt {
        re: p.lc(),
        im: BigInt::zero(),
    };
    let nn = BigInt::from(n as u64 * n as u64);
    let mut disks = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = GInt {
            re: c[n].clone(),
            im: BigInt::zero(),
        };
        for k in (0..n).rev() {
            acc = acc.mul(&z[i]);
            acc.re += &c[k] << (bits as usize * (n - k));
        }
        let mut q = lc.clone();
        for j in 0..n {
            if i != j {
                q = q.mul(&z[i].sub(&z[j]));
            }
        }
        let qn = q.norm();
        if qn.is_zero() {
            return None;
        }
        let t = (&nn * acc.norm()).div_ceil(&qn);
        disks.push(RootDisk {
            re: z[i].re.clone(),
            im: z[i].im.clone(),
            radius: ceil_sqrt(&t),
            bits,
        });
    }
    for i in 0..n {
        for j in i + 1..n {
            if !disks[i].disjoint(&disks[j]) {
                return None;
            }
        }
        if avoid.iter().any(|m| !disks[i].excludes_integer(m)) {
            return None;
        }
    }
    Some(disks)
}

/// Isolates all roots of a square-free polynomial at the given precision.
///
/// `seeds`, if given, must hold one approximation per root; the output
/// keeps their order. Disks also exclude every integer in `avoid`.
pub fn isolate(
    p: &IntPoly,
    bits: u32,
    seeds: Option<&[RootDisk]>,
    avoid: &[BigInt],
) -> Option<Vec<RootDisk>> {
    let n = p.degree();
    if p.is_zero() || n == 0 {
        return Some(Vec::new());
    }
    let mut z: Vec<GInt> = match seeds {
        Some(s) if s.len() == n => s
            .iter()
            .map(|d| {
                let d = if d.bits <= bits {
                    d.with_bits(bits)
                } else {
                    RootDisk {
                        re: &d.re >> (d.bits - bits),
                        im: &d.im >> (d.bits - bits),
                        radius: BigInt::zero(),
                        bits,
                    }
                };
                GInt { re: d.re, im: d.im }
            })
            .collect(),
        _ => match approximate_roots_f64(p) {
            Some(zs) => zs
                .into_iter()
                .map(|x| GInt::from_f64(x, bits))
                .collect::<Option<Vec<_>>>()
                .unwrap_or_else(|| default_seeds(p, bits)),
            None => default_seeds(p, bits),
        },
    };
    refine_fixed(p, &mut z, bits);
    certify(p, &z, bits, avoid)
}

/// Isolates at `start_bits`, doubling up to `max_bits` until `accept`
/// holds. Returns the last successful isolation and whether `accept` held.
pub fn isolate_escalating<F>(
    p: &IntPoly,
    start_bits: u32,
    max_bits: u32,
    seeds: Option<&[RootDisk]>,
    avoid: &[BigInt],
    accept: F,
) -> Option<(Vec<RootDisk>, u32, bool)>
where
    F: Fn(&[RootDisk]) -> bool,
{
    let mut bits = start_bits.max(32);
    let mut best: Option<(Vec<RootDisk>, u32)> = None;
    let mut current_seeds: Option<Vec<RootDisk>> = seeds.map(|s| s.to_vec());
    loop {
        if let Some(disks) = isolate(p, bits, current_seeds.as_deref(), avoid) {
            if accept(&disks) {
                return Some((disks, bits, true));
            }
            current_seeds = Some(disks.clone());
            best = Some((disks, bits));
        }
        if bits >= max_bits {
            break;
        }
        bits = (bits * 2).min(max_bits);
    }
    best.map(|(d, b)| (d, b, false))
}

/// Exact sign of `a - b` for dyadic numerators at a common scale.
pub fn cmp_dyadic(a: &BigInt, a_bits: u32, b: &BigInt, b_bits: u32) -> Ordering {
    let bits = a_bits.max(b_bits);
    (a << (bits - a_bits)).cmp(&(b << (bits - b_bits)))
}
