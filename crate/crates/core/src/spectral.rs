//! Spectra of group-ring elements through the regular representation.
//!
//! The minimal polynomial of `a ∈ ZG` equals the minimal polynomial of its
//! left-multiplication matrix, which in turn equals the annihilator of the
//! identity basis vector: `p(A)e_1 = p(a)` as an element of ZG, and `p(a) = 0`
//! forces `p(A) = 0`. Roots are split into exact integers and certified
//! disks around the irrational ones.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group_ring::{bigint_json, GroupRingElement};
use crate::numeric::{ceil_sqrt, isolate, isolate_escalating, CirclePosition, RootDisk};
use crate::poly::IntPoly;

/// Sanov threshold: every complex number of modulus at least 4 is free.
pub const FREE_RADIUS: u64 = 4;

/// Precision settings for root isolation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectralConfig {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            start_bits: 128,
            max_bits: 2048,
        }
    }
}

/// A dense integer matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        }
    }

    /// Matrix of left multiplication by `a` in the element basis:
    /// column `h` holds the coefficients of `a·h`.
    pub fn regular(a: &GroupRingElement) -> Self {
        let g = a.group();
        let n = g.order();
        let mut m = Self::zeros(n, n);
        for h in 0..n {
            for (x, c) in a.terms() {
                m.data[g.mul(*x, h) * n + h] = c.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .sum()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// `p(self)` by Horner's rule.
    pub fn eval_poly(&self, p: &IntPoly) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut acc = Self::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).expect("square");
            for i in 0..n {
                acc.data[i * n + i] += c;
            }
        }
        acc
    }

    /// Rank by fraction-free Gaussian elimination.
    pub fn rank(&self) -> usize {
        bareiss(self.rows, self.cols, self.data.clone()).0
    }

    /// Determinant by Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let (rank, det) = bareiss(self.rows, self.cols, self.data.clone());
        if rank < self.rows {
            BigInt::zero()
        } else {
            det
        }
    }

    /// Characteristic polynomial `det(X·I - A)` by the Faddeev–LeVerrier
    /// recursion; all divisions are exact over Z. Cost is O(n^4).
    pub fn char_poly(&self) -> IntPoly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            let mut next = self.mul(&m).expect("square");
            for i in 0..n {
                next.data[i * n + i] += &coeffs[n - k + 1];
            }
            m = next;
            let am = self.mul(&m).expect("square");
            coeffs[n - k] = -(am.trace() / BigInt::from(k));
        }
        IntPoly::new(coeffs)
    }

    /// Minimal polynomial, assembled from the annihilators of all basis
    /// vectors: after processing `e_1..e_i` the running product `p` is the
    /// lcm of their annihilators.
    pub fn min_poly(&self) -> Result<IntPoly> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut p = IntPoly::one();
        for i in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::one();
            let w = self.eval_poly(&p).mul_vec(&e);
            if w.iter().all(Zero::is_zero) {
                continue;
            }
            let q = krylov_annihilator(w, |v| self.mul_vec(v), n)?;
            p = p.mul(&q);
        }
        Ok(p)
    }
}

/// Fraction-free elimination; returns the rank and, for full-rank square
/// input, the determinant.
fn bareiss(rows: usize, cols: usize, mut a: Vec<BigInt>) -> (usize, BigInt) {
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(p * cols + j, r * cols + j);
            }
            sign = -sign;
        }
        let piv = a[r * cols + c].clone();
        for i in r + 1..rows {
            let f = a[i * cols + c].clone();
            for j in c..cols {
                let v = (&piv * &a[i * cols + j] - &f * &a[r * cols + j]) / &prev;
                a[i * cols + j] = v;
            }
        }
        prev = piv;
        r += 1;
    }
    let det = if r == rows && rows == cols {
        sign * prev
    } else {
        BigInt::zero()
    };
    (r, det)
}

/// Monic generator of `{p : p(A)v = 0}`, where `apply` computes `A·v`.
///
/// Krylov vectors are reduced incrementally with fraction-free
/// elimination; each reduced row carries the integer combination of
/// Krylov vectors that produced it, so the first dependency yields the
/// relation directly.
pub fn krylov_annihilator<F>(v0: Vec<BigInt>, apply: F, max_degree: usize) -> Result<IntPoly>
where
    F: Fn(&[BigInt]) -> Vec<BigInt>,
{
    struct Row {
        pivot: usize,
        vec: Vec<BigInt>,
        combo: Vec<BigInt>,
    }
    let mut rows: Vec<Row> = Vec::new();
    let mut current = v0;
    for k in 0..=max_degree {
        let mut w = current.clone();
        let mut combo = vec![BigInt::zero(); k + 1];
        combo[k] = BigInt::one();
        for row in &rows {
            let f = w[row.pivot].clone();
            if f.is_zero() {
                continue;
            }
            let pv = &row.vec[row.pivot];
            for (x, y) in w.iter_mut().zip(&row.vec) {
                *x = &*x * pv - &f * y;
            }
            for (j, c) in combo.iter_mut().enumerate() {
                let cj = row.combo.get(j).cloned().unwrap_or_else(BigInt::zero);
                *c = &*c * pv - &f * cj;
            }
        }
        let g = w
            .iter()
            .chain(combo.iter())
            .fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !g.is_zero() && !g.is_one() {
            for x in w.iter_mut().chain(combo.iter_mut()) {
                *x /= &g;
            }
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => {
                let lead = combo[k].clone();
                let coeffs = combo
                    .iter()
                    .map(|c| {
                        let (q, r) = c.div_rem(&lead);
                        if r.is_zero() {
                            Ok(q)
                        } else {
                            Err(Error::Verification(
                                "annihilator of an integer vector is not integral".into(),
                            ))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                return Ok(IntPoly::new(coeffs));
            }
            Some(pivot) => rows.push(Row {
                pivot,
                vec: w,
                combo,
            }),
        }
        current = apply(&current);
    }
    Err(Error::Verification(
        "Krylov sequence did not become dependent".into(),
    ))
}

/// Minimal polynomial of `a` over Q (monic, integral).
pub fn minimal_polynomial(a: &GroupRingElement) -> IntPoly {
    let g = a.group().clone();
    let n = g.order();
    let mut e = vec![BigInt::zero(); n];
    e[0] = BigInt::one();
    let terms = a.terms().to_vec();
    let apply = |v: &[BigInt]| {
        let mut out = vec![BigInt::zero(); n];
        for (h, y) in v.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            for (x, c) in &terms {
                out[g.mul(*x, h)] += c * y;
            }
        }
        out
    };
    krylov_annihilator(e, apply, n).expect("group-ring minimal polynomials are monic integral")
}

/// A certified disk around one irrational eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBox {
    pub disk: RootDisk,
    /// Minimal polynomial of the enclosed point, when it has been proven.
    pub min_poly: Option<IntPoly>,
    /// `|z|^2` when it is known exactly (non-real roots of quadratics).
    pub modulus_sq: Option<BigInt>,
}

impl RootBox {
    /// Position of the point relative to `|z| = threshold`, exact when the
    /// modulus is known and otherwise read off the disk.
    pub fn position(&self, threshold: u64) -> CirclePosition {
        if let Some(m2) = &self.modulus_sq {
            let t2 = BigInt::from(threshold * threshold);
            return if *m2 >= t2 {
                CirclePosition::Outside
            } else {
                CirclePosition::Inside
            };
        }
        self.disk.position(threshold)
    }

    /// Whether the point is separated from the circle `|z| = 4`.
    pub fn decided(&self) -> bool {
        self.position(FREE_RADIUS) != CirclePosition::Straddles
    }

    fn scaled(&self, t: &BigInt) -> RootBox {
        RootBox {
            disk: self.disk.scaled(t),
            min_poly: self.min_poly.as_ref().map(|p| p.rescale_roots(t)),
            modulus_sq: self.modulus_sq.as_ref().map(|m| m * t * t),
        }
    }

    pub fn to_json(&self) -> Value {
        let (re, im, radius) = self.disk.to_decimal();
        json!({
            "re": re,
            "im": im,
            "radius": radius,
            "decided": self.decided(),
            "min_poly": self.min_poly.as_ref().map(IntPoly::to_json),
        })
    }

    pub fn describe(&self) -> String {
        let (re, im, radius) = self.disk.to_decimal();
        let mut s = match im.strip_prefix('-') {
            Some(abs) => format!("{re} - {abs}i"),
            None => format!("{re} + {im}i"),
        };
        s.push_str(&format!(" (±{radius})"));
        if let Some(p) = &self.min_poly {
            s.push_str(&format!(" root of {p}"));
        }
        s
    }
}

/// Eigenvalues of a group-ring element: exact integers plus certified
/// disks covering the remaining roots of the minimal polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    pub min_poly: IntPoly,
    /// Distinct integer roots with their multiplicity in `min_poly`, sorted.
    pub integer_roots: Vec<(BigInt, u32)>,
    pub boxes: Vec<RootBox>,
    pub precision_bits: u32,
    /// Square-free part of `min_poly` with the integer roots removed; the
    /// boxes isolate its roots in order.
    residual: IntPoly,
}

impl Spectrum {
    pub fn of(a: &GroupRingElement, cfg: &SpectralConfig) -> Spectrum {
        Self::from_min_poly(minimal_polynomial(a), cfg)
    }

    pub fn from_min_poly(min_poly: IntPoly, cfg: &SpectralConfig) -> Spectrum {
        assert!(min_poly.is_monic(), "minimal polynomials are monic");
        let (k0, rest) = min_poly.strip_x_power();
        let mut integer_roots = Vec::new();
        if k0 > 0 {
            integer_roots.push((BigInt::zero(), k0 as u32));
        }
        let candidates = integer_candidates(&rest, cfg);
        let mut rest_work = rest.clone();
        for m in candidates {
            let mut mult = 0u32;
            loop {
                let (q, r) = rest_work.div_linear(&m);
                if !r.is_zero() {
                    break;
                }
                rest_work = q;
                mult += 1;
            }
            if mult > 0 {
                integer_roots.push((m, mult));
            }
        }
        integer_roots.sort();
        let mut residual = rest.square_free_part();
        for (m, _) in &integer_roots {
            if !m.is_zero() {
                let (q, r) = residual.div_linear(m);
                debug_assert!(r.is_zero());
                residual = q;
            }
        }
        let mut spec = Spectrum {
            min_poly,
            integer_roots,
            boxes: Vec::new(),
            precision_bits: cfg.start_bits,
            residual,
        };
        if spec.residual.degree() >= 1 {
            spec.isolate_boxes(cfg);
        }
        spec
    }

    fn avoid(&self) -> Vec<BigInt> {
        self.integer_roots.iter().map(|(m, _)| m.clone()).collect()
    }

    fn isolate_boxes(&mut self, cfg: &SpectralConfig) {
        let avoid = self.avoid();
        let (disks, bits, _) = isolate_escalating(
            &self.residual,
            cfg.start_bits,
            cfg.max_bits,
            None,
            &avoid,
            |_| true,
        )
        .expect("square-free polynomials isolate within the precision cap");
        self.precision_bits = bits;
        self.boxes = disks
            .into_iter()
            .map(|disk| RootBox {
                disk,
                min_poly: None,
                modulus_sq: None,
            })
            .collect();
        // Attach minimal polynomials, raising precision if the search is
        // inconclusive.
        let mut bits = self.precision_bits;
        loop {
            if let Some(factors) = split_factors(&self.residual, &self.boxes) {
                for f in factors {
                    let modulus_sq = f.exact_modulus_sq();
                    for &i in &f.boxes {
                        if f.irreducible {
                            self.boxes[i].min_poly = Some(f.poly.clone());
                            self.boxes[i].modulus_sq = modulus_sq.clone();
                        }
                    }
                }
                break;
            }
            if bits >= cfg.max_bits {
                break;
            }
            bits = (bits * 2).min(cfg.max_bits);
            if !self.refine_to(bits) {
                break;
            }
        }
        self.refine_undecided(FREE_RADIUS, cfg.max_bits);
    }

    /// Re-isolates at `bits`, keeping box order and attached data.
    /// Returns false if the new isolation could not be matched.
    pub fn refine_to(&mut self, bits: u32) -> bool {
        if self.boxes.is_empty() || bits <= self.precision_bits {
            return true;
        }
        let seeds: Vec<RootDisk> = self.boxes.iter().map(|b| b.disk.clone()).collect();
        let Some(new) = isolate(&self.residual, bits, Some(&seeds), &self.avoid()) else {
            return false;
        };
        let mut order = vec![usize::MAX; new.len()];
        for (i, old) in self.boxes.iter().enumerate() {
            let hits: Vec<usize> = (0..new.len())
                .filter(|&j| !new[j].disjoint(&old.disk))
                .collect();
            if hits.len() != 1 {
                return false;
            }
            // The new disk must meet no other old disk, so its root is the
            // one isolated by `old`.
            let j = hits[0];
            if self
                .boxes
                .iter()
                .enumerate()
                .any(|(k, b)| k != i && !new[j].disjoint(&b.disk))
            {
                return false;
            }
            order[i] = j;
        }
        for (i, j) in order.into_iter().enumerate() {
            self.boxes[i].disk = new[j].clone();
        }
        self.precision_bits = bits;
        true
    }

    /// Doubles precision until every box is separated from `|z| = threshold`.
    pub fn refine_undecided(&mut self, threshold: u64, max_bits: u32) -> bool {
        loop {
            if self
                .boxes
                .iter()
                .all(|b| b.position(threshold) != CirclePosition::Straddles)
            {
                return true;
            }
            if self.precision_bits >= max_bits {
                return false;
            }
            let next = (self.precision_bits * 2).min(max_bits);
            if !self.refine_to(next) {
                return false;
            }
        }
    }

    /// Eigenvalues multiplied by `t ≥ 1`.
    pub fn scaled(&self, t: u64) -> Spectrum {
        assert!(t >= 1, "scale factor must be positive");
        let tb = BigInt::from(t);
        Spectrum {
            min_poly: self.min_poly.rescale_roots(&tb),
            integer_roots: {
                let mut v: Vec<_> = self
                    .integer_roots
                    .iter()
                    .map(|(m, k)| (m * &tb, *k))
                    .collect();
                v.sort();
                v
            },
            boxes: self.boxes.iter().map(|b| b.scaled(&tb)).collect(),
            precision_bits: self.precision_bits,
            residual: self.residual.rescale_roots(&tb),
        }
    }

    /// True when 0 is the only eigenvalue.
    pub fn is_nilpotent(&self) -> bool {
        self.boxes.is_empty() && self.integer_roots.iter().all(|(m, _)| m.is_zero())
    }

    pub fn all_decided(&self) -> bool {
        self.boxes.iter().all(RootBox::decided)
    }

    /// Lower bound for the largest eigenvalue modulus, as `(num, bits)`.
    pub fn max_modulus_lower(&self) -> (BigInt, u32) {
        let bits = self.precision_bits;
        let mut best = BigInt::zero();
        for (m, _) in &self.integer_roots {
            let v = m.abs() << bits;
            if v > best {
                best = v;
            }
        }
        for b in &self.boxes {
            let d = b.disk.with_bits(bits.max(b.disk.bits));
            let v = d.modulus_lower() >> (d.bits - bits);
            if v > best {
                best = v;
            }
        }
        (best, bits)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "min_poly": self.min_poly.to_json(),
            "integer_roots": self
                .integer_roots
                .iter()
                .map(|(m, k)| json!([bigint_json(m), k]))
                .collect::<Vec<_>>(),
            "boxes": self.boxes.iter().map(RootBox::to_json).collect::<Vec<_>>(),
            "precision_bits": self.precision_bits,
        })
    }

    /// One-line summary of the eigenvalues.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self
            .integer_roots
            .iter()
            .map(|(m, _)| m.to_string())
            .collect();
        parts.extend(self.boxes.iter().map(RootBox::describe));
        format!("{{{}}}", parts.join(", "))
    }
}

/// Integer root candidates of `p` with `p(0) != 0`.
fn integer_candidates(p: &IntPoly, cfg: &SpectralConfig) -> Vec<BigInt> {
    if p.degree() == 0 {
        return Vec::new();
    }
    let c = p.coeff(0).abs();
    let bound = p.cauchy_bound();
    if c.bits() <= 40 {
        let c = c.to_u64().expect("fits in 40 bits");
        let mut divs = Vec::new();
        let mut d = 1u64;
        while d * d <= c {
            if c.is_multiple_of(d) {
                divs.push(d);
                if d * d != c {
                    divs.push(c / d);
                }
            }
            d += 1;
        }
        divs.sort_unstable();
        let mut out = Vec::new();
        for d in divs {
            let d = BigInt::from(d);
            if d > bound {
                break;
            }
            out.push(-d.clone());
            out.push(d);
        }
        return out;
    }
    // Large constant term: locate candidates numerically, then test exactly.
    let sf = p.square_free_part();
    let mut out = Vec::new();
    if let Some((disks, _, _)) =
        isolate_escalating(&sf, cfg.start_bits, cfg.max_bits, None, &[], |_| true)
    {
        for d in disks {
            if d.radius.bits() <= d.bits as u64 + 2 {
                out.extend(d.integers_inside());
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// An integer factor of the residual and the boxes holding its roots.
struct Factor {
    poly: IntPoly,
    boxes: Vec<usize>,
    irreducible: bool,
}

impl Factor {
    fn exact_modulus_sq(&self) -> Option<BigInt> {
        if !self.irreducible || self.poly.degree() != 2 {
            return None;
        }
        let (c, b) = (self.poly.coeff(0), self.poly.coeff(1));
        if &b * &b - BigInt::from(4) * &c < BigInt::zero() {
            Some(c)
        } else {
            None
        }
    }
}

enum SubsetTest {
    NotAFactor,
    Inconclusive,
    Candidate(IntPoly),
}

/// Elementary symmetric polynomials of the centers of `subset`, with a
/// rigorous bound on their distance to those of the enclosed roots.
fn subset_candidate(boxes: &[RootBox], subset: &[usize], bits: u32) -> SubsetTest {
    // With centers Z = z·2^bits, e_k(Z) = e_k(z)·2^(bits·k); the bounds
    // e_k(|Z|+R) and e_k(|Z|) live at the same scale.
    let d = subset.len();
    let mut e_re = vec![BigInt::zero(); d + 1];
    let mut e_im = vec![BigInt::zero(); d + 1];
    let mut up = vec![BigInt::zero(); d + 1];
    let mut lo = vec![BigInt::zero(); d + 1];
    e_re[0] = BigInt::one();
    up[0] = BigInt::one();
    lo[0] = BigInt::one();
    for (step, &i) in subset.iter().enumerate() {
        let disk = boxes[i].disk.with_bits(bits);
        let a = ceil_sqrt(&(&disk.re * &disk.re + &disk.im * &disk.im));
        let ar = &a + &disk.radius;
        for k in (1..=step + 1).rev() {
            let (pr, pi) = (e_re[k - 1].clone(), e_im[k - 1].clone());
            e_re[k] += &pr * &disk.re - &pi * &disk.im;
            e_im[k] += &pr * &disk.im + &pi * &disk.re;
            let (u, l) = (&up[k - 1] * &ar, &lo[k - 1] * &a);
            up[k] += u;
            lo[k] += l;
        }
    }
    let mut coeffs = vec![BigInt::zero(); d + 1];
    for k in 1..=d {
        let scale = bits as usize * k;
        let one = BigInt::one() << scale;
        let err = &up[k] - &lo[k];
        if e_im[k].abs() > err {
            return SubsetTest::NotAFactor;
        }
        if &err * 2 >= one {
            return SubsetTest::Inconclusive;
        }
        let m: BigInt = (&e_re[k] * 2u32 + &one).div_floor(&(&one << 1));
        if (&e_re[k] - (&m << scale)).abs() > err {
            return SubsetTest::NotAFactor;
        }
        // ∏(X - z) = Σ (-1)^k e_k X^(d-k)
        coeffs[d - k] = if k % 2 == 0 { m } else { -m };
    }
    coeffs[d] = BigInt::one();
    SubsetTest::Candidate(IntPoly::new(coeffs))
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Splits the residual into integer factors by searching subsets of boxes
/// in increasing size. Returns `None` when precision is insufficient for
/// a rigorous answer.
fn split_factors(residual: &IntPoly, boxes: &[RootBox]) -> Option<Vec<Factor>> {
    let n = boxes.len();
    let bits = boxes.iter().map(|b| b.disk.bits).max().unwrap_or(0);
    let exhaustive = n <= 12;
    let max_d = if exhaustive { n / 2 } else { 3 };
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut rest = residual.clone();
    let mut found = Vec::new();
    let mut checked_up_to = 1;
    for d in 2..=max_d {
        'restart: loop {
            if remaining.len() < 2 * d {
                break;
            }
            let mut comb: Vec<usize> = (0..d).collect();
            loop {
                let subset: Vec<usize> = comb.iter().map(|&i| remaining[i]).collect();
                match subset_candidate(boxes, &subset, bits) {
                    SubsetTest::NotAFactor => {}
                    SubsetTest::Inconclusive => return None,
                    SubsetTest::Candidate(g) => {
                        if let Some(q) = rest.div_exact(&g) {
                            let located = locate_roots(&g, boxes, &subset, bits)?;
                            rest = q;
                            remaining.retain(|i| !located.contains(i));
                            found.push(Factor {
                                poly: g,
                                boxes: located,
                                irreducible: true,
                            });
                            continue 'restart;
                        }
                    }
                }
                if !next_combination(&mut comb, remaining.len()) {
                    break 'restart;
                }
            }
        }
        checked_up_to = d;
    }
    if !remaining.is_empty() {
        let size = remaining.len();
        found.push(Factor {
            poly: rest,
            boxes: remaining,
            irreducible: size <= 2 * checked_up_to + 1 || exhaustive,
        });
    }
    Some(found)
}

/// Finds which boxes hold the roots of a factor `g` of the residual.
fn locate_roots(g: &IntPoly, boxes: &[RootBox], hint: &[usize], bits: u32) -> Option<Vec<usize>> {
    let seeds: Vec<RootDisk> = hint.iter().map(|&i| boxes[i].disk.clone()).collect();
    let disks = isolate(g, bits, Some(&seeds), &[]).or_else(|| isolate(g, bits * 2, None, &[]))?;
    let mut located = Vec::with_capacity(disks.len());
    for d in &disks {
        let hits: Vec<usize> = (0..boxes.len())
            .filter(|&i| !boxes[i].disk.disjoint(d))
            .collect();
        if hits.len() != 1 || located.contains(&hits[0]) {
            return None;
        }
        located.push(hits[0]);
    }
    located.sort_unstable();
    Some(located)
}

/// Integer square root helper exposed for tests of exact moduli.
pub fn is_perfect_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let s = n.sqrt();
        &s * &s == *n
    }
}
