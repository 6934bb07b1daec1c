//! Elements of the integral group ring ZG.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::perm_group::{same_group, FiniteGroup, Subgroup};

/// A finite integer combination of group elements.
///
/// Terms are kept sorted by element index with no zero coefficients, so
/// structural equality is equality in ZG.
#[derive(Clone)]
pub struct GroupRingElement {
    group: Arc<FiniteGroup>,
    terms: Vec<(usize, BigInt)>,
}

impl PartialEq for GroupRingElement {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group) && self.terms == other.terms
    }
}

impl Eq for GroupRingElement {}

impl std::hash::Hash for GroupRingElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl GroupRingElement {
    pub fn zero(group: &Arc<FiniteGroup>) -> Self {
        GroupRingElement {
            group: Arc::clone(group),
            terms: Vec::new(),
        }
    }

    pub fn one(group: &Arc<FiniteGroup>) -> Self {
        Self::basis(group, 0)
    }

    /// The group element `g` viewed in ZG.
    pub fn basis(group: &Arc<FiniteGroup>, g: usize) -> Self {
        assert!(g < group.order(), "element index out of range");
        GroupRingElement {
            group: Arc::clone(group),
            terms: vec![(g, BigInt::one())],
        }
    }

    /// Sums the given terms, merging repeated indices.
    pub fn from_terms<I>(group: &Arc<FiniteGroup>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, BigInt)>,
    {
        let mut dense = vec![BigInt::zero(); group.order()];
        for (g, c) in terms {
            group.check(g)?;
            dense[g] += c;
        }
        Ok(Self::from_dense(group, dense))
    }

    pub fn from_i64_terms(group: &Arc<FiniteGroup>, terms: &[(usize, i64)]) -> Result<Self> {
        Self::from_terms(group, terms.iter().map(|&(g, c)| (g, BigInt::from(c))))
    }

    fn from_dense(group: &Arc<FiniteGroup>, dense: Vec<BigInt>) -> Self {
        let terms = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        GroupRingElement {
            group: Arc::clone(group),
            terms,
        }
    }

    /// Sum of all members of `h`, written Ĥ.
    pub fn subgroup_sum(h: &Subgroup) -> Self {
        GroupRingElement {
            group: Arc::clone(h.parent()),
            terms: h.members().iter().map(|&g| (g, BigInt::one())).collect(),
        }
    }

    /// Sum of an arbitrary set of group elements.
    pub fn set_sum(group: &Arc<FiniteGroup>, set: &[usize]) -> Result<Self> {
        Self::from_terms(group, set.iter().map(|&g| (g, BigInt::one())))
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn terms(&self) -> &[(usize, BigInt)] {
        &self.terms
    }

    pub fn coeff(&self, g: usize) -> BigInt {
        match self.terms.binary_search_by_key(&g, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Dense coefficient vector in the canonical element order.
    pub fn to_dense(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.group.order()];
        for (g, c) in &self.terms {
            v[*g] = c.clone();
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// The trace map: coefficient of the identity.
    pub fn trace(&self) -> BigInt {
        self.coeff(0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_group(&self.group, &other.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let take_left = j == other.terms.len()
                || (i < self.terms.len() && self.terms[i].0 < other.terms[j].0);
            let take_right = i == self.terms.len()
                || (j < other.terms.len() && other.terms[j].0 < self.terms[i].0);
            if take_left {
                out.push(self.terms[i].clone());
                i += 1;
            } else if take_right {
                out.push(other.terms[j].clone());
                j += 1;
            } else {
                let c = &self.terms[i].1 + &other.terms[j].1;
                if !c.is_zero() {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Ok(GroupRingElement {
            group: Arc::clone(&self.group),
            terms: out,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn scale(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(&self.group);
        }
        GroupRingElement {
            group: Arc::clone(&self.group),
            terms: self.terms.iter().map(|(g, c)| (*g, c * n)).collect(),
        }
    }

    pub fn scale_i64(&self, n: i64) -> Self {
        self.scale(&BigInt::from(n))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.group));
        }
        if let Some(p) = self.mul_small(other) {
            return Ok(p);
        }
        let g = &self.group;
        let mut acc = vec![BigInt::zero(); g.order()];
        for (x, a) in &self.terms {
            for (y, b) in &other.terms {
                acc[g.mul(*x, *y)] += a * b;
            }
        }
        Ok(Self::from_dense(g, acc))
    }

    /// Machine-integer product when every partial sum provably fits in i128.
    fn mul_small(&self, other: &Self) -> Option<Self> {
        let left: Vec<(usize, i64)> = small_terms(&self.terms)?;
        let right: Vec<(usize, i64)> = small_terms(&other.terms)?;
        let max_l = left.iter().map(|t| t.1.unsigned_abs() as u128).max()?;
        let max_r = right.iter().map(|t| t.1.unsigned_abs() as u128).max()?;
        let count = left.len().min(right.len()) as u128;
        max_l
            .checked_mul(max_r)?
            .checked_mul(count)
            .filter(|b| *b < (1u128 << 126))?;
        let g = &self.group;
        let mut acc = vec![0i128; g.order()];
        for &(x, a) in &left {
            for &(y, b) in &right {
                acc[g.mul(x, y)] += a as i128 * b as i128;
            }
        }
        let terms = acc
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(i, c)| (i, BigInt::from(c)))
            .collect();
        Some(GroupRingElement {
            group: Arc::clone(g),
            terms,
        })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.group);
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

    /// True iff some power of `self` vanishes.
    ///
    /// The nilpotency index of an element of ZG is at most |G|, so it
    /// suffices to square ⌈log2 |G|⌉ + 1 times.
    pub fn is_nilpotent(&self) -> bool {
        let n = self.group.order();
        let steps = usize::BITS - (n.max(1) - 1).leading_zeros() + 1;
        let mut p = self.clone();
        for _ in 0..steps {
            if p.is_zero() {
                return true;
            }
            p = &p * &p;
        }
        p.is_zero()
    }

    /// Largest absolute coefficient, used for growth diagnostics.
    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms
            .iter()
            .map(|(_, c)| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// `[[coef, "cycles"], ...]`; coefficients outside i64 become strings.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(g, c)| json!([bigint_json(c), self.group.element_word(*g)]))
                .collect(),
        )
    }

    pub fn from_json(group: &Arc<FiniteGroup>, value: &Value) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("group-ring element: {why}"));
        let arr = value.as_array().ok_or_else(|| bad("expected an array"))?;
        let mut terms = Vec::with_capacity(arr.len());
        for item in arr {
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| bad("each term must be [coefficient, element]"))?;
            let coef = match &pair[0] {
                Value::Number(n) => n
                    .as_i64()
                    .map(BigInt::from)
                    .ok_or_else(|| bad("coefficient must be an integer"))?,
                Value::String(s) => s
                    .parse::<BigInt>()
                    .map_err(|_| bad("coefficient string is not an integer"))?,
                _ => return Err(bad("coefficient must be a number or string")),
            };
            let word = pair[1]
                .as_str()
                .ok_or_else(|| bad("element must be a string"))?;
            terms.push((group.parse_element(word)?, coef));
        }
        Self::from_terms(group, terms)
    }
}

fn small_terms(terms: &[(usize, BigInt)]) -> Option<Vec<(usize, i64)>> {
    terms
        .iter()
        .map(|(g, c)| c.to_i64().map(|v| (*g, v)))
        .collect()
}

/// JSON number when the value fits in i64, decimal string otherwise.
pub fn bigint_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(v) => json!(v),
        None => Value::String(c.to_string()),
    }
}

/// Result of expanding Ĥ·x·K̂.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetProduct {
    /// |H ∩ xKx⁻¹|
    pub intersection_size: usize,
    /// The double coset HxK, sorted.
    pub support: Vec<usize>,
}

/// Ĥ·x·K̂ equals `intersection_size` times the sum over HxK.
pub fn coset_product(h: &Subgroup, x: usize, k: &Subgroup) -> Result<CosetProduct> {
    if !same_group(h.parent(), k.parent()) {
        return Err(Error::GroupMismatch);
    }
    let g = h.parent();
    g.check(x)?;
    let conj = k.conjugated_by(x);
    let intersection_size = h.members().iter().filter(|&&m| conj.contains(m)).count();
    let mut mask = vec![false; g.order()];
    for &a in h.members() {
        let ax = g.mul(a, x);
        for &b in k.members() {
            mask[g.mul(ax, b)] = true;
        }
    }
    let support = (0..g.order()).filter(|&i| mask[i]).collect();
    Ok(CosetProduct {
        intersection_size,
        support,
    })
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, c)) in self.terms.iter().enumerate() {
            let word = self.group.element_word(*g);
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                write!(f, "{word}")?;
            } else {
                write!(f, "{mag}*{word}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupRingElement[{self}]")
    }
}

impl<'a> Add<&'a GroupRingElement> for &'a GroupRingElement {
    type Output = GroupRingElement;
    fn add(self, rhs: &'a GroupRingElement) -> GroupRingElement {
        self.checked_add(rhs)
            .expect("operands from different groups")
    }
}

impl<'a> Sub<&'a GroupRingElement> for &'a GroupRingElement {
    type Output = GroupRingElement;
    fn sub(self, rhs: &'a GroupRingElement) -> GroupRingElement {
        self.checked_sub(rhs)
            .expect("operands from different groups")
    }
}

impl<'a> Mul<&'a GroupRingElement> for &'a GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, rhs: &'a GroupRingElement) -> GroupRingElement {
        self.checked_mul(rhs)
            .expect("operands from different groups")
    }
}

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        GroupRingElement {
            group: Arc::clone(&self.group),
            terms: self.terms.iter().map(|(g, c)| (*g, -c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> (Arc<FiniteGroup>, usize, usize) {
        let g = FiniteGroup::from_spec("S3").unwrap();
        let sigma = g.parse_element("(1,2,3)").unwrap();
        let tau = g.parse_element("(1,2)").unwrap();
        (g, sigma, tau)
    }

    #[test]
    fn subgroup_sum_squares() {
        let (g, _, tau) = s3();
        let h = Subgroup::cyclic(&g, tau).unwrap();
        let hat = GroupRingElement::subgroup_sum(&h);
        assert_eq!(&hat * &hat, hat.scale_i64(2));
        let one_minus = &GroupRingElement::one(&g) - &GroupRingElement::basis(&g, tau);
        assert!((&one_minus * &hat).is_zero());
        assert!(GroupRingElement::subgroup_sum(&Subgroup::trivial(&g)).is_one());
    }

    #[test]
    fn basis_products_and_identities() {
        let (g, sigma, tau) = s3();
        let s = GroupRingElement::basis(&g, sigma);
        let t = GroupRingElement::basis(&g, tau);
        assert_eq!(&s * &t, GroupRingElement::basis(&g, g.mul(sigma, tau)));
        let zero = GroupRingElement::zero(&g);
        assert_eq!(&s + &zero, s);
        assert!(s.scale_i64(0).is_zero());
        assert_eq!(GroupRingElement::one(&g).trace(), BigInt::one());
        assert!(s.trace().is_zero());
    }

    #[test]
    fn square_zero_powers() {
        let (g, sigma, tau) = s3();
        let h = Subgroup::cyclic(&g, g.mul(sigma, tau)).unwrap();
        let x = GroupRingElement::basis(&g, g.mul(sigma, sigma));
        let one = GroupRingElement::one(&g);
        let b = &(&(&one - &GroupRingElement::basis(&g, g.mul(sigma, tau))) * &x)
            * &GroupRingElement::subgroup_sum(&h);
        assert!((&b * &b).is_zero());
        let beta = &one + &b;
        for m in 0..6u64 {
            assert_eq!(beta.pow(m), &one + &b.scale_i64(m as i64));
        }
        assert!(b.is_nilpotent());
        assert!(GroupRingElement::zero(&g).is_nilpotent());
        assert!(!one.is_nilpotent());
    }

    #[test]
    fn coset_product_examples() {
        let (g, sigma, tau) = s3();
        let triv = Subgroup::trivial(&g);
        let cp = coset_product(&triv, sigma, &triv).unwrap();
        assert_eq!(cp.intersection_size, 1);
        assert_eq!(cp.support, vec![sigma]);

        let h = Subgroup::cyclic(&g, tau).unwrap();
        let cp = coset_product(&h, 0, &h).unwrap();
        assert_eq!(cp.intersection_size, 2);
        assert_eq!(cp.support, h.members());

        let s2 = g.mul(sigma, sigma);
        let k = Subgroup::cyclic(&g, g.mul(sigma, tau)).unwrap();
        let cp = coset_product(&h, s2, &k).unwrap();
        assert_eq!(cp.intersection_size, 1);
        // Direct enumeration of {a·σ²·b : a ∈ ⟨τ⟩, b ∈ ⟨στ⟩}.
        let mut expect = Vec::new();
        for a in [0, tau] {
            for b in [0, g.mul(sigma, tau)] {
                expect.push(g.mul(g.mul(a, s2), b));
            }
        }
        expect.sort();
        expect.dedup();
        assert_eq!(cp.support, expect);
        assert_eq!(cp.support.len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let (g, sigma, tau) = s3();
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let a = GroupRingElement::from_terms(
            &g,
            vec![(0, BigInt::from(1)), (tau, BigInt::from(-1)), (sigma, big)],
        )
        .unwrap();
        let v = a.to_json();
        assert_eq!(GroupRingElement::from_json(&g, &v).unwrap(), a);
        let text = serde_json::from_str::<Value>(r#"[[1,"()"],[-1,"(1,2)"]]"#).unwrap();
        let b = GroupRingElement::from_json(&g, &text).unwrap();
        assert_eq!(b.coeff(tau), BigInt::from(-1));
    }

    #[test]
    fn big_coefficient_path_agrees() {
        let (g, sigma, tau) = s3();
        let huge = BigInt::from(1u64 << 62) * BigInt::from(1u64 << 62);
        let a = GroupRingElement::from_terms(&g, vec![(sigma, huge.clone()), (0, BigInt::one())])
            .unwrap();
        let b = GroupRingElement::from_i64_terms(&g, &[(tau, 3), (sigma, -2)]).unwrap();
        let p = &a * &b;
        assert_eq!(p.coeff(g.mul(sigma, tau)), &huge * 3);
        assert_eq!(p.coeff(g.mul(sigma, sigma)), &huge * -2);
    }
}
