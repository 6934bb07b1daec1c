//! Bicyclic units, Bass cyclic units, and the constructions that are free
//! by design.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group_ring::GroupRingElement;
use crate::perm_group::{FiniteGroup, Subgroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnitKind {
    /// `1 + (1-h) x Ĥ`
    Beta,
    /// `1 + Ĥ x (1-h)`
    Gamma,
    /// `u_{k,m}(x)`
    Bass,
}

impl UnitKind {
    pub fn name(self) -> &'static str {
        match self {
            UnitKind::Beta => "beta",
            UnitKind::Gamma => "gamma",
            UnitKind::Bass => "bass",
        }
    }
}

/// Parameters that determine a unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitDescriptor {
    Bicyclic {
        kind: UnitKind,
        x: usize,
        h: usize,
        subgroup: Subgroup,
    },
    Bass {
        x: usize,
        k: u64,
        m: u64,
    },
}

impl UnitDescriptor {
    pub fn kind(&self) -> UnitKind {
        match self {
            UnitDescriptor::Bicyclic { kind, .. } => *kind,
            UnitDescriptor::Bass { .. } => UnitKind::Bass,
        }
    }

    /// Renders in the `kind:x:h[:H=..]` / `bass:x:k:m` syntax.
    pub fn render(&self, group: &FiniteGroup) -> String {
        match self {
            UnitDescriptor::Bicyclic {
                kind,
                x,
                h,
                subgroup,
            } => {
                let mut s = format!(
                    "{}:{}:{}",
                    kind.name(),
                    group.element_word(*x),
                    group.element_word(*h)
                );
                let cyclic = Subgroup::cyclic(subgroup.parent(), *h).expect("h is valid");
                if cyclic != *subgroup {
                    let gens: Vec<String> = subgroup
                        .generators()
                        .iter()
                        .map(|&g| group.element_word(g))
                        .collect();
                    s.push_str(&format!(":H={}", gens.join(",")));
                }
                s
            }
            UnitDescriptor::Bass { x, k, m } => {
                format!("bass:{}:{k}:{m}", group.element_word(*x))
            }
        }
    }
}

/// A unit together with the parameters that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitValue {
    pub descriptor: UnitDescriptor,
    pub element: GroupRingElement,
}

impl UnitValue {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.element.group()
    }

    /// `u - 1`, the nilpotent part for bicyclic units.
    pub fn nilpotent_part(&self) -> GroupRingElement {
        &self.element - &GroupRingElement::one(self.group())
    }

    /// Exact inverse for bicyclic units: `(1+a)^{-1} = 1 - a = 2 - u`.
    pub fn bicyclic_inverse(&self) -> Option<GroupRingElement> {
        match self.descriptor {
            UnitDescriptor::Bicyclic { .. } => {
                let two = GroupRingElement::one(self.group()).scale_i64(2);
                Some(&two - &self.element)
            }
            UnitDescriptor::Bass { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        self.descriptor.render(self.group())
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.describe(), self.element)
    }
}

fn resolve_subgroup(
    group: &Arc<FiniteGroup>,
    h: usize,
    subgroup: Option<&Subgroup>,
) -> Result<Subgroup> {
    group.check(h)?;
    match subgroup {
        None => Subgroup::cyclic(group, h),
        Some(s) => {
            if !crate::perm_group::same_group(s.parent(), group) {
                return Err(Error::GroupMismatch);
            }
            if !s.contains(h) {
                return Err(Error::NotInSubgroup {
                    h: group.element_word(h),
                });
            }
            Ok(s.clone())
        }
    }
}

/// Expanded `1+(1-h)xĤ` (beta) or `1+Ĥx(1-h)` (gamma); `Ĥ` defaults to
/// the sum over `⟨h⟩`.
pub fn bicyclic_unit(
    group: &Arc<FiniteGroup>,
    kind: UnitKind,
    x: usize,
    h: usize,
    subgroup: Option<&Subgroup>,
) -> Result<UnitValue> {
    if kind == UnitKind::Bass {
        return Err(Error::MalformedDescriptor {
            text: "bass".into(),
            reason: "bicyclic_unit needs kind beta or gamma".into(),
        });
    }
    group.check(x)?;
    let subgroup = resolve_subgroup(group, h, subgroup)?;
    let element = bicyclic_element(group, kind, x, h, &subgroup);
    Ok(UnitValue {
        descriptor: UnitDescriptor::Bicyclic {
            kind,
            x,
            h,
            subgroup,
        },
        element,
    })
}

/// Expands a bicyclic unit directly on the support: each `a ∈ H`
/// contributes `+xa - hxa` (beta) or `+ax - axh` (gamma).
fn bicyclic_element(
    group: &Arc<FiniteGroup>,
    kind: UnitKind,
    x: usize,
    h: usize,
    subgroup: &Subgroup,
) -> GroupRingElement {
    let mut terms = Vec::with_capacity(2 * subgroup.order() + 1);
    terms.push((0usize, BigInt::one()));
    for &a in subgroup.members() {
        let (plus, minus) = match kind {
            UnitKind::Beta => {
                let xa = group.mul(x, a);
                (xa, group.mul(h, xa))
            }
            _ => {
                let ax = group.mul(a, x);
                (ax, group.mul(ax, h))
            }
        };
        terms.push((plus, BigInt::one()));
        terms.push((minus, -BigInt::one()));
    }
    GroupRingElement::from_terms(group, terms).expect("indices come from the group")
}

/// True iff the bicyclic units with these parameters equal 1.
///
/// With the default subgroup this is the test `x⁻¹hx ∈ ⟨h⟩`; with an
/// explicit `H` the expanded beta unit is compared with 1.
pub fn is_trivial_bicyclic(
    group: &Arc<FiniteGroup>,
    x: usize,
    h: usize,
    subgroup: Option<&Subgroup>,
) -> Result<bool> {
    group.check(x)?;
    match subgroup {
        None => {
            let cyc = Subgroup::cyclic(group, h)?;
            Ok(cyc.contains(group.conjugate(x, h)?))
        }
        Some(_) => {
            let s = resolve_subgroup(group, h, subgroup)?;
            Ok(bicyclic_element(group, UnitKind::Beta, x, h, &s).is_one())
        }
    }
}

/// Counts reported alongside an enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BicyclicCensus {
    /// Distinct units different from 1.
    pub nontrivial: usize,
    /// Distinct units when the trivial unit 1 is counted too.
    pub distinct_including_trivial: usize,
    /// Parameter pairs `(x, h)` that give a non-trivial unit.
    pub nontrivial_parameter_pairs: usize,
}

/// All distinct non-trivial bicyclic units of one type with `H = ⟨h⟩`,
/// in order of first occurrence over `(x, h)` with `x` outermost.
pub fn enumerate_bicyclic(group: &Arc<FiniteGroup>, kind: UnitKind) -> Vec<UnitValue> {
    enumerate_with_census(group, kind).0
}

pub fn enumerate_with_census(
    group: &Arc<FiniteGroup>,
    kind: UnitKind,
) -> (Vec<UnitValue>, BicyclicCensus) {
    assert!(kind != UnitKind::Bass, "only bicyclic kinds are enumerated");
    let n = group.order();
    let cyclic: Vec<Subgroup> = (0..n)
        .map(|h| Subgroup::cyclic(group, h).expect("valid index"))
        .collect();
    let rows: Vec<Vec<UnitValue>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut row = Vec::new();
            for (h, sub) in cyclic.iter().enumerate() {
                if sub.contains(group.conjugate(x, h).expect("valid index")) {
                    continue;
                }
                row.push(UnitValue {
                    descriptor: UnitDescriptor::Bicyclic {
                        kind,
                        x,
                        h,
                        subgroup: sub.clone(),
                    },
                    element: bicyclic_element(group, kind, x, h, sub),
                });
            }
            row
        })
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut pairs = 0;
    for unit in rows.into_iter().flatten() {
        pairs += 1;
        if seen.insert(unit.element.terms().to_vec()) {
            out.push(unit);
        }
    }
    let census = BicyclicCensus {
        nontrivial: out.len(),
        distinct_including_trivial: out.len() + 1,
        nontrivial_parameter_pairs: pairs,
    };
    (out, census)
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Checks Bass parameters and returns `k` reduced modulo `d`.
pub fn validate_bass(d: u64, k: u64, m: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::BassParameters("d must be positive".into()));
    }
    if m == 0 {
        return Err(Error::BassParameters("m must be positive".into()));
    }
    if d == 1 {
        return Ok(0);
    }
    let k = k % d;
    if k.gcd(&d) != 1 {
        return Err(Error::BassParameters(format!(
            "gcd(k, d) = {} for k ≡ {k} mod {d}; need 1",
            k.gcd(&d)
        )));
    }
    let phi = euler_phi(d);
    if !m.is_multiple_of(phi) {
        return Err(Error::BassParameters(format!(
            "phi({d}) = {phi} does not divide m = {m}"
        )));
    }
    Ok(k)
}

/// Coefficients of `u_{k,m}` in `Z[X]/(X^d - 1)`, ascending.
pub fn bass_cyclic_poly(d: u64, k: u64, m: u64) -> Result<Vec<BigInt>> {
    let k = validate_bass(d, k, m)?;
    let d = d as usize;
    if d == 1 {
        return Ok(vec![BigInt::one()]);
    }
    let mut base = vec![BigInt::zero(); d];
    for c in base.iter_mut().take(k as usize) {
        *c = BigInt::one();
    }
    let mut acc = vec![BigInt::zero(); d];
    acc[0] = BigInt::one();
    let mut e = m;
    while e > 0 {
        if e & 1 == 1 {
            acc = cyclic_mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = cyclic_mul(&base, &base);
        }
    }
    let km = BigInt::from(k).pow(m as u32);
    let (q, r) = (BigInt::one() - km).div_rem(&BigInt::from(d));
    debug_assert!(r.is_zero(), "k^m ≡ 1 mod d");
    for c in acc.iter_mut() {
        *c += &q;
    }
    Ok(acc)
}

fn cyclic_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let d = a.len();
    let mut out = vec![BigInt::zero(); d];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[(i + j) % d] += x * y;
            }
        }
    }
    out
}

/// The Bass cyclic unit `u_{k,m}(x)`.
pub fn bass_unit(group: &Arc<FiniteGroup>, x: usize, k: u64, m: u64) -> Result<UnitValue> {
    let d = group.element_order(x)? as u64;
    let coeffs = bass_cyclic_poly(d, k, m)?;
    let powers = group.powers(x);
    let element = GroupRingElement::from_terms(group, powers.into_iter().zip(coeffs))?;
    Ok(UnitValue {
        descriptor: UnitDescriptor::Bass { x, k, m },
        element,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManyFpVariant {
    /// `(β_{x,h,H}, γ_{x⁻¹,k,K})`
    BetaGamma,
    /// `(β_{x,h,H}, β_{x⁻¹,xkx⁻¹,xKx⁻¹})`
    BetaBeta,
}

impl std::str::FromStr for ManyFpVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta-gamma" => Ok(ManyFpVariant::BetaGamma),
            "beta-beta" => Ok(ManyFpVariant::BetaBeta),
            _ => Err(Error::Parse(format!(
                "variant `{s}`; expected beta-gamma or beta-beta"
            ))),
        }
    }
}

/// A pair of bicyclic units that is free whenever the preconditions hold.
///
/// Requires `H ≤ K`, `h ∈ H`, `k ∈ K`, `x⁻¹hx ∉ K`, and `x⁻¹kx ∉ K`
/// (beta-gamma) or `xkx⁻¹ ∉ K` (beta-beta).
#[allow(clippy::too_many_arguments)]
pub fn manyfp_pair(
    group: &Arc<FiniteGroup>,
    variant: ManyFpVariant,
    x: usize,
    h: usize,
    big_h: &Subgroup,
    k: usize,
    big_k: &Subgroup,
) -> Result<(UnitValue, UnitValue)> {
    group.check(x)?;
    group.check(h)?;
    group.check(k)?;
    let word = |g: usize| group.element_word(g);
    let fail = |msg: String| Err(Error::ManyFpPrecondition(msg));
    if !big_h.is_subgroup_of(big_k) {
        return fail("H is not contained in K".into());
    }
    if !big_h.contains(h) {
        return fail(format!("h = {} is not in H", word(h)));
    }
    if !big_k.contains(k) {
        return fail(format!("k = {} is not in K", word(k)));
    }
    let xi = group.inv(x);
    if big_k.contains(group.conjugate(x, h)?) {
        return fail(format!(
            "x^-1 h x = {} lies in K",
            word(group.conjugate(x, h)?)
        ));
    }
    let u = bicyclic_unit(group, UnitKind::Beta, x, h, Some(big_h))?;
    let v = match variant {
        ManyFpVariant::BetaGamma => {
            let c = group.conjugate(x, k)?;
            if big_k.contains(c) {
                return fail(format!("x^-1 k x = {} lies in K", word(c)));
            }
            bicyclic_unit(group, UnitKind::Gamma, xi, k, Some(big_k))?
        }
        ManyFpVariant::BetaBeta => {
            let c = group.conjugate(xi, k)?;
            if big_k.contains(c) {
                return fail(format!("x k x^-1 = {} lies in K", word(c)));
            }
            let conj_k = big_k.conjugated_by(x);
            bicyclic_unit(group, UnitKind::Beta, xi, c, Some(&conj_k))?
        }
    };
    Ok((u, v))
}

/// Splits on commas that are not inside parentheses.
pub fn split_top_level(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out.into_iter().filter(|s| !s.is_empty()).collect()
}

/// Parses `beta:<x>:<h>[:H=g1,g2]`, `gamma:<x>:<h>[:H=..]` or
/// `bass:<x>:<k>:<m>` and builds the unit.
pub fn parse_unit(group: &Arc<FiniteGroup>, text: &str) -> Result<UnitValue> {
    let bad = |reason: &str| Error::MalformedDescriptor {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let parts: Vec<&str> = text.trim().split(':').collect();
    match parts.first().copied() {
        Some(kind @ ("beta" | "gamma")) => {
            if parts.len() != 3 && parts.len() != 4 {
                return Err(bad("expected kind:x:h with an optional :H=gens suffix"));
            }
            let x = group.parse_element(parts[1])?;
            let h = group.parse_element(parts[2])?;
            let subgroup = match parts.get(3) {
                None => None,
                Some(spec) => {
                    let gens = spec
                        .strip_prefix("H=")
                        .ok_or_else(|| bad("subgroup suffix must start with H="))?;
                    let gens = split_top_level(gens)
                        .into_iter()
                        .map(|g| group.parse_element(g))
                        .collect::<Result<Vec<_>>>()?;
                    Some(Subgroup::generated(group, &gens)?)
                }
            };
            let kind = if kind == "beta" {
                UnitKind::Beta
            } else {
                UnitKind::Gamma
            };
            bicyclic_unit(group, kind, x, h, subgroup.as_ref())
        }
        Some("bass") => {
            if parts.len() != 4 {
                return Err(bad("expected bass:x:k:m"));
            }
            let x = group.parse_element(parts[1])?;
            let k: u64 = parts[2]
                .trim()
                .parse()
                .map_err(|_| bad("k must be a positive integer"))?;
            let m: u64 = parts[3]
                .trim()
                .parse()
                .map_err(|_| bad("m must be a positive integer"))?;
            if k == 0 {
                return Err(bad("k must be positive"));
            }
            bass_unit(group, x, k, m)
        }
        _ => Err(bad("kind must be beta, gamma or bass")),
    }
}
