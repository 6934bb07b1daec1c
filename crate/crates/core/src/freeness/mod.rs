//! Deciding whether a pair `(1+a, 1+b)` with `a² = b² = 0` is free.
//!
//! The pair is free exactly when some eigenvalue of `ab` is a free point.
//! Eigenvalues are classified against a [`FreePointKB`]; since the free
//! point problem is open in general, the outcome is four-valued.

mod invariant;
mod kb;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group_ring::{bigint_json, GroupRingElement};
use crate::numeric::CirclePosition;
use crate::poly::IntPoly;
use crate::spectral::{RootBox, SpectralConfig, Spectrum, FREE_RADIUS};

pub use invariant::{
    group_invariant, Bound, InvariantMode, InvariantResult, PairOutcome, ProductClass,
    SweepOptions, UnresolvedPair,
};
pub use kb::{parse_decimal, FreePointKB, Rule, RuleStatus, TableRule};

/// Classification of one eigenvalue. Each variant carries the rule or
/// reason behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointStatus {
    Free(String),
    NonFree(String),
    Unknown(String),
}

impl PointStatus {
    pub fn label(&self) -> &'static str {
        match self {
            PointStatus::Free(_) => "free",
            PointStatus::NonFree(_) => "nonfree",
            PointStatus::Unknown(_) => "unknown",
        }
    }

    pub fn reason(&self) -> &str {
        match self {
            PointStatus::Free(r) | PointStatus::NonFree(r) | PointStatus::Unknown(r) => r,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, PointStatus::Free(_))
    }

    pub fn is_nonfree(&self) -> bool {
        matches!(self, PointStatus::NonFree(_))
    }
}

/// An eigenvalue as seen by the classifier.
#[derive(Clone, Copy, Debug)]
pub enum Point<'a> {
    Integer(&'a BigInt),
    Box(&'a RootBox),
}

/// Classifies an exact integer or a certified disk.
pub fn classify_point(p: Point<'_>, kb: &FreePointKB) -> PointStatus {
    match p {
        Point::Integer(m) => {
            let free = m.abs() >= BigInt::from(FREE_RADIUS);
            for rule in kb.rules() {
                match rule {
                    Rule::SanovExterior if free => return PointStatus::Free(rule.name()),
                    Rule::SmallInteger if !free => return PointStatus::NonFree(rule.name()),
                    _ => {}
                }
            }
            PointStatus::Unknown("no rule covers this integer".into())
        }
        Point::Box(b) => {
            let pos = b.position(FREE_RADIUS);
            for rule in kb.rules() {
                match rule {
                    Rule::SanovExterior if pos == CirclePosition::Outside => {
                        return PointStatus::Free(rule.name())
                    }
                    Rule::Table(_) => {
                        if let Some(t) = kb.table_match(b) {
                            return match t.status {
                                RuleStatus::Free => PointStatus::Free(format!("table:{}", t.tag)),
                                RuleStatus::NonFree => {
                                    PointStatus::NonFree(format!("table:{}", t.tag))
                                }
                            };
                        }
                    }
                    _ => {}
                }
            }
            match pos {
                CirclePosition::Straddles => {
                    PointStatus::Unknown(format!("disk meets |z| = 4 at {} bits", b.disk.bits))
                }
                _ => PointStatus::Unknown("irrational point with |z| < 4; no rule applies".into()),
            }
        }
    }
}

/// One classified eigenvalue in a report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointReport {
    pub label: String,
    pub min_poly: Option<IntPoly>,
    pub status: PointStatus,
}

impl PointReport {
    pub fn to_json(&self) -> Value {
        json!({
            "point": self.label,
            "min_poly": self.min_poly.as_ref().map(IntPoly::to_json),
            "status": self.status.label(),
            "rule": self.status.reason(),
        })
    }
}

/// Classifies every distinct eigenvalue in the spectrum.
pub fn classify_spectrum(s: &Spectrum, kb: &FreePointKB) -> Vec<PointReport> {
    let mut out = Vec::with_capacity(s.integer_roots.len() + s.boxes.len());
    for (m, _) in &s.integer_roots {
        out.push(PointReport {
            label: m.to_string(),
            min_poly: Some(IntPoly::linear(m)),
            status: classify_point(Point::Integer(m), kb),
        });
    }
    for b in &s.boxes {
        out.push(PointReport {
            label: b.describe(),
            min_poly: b.min_poly.clone(),
            status: classify_point(Point::Box(b), kb),
        });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    FreePair,
    NilpotentGenerated,
    NotFreeCertified,
    Unknown,
}

impl VerdictKind {
    pub fn name(self) -> &'static str {
        match self {
            VerdictKind::FreePair => "FreePair",
            VerdictKind::NilpotentGenerated => "NilpotentGenerated",
            VerdictKind::NotFreeCertified => "NotFreeCertified",
            VerdictKind::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome for a pair, with the spectrum that justifies it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// The first free eigenvalue, for `FreePair`.
    pub witness: Option<String>,
    pub spectrum: Spectrum,
    pub points: Vec<PointReport>,
}

impl Verdict {
    pub fn from_spectrum(spectrum: Spectrum, kb: &FreePointKB) -> Verdict {
        let points = classify_spectrum(&spectrum, kb);
        let (kind, witness) = if spectrum.is_nilpotent() {
            (VerdictKind::NilpotentGenerated, None)
        } else if let Some(p) = points.iter().find(|p| p.status.is_free()) {
            (VerdictKind::FreePair, Some(p.label.clone()))
        } else if points.iter().all(|p| p.status.is_nonfree()) {
            (VerdictKind::NotFreeCertified, None)
        } else {
            (VerdictKind::Unknown, None)
        };
        Verdict {
            kind,
            witness,
            spectrum,
            points,
        }
    }

    pub fn undecided(&self) -> Vec<&PointReport> {
        self.points
            .iter()
            .filter(|p| matches!(p.status, PointStatus::Unknown(_)))
            .collect()
    }

    pub fn rules_fired(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .points
            .iter()
            .filter(|p| !matches!(p.status, PointStatus::Unknown(_)))
            .map(|p| p.status.reason().to_string())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn to_json(&self) -> Value {
        let mut obj = json!({
            "verdict": self.kind.name(),
            "spectrum": self.spectrum.to_json(),
            "points": self.points.iter().map(PointReport::to_json).collect::<Vec<_>>(),
            "undecided": self.undecided().iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            "rules_fired": self.rules_fired(),
        });
        if let Some(w) = &self.witness {
            obj["witness"] = json!(w);
        }
        obj
    }
}

fn square_zero_part(u: &GroupRingElement, which: &'static str) -> Result<GroupRingElement> {
    let a = u.checked_sub(&GroupRingElement::one(u.group()))?;
    if !(&a * &a).is_zero() {
        return Err(Error::NotSquareZero { which });
    }
    Ok(a)
}

/// `(a, b)` with `u = 1 + a`, `v = 1 + b`, checking `a² = b² = 0`.
pub fn nilpotent_parts(
    u: &GroupRingElement,
    v: &GroupRingElement,
) -> Result<(GroupRingElement, GroupRingElement)> {
    let a = square_zero_part(u, "u")?;
    let b = square_zero_part(v, "v")?;
    if !crate::perm_group::same_group(a.group(), b.group()) {
        return Err(Error::GroupMismatch);
    }
    Ok((a, b))
}

/// Decides `(u, v)` for units `u = 1+a`, `v = 1+b` with `a² = b² = 0`.
pub fn pair_verdict(
    u: &GroupRingElement,
    v: &GroupRingElement,
    kb: &FreePointKB,
    cfg: &SpectralConfig,
) -> Result<Verdict> {
    let (a, b) = nilpotent_parts(u, v)?;
    Ok(Verdict::from_spectrum(Spectrum::of(&(&a * &b), cfg), kb))
}

/// Verdict for `(u^m, v^n)` read off the spectrum of `ab` scaled by `mn`.
pub fn scaled_verdict(
    s: &Spectrum,
    m: u64,
    n: u64,
    kb: &FreePointKB,
    cfg: &SpectralConfig,
) -> Verdict {
    let mut scaled = s.scaled(m * n);
    scaled.refine_undecided(FREE_RADIUS, cfg.max_bits);
    Verdict::from_spectrum(scaled, kb)
}

/// True iff `|T(ab)| ≥ 2`, which by itself forces a free pair.
pub fn salwa_check(u: &GroupRingElement, v: &GroupRingElement) -> Result<bool> {
    let (a, b) = nilpotent_parts(u, v)?;
    Ok((&a * &b).trace().abs() >= BigInt::from(2))
}

/// An eigenvalue that keeps the freeing power from being pinned down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndecidedPoint {
    pub label: String,
    pub min_poly: Option<IntPoly>,
    /// Powers at which the point was Unknown.
    pub powers: Vec<u64>,
}

impl UndecidedPoint {
    pub fn to_json(&self) -> Value {
        json!({
            "point": self.label,
            "min_poly": self.min_poly.as_ref().map(IntPoly::to_json),
            "powers": self.powers,
        })
    }
}

/// Smallest powers for which a pair is certainly / possibly free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinPower {
    /// Smallest `t` with a free eigenvalue of `t·ab`.
    pub certified: Option<u64>,
    /// Smallest `t` at which not every eigenvalue of `t·ab` is non-free.
    pub possible_from: u64,
    /// Points left Unknown for `possible_from ≤ t < certified`.
    pub undecided: Vec<UndecidedPoint>,
}

impl MinPower {
    pub fn is_exact(&self) -> bool {
        self.certified == Some(self.possible_from)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "certified": self.certified,
            "possible_from": self.possible_from,
            "exact": self.is_exact(),
            "undecided": self.undecided.iter().map(UndecidedPoint::to_json).collect::<Vec<_>>(),
        })
    }
}

/// `min_power` for units `u = 1+a`, `v = 1+b`.
pub fn min_power(
    u: &GroupRingElement,
    v: &GroupRingElement,
    kb: &FreePointKB,
    cfg: &SpectralConfig,
) -> Result<(MinPower, Spectrum)> {
    let (a, b) = nilpotent_parts(u, v)?;
    let s = Spectrum::of(&(&a * &b), cfg);
    let mp = min_power_from_spectrum(&s, kb, cfg)?;
    Ok((mp, s))
}

/// Scans `t = 1, 2, ...` on the spectrum of `ab`; the eigenvalues of
/// `(ta)(b)` are `t` times those of `ab`.
pub fn min_power_from_spectrum(
    s: &Spectrum,
    kb: &FreePointKB,
    cfg: &SpectralConfig,
) -> Result<MinPower> {
    if s.is_nilpotent() {
        return Err(Error::NilpotentProduct);
    }
    let mut spec = s.clone();
    let (mut lower, mut bits) = spec.max_modulus_lower();
    while lower.is_zero() && spec.precision_bits < cfg.max_bits {
        let next = (spec.precision_bits * 2).min(cfg.max_bits);
        if !spec.refine_to(next) {
            break;
        }
        (lower, bits) = spec.max_modulus_lower();
    }
    let t_max = if lower.is_zero() {
        1u64 << 20
    } else {
        let four = BigInt::from(FREE_RADIUS) << bits;
        let q = (four + &lower - 1u32) / &lower;
        u64::try_from(q).unwrap_or(u64::MAX - 2) + 2
    };
    let labels: Vec<(String, Option<IntPoly>)> = spec
        .integer_roots
        .iter()
        .map(|(m, _)| (m.to_string(), Some(IntPoly::linear(m))))
        .chain(
            spec.boxes
                .iter()
                .map(|b| (b.describe(), b.min_poly.clone())),
        )
        .collect();
    let mut certified = None;
    let mut possible_from = None;
    let mut undecided: Vec<UndecidedPoint> = Vec::new();
    for t in 1..=t_max {
        let mut scaled = spec.scaled(t);
        while scaled
            .boxes
            .iter()
            .any(|b| b.position(FREE_RADIUS) == CirclePosition::Straddles)
            && spec.precision_bits < cfg.max_bits
        {
            let next = (spec.precision_bits * 2).min(cfg.max_bits);
            if !spec.refine_to(next) {
                break;
            }
            scaled = spec.scaled(t);
        }
        let reports = classify_spectrum(&scaled, kb);
        if possible_from.is_none() && reports.iter().any(|p| !p.status.is_nonfree()) {
            possible_from = Some(t);
        }
        if reports.iter().any(|p| p.status.is_free()) {
            certified = Some(t);
            break;
        }
        for (i, p) in reports.iter().enumerate() {
            if let PointStatus::Unknown(_) = p.status {
                let (label, poly) = &labels[i];
                match undecided.iter_mut().find(|u| &u.label == label) {
                    Some(u) => u.powers.push(t),
                    None => undecided.push(UndecidedPoint {
                        label: label.clone(),
                        min_poly: poly.clone(),
                        powers: vec![t],
                    }),
                }
            }
        }
    }
    let possible_from = possible_from
        .or(certified)
        .expect("a non-nilpotent spectrum has a point that is eventually not non-free");
    Ok(MinPower {
        certified,
        possible_from,
        undecided,
    })
}

/// Integer eigenvalues of a spectrum, for quick inspection.
pub fn integer_eigenvalues(s: &Spectrum) -> Vec<BigInt> {
    s.integer_roots.iter().map(|(m, _)| m.clone()).collect()
}

pub fn integer_json(m: &BigInt) -> Value {
    bigint_json(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm_group::FiniteGroup;
    use crate::units::{bicyclic_unit, UnitKind};

    fn s3_pair() -> (GroupRingElement, GroupRingElement) {
        let g = FiniteGroup::from_spec("S3").unwrap();
        let sigma = g.parse_element("(1,2,3)").unwrap();
        let tau = g.parse_element("(1,2)").unwrap();
        let u = bicyclic_unit(&g, UnitKind::Gamma, sigma, tau, None).unwrap();
        let v = bicyclic_unit(
            &g,
            UnitKind::Beta,
            g.mul(sigma, sigma),
            g.mul(sigma, tau),
            None,
        )
        .unwrap();
        (u.element, v.element)
    }

    #[test]
    fn classify_integers_and_sqrt12() {
        let kb = FreePointKB::default();
        assert!(classify_point(Point::Integer(&BigInt::from(4)), &kb).is_free());
        assert!(classify_point(Point::Integer(&BigInt::from(-4)), &kb).is_free());
        assert!(classify_point(Point::Integer(&BigInt::from(3)), &kb).is_nonfree());
        assert!(classify_point(Point::Integer(&BigInt::zero()), &kb).is_nonfree());
        let s =
            Spectrum::from_min_poly(IntPoly::from_i64(&[-12, 0, 1]), &SpectralConfig::default());
        for b in &s.boxes {
            assert!(matches!(
                classify_point(Point::Box(b), &kb),
                PointStatus::Unknown(_)
            ));
        }
        let kb2 = FreePointKB::parse("free -12,0,1 3.4641016,0,0.001 t\n").unwrap();
        let statuses: Vec<_> = s
            .boxes
            .iter()
            .map(|b| classify_point(Point::Box(b), &kb2))
            .collect();
        assert_eq!(statuses.iter().filter(|s| s.is_free()).count(), 1);
    }

    #[test]
    fn s3_verdicts() {
        let (u, v) = s3_pair();
        let cfg = SpectralConfig::default();
        let kb = FreePointKB::default();
        let verdict = pair_verdict(&u, &v, &kb, &cfg).unwrap();
        assert_eq!(verdict.kind, VerdictKind::NotFreeCertified);
        let v2 = v.pow(2);
        let verdict2 = pair_verdict(&u, &v2, &kb, &cfg).unwrap();
        assert_eq!(verdict2.kind, VerdictKind::FreePair);
        assert_eq!(verdict2.witness.as_deref(), Some("6"));
        let same = pair_verdict(&u, &u, &kb, &cfg).unwrap();
        assert_eq!(same.kind, VerdictKind::NilpotentGenerated);
        assert!(!salwa_check(&u, &v).unwrap());
        assert!(!salwa_check(&u, &u).unwrap());
        let (mp, _) = min_power(&u, &v, &kb, &cfg).unwrap();
        assert_eq!(mp.certified, Some(2));
        assert_eq!(mp.possible_from, 2);
        assert!(mp.undecided.is_empty());
        assert!(matches!(
            min_power(&u, &u, &kb, &cfg),
            Err(Error::NilpotentProduct)
        ));
    }

    #[test]
    fn non_square_zero_is_rejected() {
        let g = FiniteGroup::from_spec("C5").unwrap();
        let bass = crate::units::bass_unit(&g, 1, 2, 4).unwrap();
        let one = GroupRingElement::one(&g);
        assert!(matches!(
            pair_verdict(
                &bass.element,
                &one,
                &FreePointKB::default(),
                &SpectralConfig::default()
            ),
            Err(Error::NotSquareZero { which: "u" })
        ));
    }

    #[test]
    fn min_power_spectra() {
        let kb = FreePointKB::default();
        let cfg = SpectralConfig::default();
        let s = Spectrum::from_min_poly(IntPoly::from_i64(&[0, -4, 0, 1]), &cfg);
        let mp = min_power_from_spectrum(&s, &kb, &cfg).unwrap();
        assert_eq!((mp.certified, mp.possible_from), (Some(2), 2));
        let s = Spectrum::from_min_poly(IntPoly::from_i64(&[0, -12, 0, 1]), &cfg);
        let mp = min_power_from_spectrum(&s, &kb, &cfg).unwrap();
        assert_eq!((mp.certified, mp.possible_from), (Some(2), 1));
        assert_eq!(mp.undecided.len(), 2);
        assert!(mp
            .undecided
            .iter()
            .all(|u| u.min_poly == Some(IntPoly::from_i64(&[-12, 0, 1])) && u.powers == vec![1]));
        let kb2 = FreePointKB::parse("free -12,0,1 3.4641016,0,0.001 t\n").unwrap();
        let mp2 = min_power_from_spectrum(&s, &kb2, &cfg).unwrap();
        assert_eq!(mp2.certified, Some(1));
        // Exact modulus 4 at t = 2 for ±2i.
        let s = Spectrum::from_min_poly(IntPoly::from_i64(&[4, 0, 1]), &cfg);
        let mp = min_power_from_spectrum(&s, &kb, &cfg).unwrap();
        assert_eq!((mp.certified, mp.possible_from), (Some(2), 1));
    }
}
