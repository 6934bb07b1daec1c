//! Free-point knowledge base.
//!
//! Two rules are built in: Sanov's exterior (`|z| ≥ 4` is free) and small
//! integers (`|z| ≤ 3` is not free). Further entries come from a text file
//! with one rule per line:
//!
//! ```text
//! # status  min-poly (ascending)  disk (re,im,radius)  source tag
//! free      -12,0,1               3.4641,0,0.001       some-reference
//! ```
//!
//! A table rule fires on a point whose proven minimal polynomial equals the
//! rule's polynomial and whose enclosing disk lies inside the rule's disk.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::RootDisk;
use crate::poly::IntPoly;
use crate::spectral::RootBox;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleStatus {
    Free,
    NonFree,
}

/// A table entry tied to one algebraic point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRule {
    pub status: RuleStatus,
    pub poly: IntPoly,
    pub re: BigRational,
    pub im: BigRational,
    pub radius: BigRational,
    pub tag: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Rule {
    SanovExterior,
    SmallInteger,
    Table(TableRule),
}

impl Rule {
    pub fn name(&self) -> String {
        match self {
            Rule::SanovExterior => "sanov-exterior".into(),
            Rule::SmallInteger => "small-integer".into(),
            Rule::Table(t) => format!("table:{}", t.tag),
        }
    }
}

/// An ordered list of rules that never disagree on a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreePointKB {
    rules: Vec<Rule>,
}

impl Default for FreePointKB {
    fn default() -> Self {
        FreePointKB {
            rules: vec![Rule::SanovExterior, Rule::SmallInteger],
        }
    }
}

impl FreePointKB {
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn table_rules(&self) -> impl Iterator<Item = &TableRule> {
        self.rules.iter().filter_map(|r| match r {
            Rule::Table(t) => Some(t),
            _ => None,
        })
    }

    /// Adds a table rule after checking it against every existing rule.
    pub fn add_rule(&mut self, rule: TableRule) -> Result<()> {
        let reject = |why: String| Err(Error::KnowledgeBase(why));
        if rule.poly.degree() < 2 || !rule.poly.is_monic() {
            return reject(format!(
                "rule `{}`: the polynomial must be monic of degree at least 2",
                rule.tag
            ));
        }
        if rule.radius.is_negative() {
            return reject(format!("rule `{}`: negative radius", rule.tag));
        }
        if rule.status == RuleStatus::NonFree {
            // The whole disk must sit in |z| < 4, or Sanov's rule could disagree.
            let four = BigRational::from_integer(BigInt::from(4));
            let slack = &four - &rule.radius;
            let c2 = &rule.re * &rule.re + &rule.im * &rule.im;
            if !slack.is_positive() || c2 >= &slack * &slack {
                return reject(format!(
                    "rule `{}`: a non-free disk must lie inside |z| < 4",
                    rule.tag
                ));
            }
        }
        for other in self.table_rules() {
            if other.poly == rule.poly
                && other.status != rule.status
                && rational_disks_meet(other, &rule)
            {
                return reject(format!(
                    "rule `{}` contradicts rule `{}`",
                    rule.tag, other.tag
                ));
            }
        }
        self.rules.push(Rule::Table(rule));
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kb = FreePointKB::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |why: &str| Error::KnowledgeBase(format!("line {}: {why}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(bad("expected `free|nonfree <coeffs> <re,im,radius> <tag>`"));
            }
            let status = match fields[0] {
                "free" => RuleStatus::Free,
                "nonfree" => RuleStatus::NonFree,
                _ => return Err(bad("status must be free or nonfree")),
            };
            let poly = IntPoly::parse_ascending(fields[1]).map_err(|e| bad(&e.to_string()))?;
            let disk: Vec<&str> = fields[2].split(',').collect();
            if disk.len() != 3 {
                return Err(bad("disk must be re,im,radius"));
            }
            let num =
                |s: &str| parse_decimal(s).ok_or_else(|| bad(&format!("`{s}` is not a decimal")));
            kb.add_rule(TableRule {
                status,
                poly,
                re: num(disk[0])?,
                im: num(disk[1])?,
                radius: num(disk[2])?,
                tag: fields[3].to_string(),
            })
            .map_err(|e| bad(&e.to_string()))?;
        }
        Ok(kb)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::KnowledgeBase(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// First table rule that covers the point, if any.
    pub fn table_match(&self, point: &RootBox) -> Option<&TableRule> {
        let poly = point.min_poly.as_ref()?;
        self.table_rules()
            .find(|r| &r.poly == poly && rule_contains_disk(r, &point.disk))
    }
}

fn dyadic(n: &BigInt, bits: u32) -> BigRational {
    BigRational::new(n.clone(), BigInt::from(1) << bits)
}

fn rule_contains_disk(rule: &TableRule, d: &RootDisk) -> bool {
    let slack = &rule.radius - dyadic(&d.radius, d.bits);
    if slack.is_negative() {
        return false;
    }
    let dr = dyadic(&d.re, d.bits) - &rule.re;
    let di = dyadic(&d.im, d.bits) - &rule.im;
    &dr * &dr + &di * &di <= &slack * &slack
}

fn rational_disks_meet(a: &TableRule, b: &TableRule) -> bool {
    let dr = &a.re - &b.re;
    let di = &a.im - &b.im;
    let rs = &a.radius + &b.radius;
    &dr * &dr + &di * &di <= &rs * &rs
}

/// Parses `-3.25`, `12`, `1e-3` or `2.5E2` exactly.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    if neg && !v.is_zero() {
        v = -v;
    }
    Some(v)
}
