//! The group invariants `M(G)` and `m(G)`: the least `t` such that
//! `(α, β^t)` is free for every pair of bicyclic units with non-nilpotent
//! `ab` (any types for `M`, same type for `m`).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::{min_power_from_spectrum, FreePointKB, MinPower, UndecidedPoint};
use crate::error::{Error, Result};
use crate::group_ring::GroupRingElement;
use crate::perm_group::FiniteGroup;
use crate::spectral::{SpectralConfig, Spectrum};
use crate::units::{enumerate_bicyclic, UnitKind, UnitValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InvariantMode {
    /// All ordered pairs of bicyclic units.
    AllPairs,
    /// Ordered pairs of the same type.
    SameType,
}

impl InvariantMode {
    pub fn symbol(self) -> &'static str {
        match self {
            InvariantMode::AllPairs => "M",
            InvariantMode::SameType => "m",
        }
    }
}

impl std::str::FromStr for InvariantMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" => Ok(InvariantMode::AllPairs),
            "m" => Ok(InvariantMode::SameType),
            _ => Err(Error::Parse(format!("mode `{s}`; expected M or m"))),
        }
    }
}

/// A positive integer or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Finite(u64),
    Infinite,
}

impl Bound {
    pub fn to_json(self) -> Value {
        match self {
            Bound::Finite(n) => json!(n),
            Bound::Infinite => json!("infinity"),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(n) => write!(f, "{n}"),
            Bound::Infinite => f.write_str("infinity"),
        }
    }
}

/// Sweep settings.
#[derive(Clone, Copy, Debug, Default)]
pub struct SweepOptions {
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Report progress on stderr.
    pub progress: bool,
}

/// Analysis of one distinct product `ab`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductClass {
    pub product: GroupRingElement,
    pub spectrum: Spectrum,
    /// `None` for nilpotent products.
    pub min_power: Option<MinPower>,
}

/// One ordered pair; `u` and `v` index [`InvariantResult::units`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairOutcome {
    pub u: usize,
    pub v: usize,
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnresolvedPair {
    pub u: String,
    pub v: String,
    pub points: Vec<UndecidedPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantResult {
    pub group: String,
    pub mode: InvariantMode,
    pub exact_value: Option<Bound>,
    pub lower_bound: Bound,
    pub upper_bound: Bound,
    /// Pairs whose freeing power is only bracketed, with the points in the way.
    pub unresolved: Vec<UnresolvedPair>,
    /// A pair whose certified power equals the upper bound.
    pub witness: Option<(String, String)>,
    pub units: Vec<UnitValue>,
    pub classes: Vec<ProductClass>,
    pub pairs: Vec<PairOutcome>,
    pub nilpotent_pairs: usize,
}

impl InvariantResult {
    pub fn pair_min_power(&self, p: &PairOutcome) -> Option<&MinPower> {
        self.classes[p.class].min_power.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact_value.is_some()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "group": self.group,
            "mode": self.mode.symbol(),
            "exact_value": self.exact_value.map(Bound::to_json),
            "lower_bound": self.lower_bound.to_json(),
            "upper_bound": self.upper_bound.to_json(),
            "unresolved": self.unresolved.iter().map(|p| json!({
                "u": p.u,
                "v": p.v,
                "points": p.points.iter().map(UndecidedPoint::to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "witness": self.witness.as_ref().map(|(u, v)| json!({"u": u, "v": v})),
            "units": self.units.len(),
            "pairs": self.pairs.len(),
            "nilpotent_pairs": self.nilpotent_pairs,
            "distinct_products": self.classes.len(),
        })
    }
}

fn pair_list(mode: InvariantMode, beta: usize, gamma: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    match mode {
        InvariantMode::SameType => {
            for i in 0..beta {
                for j in 0..beta {
                    out.push((i, j));
                }
            }
            for i in beta..beta + gamma {
                for j in beta..beta + gamma {
                    out.push((i, j));
                }
            }
        }
        InvariantMode::AllPairs => {
            let n = beta + gamma;
            for i in 0..n {
                for j in 0..n {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

/// Computes `M(G)` or `m(G)` as bounds, exact when they meet.
pub fn group_invariant(
    group: &Arc<FiniteGroup>,
    mode: InvariantMode,
    kb: &FreePointKB,
    cfg: &SpectralConfig,
    opts: SweepOptions,
) -> Result<InvariantResult> {
    match opts.jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Verification(format!("thread pool: {e}")))?;
            pool.install(|| sweep(group, mode, kb, cfg, opts.progress))
        }
        None => sweep(group, mode, kb, cfg, opts.progress),
    }
}

fn sweep(
    group: &Arc<FiniteGroup>,
    mode: InvariantMode,
    kb: &FreePointKB,
    cfg: &SpectralConfig,
    progress: bool,
) -> Result<InvariantResult> {
    let note = |msg: String| {
        if progress {
            eprintln!("[{} {}] {msg}", mode.symbol(), group.name());
        }
    };
    let betas = enumerate_bicyclic(group, UnitKind::Beta);
    let mut gammas = enumerate_bicyclic(group, UnitKind::Gamma);
    if mode == InvariantMode::AllPairs {
        // A unit that is both a beta and a gamma unit is listed once.
        let seen: std::collections::HashSet<_> =
            betas.iter().map(|u| u.element.terms().to_vec()).collect();
        gammas.retain(|u| !seen.contains(u.element.terms()));
    }
    let nb = betas.len();
    let units: Vec<UnitValue> = betas.into_iter().chain(gammas).collect();
    note(format!("{} units", units.len()));
    let parts: Vec<GroupRingElement> = units.iter().map(UnitValue::nilpotent_part).collect();
    let list = pair_list(mode, nb, units.len() - nb);
    let products: Vec<GroupRingElement> = list
        .par_iter()
        .map(|&(i, j)| &parts[i] * &parts[j])
        .collect();
    let mut index: HashMap<Vec<_>, usize> = HashMap::new();
    let mut reps: Vec<GroupRingElement> = Vec::new();
    let mut pairs = Vec::with_capacity(list.len());
    for (&(u, v), p) in list.iter().zip(products) {
        let next = reps.len();
        let class = *index.entry(p.terms().to_vec()).or_insert(next);
        if class == next {
            reps.push(p);
        }
        pairs.push(PairOutcome { u, v, class });
    }
    note(format!(
        "{} pairs, {} distinct products",
        pairs.len(),
        reps.len()
    ));
    let classes: Vec<ProductClass> = reps
        .into_par_iter()
        .map(|product| -> Result<ProductClass> {
            let spectrum = Spectrum::of(&product, cfg);
            let min_power = if spectrum.is_nilpotent() {
                None
            } else {
                Some(min_power_from_spectrum(&spectrum, kb, cfg)?)
            };
            Ok(ProductClass {
                product,
                spectrum,
                min_power,
            })
        })
        .collect::<Result<_>>()?;
    note("spectra done".into());

    let mut lower: Option<u64> = None;
    let mut upper: Option<Bound> = None;
    let mut witness = None;
    let mut nilpotent_pairs = 0;
    for p in &pairs {
        let Some(mp) = &classes[p.class].min_power else {
            nilpotent_pairs += 1;
            continue;
        };
        lower = Some(lower.map_or(mp.possible_from, |l| l.max(mp.possible_from)));
        let c = mp.certified.map_or(Bound::Infinite, Bound::Finite);
        if upper.is_none_or(|u| c > u) {
            upper = Some(c);
            witness = Some((units[p.u].describe(), units[p.v].describe()));
        }
    }
    let (lower_bound, upper_bound) = match (lower, upper) {
        (Some(l), Some(u)) => (Bound::Finite(l), u),
        _ => (Bound::Infinite, Bound::Infinite),
    };
    let unresolved = pairs
        .iter()
        .filter_map(|p| {
            let mp = classes[p.class].min_power.as_ref()?;
            if mp.undecided.is_empty() {
                return None;
            }
            Some(UnresolvedPair {
                u: units[p.u].describe(),
                v: units[p.v].describe(),
                points: mp.undecided.clone(),
            })
        })
        .collect();
    let exact_value = (lower_bound == upper_bound).then_some(lower_bound);
    Ok(InvariantResult {
        group: group.name().to_string(),
        mode,
        exact_value,
        lower_bound,
        upper_bound,
        unresolved,
        witness,
        units,
        classes,
        pairs,
        nilpotent_pairs,
    })
}
