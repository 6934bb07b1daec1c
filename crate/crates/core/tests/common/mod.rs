#![allow(dead_code)]

use std::sync::Arc;

use freepairs::group_ring::GroupRingElement;
use freepairs::units::{bicyclic_unit, enumerate_bicyclic};
use freepairs::{FiniteGroup, UnitKind, UnitValue};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The groups every property suite runs over: S3, S4, S5, A5 and the
/// dihedral groups of order 12 and 24.
pub const SUITE_GROUPS: [&str; 6] = ["S3", "S4", "S5", "A5", "D6", "D12"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn group(spec: &str) -> Arc<FiniteGroup> {
    FiniteGroup::from_spec(spec).unwrap()
}

/// All non-trivial bicyclic units of both types.
pub struct UnitPool {
    pub group: Arc<FiniteGroup>,
    pub beta: Vec<UnitValue>,
    pub gamma: Vec<UnitValue>,
}

impl UnitPool {
    pub fn new(spec: &str) -> Self {
        let group = group(spec);
        UnitPool {
            beta: enumerate_bicyclic(&group, UnitKind::Beta),
            gamma: enumerate_bicyclic(&group, UnitKind::Gamma),
            group,
        }
    }

    pub fn random(&self, rng: &mut ChaCha8Rng) -> &UnitValue {
        let i = rng.gen_range(0..self.beta.len() + self.gamma.len());
        if i < self.beta.len() {
            &self.beta[i]
        } else {
            &self.gamma[i - self.beta.len()]
        }
    }

    pub fn random_pair(&self, rng: &mut ChaCha8Rng) -> (UnitValue, UnitValue) {
        (self.random(rng).clone(), self.random(rng).clone())
    }
}

/// A random non-trivial `(x, h)`: `x⁻¹hx ∉ ⟨h⟩`.
pub fn random_nontrivial_xh(g: &Arc<FiniteGroup>, rng: &mut ChaCha8Rng) -> (usize, usize) {
    loop {
        let x = rng.gen_range(0..g.order());
        let h = rng.gen_range(0..g.order());
        let c = g.conjugate(x, h).unwrap();
        if !g.powers(h).contains(&c) {
            return (x, h);
        }
    }
}

pub fn beta(g: &Arc<FiniteGroup>, x: usize, h: usize) -> GroupRingElement {
    bicyclic_unit(g, UnitKind::Beta, x, h, None)
        .unwrap()
        .element
}

pub fn gamma(g: &Arc<FiniteGroup>, x: usize, h: usize) -> GroupRingElement {
    bicyclic_unit(g, UnitKind::Gamma, x, h, None)
        .unwrap()
        .element
}

/// Random element with small coefficients on a random support.
pub fn random_element(
    g: &Arc<FiniteGroup>,
    rng: &mut ChaCha8Rng,
    terms: usize,
) -> GroupRingElement {
    let t: Vec<(usize, i64)> = (0..terms)
        .map(|_| (rng.gen_range(0..g.order()), rng.gen_range(-3..=3)))
        .collect();
    GroupRingElement::from_i64_terms(g, &t).unwrap()
}
