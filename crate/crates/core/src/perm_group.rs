//! Finite permutation groups materialized as full multiplication tables.
//!
//! Products compose right to left: `g * h` applies `h` first, then `g`.
//! With this convention `(1,3,5) * (1,2)(3,4) = (1,2,3,4,5)`.
//!
//! Elements are indexed canonically: the identity is index 0, then the
//! closure is explored breadth-first from the generators in the order they
//! were given; each new layer is sorted lexicographically by image sequence.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default upper bound on the order of a group built from a spec.
pub const DEFAULT_ORDER_CAP: usize = 1024;

/// A bijection on `{0, .., degree-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::MalformedPermutation {
                    text: format!("{images:?}"),
                    reason: "images are not a bijection".into(),
                });
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 1-based cycles. Overlapping cycles are
    /// multiplied as a product, rightmost first.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut result = Permutation::identity(degree);
        for cycle in cycles.iter().rev() {
            let mut images: Vec<u32> = (0..degree as u32).collect();
            let mut seen = vec![false; degree];
            for (pos, &p) in cycle.iter().enumerate() {
                if p == 0 || p > degree {
                    return Err(Error::MalformedPermutation {
                        text: format!("{cycle:?}"),
                        reason: format!("point {p} outside 1..={degree}"),
                    });
                }
                if seen[p - 1] {
                    return Err(Error::MalformedPermutation {
                        text: format!("{cycle:?}"),
                        reason: format!("point {p} repeated within a cycle"),
                    });
                }
                seen[p - 1] = true;
                let next = cycle[(pos + 1) % cycle.len()];
                images[p - 1] = (next - 1) as u32;
            }
            result = Permutation { images }.compose(&result);
        }
        Ok(result)
    }

    /// Parses cycle notation such as `(1,2)(3,4)`; `()` is the identity.
    pub fn parse_cycles(degree: usize, text: &str) -> Result<Self> {
        let bad = |reason: &str| Error::MalformedPermutation {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad("empty permutation"));
        }
        let mut cycles = Vec::new();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(bad("expected `(`"));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| bad("unbalanced parenthesis"))?;
            let body = &rest[1..close];
            if !body.is_empty() {
                let mut cycle = Vec::new();
                for tok in body.split(',') {
                    let p: usize = tok
                        .parse()
                        .map_err(|_| bad(&format!("`{tok}` is not a point")))?;
                    cycle.push(p);
                }
                cycles.push(cycle);
            }
            rest = &rest[close + 1..];
        }
        Permutation::from_cycles(degree, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other
                .images
                .iter()
                .map(|&i| self.images[i as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Non-trivial cycles, 1-based, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = vec![start + 1];
            seen[start] = true;
            let mut p = self.images[start] as usize;
            while p != start {
                seen[p] = true;
                cycle.push(p + 1);
                p = self.images[p] as usize;
            }
            out.push(cycle);
        }
        out
    }

    fn extend_to(&self, degree: usize) -> Permutation {
        let mut images = self.images.clone();
        images.extend(self.images.len() as u32..degree as u32);
        Permutation { images }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", body.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

/// A finite group given by its full multiplication table.
pub struct FiniteGroup {
    name: String,
    degree: usize,
    elements: Vec<Permutation>,
    lookup: HashMap<Permutation, usize>,
    table: Vec<u32>,
    inverses: Vec<u32>,
    orders: Vec<u32>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order())
            .finish()
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Builds a group from a spec string with the default order cap.
    pub fn from_spec(spec: &str) -> Result<Arc<FiniteGroup>> {
        Self::from_spec_with_cap(spec, DEFAULT_ORDER_CAP)
    }

    /// Grammar: `S<n>`, `A<n>`, `C<n>`, `D<n>` (dihedral of order 2n), or
    /// `perm:<degree>:<cycles>;<cycles>;...` with 1-based cycle notation.
    pub fn from_spec_with_cap(spec: &str, cap: usize) -> Result<Arc<FiniteGroup>> {
        let spec = spec.trim();
        let malformed = |reason: &str| Error::MalformedSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        if let Some(rest) = spec.strip_prefix("perm:") {
            let (deg, gens) = rest
                .split_once(':')
                .ok_or_else(|| malformed("expected perm:<degree>:<generators>"))?;
            let degree: usize = deg
                .trim()
                .parse()
                .map_err(|_| malformed("degree is not a positive integer"))?;
            if degree == 0 {
                return Err(malformed("degree must be positive"));
            }
            let mut generators = Vec::new();
            for g in gens.split(';').map(str::trim).filter(|g| !g.is_empty()) {
                generators.push(Permutation::parse_cycles(degree, g)?);
            }
            return Self::from_generators(spec, degree, &generators, cap);
        }

        let mut chars = spec.chars();
        let family = chars.next().ok_or_else(|| malformed("empty spec"))?;
        let n: usize = chars
            .as_str()
            .parse()
            .map_err(|_| malformed("expected a family letter followed by a positive integer"))?;
        if n == 0 {
            return Err(malformed("n must be positive"));
        }
        let cyc =
            |degree: usize, cycles: Vec<Vec<usize>>| Permutation::from_cycles(degree, &cycles);
        let (degree, gens) = match family {
            'S' => {
                let mut gens = Vec::new();
                if n >= 2 {
                    gens.push(cyc(n, vec![(1..=n).collect()])?);
                    gens.push(cyc(n, vec![vec![1, 2]])?);
                }
                (n, gens)
            }
            'A' => {
                let gens = (3..=n)
                    .map(|i| cyc(n, vec![vec![1, 2, i]]))
                    .collect::<Result<Vec<_>>>()?;
                (n, gens)
            }
            'C' => (n, vec![cyc(n, vec![(1..=n).collect()])?]),
            'D' => match n {
                1 => (2, vec![cyc(2, vec![vec![1, 2]])?]),
                2 => (
                    4,
                    vec![cyc(4, vec![vec![1, 2]])?, cyc(4, vec![vec![3, 4]])?],
                ),
                _ => {
                    let rotation = cyc(n, vec![(1..=n).collect()])?;
                    let reflection = Permutation::from_images(
                        (0..n as u32).map(|i| n as u32 - 1 - i).collect(),
                    )?;
                    (n, vec![rotation, reflection])
                }
            },
            _ => return Err(malformed("unknown family; expected S, A, C, D or perm:")),
        };
        Self::from_generators(spec, degree, &gens, cap)
    }

    /// Closure of `gens` under composition, indexed canonically.
    pub fn from_generators(
        name: &str,
        degree: usize,
        gens: &[Permutation],
        cap: usize,
    ) -> Result<Arc<FiniteGroup>> {
        let gens: Vec<Permutation> = gens
            .iter()
            .map(|g| {
                if g.degree() > degree {
                    Err(Error::MalformedSpec {
                        spec: name.to_string(),
                        reason: format!("generator {g} exceeds degree {degree}"),
                    })
                } else {
                    Ok(g.extend_to(degree))
                }
            })
            .collect::<Result<_>>()?;

        let identity = Permutation::identity(degree);
        let mut elements = vec![identity.clone()];
        let mut lookup = HashMap::new();
        lookup.insert(identity, 0usize);
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut layer = Vec::new();
            for &g in &frontier {
                for s in &gens {
                    let p = elements[g].compose(s);
                    if !lookup.contains_key(&p) {
                        lookup.insert(p.clone(), usize::MAX);
                        layer.push(p);
                    }
                }
            }
            if elements.len() + layer.len() > cap {
                return Err(Error::OrderCapExceeded { cap });
            }
            layer.sort();
            frontier.clear();
            for p in layer {
                let idx = elements.len();
                *lookup.get_mut(&p).expect("inserted above") = idx;
                elements.push(p);
                frontier.push(idx);
            }
        }

        let n = elements.len();
        let mut table = vec![0u32; n * n];
        for (g, pg) in elements.iter().enumerate() {
            for (h, ph) in elements.iter().enumerate() {
                table[g * n + h] = lookup[&pg.compose(ph)] as u32;
            }
        }
        let mut inverses = vec![0u32; n];
        for g in 0..n {
            let row = &table[g * n..(g + 1) * n];
            inverses[g] = row.iter().position(|&x| x == 0).expect("group closure") as u32;
        }
        let mut orders = vec![0u32; n];
        for g in 0..n {
            let mut p = g;
            let mut d = 1u32;
            while p != 0 {
                p = table[p * n + g] as usize;
                d += 1;
            }
            orders[g] = d;
        }

        Ok(Arc::new(FiniteGroup {
            name: name.to_string(),
            degree,
            elements,
            lookup,
            table,
            inverses,
            orders,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, g: usize) -> &Permutation {
        &self.elements[g]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        if p.degree() > self.degree {
            return None;
        }
        self.lookup.get(&p.extend_to(self.degree)).copied()
    }

    pub fn check(&self, g: usize) -> Result<usize> {
        if g < self.order() {
            Ok(g)
        } else {
            Err(Error::InvalidIndex {
                index: g,
                order: self.order(),
            })
        }
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order() + h] as usize
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverses[g] as usize
    }

    pub fn pow(&self, g: usize, k: u64) -> usize {
        let d = self.orders[g] as u64;
        let mut acc = 0usize;
        for _ in 0..(k % d) {
            acc = self.mul(acc, g);
        }
        acc
    }

    pub fn element_order(&self, g: usize) -> Result<usize> {
        self.check(g)?;
        Ok(self.orders[g] as usize)
    }

    /// `x⁻¹ h x`.
    pub fn conjugate(&self, x: usize, h: usize) -> Result<usize> {
        self.check(x)?;
        self.check(h)?;
        Ok(self.mul(self.mul(self.inv(x), h), x))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|g| (0..n).all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    /// Parses an element in cycle notation.
    pub fn parse_element(&self, text: &str) -> Result<usize> {
        let p = Permutation::parse_cycles(self.degree, text)?;
        self.index_of(&p)
            .ok_or_else(|| Error::NotInGroup(p.to_string()))
    }

    pub fn element_word(&self, g: usize) -> String {
        self.elements[g].to_string()
    }

    /// Cyclic powers `1, h, h^2, .., h^{d-1}`.
    pub fn powers(&self, h: usize) -> Vec<usize> {
        let d = self.orders[h] as usize;
        let mut out = Vec::with_capacity(d);
        let mut p = 0;
        for _ in 0..d {
            out.push(p);
            p = self.mul(p, h);
        }
        out
    }
}

/// A subgroup, stored as a sorted set of element indices of its parent.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Vec<usize>,
    mask: Vec<bool>,
    generators: Vec<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.parent, &other.parent) && self.members == other.members
    }
}

impl Eq for Subgroup {}

pub fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Subgroup {
    /// Smallest subgroup containing `gens`.
    pub fn generated(group: &Arc<FiniteGroup>, gens: &[usize]) -> Result<Subgroup> {
        for &g in gens {
            group.check(g)?;
        }
        let n = group.order();
        let mut mask = vec![false; n];
        mask[0] = true;
        let mut members = vec![0usize];
        let mut i = 0;
        while i < members.len() {
            let g = members[i];
            for &s in gens {
                let p = group.mul(g, s);
                if !mask[p] {
                    mask[p] = true;
                    members.push(p);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        Ok(Subgroup {
            parent: Arc::clone(group),
            members,
            mask,
            generators: gens.to_vec(),
        })
    }

    pub fn cyclic(group: &Arc<FiniteGroup>, h: usize) -> Result<Subgroup> {
        Self::generated(group, &[h])
    }

    pub fn trivial(group: &Arc<FiniteGroup>) -> Subgroup {
        Self::generated(group, &[]).expect("no generators to validate")
    }

    /// Builds a subgroup from an explicit member set, checking closure.
    pub fn from_members(group: &Arc<FiniteGroup>, members: &[usize]) -> Result<Subgroup> {
        let sub = Self::generated(group, members)?;
        if sub.order() != {
            let mut m = members.to_vec();
            m.sort_unstable();
            m.dedup();
            m.len()
        } {
            return Err(Error::Verification("member set is not closed".into()));
        }
        Ok(sub)
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.mask.get(g).copied().unwrap_or(false)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        same_group(&self.parent, &other.parent) && self.members.iter().all(|&g| other.contains(g))
    }

    /// `x K x⁻¹`.
    pub fn conjugated_by(&self, x: usize) -> Subgroup {
        let g = &self.parent;
        let xi = g.inv(x);
        let gens: Vec<usize> = self
            .generators
            .iter()
            .map(|&k| g.mul(g.mul(x, k), xi))
            .collect();
        let mut sub = Subgroup::generated(g, &gens).expect("indices come from the parent");
        debug_assert_eq!(sub.order(), self.order());
        sub.generators = gens;
        sub
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Arc<FiniteGroup> {
        FiniteGroup::from_spec("S3").unwrap()
    }

    #[test]
    fn symmetric_orders() {
        for (n, order) in [(1, 1), (2, 2), (3, 6), (4, 24), (5, 120)] {
            assert_eq!(
                FiniteGroup::from_spec(&format!("S{n}")).unwrap().order(),
                order
            );
        }
    }

    #[test]
    fn other_families() {
        assert_eq!(FiniteGroup::from_spec("A5").unwrap().order(), 60);
        assert_eq!(FiniteGroup::from_spec("A4").unwrap().order(), 12);
        assert_eq!(FiniteGroup::from_spec("C7").unwrap().order(), 7);
        assert_eq!(FiniteGroup::from_spec("D12").unwrap().order(), 24);
        assert_eq!(FiniteGroup::from_spec("D6").unwrap().order(), 12);
        assert_eq!(FiniteGroup::from_spec("D2").unwrap().order(), 4);
        assert_eq!(FiniteGroup::from_spec("D1").unwrap().order(), 2);
        let q8 = FiniteGroup::from_spec("perm:8:(1,2,3,4)(5,6,7,8);(1,5,3,7)(2,8,4,6)").unwrap();
        assert_eq!(q8.order(), 8);
    }

    #[test]
    fn a5_presentation() {
        let g = FiniteGroup::from_spec("A5").unwrap();
        let a = g.parse_element("(1,2)(3,4)").unwrap();
        let b = g.parse_element("(1,3,5)").unwrap();
        let c = g.parse_element("(1,2,3,4,5)").unwrap();
        assert_eq!(g.element_order(a).unwrap(), 2);
        assert_eq!(g.element_order(b).unwrap(), 3);
        assert_eq!(g.mul(b, a), c);
        assert_eq!(g.element_order(g.mul(b, a)).unwrap(), 5);
    }

    #[test]
    fn malformed_specs() {
        for bad in [
            "",
            "X4",
            "S",
            "S0",
            "perm:3",
            "perm:3:(1,4)",
            "perm:3:(1,2",
            "Sx",
        ] {
            let err = FiniteGroup::from_spec(bad).unwrap_err();
            assert!(err.is_usage(), "{bad}: {err}");
        }
        assert!(matches!(
            FiniteGroup::from_spec_with_cap("S6", 100),
            Err(Error::OrderCapExceeded { cap: 100 })
        ));
    }

    #[test]
    fn element_orders_and_conjugation() {
        let g = s3();
        let sigma = g.parse_element("(1,2,3)").unwrap();
        let tau = g.parse_element("(1,2)").unwrap();
        assert_eq!(g.element_order(0).unwrap(), 1);
        assert_eq!(g.element_order(tau).unwrap(), 2);
        assert_eq!(g.element_order(sigma).unwrap(), 3);
        assert_eq!(g.conjugate(0, sigma).unwrap(), sigma);
        assert_eq!(g.conjugate(tau, 0).unwrap(), 0);
        assert_eq!(g.conjugate(tau, sigma).unwrap(), g.mul(sigma, sigma));
        assert!(g.element_order(99).is_err());
    }

    #[test]
    fn subgroups() {
        let g = s3();
        let sigma = g.parse_element("(1,2,3)").unwrap();
        let tau = g.parse_element("(1,2)").unwrap();
        assert_eq!(Subgroup::generated(&g, &[]).unwrap().members(), &[0]);
        let st = g.mul(sigma, tau);
        let sub = Subgroup::cyclic(&g, st).unwrap();
        assert_eq!(sub.order(), 2);
        assert!(sub.contains(st));
        let c3 = Subgroup::cyclic(&g, sigma).unwrap();
        let mut expect = vec![0, sigma, g.mul(sigma, sigma)];
        expect.sort();
        assert_eq!(c3.members(), expect.as_slice());
        assert_eq!(Subgroup::generated(&g, &[sigma, tau]).unwrap().order(), 6);
    }

    #[test]
    fn cycle_notation_round_trip() {
        let g = FiniteGroup::from_spec("S5").unwrap();
        for i in 0..g.order() {
            let w = g.element_word(i);
            assert_eq!(g.parse_element(&w).unwrap(), i);
        }
        assert_eq!(g.element_word(0), "()");
    }

    #[test]
    fn deterministic_and_lagrange() {
        for spec in ["S4", "A5", "D6"] {
            let g1 = FiniteGroup::from_spec(spec).unwrap();
            let g2 = FiniteGroup::from_spec(spec).unwrap();
            assert_eq!(g1.elements(), g2.elements());
            assert_eq!(g1.table, g2.table);
            for x in 0..g1.order() {
                assert_eq!(g1.mul(x, g1.inv(x)), 0);
                assert_eq!(g1.mul(g1.inv(x), x), 0);
                assert_eq!(g1.order() % g1.element_order(x).unwrap(), 0);
            }
        }
    }
}
