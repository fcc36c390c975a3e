//! Small finite groups as permutation groups.
//!
//! Permutations act on the right: `p.then(q)` applies `p` first. Points are
//! 0-based internally; the JSON group format uses 1-based images.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::factor_u64;

/// Default cap on enumerated group orders.
pub const DEFAULT_GROUP_CAP: usize = 200_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm((0..degree as u32).collect())
    }

    /// Checks that `images` is a bijection of `0..images.len()`.
    pub fn new(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::invalid(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Perm(images.into_iter().map(|x| x as u32).collect()))
    }

    /// Builds a permutation of `0..degree` from 1-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Perm> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                let y = cycle[(i + 1) % cycle.len()];
                if x == 0 || y == 0 || x > degree || y > degree {
                    return Err(Error::invalid(format!("cycle point out of range 1..={degree}")));
                }
                images[x - 1] = y - 1;
            }
        }
        Perm::new(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn image(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize).collect()
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn pow(&self, mut e: u64) -> Perm {
        let mut acc = Perm::identity(self.degree());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    /// `g x g⁻¹` in right-action notation, i.e. `g⁻¹` first.
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().then(self).then(g)
    }

    pub fn commutator(&self, other: &Perm) -> Perm {
        self.then(other).then(&self.inverse()).then(&other.inverse())
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.0.len()];
        let mut order = 1u64;
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            order = num_integer::lcm(order, len);
        }
        order
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Perm {
    /// Cycle notation with 1-based points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut any = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{}", x + 1)?;
                x = self.0[x] as usize;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Permutation group given by generators, with a lazily filled element cache.
#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    cap: usize,
    cache: OnceLock<Elements>,
}

#[derive(Debug)]
struct Elements {
    list: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        let cache = OnceLock::new();
        if let Some(e) = self.cache.get() {
            let _ = cache.set(Elements { list: e.list.clone(), index: e.index.clone() });
        }
        PermGroup { degree: self.degree, generators: self.generators.clone(), cap: self.cap, cache }
    }
}

/// Result of [`PermGroup::structure_tests`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub abelian: bool,
    pub elementary_abelian: bool,
    pub exponent: u64,
    /// Abelian with squarefree exponent, i.e. a product of groups of prime
    /// order possibly for several primes.
    pub squarefree_abelian: bool,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<PermGroup> {
        if generators.iter().any(|g| g.degree() != degree) {
            return Err(Error::invalid(format!("generator degree differs from {degree}")));
        }
        Ok(PermGroup { degree, generators, cap: DEFAULT_GROUP_CAP, cache: OnceLock::new() })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::new(degree, Vec::new()).expect("no generators")
    }

    pub fn with_cap(mut self, cap: usize) -> PermGroup {
        if self.cache.get().is_some_and(|e| e.list.len() > cap) {
            self.cache = OnceLock::new();
        }
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Subgroup of `self` on given generators, inheriting the cap.
    pub fn subgroup(&self, generators: Vec<Perm>) -> Result<PermGroup> {
        Ok(PermGroup::new(self.degree, generators)?.with_cap(self.cap))
    }

    fn elements_impl(&self) -> Result<&Elements> {
        if let Some(e) = self.cache.get() {
            return Ok(e);
        }
        let id = Perm::identity(self.degree);
        let mut list = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut head = 0;
        while head < list.len() {
            let g = list[head].clone();
            head += 1;
            for s in &self.generators {
                let h = g.then(s);
                if !index.contains_key(&h) {
                    if list.len() >= self.cap {
                        return Err(Error::cap("group order", self.cap as u64));
                    }
                    index.insert(h.clone(), list.len());
                    list.push(h);
                }
            }
        }
        let _ = self.cache.set(Elements { list, index });
        Ok(self.cache.get().expect("just set"))
    }

    /// All elements in breadth-first order from the identity.
    pub fn enumerate(&self) -> Result<&[Perm]> {
        Ok(&self.elements_impl()?.list)
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.enumerate()?.len())
    }

    pub fn contains(&self, g: &Perm) -> Result<bool> {
        Ok(self.elements_impl()?.index.contains_key(g))
    }

    /// Position of `g` in [`PermGroup::enumerate`].
    pub fn position(&self, g: &Perm) -> Result<Option<usize>> {
        Ok(self.elements_impl()?.index.get(g).copied())
    }

    pub fn is_abelian(&self) -> bool {
        let gens = &self.generators;
        gens.iter().enumerate().all(|(i, g)| gens[i + 1..].iter().all(|h| g.then(h) == h.then(g)))
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> Result<bool> {
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when `sub` is normalized by every generator of `self`.
    pub fn is_normal(&self, sub: &PermGroup) -> Result<bool> {
        if !sub.is_subgroup_of(self)? {
            return Ok(false);
        }
        for g in &self.generators {
            for n in &sub.generators {
                if !sub.contains(&n.conjugate_by(g))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Smallest normal subgroup of `self` containing `seeds`.
    pub fn normal_closure(&self, seeds: Vec<Perm>) -> Result<PermGroup> {
        let mut gens: Vec<Perm> = seeds.into_iter().filter(|s| !s.is_identity()).collect();
        loop {
            let sub = self.subgroup(gens.clone())?;
            let mut extra = None;
            'search: for g in &self.generators {
                for n in &gens {
                    let c = n.conjugate_by(g);
                    if !sub.contains(&c)? {
                        extra = Some(c);
                        break 'search;
                    }
                }
            }
            match extra {
                Some(c) => gens.push(c),
                None => {
                    sub.enumerate()?;
                    return Ok(sub);
                }
            }
        }
    }

    pub fn derived_subgroup(&self) -> Result<PermGroup> {
        let gens = &self.generators;
        let mut comms = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            for h in &gens[i + 1..] {
                comms.push(g.commutator(h));
            }
        }
        let d = self.normal_closure(comms)?;
        debug_assert_eq!(self.order()? % d.order()?, 0);
        Ok(d)
    }

    fn normalizes(&self, g: &Perm, sub: &PermGroup) -> Result<bool> {
        for n in &sub.generators {
            if !sub.contains(&n.conjugate_by(g))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A Sylow `p`-subgroup, grown through normalizers; trivial if `p` does
    /// not divide the order.
    pub fn sylow(&self, p: u64) -> Result<PermGroup> {
        let order = self.order()? as u64;
        let mut target = 1u64;
        let mut rest = order;
        while rest % p == 0 && p > 1 {
            rest /= p;
            target *= p;
        }
        let mut gens: Vec<Perm> = Vec::new();
        let mut sylow = self.subgroup(Vec::new())?;
        while (sylow.order()? as u64) < target {
            // an element of N(P) \ P with p-th power in P has order p in N(P)/P
            let mut found = None;
            for g in self.enumerate()? {
                if !sylow.contains(g)? && sylow.contains(&g.pow(p))? && self.normalizes(g, &sylow)? {
                    found = Some(g.clone());
                    break;
                }
            }
            let g = found.ok_or_else(|| Error::invalid("normalizer growth stalled"))?;
            gens.push(g);
            sylow = self.subgroup(gens.clone())?;
        }
        debug_assert_eq!(sylow.order()? as u64, target);
        Ok(sylow)
    }

    /// Coset label of every element for a normal subgroup `sub`, plus the
    /// number of cosets.
    fn coset_labels(&self, sub: &PermGroup) -> Result<(Vec<usize>, usize)> {
        let elems = self.enumerate()?;
        let sub_elems = sub.enumerate()?;
        let mut label = vec![usize::MAX; elems.len()];
        let mut count = 0;
        for (i, g) in elems.iter().enumerate() {
            if label[i] != usize::MAX {
                continue;
            }
            for n in sub_elems {
                let j = self.position(&n.then(g))?.ok_or_else(|| Error::invalid("subgroup not contained in group"))?;
                label[j] = count;
            }
            count += 1;
        }
        Ok((label, count))
    }

    /// The action of `self` on the cosets of a normal subgroup.
    pub fn quotient(&self, normal: &PermGroup) -> Result<PermGroup> {
        if !self.is_normal(normal)? {
            return Err(Error::invalid("subgroup is not normal"));
        }
        let (label, count) = self.coset_labels(normal)?;
        let elems = self.enumerate()?;
        let mut reps = vec![usize::MAX; count];
        for (i, &l) in label.iter().enumerate() {
            if reps[l] == usize::MAX {
                reps[l] = i;
            }
        }
        let mut gens = Vec::new();
        for s in &self.generators {
            let images = reps
                .iter()
                .map(|&r| Ok(label[self.position(&elems[r].then(s))?.expect("closed")]))
                .collect::<Result<Vec<_>>>()?;
            gens.push(Perm::new(images)?);
        }
        let q = PermGroup::new(count, gens)?.with_cap(self.cap);
        debug_assert_eq!(q.order()? * normal.order()?, self.order()?);
        Ok(q)
    }

    /// Elements `x` of prime order with `<x>` normal, in sorted order.
    pub fn prime_order_normal_elements(&self) -> Result<Vec<Perm>> {
        let mut elems: Vec<Perm> = self.enumerate()?.to_vec();
        elems.sort();
        let mut out = Vec::new();
        for x in elems {
            let o = x.order();
            if o < 2 || !crate::numtheory::is_prime_u64(o) {
                continue;
            }
            let cyc = self.subgroup(vec![x.clone()])?;
            if self.normalizes_all(&cyc)? {
                out.push(x);
            }
        }
        Ok(out)
    }

    fn normalizes_all(&self, sub: &PermGroup) -> Result<bool> {
        for g in &self.generators {
            if !self.normalizes(g, sub)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Recursion on cyclic normal subgroups of prime order; any choice is
    /// conclusive because quotients of supersolvable groups are supersolvable.
    pub fn is_supersolvable(&self) -> Result<bool> {
        let mut g = self.clone();
        loop {
            if g.order()? == 1 {
                return Ok(true);
            }
            let candidates = g.prime_order_normal_elements()?;
            let Some(x) = candidates.into_iter().next() else {
                return Ok(false);
            };
            let n = g.subgroup(vec![x])?;
            g = g.quotient(&n)?;
        }
    }

    pub fn exponent(&self) -> Result<u64> {
        Ok(self.enumerate()?.iter().fold(1, |acc, g| num_integer::lcm(acc, g.order())))
    }

    pub fn structure_tests(&self) -> Result<StructureReport> {
        let abelian = self.is_abelian();
        let exponent = self.exponent()?;
        let factors = factor_u64(exponent);
        let squarefree = factors.iter().all(|&(_, e)| e == 1);
        Ok(StructureReport {
            abelian,
            elementary_abelian: abelian && squarefree && factors.len() <= 1,
            exponent,
            squarefree_abelian: abelian && squarefree,
        })
    }

    /// Distinct primes dividing the order.
    pub fn prime_divisors(&self) -> Result<Vec<u64>> {
        Ok(factor_u64(self.order()? as u64).into_iter().map(|(p, _)| p).collect())
    }

    /// Multiplication table indexed by [`PermGroup::enumerate`] positions.
    pub fn cayley_table(&self) -> Result<Vec<Vec<usize>>> {
        let elems = self.enumerate()?;
        elems
            .iter()
            .map(|g| elems.iter().map(|h| Ok(self.position(&g.then(h))?.expect("closed"))).collect())
            .collect()
    }

    /// Regular representation on the enumerated elements: generator `s`
    /// sends `g` to `g s`.
    pub fn regular_representation(&self) -> Result<PermGroup> {
        let elems = self.enumerate()?;
        let gens = self
            .generators
            .iter()
            .map(|s| {
                let images = elems
                    .iter()
                    .map(|g| Ok(self.position(&g.then(s))?.expect("closed")))
                    .collect::<Result<Vec<_>>>()?;
                Perm::new(images)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PermGroup::new(elems.len(), gens)?.with_cap(self.cap))
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            degree: self.degree,
            generators: self.generators.iter().map(|g| g.images().into_iter().map(|x| x + 1).collect()).collect(),
        }
    }
}

/// `{degree, generators}` with 1-based images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

impl GroupJson {
    pub fn to_group(&self) -> Result<PermGroup> {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                if g.len() != self.degree || g.iter().any(|&x| x == 0) {
                    return Err(Error::invalid("generator images must be 1..=degree"));
                }
                Perm::new(g.iter().map(|&x| x - 1).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        PermGroup::new(self.degree, gens)
    }
}

/// `{order, table}` with 0-based entries; `table[i][j]` is the product of
/// elements `i` and `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl CayleyJson {
    /// Validates the group axioms and returns the left-regular
    /// representation, `g` acting by `x -> g x`.
    pub fn to_group(&self) -> Result<PermGroup> {
        let n = self.order;
        if n == 0 || self.table.len() != n || self.table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::invalid("table must be order x order with entries below order"));
        }
        let t = &self.table;
        let e = (0..n)
            .find(|&e| (0..n).all(|x| t[e][x] == x && t[x][e] == x))
            .ok_or_else(|| Error::invalid("no identity element"))?;
        for x in 0..n {
            if !(0..n).any(|y| t[x][y] == e) {
                return Err(Error::invalid(format!("element {x} has no inverse")));
            }
            for y in 0..n {
                for z in 0..n {
                    if t[t[x][y]][z] != t[x][t[y][z]] {
                        return Err(Error::invalid("table is not associative"));
                    }
                }
            }
        }
        let gens = (0..n).map(|g| Perm::new((0..n).map(|x| t[g][x]).collect())).collect::<Result<Vec<_>>>()?;
        PermGroup::new(n, gens)
    }
}

/// Named small groups used as fixtures and in the CLI.
pub mod named {
    use super::*;

    pub fn cyclic(n: usize) -> PermGroup {
        let images = (0..n).map(|i| (i + 1) % n).collect();
        PermGroup::new(n, vec![Perm::new(images).expect("cycle")]).expect("degree")
    }

    pub fn symmetric(n: usize) -> PermGroup {
        if n < 2 {
            return PermGroup::trivial(n);
        }
        let swap = Perm::from_cycles(n, &[&[1, 2]]).expect("valid");
        let cycle: Vec<usize> = (1..=n).collect();
        let long = Perm::from_cycles(n, &[&cycle]).expect("valid");
        PermGroup::new(n, vec![swap, long]).expect("degree")
    }

    /// Generated by the 3-cycles `(1 2 k)`.
    pub fn alternating(n: usize) -> PermGroup {
        let gens = (3..=n).map(|k| Perm::from_cycles(n, &[&[1, 2, k]]).expect("valid")).collect();
        PermGroup::new(n, gens).expect("degree")
    }

    /// Symmetries of the `n`-gon, order `2n`.
    pub fn dihedral(n: usize) -> PermGroup {
        let rot = Perm::new((0..n).map(|i| (i + 1) % n).collect()).expect("valid");
        let refl = Perm::new((0..n).map(|i| (n - i) % n).collect()).expect("valid");
        PermGroup::new(n, vec![rot, refl]).expect("degree")
    }

    /// `Q_8` acting regularly on `±1, ±i, ±j, ±k`, generated by `i` and `j`.
    pub fn quaternion() -> PermGroup {
        // points: 0=1 1=i 2=j 3=k 4=-1 5=-i 6=-j 7=-k; right multiplication
        let i = Perm::new(vec![1, 4, 7, 2, 5, 0, 3, 6]).expect("valid");
        let j = Perm::new(vec![2, 3, 4, 5, 6, 7, 0, 1]).expect("valid");
        PermGroup::new(8, vec![i, j]).expect("degree")
    }

    /// Direct product acting on the disjoint union of the point sets.
    pub fn direct_product(g: &PermGroup, h: &PermGroup) -> PermGroup {
        let (m, n) = (g.degree(), h.degree());
        let mut gens = Vec::new();
        for s in g.generators() {
            let mut images = s.images();
            images.extend(m..m + n);
            gens.push(Perm::new(images).expect("valid"));
        }
        for s in h.generators() {
            let mut images: Vec<usize> = (0..m).collect();
            images.extend(s.images().into_iter().map(|x| x + m));
            gens.push(Perm::new(images).expect("valid"));
        }
        PermGroup::new(m + n, gens).expect("degree")
    }

    /// Looks up `S3`, `S4`, `A4`, `D4`, `Q8`, `C<n>`, `S<n>`, `A<n>`, `D<n>`.
    pub fn by_name(name: &str) -> Result<PermGroup> {
        let upper = name.trim().to_ascii_uppercase();
        if upper == "Q8" {
            return Ok(quaternion());
        }
        let (kind, rest) = upper.split_at(1.min(upper.len()));
        let n: usize = rest.parse().map_err(|_| Error::Parse(format!("unknown group {name:?}")))?;
        if n == 0 || n > 64 {
            return Err(Error::invalid(format!("group parameter {n} out of range")));
        }
        match kind {
            "C" => Ok(cyclic(n)),
            "S" => Ok(symmetric(n)),
            "A" => Ok(alternating(n)),
            "D" if n >= 3 => Ok(dihedral(n)),
            _ => Err(Error::Parse(format!("unknown group {name:?}"))),
        }
    }
}

/// Order of each element, tallied: order -> count.
pub fn order_statistics(g: &PermGroup) -> Result<BTreeMap<u64, usize>> {
    let mut out = BTreeMap::new();
    for x in g.enumerate()? {
        *out.entry(x.order()).or_insert(0) += 1;
    }
    Ok(out)
}
