//! The pseudovariety `Ab(p) * Ab(d)`: the groups `G_{p,d} = C_p ⋊ C_d`, the
//! relatively free groups `F_n(p,d)`, closures of subgroups of `F_n` in the
//! corresponding pro-topology, and embeddings of presented groups into
//! products of `G_{p,d}` and `C_d`.
//!
//! `F_n(p,d)` is modelled linearly. A word `w` evaluated at an assignment
//! `a_i -> x^{u_i} y^{t_i}` gives `x^{Σ_i u_i c_i(t)} y^{<τ,t>}`, where `τ` is
//! the exponent-sum vector of `w` mod `d` and `c_i : Z_d^n -> F_p` depends on
//! `w` only. The pair `(τ, c)` determines the whole tuple of values, so it is
//! the element; products are `(τ,c)(τ',c') = (τ+τ', c + D(τ)c')` with
//! `D(τ)` scaling the coordinate at `t` by `q^{<τ,t>}`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finitegroup::{Perm, PermGroup};
use crate::fplinalg::ApdPresentation;
use crate::freeword::Word;
use crate::numtheory::{is_prime_u64, pow_mod_u64, q_sets};
use crate::stallings::Automaton;

/// Default cap on enumerated free-object elements and on coset counts.
pub const DEFAULT_APD_CAP: usize = 200_000;

/// `x^u y^t` in `G_{p,d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GpdElement {
    pub u: u64,
    pub t: u64,
}

impl GpdElement {
    pub fn is_identity(&self) -> bool {
        self.u == 0 && self.t == 0
    }
}

impl fmt::Display for GpdElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |sym: &str, e: u64| match e {
            0 => String::new(),
            1 => sym.to_string(),
            _ => format!("{sym}^{e}"),
        };
        match (self.u, self.t) {
            (0, 0) => write!(f, "1"),
            (u, 0) => write!(f, "{}", part("x", u)),
            (0, t) => write!(f, "{}", part("y", t)),
            (u, t) => write!(f, "{} {}", part("x", u), part("y", t)),
        }
    }
}

/// `⟨x, y | x^p, y^d, y x y⁻¹ = x^q⟩` with `q` of multiplicative order `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GpdGroup {
    p: u64,
    d: u64,
    q: u64,
}

fn check_pd(p: u64, d: u64) -> Result<()> {
    if p < 3 || !is_prime_u64(p) || p > u32::MAX as u64 {
        return Err(Error::invalid(format!("p = {p} must be an odd prime below 2^32")));
    }
    if d < 2 || (p - 1) % d != 0 {
        return Err(Error::invalid(format!("d = {d} must satisfy 1 < d | p - 1 = {}", p - 1)));
    }
    Ok(())
}

/// Smallest element of multiplicative order exactly `d` mod `p`.
pub fn default_q(p: u64, d: u64) -> Result<u64> {
    check_pd(p, d)?;
    let (_, exact) = q_sets(p, d)?;
    Ok(*exact.iter().next().expect("F_p^* is cyclic"))
}

impl GpdGroup {
    pub fn new(p: u64, d: u64, q: Option<u64>) -> Result<GpdGroup> {
        check_pd(p, d)?;
        let q = match q {
            None => default_q(p, d)?,
            Some(q) => {
                let (_, exact) = q_sets(p, d)?;
                if !exact.contains(&(q % p)) {
                    return Err(Error::invalid(format!("{q} does not have order {d} mod {p}")));
                }
                q % p
            }
        };
        Ok(GpdGroup { p, d, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn order(&self) -> u64 {
        self.p * self.d
    }

    pub fn element(&self, u: i64, t: i64) -> GpdElement {
        GpdElement { u: u.rem_euclid(self.p as i64) as u64, t: t.rem_euclid(self.d as i64) as u64 }
    }

    pub fn identity(&self) -> GpdElement {
        GpdElement { u: 0, t: 0 }
    }

    pub fn x(&self) -> GpdElement {
        GpdElement { u: 1, t: 0 }
    }

    pub fn y(&self) -> GpdElement {
        GpdElement { u: 0, t: 1 }
    }

    pub fn mul(&self, a: GpdElement, b: GpdElement) -> GpdElement {
        let qt = pow_mod_u64(self.q, a.t, self.p);
        GpdElement { u: (a.u + qt * b.u) % self.p, t: (a.t + b.t) % self.d }
    }

    pub fn inverse(&self, a: GpdElement) -> GpdElement {
        let t = (self.d - a.t) % self.d;
        let qt = pow_mod_u64(self.q, t, self.p);
        GpdElement { u: (self.p - qt * a.u % self.p) % self.p, t }
    }

    pub fn pow(&self, a: GpdElement, e: i64) -> GpdElement {
        let base = if e < 0 { self.inverse(a) } else { a };
        let mut acc = self.identity();
        for _ in 0..e.unsigned_abs() % self.order() {
            acc = self.mul(acc, base);
        }
        acc
    }

    /// All `pd` elements, ordered by `(u, t)`.
    pub fn elements(&self) -> Vec<GpdElement> {
        (0..self.p).flat_map(|u| (0..self.d).map(move |t| GpdElement { u, t })).collect()
    }

    /// Image of `w` under `a_i -> images[i]`.
    pub fn eval_word(&self, w: &Word, images: &[GpdElement]) -> Result<GpdElement> {
        if images.len() != w.rank() {
            return Err(Error::RankMismatch { left: w.rank(), right: images.len() });
        }
        let inverses: Vec<GpdElement> = images.iter().map(|&g| self.inverse(g)).collect();
        Ok(w.letters().iter().fold(self.identity(), |acc, l| {
            let g = if l.is_inverse() { inverses[l.generator()] } else { images[l.generator()] };
            self.mul(acc, g)
        }))
    }

    /// Faithful action on `F_p` by `z -> u + q^t z`, written for right
    /// actions (each element acts by the inverse affine map).
    pub fn to_perm_group(&self) -> PermGroup {
        let perm = |g: GpdElement| {
            let h = self.inverse(g);
            let qt = pow_mod_u64(self.q, h.t, self.p);
            Perm::new((0..self.p).map(|z| ((h.u + qt * z) % self.p) as usize).collect()).expect("affine bijection")
        };
        PermGroup::new(self.p as usize, vec![perm(self.x()), perm(self.y())]).expect("degree p")
    }
}

/// Exponents realizing `G^{(q)} ≅ G^{(r)}` by `y -> y^m` and back by `y -> y^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GpdIso {
    pub m: u64,
    pub k: u64,
}

/// Finds `r^m = q`, `q^k = r` and checks both maps are mutually inverse
/// homomorphisms on every element.
pub fn gpd_iso(p: u64, d: u64, q: u64, r: u64) -> Result<GpdIso> {
    let gq = GpdGroup::new(p, d, Some(q))?;
    let gr = GpdGroup::new(p, d, Some(r))?;
    let dlog = |base: u64, target: u64| (1..=d).find(|&e| pow_mod_u64(base, e, p) == target).expect("same cyclic group");
    let m = dlog(gr.q, gq.q);
    let k = dlog(gq.q, gr.q);
    let phi = |g: GpdElement, e: u64| GpdElement { u: g.u, t: g.t * e % d };
    for a in gq.elements() {
        for b in gq.elements() {
            if phi(gq.mul(a, b), m) != gr.mul(phi(a, m), phi(b, m)) || phi(gr.mul(a, b), k) != gq.mul(phi(a, k), phi(b, k)) {
                return Err(Error::invalid("isomorphism check failed"));
            }
        }
        if phi(phi(a, m), k) != a || phi(phi(a, k), m) != a {
            return Err(Error::invalid("maps are not mutually inverse"));
        }
    }
    debug_assert_eq!(m * k % d, 1 % d);
    Ok(GpdIso { m, k })
}

/// An element `(τ, c)` of `F_n(p,d)`; `c` is indexed by `i * d^n + t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeElement {
    tau: Vec<u32>,
    c: Vec<u32>,
}

impl FreeElement {
    pub fn tau(&self) -> &[u32] {
        &self.tau
    }

    pub fn is_identity(&self) -> bool {
        self.tau.iter().all(|&x| x == 0) && self.c.iter().all(|&x| x == 0)
    }
}

/// Row-reduced basis of a subspace of `F_p^len`.
#[derive(Debug, Clone)]
struct Subspace {
    p: u64,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    fn new(p: u64) -> Self {
        Subspace { p, rows: Vec::new(), pivots: Vec::new() }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Canonical coset representative: zero at every pivot.
    fn reduce(&self, v: &mut [u32]) {
        let p = self.p;
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let f = v[piv] as u64;
            if f != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = ((*x as u64 + p * p - f * y as u64) % p) as u32;
                }
            }
        }
    }

    fn insert(&mut self, mut v: Vec<u32>) -> bool {
        self.reduce(&mut v);
        let Some(piv) = v.iter().position(|&x| x != 0) else { return false };
        let p = self.p;
        let inv = crate::numtheory::inv_mod_u64(v[piv] as u64, p).expect("field");
        for x in v.iter_mut() {
            *x = (*x as u64 * inv % p) as u32;
        }
        for row in self.rows.iter_mut() {
            let f = row[piv] as u64;
            if f != 0 {
                for (x, &y) in row.iter_mut().zip(&v) {
                    *x = ((*x as u64 + p * p - f * y as u64) % p) as u32;
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(piv);
        true
    }
}

/// `F_n(p,d)` for a fixed choice of `q`.
#[derive(Debug, Clone)]
pub struct FreeObject {
    n: usize,
    p: u64,
    d: u64,
    q: u64,
    cells: usize,
    digits: Vec<Vec<u32>>,
    qpow: Vec<u64>,
    gens: Vec<FreeElement>,
    gen_invs: Vec<FreeElement>,
    /// Dimension of the subspace of elements with `τ = 0`.
    dim_kernel: usize,
}

impl FreeObject {
    pub fn new(n: usize, p: u64, d: u64) -> Result<FreeObject> {
        FreeObject::with_q(n, p, d, None)
    }

    pub fn with_q(n: usize, p: u64, d: u64, q: Option<u64>) -> Result<FreeObject> {
        let g = GpdGroup::new(p, d, q)?;
        if n == 0 || n > crate::freeword::MAX_RANK {
            return Err(Error::invalid(format!("rank {n} out of range")));
        }
        let cells = (d as usize)
            .checked_pow(n as u32)
            .filter(|&c| c.saturating_mul(n) <= 1 << 22)
            .ok_or_else(|| Error::cap("free object coordinate count", 1 << 22))?;
        let digits = (0..cells)
            .map(|mut s| {
                (0..n)
                    .map(|_| {
                        let x = (s % d as usize) as u32;
                        s /= d as usize;
                        x
                    })
                    .collect()
            })
            .collect();
        let qpow = (0..d).map(|e| pow_mod_u64(g.q, e, p)).collect();
        let mut fo = FreeObject { n, p, d, q: g.q, cells, digits, qpow, gens: Vec::new(), gen_invs: Vec::new(), dim_kernel: 0 };
        fo.gens = (0..n)
            .map(|i| {
                let mut tau = vec![0; n];
                tau[i] = 1;
                let mut c = vec![0; n * cells];
                c[i * cells..(i + 1) * cells].fill(1);
                FreeElement { tau, c }
            })
            .collect();
        fo.gen_invs = fo.gens.iter().map(|g| fo.inverse(g)).collect();
        let all = fo.gens.clone();
        fo.dim_kernel = ImageSubgroup::new(&fo, &all).w.dim();
        Ok(fo)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn group(&self) -> GpdGroup {
        GpdGroup { p: self.p, d: self.d, q: self.q }
    }

    /// `d^n * p^{dim}` computed from the model.
    pub fn order(&self) -> BigUint {
        BigUint::from(self.d).pow(self.n as u32) * BigUint::from(self.p).pow(self.dim_kernel as u32)
    }

    /// `p^{(n-1)d^n + 1} * d^n`.
    pub fn formula_order(&self) -> BigUint {
        let e = (self.n - 1) * self.cells + 1;
        BigUint::from(self.p).pow(e as u32) * BigUint::from(self.d).pow(self.n as u32)
    }

    fn exponent(&self, tau: &[u32], s: usize) -> usize {
        let dot: u64 = tau.iter().zip(&self.digits[s]).map(|(&a, &b)| a as u64 * b as u64).sum();
        (dot % self.d) as usize
    }

    /// `D(τ) c`.
    fn twist(&self, tau: &[u32], c: &[u32]) -> Vec<u32> {
        let mut out = c.to_vec();
        for s in 0..self.cells {
            let f = self.qpow[self.exponent(tau, s)];
            for i in 0..self.n {
                let k = i * self.cells + s;
                out[k] = (out[k] as u64 * f % self.p) as u32;
            }
        }
        out
    }

    pub fn identity(&self) -> FreeElement {
        FreeElement { tau: vec![0; self.n], c: vec![0; self.n * self.cells] }
    }

    pub fn generator(&self, i: usize) -> &FreeElement {
        &self.gens[i]
    }

    pub fn mul(&self, a: &FreeElement, b: &FreeElement) -> FreeElement {
        let tau = a.tau.iter().zip(&b.tau).map(|(&x, &y)| ((x + y) as u64 % self.d) as u32).collect();
        let tb = self.twist(&a.tau, &b.c);
        let c = a.c.iter().zip(&tb).map(|(&x, &y)| ((x as u64 + y as u64) % self.p) as u32).collect();
        FreeElement { tau, c }
    }

    pub fn inverse(&self, a: &FreeElement) -> FreeElement {
        let tau: Vec<u32> = a.tau.iter().map(|&x| ((self.d - x as u64) % self.d) as u32).collect();
        let c = self.twist(&tau, &a.c).into_iter().map(|x| ((self.p - x as u64) % self.p) as u32).collect();
        FreeElement { tau, c }
    }

    /// The canonical map `F_n -> F_n(p,d)`.
    pub fn eval(&self, w: &Word) -> Result<FreeElement> {
        if w.rank() != self.n {
            return Err(Error::RankMismatch { left: self.n, right: w.rank() });
        }
        Ok(w.letters().iter().fold(self.identity(), |acc, l| {
            let g = if l.is_inverse() { &self.gen_invs[l.generator()] } else { &self.gens[l.generator()] };
            self.mul(&acc, g)
        }))
    }

    /// Coordinate of `a` at the assignment `a_i -> assignment[i]`.
    pub fn tuple_at(&self, a: &FreeElement, assignment: &[GpdElement]) -> Result<GpdElement> {
        if assignment.len() != self.n {
            return Err(Error::RankMismatch { left: self.n, right: assignment.len() });
        }
        let g = self.group();
        let ts: Vec<u32> = assignment.iter().map(|x| (x.t % self.d) as u32).collect();
        let s = ts.iter().rev().fold(0usize, |acc, &t| acc * self.d as usize + t as usize);
        let u = (0..self.n).fold(0, |acc, i| (acc + (assignment[i].u % self.p) * a.c[i * self.cells + s] as u64) % self.p);
        let t = self.exponent(&a.tau, s) as i64;
        Ok(g.element(u as i64, t))
    }

    /// All elements in breadth-first order from the identity.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<FreeElement>> {
        if self.order() > BigUint::from(cap) {
            return Err(Error::cap("free object order", cap as u64));
        }
        let id = self.identity();
        let mut index = HashMap::from([(id.clone(), 0usize)]);
        let mut list = vec![id];
        let mut head = 0;
        while head < list.len() {
            for g in &self.gens {
                let h = self.mul(&list[head], g);
                if !index.contains_key(&h) {
                    index.insert(h.clone(), list.len());
                    list.push(h);
                }
            }
            head += 1;
        }
        Ok(list)
    }

    /// Right Cayley graph on the generators, i.e. the automaton of the
    /// kernel `L_{n,p,d}` of the canonical map.
    pub fn cayley_automaton(&self, cap: usize) -> Result<Automaton> {
        let elems = self.enumerate(cap)?;
        let index: HashMap<&FreeElement, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut edges = Vec::with_capacity(elems.len() * self.n);
        for (v, e) in elems.iter().enumerate() {
            for (a, g) in self.gens.iter().enumerate() {
                edges.push((v, a, index[&self.mul(e, g)]));
            }
        }
        Automaton::from_edges(self.n, elems.len(), 0, &edges)
    }

    fn tau_index(&self, tau: &[u32]) -> usize {
        tau.iter().rev().fold(0usize, |acc, &t| acc * self.d as usize + t as usize)
    }

    fn tau_of(&self, idx: usize) -> Vec<u32> {
        self.digits[idx].clone()
    }
}

/// The image `K` of a subgroup of `F_n` in `F_n(p,d)`: its projection
/// `T_K <= Z_d^n`, one representative per element of `T_K`, and the
/// subspace `W = K ∩ {τ = 0}`.
struct ImageSubgroup<'a> {
    fo: &'a FreeObject,
    in_t: Vec<bool>,
    t_members: Vec<usize>,
    reps: HashMap<usize, Vec<u32>>,
    w: Subspace,
}

impl<'a> ImageSubgroup<'a> {
    fn new(fo: &'a FreeObject, gens: &[FreeElement]) -> Self {
        let cells = fo.cells;
        let mut in_t = vec![false; cells];
        let mut reps: HashMap<usize, Vec<u32>> = HashMap::new();
        in_t[0] = true;
        reps.insert(0, vec![0; fo.n * cells]);
        let mut t_members = vec![0usize];
        let mut head = 0;
        while head < t_members.len() {
            let sigma = t_members[head];
            head += 1;
            let rep = FreeElement { tau: fo.tau_of(sigma), c: reps[&sigma].clone() };
            for g in gens {
                let next = fo.mul(&rep, g);
                let idx = fo.tau_index(&next.tau);
                if !in_t[idx] {
                    in_t[idx] = true;
                    reps.insert(idx, next.c);
                    t_members.push(idx);
                }
            }
        }
        // Schreier generators r_σ g r_{σ+σ_g}⁻¹ span K ∩ {τ = 0}
        let mut w = Subspace::new(fo.p);
        for &sigma in &t_members {
            let rep = FreeElement { tau: fo.tau_of(sigma), c: reps[&sigma].clone() };
            for g in gens {
                let next = fo.mul(&rep, g);
                let target = &reps[&fo.tau_index(&next.tau)];
                let diff = next.c.iter().zip(target).map(|(&x, &y)| ((x as u64 + fo.p - y as u64) % fo.p) as u32).collect();
                w.insert(diff);
            }
        }
        ImageSubgroup { fo, in_t, t_members, reps, w }
    }

    fn contains(&self, g: &FreeElement) -> bool {
        let idx = self.fo.tau_index(&g.tau);
        if !self.in_t[idx] {
            return false;
        }
        let p = self.fo.p;
        let mut diff: Vec<u32> =
            g.c.iter().zip(&self.reps[&idx]).map(|(&x, &y)| ((x as u64 + p - y as u64) % p) as u32).collect();
        self.w.reduce(&mut diff);
        diff.iter().all(|&x| x == 0)
    }

    /// `[F_n(p,d) : K]`.
    fn index(&self) -> BigUint {
        let t_index = self.fo.cells / self.t_members.len();
        BigUint::from(t_index) * BigUint::from(self.fo.p).pow((self.fo.dim_kernel - self.w.dim()) as u32)
    }

    /// Schreier graph of `F_n` on the right cosets `K g`.
    fn coset_automaton(&self, cap: usize) -> Result<Automaton> {
        let fo = self.fo;
        let count = self.index();
        if count > BigUint::from(cap) {
            return Err(Error::cap("coset count", cap as u64));
        }
        // smallest τ-index in each class τ + T_K, with the σ reaching it
        let mut class_min: Vec<(usize, usize)> = vec![(usize::MAX, 0); fo.cells];
        for tau in 0..fo.cells {
            if class_min[tau].0 != usize::MAX {
                continue;
            }
            let t = fo.tau_of(tau);
            let class: Vec<usize> = self
                .t_members
                .iter()
                .map(|&s| {
                    let sum: Vec<u32> = fo.tau_of(s).iter().zip(&t).map(|(&a, &b)| ((a + b) as u64 % fo.d) as u32).collect();
                    fo.tau_index(&sum)
                })
                .collect();
            let min = *class.iter().min().expect("non-empty");
            // σ = min - member lies in T_K and carries the class member to min
            for &member in &class {
                let mt = fo.tau_of(member);
                let mn = fo.tau_of(min);
                let sigma: Vec<u32> = mn.iter().zip(&mt).map(|(&a, &b)| ((a as u64 + fo.d - b as u64) % fo.d) as u32).collect();
                class_min[member] = (min, fo.tau_index(&sigma));
            }
        }
        let key = |g: &FreeElement| -> (usize, Vec<u32>) {
            let (min, sigma) = class_min[fo.tau_index(&g.tau)];
            let rep = FreeElement { tau: fo.tau_of(sigma), c: self.reps[&sigma].clone() };
            let mut c = fo.mul(&rep, g).c;
            self.w.reduce(&mut c);
            (min, c)
        };
        let id = fo.identity();
        let mut index = HashMap::from([(key(&id), 0usize)]);
        let mut reps = vec![id];
        let mut edges = Vec::new();
        let mut head = 0;
        while head < reps.len() {
            for (a, g) in fo.gens.iter().enumerate() {
                let next = fo.mul(&reps[head], g);
                let k = key(&next);
                let target = match index.get(&k) {
                    Some(&t) => t,
                    None => {
                        index.insert(k, reps.len());
                        reps.push(next);
                        reps.len() - 1
                    }
                };
                edges.push((head, a, target));
            }
            head += 1;
        }
        debug_assert_eq!(BigUint::from(reps.len()), count);
        Automaton::from_edges(fo.n, reps.len(), 0, &edges)
    }
}

fn image_gens(fo: &FreeObject, h: &Automaton) -> Result<Vec<FreeElement>> {
    h.basis().iter().map(|w| fo.eval(w)).collect()
}

/// `K_{n,m} = [F,F] F^m` or `L_{n,p,d}`, the kernel of `F_n -> F_n(p,d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelSpec {
    K { n: usize, m: u64 },
    L { n: usize, p: u64, d: u64 },
}

pub fn kernel_membership(w: &Word, spec: KernelSpec) -> Result<bool> {
    match spec {
        KernelSpec::K { n, m } => {
            if w.rank() != n {
                return Err(Error::RankMismatch { left: n, right: w.rank() });
            }
            if m == 0 {
                return Err(Error::invalid("m must be positive"));
            }
            Ok(w.abelianization(m).is_zero())
        }
        KernelSpec::L { n, p, d } => Ok(FreeObject::new(n, p, d)?.eval(w)?.is_identity()),
    }
}

/// How to compute a closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ClosureAlgorithm {
    /// Schreier graph on the cosets of the image subgroup.
    #[default]
    Cosets,
    /// Fold the automaton together with the Cayley graph of `F_n(p,d)`.
    Cayley,
}

/// Automaton of the closure `H L_{n,p,d}` of `H` in the pro-`Ab(p)*Ab(d)`
/// topology.
pub fn closure_apd(h: &Automaton, p: u64, d: u64, cap: usize) -> Result<Automaton> {
    closure_apd_with(h, p, d, cap, ClosureAlgorithm::Cosets)
}

pub fn closure_apd_with(h: &Automaton, p: u64, d: u64, cap: usize, algorithm: ClosureAlgorithm) -> Result<Automaton> {
    let fo = FreeObject::new(h.rank(), p, d)?;
    match algorithm {
        ClosureAlgorithm::Cosets => {
            let gens = image_gens(&fo, h)?;
            ImageSubgroup::new(&fo, &gens).coset_automaton(cap)
        }
        ClosureAlgorithm::Cayley => h.join(&fo.cayley_automaton(cap)?),
    }
}

/// Closedness and density of `H` in the pro-`Ab(p)*Ab(d)` topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApdStatus {
    pub closed: bool,
    pub dense: bool,
    pub index_of_closure: BigUint,
}

/// Needs no coset enumeration: the closure contains `H`, so they are equal
/// exactly when their indices agree.
pub fn status_apd(h: &Automaton, p: u64, d: u64) -> Result<ApdStatus> {
    let fo = FreeObject::new(h.rank(), p, d)?;
    let gens = image_gens(&fo, h)?;
    let image = ImageSubgroup::new(&fo, &gens);
    let index = image.index();
    let closed = match h.index() {
        crate::stallings::Index::Finite(k) => BigUint::from(k) == index,
        crate::stallings::Index::Infinite => false,
    };
    Ok(ApdStatus { closed, dense: index.is_one(), index_of_closure: index })
}

/// True when the image of `g` lies in the image of `H`.
pub fn image_contains(h: &Automaton, p: u64, d: u64, w: &Word) -> Result<bool> {
    let fo = FreeObject::new(h.rank(), p, d)?;
    let gens = image_gens(&fo, h)?;
    Ok(ImageSubgroup::new(&fo, &gens).contains(&fo.eval(w)?))
}

/// Closure of `H` in the pro-`Ab(m)` topology: the preimage of its image in
/// `(Z/m)^n`.
pub fn closure_ab(h: &Automaton, m: u64, cap: usize) -> Result<Automaton> {
    if m == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    let n = h.rank();
    let total = BigUint::from(m).pow(n as u32);
    let gens: Vec<Vec<u64>> = h.basis().iter().map(|w| w.abelianization(m).entries.iter().map(|&x| x as u64).collect()).collect();
    let add = |a: &[u64], b: &[u64]| -> Vec<u64> { a.iter().zip(b).map(|(&x, &y)| (x + y) % m).collect() };
    let mut image: BTreeSet<Vec<u64>> = BTreeSet::from([vec![0; n]]);
    let mut queue = VecDeque::from([vec![0u64; n]]);
    while let Some(v) = queue.pop_front() {
        for g in &gens {
            let next = add(&v, g);
            if image.insert(next.clone()) {
                if image.len() > cap {
                    return Err(Error::cap("abelian image size", cap as u64));
                }
                queue.push_back(next);
            }
        }
    }
    let index = &total / BigUint::from(image.len());
    if index > BigUint::from(cap) {
        return Err(Error::cap("coset count", cap as u64));
    }
    let image: Vec<Vec<u64>> = image.into_iter().collect();
    let key = |v: &[u64]| image.iter().map(|k| add(k, v)).min().expect("non-empty");
    let zero = vec![0u64; n];
    let mut ids = HashMap::from([(key(&zero), 0usize)]);
    let mut reps = vec![zero];
    let mut edges = Vec::new();
    let mut head = 0;
    while head < reps.len() {
        for a in 0..n {
            let mut next = reps[head].clone();
            next[a] = (next[a] + 1) % m;
            let k = key(&next);
            let target = *ids.entry(k).or_insert_with(|| {
                reps.push(next);
                reps.len() - 1
            });
            edges.push((head, a, target));
        }
        head += 1;
    }
    Automaton::from_edges(n, reps.len(), 0, &edges)
}

/// A factor of the target of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    Gpd(GpdGroup),
    Cyclic(u64),
}

/// An element of a factor: `(u, t)` for `G_{p,d}`, `(0, t)` for `C_d`.
pub type FactorElement = GpdElement;

/// Injective homomorphism from a presented group into a product of factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub factors: Vec<Factor>,
    /// `x_images[i][f]`: image of `x_i` in factor `f`.
    pub x_images: Vec<Vec<FactorElement>>,
    pub y_images: Vec<Vec<FactorElement>>,
    pub group_order: u64,
    pub image_size: u64,
}

impl Decomposition {
    pub fn is_injective(&self) -> bool {
        self.group_order == self.image_size
    }
}

fn factor_mul(f: &Factor, a: FactorElement, b: FactorElement) -> FactorElement {
    match f {
        Factor::Gpd(g) => g.mul(a, b),
        Factor::Cyclic(d) => GpdElement { u: 0, t: (a.t + b.t) % d },
    }
}

fn factor_pow(f: &Factor, a: FactorElement, e: u64) -> FactorElement {
    (0..e).fold(GpdElement { u: 0, t: 0 }, |acc, _| factor_mul(f, acc, a))
}

/// Elements `(r, s)` of the presented group, `r ∈ F_p^n`, `s_j ∈ Z/d_j`,
/// standing for `x^r y^s`.
fn presented_mul(pres: &ApdPresentation, a: &(Vec<u64>, Vec<u64>), b: &(Vec<u64>, Vec<u64>)) -> (Vec<u64>, Vec<u64>) {
    let p = pres.p;
    let r = (0..pres.n)
        .map(|i| {
            let scale = (0..pres.m).fold(1, |acc, j| acc * pow_mod_u64(pres.q[i][j], a.1[j], p) % p);
            (a.0[i] + scale * b.0[i]) % p
        })
        .collect();
    let s = (0..pres.m).map(|j| (a.1[j] + b.1[j]) % pres.dj[j]).collect();
    (r, s)
}

/// Embeds the presented group: factor `i` is `G_{p,d}^{(r)}` with `x_i -> x`,
/// other `x`'s trivial and `y_j -> y^{k_ij}` where `q_ij = r^{k_ij}`; cyclic
/// factors `y_j -> d/d_j` are appended until the `y`-part maps injectively.
/// The result is checked relation by relation and by counting images.
pub fn decompose_apd(pres: &ApdPresentation, cap: usize) -> Result<Decomposition> {
    let order = pres.order();
    if order > cap as u128 {
        return Err(Error::cap("presented group order", cap as u64));
    }
    let (p, d) = (pres.p, pres.d);
    let g = GpdGroup::new(p, d, None)?;
    let r = g.q();
    let dlog = |target: u64| (0..d).find(|&e| pow_mod_u64(r, e, p) == target).expect("q_ij is a power of r");
    let k: Vec<Vec<u64>> = pres.q.iter().map(|row| row.iter().map(|&x| dlog(x)).collect()).collect();

    let mut factors: Vec<Factor> = (0..pres.n).map(|_| Factor::Gpd(g)).collect();
    let mut x_images: Vec<Vec<FactorElement>> =
        (0..pres.n).map(|i| (0..pres.n).map(|f| GpdElement { u: u64::from(f == i), t: 0 }).collect()).collect();
    let mut y_images: Vec<Vec<FactorElement>> =
        (0..pres.m).map(|j| (0..pres.n).map(|f| GpdElement { u: 0, t: k[f][j] }).collect()).collect();

    // y-part: s -> (t-components in every factor), injective on prod Z/d_j?
    let y_count: u64 = pres.dj.iter().product();
    let y_elements: Vec<Vec<u64>> = (0..y_count)
        .map(|mut c| {
            pres.dj
                .iter()
                .map(|&e| {
                    let x = c % e;
                    c /= e;
                    x
                })
                .collect()
        })
        .collect();
    let y_injective = |y_images: &Vec<Vec<FactorElement>>, factors: &Vec<Factor>| {
        let mut seen = BTreeSet::new();
        y_elements.iter().all(|s| {
            let img: Vec<u64> = (0..factors.len())
                .map(|f| (0..pres.m).map(|j| y_images[j][f].t * s[j]).sum::<u64>() % d)
                .collect();
            seen.insert(img)
        })
    };
    for j in 0..pres.m {
        if y_injective(&y_images, &factors) {
            break;
        }
        factors.push(Factor::Cyclic(d));
        for xi in x_images.iter_mut() {
            xi.push(GpdElement { u: 0, t: 0 });
        }
        for (jj, yj) in y_images.iter_mut().enumerate() {
            yj.push(GpdElement { u: 0, t: if jj == j { d / pres.dj[j] } else { 0 } });
        }
    }

    // defining relations hold factorwise
    for (f, fac) in factors.iter().enumerate() {
        let id = GpdElement { u: 0, t: 0 };
        for i in 0..pres.n {
            let x = x_images[i][f];
            if factor_pow(fac, x, p) != id {
                return Err(Error::invalid("x_i^p relation fails"));
            }
            for j in 0..pres.m {
                let y = y_images[j][f];
                let lhs = factor_mul(fac, y, x);
                let rhs = factor_mul(fac, factor_pow(fac, x, pres.q[i][j]), y);
                if lhs != rhs {
                    return Err(Error::invalid("conjugation relation fails"));
                }
            }
            for i2 in 0..pres.n {
                let x2 = x_images[i2][f];
                if factor_mul(fac, x, x2) != factor_mul(fac, x2, x) {
                    return Err(Error::invalid("x's do not commute"));
                }
            }
        }
        for j in 0..pres.m {
            if factor_pow(fac, y_images[j][f], pres.dj[j]) != id {
                return Err(Error::invalid("y_j^{d_j} relation fails"));
            }
        }
    }

    // evaluate every normal form x^r y^s and count distinct images; check
    // the evaluation respects right multiplication by each generator
    let image_of = |r: &[u64], s: &[u64]| -> Vec<FactorElement> {
        factors
            .iter()
            .enumerate()
            .map(|(f, fac)| {
                let mut acc = GpdElement { u: 0, t: 0 };
                for i in 0..pres.n {
                    acc = factor_mul(fac, acc, factor_pow(fac, x_images[i][f], r[i]));
                }
                for j in 0..pres.m {
                    acc = factor_mul(fac, acc, factor_pow(fac, y_images[j][f], s[j]));
                }
                acc
            })
            .collect()
    };
    let gen_elems: Vec<(Vec<u64>, Vec<u64>)> = (0..pres.n)
        .map(|i| ((0..pres.n).map(|a| u64::from(a == i)).collect(), vec![0; pres.m]))
        .chain((0..pres.m).map(|j| (vec![0; pres.n], (0..pres.m).map(|b| u64::from(b == j)).collect())))
        .collect();
    let gen_imgs: Vec<Vec<FactorElement>> = gen_elems.iter().map(|(r, s)| image_of(r, s)).collect();
    let mut images = BTreeSet::new();
    let xs_count = (p as u128).pow(pres.n as u32) as u64;
    for xc in 0..xs_count {
        let mut c = xc;
        let r: Vec<u64> = (0..pres.n)
            .map(|_| {
                let x = c % p;
                c /= p;
                x
            })
            .collect();
        for s in &y_elements {
            let img = image_of(&r, s);
            for (ge, gi) in gen_elems.iter().zip(&gen_imgs) {
                let prod = presented_mul(pres, &(r.clone(), s.clone()), ge);
                let expect: Vec<FactorElement> =
                    factors.iter().enumerate().map(|(f, fac)| factor_mul(fac, img[f], gi[f])).collect();
                if image_of(&prod.0, &prod.1) != expect {
                    return Err(Error::invalid("evaluation is not a homomorphism"));
                }
            }
            images.insert(img);
        }
    }
    let group_order = order.to_u64().expect("below cap");
    Ok(Decomposition { factors, x_images, y_images, group_order, image_size: images.len() as u64 })
}
