//! The free metabelian group of rank 2 through flows on the grid `Z^2`, and
//! separating homomorphisms into `G_p = G_{p,p-1}`.
//!
//! A word in `a, b` traces a path from the origin: `a` steps right, `b`
//! steps up. Its flow counts signed traversals of each edge; two words are
//! equal in `F_2/F_2''` exactly when their flows and endpoints agree.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freeword::Word;
use crate::numtheory::{find_pr_prime, next_prime_u64, smallest_primitive_root, Prime, DEFAULT_PR_SEARCH_CAP};

/// Largest prime examined by the direct witness search before switching to
/// the bignum fallback.
pub const DEFAULT_WITNESS_PRIME_LIMIT: u64 = 100_000;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Flow {
    /// Edge `(m,n) -> (m+1,n)`.
    pub a_edges: BTreeMap<(i64, i64), i64>,
    /// Edge `(m,n) -> (m,n+1)`.
    pub b_edges: BTreeMap<(i64, i64), i64>,
    pub endpoint: (i64, i64),
}

fn bump(map: &mut BTreeMap<(i64, i64), i64>, key: (i64, i64), by: i64) {
    let e = map.entry(key).or_insert(0);
    *e += by;
    if *e == 0 {
        map.remove(&key);
    }
}

impl Flow {
    pub fn is_zero(&self) -> bool {
        self.a_edges.is_empty() && self.b_edges.is_empty()
    }

    /// Flow shifted by `(dm, dn)`; the endpoint is unchanged.
    pub fn translate(&self, dm: i64, dn: i64) -> Flow {
        let shift = |map: &BTreeMap<(i64, i64), i64>| map.iter().map(|(&(m, n), &c)| ((m + dm, n + dn), c)).collect();
        Flow { a_edges: shift(&self.a_edges), b_edges: shift(&self.b_edges), endpoint: self.endpoint }
    }

    /// Edge-wise sum; endpoints add.
    pub fn add(&self, other: &Flow) -> Flow {
        let mut out = self.clone();
        for (&k, &c) in &other.a_edges {
            bump(&mut out.a_edges, k, c);
        }
        for (&k, &c) in &other.b_edges {
            bump(&mut out.b_edges, k, c);
        }
        out.endpoint = (self.endpoint.0 + other.endpoint.0, self.endpoint.1 + other.endpoint.1);
        out
    }

    pub fn to_json(&self) -> FlowJson {
        let list = |map: &BTreeMap<(i64, i64), i64>| map.iter().map(|(&(m, n), &c)| [m, n, c]).collect();
        FlowJson { a_edges: list(&self.a_edges), b_edges: list(&self.b_edges), endpoint: [self.endpoint.0, self.endpoint.1] }
    }

    pub fn from_json(json: &FlowJson) -> Flow {
        let mut f = Flow { endpoint: (json.endpoint[0], json.endpoint[1]), ..Flow::default() };
        for &[m, n, c] in &json.a_edges {
            bump(&mut f.a_edges, (m, n), c);
        }
        for &[m, n, c] in &json.b_edges {
            bump(&mut f.b_edges, (m, n), c);
        }
        f
    }
}

/// `{a_edges: [[m,n,c]...], b_edges: [[m,n,c]...], endpoint: [m0,n0]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowJson {
    pub a_edges: Vec<[i64; 3]>,
    pub b_edges: Vec<[i64; 3]>,
    pub endpoint: [i64; 2],
}

fn check_rank2(u: &Word) -> Result<()> {
    if u.rank() != 2 {
        return Err(Error::RankMismatch { left: 2, right: u.rank() });
    }
    Ok(())
}

/// Vertices visited by the path of `u`, starting at the origin.
pub fn path_vertices(u: &Word) -> Vec<(i64, i64)> {
    let mut pos = (0i64, 0i64);
    let mut out = vec![pos];
    for l in u.letters() {
        let s = l.sign();
        if l.generator() == 0 {
            pos.0 += s;
        } else {
            pos.1 += s;
        }
        out.push(pos);
    }
    out
}

pub fn flow_of(u: &Word) -> Result<Flow> {
    check_rank2(u)?;
    let mut f = Flow::default();
    let (mut m, mut n) = (0i64, 0i64);
    for l in u.letters() {
        match (l.generator(), l.is_inverse()) {
            (0, false) => {
                bump(&mut f.a_edges, (m, n), 1);
                m += 1;
            }
            (0, true) => {
                m -= 1;
                bump(&mut f.a_edges, (m, n), -1);
            }
            (_, false) => {
                bump(&mut f.b_edges, (m, n), 1);
                n += 1;
            }
            (_, true) => {
                n -= 1;
                bump(&mut f.b_edges, (m, n), -1);
            }
        }
    }
    f.endpoint = (m, n);
    Ok(f)
}

pub fn metab_equal(u: &Word, v: &Word) -> Result<bool> {
    Ok(flow_of(u)? == flow_of(v)?)
}

/// Row sums `h_n` of the `a`-edges and column sums `v_m` of the `b`-edges;
/// zero sums are omitted.
pub fn sums(f: &Flow) -> (BTreeMap<i64, i64>, BTreeMap<i64, i64>) {
    let mut h = BTreeMap::new();
    for (&(_, n), &c) in &f.a_edges {
        *h.entry(n).or_insert(0) += c;
    }
    let mut v = BTreeMap::new();
    for (&(m, _), &c) in &f.b_edges {
        *v.entry(m).or_insert(0) += c;
    }
    h.retain(|_, c| *c != 0);
    v.retain(|_, c| *c != 0);
    (h, v)
}

/// Smallest `m >= 0` moving every vertex of the path of `u` into the closed
/// first quadrant, and `v = a^m b^m u b^-m a^-m`. The path of `v` then stays
/// in the quadrant whenever the endpoint of `u` does.
pub fn first_quadrant_shift(u: &Word) -> Result<(u64, Word)> {
    check_rank2(u)?;
    let verts = path_vertices(u);
    let min_x = verts.iter().map(|v| v.0).min().unwrap_or(0);
    let min_y = verts.iter().map(|v| v.1).min().unwrap_or(0);
    let m = 0.max(-min_x).max(-min_y) as u64;
    let a = Word::generator(2, 0)?.pow(m as i64);
    let b = Word::generator(2, 1)?.pow(m as i64);
    let prefix = a.mul(&b)?;
    let v = prefix.mul(u)?.mul(&prefix.inverse())?;
    Ok((m, v))
}

/// Image of `u` under `a -> ab`, `b -> b^k`.
pub fn theta_substitute(u: &Word, k: i64) -> Result<Word> {
    check_rank2(u)?;
    if k < 1 {
        return Err(Error::invalid(format!("k = {k} must be positive")));
    }
    u.substitute(&[Word::parse("ab", 2)?, Word::generator(2, 1)?.pow(k)])
}

/// Homomorphism `F_2 -> F_2` applied before `a -> x, b -> y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    Direct,
    /// `a <-> b`.
    Swapped,
    /// `a -> ab, b -> b^k`.
    Theta { k: i64 },
    /// The swap followed by `θ`.
    SwappedTheta { k: i64 },
}

impl Route {
    /// Images of `a` and `b`.
    pub fn images(&self) -> [Word; 2] {
        let w = |s: &str| Word::parse(s, 2).expect("valid");
        match *self {
            Route::Direct => [w("a"), w("b")],
            Route::Swapped => [w("b"), w("a")],
            Route::Theta { k } => [w("ab"), w("b").pow(k)],
            Route::SwappedTheta { k } => [w("b").pow(k), w("ab")],
        }
    }

    pub fn apply(&self, u: &Word) -> Result<Word> {
        u.substitute(&self.images())
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Route::Direct => write!(f, "a->x, b->y"),
            Route::Swapped => write!(f, "a->y, b->x"),
            Route::Theta { k } => write!(f, "a->xy, b->y^{k}"),
            Route::SwappedTheta { k } => write!(f, "a->y^{k}, b->xy"),
        }
    }
}

/// A homomorphism `F_2 -> G_p` (`q` a primitive root mod `p`) under which
/// the word survives, with the image `x^image_x y^image_y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationWitness {
    pub p: BigUint,
    pub q: BigUint,
    pub route: Route,
    pub image_x: BigUint,
    pub image_y: BigUint,
}

impl SeparationWitness {
    pub fn image_string(&self) -> String {
        let part = |sym: &str, e: &BigUint| {
            if e.is_zero() {
                String::new()
            } else if e.is_one() {
                sym.to_string()
            } else {
                format!("{sym}^{e}")
            }
        };
        match (self.image_x.is_zero(), self.image_y.is_zero()) {
            (true, true) => "1".into(),
            (false, true) => part("x", &self.image_x),
            (true, false) => part("y", &self.image_y),
            (false, false) => format!("{} {}", part("x", &self.image_x), part("y", &self.image_y)),
        }
    }

    pub fn p_u64(&self) -> Option<u64> {
        self.p.to_u64()
    }

    /// Re-evaluates `u` letter by letter under the route's images of `a`
    /// and `b` in `G_p`, and compares with the stored image.
    pub fn verify(&self, u: &Word) -> Result<bool> {
        let [ia, ib] = self.route.images();
        let ga = eval_gp(&ia, &self.p, &self.q);
        let gb = eval_gp(&ib, &self.p, &self.q);
        let img = eval_with(u, &[ga, gb], &self.p, &self.q);
        Ok(img == (self.image_x.clone(), self.image_y.clone()) && !(img.0.is_zero() && img.1.is_zero()))
    }
}

type Big2 = (BigUint, BigUint);

fn gp_mul(a: &Big2, b: &Big2, p: &BigUint, q: &BigUint) -> Big2 {
    let d = p - 1u32;
    let qt = q.modpow(&a.1, p);
    ((&a.0 + qt * &b.0) % p, (&a.1 + &b.1) % &d)
}

fn gp_inv(a: &Big2, p: &BigUint, q: &BigUint) -> Big2 {
    let d = p - 1u32;
    let t = (&d - &a.1 % &d) % &d;
    let qt = q.modpow(&t, p);
    ((p - (qt * &a.0) % p) % p, t)
}

fn eval_with(u: &Word, images: &[Big2; 2], p: &BigUint, q: &BigUint) -> Big2 {
    let invs = [gp_inv(&images[0], p, q), gp_inv(&images[1], p, q)];
    u.letters().iter().fold((BigUint::zero(), BigUint::zero()), |acc, l| {
        let g = if l.is_inverse() { &invs[l.generator()] } else { &images[l.generator()] };
        gp_mul(&acc, g, p, q)
    })
}

/// `u` evaluated at `a -> x, b -> y` in `G_p` with `y x y⁻¹ = x^q`.
pub fn eval_gp(u: &Word, p: &BigUint, q: &BigUint) -> Big2 {
    let x = (BigUint::one(), BigUint::zero());
    let y = (BigUint::zero(), BigUint::one() % (p - 1u32));
    eval_with(u, &[x, y], p, q)
}

/// Laurent evaluation `(Σ_n h_n q^n mod p, n_0 mod p-1)`.
pub fn predicted_image(f: &Flow, p: &BigUint, q: &BigUint) -> Big2 {
    let (h, _) = sums(f);
    let d = p - 1u32;
    let qinv = q.modpow(&(p - 2u32), p);
    let mut x = BigUint::zero();
    for (&n, &c) in &h {
        let base = if n >= 0 { q } else { &qinv };
        let term = base.modpow(&BigUint::from(n.unsigned_abs()), p);
        let coeff = BigUint::from(c.unsigned_abs()) % p;
        let term = term * coeff % p;
        x = if c >= 0 { (x + term) % p } else { (x + p - term) % p };
    }
    let n0 = f.endpoint.1;
    let y = if n0 >= 0 { BigUint::from(n0 as u64) % &d } else { (&d - BigUint::from(n0.unsigned_abs()) % &d) % &d };
    (x, y)
}

fn routes(k: i64) -> [Route; 4] {
    [Route::Direct, Route::Swapped, Route::Theta { k }, Route::SwappedTheta { k }]
}

fn try_prime(u: &Word, p: &BigUint, q: &BigUint, k: i64) -> Result<Option<SeparationWitness>> {
    for route in routes(k) {
        let w = route.apply(u)?;
        let (x, y) = predicted_image(&flow_of(&w)?, p, q);
        if x.is_zero() && y.is_zero() {
            continue;
        }
        let direct = eval_gp(&w, p, q);
        if direct != (x.clone(), y.clone()) {
            return Err(Error::invalid("Laurent evaluation disagrees with direct evaluation"));
        }
        let witness = SeparationWitness { p: p.clone(), q: q.clone(), route, image_x: x, image_y: y };
        if !witness.verify(u)? {
            return Err(Error::invalid("witness failed re-verification"));
        }
        return Ok(Some(witness));
    }
    Ok(None)
}

/// First prime `p >= 3` (with `q` its smallest primitive root) and first
/// route in the order direct, swapped, `θ`, swapped `θ` under which `u`
/// survives, with `k = |u|` for `θ`. Beyond `prime_limit` the search moves
/// to a prime `q > k` and a prime `p > k q^k` having `q` as a primitive root.
pub fn separating_witness(u: &Word, prime_limit: u64) -> Result<SeparationWitness> {
    check_rank2(u)?;
    if flow_of(u)?.is_zero() {
        return Err(Error::NoWitness("the word is trivial in the free metabelian group".into()));
    }
    let k = u.len() as i64;
    let mut p = 3u64;
    while p <= prime_limit {
        let q = smallest_primitive_root(p)?;
        if let Some(w) = try_prime(u, &BigUint::from(p), &BigUint::from(q), k)? {
            return Ok(w);
        }
        p = next_prime_u64(p);
    }
    // fallback with the explicit bound
    let mut q = next_prime_u64(k as u64);
    for _ in 0..16 {
        let qb = BigUint::from(q);
        let lower = BigUint::from(k as u64) * qb.pow(k as u32) + 1u32;
        match find_pr_prime(&Prime::new(qb.clone())?, &lower, DEFAULT_PR_SEARCH_CAP) {
            Ok(found) => {
                if let Some(w) = try_prime(u, found.p.value(), &qb, k)? {
                    return Ok(w);
                }
            }
            Err(e) if e.is_resource_limit() => {}
            Err(e) => return Err(e),
        }
        q = next_prime_u64(q);
    }
    Err(Error::BudgetExhausted("no separating prime found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 2).unwrap()
    }

    fn map(entries: &[((i64, i64), i64)]) -> BTreeMap<(i64, i64), i64> {
        entries.iter().copied().collect()
    }

    #[test]
    fn flow_examples() {
        let f = flow_of(&w("")).unwrap();
        assert!(f.is_zero());
        assert_eq!(f.endpoint, (0, 0));
        let f = flow_of(&w("abAB")).unwrap();
        assert_eq!(f.a_edges, map(&[((0, 0), 1), ((0, 1), -1)]));
        assert_eq!(f.b_edges, map(&[((1, 0), 1), ((0, 0), -1)]));
        assert_eq!(f.endpoint, (0, 0));
        let f = flow_of(&w("ab")).unwrap();
        assert_eq!(f.a_edges, map(&[((0, 0), 1)]));
        assert_eq!(f.b_edges, map(&[((1, 0), 1)]));
        assert_eq!(f.endpoint, (1, 1));
    }

    #[test]
    fn metab_equal_examples() {
        assert!(!metab_equal(&w("abAB"), &w("")).unwrap());
        let c = w("abAB");
        let bcb = c.conjugate_by(&w("b")).unwrap();
        let ww = c.commutator(&bcb).unwrap();
        let u = w("abbaBAb");
        assert!(metab_equal(&u, &u.mul(&ww).unwrap()).unwrap());
        assert!(!metab_equal(&w("ab"), &w("ba")).unwrap());
    }

    fn square_word() -> Word {
        // c (c^a)⁻¹ (c^b)⁻¹ c^{ab} with c = [a,b] and g^h = h g h⁻¹
        let c = w("abAB");
        let ca = c.conjugate_by(&w("a")).unwrap();
        let cb = c.conjugate_by(&w("b")).unwrap();
        let cab = c.conjugate_by(&w("ab")).unwrap();
        c.mul(&ca.inverse()).unwrap().mul(&cb.inverse()).unwrap().mul(&cab).unwrap()
    }

    #[test]
    fn sums_examples() {
        assert_eq!(sums(&Flow::default()), (BTreeMap::new(), BTreeMap::new()));
        let (h, v) = sums(&flow_of(&w("abAB")).unwrap());
        assert_eq!(h, BTreeMap::from([(0, 1), (1, -1)]));
        assert_eq!(v, BTreeMap::from([(0, -1), (1, 1)]));
        let f = flow_of(&square_word()).unwrap();
        assert!(!f.is_zero());
        assert_eq!(sums(&f), (BTreeMap::new(), BTreeMap::new()));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(first_quadrant_shift(&w("ab")).unwrap(), (0, w("ab")));
        let (m, v) = first_quadrant_shift(&w("A")).unwrap();
        assert_eq!(m, 1);
        assert_eq!(v, w("abABA"));
        let (m, v) = first_quadrant_shift(&w("BBa")).unwrap();
        assert_eq!(m, 2);
        assert_eq!(flow_of(&v).unwrap().endpoint, (1, -2));
        // with endpoint (0,0) the flow of v is a translate of the flow of u
        let u = w("BAba");
        let (m, v) = first_quadrant_shift(&u).unwrap();
        assert_eq!(m, 1);
        assert_eq!(flow_of(&v).unwrap(), flow_of(&u).unwrap().translate(1, 1));
        assert!(path_vertices(&v).iter().all(|&(x, y)| x >= 0 && y >= 0));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_substitute(&w("b"), 3).unwrap(), w("bbb"));
        let t = theta_substitute(&w("abAB"), 4).unwrap();
        assert_eq!(t, w("abbbbABBBB"));
        let (h, _) = sums(&flow_of(&t).unwrap());
        assert_eq!(h, BTreeMap::from([(0, 1), (4, -1)]));
        assert!(flow_of(&theta_substitute(&w(""), 2).unwrap()).unwrap().is_zero());
        assert!(theta_substitute(&w("a"), 0).is_err());
    }

    #[test]
    fn witness_examples() {
        let wit = separating_witness(&w("abAB"), DEFAULT_WITNESS_PRIME_LIMIT).unwrap();
        assert_eq!(wit.p_u64(), Some(3));
        assert_eq!(wit.q, BigUint::from(2u32));
        assert_eq!(wit.route, Route::Direct);
        assert_eq!(wit.image_string(), "x^2");
        let wit = separating_witness(&w("a"), DEFAULT_WITNESS_PRIME_LIMIT).unwrap();
        assert_eq!((wit.p_u64(), wit.image_string()), (Some(3), "x".to_string()));

        let sq = square_word();
        let wit = separating_witness(&sq, DEFAULT_WITNESS_PRIME_LIMIT).unwrap();
        assert!(matches!(wit.route, Route::Theta { .. } | Route::SwappedTheta { .. }));
        assert!(wit.verify(&sq).unwrap());

        assert!(matches!(separating_witness(&w(""), 100), Err(Error::NoWitness(_))));
        let ww = w("abAB").commutator(&w("baBA")).unwrap();
        assert!(matches!(separating_witness(&ww, 100), Err(Error::NoWitness(_))));
    }

    #[test]
    fn fallback_bound_is_used_beyond_the_limit() {
        let wit = separating_witness(&w("abAB"), 2).unwrap();
        // q > k = 4, so q = 5 and p > 4 * 5^4
        assert_eq!(wit.q, BigUint::from(5u32));
        assert!(wit.p > BigUint::from(2500u32));
        assert!(wit.verify(&w("abAB")).unwrap());
    }

    #[test]
    fn flow_json_round_trip() {
        let f = flow_of(&w("abAABBab")).unwrap();
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let back: FlowJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Flow::from_json(&back), f);
    }
}
