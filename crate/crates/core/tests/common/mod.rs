//! Test-side oracles. Everything here is computed from first principles,
//! without calling the algorithms under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use provar_core::freeword::Letter;
use provar_core::Word;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Freely reduced word with between `min_len` and `max_len` letters
/// drawn before reduction.
pub fn random_word(rng: &mut ChaCha8Rng, rank: usize, min_len: usize, max_len: usize) -> Word {
    let len = rng.gen_range(min_len..=max_len);
    let letters: Vec<Letter> = (0..len).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5))).collect();
    Word::from_letters(&letters, rank).unwrap()
}

/// Letters of a word as (generator, exponent ±1).
pub fn signed_letters(w: &Word) -> Vec<(usize, i64)> {
    w.to_string()
        .chars()
        .filter(|c| *c != '1')
        .map(|c| {
            if c.is_ascii_lowercase() {
                ((c as u8 - b'a') as usize, 1)
            } else {
                ((c as u8 - b'A') as usize, -1)
            }
        })
        .collect()
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

pub fn order_mod(q: u64, p: u64) -> u64 {
    (1..p).find(|&k| pow_mod(q, k, p) == 1).unwrap()
}

pub fn smallest_primitive_root(p: u64) -> u64 {
    (1..p).find(|&g| order_mod(g, p) == p - 1).unwrap()
}

// ---------------------------------------------------------------------------
// G_{p,d} arithmetic and the relatively free group as tuples

/// `(u, t)` standing for `x^u y^t`, with `y x y⁻¹ = x^q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gpd {
    pub p: u64,
    pub d: u64,
    pub q: u64,
}

impl Gpd {
    pub fn mul(&self, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
        ((a.0 + pow_mod(self.q, a.1, self.p) * b.0) % self.p, (a.1 + b.1) % self.d)
    }

    pub fn inv(&self, a: (u64, u64)) -> (u64, u64) {
        // brute force: the group is small
        self.elements().into_iter().find(|&b| self.mul(a, b) == (0, 0)).unwrap()
    }

    pub fn elements(&self) -> Vec<(u64, u64)> {
        (0..self.p).flat_map(|u| (0..self.d).map(move |t| (u, t))).collect()
    }

    pub fn eval(&self, w: &Word, images: &[(u64, u64)]) -> (u64, u64) {
        let invs: Vec<_> = images.iter().map(|&g| self.inv(g)).collect();
        signed_letters(w)
            .into_iter()
            .fold((0, 0), |acc, (g, e)| self.mul(acc, if e > 0 { images[g] } else { invs[g] }))
    }
}

/// The subgroup of `G_{p,d}^{assignments}` generated by the generator tuples.
pub struct TupleModel {
    pub g: Gpd,
    pub n: usize,
    pub assignments: Vec<Vec<(u64, u64)>>,
}

pub type Tuple = Vec<(u64, u64)>;

impl TupleModel {
    pub fn new(n: usize, p: u64, d: u64, q: u64) -> TupleModel {
        let g = Gpd { p, d, q };
        let mut assignments = vec![vec![]];
        for _ in 0..n {
            assignments = assignments
                .into_iter()
                .flat_map(|a: Vec<(u64, u64)>| {
                    g.elements().into_iter().map(move |e| {
                        let mut b = a.clone();
                        b.push(e);
                        b
                    })
                })
                .collect();
        }
        TupleModel { g, n, assignments }
    }

    pub fn eval(&self, w: &Word) -> Tuple {
        self.assignments.iter().map(|phi| self.g.eval(w, phi)).collect()
    }

    fn mul(&self, a: &Tuple, b: &Tuple) -> Tuple {
        a.iter().zip(b).map(|(&x, &y)| self.g.mul(x, y)).collect()
    }

    /// Subgroup generated by the given tuples (finite, so monoid closure).
    pub fn generate(&self, gens: &[Tuple]) -> HashSet<Tuple> {
        let id: Tuple = vec![(0, 0); self.assignments.len()];
        let mut seen = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.mul(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    pub fn whole(&self) -> HashSet<Tuple> {
        let gens: Vec<Tuple> = (0..self.n)
            .map(|i| self.eval(&Word::generator(self.n, i).unwrap()))
            .collect();
        self.generate(&gens)
    }
}

/// Image of `u` in `G_p` under `a, b -> x, y` ("direct"), `y, x`
/// ("swapped"), `xy, y^k` ("theta") or `y^k, xy`.
pub fn route_image(u: &Word, route: &str, p: u64, q: u64, k: i64) -> (u64, u64) {
    let g = Gpd { p, d: p - 1, q };
    let (x, y) = ((1, 0), (0, 1 % (p - 1)));
    let xy = g.mul(x, y);
    let yk = (0..k).fold((0, 0), |acc, _| g.mul(acc, y));
    let images = match route {
        "direct" => [x, y],
        "swapped" => [y, x],
        "theta" => [xy, yk],
        _ => [yk, xy],
    };
    g.eval(u, &images)
}

pub fn route_name(r: provar_core::metabelian::Route) -> &'static str {
    match r {
        provar_core::metabelian::Route::Direct => "direct",
        provar_core::metabelian::Route::Swapped => "swapped",
        provar_core::metabelian::Route::Theta { .. } => "theta",
        provar_core::metabelian::Route::SwappedTheta { .. } => "swapped-theta",
    }
}

/// Number of distinct images of the elements `x^r y^s` of a presented
/// group, recomputed from the generator images.
pub fn image_count(pres: &provar_core::fplinalg::ApdPresentation, dec: &provar_core::apd::Decomposition) -> usize {
    let ops: Vec<Gpd> = dec
        .factors
        .iter()
        .map(|f| match f {
            provar_core::apd::Factor::Gpd(g) => Gpd { p: g.p(), d: g.d(), q: g.q() },
            provar_core::apd::Factor::Cyclic(d) => Gpd { p: 1, d: *d, q: 1 },
        })
        .collect();
    let mut seen = std::collections::HashSet::new();
    let mut exps: Vec<Vec<u64>> = vec![vec![]];
    let ranges: Vec<u64> = std::iter::repeat(pres.p).take(pres.n).chain(pres.dj.iter().copied()).collect();
    for &k in &ranges {
        exps = exps.into_iter().flat_map(|e| (0..k).map(move |i| [e.clone(), vec![i]].concat())).collect();
    }
    for e in exps {
        let img: Vec<(u64, u64)> = ops
            .iter()
            .enumerate()
            .map(|(f, g)| {
                let mut acc = (0, 0);
                for (i, &k) in e.iter().enumerate() {
                    let gen = if i < pres.n { dec.x_images[i][f] } else { dec.y_images[i - pres.n][f] };
                    for _ in 0..k {
                        acc = g.mul(acc, (gen.u, gen.t));
                    }
                }
                acc
            })
            .collect();
        seen.insert(img);
    }
    seen.len()
}

// ---------------------------------------------------------------------------
// small permutation groups

pub type P = Vec<usize>;

/// `a` then `b`.
pub fn compose(a: &P, b: &P) -> P {
    a.iter().map(|&x| b[x]).collect()
}

pub fn generate(gens: &[P], degree: usize) -> BTreeSet<P> {
    let id: P = (0..degree).collect();
    let mut seen = BTreeSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = compose(&x, g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Every subgroup, by closing cyclic subgroups under pairwise joins.
pub fn all_subgroups(elements: &BTreeSet<P>) -> Vec<BTreeSet<P>> {
    let degree = elements.iter().next().unwrap().len();
    let mut subs: BTreeSet<BTreeSet<P>> = elements.iter().map(|g| generate(&[g.clone()], degree)).collect();
    loop {
        let list: Vec<_> = subs.iter().cloned().collect();
        let mut added = false;
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                let gens: Vec<P> = a.iter().chain(b.iter()).cloned().collect();
                if subs.insert(generate(&gens, degree)) {
                    added = true;
                }
            }
        }
        if !added {
            return subs.into_iter().collect();
        }
    }
}

/// Huppert's criterion: supersolvable iff every maximal subgroup has
/// prime index.
pub fn supersolvable_by_maximal_subgroups(elements: &BTreeSet<P>) -> bool {
    let subs = all_subgroups(elements);
    let proper: Vec<&BTreeSet<P>> = subs.iter().filter(|s| s.len() < elements.len()).collect();
    proper
        .iter()
        .filter(|h| !proper.iter().any(|k| k.len() > h.len() && h.is_subset(k)))
        .all(|h| is_prime((elements.len() / h.len()) as u64))
}

// ---------------------------------------------------------------------------
// free metabelian group via the Magnus embedding

pub type Laurent = BTreeMap<(i64, i64), i64>;

/// `[[x^e, m],[0, 1]]` with `m = (m_a, m_b)` in the free `Z[Z^2]`-module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Magnus {
    pub e: (i64, i64),
    pub ma: Laurent,
    pub mb: Laurent,
}

fn shift_add(target: &mut Laurent, src: &Laurent, by: (i64, i64), sign: i64) {
    for (&(i, j), &c) in src {
        let k = (i + by.0, j + by.1);
        let v = target.get(&k).copied().unwrap_or(0) + sign * c;
        if v == 0 {
            target.remove(&k);
        } else {
            target.insert(k, v);
        }
    }
}

impl Magnus {
    pub fn identity() -> Magnus {
        Magnus { e: (0, 0), ma: Laurent::new(), mb: Laurent::new() }
    }

    pub fn mul(&self, o: &Magnus) -> Magnus {
        let mut ma = self.ma.clone();
        let mut mb = self.mb.clone();
        shift_add(&mut ma, &o.ma, self.e, 1);
        shift_add(&mut mb, &o.mb, self.e, 1);
        Magnus { e: (self.e.0 + o.e.0, self.e.1 + o.e.1), ma, mb }
    }

    fn generator(g: usize, sign: i64) -> Magnus {
        let unit = Laurent::from([((0, 0), 1)]);
        let mut m = Magnus::identity();
        let slot = if g == 0 { &mut m.ma } else { &mut m.mb };
        if sign > 0 {
            *slot = unit;
            m.e = if g == 0 { (1, 0) } else { (0, 1) };
        } else {
            m.e = if g == 0 { (-1, 0) } else { (0, -1) };
            *slot = Laurent::from([(m.e, -1)]);
        }
        m
    }

    pub fn of(w: &Word) -> Magnus {
        signed_letters(w).into_iter().fold(Magnus::identity(), |acc, (g, s)| acc.mul(&Magnus::generator(g, s)))
    }
}

// ---------------------------------------------------------------------------
// BS(1,q) as affine maps of Q

/// `[[q^j, x],[0,1]]` stored as `(x, j)`.
pub fn bs_matrix(w: &Word, q: i64) -> (BigRational, i64) {
    let qr = BigRational::from_integer(BigInt::from(q));
    let mut x = BigRational::zero();
    let mut scale = BigRational::one();
    let mut j = 0i64;
    for (g, s) in signed_letters(w) {
        match (g, s) {
            (0, 1) => x += &scale,
            (0, _) => x -= &scale,
            (_, 1) => {
                scale *= &qr;
                j += 1
            }
            _ => {
                scale /= &qr;
                j -= 1
            }
        }
    }
    (x, j)
}

// ---------------------------------------------------------------------------
// matrices over F_p

pub fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).fold(0, |s, k| (s + a[i][k] * b[k][j]) % p)).collect()).collect()
}

/// Gauss-Jordan inverse, `None` when singular.
pub fn mat_inv(a: &[Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
    let n = a.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| m[r][c] != 0)?;
        m.swap(c, piv);
        let inv = pow_mod(m[c][c], p - 2, p);
        for x in m[c].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..n {
            if r != c && m[r][c] != 0 {
                let f = m[r][c];
                for k in 0..2 * n {
                    m[r][k] = (m[r][k] + p * p - f * m[c][k] % p) % p;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize, p: u64) -> Vec<Vec<u64>> {
    loop {
        let m: Vec<Vec<u64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..p)).collect()).collect();
        if mat_inv(&m, p).is_some() {
            return m;
        }
    }
}

pub fn diag(entries: &[u64]) -> Vec<Vec<u64>> {
    let n = entries.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect()).collect()
}

pub fn to_i64(m: &[Vec<u64>]) -> Vec<Vec<i64>> {
    m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect()
}
