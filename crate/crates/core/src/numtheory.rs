//! Modular arithmetic over the integers: primality, multiplicative orders,
//! the unit subgroups `Q_{p,d}` / `Q'_{p,d}` and primitive-root prime search.
//!
//! Everything that can grow without bound (the prime returned by a
//! primitive-root search, the order of `q` modulo a large prime) is carried as
//! a [`BigUint`]; the `_u64` helpers are fast paths for desk-scale moduli.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default number of candidates examined by [`find_pr_prime`].
pub const DEFAULT_PR_SEARCH_CAP: u64 = 10_000_000;

/// Bases for which Miller-Rabin is deterministic on every 64-bit input.
const DETERMINISTIC_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Total Miller-Rabin rounds for inputs beyond 64 bits: the fixed bases above
/// followed by pseudo-random bases drawn from a generator seeded by the input.
const BIG_ROUNDS: usize = 40;

/// A verified prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(BigUint);

impl Prime {
    pub fn new(value: BigUint) -> Result<Self> {
        if is_prime(&value) {
            Ok(Prime(value))
        } else {
            Err(Error::invalid(format!("{value} is not prime")))
        }
    }

    pub fn from_u64(value: u64) -> Result<Self> {
        Self::new(BigUint::from(value))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Outcome of a primitive-root prime search: `q` is a primitive root mod `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrSearchResult {
    pub q: Prime,
    pub p: Prime,
    pub order_check: BigUint,
}

pub fn pow_mod_u64(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = (base as u128) % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Inverse of `a` modulo `m` for arbitrary-precision values.
pub fn inv_mod_big(a: &BigInt, m: &BigUint) -> Option<BigUint> {
    let m = BigInt::from(m.clone());
    let ext = a.mod_floor(&m).extended_gcd(&m);
    if !ext.gcd.is_one() {
        return None;
    }
    ext.x.mod_floor(&m).to_biguint()
}

fn miller_rabin_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = ((x as u128 * x as u128) % n as u128) as u64;
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &DETERMINISTIC_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    DETERMINISTIC_BASES.iter().all(|&a| miller_rabin_u64(n, a))
}

fn miller_rabin_big(n: &BigUint, a: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    let mut x = a.modpow(&d, n);
    if x == one || x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_one {
            return true;
        }
    }
    false
}

/// Primality test. Exact below 2^64; above that, Miller-Rabin with
/// [`BIG_ROUNDS`] rounds (fixed small-prime bases plus seeded random bases).
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &DETERMINISTIC_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let mut bases: Vec<BigUint> = DETERMINISTIC_BASES.iter().map(|&b| BigUint::from(b)).collect();
    let seed = n.iter_u64_digits().fold(0x9e37_79b9_7f4a_7c15u64, |acc, w| acc.rotate_left(7) ^ w);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = BigUint::from(2u32);
    let upper = n - &two;
    while bases.len() < BIG_ROUNDS {
        bases.push(rng.gen_biguint_range(&two, &upper));
    }
    bases.iter().all(|a| miller_rabin_big(n, a))
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_u64(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime_u64(c) {
        c += 1;
    }
    c
}

/// Primes `p` with `lo <= p <= hi`, increasing.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| is_prime_u64(n)).collect()
}

/// Trial-division factorization, ascending primes with multiplicities.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            let mut e = 0;
            while n % f == 0 {
                n /= f;
                e += 1;
            }
            out.push((f, e));
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn factor_big(n: &BigUint) -> Vec<(BigUint, u32)> {
    if let Some(small) = n.to_u64() {
        return factor_u64(small).into_iter().map(|(p, e)| (BigUint::from(p), e)).collect();
    }
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut f = BigUint::from(2u32);
    while &f * &f <= n {
        if (&n % &f).is_zero() {
            let mut e = 0;
            while (&n % &f).is_zero() {
                n /= &f;
                e += 1;
            }
            out.push((f.clone(), e));
        }
        f += if f == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    if n > BigUint::one() {
        out.push((n, 1));
    }
    out
}

/// Euler's totient by trial division.
pub fn totient(n: u64) -> u64 {
    factor_u64(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).take_while(|k| k * k <= n).filter(|k| n % k == 0).collect();
    let mut upper: Vec<u64> = out.iter().rev().map(|k| n / k).filter(|&k| k * k != n).collect();
    out.append(&mut upper);
    out
}

/// Multiplicative order of `q` modulo the prime `p`, for desk-scale moduli.
pub fn mult_order_u64(q: u64, p: u64) -> Result<u64> {
    if p < 2 {
        return Err(Error::invalid("modulus must be at least 2"));
    }
    if q % p == 0 {
        return Err(Error::invalid(format!("{q} is not a unit modulo {p}")));
    }
    let mut order = p - 1;
    for (r, _) in factor_u64(p - 1) {
        while order % r == 0 && pow_mod_u64(q, order / r, p) == 1 {
            order /= r;
        }
    }
    Ok(order)
}

/// Multiplicative order of `q` modulo `p`: the least `k >= 1` with
/// `q^k = 1 (mod p)`.
pub fn mult_order(q: &BigInt, p: &Prime) -> Result<BigUint> {
    if let (Some(pp), Some(qq)) = (p.to_u64(), q.mod_floor(&BigInt::from(p.value().clone())).to_u64()) {
        return mult_order_u64(qq, pp).map(BigUint::from);
    }
    let modulus = p.value();
    let residue = q
        .mod_floor(&BigInt::from(modulus.clone()))
        .to_biguint()
        .expect("mod_floor of a positive modulus is non-negative");
    if residue.is_zero() {
        return Err(Error::invalid(format!("{q} is not a unit modulo {modulus}")));
    }
    let group_order = modulus - 1u32;
    let mut order = group_order.clone();
    for (r, _) in factor_big(&group_order) {
        while (&order % &r).is_zero() && residue.modpow(&(&order / &r), modulus).is_one() {
            order /= &r;
        }
    }
    Ok(order)
}

/// The unit subgroups `Q_{p,d} = {q : q^d = 1}` and `Q'_{p,d}` (elements of
/// order exactly `d`), as subsets of `1..p`.
pub fn q_sets(p: u64, d: u64) -> Result<(BTreeSet<u64>, BTreeSet<u64>)> {
    if !is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if d == 0 || (p - 1) % d != 0 {
        return Err(Error::invalid(format!("{d} does not divide {}", p - 1)));
    }
    let mut all = BTreeSet::new();
    let mut exact = BTreeSet::new();
    for q in 1..p {
        let k = mult_order_u64(q, p)?;
        if d % k == 0 {
            all.insert(q);
            if k == d {
                exact.insert(q);
            }
        }
    }
    Ok((all, exact))
}

pub fn is_primitive_root_u64(q: u64, p: u64) -> bool {
    q % p != 0 && mult_order_u64(q, p).map(|k| k == p - 1).unwrap_or(false)
}

/// Smallest primitive root modulo the prime `p`.
pub fn smallest_primitive_root(p: u64) -> Result<u64> {
    if !is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    Ok((1..p).find(|&g| is_primitive_root_u64(g, p)).unwrap_or(1))
}

/// Smallest prime `p >= lower`, `p != q`, such that `q` is a primitive root
/// modulo `p`. At most `cap` integers are examined.
pub fn find_pr_prime(q: &Prime, lower: &BigUint, cap: u64) -> Result<PrSearchResult> {
    if *lower < BigUint::from(2u32) {
        return Err(Error::invalid("search lower bound must be at least 2"));
    }
    let q_int = BigInt::from(q.value().clone());
    let mut candidate = lower.clone();
    for _ in 0..cap {
        if candidate != *q.value() && is_prime(&candidate) {
            let p = Prime(candidate.clone());
            let order = mult_order(&q_int, &p)?;
            if order == p.value() - 1u32 {
                // the search contract: the returned pair is re-verified
                let recheck = mult_order(&q_int, &p)?;
                debug_assert_eq!(recheck, order);
                return Ok(PrSearchResult { q: q.clone(), p, order_check: recheck });
            }
        }
        candidate += 1u32;
    }
    Err(Error::BudgetExhausted(format!(
        "no prime with primitive root {q} found among {cap} candidates from {lower}"
    )))
}

/// `x mod m` for a signed value, in `[0, m)`.
pub fn rem_u64(x: i64, m: u64) -> u64 {
    (x as i128).rem_euclid(m as i128) as u64
}

/// `x mod m` for a signed arbitrary-precision value.
pub fn rem_big(x: &BigInt, m: &BigUint) -> BigUint {
    x.mod_floor(&BigInt::from(m.clone())).magnitude().clone()
}

/// Absolute value helper used by the search bounds.
pub(crate) fn abs_big(x: &BigInt) -> BigUint {
    x.abs().magnitude().clone()
}
