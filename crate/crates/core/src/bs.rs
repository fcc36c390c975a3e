//! The solvable Baumslag-Solitar groups `BS(1,q) = ⟨a, b | b a b⁻¹ = a^q⟩`,
//! realized as `Z[1/q] ⋊ Z` with `a = (1, 0)` and `b = (0, 1)`.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::apd::{GpdElement, GpdGroup};
use crate::error::{Error, Result};
use crate::freeword::Word;
use crate::numtheory::{abs_big, inv_mod_u64, is_prime_u64, is_primitive_root_u64, pow_mod_u64, rem_big};

/// Candidates examined by [`bs_separating_prime`] before giving up.
pub const DEFAULT_BS_SEARCH_CAP: u64 = 10_000_000;

/// `(m / q^s, j)` with `q ∤ m` unless `s = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BsElement {
    q: u64,
    m: BigInt,
    s: u32,
    j: i64,
}

fn check_q(q: u64) -> Result<()> {
    if !is_prime_u64(q) {
        return Err(Error::invalid(format!("q = {q} must be prime")));
    }
    Ok(())
}

impl BsElement {
    pub fn new(q: u64, m: BigInt, s: u32, j: i64) -> Result<BsElement> {
        check_q(q)?;
        Ok(BsElement { q, m, s, j }.normalized())
    }

    pub fn identity(q: u64) -> Result<BsElement> {
        BsElement::new(q, BigInt::zero(), 0, 0)
    }

    fn normalized(mut self) -> BsElement {
        let q = BigInt::from(self.q);
        if self.m.is_zero() {
            self.s = 0;
        }
        while self.s > 0 && self.m.is_multiple_of(&q) {
            self.m /= &q;
            self.s -= 1;
        }
        self
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn numerator(&self) -> &BigInt {
        &self.m
    }

    pub fn denominator_exponent(&self) -> u32 {
        self.s
    }

    pub fn j(&self) -> i64 {
        self.j
    }

    pub fn is_identity(&self) -> bool {
        self.m.is_zero() && self.j == 0
    }

    /// `m q^{-s}` scaled to denominator `q^target`, `target >= s`.
    fn lift(&self, m: &BigInt, s: u32, target: u32) -> BigInt {
        m * BigInt::from(self.q).pow(target - s)
    }

    pub fn mul(&self, other: &BsElement) -> Result<BsElement> {
        if self.q != other.q {
            return Err(Error::invalid("elements of different groups"));
        }
        // q^j x' = m' q^{j - s'}
        let e = self.j - other.s as i64;
        let (m2, s2) = if e >= 0 {
            (&other.m * BigInt::from(self.q).pow(e as u32), 0u32)
        } else {
            (other.m.clone(), (-e) as u32)
        };
        let s = self.s.max(s2);
        let m = self.lift(&self.m, self.s, s) + self.lift(&m2, s2, s);
        Ok(BsElement { q: self.q, m, s, j: self.j + other.j }.normalized())
    }

    pub fn inverse(&self) -> BsElement {
        // (x, j)⁻¹ = (-q^{-j} x, -j)
        let e = -self.j - self.s as i64;
        let (m, s) = if e >= 0 {
            (-&self.m * BigInt::from(self.q).pow(e as u32), 0u32)
        } else {
            (-self.m.clone(), (-e) as u32)
        };
        BsElement { q: self.q, m, s, j: -self.j }.normalized()
    }
}

impl fmt::Display for BsElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s == 0 {
            write!(f, "({}, {})", self.m, self.j)
        } else if self.s == 1 {
            write!(f, "({}/{}, {})", self.m, self.q, self.j)
        } else {
            write!(f, "({}/{}^{}, {})", self.m, self.q, self.s, self.j)
        }
    }
}

pub fn bs_eval(u: &Word, q: u64) -> Result<BsElement> {
    if u.rank() != 2 {
        return Err(Error::RankMismatch { left: 2, right: u.rank() });
    }
    let a = BsElement::new(q, BigInt::one(), 0, 0)?;
    let b = BsElement::new(q, BigInt::zero(), 0, 1)?;
    let gens = [a.clone(), b.clone()];
    let invs = [a.inverse(), b.inverse()];
    u.letters().iter().try_fold(BsElement::identity(q)?, |acc, l| {
        let g = if l.is_inverse() { &invs[l.generator()] } else { &gens[l.generator()] };
        acc.mul(g)
    })
}

pub fn bs_is_trivial(u: &Word, q: u64) -> Result<bool> {
    Ok(bs_eval(u, q)?.is_identity())
}

/// A prime `p` with `q` a primitive root mod `p` and the image of the
/// element under `a -> x, b -> y` in `G_p = G_{p,p-1}` (with `y x y⁻¹ = x^q`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BsWitness {
    pub p: u64,
    pub group: GpdGroup,
    pub image: GpdElement,
}

impl BsWitness {
    /// Checks the defining relation in `G_p` and that `u` evaluates to the
    /// recorded image.
    pub fn verify_word(&self, u: &Word) -> Result<bool> {
        let g = &self.group;
        let lhs = g.mul(g.mul(g.y(), g.x()), g.inverse(g.y()));
        let rhs = g.pow(g.x(), g.q() as i64);
        let img = g.eval_word(u, &[g.x(), g.y()])?;
        Ok(lhs == rhs && img == self.image && !img.is_identity())
    }
}

/// The image of `g` in `G_p`: `x^{m q^{-s}} y^j`.
pub fn bs_image(g: &BsElement, p: u64) -> Result<GpdElement> {
    let group = GpdGroup::new(p, p - 1, Some(g.q % p))?;
    let qinv = inv_mod_u64(g.q % p, p).ok_or_else(|| Error::invalid("q is not invertible mod p"))?;
    let scale = pow_mod_u64(qinv, g.s as u64, p);
    let mm = rem_big(&g.m, &BigUint::from(p)).to_u64().expect("below p");
    Ok(group.element((mm * scale % p) as i64, g.j.rem_euclid((p - 1) as i64)))
}

/// Smallest `p ≠ q` having `q` as a primitive root, with `p ∤ m` and
/// `p - 1 > |j|`; these force the image to be nontrivial.
pub fn bs_separating_prime(g: &BsElement, cap: u64) -> Result<BsWitness> {
    if g.is_identity() {
        return Err(Error::invalid("the identity has no separating prime"));
    }
    let mut p = 3u64;
    for _ in 0..cap {
        let ok = p != g.q
            && p - 1 > g.j.unsigned_abs()
            && is_prime_u64(p)
            && !(g.m.sign() != Sign::NoSign && rem_big(&g.m, &BigUint::from(p)).is_zero())
            && is_primitive_root_u64(g.q % p, p);
        if ok {
            let image = bs_image(g, p)?;
            if image.is_identity() {
                return Err(Error::invalid("image unexpectedly trivial"));
            }
            return Ok(BsWitness { p, group: GpdGroup::new(p, p - 1, Some(g.q % p))?, image });
        }
        p += 2;
    }
    Err(Error::BudgetExhausted(format!("no separating prime for q = {} within {cap} candidates", g.q)))
}

/// The absolute value of the numerator, for reporting.
pub fn numerator_abs(g: &BsElement) -> BigUint {
    abs_big(&g.m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 2).unwrap()
    }

    fn el(q: u64, m: i64, s: u32, j: i64) -> BsElement {
        BsElement::new(q, BigInt::from(m), s, j).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(bs_eval(&w("baB"), 2).unwrap(), el(2, 2, 0, 0));
        assert_eq!(bs_eval(&w("Bab"), 2).unwrap(), el(2, 1, 1, 0));
        assert_eq!(bs_eval(&w("baBA"), 2).unwrap(), el(2, 1, 0, 0));
        assert_eq!(el(2, 4, 2, 0), el(2, 1, 0, 0));
    }

    #[test]
    fn triviality_examples() {
        assert!(bs_is_trivial(&w(""), 2).unwrap());
        assert!(bs_is_trivial(&w("baBAA"), 2).unwrap());
        assert!(!bs_is_trivial(&w("abAB"), 2).unwrap());
        assert_eq!(bs_eval(&w("abAB"), 2).unwrap(), el(2, -1, 0, 0));
        assert!(bs_is_trivial(&w("baBAAA"), 3).unwrap());
    }

    #[test]
    fn inverse_and_homomorphism() {
        for s in ["aBBaba", "BBBaabA", "bAbAbA"] {
            let u = w(s);
            let g = bs_eval(&u, 3).unwrap();
            assert!(g.mul(&g.inverse()).unwrap().is_identity());
            assert_eq!(bs_eval(&u.inverse(), 3).unwrap(), g.inverse());
            let v = w("abBBa");
            assert_eq!(bs_eval(&u.mul(&v).unwrap(), 3).unwrap(), g.mul(&bs_eval(&v, 3).unwrap()).unwrap());
        }
    }

    #[test]
    fn separating_prime_examples() {
        let g = el(2, -1, 0, 1);
        assert_eq!(bs_eval(&w("abA"), 2).unwrap(), g);
        let wit = bs_separating_prime(&g, DEFAULT_BS_SEARCH_CAP).unwrap();
        assert_eq!(wit.p, 3);
        assert_eq!(wit.image.to_string(), "x^2 y");
        assert!(wit.verify_word(&w("abA")).unwrap());

        let wit = bs_separating_prime(&el(2, 1, 0, 0), DEFAULT_BS_SEARCH_CAP).unwrap();
        assert_eq!((wit.p, wit.image.to_string()), (3, "x".to_string()));
        let wit = bs_separating_prime(&el(2, 1, 1, 0), DEFAULT_BS_SEARCH_CAP).unwrap();
        assert_eq!((wit.p, wit.image.to_string()), (3, "x^2".to_string()));
        assert!(wit.verify_word(&w("Bab")).unwrap());

        assert!(bs_separating_prime(&BsElement::identity(2).unwrap(), 10).is_err());
        // q = 3: PR(3) starts 5, 7, 17
        let wit = bs_separating_prime(&el(3, 5, 0, 0), DEFAULT_BS_SEARCH_CAP).unwrap();
        assert_eq!(wit.p, 7);
    }
}
