//! Reduced words of the free group `F_n`.
//!
//! Text syntax: lowercase `a`, `b`, `c`, ... are the generators `1..n` and the
//! matching uppercase letter is the inverse. Powers may be written `a^3` or
//! `b^-2`; whitespace, `*` and `.` are ignored and `1` denotes the empty word.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported rank (one letter of the Latin alphabet per generator).
pub const MAX_RANK: usize = 26;

/// A generator or its inverse: `(index, inverse?)` packed as a signed
/// integer, `+(i+1)` for `a_i` and `-(i+1)` for `a_i^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        let v = generator as i32 + 1;
        Letter(if inverse { -v } else { v })
    }

    pub fn gen(generator: usize) -> Self {
        Letter::new(generator, false)
    }

    pub fn inv(generator: usize) -> Self {
        Letter::new(generator, true)
    }

    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    /// +1 or -1.
    pub fn sign(self) -> i64 {
        self.0.signum() as i64
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Slot used by automata: `2i` for `a_i`, `2i + 1` for its inverse. This
    /// is also the canonical label order `a < A < b < B < ...`.
    pub fn slot(self) -> usize {
        2 * self.generator() + usize::from(self.is_inverse())
    }

    pub fn from_slot(slot: usize) -> Self {
        Letter::new(slot / 2, slot % 2 == 1)
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.generator() as u8) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        if c.is_ascii_lowercase() {
            Some(Letter::gen((c as u8 - b'a') as usize))
        } else if c.is_ascii_uppercase() {
            Some(Letter::inv((c as u8 - b'A') as usize))
        } else {
            None
        }
    }
}

/// A freely reduced word of `F_rank`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        return Err(Error::invalid(format!("rank must lie in 1..={MAX_RANK}, got {rank}")));
    }
    Ok(())
}

/// Free reduction of a letter sequence over `F_rank`.
pub fn reduce(raw: &[Letter], rank: usize) -> Result<Word> {
    check_rank(rank)?;
    let mut stack: Vec<Letter> = Vec::with_capacity(raw.len());
    for &l in raw {
        if l.generator() >= rank {
            return Err(Error::Parse(format!(
                "letter {} is outside the alphabet of rank {rank}",
                l.to_char()
            )));
        }
        if stack.last() == Some(&l.inverse()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    Ok(Word { rank, letters: stack })
}

/// Which word operation [`compose`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordOp {
    Multiply,
    Invert,
    Conjugate,
}

/// `Multiply`: `u v`; `Invert`: `u^-1`; `Conjugate`: `v u v^-1`.
pub fn compose(op: WordOp, u: &Word, v: Option<&Word>) -> Result<Word> {
    match op {
        WordOp::Invert => Ok(u.inverse()),
        WordOp::Multiply => {
            let v = v.ok_or_else(|| Error::invalid("multiply needs two words"))?;
            u.mul(v)
        }
        WordOp::Conjugate => {
            let v = v.ok_or_else(|| Error::invalid("conjugate needs two words"))?;
            u.conjugate_by(v)
        }
    }
}

impl Word {
    pub fn identity(rank: usize) -> Result<Self> {
        check_rank(rank)?;
        Ok(Word { rank, letters: Vec::new() })
    }

    /// The generator `a_i` (0-based) of `F_rank`.
    pub fn generator(rank: usize, i: usize) -> Result<Self> {
        reduce(&[Letter::gen(i)], rank)
    }

    pub fn from_letters(letters: &[Letter], rank: usize) -> Result<Self> {
        reduce(letters, rank)
    }

    /// Parses `text`, using `rank` as the alphabet size.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        reduce(&parse_letters(text)?, rank)
    }

    /// Parses `text` over the smallest alphabet containing its letters
    /// (at least `min_rank`).
    pub fn parse_auto(text: &str, min_rank: usize) -> Result<Self> {
        let letters = parse_letters(text)?;
        let rank = letters.iter().map(|l| l.generator() + 1).max().unwrap_or(1).max(min_rank);
        reduce(&letters, rank)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn same_rank(&self, other: &Word) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { left: self.rank, right: other.rank });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Word) -> Result<Word> {
        self.same_rank(other)?;
        let mut raw = self.letters.clone();
        raw.extend_from_slice(&other.letters);
        reduce(&raw, self.rank)
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `v self v^-1`.
    pub fn conjugate_by(&self, v: &Word) -> Result<Word> {
        v.mul(self)?.mul(&v.inverse())
    }

    /// `[self, v] = self v self^-1 v^-1`.
    pub fn commutator(&self, v: &Word) -> Result<Word> {
        self.mul(v)?.mul(&self.inverse())?.mul(&v.inverse())
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut raw = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
        for _ in 0..e.unsigned_abs() {
            raw.extend_from_slice(&base.letters);
        }
        reduce(&raw, self.rank).expect("letters already in range")
    }

    /// Image under the endomorphism sending generator `i` to `images[i]`.
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        if images.len() != self.rank {
            return Err(Error::invalid(format!(
                "substitution needs {} images, got {}",
                self.rank,
                images.len()
            )));
        }
        let target = images[0].rank;
        let mut raw = Vec::new();
        for &l in &self.letters {
            let img = &images[l.generator()];
            if img.rank != target {
                return Err(Error::RankMismatch { left: target, right: img.rank });
            }
            if l.is_inverse() {
                raw.extend(img.letters.iter().rev().map(|x| x.inverse()));
            } else {
                raw.extend_from_slice(&img.letters);
            }
        }
        reduce(&raw, target)
    }

    /// Exponent-sum vector, reduced modulo `modulus` when it is positive.
    pub fn abelianization(&self, modulus: u64) -> AbelVector {
        let mut entries = vec![0i64; self.rank];
        for l in &self.letters {
            entries[l.generator()] += l.sign();
        }
        AbelVector::new(entries, modulus)
    }
}

/// Splits text into letters, expanding `x^k` powers.
pub fn parse_letters(text: &str) -> Result<Vec<Letter>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '*' || c == '.' || c == '1' {
            i += 1;
            continue;
        }
        let letter = Letter::from_char(c)
            .ok_or_else(|| Error::Parse(format!("unexpected character {c:?} in word {text:?}")))?;
        i += 1;
        let mut exp: i64 = 1;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let start = i;
            if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            exp = digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent {digits:?} in word {text:?}")))?;
        }
        let l = if exp < 0 { letter.inverse() } else { letter };
        out.extend(std::iter::repeat(l).take(exp.unsigned_abs() as usize));
    }
    Ok(out)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::parse_auto(s, 1)
    }
}

/// Exponent sums of a word, optionally reduced modulo `modulus` (0 = none).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelVector {
    pub entries: Vec<i64>,
    pub modulus: u64,
}

impl AbelVector {
    pub fn new(mut entries: Vec<i64>, modulus: u64) -> Self {
        if modulus > 0 {
            for e in &mut entries {
                *e = e.rem_euclid(modulus as i64);
            }
        }
        AbelVector { entries, modulus }
    }

    pub fn add(&self, other: &AbelVector) -> AbelVector {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        AbelVector::new(entries, self.modulus)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }
}
