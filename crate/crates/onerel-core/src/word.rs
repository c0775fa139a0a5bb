//! Letters, words and the elementary free-group operations on them.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::error::{Error, Result};

/// A generator or its inverse. Encoded as `2 * gen + inv` so that inversion is `^ 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u32);

impl Letter {
    #[inline]
    pub const fn new(gen: usize, inverse: bool) -> Self {
        Letter(((gen as u32) << 1) | inverse as u32)
    }

    #[inline]
    pub const fn pos(gen: usize) -> Self {
        Self::new(gen, false)
    }

    #[inline]
    pub const fn neg(gen: usize) -> Self {
        Self::new(gen, true)
    }

    #[inline]
    pub const fn gen(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub const fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub const fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// +1 for a generator, -1 for an inverse.
    #[inline]
    pub const fn sign(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    /// Dense index into tables over the doubled alphabet.
    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn from_index(i: usize) -> Self {
        Letter(i as u32)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inverse() {
            write!(f, "x{}^-1", self.gen())
        } else {
            write!(f, "x{}", self.gen())
        }
    }
}

/// Sign pattern of the running t-exponent sums over the prefixes of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrefixSign {
    Positive,
    Negative,
    Mixed,
    /// t does not occur.
    ZeroFree,
}

/// A finite sequence of letters. Value semantic; no implicit reduction.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl Word {
    pub const fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(alloc::vec![l])
    }

    pub fn gen(g: usize) -> Self {
        Self::letter(Letter::pos(g))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Concatenation of many words, unreduced.
    pub fn product<'a, I: IntoIterator<Item = &'a Word>>(parts: I) -> Word {
        let mut v = Vec::new();
        for p in parts {
            v.extend_from_slice(&p.0);
        }
        Word(v)
    }

    /// `self^n` for any integer n, as a plain (unreduced) concatenation.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }

    /// Largest generator index plus one, i.e. the smallest rank containing the word.
    pub fn rank_hint(&self) -> usize {
        self.0.iter().map(|l| l.gen() + 1).max().unwrap_or(0)
    }

    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(&f), Some(&l)) => self.len() == 1 || f != l.inverse(),
                _ => true,
            }
    }

    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Returns `(c, core)` with `self = c·core·c⁻¹` in the free group and `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let r = self.free_reduce();
        let mut i = 0;
        let n = r.len();
        while i < n / 2 && r.0[i] == r.0[n - 1 - i].inverse() {
            i += 1;
        }
        (r.slice(0, i), r.slice(i, n - i))
    }

    /// Replaces generator `g` by `assignment[g]`; inverses by formal inverses. No reduction.
    pub fn substitute(&self, assignment: &[Word]) -> Result<Word> {
        let mut v = Vec::new();
        for &l in &self.0 {
            let img = assignment
                .get(l.gen())
                .ok_or(Error::UnassignedLetter(l.gen()))?;
            if l.is_inverse() {
                v.extend(img.0.iter().rev().map(|x| x.inverse()));
            } else {
                v.extend_from_slice(&img.0);
            }
        }
        Ok(Word(v))
    }

    /// All prefixes, shortest first, including ε and the word itself.
    pub fn prefixes(&self) -> Vec<Word> {
        (0..=self.len()).map(|k| self.slice(0, k)).collect()
    }

    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.0
            .iter()
            .filter(|l| l.gen() == gen)
            .map(|l| l.sign())
            .sum()
    }

    pub fn occurrences(&self, gen: usize) -> usize {
        self.0.iter().filter(|l| l.gen() == gen).count()
    }

    pub fn prefix_sign(&self, gen: usize) -> PrefixSign {
        if self.occurrences(gen) == 0 {
            return PrefixSign::ZeroFree;
        }
        let (mut s, mut lo, mut hi) = (0i64, 0i64, 0i64);
        for l in &self.0 {
            if l.gen() == gen {
                s += l.sign();
                lo = lo.min(s);
                hi = hi.max(s);
            }
        }
        match (lo < 0, hi > 0) {
            (false, _) => PrefixSign::Positive,
            (true, false) => PrefixSign::Negative,
            (true, true) => PrefixSign::Mixed,
        }
    }

    /// Rotation starting at position `k`.
    pub fn rotate(&self, k: usize) -> Word {
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Relabels generators through `map`; letters keep their sign.
    pub fn rename(&self, map: impl Fn(usize) -> usize) -> Word {
        self.0
            .iter()
            .map(|l| Letter::new(map(l.gen()), l.is_inverse()))
            .collect()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }
}

/// One letter of a ρ_t image: `gen_{sub}` with a sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubLetter {
    pub gen: usize,
    pub sub: i64,
    pub inverse: bool,
}

/// Subscripted letters of `w`: each x ≠ t becomes x_{-i}, i the t-sum of the preceding prefix.
pub fn rho_letters(w: &Word, t: usize) -> Vec<SubLetter> {
    let mut s = 0i64;
    let mut out = Vec::new();
    for &l in w.letters() {
        if l.gen() == t {
            s += l.sign();
        } else {
            out.push(SubLetter {
                gen: l.gen(),
                sub: -s,
                inverse: l.is_inverse(),
            });
        }
    }
    out
}

/// The ρ_t image of a relator with zero t-exponent sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoImage {
    /// Over the derived alphabet, indexed as in `symbols`.
    pub image: Word,
    /// Derived generator index ↦ (base generator, subscript), sorted.
    pub symbols: Vec<(usize, i64)>,
    /// Base generator ↦ (μ_x, m_x).
    pub bounds: BTreeMap<usize, (i64, i64)>,
    pub stable: usize,
}

impl RhoImage {
    pub fn index_of(&self, gen: usize, sub: i64) -> Option<usize> {
        self.symbols.binary_search(&(gen, sub)).ok()
    }

    /// Maps subscripted letters into the derived alphabet; `None` if outside the window.
    pub fn encode(&self, letters: &[SubLetter]) -> Option<Word> {
        letters
            .iter()
            .map(|s| {
                self.index_of(s.gen, s.sub)
                    .map(|i| Letter::new(i, s.inverse))
            })
            .collect()
    }
}

pub fn rho(w: &Word, t: usize) -> Result<RhoImage> {
    if w.occurrences(t) == 0 {
        return Err(Error::Precondition("stable letter does not occur".into()));
    }
    if w.exponent_sum(t) != 0 {
        return Err(Error::Precondition(
            "stable letter has nonzero exponent sum".into(),
        ));
    }
    let subs = rho_letters(w, t);
    let mut bounds: BTreeMap<usize, (i64, i64)> = BTreeMap::new();
    for s in &subs {
        let e = bounds.entry(s.gen).or_insert((s.sub, s.sub));
        e.0 = e.0.min(s.sub);
        e.1 = e.1.max(s.sub);
    }
    let symbols: Vec<(usize, i64)> = bounds
        .iter()
        .flat_map(|(&g, &(lo, hi))| (lo..=hi).map(move |l| (g, l)))
        .collect();
    let mut r = RhoImage {
        image: Word::empty(),
        symbols,
        bounds,
        stable: t,
    };
    r.image = r.encode(&subs).expect("subscripts lie in their window");
    Ok(r)
}
