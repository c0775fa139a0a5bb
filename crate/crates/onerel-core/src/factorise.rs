//! Factorisations of a relator into invertible pieces.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fsa::Fsa;
use crate::rational::{benois_reduce, WitnessIndex};
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorisationKind {
    Adjan,
    Benois,
    User,
}

/// A word of U = pref(w) ∪ pref(w⁻¹).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum UWord {
    Prefix(usize),
    InversePrefix(usize),
}

impl UWord {
    pub fn word(self, w: &Word) -> Word {
        match self {
            UWord::Prefix(k) => w.slice(0, k),
            UWord::InversePrefix(k) => w.invert().slice(0, k),
        }
    }

    /// The prefix of w equal to this word in the group ⟨X | w = 1⟩, by length.
    pub fn as_prefix_len(self, n: usize) -> usize {
        match self {
            UWord::Prefix(k) => k,
            UWord::InversePrefix(k) => n - k,
        }
    }
}

/// For a cut after `cut` letters: U-words whose product reduces to the inverse of that prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub cut: usize,
    pub factors: Vec<UWord>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorisation {
    pub relator: Word,
    pub cuts: Vec<usize>,
    pub kind: FactorisationKind,
    pub certificates: Vec<Certificate>,
}

impl Factorisation {
    pub fn new(relator: Word, mut cuts: Vec<usize>, kind: FactorisationKind) -> Result<Self> {
        cuts.sort_unstable();
        cuts.dedup();
        if cuts.iter().any(|&c| c == 0 || c >= relator.len()) {
            return Err(Error::Precondition("cut outside the relator".into()));
        }
        Ok(Factorisation {
            relator,
            cuts,
            kind,
            certificates: Vec::new(),
        })
    }

    /// Single-piece factorisation.
    pub fn trivial(relator: Word, kind: FactorisationKind) -> Self {
        Factorisation {
            relator,
            cuts: Vec::new(),
            kind,
            certificates: Vec::new(),
        }
    }

    /// Piece boundaries including 0 and |w|.
    pub fn bounds(&self) -> Vec<usize> {
        let mut b = vec![0];
        b.extend_from_slice(&self.cuts);
        b.push(self.relator.len());
        b
    }

    pub fn pieces(&self) -> Vec<Word> {
        self.bounds()
            .windows(2)
            .map(|p| self.relator.slice(p[0], p[1]))
            .collect()
    }

    pub fn certificate(&self, cut: usize) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.cut == cut)
    }
}

/// `cuts(f2) ⊆ cuts(f1)`: f1 is at least as fine as f2.
pub fn refines(f1: &Factorisation, f2: &Factorisation) -> Result<bool> {
    if f1.relator != f2.relator {
        return Err(Error::Precondition("factorisations of different relators".into()));
    }
    Ok(f2.cuts.iter().all(|c| f1.cuts.contains(c)))
}

/// Distinct non-empty words of U in a fixed order.
pub fn u_words(w: &Word) -> Vec<(UWord, Word)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let n = w.len();
    let cands = (1..=n)
        .map(UWord::Prefix)
        .chain((1..=n).map(UWord::InversePrefix));
    for u in cands {
        let word = u.word(w);
        if seen.insert(word.clone()) {
            out.push((u, word));
        }
    }
    out
}

/// Cut after prefix p exactly when p⁻¹ lies in V = Mon⟨red(U)⟩.
pub fn benois_pieces(w: &Word) -> Result<Factorisation> {
    if w.is_empty() {
        return Err(Error::Precondition("empty relator".into()));
    }
    let rank = w.rank_hint();
    let us = u_words(w);
    let gens: Vec<Word> = us.iter().map(|(_, x)| x.free_reduce()).collect();
    let monoid = Fsa::monoid(rank, &gens);
    let v = benois_reduce(&monoid);
    let index = WitnessIndex::new(monoid);
    let mut cuts = Vec::new();
    let mut certificates = Vec::new();
    for k in 1..w.len() {
        let target = w.slice(0, k).invert();
        if !v.member(&target) {
            continue;
        }
        let tags = index
            .tags(&target)
            .ok_or(Error::Precondition("saturated membership without a witness path".into()))?;
        let factors: Vec<UWord> = tags.iter().map(|&t| us[t as usize].0).collect();
        cuts.push(k);
        certificates.push(Certificate { cut: k, factors });
    }
    let mut f = Factorisation::new(w.clone(), cuts, FactorisationKind::Benois)?;
    f.certificates = certificates;
    Ok(f)
}

fn is_prefix(u: &[crate::word::Letter], v: &[crate::word::Letter]) -> bool {
    u.len() <= v.len() && &v[..u.len()] == u
}

fn is_suffix(u: &[crate::word::Letter], v: &[crate::word::Letter]) -> bool {
    u.len() <= v.len() && &v[v.len() - u.len()..] == u
}

fn overlap_step(wk: &BTreeSet<Word>) -> BTreeSet<Word> {
    let mut next = BTreeSet::new();
    // (i) kept unless a proper prefix or suffix of another word.
    for u in wk {
        let covered = wk
            .iter()
            .any(|v| v != u && (is_prefix(u, v) || is_suffix(u, v)));
        if !covered {
            next.insert(u.clone());
        }
    }
    for p in wk {
        for k in 1..=p.len() {
            let u = &p[..k];
            // (ii) uv, v'u ∈ W_k, not both v and v' empty.
            let ok = wk
                .iter()
                .any(|s| is_suffix(u, s) && (k < p.len() || s.len() > u.len()));
            if ok {
                next.insert(Word::from(u.to_vec()));
            }
        }
        // (iii) p = uv, v ≠ ε a prefix of some q = vv'.
        for k in 1..p.len() {
            let v = &p[k..];
            if wk.iter().any(|q| is_prefix(v, q)) {
                next.insert(p.slice(0, k));
            }
        }
        // (iv) s = v'u, v' ≠ ε a suffix of some q = vv'.
        for k in 1..p.len() {
            let vp = &p[..k];
            if wk.iter().any(|q| is_suffix(vp, q)) {
                next.insert(p.slice(k, p.len()));
            }
        }
    }
    next
}

/// The stabilised set Γ of Adjan's overlap rules started from `relators`.
pub fn adjan_overlap(relators: &[Word]) -> BTreeSet<Word> {
    let mut wk: BTreeSet<Word> = relators.iter().filter(|w| !w.is_empty()).cloned().collect();
    let mut history = vec![wk.clone()];
    loop {
        let next = overlap_step(&wk);
        if next == wk || history.contains(&next) {
            return next;
        }
        history.push(next.clone());
        wk = next;
    }
}

/// Factorisation induced by Γ: the finest split of w into proper Γ-words, preferring
/// the shortest piece at each position from the left; w itself when none exists.
pub fn adjan_factorisation(w: &Word) -> Factorisation {
    let gamma = adjan_overlap(core::slice::from_ref(w));
    let pieces: Vec<&Word> = gamma.iter().filter(|g| *g != w).collect();
    let n = w.len();
    // reach[i]: w[i..] splits into pieces.
    let mut reach = vec![false; n + 1];
    reach[n] = true;
    for i in (0..n).rev() {
        reach[i] = pieces
            .iter()
            .any(|p| is_prefix(p, &w[i..]) && reach[i + p.len()]);
    }
    if !reach[0] || pieces.is_empty() {
        return Factorisation::trivial(w.clone(), FactorisationKind::Adjan);
    }
    let mut cuts = Vec::new();
    let mut i = 0;
    while i < n {
        let len = pieces
            .iter()
            .filter(|p| is_prefix(p, &w[i..]) && reach[i + p.len()])
            .map(|p| p.len())
            .min()
            .expect("reachable position has a piece");
        i += len;
        if i < n {
            cuts.push(i);
        }
    }
    Factorisation::new(w.clone(), cuts, FactorisationKind::Adjan).expect("cuts inside the word")
}
