//! A word-problem backend for one-relator groups whose Magnus rewriting has a free base.
//!
//! ⟨X | r⟩ is brought to a relator with a zero-exponent letter t by Euclid moves
//! x ↦ x·y^k, then read as an HNN extension of ⟨Ξ | ρ_t(r)⟩. The base must be free,
//! which is checked by finding a letter of ρ_t(r) that occurs once.

use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::format;

use crate::amalgam::Amalgam;
use crate::error::{Error, Result};
use crate::group::{CyclicGroup, FreeGroup, Group, GroupKind, Mapped, TrivialSubgroup};
use crate::hnn::Hnn;
use crate::word::{rho, rho_letters, RhoImage, SubLetter, Word};

/// ⟨X | r⟩ as an HNN extension of a free group.
pub struct MagnusHnn {
    pub rank: usize,
    pub relator: Word,
    pub rho: RhoImage,
    /// Derived symbol expressed over the base alphabet.
    pub basis: Vec<Word>,
    pub hnn: Arc<Hnn>,
    /// Generator of ⟨X | r⟩ ↦ word over the HNN alphabet.
    pub images: Vec<Word>,
}

impl MagnusHnn {
    /// Subscripted letters into the base alphabet; `None` outside the window.
    pub fn to_base(&self, letters: &[SubLetter]) -> Option<Word> {
        let w = self.rho.encode(letters)?;
        Some(w.substitute(&self.basis).ok()?.free_reduce())
    }

    /// The group handle over X.
    pub fn group(&self) -> Mapped {
        Mapped::new(self.hnn.clone(), self.images.clone(), GroupKind::OneRelatorFree)
    }
}

/// Requires zero t-exponent and ρ_t(r) cyclically reduced with a letter occurring once.
pub fn magnus_hnn(rank: usize, r: &Word, t: usize) -> Result<MagnusHnn> {
    let rh = rho(r, t)?;
    if !rh.image.is_cyclically_reduced() {
        return Err(Error::Unsupported("ρ image is not cyclically reduced".into()));
    }
    let nsym = rh.symbols.len();
    let Some(e) = (0..nsym).find(|&s| rh.image.occurrences(s) == 1) else {
        return Err(Error::Unsupported(
            "ρ image has no letter occurring once; base not known to be free".into(),
        ));
    };
    let pos = rh.image.iter().position(|l| l.gen() == e).expect("occurs once");
    let p = rh.image.slice(0, pos);
    let q = rh.image.slice(pos + 1, rh.image.len());
    let inv = rh.image[pos].is_inverse();
    let mut basis: Vec<Word> = Vec::with_capacity(nsym);
    let mut k = 0;
    for s in 0..nsym {
        if s == e {
            basis.push(Word::empty());
        } else {
            basis.push(Word::gen(k));
            k += 1;
        }
    }
    let solved = p.invert().concat(&q.invert());
    let solved = if inv { solved.invert() } else { solved };
    basis[e] = solved.substitute(&basis)?.free_reduce();
    let extras: Vec<usize> = (0..rank)
        .filter(|&g| g != t && r.occurrences(g) == 0)
        .collect();
    let base_rank = k + extras.len();
    let stable = base_rank;
    let mut u = Vec::new();
    let mut v = Vec::new();
    for (i, &(g, sub)) in rh.symbols.iter().enumerate() {
        let (_, m) = rh.bounds[&g];
        if sub < m {
            u.push(basis[i].clone());
            v.push(basis[rh.index_of(g, sub + 1).expect("window")].clone());
        }
    }
    let hnn = Arc::new(Hnn::free(base_rank, &u, &v)?);
    let tw = |n: i64| Word::gen(stable).pow(n);
    let mut images = Vec::with_capacity(rank);
    for g in 0..rank {
        if g == t {
            images.push(Word::gen(stable));
        } else if let Some(x) = extras.iter().position(|&y| y == g) {
            images.push(Word::gen(k + x));
        } else {
            let (lo, hi) = rh.bounds[&g];
            let j = 0i64.clamp(lo, hi);
            let xj = &basis[rh.index_of(g, j).expect("window")];
            images.push(tw(j).concat(xj).concat(&tw(-j)).free_reduce());
        }
    }
    Ok(MagnusHnn {
        rank,
        relator: r.clone(),
        rho: rh,
        basis,
        hnn,
        images,
    })
}

/// Tries each zero-exponent letter and each rotation of r.
pub fn find_magnus(rank: usize, r: &Word) -> Result<MagnusHnn> {
    let mut last = Error::Unsupported("no letter with zero exponent sum".into());
    for t in 0..rank {
        if r.occurrences(t) == 0 || r.exponent_sum(t) != 0 {
            continue;
        }
        for k in 0..r.len() {
            match magnus_hnn(rank, &r.rotate(k), t) {
                Ok(m) => return Ok(m),
                Err(e @ Error::Unsupported(_)) => last = e,
                Err(e) => return Err(e),
            }
        }
    }
    Err(last)
}

/// `x ↦ x·y^k` on generator images.
fn euclid_move(rank: usize, x: usize, y: usize, k: i64) -> Vec<Word> {
    (0..rank)
        .map(|g| {
            if g == x {
                Word::gen(x).concat(&Word::gen(y).pow(k))
            } else {
                Word::gen(g)
            }
        })
        .collect()
}

fn compose(images: &[Word], tau: &[Word]) -> Result<Vec<Word>> {
    images
        .iter()
        .map(|w| Ok(w.substitute(tau)?.free_reduce()))
        .collect()
}

/// A word-problem handle for ⟨X | r⟩ over `rank` generators.
pub fn one_relator_group(rank: usize, r: &Word) -> Result<Arc<dyn Group>> {
    let (_, mut r) = r.free_reduce().cyclic_reduce();
    if r.is_empty() {
        return Ok(Arc::new(FreeGroup::new(rank)));
    }
    // a letter occurring once can be solved for
    if let Some(x) = (0..rank).find(|&g| r.occurrences(g) == 1) {
        let pos = r.iter().position(|l| l.gen() == x).expect("occurs");
        let p = r.slice(0, pos);
        let q = r.slice(pos + 1, r.len());
        let renum = |g: usize| if g > x { g - 1 } else { g };
        let basis: Vec<Word> = (0..rank)
            .map(|g| if g == x { Word::empty() } else { Word::gen(renum(g)) })
            .collect();
        let solved = p.invert().concat(&q.invert());
        let solved = if r[pos].is_inverse() { solved.invert() } else { solved };
        let mut images = basis.clone();
        images[x] = solved.substitute(&basis)?.free_reduce();
        return Ok(Arc::new(Mapped::new(
            Arc::new(FreeGroup::new(rank - 1)),
            images,
            GroupKind::OneRelatorFree,
        )));
    }
    let used: Vec<usize> = (0..rank).filter(|&g| r.occurrences(g) > 0).collect();
    if used.len() == 1 {
        let y = used[0];
        let n = r.exponent_sum(y).unsigned_abs();
        let cyc: Arc<dyn Group> = Arc::new(CyclicGroup::new(n));
        let free: Arc<dyn Group> = Arc::new(FreeGroup::new(rank - 1));
        let g = Amalgam::new(
            cyc.clone(),
            free.clone(),
            Arc::new(TrivialSubgroup::new(cyc)),
            Arc::new(TrivialSubgroup::new(free)),
        )?;
        let images = (0..rank)
            .map(|h| match h.cmp(&y) {
                core::cmp::Ordering::Equal => Word::gen(0),
                core::cmp::Ordering::Less => Word::gen(1 + h),
                core::cmp::Ordering::Greater => Word::gen(h),
            })
            .collect();
        return Ok(Arc::new(Mapped::new(Arc::new(g), images, GroupKind::OneRelatorFree)));
    }
    if let Some(c) = conj_pinched(rank, &r) {
        return Ok(Arc::new(c.group()?));
    }
    let mut sigma: Vec<Word> = (0..rank).map(Word::gen).collect();
    for _ in 0..64 {
        match find_magnus(rank, &r) {
            Ok(m) => {
                let images = compose(&sigma, &m.images)?;
                return Ok(Arc::new(Mapped::new(m.hnn.clone(), images, GroupKind::OneRelatorFree)));
            }
            Err(Error::Unsupported(_)) => {}
            Err(e) => return Err(e),
        }
        if used.iter().any(|&g| r.exponent_sum(g) == 0) {
            break;
        }
        // x ↦ x·y^k turns the exponent of y into e_y + k·e_x; take it mod e_x
        let mut es: Vec<(i64, usize)> = used.iter().map(|&g| (r.exponent_sum(g), g)).collect();
        es.sort_by_key(|(e, _)| e.unsigned_abs());
        let (ex, x) = es[0];
        let (ey, y) = es[1];
        let tau = euclid_move(rank, x, y, -ey.div_euclid(ex));
        r = r.substitute(&tau)?.free_reduce().cyclic_reduce().1;
        sigma = compose(&sigma, &tau)?;
    }
    Err(Error::Unsupported(format!(
        "no free-base Magnus rewriting found for a relator of length {}",
        r.len()
    )))
}

/// r = t⁻¹·u·t·v⁻¹ up to rotation, u and v free of t: an HNN extension of the free group on X ∖ {t}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjPinched {
    pub rank: usize,
    pub t: usize,
    /// Rotation of the relator that has the form t⁻¹·u·t·v⁻¹.
    pub rotation: usize,
    /// Over X, not containing t.
    pub u: Word,
    pub v: Word,
}

impl ConjPinched {
    /// Base letter for generator `g ≠ t`.
    pub fn base_letter(&self, g: usize) -> usize {
        if g > self.t {
            g - 1
        } else {
            g
        }
    }

    fn to_base(&self, w: &Word) -> Word {
        w.rename(|g| self.base_letter(g))
    }

    pub fn hnn(&self) -> Result<Hnn> {
        Hnn::free(self.rank - 1, &[self.to_base(&self.u)], &[self.to_base(&self.v)])
    }

    /// Generator ↦ word over the HNN alphabet (base letters, then t).
    pub fn images(&self) -> Vec<Word> {
        (0..self.rank)
            .map(|g| {
                if g == self.t {
                    Word::gen(self.rank - 1)
                } else {
                    Word::gen(self.base_letter(g))
                }
            })
            .collect()
    }

    pub fn group(&self) -> Result<Mapped> {
        Ok(Mapped::new(Arc::new(self.hnn()?), self.images(), GroupKind::Hnn))
    }
}

pub fn conj_pinched(rank: usize, r: &Word) -> Option<ConjPinched> {
    if !r.is_cyclically_reduced() {
        return None;
    }
    for t in 0..rank {
        if r.occurrences(t) != 2 || r.exponent_sum(t) != 0 {
            continue;
        }
        for k in 0..r.len() {
            let w = r.rotate(k);
            if w[0].gen() != t || !w[0].is_inverse() {
                continue;
            }
            let j = w.iter().rposition(|l| l.gen() == t).expect("second occurrence");
            let u = w.slice(1, j);
            let v = w.slice(j + 1, w.len()).invert();
            if u.is_empty() || v.is_empty() {
                continue;
            }
            return Some(ConjPinched {
                rank,
                t,
                rotation: k,
                u,
                v,
            });
        }
    }
    None
}

/// Helper for callers that already know ρ letters of a word.
pub fn rho_base(m: &MagnusHnn, w: &Word) -> Option<Word> {
    m.to_base(&rho_letters(w, m.rho.stable))
}
