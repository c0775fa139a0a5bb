//! Free products with amalgamation G = B *_A C and their submonoids.
//!
//! Letters `0..rb` belong to B and `rb..rb+rc` to C. The amalgamated subgroup is
//! given twice, by paired generators `α_i` in B and `β_i` in C.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{check_cap, final_automaton, read_final, read_step, step_automaton, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::fsa::Fsa;
use crate::group::{shift, FreeGroup, FreeSubgroup, FreeSubmonoid, Group, GroupKind, Key, Subgroup, Submonoid};
use crate::herbst::{image_under_iso, HerbstRoute};
use crate::rational::{benois_reduce, RationalSet, WitnessIndex};
use crate::stallings::StallingsGraph;
use crate::word::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    B,
    C,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::B => Side::C,
            Side::C => Side::B,
        }
    }
}

/// A maximal block of letters from one factor, in that factor's own alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Syllable {
    pub side: Side,
    pub word: Word,
}

pub struct Amalgam {
    b: Arc<dyn Group>,
    c: Arc<dyn Group>,
    a_in_b: Arc<dyn Subgroup>,
    a_in_c: Arc<dyn Subgroup>,
    graphs: Option<(StallingsGraph, StallingsGraph)>,
}

impl Amalgam {
    pub fn new(
        b: Arc<dyn Group>,
        c: Arc<dyn Group>,
        a_in_b: Arc<dyn Subgroup>,
        a_in_c: Arc<dyn Subgroup>,
    ) -> Result<Self> {
        if a_in_b.gens().len() != a_in_c.gens().len() {
            return Err(Error::Precondition(
                "amalgamated generators are not paired".into(),
            ));
        }
        Ok(Amalgam {
            b,
            c,
            a_in_b,
            a_in_c,
            graphs: None,
        })
    }

    /// Both factors free, A given by paired generator words.
    pub fn free(rb: usize, rc: usize, alphas: &[Word], betas: &[Word]) -> Result<Self> {
        let sb = FreeSubgroup::new(rb, alphas);
        let sc = FreeSubgroup::new(rc, betas);
        let graphs = (sb.graph().clone(), sc.graph().clone());
        let mut g = Amalgam::new(
            Arc::new(FreeGroup::new(rb)),
            Arc::new(FreeGroup::new(rc)),
            Arc::new(sb),
            Arc::new(sc),
        )?;
        g.graphs = Some(graphs);
        Ok(g)
    }

    pub fn rb(&self) -> usize {
        self.b.rank()
    }

    pub fn rc(&self) -> usize {
        self.c.rank()
    }

    pub fn factor(&self, s: Side) -> &Arc<dyn Group> {
        match s {
            Side::B => &self.b,
            Side::C => &self.c,
        }
    }

    pub fn subgroup(&self, s: Side) -> &Arc<dyn Subgroup> {
        match s {
            Side::B => &self.a_in_b,
            Side::C => &self.a_in_c,
        }
    }

    /// Stallings graphs of A in B and in C when both factors are free.
    pub fn graphs(&self) -> Option<&(StallingsGraph, StallingsGraph)> {
        self.graphs.as_ref()
    }

    pub fn split(&self, w: &Word) -> Vec<Syllable> {
        let rb = self.rb();
        let mut out: Vec<Syllable> = Vec::new();
        for &l in w.iter() {
            let (side, local) = if l.gen() < rb {
                (Side::B, l)
            } else {
                (Side::C, Letter::new(l.gen() - rb, l.is_inverse()))
            };
            match out.last_mut() {
                Some(s) if s.side == side => s.word.push(local),
                _ => out.push(Syllable {
                    side,
                    word: Word::letter(local),
                }),
            }
        }
        out
    }

    /// A local word lifted into the combined alphabet.
    pub fn lift(&self, side: Side, w: &Word) -> Word {
        match side {
            Side::B => w.clone(),
            Side::C => shift(w, self.rb()),
        }
    }

    pub fn join(&self, sylls: &[Syllable]) -> Word {
        Word::product(sylls.iter().map(|s| self.lift(s.side, &s.word)).collect::<Vec<_>>().iter())
    }

    /// If `w` lies in A, the same element written on the other side.
    pub fn across(&self, side: Side, w: &Word) -> Result<Option<Word>> {
        let Some(y) = self.subgroup(side).express(w)? else {
            return Ok(None);
        };
        let target = self.subgroup(side.other()).gens();
        Ok(Some(y.substitute(target)?.free_reduce()))
    }

    /// Alternating form whose syllables avoid A, or a single syllable (on the B side when in A).
    pub fn reduce_form(&self, w: &Word) -> Result<Vec<Syllable>> {
        let mut s = self.split(&w.free_reduce());
        loop {
            let mut merged: Vec<Syllable> = Vec::with_capacity(s.len());
            for x in s {
                match merged.last_mut() {
                    Some(last) if last.side == x.side => {
                        last.word = last.word.concat(&x.word).free_reduce();
                    }
                    _ => merged.push(x),
                }
            }
            s = merged;
            let mut trivial = None;
            for (i, x) in s.iter().enumerate() {
                if self.factor(x.side).is_trivial(&x.word)? {
                    trivial = Some(i);
                    break;
                }
            }
            if let Some(i) = trivial {
                s.remove(i);
                continue;
            }
            if s.len() < 2 {
                break;
            }
            let mut moved = false;
            for x in s.iter_mut() {
                if let Some(v) = self.across(x.side, &x.word)? {
                    x.side = x.side.other();
                    x.word = v;
                    moved = true;
                    break;
                }
            }
            if !moved {
                break;
            }
        }
        if let [x] = s.as_mut_slice() {
            if x.side == Side::C {
                if let Some(v) = self.across(Side::C, &x.word)? {
                    x.side = Side::B;
                    x.word = v;
                }
            }
        }
        Ok(s)
    }

    /// `b₁c₁…b_nc_n` with `b₁` and `c_n` possibly trivial.
    pub fn pairs(sylls: &[Syllable]) -> Vec<(Word, Word)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < sylls.len() {
            let (b, step) = if sylls[i].side == Side::B {
                (sylls[i].word.clone(), 1)
            } else {
                (Word::empty(), 0)
            };
            let c = sylls.get(i + step).map(|s| s.word.clone()).unwrap_or_default();
            out.push((b, c));
            i += step + 1;
        }
        out
    }
}

fn push_key(out: &mut Key, k: Key) {
    out.push(k.len() as u32);
    out.extend(k);
}

impl Group for Amalgam {
    fn rank(&self) -> usize {
        self.rb() + self.rc()
    }

    fn kind(&self) -> GroupKind {
        GroupKind::Amalgam
    }

    /// Leading A-part followed by right coset representatives, computed right to left.
    fn normal_form(&self, w: &Word) -> Result<Key> {
        let s = self.reduce_form(w)?;
        let mut key = Key::new();
        if s.is_empty() {
            push_key(&mut key, self.b.normal_form(&Word::empty())?);
            return Ok(key);
        }
        if s.len() == 1 && s[0].side == Side::B && self.a_in_b.express(&s[0].word)?.is_some() {
            push_key(&mut key, self.b.normal_form(&s[0].word)?);
            return Ok(key);
        }
        let mut carry = Word::empty();
        let mut reps: Vec<(Side, Key)> = Vec::new();
        for x in s.iter().rev() {
            let sub = self.subgroup(x.side);
            let g = x.word.concat(&carry.substitute(sub.gens())?);
            let (y, rep) = sub.coset_split(&g)?;
            reps.push((x.side, self.factor(x.side).normal_form(&rep)?));
            carry = y;
        }
        let lead = carry.substitute(self.a_in_b.gens())?;
        push_key(&mut key, self.b.normal_form(&lead)?);
        for (side, k) in reps.into_iter().rev() {
            key.push(side as u32);
            push_key(&mut key, k);
        }
        Ok(key)
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        Ok(self.reduce_form(w)?.is_empty())
    }
}

/// M = Mon⟨M_B ∪ M_C⟩ when A ⊆ M: g ∈ M iff every syllable of a reduced form lies in
/// the submonoid of its factor.
pub struct AmalgamThmA {
    g: Arc<Amalgam>,
    mb: Arc<dyn Submonoid>,
    mc: Arc<dyn Submonoid>,
}

impl AmalgamThmA {
    pub fn new(g: Arc<Amalgam>, mb: Arc<dyn Submonoid>, mc: Arc<dyn Submonoid>) -> Self {
        AmalgamThmA { g, mb, mc }
    }

    /// Every `α_i^{±1}` lies in M_B and every `β_i^{±1}` in M_C.
    pub fn hypothesis_holds(&self) -> Result<bool> {
        for (m, side) in [(&self.mb, Side::B), (&self.mc, Side::C)] {
            for a in self.g.subgroup(side).gens() {
                if m.member(a)?.is_none() || m.member(&a.invert())?.is_none() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl Submonoid for AmalgamThmA {
    fn member(&self, w: &Word) -> Result<Option<Vec<u32>>> {
        let mut out = Vec::new();
        for s in self.g.reduce_form(w)? {
            let m = match s.side {
                Side::B => &self.mb,
                Side::C => &self.mc,
            };
            match m.member(&s.word)? {
                Some(t) => out.extend(t),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

/// M = Mon⟨S_B ∪ S_C⟩ in an amalgam of free groups with M ∩ B = S_B and M ∩ C = S_C.
/// Decided by the chain Q₀ = {1}, Q_{2k−1} = S_B⁻¹Q_{2k−2}b_k ∩ A, Q_{2k} = S_C⁻¹Q_{2k−1}c_k ∩ A.
pub struct AmalgamThmB {
    g: Arc<Amalgam>,
    sb: Arc<FreeSubmonoid>,
    sc: Arc<FreeSubmonoid>,
    a_b: RationalSet,
    a_c: RationalSet,
    cap: usize,
}

impl AmalgamThmB {
    pub fn new(g: Arc<Amalgam>, sb: Arc<FreeSubmonoid>, sc: Arc<FreeSubmonoid>) -> Result<Self> {
        let (ga, gc) = g
            .graphs()
            .ok_or(Error::CapabilityMissing("rational sets need free factors".into()))?;
        let a_b = benois_reduce(&ga.to_fsa());
        let a_c = benois_reduce(&gc.to_fsa());
        Ok(AmalgamThmB {
            g,
            sb,
            sc,
            a_b,
            a_c,
            cap: DEFAULT_CAP,
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    fn graphs(&self) -> &(StallingsGraph, StallingsGraph) {
        self.g.graphs().expect("checked at construction")
    }

    fn parts(&self, side: Side) -> (&FreeSubmonoid, &RationalSet, &StallingsGraph, &StallingsGraph, usize) {
        let (ga, gc) = self.graphs();
        match side {
            Side::B => (&self.sb, &self.a_b, ga, gc, self.g.rc()),
            Side::C => (&self.sc, &self.a_c, gc, ga, self.g.rb()),
        }
    }

    /// `(S_B ∩ A)` carried to C equals `S_C ∩ A`.
    pub fn swap_condition(&self) -> Result<bool> {
        let (ga, gc) = self.graphs();
        let l = self.sb.set().intersect(&self.a_b)?;
        let img = image_under_iso(&l, ga, gc.gens(), self.g.rc(), HerbstRoute::Product)?;
        let r = self.sc.set().intersect(&self.a_c)?;
        Ok(img.same_subset(&r))
    }

    /// One chain step on `side`: the saturated step automaton and the next Q on the other side.
    fn step(&self, side: Side, q: &RationalSet, g: &Word) -> Result<(WitnessIndex, RationalSet)> {
        let (s, a, from, to, to_rank) = self.parts(side);
        let d = step_automaton(s.raw(), q, g, self.cap)?;
        let sat = benois_reduce(&d);
        check_cap(sat.states(), self.cap)?;
        let inter = sat.intersect(a)?;
        let next = image_under_iso(&inter, from, to.gens(), to_rank, HerbstRoute::Product)?;
        check_cap(next.states(), self.cap)?;
        Ok((WitnessIndex::new(d), next))
    }

    fn tokens(&self, side: Side, tags: &[u32]) -> Vec<u32> {
        let (s, ..) = self.parts(side);
        tags.iter().map(|&t| s.tokens()[t as usize]).collect()
    }
}

impl Submonoid for AmalgamThmB {
    fn member(&self, w: &Word) -> Result<Option<Vec<u32>>> {
        let sylls = self.g.reduce_form(w)?;
        let pairs = Amalgam::pairs(&sylls);
        if pairs.is_empty() {
            return Ok(Some(Vec::new()));
        }
        let n = pairs.len();
        let mut steps: Vec<(Side, WitnessIndex)> = Vec::with_capacity(2 * n);
        let mut q = benois_reduce(&Fsa::epsilon(self.g.rb()));
        for (k, (b, c)) in pairs.iter().enumerate() {
            let (idx, qc) = self.step(Side::B, &q, b)?;
            steps.push((Side::B, idx));
            if qc.is_empty() {
                return Ok(None);
            }
            if k + 1 == n {
                q = qc;
                break;
            }
            let (idx, qb) = self.step(Side::C, &qc, c)?;
            steps.push((Side::C, idx));
            if qb.is_empty() {
                return Ok(None);
            }
            q = qb;
        }
        let c_n = &pairs[n - 1].1;
        let f = final_automaton(&q, self.sc.raw(), self.cap)?;
        let fi = WitnessIndex::new(f);
        let Some(path) = fi.path(c_n) else {
            return Ok(None);
        };
        let (label, tags) = read_final(fi.fsa(), &path);
        let mut blocks: Vec<Vec<u32>> = vec![self.tokens(Side::C, &tags)];
        let mut xi = label.invert().free_reduce();
        for (side, idx) in steps.iter().rev() {
            let (_, _, from, to, _) = self.parts(*side);
            let y = to
                .member(&xi)
                .ok_or(Error::Precondition("chain element outside A".into()))?;
            let a = y.substitute(from.gens())?.free_reduce();
            let path = idx
                .path(&a)
                .ok_or(Error::Precondition("chain step without a witness path".into()))?;
            let (tags, label) = read_step(idx.fsa(), &path);
            blocks.push(self.tokens(*side, &tags));
            xi = label.free_reduce();
        }
        blocks.reverse();
        Ok(Some(blocks.concat()))
    }
}
