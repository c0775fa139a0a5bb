//! HNN extensions G = ⟨H, t | t⁻¹ a t = φ(a), a ∈ A⟩ and their submonoids.
//!
//! Letters `0..r` belong to the base H and letter `r` is the stable letter t.
//! A and B = φ(A) are given by paired generators `u_i ↦ v_i`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use spin::RwLock;

use crate::chain::{check_cap, final_automaton, read_final, read_step, step_automaton, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::fsa::Fsa;
use crate::group::{FreeGroup, FreeSubgroup, Group, GroupKind, Key, Subgroup, Submonoid};
use crate::herbst::{image_under_iso, HerbstRoute};
use crate::rational::{benois_reduce, RationalSet, WitnessIndex};
use crate::stallings::StallingsGraph;
use crate::word::{Letter, Word};

/// `g₀ t^{ε₁} g₁ ⋯ t^{ε_n} g_n` with no pinch left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrittonForm {
    pub syllables: Vec<Word>,
    pub signs: Vec<i8>,
}

impl BrittonForm {
    pub fn t_length(&self) -> usize {
        self.signs.len()
    }

    pub fn is_positive(&self) -> bool {
        self.signs.iter().all(|&e| e > 0)
    }
}

pub struct Hnn {
    base: Arc<dyn Group>,
    a: Arc<dyn Subgroup>,
    b: Arc<dyn Subgroup>,
    graphs: Option<(StallingsGraph, StallingsGraph)>,
}

impl Hnn {
    pub fn new(base: Arc<dyn Group>, a: Arc<dyn Subgroup>, b: Arc<dyn Subgroup>) -> Result<Self> {
        if a.gens().len() != b.gens().len() {
            return Err(Error::Precondition(
                "associated subgroups are not paired".into(),
            ));
        }
        Ok(Hnn {
            base,
            a,
            b,
            graphs: None,
        })
    }

    /// Free base of the given rank, `t⁻¹ u_i t = v_i`.
    pub fn free(rank: usize, u: &[Word], v: &[Word]) -> Result<Self> {
        let sa = FreeSubgroup::new(rank, u);
        let sb = FreeSubgroup::new(rank, v);
        let graphs = (sa.graph().clone(), sb.graph().clone());
        let mut g = Hnn::new(Arc::new(FreeGroup::new(rank)), Arc::new(sa), Arc::new(sb))?;
        g.graphs = Some(graphs);
        Ok(g)
    }

    pub fn base(&self) -> &Arc<dyn Group> {
        &self.base
    }

    pub fn base_rank(&self) -> usize {
        self.base.rank()
    }

    pub fn stable(&self) -> usize {
        self.base.rank()
    }

    pub fn a(&self) -> &Arc<dyn Subgroup> {
        &self.a
    }

    pub fn b(&self) -> &Arc<dyn Subgroup> {
        &self.b
    }

    /// Stallings graphs of A and B when the base is free.
    pub fn graphs(&self) -> Option<&(StallingsGraph, StallingsGraph)> {
        self.graphs.as_ref()
    }

    pub fn phi(&self, g: &Word) -> Result<Option<Word>> {
        match self.a.express(g)? {
            Some(y) => Ok(Some(y.substitute(self.b.gens())?.free_reduce())),
            None => Ok(None),
        }
    }

    pub fn phi_inv(&self, g: &Word) -> Result<Option<Word>> {
        match self.b.express(g)? {
            Some(y) => Ok(Some(y.substitute(self.a.gens())?.free_reduce())),
            None => Ok(None),
        }
    }

    /// Britton reduction by a stack of syllables.
    pub fn britton(&self, w: &Word) -> Result<BrittonForm> {
        let t = self.stable();
        let mut sylls: Vec<Word> = vec![Word::empty()];
        let mut signs: Vec<i8> = Vec::new();
        for &l in w.iter() {
            if l.gen() > t {
                return Err(Error::UnassignedLetter(l.gen()));
            }
            if l.gen() < t {
                let top = sylls.last_mut().expect("one syllable");
                if top.last() == Some(&l.inverse()) {
                    *top = top.slice(0, top.len() - 1);
                } else {
                    top.push(l);
                }
                continue;
            }
            let eps: i8 = if l.is_inverse() { -1 } else { 1 };
            if signs.last() == Some(&-eps) {
                let g = sylls.last().expect("one syllable");
                let img = if eps > 0 { self.phi(g)? } else { self.phi_inv(g)? };
                if let Some(h) = img {
                    sylls.pop();
                    signs.pop();
                    let prev = sylls.last_mut().expect("one syllable");
                    *prev = prev.concat(&h).free_reduce();
                    continue;
                }
            }
            signs.push(eps);
            sylls.push(Word::empty());
        }
        Ok(BrittonForm {
            syllables: sylls,
            signs,
        })
    }

    pub fn join(&self, f: &BrittonForm) -> Word {
        let t = self.stable();
        let mut out = f.syllables[0].clone();
        for (i, &e) in f.signs.iter().enumerate() {
            out.push(Letter::new(t, e < 0));
            out = out.concat(&f.syllables[i + 1]);
        }
        out
    }
}

fn push_key(out: &mut Key, k: Key) {
    out.push(k.len() as u32);
    out.extend(k);
}

impl Group for Hnn {
    fn rank(&self) -> usize {
        self.base.rank() + 1
    }

    fn kind(&self) -> GroupKind {
        GroupKind::Hnn
    }

    /// `h·t^{ε₁}r₁⋯t^{ε_n}r_n` with `r_i` a right coset representative of A (ε = −1) or B (ε = +1).
    fn normal_form(&self, w: &Word) -> Result<Key> {
        let f = self.britton(w)?;
        let n = f.signs.len();
        let mut carry = Word::empty();
        let mut reps: Vec<(i8, Key)> = Vec::with_capacity(n);
        for i in (1..=n).rev() {
            let g = f.syllables[i].concat(&carry);
            let (split_by, across) = if f.signs[i - 1] > 0 {
                (&self.b, &self.a)
            } else {
                (&self.a, &self.b)
            };
            let (y, rep) = split_by.coset_split(&g)?;
            reps.push((f.signs[i - 1], self.base.normal_form(&rep)?));
            carry = y.substitute(across.gens())?;
        }
        let mut key = Key::new();
        push_key(&mut key, self.base.normal_form(&f.syllables[0].concat(&carry))?);
        for (e, k) in reps.into_iter().rev() {
            key.push(if e > 0 { 1 } else { 0 });
            push_key(&mut key, k);
        }
        Ok(key)
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        let f = self.britton(w)?;
        if !f.signs.is_empty() {
            return Ok(false);
        }
        self.base.is_trivial(&f.syllables[0])
    }
}

/// M = Mon⟨T ∪ {t, t⁻¹}⟩ with A, B ⊆ T: g ∈ M iff every Britton syllable lies in T.
pub struct HnnThmC {
    g: Arc<Hnn>,
    t: Arc<dyn Submonoid>,
    t_token: u32,
    t_inv_token: u32,
}

impl HnnThmC {
    pub fn new(g: Arc<Hnn>, t: Arc<dyn Submonoid>, t_token: u32, t_inv_token: u32) -> Self {
        HnnThmC {
            g,
            t,
            t_token,
            t_inv_token,
        }
    }

    pub fn hypothesis_holds(&self) -> Result<bool> {
        for s in [self.g.a(), self.g.b()] {
            for x in s.gens() {
                if self.t.member(x)?.is_none() || self.t.member(&x.invert())?.is_none() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl Submonoid for HnnThmC {
    fn member(&self, w: &Word) -> Result<Option<Vec<u32>>> {
        let f = self.g.britton(w)?;
        let mut out = Vec::new();
        for (i, s) in f.syllables.iter().enumerate() {
            if i > 0 {
                out.push(if f.signs[i - 1] > 0 { self.t_token } else { self.t_inv_token });
            }
            match self.t.member(s)? {
                Some(toks) => out.extend(toks),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

/// Where the stable letters of a generator sit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Shape {
    /// `w`
    Base,
    /// `w·t^μ`
    Right(usize),
    /// `t^μ·w`
    Left(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnnGen {
    pub shape: Shape,
    /// Over the base alphabet.
    pub word: Word,
}

impl HnnGen {
    pub fn full(&self, t: usize) -> Word {
        let tp = |m: usize| Word::gen(t).pow(m as i64);
        match self.shape {
            Shape::Base => self.word.clone(),
            Shape::Right(m) => self.word.concat(&tp(m)),
            Shape::Left(m) => tp(m).concat(&self.word),
        }
    }

    /// Reads `w` as `t^a·h·t^b` with at most one of `a`, `b` nonzero.
    /// Returns the generator with positive powers and whether they were negative.
    pub fn parse(w: &Word, t: usize) -> Result<(HnnGen, bool)> {
        let w = w.free_reduce();
        let lead = w.iter().take_while(|l| l.gen() == t).count();
        let trail = w[lead..].iter().rev().take_while(|l| l.gen() == t).count();
        let mid = w.slice(lead, w.len() - trail);
        if mid.iter().any(|l| l.gen() == t) {
            return Err(Error::Precondition(
                "generator has stable letters between base letters".into(),
            ));
        }
        let a = w.slice(0, lead).exponent_sum(t);
        let b = w.slice(w.len() - trail, w.len()).exponent_sum(t);
        if a != 0 && b != 0 {
            return Err(Error::Precondition(
                "generator has stable letters on both sides".into(),
            ));
        }
        let (shape, neg) = if b != 0 {
            (Shape::Right(b.unsigned_abs() as usize), b < 0)
        } else if a != 0 {
            (Shape::Left(a.unsigned_abs() as usize), a < 0)
        } else {
            (Shape::Base, false)
        };
        Ok((HnnGen { shape, word: mid }, neg))
    }

    /// The inverse generator with the same shape family flipped.
    pub fn inverse(&self) -> HnnGen {
        let shape = match self.shape {
            Shape::Base => Shape::Base,
            Shape::Right(m) => Shape::Left(m),
            Shape::Left(m) => Shape::Right(m),
        };
        HnnGen {
            shape,
            word: self.word.invert(),
        }
    }
}

/// Kinds of N-set automata. Every N_{m,i}^{(j)} is one of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Entry {
    /// Mon⟨W₀⟩
    W0,
    /// Mon⟨W₀⟩·W_μ
    W0W(usize),
    /// {1}
    One,
    /// W′_μ·Mon⟨W₀⟩, or W′_μ·Mon⟨W₀⟩·W_ν
    Prime(usize, Option<usize>),
}

struct EntryData {
    /// Tagged with generator positions.
    raw: Fsa,
    set: RationalSet,
}

/// All sequences (N_{m,0}^{(j)}, …, N_{m,m}^{(j)}) for one m.
#[derive(Clone, Debug)]
pub struct NSetFamily {
    pub m: usize,
    /// C_m, the number of sequences produced by the recursion.
    pub count: u64,
    /// The sequences whose entries are all non-empty.
    pub sequences: Vec<Vec<Entry>>,
}

#[derive(Default)]
struct Memo {
    entries: BTreeMap<Entry, Arc<EntryData>>,
    families: BTreeMap<usize, Arc<NSetFamily>>,
}

struct Node {
    q: RationalSet,
    step: WitnessIndex,
}

/// M = Mon⟨W₀ ∪ W₁t ∪ … ∪ W_d t^d ∪ tW′₁ ∪ … ∪ t^d W′_d⟩ in an HNN extension of a free group.
pub struct ThmD {
    g: Arc<Hnn>,
    gens: Vec<HnnGen>,
    d: usize,
    a_set: RationalSet,
    cap: usize,
    memo: RwLock<Memo>,
}

const FAMILY_CAP: usize = 200_000;

impl ThmD {
    pub fn new(g: Arc<Hnn>, gens: Vec<HnnGen>) -> Result<Self> {
        let (ga, _) = g
            .graphs()
            .ok_or(Error::CapabilityMissing("rational sets need a free base".into()))?;
        let a_set = benois_reduce(&ga.to_fsa());
        let d = gens
            .iter()
            .map(|x| match x.shape {
                Shape::Base => 0,
                Shape::Right(m) | Shape::Left(m) => m,
            })
            .max()
            .unwrap_or(0);
        Ok(ThmD {
            g,
            gens,
            d,
            a_set,
            cap: DEFAULT_CAP,
            memo: RwLock::new(Memo::default()),
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn gens(&self) -> &[HnnGen] {
        &self.gens
    }

    pub fn hnn(&self) -> &Arc<Hnn> {
        &self.g
    }

    pub fn depth(&self) -> usize {
        self.d
    }

    fn rank(&self) -> usize {
        self.g.base_rank()
    }

    fn select(&self, shape: Shape) -> (Vec<Word>, Vec<u32>) {
        self.gens
            .iter()
            .enumerate()
            .filter(|(_, x)| x.shape == shape)
            .map(|(i, x)| (x.word.clone(), i as u32))
            .unzip()
    }

    fn tagged(a: Fsa, ids: &[u32]) -> Fsa {
        a.map_tags(|t| ids.get(t as usize).copied())
    }

    fn build_raw(&self, e: Entry) -> Fsa {
        let r = self.rank();
        let mon0 = || {
            let (w, ids) = self.select(Shape::Base);
            Self::tagged(Fsa::monoid(r, &w), &ids)
        };
        let words = |shape| {
            let (w, ids) = self.select(shape);
            Self::tagged(Fsa::from_words(r, &w), &ids)
        };
        match e {
            Entry::W0 => mon0(),
            Entry::One => Fsa::epsilon(r),
            Entry::W0W(m) => mon0().concat(&words(Shape::Right(m))).expect("same rank"),
            Entry::Prime(m, next) => {
                let mut a = words(Shape::Left(m)).concat(&mon0()).expect("same rank");
                if let Some(nu) = next {
                    a = a.concat(&words(Shape::Right(nu))).expect("same rank");
                }
                a
            }
        }
    }

    fn entry(&self, e: Entry) -> Arc<EntryData> {
        if let Some(x) = self.memo.read().entries.get(&e) {
            return x.clone();
        }
        let raw = self.build_raw(e);
        let set = benois_reduce(&raw);
        let data = Arc::new(EntryData { raw, set });
        self.memo.write().entries.entry(e).or_insert(data).clone()
    }

    fn nonempty(&self, e: Entry) -> bool {
        !self.entry(e).set.is_empty()
    }

    /// The N-set family for m, memoised across calls.
    pub fn build_nsets(&self, m: usize) -> Result<Arc<NSetFamily>> {
        if let Some(f) = self.memo.read().families.get(&m) {
            return Ok(f.clone());
        }
        let fam = if m == 0 {
            NSetFamily {
                m,
                count: 1,
                sequences: vec![vec![Entry::W0]],
            }
        } else {
            let mut count = 0u64;
            let mut seqs = Vec::new();
            for mu in 1..=self.d.min(m) {
                let sub = self.build_nsets(m - mu)?;
                count = count.saturating_add(sub.count.saturating_mul(2));
                let ones = core::iter::repeat(Entry::One).take(mu - 1);
                let first = Entry::W0W(mu);
                if self.nonempty(first) {
                    for s in &sub.sequences {
                        let mut x = vec![first];
                        x.extend(ones.clone());
                        x.extend_from_slice(s);
                        seqs.push(x);
                    }
                }
                for s in &sub.sequences {
                    let head = match s[0] {
                        Entry::W0 => Entry::Prime(mu, None),
                        Entry::W0W(nu) => Entry::Prime(mu, Some(nu)),
                        _ => unreachable!("sequences start with W0 or W0W"),
                    };
                    if !self.nonempty(head) {
                        continue;
                    }
                    let mut x = vec![Entry::W0];
                    x.extend(ones.clone());
                    x.push(head);
                    x.extend_from_slice(&s[1..]);
                    seqs.push(x);
                }
                if seqs.len() > FAMILY_CAP {
                    return Err(Error::ResourceExceeded {
                        what: "N-set sequences",
                        limit: FAMILY_CAP,
                    });
                }
            }
            NSetFamily {
                m,
                count,
                sequences: seqs,
            }
        };
        let fam = Arc::new(fam);
        Ok(self.memo.write().families.entry(m).or_insert(fam).clone())
    }

    /// The saturated set of an entry.
    pub fn entry_set(&self, e: Entry) -> RationalSet {
        self.entry(e).set.clone()
    }

    fn step(&self, e: Entry, q: &RationalSet, g: &Word) -> Result<Node> {
        let (ga, gb) = self.g.graphs().expect("checked at construction");
        let d = step_automaton(&self.entry(e).raw, q, g, self.cap)?;
        let sat = benois_reduce(&d);
        check_cap(sat.states(), self.cap)?;
        let inter = sat.intersect(&self.a_set)?;
        let next = image_under_iso(&inter, ga, gb.gens(), self.rank(), HerbstRoute::Product)?;
        check_cap(next.states(), self.cap)?;
        Ok(Node {
            q: next,
            step: WitnessIndex::new(d),
        })
    }

    /// Generator positions whose product equals `w`, if `w ∈ M`.
    pub fn member(&self, w: &Word) -> Result<Option<Vec<u32>>> {
        let f = self.g.britton(w)?;
        if !f.is_positive() {
            return Ok(None);
        }
        let n = f.t_length();
        let fam = self.build_nsets(n)?;
        let (_, gb) = self.g.graphs().expect("checked at construction");
        let q0 = benois_reduce(&Fsa::epsilon(self.rank()));
        let mut nodes: BTreeMap<Vec<Entry>, Option<Arc<Node>>> = BTreeMap::new();
        'seq: for seq in &fam.sequences {
            let mut chain: Vec<Arc<Node>> = Vec::with_capacity(n);
            for i in 0..n {
                let key = seq[..=i].to_vec();
                let node = match nodes.get(&key) {
                    Some(x) => x.clone(),
                    None => {
                        let q = chain.last().map(|x| &x.q).unwrap_or(&q0);
                        let node = self.step(seq[i], q, &f.syllables[i])?;
                        let node = (!node.q.is_empty()).then(|| Arc::new(node));
                        nodes.insert(key, node.clone());
                        node
                    }
                };
                match node {
                    Some(x) => chain.push(x),
                    None => continue 'seq,
                }
            }
            let q = chain.last().map(|x| &x.q).unwrap_or(&q0);
            let last = self.entry(seq[n]);
            let fi = WitnessIndex::new(final_automaton(q, &last.raw, self.cap)?);
            let Some(path) = fi.path(&f.syllables[n]) else {
                continue;
            };
            let (label, tags) = read_final(fi.fsa(), &path);
            let mut blocks = vec![tags];
            let mut beta = label.invert().free_reduce();
            for node in chain.iter().rev() {
                let y = gb
                    .member(&beta)
                    .ok_or(Error::Precondition("chain element outside B".into()))?;
                let a = y.substitute(self.g.a().gens())?.free_reduce();
                let path = node
                    .step
                    .path(&a)
                    .ok_or(Error::Precondition("chain step without a witness path".into()))?;
                let (tags, label) = read_step(node.step.fsa(), &path);
                blocks.push(tags);
                beta = label.free_reduce();
            }
            blocks.reverse();
            return Ok(Some(blocks.concat()));
        }
        Ok(None)
    }
}

/// A submonoid of an HNN extension of a free group from generator words over base ∪ {t}.
/// Generators with negative stable powers are handled through inverses.
pub struct HnnSubmonoid {
    inner: ThmD,
    inverted: bool,
    tokens: Vec<u32>,
}

impl HnnSubmonoid {
    pub fn new(g: Arc<Hnn>, gens: &[Word], tokens: Vec<u32>) -> Result<Self> {
        if gens.len() != tokens.len() {
            return Err(Error::Precondition("one token per generator".into()));
        }
        let t = g.stable();
        let mut parsed = Vec::with_capacity(gens.len());
        let (mut pos, mut neg) = (false, false);
        for w in gens {
            let (x, is_neg) = HnnGen::parse(w, t)?;
            if x.shape != Shape::Base {
                pos |= !is_neg;
                neg |= is_neg;
            }
            parsed.push(x);
        }
        if pos && neg {
            return Err(Error::Precondition(
                "generators mix positive and negative stable powers".into(),
            ));
        }
        if neg {
            parsed = parsed.iter().map(HnnGen::inverse).collect();
        }
        Ok(HnnSubmonoid {
            inner: ThmD::new(g, parsed)?,
            inverted: neg,
            tokens,
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.inner = self.inner.with_cap(cap);
        self
    }

    pub fn engine(&self) -> &ThmD {
        &self.inner
    }

    pub fn inverted(&self) -> bool {
        self.inverted
    }
}

impl Submonoid for HnnSubmonoid {
    fn member(&self, w: &Word) -> Result<Option<Vec<u32>>> {
        let found = if self.inverted {
            self.inner.member(&w.invert())?.map(|mut v| {
                v.reverse();
                v
            })
        } else {
            self.inner.member(w)?
        };
        Ok(found.map(|v| v.iter().map(|&i| self.tokens[i as usize]).collect()))
    }
}
