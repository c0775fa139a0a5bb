//! Group handles: word problems, canonical normal forms, subgroup and submonoid oracles.
//!
//! Everything composes through trait objects so that amalgams and HNN extensions can
//! take each other (and one-relator backends) as factors.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fsa::Fsa;
use crate::rational::{monoid_set, RationalSet, WitnessIndex};
use crate::stallings::StallingsGraph;
use crate::word::{Letter, Word};

/// Canonical normal form: two words have equal keys iff they are equal in the group.
pub type Key = Vec<u32>;

/// Separator inside composite keys; letter indices never reach it.
pub const SEP: u32 = u32::MAX;

pub fn word_key(w: &Word) -> Key {
    w.iter().map(|l| l.index() as u32).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Free,
    Cyclic,
    Amalgam,
    Hnn,
    OneRelatorFree,
    Mapped,
}

/// Which algorithms a handle offers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Capabilities {
    pub word_problem: bool,
    pub subgroup_membership: bool,
    pub express_in_generators: bool,
    pub rational_intersection: bool,
}

pub trait Group: Send + Sync {
    fn rank(&self) -> usize;

    fn kind(&self) -> GroupKind;

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            word_problem: true,
            ..Capabilities::default()
        }
    }

    fn normal_form(&self, w: &Word) -> Result<Key>;

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        Ok(self.normal_form(w)? == self.normal_form(&Word::empty())?)
    }

    fn equal(&self, u: &Word, v: &Word) -> Result<bool> {
        self.is_trivial(&u.concat(&v.invert()))
    }
}

/// A finitely generated subgroup of some group, with generators given as words.
pub trait Subgroup: Send + Sync {
    fn gens(&self) -> &[Word];

    /// A word over the generators (letter i = generator i) equal to `g`, if `g` lies in the subgroup.
    fn express(&self, g: &Word) -> Result<Option<Word>>;

    /// `g = a·r` with `a` given over the generators and `r` depending only on the coset `A·g`.
    fn coset_split(&self, g: &Word) -> Result<(Word, Word)>;
}

/// A submonoid with a membership test that returns generator tokens as witness.
pub trait Submonoid: Send + Sync {
    fn member(&self, w: &Word) -> Result<Option<Vec<u32>>>;
}

#[derive(Clone, Debug)]
pub struct FreeGroup {
    rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Self {
        FreeGroup { rank }
    }
}

impl Group for FreeGroup {
    fn rank(&self) -> usize {
        self.rank
    }

    fn kind(&self) -> GroupKind {
        GroupKind::Free
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            word_problem: true,
            subgroup_membership: true,
            express_in_generators: true,
            rational_intersection: true,
        }
    }

    fn normal_form(&self, w: &Word) -> Result<Key> {
        Ok(word_key(&w.free_reduce()))
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        Ok(w.free_reduce().is_empty())
    }
}

/// ⟨z | zⁿ⟩, n ≥ 1.
#[derive(Clone, Debug)]
pub struct CyclicGroup {
    order: u64,
}

impl CyclicGroup {
    pub fn new(order: u64) -> Self {
        CyclicGroup { order: order.max(1) }
    }
}

impl Group for CyclicGroup {
    fn rank(&self) -> usize {
        1
    }

    fn kind(&self) -> GroupKind {
        GroupKind::Cyclic
    }

    fn normal_form(&self, w: &Word) -> Result<Key> {
        let e = w.exponent_sum(0).rem_euclid(self.order as i64);
        Ok(vec![e as u32])
    }
}

/// A group seen through new coordinates: generator i is `images[i]` in `inner`.
#[derive(Clone)]
pub struct Mapped {
    inner: Arc<dyn Group>,
    images: Vec<Word>,
    kind: GroupKind,
}

impl Mapped {
    pub fn new(inner: Arc<dyn Group>, images: Vec<Word>, kind: GroupKind) -> Self {
        Mapped {
            inner,
            images,
            kind,
        }
    }

    pub fn inner(&self) -> &Arc<dyn Group> {
        &self.inner
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn translate(&self, w: &Word) -> Result<Word> {
        Ok(w.substitute(&self.images)?.free_reduce())
    }
}

impl Group for Mapped {
    fn rank(&self) -> usize {
        self.images.len()
    }

    fn kind(&self) -> GroupKind {
        self.kind
    }

    fn capabilities(&self) -> Capabilities {
        self.inner.capabilities()
    }

    fn normal_form(&self, w: &Word) -> Result<Key> {
        self.inner.normal_form(&self.translate(w)?)
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        self.inner.is_trivial(&self.translate(w)?)
    }
}

/// A subgroup of a free group, via its Stallings graph.
#[derive(Clone, Debug)]
pub struct FreeSubgroup {
    graph: StallingsGraph,
}

impl FreeSubgroup {
    pub fn new(rank: usize, gens: &[Word]) -> Self {
        FreeSubgroup {
            graph: StallingsGraph::new(rank, gens),
        }
    }

    pub fn graph(&self) -> &StallingsGraph {
        &self.graph
    }

    /// Reduced words of the subgroup as a saturated set.
    pub fn as_set(&self) -> RationalSet {
        crate::rational::benois_reduce(&self.graph.to_fsa())
    }
}

impl Subgroup for FreeSubgroup {
    fn gens(&self) -> &[Word] {
        self.graph.gens()
    }

    fn express(&self, g: &Word) -> Result<Option<Word>> {
        Ok(self.graph.member(g))
    }

    fn coset_split(&self, g: &Word) -> Result<(Word, Word)> {
        Ok(self.graph.coset_split(g))
    }
}

/// The trivial subgroup (free factors).
#[derive(Clone)]
pub struct TrivialSubgroup {
    group: Arc<dyn Group>,
}

impl TrivialSubgroup {
    pub fn new(group: Arc<dyn Group>) -> Self {
        TrivialSubgroup { group }
    }
}

impl Subgroup for TrivialSubgroup {
    fn gens(&self) -> &[Word] {
        &[]
    }

    fn express(&self, g: &Word) -> Result<Option<Word>> {
        Ok(self.group.is_trivial(g)?.then(Word::empty))
    }

    fn coset_split(&self, g: &Word) -> Result<(Word, Word)> {
        Ok((Word::empty(), g.free_reduce()))
    }
}

/// ⟨c⟩ inside a group with a character ψ: G → ℤ, ψ(c) ≠ 0.
/// Then g ∈ ⟨c⟩ iff ψ(c) divides ψ(g) and g·c^{−ψ(g)/ψ(c)} = 1.
#[derive(Clone)]
pub struct CyclicByCharacter {
    group: Arc<dyn Group>,
    gen: [Word; 1],
    psi: Vec<i64>,
    psi_c: i64,
}

impl CyclicByCharacter {
    pub fn new(group: Arc<dyn Group>, c: Word, psi: Vec<i64>) -> Result<Self> {
        let psi_c = character(&psi, &c);
        if psi_c == 0 {
            return Err(Error::Precondition("character vanishes on the cyclic generator".into()));
        }
        Ok(CyclicByCharacter {
            group,
            gen: [c],
            psi,
            psi_c,
        })
    }
}

pub fn character(psi: &[i64], w: &Word) -> i64 {
    w.iter()
        .map(|l| psi.get(l.gen()).copied().unwrap_or(0) * l.sign())
        .sum()
}

impl Subgroup for CyclicByCharacter {
    fn gens(&self) -> &[Word] {
        &self.gen
    }

    fn express(&self, g: &Word) -> Result<Option<Word>> {
        let v = character(&self.psi, g);
        if v % self.psi_c != 0 {
            return Ok(None);
        }
        let n = v / self.psi_c;
        let rest = g.concat(&self.gen[0].pow(-n));
        Ok(self
            .group
            .is_trivial(&rest)?
            .then(|| Word::gen(0).pow(n)))
    }

    fn coset_split(&self, g: &Word) -> Result<(Word, Word)> {
        let v = character(&self.psi, g);
        let q = v.div_euclid(self.psi_c);
        let rep = self.gen[0].pow(-q).concat(g);
        Ok((Word::gen(0).pow(q), rep))
    }
}

/// A finitely generated submonoid of a free group, decided by Benois saturation.
pub struct FreeSubmonoid {
    gens: Vec<Word>,
    tokens: Vec<u32>,
    set: RationalSet,
    index: WitnessIndex,
}

impl FreeSubmonoid {
    /// `tokens[i]` is reported for generator `i`.
    pub fn new(rank: usize, gens: Vec<Word>, tokens: Vec<u32>) -> Self {
        assert_eq!(gens.len(), tokens.len());
        let raw = Fsa::monoid(rank, &gens);
        FreeSubmonoid {
            set: monoid_set(rank, &gens),
            index: WitnessIndex::new(raw),
            gens,
            tokens,
        }
    }

    pub fn gens(&self) -> &[Word] {
        &self.gens
    }

    pub fn tokens(&self) -> &[u32] {
        &self.tokens
    }

    pub fn set(&self) -> &RationalSet {
        &self.set
    }

    /// The tagged monoid automaton; tags are generator positions.
    pub fn raw(&self) -> &Fsa {
        self.index.fsa()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.set.member(w)
    }
}

impl Submonoid for FreeSubmonoid {
    fn member(&self, w: &Word) -> Result<Option<Vec<u32>>> {
        if !self.set.member(w) {
            return Ok(None);
        }
        let tags = self
            .index
            .tags(w)
            .ok_or(Error::Precondition("saturated membership without a witness path".into()))?;
        Ok(Some(tags.iter().map(|&t| self.tokens[t as usize]).collect()))
    }
}

/// The whole group as a submonoid; `letter_tokens[l.index()]` spells the letter `l`.
pub struct WholeGroup {
    letter_tokens: Vec<Vec<u32>>,
}

impl WholeGroup {
    pub fn new(letter_tokens: Vec<Vec<u32>>) -> Self {
        WholeGroup { letter_tokens }
    }
}

impl Submonoid for WholeGroup {
    fn member(&self, w: &Word) -> Result<Option<Vec<u32>>> {
        let mut out = Vec::new();
        for l in w.free_reduce().iter() {
            let t = self
                .letter_tokens
                .get(l.index())
                .ok_or(Error::UnassignedLetter(l.gen()))?;
            out.extend_from_slice(t);
        }
        Ok(Some(out))
    }
}

/// The trivial submonoid.
pub struct TrivialSubmonoid {
    group: Arc<dyn Group>,
}

impl TrivialSubmonoid {
    pub fn new(group: Arc<dyn Group>) -> Self {
        TrivialSubmonoid { group }
    }
}

impl Submonoid for TrivialSubmonoid {
    fn member(&self, w: &Word) -> Result<Option<Vec<u32>>> {
        Ok(self.group.is_trivial(w)?.then(Vec::new))
    }
}

/// A group handle together with the word problem for a word over letters `0..rank`,
/// used by the brute-force oracle and by witness re-verification.
pub fn evaluate_product(parts: &[Word], tokens: &[u32]) -> Word {
    let mut w = Vec::new();
    for &t in tokens {
        w.extend_from_slice(parts[t as usize].letters());
    }
    Word::from(w)
}

/// Letter `l` of a word over `rank` generators, lifted into a larger alphabet at `offset`.
pub fn shift(w: &Word, offset: usize) -> Word {
    w.iter()
        .map(|l| Letter::new(l.gen() + offset, l.is_inverse()))
        .collect()
}
