//! Prefix membership in ⟨X | w = 1⟩ for the decidable classes, and right invertibility
//! in Inv⟨X | w = 1⟩.
//!
//! A witness is a list of prefix lengths k₁…k_s with P(k₁)⋯P(k_s) equal to the query,
//! P(k) being the prefix of w of length k. Engines report opaque tokens and every token
//! expands to such a list.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::alphabet::Alphabet;
use crate::amalgam::{Amalgam, AmalgamThmA, AmalgamThmB};
use crate::chain::DEFAULT_CAP;
use crate::error::{Error, Result};
use crate::factorise::{benois_pieces, refines, Factorisation, FactorisationKind};
use crate::group::{
    CyclicByCharacter, FreeGroup, FreeSubgroup, FreeSubmonoid, Group, GroupKind, Mapped, Submonoid,
    TrivialSubgroup, TrivialSubmonoid, WholeGroup,
};
use crate::hnn::HnnSubmonoid;
use crate::onerel::{magnus_hnn, one_relator_group, rho_base, ConjPinched};
use crate::word::{Letter, PrefixSign, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Group,
    InverseMonoid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relator: Word,
    pub flavor: Flavor,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relator: Word, flavor: Flavor) -> Result<Self> {
        if let Some(l) = relator.iter().find(|l| l.gen() >= alphabet.len()) {
            return Err(Error::UnassignedLetter(l.gen()));
        }
        Ok(Presentation {
            alphabet,
            relator,
            flavor,
        })
    }

    /// `gens` is a string of distinct lowercase letters.
    pub fn parse(gens: &str, rel: &str, flavor: Flavor) -> Result<Self> {
        let alphabet = Alphabet::from_letters(gens)?;
        let relator = alphabet.parse_word(rel)?;
        Self::new(alphabet, relator, flavor)
    }

    pub fn rank(&self) -> usize {
        self.alphabet.len()
    }

    pub fn prefix(&self, k: usize) -> Word {
        self.relator.slice(0, k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassTag {
    /// One marker generator per distinct piece.
    Marker {
        markers: Vec<usize>,
        source: FactorisationKind,
    },
    /// Distinct pieces on pairwise disjoint letters.
    Disjoint {
        pieces: usize,
        source: FactorisationKind,
    },
    /// w = u·v⁻¹ on disjoint letters, split after `split` letters.
    CycPinched { split: usize },
    /// w = t^∓·u·t^±·v⁻¹.
    ConjPinched { t: usize },
    /// w prefix t-positive, or prefix t-negative when `negative`.
    PosNeg { t: usize, negative: bool },
    /// An Adjan presentation over two letters, routed through `stable`.
    Adjan { stable: usize },
    /// w = (a u₁ d)…(a u_m d) rewritten to a marker relator.
    OHare { a: usize, d: usize },
    Unsupported(String),
}

impl ClassTag {
    pub fn name(&self) -> &'static str {
        match self {
            ClassTag::Marker { .. } => "marker",
            ClassTag::Disjoint { .. } => "disjoint",
            ClassTag::CycPinched { .. } => "cyc-pinched",
            ClassTag::ConjPinched { .. } => "conj-pinched",
            ClassTag::PosNeg { .. } => "posneg",
            ClassTag::Adjan { .. } => "adjan",
            ClassTag::OHare { .. } => "ohare",
            ClassTag::Unsupported(_) => "unsupported",
        }
    }
}

/// Distinct pieces of a factorisation; a piece equal to the inverse of an earlier one
/// is read as that piece inverted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceSplit {
    pub distinct: Vec<Word>,
    /// w ≡ u(w₁, …, w_k).
    pub u: Word,
    /// First occurrence of each distinct piece as `[start, end)`, and whether it reads w_i⁻¹.
    pub first: Vec<(usize, usize, bool)>,
}

pub fn piece_split(f: &Factorisation) -> PieceSplit {
    let mut distinct: Vec<Word> = Vec::new();
    let mut first = Vec::new();
    let mut u = Word::empty();
    for p in f.bounds().windows(2) {
        let s = f.relator.slice(p[0], p[1]);
        let si = s.invert();
        if let Some(i) = distinct.iter().position(|x| *x == s) {
            u.push(Letter::pos(i));
        } else if let Some(i) = distinct.iter().position(|x| *x == si) {
            u.push(Letter::neg(i));
        } else {
            u.push(Letter::pos(distinct.len()));
            distinct.push(s);
            first.push((p[0], p[1], false));
        }
    }
    PieceSplit { distinct, u, first }
}

/// For each certified cut c, prefix lengths whose product is P(c)⁻¹.
struct Certs {
    n: usize,
    certs: BTreeMap<usize, Vec<usize>>,
}

impl Certs {
    fn new(benois: &Factorisation) -> Self {
        let n = benois.relator.len();
        let certs = benois
            .certificates
            .iter()
            .map(|c| {
                let f = c.factors.iter().map(|u| u.as_prefix_len(n)).filter(|&k| k > 0);
                (c.cut, f.collect())
            })
            .collect();
        Certs { n, certs }
    }

    fn cert(&self, c: usize) -> Result<Vec<usize>> {
        if c == 0 || c == self.n {
            return Ok(Vec::new());
        }
        self.certs
            .get(&c)
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("no invertibility certificate for the cut at {c}")))
    }

    /// w[a..b] = P(a)⁻¹·P(b).
    fn segment(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        let mut out = self.cert(a)?;
        if b > 0 {
            out.push(b);
        }
        Ok(out)
    }

    /// w[a..b]⁻¹ = P(b)⁻¹·P(a).
    fn segment_inv(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        let mut out = self.cert(b)?;
        if a > 0 {
            out.push(a);
        }
        Ok(out)
    }
}

/// `(i, l, inv)` ↦ prefix lengths spelling the prefix of length l of w_i (of w_i⁻¹ if `inv`).
type Expand<'a> = dyn Fn(usize, usize, bool) -> Result<Vec<usize>> + 'a;

fn piece_expand<'a>(ps: &'a PieceSplit, certs: &'a Certs) -> impl Fn(usize, usize, bool) -> Result<Vec<usize>> + 'a {
    move |i, l, inv| {
        let (a, b, occ_inv) = ps.first[i];
        if occ_inv == inv {
            certs.segment(a, a + l)
        } else {
            certs.segment_inv(b - l, b)
        }
    }
}

#[derive(Default)]
struct Tokens(Vec<Vec<usize>>);

impl Tokens {
    fn add(&mut self, e: Vec<usize>) -> u32 {
        self.0.push(e);
        (self.0.len() - 1) as u32
    }
}

struct Built {
    group: Arc<dyn Group>,
    translate: Vec<Word>,
    engine: Arc<dyn Submonoid>,
    tokens: Tokens,
    method: String,
    unchecked: Vec<String>,
}

fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Unsupported(msg.into()))
}

fn letters(w: &Word) -> Vec<usize> {
    let mut v: Vec<usize> = w.iter().map(|l| l.gen()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn position(set: &[usize], g: usize) -> usize {
    set.iter().position(|&h| h == g).expect("letter in its block")
}

/// The letter of each piece occurring once in it and in no other piece.
pub fn marker_letters(distinct: &[Word]) -> Option<Vec<usize>> {
    distinct
        .iter()
        .enumerate()
        .map(|(i, wi)| {
            wi.iter().map(|l| l.gen()).find(|&g| {
                wi.occurrences(g) == 1
                    && distinct
                        .iter()
                        .enumerate()
                        .all(|(j, wj)| j == i || wj.occurrences(g) == 0)
            })
        })
        .collect()
}

/// G = FG(X₁) * H with H = ⟨Z | u(Z)⟩ and x_i^ε = p_i⁻¹ z_i q_i⁻¹;
/// M ∩ FG(X₁) = Mon⟨pref(p_i), pref(q_i⁻¹)⟩ and M ∩ H = H.
fn build_marker(rank: usize, distinct: &[Word], u: &Word, expand: &Expand) -> Result<(Built, Vec<usize>)> {
    let Some(markers) = marker_letters(distinct) else {
        return unsupported("some piece has no marker letter");
    };
    let k = distinct.len();
    let x1: Vec<usize> = (0..rank).filter(|g| !markers.contains(g)).collect();
    let r1 = x1.len();
    let local = |g: usize| position(&x1, g);
    let mut translate = vec![Word::empty(); rank];
    for &g in &x1 {
        translate[g] = Word::gen(local(g));
    }
    let mut tokens = Tokens::default();
    let (mut qgens, mut qtoks) = (Vec::new(), Vec::new());
    let mut letter_tokens = vec![Vec::new(); 2 * k];
    for (i, wi) in distinct.iter().enumerate() {
        let x = markers[i];
        let pos = wi.iter().position(|l| l.gen() == x).expect("marker occurs");
        let p = wi.slice(0, pos).rename(local);
        let q = wi.slice(pos + 1, wi.len()).rename(local);
        let img = p.invert().concat(&Word::gen(r1 + i)).concat(&q.invert());
        translate[x] = if wi[pos].is_inverse() { img.invert() } else { img };
        for l in 1..=p.len() {
            qgens.push(p.slice(0, l));
            qtoks.push(tokens.add(expand(i, l, false)?));
        }
        let qi = q.invert();
        for l in 1..=qi.len() {
            qgens.push(qi.slice(0, l));
            qtoks.push(tokens.add(expand(i, l, true)?));
        }
        letter_tokens[Letter::pos(i).index()] = vec![tokens.add(expand(i, wi.len(), false)?)];
        letter_tokens[Letter::neg(i).index()] = vec![tokens.add(expand(i, wi.len(), true)?)];
    }
    let b: Arc<dyn Group> = Arc::new(FreeGroup::new(r1));
    let h = one_relator_group(k, u)?;
    let g = Arc::new(Amalgam::new(
        b.clone(),
        h.clone(),
        Arc::new(TrivialSubgroup::new(b)),
        Arc::new(TrivialSubgroup::new(h)),
    )?);
    let engine = AmalgamThmA::new(
        g.clone(),
        Arc::new(FreeSubmonoid::new(r1, qgens, qtoks)),
        Arc::new(WholeGroup::new(letter_tokens)),
    );
    let built = Built {
        group: g,
        translate,
        engine: Arc::new(engine),
        tokens,
        method: "free product FG(X1) * H, syllables checked factor-wise".into(),
        unchecked: Vec::new(),
    };
    Ok((built, markers))
}

/// G = FG(X₁) *_{A₁} (FG(X₂) *_{A₂} (… (FG(X_k) *_{A_k} (FG(X₀) * H)))) with A_i = ⟨w_i⟩ = ⟨t_i⟩.
/// The combined alphabet is X₁, …, X_k, X₀, t₁, …, t_k; level i uses the suffix from X_{i+1}.
fn build_disjoint(rank: usize, distinct: &[Word], u: &Word, expand: &Expand) -> Result<Built> {
    let k = distinct.len();
    if k < 2 {
        return unsupported("fewer than two distinct pieces");
    }
    let sets: Vec<Vec<usize>> = distinct.iter().map(letters).collect();
    for i in 0..k {
        for j in 0..i {
            if sets[i].iter().any(|g| sets[j].contains(g)) {
                return unsupported("distinct pieces share a letter");
            }
        }
    }
    let x0: Vec<usize> = (0..rank).filter(|g| !sets.iter().any(|s| s.contains(g))).collect();
    let s0 = x0.len();
    let sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().sum();
    let e: Vec<i64> = (0..k).map(|j| u.exponent_sum(j)).collect();
    let mut tokens = Tokens::default();

    let b: Arc<dyn Group> = Arc::new(FreeGroup::new(s0));
    let h = one_relator_group(k, u)?;
    let inner = Arc::new(Amalgam::new(
        b.clone(),
        h.clone(),
        Arc::new(TrivialSubgroup::new(b.clone())),
        Arc::new(TrivialSubgroup::new(h)),
    )?);
    let mut whole = vec![Vec::new(); 2 * k];
    for (j, wj) in distinct.iter().enumerate() {
        whole[Letter::pos(j).index()] = vec![tokens.add(expand(j, wj.len(), false)?)];
        whole[Letter::neg(j).index()] = vec![tokens.add(expand(j, wj.len(), true)?)];
    }
    let mut monoid: Arc<dyn Submonoid> = Arc::new(AmalgamThmA::new(
        inner.clone(),
        Arc::new(TrivialSubmonoid::new(b)),
        Arc::new(WholeGroup::new(whole)),
    ));
    let mut group: Arc<dyn Group> = inner;

    for i in (0..k).rev() {
        let c_rank = group.rank();
        // offsets inside the current C = G_{i+1}
        let rest: usize = sizes[i + 1..].iter().sum();
        let t_local = |j: usize| rest + s0 + j;
        let x_local = |g: usize, x: usize| sizes[i + 1..g].iter().sum::<usize>() + position(&sets[g], x);
        let mut psi = vec![0i64; c_rank];
        if e[i] == 0 {
            psi[t_local(i)] = 1;
        } else {
            let mut done = false;
            for g in (0..k).filter(|&g| g != i && e[g] != 0) {
                if g < i {
                    psi[t_local(i)] = e[g];
                    psi[t_local(g)] = -e[i];
                    done = true;
                    break;
                }
                if let Some(&x) = sets[g].iter().find(|&&x| distinct[g].exponent_sum(x) != 0) {
                    let f = distinct[g].exponent_sum(x);
                    psi[x_local(g, x)] = -e[i];
                    psi[t_local(g)] = -e[i] * f;
                    psi[t_local(i)] = e[g] * f;
                    done = true;
                    break;
                }
            }
            if !done {
                return unsupported("no character separates the amalgamated cyclic subgroup");
            }
        }
        let wi = distinct[i].rename(|g| position(&sets[i], g));
        let bi: Arc<dyn Group> = Arc::new(FreeGroup::new(sizes[i]));
        let cyc = CyclicByCharacter::new(group.clone(), Word::gen(t_local(i)), psi)?;
        let level = Arc::new(Amalgam::new(
            bi,
            group.clone(),
            Arc::new(FreeSubgroup::new(sizes[i], core::slice::from_ref(&wi))),
            Arc::new(cyc),
        )?);
        let (mut gens, mut toks) = (Vec::new(), Vec::new());
        let pos = u.iter().any(|l| l.gen() == i && !l.is_inverse());
        let neg = u.iter().any(|l| l.gen() == i && l.is_inverse());
        for (inv, present) in [(false, pos), (true, neg)] {
            let wv = if inv { wi.invert() } else { wi.clone() };
            let upto = if present { wv.len() } else { 0 };
            for l in 1..=upto {
                gens.push(wv.slice(0, l));
                toks.push(tokens.add(expand(i, l, inv)?));
            }
            gens.push(wv.clone());
            toks.push(tokens.add(expand(i, wv.len(), inv)?));
        }
        monoid = Arc::new(AmalgamThmA::new(
            level.clone(),
            Arc::new(FreeSubmonoid::new(sizes[i], gens, toks)),
            monoid,
        ));
        group = level;
    }

    let mut translate = vec![Word::empty(); rank];
    let mut off = 0;
    for s in &sets {
        for (p, &g) in s.iter().enumerate() {
            translate[g] = Word::gen(off + p);
        }
        off += s.len();
    }
    for (p, &g) in x0.iter().enumerate() {
        translate[g] = Word::gen(total + p);
    }
    Ok(Built {
        group,
        translate,
        engine: monoid,
        tokens,
        method: "amalgam tower over the pieces, syllables checked level by level".into(),
        unchecked: Vec::new(),
    })
}

/// First split w = u·v⁻¹ with u and v on disjoint letters.
pub fn cyc_pinched_split(w: &Word) -> Option<usize> {
    if !w.is_reduced() {
        return None;
    }
    (1..w.len()).find(|&k| {
        let a = letters(&w.slice(0, k));
        let b = letters(&w.slice(k, w.len()));
        !a.iter().any(|g| b.contains(g))
    })
}

/// G = FG(X_u) *_{u = v} FG(X_v) and P_w = Mon⟨pref(u) ∪ pref(v)⟩.
fn build_cyc_pinched(rank: usize, w: &Word, cap: usize) -> Result<(Built, usize)> {
    let Some(split) = cyc_pinched_split(w) else {
        return unsupported("relator does not split as u·v⁻¹ on disjoint letters");
    };
    let n = w.len();
    let u = w.slice(0, split);
    let v = w.slice(split, n).invert();
    let xv = letters(&v);
    let xu: Vec<usize> = (0..rank).filter(|g| !xv.contains(g)).collect();
    let (rb, rc) = (xu.len(), xv.len());
    let ul = u.rename(|g| position(&xu, g));
    let vl = v.rename(|g| position(&xv, g));
    let g = Arc::new(Amalgam::free(rb, rc, core::slice::from_ref(&ul), core::slice::from_ref(&vl))?);
    let mut tokens = Tokens::default();
    let (bg, bt): (Vec<Word>, Vec<u32>) = (1..=ul.len()).map(|l| (ul.slice(0, l), tokens.add(vec![l]))).unzip();
    let (cg, ct): (Vec<Word>, Vec<u32>) = (1..=vl.len())
        .map(|j| (vl.slice(0, j), tokens.add(vec![n - j])))
        .unzip();
    let sb = Arc::new(FreeSubmonoid::new(rb, bg, bt));
    let sc = Arc::new(FreeSubmonoid::new(rc, cg, ct));
    let mut translate = vec![Word::empty(); rank];
    for (p, &x) in xu.iter().enumerate() {
        translate[x] = Word::gen(p);
    }
    for (p, &x) in xv.iter().enumerate() {
        translate[x] = Word::gen(rb + p);
    }
    let unchecked = vec![String::from(
        "M ∩ B = Mon⟨pref(u)⟩ and M ∩ C = Mon⟨pref(v)⟩",
    )];
    let in_a = sb.contains(&ul) && sb.contains(&ul.invert()) && sc.contains(&vl) && sc.contains(&vl.invert());
    let (engine, method): (Arc<dyn Submonoid>, &str) = if in_a {
        (
            Arc::new(AmalgamThmA::new(g.clone(), sb, sc)),
            "amalgam of free groups, syllables checked factor-wise",
        )
    } else {
        let thm = AmalgamThmB::new(g.clone(), sb, sc)?.with_cap(cap);
        if !thm.swap_condition()? {
            return unsupported("the amalgamated subgroup is not in P_w and S_B ∩ A does not match S_C ∩ A");
        }
        (Arc::new(thm), "amalgam of free groups, rational Q-chain")
    };
    let built = Built {
        group: g,
        translate,
        engine,
        tokens,
        method: method.into(),
        unchecked,
    };
    Ok((built, split))
}

/// `(t, flipped, u, v)` when w = t⁻¹·u·t·v⁻¹, or w = t·u·t⁻¹·v⁻¹ when `flipped`.
pub fn conj_shape(w: &Word) -> Option<(usize, bool, Word, Word)> {
    let first = *w.first()?;
    let t = first.gen();
    if w.occurrences(t) != 2 || !w.is_reduced() {
        return None;
    }
    let j = w.iter().rposition(|l| l.gen() == t).expect("two occurrences");
    if w[j] != first.inverse() {
        return None;
    }
    let u = w.slice(1, j);
    let v = w.slice(j + 1, w.len()).invert();
    if u.is_empty() || v.is_empty() {
        return None;
    }
    Some((t, !first.is_inverse(), u, v))
}

/// Replaces t by t⁻¹.
fn flip(w: &Word, t: usize) -> Word {
    w.iter()
        .map(|&l| if l.gen() == t { l.inverse() } else { l })
        .collect()
}

/// HNN extension of FG(X ∖ t) by t⁻¹ut = v; P_w = Mon⟨pref(v) ∪ t⁻¹·pref(u)⟩.
fn build_conj_pinched(rank: usize, w: &Word, cap: usize) -> Result<(Built, usize)> {
    let Some((t, flipped, u, v)) = conj_shape(w) else {
        return unsupported("relator is not of the form t⁻¹·u·t·v⁻¹");
    };
    let n = w.len();
    let cp = ConjPinched {
        rank,
        t,
        rotation: 0,
        u: u.clone(),
        v: v.clone(),
    };
    let hnn = Arc::new(cp.hnn()?);
    let stable = hnn.stable();
    let mut translate = cp.images();
    if flipped {
        translate[t] = translate[t].invert();
    }
    let base = |x: &Word| x.rename(|g| cp.base_letter(g));
    let (ub, vb) = (base(&u), base(&v));
    let mut tokens = Tokens::default();
    let (mut gens, mut toks) = (Vec::new(), Vec::new());
    for j in 1..=vb.len() {
        gens.push(vb.slice(0, j));
        toks.push(tokens.add(vec![n - j]));
    }
    for l in 0..=ub.len() {
        gens.push(Word::letter(Letter::neg(stable)).concat(&ub.slice(0, l)));
        toks.push(tokens.add(vec![1 + l]));
    }
    let engine = HnnSubmonoid::new(hnn.clone(), &gens, toks)?.with_cap(cap);
    let built = Built {
        group: hnn,
        translate,
        engine: Arc::new(engine),
        tokens,
        method: "HNN extension of a free group, N-set chains on inverses".into(),
        unchecked: Vec::new(),
    };
    Ok((built, t))
}

/// HNN extension of ⟨Ξ | ρ_t(w)⟩ with generators ρ(P(k))·t^{σ(P(k))}.
fn build_pos_neg(rank: usize, w: &Word, t: usize, negative: bool, cap: usize) -> Result<Built> {
    let w2 = if negative { flip(w, t) } else { w.clone() };
    if w2.prefix_sign(t) != PrefixSign::Positive || w2.exponent_sum(t) != 0 {
        return unsupported("relator is not prefix t-positive with zero exponent sum");
    }
    let m = magnus_hnn(rank, &w2, t)?;
    let stable = m.hnn.stable();
    let mut tokens = Tokens::default();
    let (mut gens, mut toks) = (Vec::new(), Vec::new());
    for k in 1..=w2.len() {
        let p = w2.slice(0, k);
        let base = rho_base(&m, &p).ok_or(Error::Precondition("prefix leaves the ρ window".into()))?;
        gens.push(base.concat(&Word::gen(stable).pow(p.exponent_sum(t))));
        toks.push(tokens.add(vec![k]));
    }
    let engine = HnnSubmonoid::new(m.hnn.clone(), &gens, toks)?.with_cap(cap);
    let mut translate = m.images.clone();
    if negative {
        translate[t] = translate[t].invert();
    }
    Ok(Built {
        group: m.hnn.clone(),
        translate,
        engine: Arc::new(engine),
        tokens,
        method: "HNN extension over the ρ image, N-set chains".into(),
        unchecked: Vec::new(),
    })
}

/// Letters between consecutive occurrences of `a`.
fn gaps(w: &Word, a: usize) -> Vec<usize> {
    let pos: Vec<usize> = w.iter().enumerate().filter(|(_, l)| l.gen() == a).map(|(i, _)| i).collect();
    pos.windows(2).map(|p| p[1] - p[0] - 1).collect()
}

/// `(u, v)` when w = u·v⁻¹ over two letters with u, v positive, first letters different and
/// last letters different.
pub fn adjan_split(rank: usize, w: &Word) -> Option<(Word, Word)> {
    if rank != 2 {
        return None;
    }
    let k = w.iter().take_while(|l| !l.is_inverse()).count();
    if k == 0 || k == w.len() || w[k..].iter().any(|l| !l.is_inverse()) {
        return None;
    }
    let u = w.slice(0, k);
    let v = w.slice(k, w.len()).invert();
    if u[0] == v[0] || u[u.len() - 1] == v[v.len() - 1] {
        return None;
    }
    Some((u, v))
}

/// The letter `a` with |u|_a = |v|_a for which one of the three conditions holds.
pub fn adjan_stable(rank: usize, w: &Word) -> Option<usize> {
    let (u, v) = adjan_split(rank, w)?;
    (0..2).find(|&a| {
        let b = 1 - a;
        let p = u.occurrences(a);
        if p == 0 || p != v.occurrences(a) {
            return false;
        }
        let ba = Word::from(vec![Letter::pos(b), Letter::pos(a)]);
        let ab = Word::from(vec![Letter::pos(a), Letter::pos(b)]);
        let begins = |x: &Word| x.len() >= 2 && x.slice(0, 2) == ba;
        let ends = |x: &Word| x.len() >= 2 && x.slice(x.len() - 2, x.len()) == ab;
        let (gu, gv) = (gaps(&u, a), gaps(&v, a));
        let gap = (0..p - 1).any(|k| (gu[k] == 1 && gv[k] == 0) || (gu[k] == 0 && gv[k] == 1));
        begins(&u) || begins(&v) || ends(&u) || ends(&v) || gap
    })
}

fn build_adjan(rank: usize, w: &Word, cap: usize) -> Result<(Built, usize)> {
    let Some(a) = adjan_stable(rank, w) else {
        return unsupported("not an Adjan presentation meeting the begin, end or gap condition");
    };
    let negative = match w.prefix_sign(a) {
        PrefixSign::Positive => false,
        PrefixSign::Negative => true,
        _ => return unsupported("Adjan relator is neither prefix positive nor prefix negative"),
    };
    let mut built = build_pos_neg(rank, w, a, negative, cap)?;
    built.method = "Adjan presentation as an HNN extension over the ρ image".into();
    Ok((built, a))
}

/// Blocks `[start, end)` of w = (a u₁ d)…(a u_m d) with the u_k free of a and d.
fn ohare_blocks(w: &Word) -> Result<(usize, usize, Vec<(usize, usize)>)> {
    let shape_err = || Error::Precondition("relator is not of the form a·u₁·d ⋯ a·u_m·d".into());
    let (Some(&f), Some(&l)) = (w.first(), w.last()) else {
        return Err(shape_err());
    };
    let (a, d) = (f.gen(), l.gen());
    if a == d || f.is_inverse() || l.is_inverse() {
        return Err(shape_err());
    }
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < w.len() {
        if w[i] != Letter::pos(a) {
            return Err(shape_err());
        }
        let j = (i + 1..w.len())
            .find(|&j| w[j].gen() == a || w[j].gen() == d)
            .ok_or_else(shape_err)?;
        if w[j] != Letter::pos(d) {
            return Err(shape_err());
        }
        blocks.push((i, j + 1));
        i = j + 1;
    }
    Ok((a, d, blocks))
}

/// Checks the three conditions and returns `(a, d, blocks, (r, s) per letter of Y)`.
#[allow(clippy::type_complexity)]
fn ohare_check(p: &Presentation) -> Result<(usize, usize, Vec<(usize, usize)>, BTreeMap<usize, (usize, usize)>)> {
    let w = &p.relator;
    let (a, d, blocks) = ohare_blocks(w)?;
    let us: Vec<Word> = blocks.iter().map(|&(s, e)| w.slice(s + 1, e - 1)).collect();
    if us.iter().all(|u| !u.is_empty()) {
        return Err(Error::Precondition("condition (i) fails: no block a·d with empty middle".into()));
    }
    let mut pairs = BTreeMap::new();
    for y in (0..p.rank()).filter(|&g| g != a && g != d) {
        let target = Word::gen(y);
        let found = (0..us.len())
            .flat_map(|r| (0..us.len()).map(move |s| (r, s)))
            .find(|&(r, s)| us[r].concat(&us[s].invert()).free_reduce() == target);
        match found {
            Some(rs) => {
                pairs.insert(y, rs);
            }
            None => {
                return Err(Error::Precondition(format!(
                    "condition (ii) fails: `{}` is not red(u_r·u_s⁻¹) for any blocks",
                    p.alphabet.format(&target)
                )))
            }
        }
    }
    let benois = benois_pieces(w)?;
    if let Some(&(_, e)) = blocks[..blocks.len() - 1].iter().find(|&&(_, e)| !benois.cuts.contains(&e)) {
        return Err(Error::Precondition(format!(
            "condition (iii) fails: no invertibility certificate for the block ending at {e}"
        )));
    }
    Ok((a, d, blocks, pairs))
}

/// The relator with every block a·y₁⋯y_t·d replaced by (a y₁ a⁻¹)⋯(a y_t a⁻¹)(a d).
pub fn ohare_rewrite(p: &Presentation) -> Result<Presentation> {
    let (a, d, blocks, _) = ohare_check(p)?;
    let w = &p.relator;
    let mut out = Word::empty();
    for &(s, e) in &blocks {
        for &y in &w[s + 1..e - 1] {
            out.push(Letter::pos(a));
            out.push(y);
            out.push(Letter::neg(a));
        }
        out.push(Letter::pos(a));
        out.push(Letter::pos(d));
    }
    Presentation::new(p.alphabet.clone(), out, p.flavor)
}

fn build_ohare(p: &Presentation) -> Result<(Built, usize, usize)> {
    let (a, d, blocks, pairs) = ohare_check(p)?;
    let w = &p.relator;
    let certs = Certs::new(&benois_pieces(w)?);
    let empty = blocks
        .iter()
        .copied()
        .find(|&(s, e)| e - s == 2)
        .expect("condition (i) checked");
    let block = |r: usize| blocks[r];
    // a·y^{±1}·a⁻¹ as (a u_r d)(a u_s d)⁻¹
    let conj = |y: usize, inv: bool| -> Result<Vec<usize>> {
        let (r, s) = pairs[&y];
        let (r, s) = if inv { (s, r) } else { (r, s) };
        let mut out = certs.segment(block(r).0, block(r).1)?;
        out.extend(certs.segment_inv(block(s).0, block(s).1)?);
        Ok(out)
    };
    // pieces of w′: a·y·a⁻¹ for each y in order of appearance, then a·d
    let mut order: Vec<usize> = Vec::new();
    let mut seq: Vec<Option<Letter>> = Vec::new();
    for &(s, e) in &blocks {
        for &y in &w[s + 1..e - 1] {
            let i = match order.iter().position(|&g| g == y.gen()) {
                Some(i) => i,
                None => {
                    order.push(y.gen());
                    order.len() - 1
                }
            };
            seq.push(Some(Letter::new(i, y.is_inverse())));
        }
        seq.push(None);
    }
    let k = order.len();
    let u: Word = seq.iter().map(|l| l.unwrap_or(Letter::pos(k))).collect();
    let mut distinct: Vec<Word> = order
        .iter()
        .map(|&y| Word::from(vec![Letter::pos(a), Letter::pos(y), Letter::neg(a)]))
        .collect();
    distinct.push(Word::from(vec![Letter::pos(a), Letter::pos(d)]));
    let expand = |i: usize, l: usize, inv: bool| -> Result<Vec<usize>> {
        if i < k {
            let y = order[i];
            Ok(match l {
                1 => vec![1],
                2 => {
                    let mut v = conj(y, inv)?;
                    v.push(1);
                    v
                }
                _ => conj(y, inv)?,
            })
        } else if !inv {
            Ok(if l == 1 { vec![1] } else { certs.segment(empty.0, empty.1)? })
        } else {
            let mut v = certs.segment_inv(empty.0, empty.1)?;
            if l == 1 {
                v.push(1);
            }
            Ok(v)
        }
    };
    let (mut built, _) = build_marker(p.rank(), &distinct, &u, &expand)?;
    built.method = "rewritten to (a y a⁻¹)…(a d) blocks, then free product FG(X1) * H".into();
    Ok((built, a, d))
}

/// A decider for P_w under one class.
pub struct Solver {
    tag: ClassTag,
    relator: Word,
    model: Mapped,
    engine: Arc<dyn Submonoid>,
    expansions: Vec<Vec<usize>>,
    method: String,
    unchecked: Vec<String>,
}

fn factorisations(p: &Presentation, f: Option<&Factorisation>) -> Result<(Factorisation, Factorisation)> {
    let benois = benois_pieces(&p.relator)?;
    let used = match f {
        Some(f) => {
            if !refines(&benois, f)? {
                return unsupported("factorisation has a cut without an invertibility certificate");
            }
            f.clone()
        }
        None => benois.clone(),
    };
    Ok((benois, used))
}

impl Solver {
    /// Builds the decider for `tag`; the tag's parameters are recomputed from `p`.
    /// `f` overrides the factorisation used for the marker and disjoint classes.
    pub fn new(p: &Presentation, tag: &ClassTag, f: Option<&Factorisation>) -> Result<Solver> {
        Self::with_cap(p, tag, f, DEFAULT_CAP)
    }

    /// As `new`, with a bound on the automata built per query.
    pub fn with_cap(p: &Presentation, tag: &ClassTag, f: Option<&Factorisation>, cap: usize) -> Result<Solver> {
        let rank = p.rank();
        let w = &p.relator;
        let (built, tag) = match tag {
            ClassTag::Marker { .. } | ClassTag::Disjoint { .. } => {
                let (benois, used) = factorisations(p, f)?;
                let certs = Certs::new(&benois);
                let ps = piece_split(&used);
                let expand = piece_expand(&ps, &certs);
                if matches!(tag, ClassTag::Marker { .. }) {
                    let (b, markers) = build_marker(rank, &ps.distinct, &ps.u, &expand)?;
                    (
                        b,
                        ClassTag::Marker {
                            markers,
                            source: used.kind,
                        },
                    )
                } else {
                    let b = build_disjoint(rank, &ps.distinct, &ps.u, &expand)?;
                    (
                        b,
                        ClassTag::Disjoint {
                            pieces: ps.distinct.len(),
                            source: used.kind,
                        },
                    )
                }
            }
            ClassTag::CycPinched { .. } => {
                let (b, split) = build_cyc_pinched(rank, w, cap)?;
                (b, ClassTag::CycPinched { split })
            }
            ClassTag::ConjPinched { .. } => {
                let (b, t) = build_conj_pinched(rank, w, cap)?;
                (b, ClassTag::ConjPinched { t })
            }
            &ClassTag::PosNeg { t, negative } => (build_pos_neg(rank, w, t, negative, cap)?, tag.clone()),
            ClassTag::Adjan { .. } => {
                let (b, stable) = build_adjan(rank, w, cap)?;
                (b, ClassTag::Adjan { stable })
            }
            ClassTag::OHare { .. } => {
                let (b, a, d) = build_ohare(p)?;
                (b, ClassTag::OHare { a, d })
            }
            ClassTag::Unsupported(m) => return unsupported(m.clone()),
        };
        Ok(Solver {
            tag,
            relator: w.clone(),
            model: Mapped::new(built.group, built.translate, GroupKind::Mapped),
            engine: built.engine,
            expansions: built.tokens.0,
            method: built.method,
            unchecked: built.unchecked,
        })
    }

    pub fn tag(&self) -> &ClassTag {
        &self.tag
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn unchecked_hypotheses(&self) -> &[String] {
        &self.unchecked
    }

    /// ⟨X | w⟩ with the word problem of the decomposition used.
    pub fn model(&self) -> &Mapped {
        &self.model
    }

    pub fn relator(&self) -> &Word {
        &self.relator
    }

    /// Prefix lengths whose prefixes multiply to `q`, if `q ∈ P_w`.
    pub fn member(&self, q: &Word) -> Result<Option<Vec<usize>>> {
        let x = self.model.translate(q)?;
        let Some(toks) = self.engine.member(&x)? else {
            return Ok(None);
        };
        // P(|w|) = 1, so full-length factors are dropped
        let n = self.relator.len();
        let witness: Vec<usize> = toks
            .iter()
            .flat_map(|&t| self.expansions[t as usize].iter().copied())
            .filter(|&k| k != 0 && k != n)
            .collect();
        if !self.verify(q, &witness)? {
            return Err(Error::Precondition("witness does not evaluate to the query".into()));
        }
        Ok(Some(witness))
    }

    /// P(k₁)⋯P(k_s) = q in the model.
    pub fn verify(&self, q: &Word, witness: &[usize]) -> Result<bool> {
        if witness.iter().any(|&k| k > self.relator.len()) {
            return Ok(false);
        }
        let parts: Vec<Word> = witness.iter().map(|&k| self.relator.slice(0, k)).collect();
        self.model.equal(&Word::product(parts.iter()), q)
    }
}

/// Deciders for every class that applies, and the reason each other class was rejected.
pub struct Analysis {
    pub solvers: Vec<Solver>,
    pub rejected: Vec<(&'static str, String)>,
}

/// One candidate tag per class, with the letter choices to try.
pub fn candidates(p: &Presentation) -> Vec<ClassTag> {
    let w = &p.relator;
    let src = FactorisationKind::Benois;
    let mut out = vec![
        ClassTag::Marker {
            markers: Vec::new(),
            source: src,
        },
        ClassTag::Disjoint { pieces: 0, source: src },
        ClassTag::CycPinched { split: 0 },
        ClassTag::ConjPinched { t: 0 },
    ];
    for t in 0..p.rank() {
        if w.exponent_sum(t) != 0 {
            continue;
        }
        match w.prefix_sign(t) {
            PrefixSign::Positive => out.push(ClassTag::PosNeg { t, negative: false }),
            PrefixSign::Negative => out.push(ClassTag::PosNeg { t, negative: true }),
            _ => {}
        }
    }
    out.push(ClassTag::Adjan { stable: 0 });
    out.push(ClassTag::OHare { a: 0, d: 0 });
    out
}

pub fn analyse(p: &Presentation, f: Option<&Factorisation>) -> Analysis {
    analyse_with_cap(p, f, DEFAULT_CAP)
}

pub fn analyse_with_cap(p: &Presentation, f: Option<&Factorisation>, cap: usize) -> Analysis {
    let mut solvers = Vec::new();
    let mut rejected = Vec::new();
    let cands = candidates(p);
    if !cands.iter().any(|c| matches!(c, ClassTag::PosNeg { .. })) {
        rejected.push(("posneg", "no letter with zero exponent sum and one-signed prefix sums".into()));
    }
    for c in cands {
        match Solver::with_cap(p, &c, f, cap) {
            Ok(s) => solvers.push(s),
            Err(e) => rejected.push((c.name(), format!("{e}"))),
        }
    }
    Analysis { solvers, rejected }
}

/// All applicable classes, or a single `Unsupported` carrying the reasons.
pub fn classify(p: &Presentation, f: Option<&Factorisation>) -> Vec<ClassTag> {
    let a = analyse(p, f);
    if a.solvers.is_empty() {
        let reasons: Vec<String> = a.rejected.iter().map(|(n, r)| format!("{n}: {r}")).collect();
        return vec![ClassTag::Unsupported(reasons.join("; "))];
    }
    a.solvers.into_iter().map(|s| s.tag).collect()
}

/// The first applicable decider.
pub fn first_solver(p: &Presentation, f: Option<&Factorisation>, cap: usize) -> Result<Solver> {
    let mut a = analyse_with_cap(p, f, cap);
    if a.solvers.is_empty() {
        let reasons: Vec<String> = a.rejected.iter().map(|(n, r)| format!("{n}: {r}")).collect();
        return unsupported(reasons.join("; "));
    }
    Ok(a.solvers.swap_remove(0))
}

/// Right invertibility of `q` in Inv⟨X | w = 1⟩, through P_w; needs w cyclically reduced.
pub fn right_invertible(p: &Presentation, solver: &Solver, q: &Word) -> Result<Option<Vec<usize>>> {
    if p.flavor != Flavor::InverseMonoid {
        return Err(Error::Precondition("right invertibility needs an inverse monoid presentation".into()));
    }
    if !p.relator.is_cyclically_reduced() {
        return Err(Error::Precondition(
            "relator is not cyclically reduced; E-unitarity not certified".into(),
        ));
    }
    solver.member(q)
}
