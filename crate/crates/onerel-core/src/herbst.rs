//! Moving rational subsets of a free group between generating sets.
//!
//! `herbst_rewrite` turns an automaton over X whose image lies in a subgroup
//! A = ⟨Y⟩ into an automaton over Y with the same image. It goes through a
//! rational expression in star-product normal form and recurses on star height:
//! a term w₁T₁*w₂…w_nT_n*w_{n+1} becomes S₁*…S_n*·(w₁…w_{n+1}) with
//! S_i = (w₁…w_i)T_i(w₁…w_i)⁻¹, each S_i of strictly smaller star height.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fsa::Fsa;
use crate::rational::{benois_reduce, RationalSet};
use crate::stallings::StallingsGraph;
use crate::word::Word;

/// Rational expressions over single letters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rx {
    Empty,
    Word(Word),
    Union(Vec<Rx>),
    Concat(Vec<Rx>),
    Star(Box<Rx>),
}

impl Rx {
    fn eps() -> Rx {
        Rx::Word(Word::empty())
    }

    fn union(a: Rx, b: Rx) -> Rx {
        match (a, b) {
            (Rx::Empty, x) | (x, Rx::Empty) => x,
            (a, b) => {
                let mut parts = BTreeSet::new();
                for x in [a, b] {
                    match x {
                        Rx::Union(v) => parts.extend(v),
                        x => {
                            parts.insert(x);
                        }
                    }
                }
                if parts.len() == 1 {
                    parts.into_iter().next().expect("one part")
                } else {
                    Rx::Union(parts.into_iter().collect())
                }
            }
        }
    }

    fn concat(parts: Vec<Rx>) -> Rx {
        let mut out: Vec<Rx> = Vec::new();
        for p in parts {
            match p {
                Rx::Empty => return Rx::Empty,
                Rx::Word(w) if w.is_empty() => {}
                Rx::Concat(v) => {
                    for q in v {
                        push_concat(&mut out, q);
                    }
                }
                p => push_concat(&mut out, p),
            }
        }
        match out.len() {
            0 => Rx::eps(),
            1 => out.pop().expect("one part"),
            _ => Rx::Concat(out),
        }
    }

    fn star(a: Rx) -> Rx {
        match a {
            Rx::Empty => Rx::eps(),
            Rx::Word(w) if w.is_empty() => Rx::eps(),
            Rx::Star(x) => Rx::Star(x),
            a => Rx::Star(Box::new(a)),
        }
    }

    pub fn star_height(&self) -> usize {
        match self {
            Rx::Empty | Rx::Word(_) => 0,
            Rx::Union(v) | Rx::Concat(v) => v.iter().map(Rx::star_height).max().unwrap_or(0),
            Rx::Star(x) => 1 + x.star_height(),
        }
    }
}

fn push_concat(out: &mut Vec<Rx>, p: Rx) {
    if let (Some(Rx::Word(prev)), Rx::Word(w)) = (out.last_mut(), &p) {
        *prev = prev.concat(w);
        return;
    }
    out.push(p);
}

/// State elimination. States are removed cheapest first (fewest in×out
/// neighbours), ties broken by ascending index.
pub fn to_expression(a: &Fsa) -> Rx {
    let a = a.trim();
    let n = a.states();
    if n == 0 {
        return Rx::Empty;
    }
    // Generalized automaton on n + 2 states: n = start, n + 1 = end.
    let (s, f) = (n, n + 1);
    let m = n + 2;
    let mut r: Vec<Vec<Rx>> = vec![vec![Rx::Empty; m]; m];
    for t in a.transitions() {
        let lab = match t.label {
            None => Rx::eps(),
            Some(l) => Rx::Word(Word::letter(l)),
        };
        let cur = core::mem::replace(&mut r[t.from][t.to], Rx::Empty);
        r[t.from][t.to] = Rx::union(cur, lab);
    }
    for &i in a.initial() {
        r[s][i] = Rx::union(core::mem::replace(&mut r[s][i], Rx::Empty), Rx::eps());
    }
    for &i in a.finals() {
        r[i][f] = Rx::union(core::mem::replace(&mut r[i][f], Rx::Empty), Rx::eps());
    }
    let mut alive = vec![true; n];
    for _ in 0..n {
        let k = (0..n)
            .filter(|&k| alive[k])
            .min_by_key(|&k| {
                let ins = (0..m).filter(|&p| p != k && r[p][k] != Rx::Empty).count();
                let outs = (0..m).filter(|&q| q != k && r[k][q] != Rx::Empty).count();
                (ins * outs, k)
            })
            .expect("a live state");
        alive[k] = false;
        let loop_k = Rx::star(r[k][k].clone());
        let ins: Vec<usize> = (0..m).filter(|&p| p != k && r[p][k] != Rx::Empty).collect();
        let outs: Vec<usize> = (0..m).filter(|&q| q != k && r[k][q] != Rx::Empty).collect();
        for &p in &ins {
            for &q in &outs {
                let via = Rx::concat(vec![r[p][k].clone(), loop_k.clone(), r[k][q].clone()]);
                let cur = core::mem::replace(&mut r[p][q], Rx::Empty);
                r[p][q] = Rx::union(cur, via);
            }
        }
        for row in r.iter_mut() {
            row[k] = Rx::Empty;
        }
        for q in 0..m {
            r[k][q] = Rx::Empty;
        }
    }
    r[s][f].clone()
}

/// A term w₁T₁*w₂…T_n*w_{n+1}; `words.len() == stars.len() + 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StarProduct {
    pub words: Vec<Word>,
    pub stars: Vec<Vec<StarProduct>>,
}

impl StarProduct {
    fn word(w: Word) -> Self {
        StarProduct {
            words: vec![w],
            stars: Vec::new(),
        }
    }

    fn then(&self, other: &StarProduct) -> StarProduct {
        let mut words = self.words.clone();
        let last = words.pop().expect("non-empty");
        words.push(last.concat(&other.words[0]));
        words.extend(other.words[1..].iter().cloned());
        let mut stars = self.stars.clone();
        stars.extend(other.stars.iter().cloned());
        StarProduct { words, stars }
    }

    fn conjugate(&self, c: &Word) -> StarProduct {
        let mut sp = self.clone();
        sp.words[0] = c.concat(&sp.words[0]);
        let last = sp.words.len() - 1;
        sp.words[last] = sp.words[last].concat(&c.invert());
        sp
    }
}

/// Flattens an expression into a union of star products.
pub fn star_products(rx: &Rx) -> Vec<StarProduct> {
    match rx {
        Rx::Empty => Vec::new(),
        Rx::Word(w) => vec![StarProduct::word(w.clone())],
        Rx::Union(v) => {
            let mut out: BTreeSet<StarProduct> = BTreeSet::new();
            for x in v {
                out.extend(star_products(x));
            }
            out.into_iter().collect()
        }
        Rx::Concat(v) => {
            let mut acc = vec![StarProduct::word(Word::empty())];
            for x in v {
                let rhs = star_products(x);
                let mut next = Vec::with_capacity(acc.len() * rhs.len());
                for a in &acc {
                    for b in &rhs {
                        next.push(a.then(b));
                    }
                }
                acc = next;
            }
            acc
        }
        Rx::Star(x) => {
            let inner = star_products(x);
            if inner.is_empty() {
                return vec![StarProduct::word(Word::empty())];
            }
            vec![StarProduct {
                words: vec![Word::empty(), Word::empty()],
                stars: vec![inner],
            }]
        }
    }
}

fn rewrite_terms(terms: &[StarProduct], g: &StallingsGraph, out_rank: usize) -> Result<Fsa> {
    let mut acc = Fsa::new(out_rank);
    for tau in terms {
        let whole: Word = Word::product(tau.words.iter()).free_reduce();
        let tail = g.member(&whole).ok_or(Error::NotInSubgroup)?;
        let mut term = Fsa::epsilon(out_rank);
        let mut prefix = Word::empty();
        for (i, t) in tau.stars.iter().enumerate() {
            prefix = prefix.concat(&tau.words[i]).free_reduce();
            let s_i: Vec<StarProduct> = t.iter().map(|sp| sp.conjugate(&prefix)).collect();
            let inner = rewrite_terms(&s_i, g, out_rank)?;
            term = term.concat(&inner.star())?;
        }
        term = term.concat(&Fsa::from_word(out_rank, &tail))?;
        acc = acc.union(&term)?;
    }
    Ok(acc)
}

/// Rewrites an automaton over X with image inside A into one over A's generators Y.
pub fn herbst_rewrite(a: &Fsa, g: &StallingsGraph) -> Result<Fsa> {
    let rx = to_expression(a);
    let terms = star_products(&rx);
    Ok(rewrite_terms(&terms, g, g.ngens())?.without_tags().trim())
}

/// The same rewriting read off the product of a saturated set with the Stallings graph:
/// each letter step emits the provenance of the graph edge it follows.
pub fn herbst_rewrite_product(r: &RationalSet, g: &StallingsGraph) -> Result<Fsa> {
    use alloc::collections::BTreeMap;
    let a = r.fsa();
    let out_idx = a.out_index();
    let mut b = Fsa::new(g.ngens());
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut stack = Vec::new();
    for &i in a.initial() {
        let s = b.add_state();
        ids.insert((i, g.base()), s);
        b.set_initial(s);
        stack.push((i, g.base()));
    }
    while let Some((q, v)) = stack.pop() {
        let s = ids[&(q, v)];
        if a.finals().contains(&q) && v == g.base() {
            b.set_final(s);
        }
        for &e in &out_idx[q] {
            let t = a.transitions()[e];
            let Some(l) = t.label else {
                return Err(Error::Precondition("automaton is not ε-free".into()));
            };
            let Some((v2, prov)) = g.step(v, l) else { continue };
            let key = (t.to, *v2);
            let d = match ids.get(&key) {
                Some(&d) => d,
                None => {
                    let d = b.add_state();
                    ids.insert(key, d);
                    stack.push(key);
                    d
                }
            };
            b.add_path(s, prov, d, None);
        }
    }
    Ok(b.trim())
}

/// Replaces each Y-letter by its word over X.
pub fn herbst_embed(b: &Fsa, rank: usize, assignment: &[Word]) -> Result<Fsa> {
    b.relabel_words(rank, assignment)
}

/// `{g ∈ r : g ∈ A}` as a saturated set.
pub fn subgroup_intersect(r: &RationalSet, g: &StallingsGraph) -> Result<RationalSet> {
    let sg = benois_reduce(&g.to_fsa());
    r.intersect(&sg)
}

/// Which rewriting route `image_under_iso` takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HerbstRoute {
    /// Rational-expression recursion on star height.
    #[default]
    Expression,
    /// Product with the Stallings graph, emitting provenance.
    Product,
}

/// Image of a set inside A under the isomorphism A → B fixed by pairing A's
/// generators (those of `g`) with `target` words, one per generator.
pub fn image_under_iso(
    r: &RationalSet,
    g: &StallingsGraph,
    target: &[Word],
    target_rank: usize,
    route: HerbstRoute,
) -> Result<RationalSet> {
    if target.len() != g.ngens() {
        return Err(Error::Precondition("generator pairing has unequal lengths".into()));
    }
    let ys = match route {
        HerbstRoute::Expression => herbst_rewrite(r.fsa(), g)?,
        HerbstRoute::Product => herbst_rewrite_product(r, g)?,
    };
    let x = herbst_embed(&ys, target_rank, target)?;
    Ok(benois_reduce(&x))
}
