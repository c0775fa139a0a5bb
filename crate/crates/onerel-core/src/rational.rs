//! Rational subsets of a free group, represented by Benois-saturated automata.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::fsa::{Dfa, Fsa};
use crate::word::{Letter, Word};

#[derive(Clone, Copy, Debug)]
enum Reason {
    Refl,
    Eps(usize),
    /// p -x-> p', (p',q'), q' -x⁻¹-> q
    Cancel(usize, usize, usize, usize),
    /// (p,m), (m,q)
    Trans(usize),
}

/// The relation "some path from p to q spells a word reducing to ε", with derivations.
pub struct Saturation {
    n: usize,
    reason: Vec<Option<Reason>>,
}

impl Saturation {
    pub fn compute(a: &Fsa) -> Saturation {
        let n = a.states();
        let mut reason: Vec<Option<Reason>> = vec![None; n * n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        let inn = a.in_index();
        let out = a.out_index();
        let trans = a.transitions();
        let mut work: VecDeque<(usize, usize)> = VecDeque::new();
        let add = |p: usize, q: usize, r: Reason, reason: &mut Vec<Option<Reason>>, work: &mut VecDeque<(usize, usize)>| {
            if reason[p * n + q].is_none() {
                reason[p * n + q] = Some(r);
                work.push_back((p, q));
            }
        };
        for p in 0..n {
            add(p, p, Reason::Refl, &mut reason, &mut work);
        }
        for (i, t) in trans.iter().enumerate() {
            if t.label.is_none() {
                add(t.from, t.to, Reason::Eps(i), &mut reason, &mut work);
            }
        }
        while let Some((p, q)) = work.pop_front() {
            succ[p].push(q);
            pred[q].push(p);
            for &e1 in &inn[p] {
                let Some(x) = trans[e1].label else { continue };
                for &e2 in &out[q] {
                    if trans[e2].label == Some(x.inverse()) {
                        add(trans[e1].from, trans[e2].to, Reason::Cancel(e1, p, q, e2), &mut reason, &mut work);
                    }
                }
            }
            for i in 0..succ[q].len() {
                let r = succ[q][i];
                add(p, r, Reason::Trans(q), &mut reason, &mut work);
            }
            for i in 0..pred[p].len() {
                let o = pred[p][i];
                add(o, q, Reason::Trans(p), &mut reason, &mut work);
            }
        }
        Saturation { n, reason }
    }

    pub fn related(&self, p: usize, q: usize) -> bool {
        self.reason[p * self.n + q].is_some()
    }

    /// A path of original transitions from p to q whose label reduces to ε.
    pub fn expand(&self, p: usize, q: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(p, q, false, 0usize)];
        // Frames: (p, q, pending_trailing_edge?, edge)
        while let Some((p, q, trailing, edge)) = stack.pop() {
            if trailing {
                out.push(edge);
                continue;
            }
            match self.reason[p * self.n + q].expect("pair in relation") {
                Reason::Refl => {}
                Reason::Eps(e) => out.push(e),
                Reason::Cancel(e1, pp, qq, e2) => {
                    out.push(e1);
                    stack.push((0, 0, true, e2));
                    stack.push((pp, qq, false, 0));
                }
                Reason::Trans(m) => {
                    stack.push((m, q, false, 0));
                    stack.push((p, m, false, 0));
                }
            }
        }
        out
    }
}

/// A path through the original automaton from an initial to a final state whose
/// label freely reduces to `red(target)`. Returned as transition indices.
pub fn witness_path(a: &Fsa, target: &Word) -> Option<Vec<usize>> {
    let sat = Saturation::compute(a);
    witness_path_with(a, &sat, target)
}

pub fn witness_path_with(a: &Fsa, sat: &Saturation, target: &Word) -> Option<Vec<usize>> {
    let r = target.free_reduce();
    let n = a.states();
    let len = r.len();
    let out = a.out_index();
    let trans = a.transitions();
    // Back-pointers: (prev state, prev pos, Step)
    #[derive(Clone, Copy)]
    enum Step {
        Edge(usize),
        Jump(usize, usize),
    }
    let idx = |s: usize, k: usize| s * (len + 1) + k;
    let mut back: Vec<Option<(usize, usize, Option<Step>)>> = vec![None; n * (len + 1)];
    let mut queue = VecDeque::new();
    for &s in a.initial() {
        if back[idx(s, 0)].is_none() {
            back[idx(s, 0)] = Some((s, 0, None));
            queue.push_back((s, 0));
        }
    }
    let mut goal = None;
    while let Some((s, k)) = queue.pop_front() {
        if k == len && a.finals().contains(&s) {
            goal = Some(s);
            break;
        }
        for q in 0..n {
            if q != s && sat.related(s, q) && back[idx(q, k)].is_none() {
                back[idx(q, k)] = Some((s, k, Some(Step::Jump(s, q))));
                queue.push_back((q, k));
            }
        }
        if k < len {
            for &e in &out[s] {
                let t = &trans[e];
                if t.label == Some(r[k]) && back[idx(t.to, k + 1)].is_none() {
                    back[idx(t.to, k + 1)] = Some((s, k, Some(Step::Edge(e))));
                    queue.push_back((t.to, k + 1));
                }
            }
        }
    }
    let mut s = goal?;
    let mut k = len;
    let mut steps = Vec::new();
    while let Some((ps, pk, Some(step))) = back[idx(s, k)] {
        steps.push(step);
        s = ps;
        k = pk;
    }
    steps.reverse();
    let mut path = Vec::new();
    for st in steps {
        match st {
            Step::Edge(e) => path.push(e),
            Step::Jump(p, q) => path.extend(sat.expand(p, q)),
        }
    }
    Some(path)
}

/// Label of a transition path, unreduced.
pub fn path_label(a: &Fsa, path: &[usize]) -> Word {
    path.iter()
        .filter_map(|&e| a.transitions()[e].label)
        .collect()
}

/// Tags met along a transition path, in order.
pub fn path_tags(a: &Fsa, path: &[usize]) -> Vec<u32> {
    path.iter().filter_map(|&e| a.transitions()[e].tag).collect()
}

/// Complete DFA of freely reduced words: state 0 is the start, 1 + letter index the last letter read.
pub fn reduced_words(rank: usize) -> Fsa {
    let mut a = Fsa::new(rank);
    a.add_states(2 * rank + 1);
    a.set_initial(0);
    for s in 0..=2 * rank {
        a.set_final(s);
        for li in 0..2 * rank {
            let l = Letter::from_index(li);
            if s > 0 && Letter::from_index(s - 1) == l.inverse() {
                continue;
            }
            a.add_edge(s, Some(l), 1 + li);
        }
    }
    a
}

/// A rational subset of FG(rank) given by an ε-free automaton accepting only
/// reduced words; its language is the set of reduced forms of the subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSet {
    fsa: Fsa,
}

impl RationalSet {
    pub fn fsa(&self) -> &Fsa {
        &self.fsa
    }

    pub fn rank(&self) -> usize {
        self.fsa.rank()
    }

    pub fn states(&self) -> usize {
        self.fsa.states()
    }

    pub fn empty(rank: usize) -> Self {
        RationalSet { fsa: Fsa::new(rank) }
    }

    pub fn whole(rank: usize) -> Self {
        RationalSet {
            fsa: reduced_words(rank),
        }
    }

    pub fn member(&self, w: &Word) -> bool {
        self.fsa.accepts(&w.free_reduce())
    }

    pub fn is_empty(&self) -> bool {
        self.fsa.is_empty_language()
    }

    pub fn intersect(&self, other: &RationalSet) -> Result<RationalSet> {
        Ok(RationalSet {
            fsa: self.fsa.intersect_eps_free(&other.fsa)?,
        })
    }

    pub fn complement(&self) -> RationalSet {
        let mut d = self.fsa.determinize();
        for a in &mut d.accept {
            *a = !*a;
        }
        let c = d.to_fsa();
        RationalSet {
            fsa: c
                .intersect_eps_free(&reduced_words(self.rank()))
                .expect("same rank"),
        }
    }

    /// Minimal complete DFA of the reduced-word language.
    pub fn normalize(&self) -> Dfa {
        self.fsa.determinize().minimize()
    }

    pub fn same_subset(&self, other: &RationalSet) -> bool {
        self.rank() == other.rank() && self.normalize().isomorphic(&other.normalize())
    }

    /// Reduced words of the subset up to length n.
    pub fn elements_up_to(&self, n: usize) -> BTreeSet<Word> {
        self.fsa.words_up_to(n)
    }

    pub fn into_fsa(self) -> Fsa {
        self.fsa
    }
}

/// Benois saturation followed by intersection with the reduced-word language.
pub fn benois_reduce(a: &Fsa) -> RationalSet {
    let sat = Saturation::compute(a);
    let n = a.states();
    let out = a.out_index();
    let trans = a.transitions();
    // ε-free automaton: p -x-> r whenever p ~ q and q -x-> r.
    let mut e = Fsa::new(a.rank());
    e.add_states(n);
    let mut seen: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut closure: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (p, c) in closure.iter_mut().enumerate() {
        for q in 0..n {
            if sat.related(p, q) {
                c.push(q);
            }
        }
    }
    for p in 0..n {
        for &q in &closure[p] {
            for &ei in &out[q] {
                let t = &trans[ei];
                if let Some(l) = t.label {
                    if seen.insert((p, l.index(), t.to)) {
                        e.add_edge(p, Some(l), t.to);
                    }
                }
            }
        }
        if closure[p].iter().any(|q| a.finals().contains(q)) {
            e.set_final(p);
        }
    }
    for &i in a.initial() {
        e.set_initial(i);
    }
    let fsa = e
        .intersect_eps_free(&reduced_words(a.rank()))
        .expect("same rank");
    RationalSet { fsa }
}

/// Convenience: the rational subset Mon⟨gens⟩.
pub fn monoid_set(rank: usize, gens: &[Word]) -> RationalSet {
    benois_reduce(&Fsa::monoid(rank, gens))
}

/// Group generated by `gens` as a rational subset: Mon⟨gens ∪ gens⁻¹⟩.
pub fn subgroup_set(rank: usize, gens: &[Word]) -> RationalSet {
    let mut all: Vec<Word> = gens.to_vec();
    all.extend(gens.iter().map(|g| g.invert()));
    monoid_set(rank, &all)
}

/// Tags met along a witness path for `w`, if `w` lies in the subset read by `a`.
pub fn member_tags(a: &Fsa, w: &Word) -> Option<Vec<u32>> {
    witness_path(a, w).map(|p| path_tags(a, &p))
}

/// An automaton with its saturation precomputed, for repeated witness queries.
pub struct WitnessIndex {
    fsa: Fsa,
    sat: Saturation,
}

impl WitnessIndex {
    pub fn new(fsa: Fsa) -> Self {
        let sat = Saturation::compute(&fsa);
        WitnessIndex { fsa, sat }
    }

    pub fn fsa(&self) -> &Fsa {
        &self.fsa
    }

    pub fn path(&self, w: &Word) -> Option<Vec<usize>> {
        witness_path_with(&self.fsa, &self.sat, w)
    }

    pub fn tags(&self, w: &Word) -> Option<Vec<u32>> {
        self.path(w).map(|p| path_tags(&self.fsa, &p))
    }
}
