//! Nondeterministic automata over a doubled alphabet.
//!
//! Transitions may be ε-moves (`label == None`) and may carry an opaque tag,
//! which survives every construction that keeps the transition. Tags let a
//! caller map an accepting path back to the generators it came from.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::word::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: usize,
    pub label: Option<Letter>,
    pub to: usize,
    pub tag: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fsa {
    rank: usize,
    states: usize,
    transitions: Vec<Transition>,
    initial: BTreeSet<usize>,
    finals: BTreeSet<usize>,
}

impl Fsa {
    /// The automaton with no states, accepting nothing.
    pub fn new(rank: usize) -> Self {
        Fsa {
            rank,
            states: 0,
            transitions: Vec::new(),
            initial: BTreeSet::new(),
            finals: BTreeSet::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn add_state(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    pub fn add_states(&mut self, n: usize) -> usize {
        self.states += n;
        self.states - n
    }

    pub fn add_edge(&mut self, from: usize, label: Option<Letter>, to: usize) {
        self.add_tagged(from, label, to, None);
    }

    pub fn add_tagged(&mut self, from: usize, label: Option<Letter>, to: usize, tag: Option<u32>) {
        debug_assert!(from < self.states && to < self.states);
        debug_assert!(label.is_none_or(|l| l.gen() < self.rank));
        self.transitions.push(Transition {
            from,
            label,
            to,
            tag,
        });
    }

    pub fn set_initial(&mut self, s: usize) {
        self.initial.insert(s);
    }

    pub fn set_final(&mut self, s: usize) {
        self.finals.insert(s);
    }

    /// Adds a path reading `w` from `from` to `to`; the first step carries `tag`.
    pub fn add_path(&mut self, from: usize, w: &Word, to: usize, tag: Option<u32>) {
        if w.is_empty() {
            self.add_tagged(from, None, to, tag);
            return;
        }
        let mut cur = from;
        for (i, &l) in w.iter().enumerate() {
            let next = if i + 1 == w.len() { to } else { self.add_state() };
            self.add_tagged(cur, Some(l), next, if i == 0 { tag } else { None });
            cur = next;
        }
    }

    /// Accepts exactly `{ε}`.
    pub fn epsilon(rank: usize) -> Self {
        let mut a = Fsa::new(rank);
        let s = a.add_state();
        a.set_initial(s);
        a.set_final(s);
        a
    }

    pub fn from_word(rank: usize, w: &Word) -> Self {
        Self::from_words(rank, core::slice::from_ref(w))
    }

    /// Accepts exactly the given finite set; word `i` is tagged `i`.
    pub fn from_words(rank: usize, words: &[Word]) -> Self {
        let mut a = Fsa::new(rank);
        let s = a.add_state();
        let f = a.add_state();
        a.set_initial(s);
        a.set_final(f);
        for (i, w) in words.iter().enumerate() {
            a.add_path(s, w, f, Some(i as u32));
        }
        a
    }

    /// Accepts the submonoid generated by `gens`: one hub state, one tagged petal per word.
    pub fn monoid(rank: usize, gens: &[Word]) -> Self {
        let mut a = Fsa::new(rank);
        let h = a.add_state();
        a.set_initial(h);
        a.set_final(h);
        for (i, w) in gens.iter().enumerate() {
            if !w.is_empty() {
                a.add_path(h, w, h, Some(i as u32));
            }
        }
        a
    }

    fn check_rank(&self, other: &Fsa) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::AlphabetMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    /// Disjoint copy of `other` inside `self`; returns the state offset.
    fn embed(&mut self, other: &Fsa) -> usize {
        let off = self.add_states(other.states);
        for t in &other.transitions {
            self.transitions.push(Transition {
                from: t.from + off,
                label: t.label,
                to: t.to + off,
                tag: t.tag,
            });
        }
        off
    }

    pub fn union(&self, other: &Fsa) -> Result<Fsa> {
        self.check_rank(other)?;
        let mut a = self.clone();
        let off = a.embed(other);
        a.initial.extend(other.initial.iter().map(|s| s + off));
        a.finals.extend(other.finals.iter().map(|s| s + off));
        Ok(a)
    }

    /// Concatenation; the junction ε-moves carry `junction` as tag.
    pub fn concat_tagged(&self, other: &Fsa, junction: Option<u32>) -> Result<Fsa> {
        self.check_rank(other)?;
        let mut a = self.clone();
        let off = a.embed(other);
        for &f in &self.finals {
            for &i in &other.initial {
                a.add_tagged(f, None, i + off, junction);
            }
        }
        a.finals = other.finals.iter().map(|s| s + off).collect();
        Ok(a)
    }

    pub fn concat(&self, other: &Fsa) -> Result<Fsa> {
        self.concat_tagged(other, None)
    }

    /// Kleene star, i.e. the generated submonoid.
    pub fn star(&self) -> Fsa {
        let mut a = Fsa::new(self.rank);
        let h = a.add_state();
        a.set_initial(h);
        a.set_final(h);
        let off = a.embed(self);
        for &i in &self.initial {
            a.add_edge(h, None, i + off);
        }
        for &f in &self.finals {
            a.add_edge(f + off, None, h);
        }
        a
    }

    /// Accepts `{w⁻¹ : w ∈ L}`.
    pub fn reverse_invert(&self) -> Fsa {
        Fsa {
            rank: self.rank,
            states: self.states,
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    from: t.to,
                    label: t.label.map(|l| l.inverse()),
                    to: t.from,
                    tag: t.tag,
                })
                .collect(),
            initial: self.finals.clone(),
            finals: self.initial.clone(),
        }
    }

    /// Concatenation with a single word on the right.
    pub fn append_word(&self, w: &Word) -> Fsa {
        let mut a = self.clone();
        let f = a.add_state();
        let olds: Vec<usize> = a.finals.iter().copied().collect();
        let mid = a.add_state();
        for s in olds {
            a.add_edge(s, None, mid);
        }
        a.add_path(mid, w, f, None);
        a.finals = BTreeSet::from([f]);
        a
    }

    /// Substitutes a word for every labelled transition (generator `g` ↦ `assignment[g]`).
    pub fn relabel_words(&self, target_rank: usize, assignment: &[Word]) -> Result<Fsa> {
        let mut a = Fsa::new(target_rank);
        a.add_states(self.states);
        for t in &self.transitions {
            match t.label {
                None => a.add_tagged(t.from, None, t.to, t.tag),
                Some(l) => {
                    let img = assignment
                        .get(l.gen())
                        .ok_or(Error::UnassignedLetter(l.gen()))?;
                    let img = if l.is_inverse() { img.invert() } else { img.clone() };
                    a.add_path(t.from, &img, t.to, t.tag);
                }
            }
        }
        a.initial = self.initial.clone();
        a.finals = self.finals.clone();
        Ok(a)
    }

    /// Renames generators; the result lives over `target_rank`.
    pub fn rename(&self, target_rank: usize, map: impl Fn(usize) -> usize) -> Fsa {
        let mut a = self.clone();
        a.rank = target_rank;
        for t in &mut a.transitions {
            t.label = t.label.map(|l| Letter::new(map(l.gen()), l.is_inverse()));
        }
        a
    }

    /// Rewrites tags; `None` drops a tag.
    pub fn map_tags(&self, f: impl Fn(u32) -> Option<u32>) -> Fsa {
        let mut a = self.clone();
        for t in &mut a.transitions {
            t.tag = t.tag.and_then(&f);
        }
        a
    }

    pub fn without_tags(&self) -> Fsa {
        let mut a = self.clone();
        for t in &mut a.transitions {
            t.tag = None;
        }
        a
    }

    /// Outgoing transition indices per state.
    pub fn out_index(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.from].push(i);
        }
        out
    }

    pub fn in_index(&self) -> Vec<Vec<usize>> {
        let mut inn = vec![Vec::new(); self.states];
        for (i, t) in self.transitions.iter().enumerate() {
            inn[t.to].push(i);
        }
        inn
    }

    pub fn epsilon_closure(&self, set: &BTreeSet<usize>, out: &[Vec<usize>]) -> BTreeSet<usize> {
        let mut seen = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(p) = stack.pop() {
            for &e in &out[p] {
                let t = &self.transitions[e];
                if t.label.is_none() && seen.insert(t.to) {
                    stack.push(t.to);
                }
            }
        }
        seen
    }

    /// Literal word acceptance (no free reduction).
    pub fn accepts(&self, w: &Word) -> bool {
        let out = self.out_index();
        let mut cur = self.epsilon_closure(&self.initial, &out);
        for &l in w.iter() {
            let mut next = BTreeSet::new();
            for &p in &cur {
                for &e in &out[p] {
                    let t = &self.transitions[e];
                    if t.label == Some(l) {
                        next.insert(t.to);
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            cur = self.epsilon_closure(&next, &out);
        }
        cur.iter().any(|s| self.finals.contains(s))
    }

    /// States reachable from an initial state and co-reachable to a final one.
    fn useful(&self) -> Vec<bool> {
        let out = self.out_index();
        let inn = self.in_index();
        let walk = |start: &BTreeSet<usize>, adj: &[Vec<usize>], fwd: bool| {
            let mut seen = vec![false; self.states];
            let mut stack: Vec<usize> = start.iter().copied().collect();
            for &s in start {
                seen[s] = true;
            }
            while let Some(p) = stack.pop() {
                for &e in &adj[p] {
                    let t = &self.transitions[e];
                    let q = if fwd { t.to } else { t.from };
                    if !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
            seen
        };
        let f = walk(&self.initial, &out, true);
        let b = walk(&self.finals, &inn, false);
        f.iter().zip(b).map(|(x, y)| *x && y).collect()
    }

    /// Drops useless states and renumbers. Language and tags are unchanged.
    pub fn trim(&self) -> Fsa {
        let keep = self.useful();
        let mut map = vec![usize::MAX; self.states];
        let mut n = 0;
        for (s, k) in keep.iter().enumerate() {
            if *k {
                map[s] = n;
                n += 1;
            }
        }
        let mut a = Fsa::new(self.rank);
        a.states = n;
        let mut seen = BTreeSet::new();
        for t in &self.transitions {
            if keep[t.from] && keep[t.to] {
                let nt = Transition {
                    from: map[t.from],
                    label: t.label,
                    to: map[t.to],
                    tag: t.tag,
                };
                if seen.insert(nt) {
                    a.transitions.push(nt);
                }
            }
        }
        a.initial = self.initial.iter().filter(|s| keep[**s]).map(|s| map[*s]).collect();
        a.finals = self.finals.iter().filter(|s| keep[**s]).map(|s| map[*s]).collect();
        a
    }

    pub fn is_empty_language(&self) -> bool {
        !self.useful().iter().any(|x| *x)
    }

    /// Product automaton of two ε-free automata.
    pub fn intersect_eps_free(&self, other: &Fsa) -> Result<Fsa> {
        self.check_rank(other)?;
        let ao = self.out_index();
        let bo = other.out_index();
        let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut a = Fsa::new(self.rank);
        let mut queue = VecDeque::new();
        for &p in &self.initial {
            for &q in &other.initial {
                let s = a.add_state();
                ids.insert((p, q), s);
                a.set_initial(s);
                queue.push_back((p, q));
            }
        }
        while let Some((p, q)) = queue.pop_front() {
            let s = ids[&(p, q)];
            if self.finals.contains(&p) && other.finals.contains(&q) {
                a.set_final(s);
            }
            for &e in &ao[p] {
                let t = self.transitions[e];
                let Some(l) = t.label else { continue };
                for &f in &bo[q] {
                    let u = other.transitions[f];
                    if u.label != Some(l) {
                        continue;
                    }
                    let key = (t.to, u.to);
                    let d = match ids.get(&key) {
                        Some(&d) => d,
                        None => {
                            let d = a.add_state();
                            ids.insert(key, d);
                            queue.push_back(key);
                            d
                        }
                    };
                    a.add_tagged(s, Some(l), d, t.tag.or(u.tag));
                }
            }
        }
        Ok(a.trim())
    }

    /// Subset construction. Returns a complete DFA over all 2·rank letters.
    pub fn determinize(&self) -> Dfa {
        let out = self.out_index();
        let letters = 2 * self.rank;
        let start = self.epsilon_closure(&self.initial, &out);
        let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        let mut sets = vec![start.clone()];
        ids.insert(start, 0);
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let cur = sets[i].clone();
            let mut row = vec![0; letters];
            for (li, slot) in row.iter_mut().enumerate() {
                let l = Letter::from_index(li);
                let mut next = BTreeSet::new();
                for &p in &cur {
                    for &e in &out[p] {
                        let t = &self.transitions[e];
                        if t.label == Some(l) {
                            next.insert(t.to);
                        }
                    }
                }
                let next = self.epsilon_closure(&next, &out);
                *slot = match ids.get(&next) {
                    Some(&d) => d,
                    None => {
                        sets.push(next.clone());
                        ids.insert(next, sets.len() - 1);
                        sets.len() - 1
                    }
                };
            }
            delta.push(row);
            i += 1;
        }
        let accept = sets
            .iter()
            .map(|s| s.iter().any(|x| self.finals.contains(x)))
            .collect();
        Dfa {
            rank: self.rank,
            delta,
            accept,
        }
    }

    /// Literal language equality (no reduction), via on-the-fly determinization.
    pub fn language_equal(&self, other: &Fsa) -> bool {
        let a = self.determinize().minimize();
        let b = other.determinize().minimize();
        a.isomorphic(&b)
    }

    /// All accepted words of length at most `n` (literal, unreduced). Test helper scale.
    pub fn words_up_to(&self, n: usize) -> BTreeSet<Word> {
        let out = self.out_index();
        let mut res = BTreeSet::new();
        let mut frontier: BTreeMap<Word, BTreeSet<usize>> = BTreeMap::new();
        frontier.insert(Word::empty(), self.epsilon_closure(&self.initial, &out));
        for len in 0..=n {
            let mut next: BTreeMap<Word, BTreeSet<usize>> = BTreeMap::new();
            for (w, set) in &frontier {
                if set.iter().any(|s| self.finals.contains(s)) {
                    res.insert(w.clone());
                }
                if len == n {
                    continue;
                }
                for &p in set {
                    for &e in &out[p] {
                        let t = &self.transitions[e];
                        if let Some(l) = t.label {
                            let mut w2 = w.clone();
                            w2.push(l);
                            next.entry(w2).or_default().insert(t.to);
                        }
                    }
                }
            }
            frontier = next
                .into_iter()
                .map(|(w, s)| {
                    let c = self.epsilon_closure(&s, &out);
                    (w, c)
                })
                .collect();
        }
        res
    }
}

/// A complete deterministic automaton; state 0 is initial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub rank: usize,
    pub delta: Vec<Vec<usize>>,
    pub accept: Vec<bool>,
}

impl Dfa {
    /// Moore partition refinement, then renumbering in BFS order from the start state.
    pub fn minimize(&self) -> Dfa {
        let n = self.delta.len();
        let letters = 2 * self.rank;
        let mut class: Vec<usize> = self.accept.iter().map(|&a| a as usize).collect();
        loop {
            let mut sig: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
            let mut next = vec![0; n];
            for s in 0..n {
                let key = (class[s], self.delta[s].iter().map(|&t| class[t]).collect());
                let k = sig.len();
                next[s] = *sig.entry(key).or_insert(k);
            }
            let before = class.iter().collect::<BTreeSet<_>>().len();
            let after = sig.len();
            class = next;
            if before == after {
                break;
            }
        }
        let mut order = vec![usize::MAX; n];
        let mut reps = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        let mut by_class: BTreeMap<usize, usize> = BTreeMap::new();
        by_class.insert(class[0], 0);
        reps.push(0);
        order[0] = 0;
        while let Some(s) = queue.pop_front() {
            for l in 0..letters {
                let t = self.delta[s][l];
                if let alloc::collections::btree_map::Entry::Vacant(e) = by_class.entry(class[t]) {
                    e.insert(reps.len());
                    reps.push(t);
                    queue.push_back(t);
                }
            }
        }
        let delta = reps
            .iter()
            .map(|&s| self.delta[s].iter().map(|&t| by_class[&class[t]]).collect())
            .collect();
        let accept = reps.iter().map(|&s| self.accept[s]).collect();
        Dfa {
            rank: self.rank,
            delta,
            accept,
        }
    }

    /// Equality of minimized, BFS-numbered DFAs.
    pub fn isomorphic(&self, other: &Dfa) -> bool {
        self == other
    }

    pub fn to_fsa(&self) -> Fsa {
        let mut a = Fsa::new(self.rank);
        a.add_states(self.delta.len());
        a.set_initial(0);
        for (s, row) in self.delta.iter().enumerate() {
            if self.accept[s] {
                a.set_final(s);
            }
            for (l, &t) in row.iter().enumerate() {
                a.add_edge(s, Some(Letter::from_index(l)), t);
            }
        }
        a.trim()
    }
}
