//! Stallings graphs of finitely generated subgroups of a free group.
//!
//! Every edge carries a word over the subgroup's generators Y. We keep the
//! invariant that for some (never computed) function φ from vertices to the
//! free group with φ(base) = 1, an edge u -x-> v has provenance evaluating to
//! φ(u)·x·φ(v)⁻¹. Loops at the base therefore carry witnesses for their labels.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::fsa::Fsa;
use crate::word::{Letter, Word};

#[derive(Clone, Debug)]
struct Edge {
    from: usize,
    gen: usize,
    to: usize,
    prov: Word,
    live: bool,
}

/// A folded core graph; `adj[v][letter]` is the unique half-edge reading that letter.
#[derive(Clone, Debug)]
pub struct StallingsGraph {
    rank: usize,
    gens: Vec<Word>,
    base: usize,
    adj: Vec<Vec<Option<(usize, Word)>>>,
    /// Spanning-tree path from the base: (label, provenance).
    tree: Vec<(Word, Word)>,
}

impl StallingsGraph {
    /// Folds the bouquet of the given words. Empty (or trivial) generators are kept as Y-letters but add no petal.
    pub fn new(rank: usize, gens: &[Word]) -> Self {
        let mut verts = 1usize;
        let base = 0usize;
        let mut edges: Vec<Edge> = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            let w = g.free_reduce();
            if w.is_empty() {
                continue;
            }
            let mut cur = base;
            for (k, &l) in w.iter().enumerate() {
                let next = if k + 1 == w.len() {
                    base
                } else {
                    verts += 1;
                    verts - 1
                };
                let half = if k == 0 { Word::letter(Letter::pos(i)) } else { Word::empty() };
                if l.is_inverse() {
                    edges.push(Edge { from: next, gen: l.gen(), to: cur, prov: half.invert(), live: true });
                } else {
                    edges.push(Edge { from: cur, gen: l.gen(), to: next, prov: half, live: true });
                }
                cur = next;
            }
        }
        fold(&mut edges, verts, base, rank);
        let (adj, base) = prune(&edges, verts, base, rank);
        let tree = spanning_tree(&adj, base);
        StallingsGraph {
            rank,
            gens: gens.to_vec(),
            base,
            adj,
            tree,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of given generators |Y|.
    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn gens(&self) -> &[Word] {
        &self.gens
    }

    pub fn vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|row| row.iter().filter(|h| h.is_some()).count())
            .sum::<usize>()
            / 2
    }

    /// Half-edge at `v` reading `l`.
    pub fn step(&self, v: usize, l: Letter) -> Option<&(usize, Word)> {
        self.adj[v][l.index()].as_ref()
    }

    /// Reads the reduced form of `w` from the base as far as possible.
    /// Returns (vertex reached, letters consumed, provenance of the path).
    fn read(&self, r: &Word) -> (usize, usize, Word) {
        let mut v = self.base;
        let mut prov = Vec::new();
        let mut k = 0;
        while k < r.len() {
            match self.step(v, r[k]) {
                Some((to, p)) => {
                    prov.extend_from_slice(p.letters());
                    v = *to;
                    k += 1;
                }
                None => break,
            }
        }
        (v, k, Word::from(prov).free_reduce())
    }

    /// A Y-word evaluating to `w` in the free group, if `w` lies in the subgroup.
    pub fn member(&self, w: &Word) -> Option<Word> {
        let r = w.free_reduce();
        let (v, k, prov) = self.read(&r);
        (k == r.len() && v == self.base).then_some(prov)
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.member(w).is_some()
    }

    /// Right coset split `g = a·r`: `a` in the subgroup (as a Y-word) and `r` the
    /// canonical representative of the coset `A·g`.
    pub fn coset_split(&self, g: &Word) -> (Word, Word) {
        let red = g.free_reduce();
        let (v, k, prov) = self.read(&red);
        let (tl, tp) = &self.tree[v];
        let rep = tl.concat(&red.slice(k, red.len())).free_reduce();
        let a = prov.concat(&tp.invert()).free_reduce();
        (a, rep)
    }

    /// Evaluates a Y-word through the generators, reduced.
    pub fn evaluate(&self, y: &Word) -> Word {
        y.substitute(&self.gens).expect("Y-word over the generators").free_reduce()
    }

    /// The graph as an automaton over X; base is the only initial and final state.
    /// Tags record nothing; provenance is consulted through the graph itself.
    pub fn to_fsa(&self) -> Fsa {
        let mut a = Fsa::new(self.rank);
        a.add_states(self.adj.len());
        a.set_initial(self.base);
        a.set_final(self.base);
        for (v, row) in self.adj.iter().enumerate() {
            for (li, h) in row.iter().enumerate() {
                if let Some((to, _)) = h {
                    a.add_edge(v, Some(Letter::from_index(li)), *to);
                }
            }
        }
        a
    }

    /// Half-edges of `v` as (letter, target, provenance).
    pub fn half_edges(&self, v: usize) -> impl Iterator<Item = (Letter, usize, &Word)> + '_ {
        self.adj[v]
            .iter()
            .enumerate()
            .filter_map(|(li, h)| h.as_ref().map(|(to, p)| (Letter::from_index(li), *to, p)))
    }
}

fn fold(edges: &mut Vec<Edge>, verts: usize, base: usize, rank: usize) {
    // incident[v] = list of edge ids touching v (may contain stale ids).
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); verts];
    for (i, e) in edges.iter().enumerate() {
        incident[e.from].push(i);
        if e.to != e.from {
            incident[e.to].push(i);
        }
    }
    let mut alias: Vec<usize> = (0..verts).collect();
    let mut queue: VecDeque<usize> = (0..verts).collect();
    let mut queued = vec![true; verts];
    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        if alias[u] != u {
            continue;
        }
        // Find two half-edges at u with the same label.
        let mut slot: Vec<Option<(usize, bool)>> = vec![None; 2 * rank];
        let mut found = None;
        incident[u].retain(|&i| edges[i].live);
        incident[u].sort_unstable();
        incident[u].dedup();
        'scan: for &i in &incident[u] {
            let e = &edges[i];
            let mut halves = Vec::with_capacity(2);
            if e.from == u {
                halves.push((Letter::pos(e.gen), true));
            }
            if e.to == u {
                halves.push((Letter::neg(e.gen), false));
            }
            for (l, fwd) in halves {
                if let Some(prev) = slot[l.index()] {
                    if prev != (i, fwd) {
                        found = Some((prev, (i, fwd)));
                        break 'scan;
                    }
                } else {
                    slot[l.index()] = Some((i, fwd));
                }
            }
        }
        let Some(((e1, f1), (e2, f2))) = found else { continue };
        let (v1, p1) = far_end(&edges[e1], f1);
        let (v2, p2) = far_end(&edges[e2], f2);
        let keep = if v1 == v2 {
            edges[e2].live = false;
            u
        } else {
            // Merge `gone` into `keep`; `c` satisfies φ(keep) = c·φ(gone).
            let (keep, gone, drop, c) = if v2 == base {
                (v2, v1, e1, p2.invert().concat(&p1).free_reduce())
            } else {
                (v1, v2, e2, p1.invert().concat(&p2).free_reduce())
            };
            edges[drop].live = false;
            let cinv = c.invert();
            let moved: Vec<usize> = incident[gone].clone();
            for i in moved {
                if !edges[i].live {
                    continue;
                }
                let e = &mut edges[i];
                if e.from == gone {
                    e.prov = c.concat(&e.prov).free_reduce();
                    e.from = keep;
                }
                if e.to == gone {
                    e.prov = e.prov.concat(&cinv).free_reduce();
                    e.to = keep;
                }
                incident[keep].push(i);
            }
            incident[gone].clear();
            alias[gone] = keep;
            keep
        };
        // The merged vertex and its neighbours may now carry duplicate halves.
        let mut touched: Vec<usize> = incident[keep]
            .iter()
            .filter(|&&i| edges[i].live)
            .flat_map(|&i| [edges[i].from, edges[i].to])
            .collect();
        touched.push(keep);
        touched.push(u);
        for t in touched {
            if alias[t] == t && !queued[t] {
                queued[t] = true;
                queue.push_back(t);
            }
        }
    }
}

/// Endpoint and half-edge provenance when leaving along `e` in direction `fwd`.
fn far_end(e: &Edge, fwd: bool) -> (usize, Word) {
    if fwd {
        (e.to, e.prov.clone())
    } else {
        (e.from, e.prov.invert())
    }
}

type Adj = Vec<Vec<Option<(usize, Word)>>>;

/// Removes hanging trees (except at the base) and renumbers, base first.
fn prune(edges: &[Edge], verts: usize, base: usize, rank: usize) -> (Adj, usize) {
    let live: Vec<&Edge> = edges.iter().filter(|e| e.live).collect();
    let mut deg = vec![0usize; verts];
    for e in &live {
        deg[e.from] += 1;
        deg[e.to] += 1;
    }
    let mut alive_edge = vec![true; live.len()];
    let mut alive_vert: Vec<bool> = deg.iter().map(|&d| d > 0).collect();
    alive_vert[base] = true;
    loop {
        let mut changed = false;
        for (i, e) in live.iter().enumerate() {
            if !alive_edge[i] {
                continue;
            }
            for v in [e.from, e.to] {
                if v != base && deg[v] == 1 {
                    alive_edge[i] = false;
                    deg[e.from] -= 1;
                    deg[e.to] -= 1;
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for v in 0..verts {
        if v != base && deg[v] == 0 {
            alive_vert[v] = false;
        }
    }
    let mut map = vec![usize::MAX; verts];
    map[base] = 0;
    let mut n = 1;
    for v in 0..verts {
        if v != base && alive_vert[v] {
            map[v] = n;
            n += 1;
        }
    }
    let mut adj: Adj = vec![vec![None; 2 * rank]; n];
    for (i, e) in live.iter().enumerate() {
        if !alive_edge[i] {
            continue;
        }
        let (a, b) = (map[e.from], map[e.to]);
        adj[a][Letter::pos(e.gen).index()] = Some((b, e.prov.clone()));
        adj[b][Letter::neg(e.gen).index()] = Some((a, e.prov.invert()));
    }
    (adj, 0)
}

fn spanning_tree(adj: &Adj, base: usize) -> Vec<(Word, Word)> {
    let mut tree: Vec<Option<(Word, Word)>> = vec![None; adj.len()];
    tree[base] = Some((Word::empty(), Word::empty()));
    let mut queue = VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        let (lab, prov) = tree[v].clone().expect("visited");
        for (li, h) in adj[v].iter().enumerate() {
            if let Some((to, p)) = h {
                if tree[*to].is_none() {
                    let mut l2 = lab.clone();
                    l2.push(Letter::from_index(li));
                    tree[*to] = Some((l2, prov.concat(p).free_reduce()));
                    queue.push_back(*to);
                }
            }
        }
    }
    tree.into_iter()
        .map(|t| t.expect("core graph is connected"))
        .collect()
}
