//! Brute-force product search: breadth first over products of generators,
//! keeping one product per normal form.

use std::collections::HashMap;

use onerel_core::group::{Group, Key};
use onerel_core::{Result, Word};

/// Default bound on the number of distinct elements a search may store.
pub const DEFAULT_BUDGET: usize = 200_000;

/// Every element reachable as a product of at most `depth` generators, with the
/// first such product found.
pub struct Reach {
    found: HashMap<Key, Vec<usize>>,
    /// Products of this many generators were fully explored.
    pub depth: usize,
    /// The budget stopped the search before `max_len`.
    pub truncated: bool,
}

impl Reach {
    pub fn len(&self) -> usize {
        self.found.len()
    }

    pub fn is_empty(&self) -> bool {
        self.found.is_empty()
    }

    /// Generator indices whose product equals `q`.
    pub fn find(&self, model: &dyn Group, q: &Word) -> Result<Option<&[usize]>> {
        Ok(self.found.get(&model.normal_form(q)?).map(Vec::as_slice))
    }
}

/// Explores products of `gens` up to `max_len` factors, stopping once `budget`
/// elements are stored.
pub fn explore(model: &dyn Group, gens: &[Word], max_len: usize, budget: usize) -> Result<Reach> {
    let mut found = HashMap::new();
    found.insert(model.normal_form(&Word::empty())?, Vec::new());
    let mut frontier: Vec<(Word, Vec<usize>)> = vec![(Word::empty(), Vec::new())];
    let mut depth = 0;
    let mut truncated = false;
    'outer: while depth < max_len && !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, seq) in &frontier {
            for (i, g) in gens.iter().enumerate() {
                let p = w.concat(g).free_reduce();
                let k = model.normal_form(&p)?;
                if found.contains_key(&k) {
                    continue;
                }
                if found.len() >= budget {
                    truncated = true;
                    break 'outer;
                }
                let mut s = seq.clone();
                s.push(i);
                found.insert(k, s.clone());
                next.push((p, s));
            }
        }
        frontier = next;
        depth += 1;
    }
    Ok(Reach { found, depth, truncated })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleAnswer {
    /// Generator indices whose product equals the query.
    Found(Vec<usize>),
    /// No product of at most `depth` generators equals the query.
    NotFound { depth: usize, truncated: bool },
}

/// Searches for `query` among products of at most `max_len` generators.
pub fn oracle_member(gens: &[Word], model: &dyn Group, query: &Word, max_len: usize) -> Result<OracleAnswer> {
    oracle_member_with_budget(gens, model, query, max_len, DEFAULT_BUDGET)
}

pub fn oracle_member_with_budget(
    gens: &[Word],
    model: &dyn Group,
    query: &Word,
    max_len: usize,
    budget: usize,
) -> Result<OracleAnswer> {
    let target = model.normal_form(query)?;
    let mut found: HashMap<Key, ()> = HashMap::new();
    found.insert(model.normal_form(&Word::empty())?, ());
    if found.contains_key(&target) {
        return Ok(OracleAnswer::Found(Vec::new()));
    }
    let mut frontier: Vec<(Word, Vec<usize>)> = vec![(Word::empty(), Vec::new())];
    let mut depth = 0;
    while depth < max_len && !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, seq) in &frontier {
            for (i, g) in gens.iter().enumerate() {
                let p = w.concat(g).free_reduce();
                let k = model.normal_form(&p)?;
                if k == target {
                    let mut s = seq.clone();
                    s.push(i);
                    return Ok(OracleAnswer::Found(s));
                }
                if found.contains_key(&k) {
                    continue;
                }
                if found.len() >= budget {
                    return Ok(OracleAnswer::NotFound { depth, truncated: true });
                }
                found.insert(k, ());
                let mut s = seq.clone();
                s.push(i);
                next.push((p, s));
            }
        }
        frontier = next;
        depth += 1;
    }
    Ok(OracleAnswer::NotFound { depth, truncated: false })
}

/// The product of the generators named by `seq`.
pub fn evaluate(gens: &[Word], seq: &[usize]) -> Word {
    Word::product(seq.iter().map(|&i| &gens[i])).free_reduce()
}

#[cfg(test)]
mod tests {
    use super::*;
    use onerel_core::group::FreeGroup;

    #[test]
    fn cube_of_a_generator() {
        let g = FreeGroup::new(1);
        let a = Word::gen(0);
        let r = oracle_member(&[a.clone()], &g, &a.pow(3), 3).unwrap();
        assert_eq!(r, OracleAnswer::Found(vec![0, 0, 0]));
    }

    #[test]
    fn inverse_is_not_a_positive_product() {
        let g = FreeGroup::new(1);
        let a = Word::gen(0);
        let r = oracle_member(&[a.clone()], &g, &a.invert(), 10).unwrap();
        assert_eq!(r, OracleAnswer::NotFound { depth: 10, truncated: false });
    }

    #[test]
    fn explore_counts_distinct_elements() {
        let g = FreeGroup::new(2);
        let gens = [Word::gen(0), Word::gen(0).invert(), Word::gen(1)];
        let r = explore(&g, &gens, 2, 1000).unwrap();
        // 1, a, A, b, aa, ab, AA, Ab, ba, bA, bb
        assert_eq!(r.len(), 11);
        assert!(!r.truncated);
        let seq = r.find(&g, &Word::gen(1).concat(&Word::gen(0).invert())).unwrap().unwrap();
        assert_eq!(seq, &[2, 1]);
    }

    #[test]
    fn budget_truncates() {
        let g = FreeGroup::new(2);
        let gens = [Word::gen(0), Word::gen(1)];
        let r = explore(&g, &gens, 10, 5).unwrap();
        assert!(r.truncated);
        assert_eq!(r.len(), 5);
    }
}
