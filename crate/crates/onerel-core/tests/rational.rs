use std::collections::BTreeSet;

use onerel_core::fsa::Fsa;
use onerel_core::herbst::{herbst_embed, herbst_rewrite, image_under_iso, subgroup_intersect, HerbstRoute};
use onerel_core::rational::{monoid_set, subgroup_set};
use onerel_core::{benois_reduce, Alphabet, Letter, RationalSet, StallingsGraph, Word};
use proptest::prelude::*;

fn w(s: &str) -> Word {
    Alphabet::from_letters("abc").unwrap().parse_word(s).unwrap()
}

fn ws(v: &[&str]) -> Vec<Word> {
    v.iter().map(|s| w(s)).collect()
}

fn set(v: &[&str]) -> BTreeSet<Word> {
    v.iter().map(|s| w(s)).collect()
}

fn word_strategy(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max)
        .prop_map(|v| v.into_iter().map(|(g, i)| Letter::new(g, i)).collect())
}

/// Every reduced word of length at most `n` over `rank` generators.
fn reduced_words(rank: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..n {
        let mut next = Vec::new();
        for x in &layer {
            for i in 0..2 * rank {
                let l = Letter::from_index(i);
                if x.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut y = x.clone();
                y.push(l);
                next.push(y);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[test]
fn fsa_constructions() {
    let a = Fsa::from_words(3, &ws(&["ab"]));
    assert!(a.accepts(&w("ab")));
    assert!(!a.accepts(&w("a")));
    let s = Fsa::from_word(3, &w("a")).star();
    for k in 0..4 {
        assert!(s.accepts(&w("a").pow(k)));
    }
    assert!(!s.accepts(&w("b")));
    let r = Fsa::from_words(3, &ws(&["ab", "c"])).reverse_invert();
    assert_eq!(r.words_up_to(4), set(&["BA", "C"]));
}

#[test]
fn benois_examples() {
    let r = benois_reduce(&Fsa::from_word(3, &w("abBc")));
    assert_eq!(r.elements_up_to(6), set(&["ac"]));
    let r = benois_reduce(&Fsa::from_word(3, &w("aA")).star());
    assert_eq!(r.elements_up_to(6), set(&[""]));
    let r = benois_reduce(&Fsa::epsilon(3));
    assert_eq!(r.elements_up_to(3), set(&[""]));
    assert!(RationalSet::empty(3).is_empty());
}

#[test]
fn rational_membership_examples() {
    let m = monoid_set(3, &ws(&["a"]));
    assert!(m.member(&w("aAa")));
    assert!(!m.member(&w("A")));
    let m = monoid_set(3, &ws(&["ab", "B"]));
    assert!(m.member(&w("a")));
    assert!(m.member(&w("aa")));
    assert!(!m.member(&w("b")));
}

#[test]
fn rational_intersection_examples() {
    let a = monoid_set(3, &ws(&["a"]));
    let aa = monoid_set(3, &ws(&["aa"]));
    let i = a.intersect(&aa).unwrap();
    assert_eq!(i.elements_up_to(6), set(&["", "aa", "aaaa", "aaaaaa"]));
    assert!(a.intersect(&a.complement()).unwrap().is_empty());
    let m = monoid_set(3, &ws(&["ab", "B"]));
    let fa = subgroup_set(3, &ws(&["a"]));
    let i = m.intersect(&fa).unwrap();
    assert!(i.member(&w("a")) && i.member(&w("aa")));
    assert!(!i.member(&w("A")));
}

#[test]
fn normalize_compares_subsets() {
    let x = monoid_set(3, &ws(&["a", "aa"]));
    let y = monoid_set(3, &ws(&["a"]));
    assert!(x.same_subset(&y));
    assert!(!x.same_subset(&monoid_set(3, &ws(&["aa"]))));
}

#[test]
fn stallings_examples() {
    let g = StallingsGraph::new(2, &ws(&["a"]));
    assert_eq!(g.vertices(), 1);
    assert_eq!(g.edge_count(), 1);
    assert_eq!(g.member(&w("aaa")), Some(w("aaa")));
    assert_eq!(g.member(&w("b")), None);

    let g = StallingsGraph::new(2, &ws(&["aa", "b"]));
    assert!(!g.contains(&w("a")));
    assert!(g.contains(&w("aab")));
    let y = g.member(&w("aabaa")).unwrap();
    assert_eq!(y, w("aba"));
    assert_eq!(g.evaluate(&y), w("aabaa"));

    let g = StallingsGraph::new(2, &ws(&["abA", "aa"]));
    assert!(g.contains(&w("abbA")));
    assert!(!g.contains(&w("b")));
}

#[test]
fn herbst_examples() {
    // Y-words come back over the generators of the graph, y₁ = gen 0, y₂ = gen 1
    let g = StallingsGraph::new(2, &ws(&["aa", "b"]));
    let out = herbst_rewrite(&Fsa::from_words(2, &ws(&["aa", "baa"])), &g).unwrap();
    assert_eq!(benois_reduce(&out).elements_up_to(4), set(&["a", "ba"]));

    let g = StallingsGraph::new(1, &ws(&["a"]));
    let r = Fsa::from_word(1, &w("aa")).star();
    let out = herbst_rewrite(&r, &g).unwrap();
    assert_eq!(
        benois_reduce(&out).elements_up_to(8),
        benois_reduce(&r).elements_up_to(8)
    );

    let eps = herbst_rewrite(&Fsa::epsilon(1), &g).unwrap();
    assert_eq!(benois_reduce(&eps).elements_up_to(2), set(&[""]));
}

#[test]
fn herbst_embed_examples() {
    let y = |s: &str| Alphabet::from_letters("xy").unwrap().parse_word(s).unwrap();
    let b = Fsa::from_word(2, &y("x"));
    let e = herbst_embed(&b, 3, &ws(&["aa", "b"])).unwrap();
    assert_eq!(benois_reduce(&e).elements_up_to(4), set(&["aa"]));
    let e = herbst_embed(&Fsa::epsilon(2), 3, &ws(&["aa", "b"])).unwrap();
    assert_eq!(benois_reduce(&e).elements_up_to(4), set(&[""]));
    let e = herbst_embed(&Fsa::from_word(2, &y("xY")), 3, &ws(&["ab", "b"])).unwrap();
    assert_eq!(benois_reduce(&e).elements_up_to(4), set(&["a"]));
    assert!(herbst_embed(&b, 3, &[]).is_err());
}

#[test]
fn subgroup_intersect_examples() {
    let a = StallingsGraph::new(2, &ws(&["a"]));
    let whole = RationalSet::whole(2);
    let i = subgroup_intersect(&whole, &a).unwrap();
    assert!(i.same_subset(&subgroup_set(2, &ws(&["a"]))));

    let m = monoid_set(2, &ws(&["ab", "Ba"]));
    let a2 = StallingsGraph::new(2, &ws(&["aa"]));
    assert!(subgroup_intersect(&m, &a2).unwrap().member(&w("aa")));

    let b = monoid_set(2, &ws(&["b"])).intersect(&benois_reduce(&Fsa::from_word(2, &w("b")))).unwrap();
    assert!(subgroup_intersect(&b, &a).unwrap().is_empty());
}

#[test]
fn image_under_iso_examples() {
    let a2 = StallingsGraph::new(1, &ws(&["aa"]));
    let target = ws(&["aaa"]);
    for route in [HerbstRoute::Expression, HerbstRoute::Product] {
        let one = benois_reduce(&Fsa::epsilon(1));
        let img = image_under_iso(&one, &a2, &target, 1, route).unwrap();
        assert_eq!(img.elements_up_to(6), set(&[""]));
        let r = benois_reduce(&Fsa::from_word(1, &w("aa")));
        let img = image_under_iso(&r, &a2, &target, 1, route).unwrap();
        assert_eq!(img.elements_up_to(6), set(&["aaa"]));
        let r = benois_reduce(&Fsa::from_word(1, &w("aaaa")));
        let img = image_under_iso(&r, &a2, &target, 1, route).unwrap();
        assert_eq!(img.elements_up_to(8), set(&["aaaaaa"]));
    }
    assert!(image_under_iso(&RationalSet::empty(1), &a2, &[], 1, HerbstRoute::Product).is_err());
}

fn small_sets() -> impl Strategy<Value = Vec<Word>> {
    prop::collection::vec(word_strategy(2, 3), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn saturation_is_idempotent(s in small_sets()) {
        let r = monoid_set(2, &s);
        let again = benois_reduce(r.fsa());
        prop_assert!(again.same_subset(&r));
        prop_assert!(again.fsa().language_equal(r.fsa()));
    }

    #[test]
    fn membership_ignores_free_reduction(s in small_sets(), x in word_strategy(2, 8)) {
        let r = monoid_set(2, &s);
        prop_assert_eq!(r.member(&x), r.member(&x.free_reduce()));
    }

    #[test]
    fn products_of_generators_are_members(s in small_sets()) {
        let r = monoid_set(2, &s);
        let mut layer: BTreeSet<Word> = [Word::empty()].into();
        let mut seen = layer.clone();
        for _ in 0..4 {
            let mut next = BTreeSet::new();
            for x in &layer {
                for g in &s {
                    next.insert(x.concat(g).free_reduce());
                }
            }
            seen.extend(next.iter().cloned());
            layer = next;
        }
        for x in seen.iter().filter(|x| x.len() <= 6) {
            prop_assert!(r.member(x), "{:?}", x);
        }
        prop_assert_eq!(
            r.elements_up_to(3),
            reduced_words(2, 3).into_iter().filter(|x| r.member(x)).collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn stallings_witnesses_evaluate(gens in prop::collection::vec(word_strategy(2, 4), 1..=3), y in word_strategy(3, 6)) {
        let y = Word::from(y.iter().filter(|l| l.gen() < gens.len()).copied().collect::<Vec<_>>());
        let g = StallingsGraph::new(2, &gens);
        let x = y.substitute(&gens).unwrap();
        let wit = g.member(&x);
        prop_assert!(wit.is_some());
        prop_assert_eq!(g.evaluate(&wit.unwrap()), x.free_reduce());
    }

    #[test]
    fn herbst_round_trip(gens in prop::collection::vec(word_strategy(2, 3), 1..=2), words in prop::collection::vec(word_strategy(3, 3), 1..=3)) {
        let gens: Vec<Word> = gens.into_iter().filter(|g| !g.free_reduce().is_empty()).collect();
        prop_assume!(!gens.is_empty());
        let g = StallingsGraph::new(2, &gens);
        let ys: Vec<Word> = words
            .iter()
            .map(|y| Word::from(y.iter().filter(|l| l.gen() < gens.len()).copied().collect::<Vec<_>>()))
            .collect();
        let xs: Vec<Word> = ys.iter().map(|y| y.substitute(&gens).unwrap()).collect();
        let a = Fsa::monoid(2, &xs);
        let sat = benois_reduce(&a);
        let back = herbst_embed(&herbst_rewrite(&a, &g).unwrap(), 2, g.gens()).unwrap();
        prop_assert_eq!(benois_reduce(&back).elements_up_to(8), sat.elements_up_to(8));
    }
}
