use std::collections::BTreeSet;

use onerel_core::munn::{fim_equal, munn_tree};
use onerel_core::{Alphabet, Letter, Word};
use proptest::prelude::*;

fn w(s: &str) -> Word {
    Alphabet::from_letters("abc").unwrap().parse_word(s).unwrap()
}

fn word_strategy(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..3usize, any::<bool>()), 0..=max)
        .prop_map(|v| v.into_iter().map(|(g, i)| Letter::new(g, i)).collect())
}

#[test]
fn tree_examples() {
    let t = munn_tree(&w("aA"));
    assert_eq!(t.vertices, BTreeSet::from([w(""), w("a")]));
    assert_eq!(t.endpoint, w(""));
    let t = munn_tree(&w(""));
    assert_eq!(t.vertices, BTreeSet::from([w("")]));
    let t = munn_tree(&w("abBc"));
    assert_eq!(t.vertices, BTreeSet::from([w(""), w("a"), w("ab"), w("ac")]));
    assert_eq!(t.endpoint, w("ac"));
}

#[test]
fn equality_examples() {
    assert!(fim_equal(&w("aAa"), &w("a")));
    assert!(!fim_equal(&w("aA"), &w("")));
    assert!(fim_equal(&w("aAbB"), &w("bBaA")));
    assert!(!fim_equal(&w("aA"), &w("Aa")));
}

proptest! {
    #[test]
    fn equal_elements_agree_in_the_free_group(u in word_strategy(8), v in word_strategy(8)) {
        if fim_equal(&u, &v) {
            prop_assert_eq!(u.free_reduce(), v.free_reduce());
        }
    }

    #[test]
    fn vertex_set_is_prefix_closed(u in word_strategy(10)) {
        let t = munn_tree(&u);
        prop_assert!(t.vertices.contains(&t.endpoint));
        for x in &t.vertices {
            prop_assert!(x.is_reduced());
            if !x.is_empty() {
                prop_assert!(t.vertices.contains(&x.slice(0, x.len() - 1)));
            }
        }
    }

    #[test]
    fn vagner_axioms(u in word_strategy(8), v in word_strategy(8)) {
        let ui = u.invert();
        prop_assert!(fim_equal(&u, &Word::product([&u, &ui, &u])));
        let e = u.concat(&ui);
        let f = v.concat(&v.invert());
        prop_assert!(fim_equal(&e.concat(&f), &f.concat(&e)));
    }

    #[test]
    fn compatible_with_concatenation(u in word_strategy(6), x in word_strategy(4), y in word_strategy(4)) {
        // u·xx⁻¹x and u·x are equal, so multiplying by y on either side keeps them equal
        let a = u.concat(&Word::product([&x, &x.invert(), &x]));
        let b = u.concat(&x);
        prop_assert!(fim_equal(&a, &b));
        prop_assert!(fim_equal(&a.concat(&y), &b.concat(&y)));
        prop_assert!(fim_equal(&y.concat(&a), &y.concat(&b)));
    }
}
