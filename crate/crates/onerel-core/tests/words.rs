use onerel_core::word::{rho, rho_letters, PrefixSign, SubLetter};
use onerel_core::{Alphabet, Letter, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn alpha() -> Alphabet {
    Alphabet::from_letters("abct").unwrap()
}

fn w(s: &str) -> Word {
    alpha().parse_word(s).unwrap()
}

fn word_strategy(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max)
        .prop_map(|v| v.into_iter().map(|(g, i)| Letter::new(g, i)).collect())
}

#[test]
fn free_reduce_examples() {
    assert_eq!(w("abB").free_reduce(), w("a"));
    assert_eq!(Word::empty().free_reduce(), Word::empty());
    assert_eq!(w("aBbAac").free_reduce(), w("ac"));
    assert!(w("ac").is_reduced());
    assert!(!w("aBbAac").is_reduced());
}

#[test]
fn invert_examples() {
    assert_eq!(w("ab").invert(), w("BA"));
    assert_eq!(Word::empty().invert(), Word::empty());
    assert_eq!(w("aA").invert(), w("aA"));
}

#[test]
fn cyclic_reduce_examples() {
    assert_eq!(w("abA").cyclic_reduce(), (w("a"), w("b")));
    assert_eq!(w("ab").cyclic_reduce(), (Word::empty(), w("ab")));
    assert_eq!(w("CabBac").cyclic_reduce(), (w("C"), w("aa")));
}

#[test]
fn substitute_examples() {
    let asg = [w("ab"), w("c")];
    let y = |s: &str| Alphabet::from_letters("xy").unwrap().parse_word(s).unwrap();
    assert_eq!(y("xy").substitute(&asg).unwrap(), w("abc"));
    assert_eq!(y("X").substitute(&asg).unwrap(), w("BA"));
    assert_eq!(y("xX").substitute(&[w("a")]).unwrap(), w("aA"));
    assert!(y("y").substitute(&[w("a")]).is_err());
}

#[test]
fn prefixes_examples() {
    assert_eq!(w("ab").prefixes(), vec![Word::empty(), w("a"), w("ab")]);
    assert_eq!(Word::empty().prefixes(), vec![Word::empty()]);
    let a = Alphabet::from_letters("abcd").unwrap();
    assert_eq!(a.parse_word("abcdacdadabbcdacd").unwrap().prefixes().len(), 18);
}

#[test]
fn prefix_sign_examples() {
    let t = 3;
    let x = w("bTattbTa");
    assert_eq!(x.exponent_sum(t), 0);
    assert_eq!(x.prefix_sign(t), PrefixSign::Mixed);
    assert_eq!(w("taT").prefix_sign(t), PrefixSign::Positive);
    assert_eq!(w("Tat").prefix_sign(t), PrefixSign::Negative);
    assert_eq!(w("ab").prefix_sign(t), PrefixSign::ZeroFree);
}

fn subs(v: &[SubLetter]) -> Vec<(usize, i64)> {
    v.iter().map(|s| (s.gen, s.sub)).collect()
}

#[test]
fn rho_examples() {
    let t = 3;
    assert_eq!(subs(&rho_letters(&w("bTattbTa"), t)), [(1, 0), (0, 1), (1, -1), (0, 0)]);
    let r = rho(&w("bTattbTa"), t).unwrap();
    assert_eq!(r.bounds[&0], (0, 1));
    assert_eq!(subs(&rho_letters(&w("taT"), t)), [(0, -1)]);

    let r = rho(&w("TatcbTTattcbTTTatttc"), t).unwrap();
    let a = alpha().for_rho(&r);
    let want = a.parse_word("a{1}c{0}b{0}a{2}c{0}b{0}a{3}c{0}").unwrap();
    assert_eq!(r.image, want);
    assert!(rho(&w("ab"), t).is_err());
    assert!(rho(&w("tab"), t).is_err());
}

#[test]
fn parse_and_format() {
    let a = alpha();
    assert_eq!(a.format(&w("aBc")), "aBc");
    assert_eq!(a.format_or_one(&Word::empty()), "1");
    assert_eq!(a.parse_word("a·b.1 c").unwrap(), w("abc"));
    assert!(a.parse_word("az").is_err());
    assert!(a.parse_word("a?").is_err());
    assert!(Alphabet::from_letters("aa").is_err());
}

/// Cancels a random adjacent inverse pair until none is left.
fn random_reduce(x: &Word, rng: &mut ChaCha8Rng) -> Word {
    let mut v: Vec<Letter> = x.letters().to_vec();
    loop {
        let spots: Vec<usize> = (0..v.len().saturating_sub(1)).filter(|&i| v[i] == v[i + 1].inverse()).collect();
        if spots.is_empty() {
            return Word::from(v);
        }
        let i = spots[rng.gen_range(0..spots.len())];
        v.drain(i..i + 2);
    }
}

proptest! {
    #[test]
    fn free_reduce_is_confluent(x in word_strategy(3, 20), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = x.free_reduce();
        for _ in 0..4 {
            prop_assert_eq!(random_reduce(&x, &mut rng), r.clone());
        }
    }

    #[test]
    fn word_times_inverse_is_trivial(x in word_strategy(3, 20)) {
        prop_assert!(x.concat(&x.invert()).free_reduce().is_empty());
    }

    #[test]
    fn cyclic_core_is_cyclically_reduced(x in word_strategy(3, 20)) {
        let (c, core) = x.cyclic_reduce();
        prop_assert!(core.is_cyclically_reduced());
        if let (Some(f), Some(l)) = (core.first(), core.last()) {
            prop_assert!(core.len() == 1 || *f != l.inverse());
        }
        prop_assert_eq!(c.concat(&core).concat(&c.invert()).free_reduce(), x.free_reduce());
    }

    #[test]
    fn rho_drops_exactly_the_stable_letters(x in word_strategy(4, 20)) {
        let t = 3;
        prop_assert_eq!(rho_letters(&x, t).len(), x.len() - x.occurrences(t));
    }

    #[test]
    fn prefix_positive_subscripts_are_nonpositive(x in word_strategy(4, 16)) {
        let t = 3;
        // drop t⁻¹ where the running sum would go negative, then close with t⁻ˢ
        let mut s = 0i64;
        let mut v = Vec::new();
        for &l in x.iter() {
            if l.gen() == t && l.is_inverse() && s == 0 {
                continue;
            }
            if l.gen() == t {
                s += l.sign();
            }
            v.push(l);
        }
        for _ in 0..s {
            v.push(Letter::neg(t));
        }
        let y = Word::from(v);
        prop_assume!(y.occurrences(t) > 0);
        prop_assert_eq!(y.prefix_sign(t), PrefixSign::Positive);
        let r = rho(&y, t).unwrap();
        for &(lo, hi) in r.bounds.values() {
            prop_assert!(lo <= 0 && hi <= 0);
        }
    }

    #[test]
    fn parse_format_round_trip(x in word_strategy(4, 20)) {
        let a = alpha();
        prop_assert_eq!(a.parse_word(&a.format(&x)).unwrap(), x);
    }
}
