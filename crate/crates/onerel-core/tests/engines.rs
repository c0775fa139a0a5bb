use std::collections::BTreeMap;
use std::sync::Arc;

use onerel_core::amalgam::{Amalgam, AmalgamThmA, AmalgamThmB, Side, Syllable};
use onerel_core::group::{FreeSubmonoid, Group, Submonoid};
use onerel_core::hnn::{Hnn, HnnGen, HnnSubmonoid, HnnThmC, Shape, ThmD};
use onerel_core::{Alphabet, Letter, Word};
use proptest::prelude::*;

fn over(letters: &str, s: &str) -> Word {
    Alphabet::from_letters(letters).unwrap().parse_word(s).unwrap()
}

fn words(letters: &str, v: &[&str]) -> Vec<Word> {
    v.iter().map(|s| over(letters, s)).collect()
}

fn word_strategy(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max)
        .prop_map(|v| v.into_iter().map(|(g, i)| Letter::new(g, i)).collect())
}

/// Products of at most `depth` generators, keyed by normal form.
fn products(g: &dyn Group, gens: &[Word], depth: usize) -> BTreeMap<Vec<u32>, Word> {
    let mut seen = BTreeMap::new();
    seen.insert(g.normal_form(&Word::empty()).unwrap(), Word::empty());
    let mut layer = vec![Word::empty()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for x in &layer {
            for y in gens {
                let z = x.concat(y).free_reduce();
                let k = g.normal_form(&z).unwrap();
                if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(k) {
                    e.insert(z.clone());
                    next.push(z);
                }
            }
        }
        layer = next;
    }
    seen
}

// FG(a,b) *_{b = d} FG(c,d), written over a b c d
fn b_is_d() -> Arc<Amalgam> {
    Arc::new(Amalgam::free(2, 2, &words("ab", &["b"]), &words("cd", &["d"])).unwrap())
}

fn syl(side: Side, letters: &str, s: &str) -> Syllable {
    Syllable {
        side,
        word: over(letters, s),
    }
}

#[test]
fn reduce_form_examples() {
    let g = b_is_d();
    let w = |s: &str| over("abcd", s);
    assert_eq!(g.reduce_form(&w("b")).unwrap(), [syl(Side::B, "ab", "b")]);
    assert_eq!(g.reduce_form(&w("d")).unwrap(), [syl(Side::B, "ab", "b")]);
    assert_eq!(g.reduce_form(&w("acAaC")).unwrap(), [syl(Side::B, "ab", "a")]);
    assert_eq!(
        g.reduce_form(&w("ac")).unwrap(),
        [syl(Side::B, "ab", "a"), syl(Side::C, "cd", "c")]
    );
    // b and d merge across the amalgamated letter
    assert_eq!(g.reduce_form(&w("abDa")).unwrap(), [syl(Side::B, "ab", "aa")]);
    assert!(g.reduce_form(&w("")).unwrap().is_empty());
}

#[test]
fn amalgam_word_problem() {
    let g = b_is_d();
    let w = |s: &str| over("abcd", s);
    assert!(g.is_trivial(&w("")).unwrap());
    assert!(!g.is_trivial(&w("a")).unwrap());
    assert!(g.is_trivial(&w("bD")).unwrap());
    assert!(!g.is_trivial(&w("aC")).unwrap());

    let s = Amalgam::free(2, 2, &words("ab", &["abAB"]), &words("cd", &["dcDC"])).unwrap();
    assert!(s.is_trivial(&w("abABcdCD")).unwrap());
    assert!(!s.is_trivial(&w("abABcd")).unwrap());
}

fn thm_a_b(g: &Arc<Amalgam>, sb: &[Word], sc: &[Word]) -> (AmalgamThmA, AmalgamThmB) {
    let nb = sb.len() as u32;
    let mb = Arc::new(FreeSubmonoid::new(2, sb.to_vec(), (0..nb).collect()));
    let mc = Arc::new(FreeSubmonoid::new(2, sc.to_vec(), (nb..nb + sc.len() as u32).collect()));
    let a = AmalgamThmA::new(g.clone(), mb.clone(), mc.clone());
    let b = AmalgamThmB::new(g.clone(), mb, mc).unwrap();
    (a, b)
}

#[test]
fn theorem_a_and_b_agree_with_products() {
    let g = b_is_d();
    let sb = words("ab", &["a", "b", "B"]);
    let sc = words("cd", &["c", "d", "D"]);
    let (ta, tb) = thm_a_b(&g, &sb, &sc);
    assert!(ta.hypothesis_holds().unwrap());
    assert!(tb.swap_condition().unwrap());

    let mut all: Vec<Word> = sb.clone();
    all.extend(sc.iter().map(|x| g.lift(Side::C, x)));
    let found = products(g.as_ref(), &all, 5);
    for x in found.values() {
        assert!(ta.member(x).unwrap().is_some(), "{x:?}");
        assert!(tb.member(x).unwrap().is_some(), "{x:?}");
    }
    let w = |s: &str| over("abcd", s);
    for (q, want) in [("", true), ("A", false), ("aBcdA", false), ("acbDca", true), ("C", false), ("BdB", true)] {
        assert_eq!(ta.member(&w(q)).unwrap().is_some(), want, "{q}");
        assert_eq!(tb.member(&w(q)).unwrap().is_some(), want, "{q}");
    }
}

#[test]
fn theorem_b_witness_multiplies_out() {
    let g = Arc::new(Amalgam::free(2, 2, &words("ab", &["abAB"]), &words("cd", &["dcDC"])).unwrap());
    let sb = words("ab", &["ab", "AB"]);
    let sc = words("cd", &["dc", "DC"]);
    let (_, tb) = thm_a_b(&g, &sb, &sc);
    assert!(tb.swap_condition().unwrap());
    let mut all: Vec<Word> = sb.clone();
    all.extend(sc.iter().map(|x| g.lift(Side::C, x)));
    for q in ["abAB", "abABdc", "abdcAB", "DCab", ""] {
        let x = over("abcd", q);
        let toks = tb.member(&x).unwrap().unwrap_or_else(|| panic!("{q}"));
        let prod = Word::product(toks.iter().map(|&t| &all[t as usize]));
        assert!(g.equal(&prod, &x).unwrap(), "{q}");
    }
    assert!(tb.member(&over("abcd", "a")).unwrap().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn theorems_a_and_b_agree(q in word_strategy(4, 6)) {
        let g = b_is_d();
        let (ta, tb) = thm_a_b(&g, &words("ab", &["a", "b", "B"]), &words("cd", &["c", "d", "D"]));
        prop_assert_eq!(ta.member(&q).unwrap().is_some(), tb.member(&q).unwrap().is_some());
    }

    #[test]
    fn reduce_form_preserves_the_element(q in word_strategy(4, 10)) {
        let g = Amalgam::free(2, 2, &words("ab", &["abAB"]), &words("cd", &["dcDC"])).unwrap();
        let s = g.reduce_form(&q).unwrap();
        prop_assert!(g.equal(&g.join(&s), &q).unwrap());
        if s.len() > 1 {
            for x in &s {
                prop_assert!(g.across(x.side, &x.word).unwrap().is_none());
            }
        }
    }
}

// BS(2,3): t⁻¹a²t = a³, over a t
fn bs23() -> Arc<Hnn> {
    Arc::new(Hnn::free(1, &words("a", &["aa"]), &words("a", &["aaa"])).unwrap())
}

fn at(s: &str) -> Word {
    over("at", s)
}

#[test]
fn britton_examples() {
    let g = bs23();
    let f = g.britton(&at("Taat")).unwrap();
    assert!(f.signs.is_empty());
    assert_eq!(f.syllables, [at("aaa")]);
    let f = g.britton(&at("taaaT")).unwrap();
    assert_eq!(f.syllables, [at("aa")]);
    let f = g.britton(&at("Tat")).unwrap();
    assert_eq!(f.signs, [-1, 1]);
    assert_eq!(g.join(&f), at("Tat"));
}

/// x ↦ m·x + q with m, q rational: a ↦ x + 1, t ↦ (2/3)·x, a quotient of BS(2,3).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Affine {
    m: (i128, i128),
    q: (i128, i128),
}

fn frac(n: i128, d: i128) -> (i128, i128) {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    let g = gcd(n, d).max(1) * d.signum();
    (n / g, d / g)
}

fn mul(x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
    frac(x.0 * y.0, x.1 * y.1)
}

fn add(x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
    frac(x.0 * y.1 + y.0 * x.1, x.1 * y.1)
}

fn affine(w: &Word) -> Affine {
    let mut acc = Affine { m: (1, 1), q: (0, 1) };
    for l in w.iter() {
        let e = match (l.gen(), l.is_inverse()) {
            (0, false) => Affine { m: (1, 1), q: (1, 1) },
            (0, true) => Affine { m: (1, 1), q: (-1, 1) },
            (_, false) => Affine { m: (2, 3), q: (0, 1) },
            (_, true) => Affine { m: (3, 2), q: (0, 1) },
        };
        // matrix product acc·e
        acc = Affine {
            m: mul(acc.m, e.m),
            q: add(mul(acc.m, e.q), acc.q),
        };
    }
    acc
}

#[test]
fn affine_model_satisfies_the_relation() {
    assert_eq!(affine(&at("Taat")), affine(&at("aaa")));
}

proptest! {
    #[test]
    fn britton_form_is_reduced_and_equal(q in word_strategy(2, 14)) {
        let g = bs23();
        let f = g.britton(&q).unwrap();
        prop_assert_eq!(affine(&g.join(&f)), affine(&q));
        prop_assert_eq!(f.signs.iter().map(|&e| e as i64).sum::<i64>(), q.exponent_sum(1));
        for i in 1..f.signs.len() {
            let s = &f.syllables[i];
            if f.signs[i - 1] < 0 && f.signs[i] > 0 {
                prop_assert!(g.phi(s).unwrap().is_none());
            }
            if f.signs[i - 1] > 0 && f.signs[i] < 0 {
                prop_assert!(g.phi_inv(s).unwrap().is_none());
            }
        }
    }
}

#[test]
fn theorem_c_examples() {
    let g = bs23();
    let t = Arc::new(FreeSubmonoid::new(1, words("a", &["a", "A"]), vec![0, 1]));
    let c = HnnThmC::new(g, t, 2, 3);
    assert!(c.hypothesis_holds().unwrap());
    assert!(c.member(&at("tT")).unwrap().is_some());
    assert!(c.member(&at("Tata")).unwrap().is_some());

    // base FG(a,b), t commuting with a; T = Mon⟨a, a⁻¹⟩ misses b
    let g = Arc::new(Hnn::free(2, &words("ab", &["a"]), &words("ab", &["a"])).unwrap());
    let t = Arc::new(FreeSubmonoid::new(2, words("ab", &["a", "A"]), vec![0, 1]));
    let c = HnnThmC::new(g, t, 2, 3);
    assert!(c.hypothesis_holds().unwrap());
    let w = |s: &str| over("abt", s);
    assert!(c.member(&w("b")).unwrap().is_none());
    assert!(c.member(&w("taT")).unwrap().is_some());
    assert!(c.member(&w("tbT")).unwrap().is_none());
}

fn gen(shape: Shape, s: &str) -> HnnGen {
    HnnGen {
        shape,
        word: over("a", s),
    }
}

/// C₀ = 1, C_m = Σ_{μ=1}^{min(d,m)} 2·C_{m−μ}.
fn count(d: usize, m: usize) -> u64 {
    if m == 0 {
        return 1;
    }
    (1..=d.min(m)).map(|mu| 2 * count(d, m - mu)).sum()
}

#[test]
fn nset_counts() {
    let g = Arc::new(Hnn::free(1, &[], &[]).unwrap());
    let one = ThmD::new(g.clone(), vec![gen(Shape::Base, "a"), gen(Shape::Right(1), "a"), gen(Shape::Left(1), "A")]).unwrap();
    assert_eq!(one.depth(), 1);
    assert_eq!(one.build_nsets(0).unwrap().count, 1);
    assert_eq!(one.build_nsets(1).unwrap().count, 2);
    let two = ThmD::new(g, vec![gen(Shape::Base, "a"), gen(Shape::Right(2), "a"), gen(Shape::Left(1), "a")]).unwrap();
    assert_eq!(two.build_nsets(3).unwrap().count, 16);
    for m in 0..=6 {
        assert_eq!(one.build_nsets(m).unwrap().count, count(1, m));
        assert_eq!(two.build_nsets(m).unwrap().count, count(2, m));
    }
    assert_eq!([count(2, 1), count(2, 2), count(2, 3)], [2, 6, 16]);
}

#[test]
fn theorem_d_examples() {
    let g = bs23();
    let d = ThmD::new(g.clone(), vec![gen(Shape::Base, "a"), gen(Shape::Right(1), "a")]).unwrap();
    assert!(d.member(&at("")).unwrap().is_some());
    assert!(d.member(&at("T")).unwrap().is_none());
    assert!(d.member(&at("aTa")).unwrap().is_none());
    let toks = d.member(&at("atata")).unwrap().unwrap();
    let gens: Vec<Word> = d.gens().iter().map(|x| x.full(1)).collect();
    let prod = Word::product(toks.iter().map(|&i| &gens[i as usize]));
    assert!(g.equal(&prod, &at("atata")).unwrap());
    assert!(d.member(&at("ta")).unwrap().is_none());
}

#[test]
fn negative_generators_go_through_inversion() {
    let g = bs23();
    let s = HnnSubmonoid::new(g.clone(), &words("at", &["Ta", "a"]), vec![7, 8]).unwrap();
    assert!(s.inverted());
    assert_eq!(s.member(&at("TaTa")).unwrap(), Some(vec![7, 7]));
    assert!(s.member(&at("t")).unwrap().is_none());
    assert!(s.member(&at("")).unwrap().is_some());
    assert!(HnnSubmonoid::new(g.clone(), &words("at", &["ta", "Ta"]), vec![0, 1]).is_err());
    assert!(HnnSubmonoid::new(g, &words("at", &["tat"]), vec![0]).is_err());
}

#[test]
fn theorem_d_matches_bounded_products() {
    let g = bs23();
    let gens = words("at", &["a", "ta", "aat"]);
    let s = HnnSubmonoid::new(g.clone(), &gens, vec![0, 1, 2]).unwrap();
    for x in products(g.as_ref(), &gens, 5).values() {
        let toks = s.member(x).unwrap().unwrap_or_else(|| panic!("{x:?}"));
        let prod = Word::product(toks.iter().map(|&i| &gens[i as usize]));
        assert!(g.equal(&prod, x).unwrap());
    }
}
