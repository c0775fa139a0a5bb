//! Text formats: presentations, amalgam and HNN specs, generator lists, automata.
//!
//! All formats are line based. `#` starts a comment, blank lines are ignored and
//! every error carries the 1-based line it was found on.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use onerel_core::prefix::{Flavor, Presentation};
use onerel_core::{Alphabet, Fsa, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for FormatError {}

pub type Parsed<T> = Result<T, FormatError>;

fn err<T>(line: usize, msg: impl Into<String>) -> Parsed<T> {
    Err(FormatError { line, msg: msg.into() })
}

/// Non-blank lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn key_value(line: usize, l: &str) -> Parsed<(&str, &str)> {
    match l.split_once(':') {
        Some((k, v)) => Ok((k.trim(), v.trim())),
        None => err(line, format!("expected `key: value`, found `{l}`")),
    }
}

/// Distinct lowercase letters separated by whitespace.
pub fn parse_gens(line: usize, v: &str) -> Parsed<Alphabet> {
    let mut seen = BTreeSet::new();
    let mut letters = String::new();
    for tok in v.split_whitespace() {
        let mut cs = tok.chars();
        let (Some(c), None) = (cs.next(), cs.next()) else {
            return err(line, format!("generator `{tok}` is not a single letter"));
        };
        if c.is_ascii_uppercase() {
            return err(line, format!("generator `{c}` is uppercase; uppercase letters denote inverses"));
        }
        if !c.is_ascii_lowercase() {
            return err(line, format!("generator `{c}` is not a lowercase ASCII letter"));
        }
        if !seen.insert(c) {
            return err(line, format!("generator `{c}` listed twice"));
        }
        letters.push(c);
    }
    if letters.is_empty() {
        return err(line, "empty generator list");
    }
    Alphabet::from_letters(&letters).or_else(|e| err(line, e.to_string()))
}

pub fn parse_word_at(line: usize, alphabet: &Alphabet, v: &str) -> Parsed<Word> {
    alphabet.parse_word(v).or_else(|e| err(line, e.to_string()))
}

/// ```text
/// kind: inverse-monoid
/// gens: a b c d
/// rel: abcdacdadabbcdacd
/// ```
/// `kind` defaults to `group`.
pub fn parse_presentation(text: &str) -> Parsed<Presentation> {
    let mut flavor = None;
    let mut gens: Option<Alphabet> = None;
    let mut rel: Option<(usize, &str)> = None;
    let mut last = 0;
    for (n, l) in lines(text) {
        last = n;
        let (k, v) = key_value(n, l)?;
        match k {
            "kind" => {
                if flavor.is_some() {
                    return err(n, "duplicate `kind`");
                }
                flavor = Some(match v {
                    "group" => Flavor::Group,
                    "inverse-monoid" => Flavor::InverseMonoid,
                    _ => return err(n, format!("unknown kind `{v}`; expected group or inverse-monoid")),
                });
            }
            "gens" => {
                if gens.is_some() {
                    return err(n, "duplicate `gens`");
                }
                gens = Some(parse_gens(n, v)?);
            }
            "rel" => {
                if rel.is_some() {
                    return err(n, "only one relator is supported");
                }
                rel = Some((n, v));
            }
            _ => return err(n, format!("unknown key `{k}`")),
        }
    }
    let Some(alphabet) = gens else {
        return err(last, "missing `gens`");
    };
    let Some((rn, rv)) = rel else {
        return err(last, "missing `rel`");
    };
    let relator = parse_word_at(rn, &alphabet, rv)?;
    Presentation::new(alphabet, relator, flavor.unwrap_or(Flavor::Group)).or_else(|e| err(rn, e.to_string()))
}

/// An amalgam of two free groups over paired subgroup generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamSpec {
    /// Letters of B, then letters of C.
    pub alphabet: Alphabet,
    pub rb: usize,
    pub rc: usize,
    /// Over B's own letters.
    pub alphas: Vec<Word>,
    /// Over C's own letters.
    pub betas: Vec<Word>,
}

fn parse_free(n: usize, v: &str) -> Parsed<Alphabet> {
    match v.split_once(char::is_whitespace) {
        Some(("free", rest)) => parse_gens(n, rest),
        _ if v == "free" => err(n, "empty generator list"),
        _ => err(n, format!("unsupported factor `{v}`; expected `free <letters>`")),
    }
}

fn concat_alphabets(n: usize, x: &Alphabet, y: &Alphabet) -> Parsed<Alphabet> {
    let mut s: Vec<_> = x.symbols().to_vec();
    for sym in y.symbols() {
        if s.contains(sym) {
            return err(n, format!("letter `{}` is used twice", sym.base));
        }
        s.push(*sym);
    }
    Alphabet::new(s).or_else(|e| err(n, e.to_string()))
}

/// ```text
/// factorB: free a b
/// factorC: free c d
/// amalgam: ab = cd
/// ```
pub fn parse_amalgam(text: &str) -> Parsed<AmalgamSpec> {
    let mut b: Option<Alphabet> = None;
    let mut c: Option<(usize, Alphabet)> = None;
    let mut pairs: Vec<(usize, &str)> = Vec::new();
    let mut last = 0;
    for (n, l) in lines(text) {
        last = n;
        let (k, v) = key_value(n, l)?;
        match k {
            "factorB" if b.is_none() => b = Some(parse_free(n, v)?),
            "factorC" if c.is_none() => c = Some((n, parse_free(n, v)?)),
            "factorB" | "factorC" => return err(n, format!("duplicate `{k}`")),
            "amalgam" => pairs.push((n, v)),
            _ => return err(n, format!("unknown key `{k}`")),
        }
    }
    let Some(b) = b else { return err(last, "missing `factorB`") };
    let Some((cn, c)) = c else { return err(last, "missing `factorC`") };
    let alphabet = concat_alphabets(cn, &b, &c)?;
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    for (n, v) in pairs {
        let Some((x, y)) = v.split_once('=') else {
            return err(n, "expected `alpha = beta`");
        };
        alphas.push(parse_word_at(n, &b, x)?);
        betas.push(parse_word_at(n, &c, y)?);
    }
    Ok(AmalgamSpec {
        alphabet,
        rb: b.len(),
        rc: c.len(),
        alphas,
        betas,
    })
}

/// An HNN extension of a free group, `t⁻¹ u_i t = v_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnnSpec {
    /// Base letters, then the stable letter.
    pub alphabet: Alphabet,
    pub base_rank: usize,
    pub u: Vec<Word>,
    pub v: Vec<Word>,
}

/// ```text
/// base: free a
/// stable: t
/// assoc: a = a
/// ```
pub fn parse_hnn(text: &str) -> Parsed<HnnSpec> {
    let mut base: Option<Alphabet> = None;
    let mut stable: Option<(usize, Alphabet)> = None;
    let mut pairs: Vec<(usize, &str)> = Vec::new();
    let mut last = 0;
    for (n, l) in lines(text) {
        last = n;
        let (k, v) = key_value(n, l)?;
        match k {
            "base" if base.is_none() => base = Some(parse_free(n, v)?),
            "stable" if stable.is_none() => {
                let a = parse_gens(n, v)?;
                if a.len() != 1 {
                    return err(n, "exactly one stable letter expected");
                }
                stable = Some((n, a));
            }
            "base" | "stable" => return err(n, format!("duplicate `{k}`")),
            "assoc" => pairs.push((n, v)),
            _ => return err(n, format!("unknown key `{k}`")),
        }
    }
    let Some(base) = base else { return err(last, "missing `base`") };
    let Some((sn, t)) = stable else { return err(last, "missing `stable`") };
    if base.index_of(t.symbol(0)).is_some() {
        return err(sn, format!("stable letter `{}` clashes with a base letter", t.symbol(0).base));
    }
    let alphabet = concat_alphabets(sn, &base, &t)?;
    let mut u = Vec::new();
    let mut v = Vec::new();
    for (n, p) in pairs {
        let Some((x, y)) = p.split_once('=') else {
            return err(n, "expected `u = v`");
        };
        u.push(parse_word_at(n, &base, x)?);
        v.push(parse_word_at(n, &base, y)?);
    }
    Ok(HnnSpec {
        base_rank: base.len(),
        alphabet,
        u,
        v,
    })
}

/// Whitespace-separated words; `1` is the empty word.
pub fn parse_word_list(text: &str, alphabet: &Alphabet) -> Parsed<Vec<Word>> {
    let mut out = Vec::new();
    for (n, l) in lines(text) {
        for tok in l.split_whitespace() {
            out.push(parse_word_at(n, alphabet, tok)?);
        }
    }
    Ok(out)
}

fn letter_text(alphabet: &Alphabet, l: Option<Letter>) -> String {
    match l {
        Some(l) => alphabet.format_letter(l),
        None => "-".into(),
    }
}

/// ```text
/// fsa states=3 alphabet=ab
/// init: 0
/// final: 2
/// 0 a 1
/// 1 - 2 #4
/// ```
/// One transition per line in stored order; `-` is the empty label, uppercase an
/// inverse letter, `#n` a tag.
pub fn format_fsa(a: &Fsa, alphabet: &Alphabet) -> String {
    let letters: String = alphabet.symbols().iter().map(|s| s.base).collect();
    let join = |s: &BTreeSet<usize>| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = format!("fsa states={} alphabet={}\n", a.states(), letters);
    let _ = writeln!(out, "init: {}", join(a.initial()));
    let _ = writeln!(out, "final: {}", join(a.finals()));
    for t in a.transitions() {
        let _ = write!(out, "{} {} {}", t.from, letter_text(alphabet, t.label), t.to);
        if let Some(tag) = t.tag {
            let _ = write!(out, " #{tag}");
        }
        out.push('\n');
    }
    out
}

fn parse_states(n: usize, v: &str, states: usize) -> Parsed<Vec<usize>> {
    v.split_whitespace()
        .map(|x| match x.parse::<usize>() {
            Ok(s) if s < states => Ok(s),
            Ok(s) => err(n, format!("state {s} out of range")),
            Err(_) => err(n, format!("bad state `{x}`")),
        })
        .collect()
}

/// Inverse of [`format_fsa`]. Tags are written after the target, so `#` is not a
/// comment marker inside this format.
pub fn parse_fsa(text: &str) -> Parsed<(Fsa, Alphabet)> {
    let mut it = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with("//"));
    let Some((hn, header)) = it.next() else {
        return err(1, "empty automaton file");
    };
    let mut states = None;
    let mut alphabet = None;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("fsa") {
        return err(hn, "expected header `fsa states=N alphabet=...`");
    }
    for p in parts {
        match p.split_once('=') {
            Some(("states", v)) => {
                states = Some(v.parse::<usize>().or_else(|_| err(hn, format!("bad state count `{v}`")))?)
            }
            Some(("alphabet", v)) => {
                let spaced: Vec<String> = v.chars().map(String::from).collect();
                alphabet = Some(parse_gens(hn, &spaced.join(" "))?);
            }
            _ => return err(hn, format!("unknown header field `{p}`")),
        }
    }
    let (Some(states), Some(alphabet)) = (states, alphabet) else {
        return err(hn, "header needs `states=` and `alphabet=`");
    };
    let mut a = Fsa::new(alphabet.len());
    a.add_states(states);
    let mut seen_init = false;
    let mut seen_final = false;
    for (n, l) in it {
        if let Some(v) = l.strip_prefix("init:") {
            if seen_init {
                return err(n, "duplicate `init`");
            }
            seen_init = true;
            for s in parse_states(n, v, states)? {
                a.set_initial(s);
            }
            continue;
        }
        if let Some(v) = l.strip_prefix("final:") {
            if seen_final {
                return err(n, "duplicate `final`");
            }
            seen_final = true;
            for s in parse_states(n, v, states)? {
                a.set_final(s);
            }
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        let (from, label, to, tag) = match toks.as_slice() {
            [f, x, t] => (f, x, t, None),
            [f, x, t, g] => (f, x, t, Some(g)),
            _ => return err(n, format!("expected `from label to [#tag]`, found `{l}`")),
        };
        let from = parse_states(n, from, states)?[0];
        let to = parse_states(n, to, states)?[0];
        let label = if *label == "-" {
            None
        } else {
            let w = parse_word_at(n, &alphabet, label)?;
            if w.len() != 1 {
                return err(n, format!("label `{label}` is not a single letter"));
            }
            Some(w[0])
        };
        let tag = match tag {
            None => None,
            Some(g) => match g.strip_prefix('#').and_then(|x| x.parse::<u32>().ok()) {
                Some(x) => Some(x),
                None => return err(n, format!("bad tag `{g}`")),
            },
        };
        a.add_tagged(from, label, to, tag);
    }
    if !seen_init {
        return err(hn, "missing `init:` line");
    }
    Ok((a, alphabet))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presentation_minimal() {
        let p = parse_presentation("gens: a b\nrel: aba\n").unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.relator.len(), 3);
        assert_eq!(p.flavor, Flavor::Group);
    }

    #[test]
    fn presentation_kind_and_comments() {
        let p = parse_presentation("# O'Hare\nkind: inverse-monoid\ngens: a b c d  # four\nrel: abcd\n").unwrap();
        assert_eq!(p.flavor, Flavor::InverseMonoid);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let e = parse_presentation("gens: a b\n\nthis is wrong\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn uppercase_generator_is_rejected() {
        let e = parse_presentation("gens: a B\nrel: aB\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.msg.contains("uppercase"));
    }

    #[test]
    fn unknown_relator_letter() {
        let e = parse_presentation("gens: a b\nrel: abc\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn missing_relator() {
        assert!(parse_presentation("gens: a b\n").is_err());
    }

    #[test]
    fn amalgam_spec() {
        let s = parse_amalgam("factorB: free a b\nfactorC: free c d\namalgam: abAB = dcDC\n").unwrap();
        assert_eq!((s.rb, s.rc), (2, 2));
        assert_eq!(s.alphas.len(), 1);
        assert_eq!(s.betas[0][0].gen(), 1);
    }

    #[test]
    fn amalgam_shared_letter_is_rejected() {
        let e = parse_amalgam("factorB: free a b\nfactorC: free b c\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn hnn_spec() {
        let s = parse_hnn("base: free a\nstable: t\nassoc: aa = aaa\n").unwrap();
        assert_eq!(s.base_rank, 1);
        assert_eq!(s.alphabet.len(), 2);
        assert_eq!(s.v[0].len(), 3);
    }

    #[test]
    fn hnn_stable_clash() {
        let e = parse_hnn("base: free a t\nstable: t\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.msg.contains("clashes"));
    }

    #[test]
    fn fsa_text_round_trip() {
        let text = "fsa states=3 alphabet=ab\ninit: 0\nfinal: 0 2\n0 a 1\n1 B 2 #7\n2 - 0\n1 b 1\n";
        let (a, al) = parse_fsa(text).unwrap();
        assert_eq!(format_fsa(&a, &al), text);
        let (b, _) = parse_fsa(&format_fsa(&a, &al)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fsa_bad_state() {
        let e = parse_fsa("fsa states=2 alphabet=a\ninit: 0\nfinal: 1\n0 a 5\n").unwrap_err();
        assert_eq!(e.line, 4);
    }
}
