//! Named generators and the textual word syntax.
//!
//! A lowercase ASCII letter is a generator, the same letter in uppercase its
//! inverse. Subscripted generators are written `a{-2}` (inverse `A{-2}`).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::word::{Letter, RhoImage, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub base: char,
    pub sub: Option<i64>,
}

impl Symbol {
    pub fn plain(base: char) -> Self {
        Symbol { base, sub: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
}

impl Alphabet {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Precondition("empty alphabet".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if !s.base.is_ascii_lowercase() {
                return Err(Error::Precondition(format!(
                    "generator `{}` is not a lowercase ASCII letter",
                    s.base
                )));
            }
            if symbols[..i].contains(s) {
                return Err(Error::Precondition(format!(
                    "duplicate generator `{}`",
                    display_symbol(s, false)
                )));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// Alphabet from a string of distinct lowercase letters, e.g. `"abcd"`.
    pub fn from_letters(s: &str) -> Result<Self> {
        Self::new(s.chars().filter(|c| !c.is_whitespace()).map(Symbol::plain).collect())
    }

    /// The first `n` letters of a..z.
    pub fn standard(n: usize) -> Self {
        assert!(n <= 26);
        Alphabet {
            symbols: (0..n).map(|i| Symbol::plain((b'a' + i as u8) as char)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, g: usize) -> Symbol {
        self.symbols[g]
    }

    pub fn index_of(&self, s: Symbol) -> Option<usize> {
        self.symbols.iter().position(|x| *x == s)
    }

    pub fn index_of_char(&self, c: char) -> Option<usize> {
        self.index_of(Symbol::plain(c))
    }

    /// Subscripted alphabet Ξ_w of a ρ_t image.
    pub fn for_rho(&self, r: &RhoImage) -> Alphabet {
        Alphabet {
            symbols: r
                .symbols
                .iter()
                .map(|&(g, l)| Symbol {
                    base: self.symbols[g].base,
                    sub: Some(l),
                })
                .collect(),
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '.' || c == '·' {
                i += 1;
                continue;
            }
            if c == '1' || c == 'ε' {
                i += 1;
                continue;
            }
            if !c.is_ascii_alphabetic() {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                });
            }
            let inverse = c.is_ascii_uppercase();
            let base = c.to_ascii_lowercase();
            let mut sub = None;
            let start = i;
            i += 1;
            if i < chars.len() && chars[i] == '{' {
                let close = chars[i..]
                    .iter()
                    .position(|&x| x == '}')
                    .ok_or(Error::Parse {
                        pos: i,
                        msg: "unterminated subscript".into(),
                    })?;
                let num: String = chars[i + 1..i + close].iter().collect();
                let v: i64 = num.trim().parse().map_err(|_| Error::Parse {
                    pos: i,
                    msg: format!("bad subscript `{num}`"),
                })?;
                sub = Some(v);
                i += close + 1;
            }
            let sym = Symbol { base, sub };
            let g = self.index_of(sym).ok_or_else(|| Error::Parse {
                pos: start,
                msg: format!("letter `{}` is not in the alphabet", display_symbol(&sym, false)),
            })?;
            out.push(Letter::new(g, inverse));
        }
        Ok(Word::from(out))
    }

    pub fn format_letter(&self, l: Letter) -> String {
        display_symbol(&self.symbols[l.gen()], l.is_inverse())
    }

    pub fn format(&self, w: &Word) -> String {
        let mut s = String::new();
        for &l in w.letters() {
            s.push_str(&self.format_letter(l));
        }
        s
    }

    /// Like `format` but prints `1` for the empty word.
    pub fn format_or_one(&self, w: &Word) -> String {
        if w.is_empty() {
            "1".into()
        } else {
            self.format(w)
        }
    }
}

fn display_symbol(s: &Symbol, inverse: bool) -> String {
    let mut out = String::new();
    out.push(if inverse {
        s.base.to_ascii_uppercase()
    } else {
        s.base
    });
    if let Some(l) = s.sub {
        let _ = write!(out, "{{{l}}}");
    }
    out
}
