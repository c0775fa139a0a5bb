//! Corpus manifests: presentation files, queries and expected answers.
//!
//! One entry per line, `<command> <file> <word> <expected> [origin]`, with paths
//! relative to the manifest. Commands are `prefix-member`, `right-invertible` and
//! `classify`; for `classify` the word column is `-` and the expectation a class name.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::thread;

use onerel_core::chain::DEFAULT_CAP;
use onerel_core::prefix::{self, Presentation};

use crate::format::{parse_presentation, FormatError};
use crate::query;
use crate::report::Answer;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    PrefixMember,
    RightInvertible,
    Classify,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub command: Command,
    pub file: PathBuf,
    pub word: String,
    pub expected: String,
    pub origin: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub entry: Entry,
    pub got: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub rows: Vec<Row>,
}

impl Summary {
    pub fn passed(&self) -> usize {
        self.rows.iter().filter(|r| r.pass).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let e = &r.entry;
            let cmd = match e.command {
                Command::PrefixMember => "prefix-member",
                Command::RightInvertible => "right-invertible",
                Command::Classify => "classify",
            };
            writeln!(
                f,
                "{} line {:>3}  {:<16} {:<24} {:<18} expected {:<12} got {}",
                if r.pass { "pass" } else { "FAIL" },
                e.line,
                cmd,
                e.file.display(),
                e.word,
                e.expected,
                r.got
            )?;
        }
        write!(f, "{}/{} passed", self.passed(), self.rows.len())
    }
}

pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<Entry>, FormatError> {
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let line = i + 1;
        let l = l.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 4 || toks.len() > 5 {
            return Err(FormatError {
                line,
                msg: "expected `<command> <file> <word> <expected> [origin]`".into(),
            });
        }
        let command = match toks[0] {
            "prefix-member" => Command::PrefixMember,
            "right-invertible" => Command::RightInvertible,
            "classify" => Command::Classify,
            c => {
                return Err(FormatError {
                    line,
                    msg: format!("unknown command `{c}`"),
                })
            }
        };
        if command != Command::Classify && Answer::parse(toks[3]).is_none() {
            return Err(FormatError {
                line,
                msg: format!("unknown answer `{}`", toks[3]),
            });
        }
        out.push(Entry {
            line,
            command,
            file: base.join(toks[1]),
            word: toks[2].into(),
            expected: toks[3].into(),
            origin: toks.get(4).map(|s| s.to_string()),
        });
    }
    Ok(out)
}

fn run_file(file: &Path, entries: Vec<Entry>, cap: usize) -> Vec<Row> {
    let pres: Result<Presentation, String> = std::fs::read_to_string(file)
        .map_err(|e| format!("cannot read: {e}"))
        .and_then(|t| parse_presentation(&t).map_err(|e| e.to_string()));
    let pres = match pres {
        Ok(p) => p,
        Err(msg) => {
            return entries
                .into_iter()
                .map(|entry| Row {
                    entry,
                    got: msg.clone(),
                    pass: false,
                })
                .collect()
        }
    };
    let mut solver = None;
    let mut tags = None;
    entries
        .into_iter()
        .map(|entry| {
            let got = match entry.command {
                Command::Classify => {
                    let names = tags.get_or_insert_with(|| {
                        prefix::classify(&pres, None)
                            .iter()
                            .map(|t| t.name().to_string())
                            .collect::<Vec<_>>()
                    });
                    if names.contains(&entry.expected) {
                        entry.expected.clone()
                    } else {
                        names.join(",")
                    }
                }
                Command::PrefixMember | Command::RightInvertible => {
                    let s = solver.get_or_insert_with(|| query::solver_for(&pres, None, None, cap));
                    match pres.alphabet.parse_word(&entry.word) {
                        Err(e) => format!("bad word: {e}"),
                        Ok(q) => {
                            let r = if entry.command == Command::PrefixMember {
                                query::prefix_member(&pres, s, &q)
                            } else {
                                query::right_invertible(&pres, s, &q)
                            };
                            match r {
                                Ok(r) => r.answer.as_str().to_string(),
                                Err(e) => format!("error: {e}"),
                            }
                        }
                    }
                }
            };
            Row {
                pass: got == entry.expected,
                entry,
                got,
            }
        })
        .collect()
}

/// Runs every entry; files are handled in parallel, entries of one file in order.
pub fn run_entries(entries: Vec<Entry>, cap: usize) -> Summary {
    let mut by_file: BTreeMap<PathBuf, Vec<Entry>> = BTreeMap::new();
    for e in entries {
        by_file.entry(e.file.clone()).or_default().push(e);
    }
    let mut rows: Vec<Row> = thread::scope(|s| {
        let handles: Vec<_> = by_file
            .into_iter()
            .map(|(f, es)| s.spawn(move || run_file(&f, es, cap)))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("corpus worker panicked"))
            .collect()
    });
    rows.sort_by_key(|r| r.entry.line);
    Summary { rows }
}

pub fn run_corpus(manifest: &Path) -> Result<Summary, String> {
    run_corpus_with_cap(manifest, DEFAULT_CAP)
}

pub fn run_corpus_with_cap(manifest: &Path, cap: usize) -> Result<Summary, String> {
    let text = std::fs::read_to_string(manifest).map_err(|e| format!("{}: {e}", manifest.display()))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let entries = parse_manifest(&text, base).map_err(|e| format!("{}: {e}", manifest.display()))?;
    Ok(run_entries(entries, cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_manifest() {
        let s = run_entries(parse_manifest("# nothing\n\n", Path::new(".")).unwrap(), DEFAULT_CAP);
        assert!(s.rows.is_empty());
        assert!(s.ok());
    }

    #[test]
    fn manifest_syntax_errors() {
        let e = parse_manifest("prefix-member a.pres a\n", Path::new(".")).unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_manifest("\nfrobnicate a.pres a yes\n", Path::new(".")).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_manifest("prefix-member a.pres a maybe\n", Path::new(".")).is_err());
    }
}
