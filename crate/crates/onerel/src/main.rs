use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use onerel::format::{self, parse_amalgam, parse_hnn, parse_presentation, parse_word_list};
use onerel::oracle::{self, OracleAnswer};
use onerel::query::{self, Algo};
use onerel::report::{Answer, QueryReport, Witness};
use onerel::corpus;
use onerel_core::chain::DEFAULT_CAP;
use onerel_core::factorise::adjan_overlap;
use onerel_core::munn::munn_tree;
use onerel_core::prefix::Presentation;
use onerel_core::{benois_reduce, Alphabet, Error, Word};

const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;

#[derive(Parser)]
#[command(name = "onerel", version, about = "Prefix membership and right invertibility for one-relator groups")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Longest product the oracle tries.
    #[arg(long, global = true, value_name = "N", default_value_t = 10)]
    max_len: usize,
    /// Bound on the states of automata built during one decision.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_CAP)]
    automaton_cap: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Query {
    /// Presentation file.
    file: PathBuf,
    /// Query word; uppercase letters are inverses, `1` is the empty word.
    word: String,
    /// Use this class instead of the first that applies.
    #[arg(long)]
    class: Option<String>,
    /// Factorisation used by the marker and disjoint classes.
    #[arg(long, default_value = "benois")]
    algo: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the classes that apply to a presentation.
    Classify {
        file: PathBuf,
        #[arg(long, default_value = "benois")]
        algo: String,
    },
    /// Factor a relator into invertible pieces.
    Pieces {
        word: String,
        #[arg(long, default_value = "benois")]
        algo: String,
    },
    /// The stabilised overlap set of one or more relators.
    Adjan {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Decide membership in the prefix monoid.
    PrefixMember(Query),
    /// Decide right invertibility in an inverse monoid presentation.
    RightInvertible(Query),
    /// Decide membership in a submonoid of an amalgam or HNN extension of free groups.
    SubmonoidMember {
        #[arg(long, conflicts_with = "hnn", required_unless_present = "hnn")]
        amalgam: Option<PathBuf>,
        #[arg(long)]
        hnn: Option<PathBuf>,
        /// File with the generating words.
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Equality in the free inverse monoid.
    MunnEq {
        u: String,
        v: String,
        /// Also print both Munn trees.
        #[arg(long)]
        trees: bool,
    },
    /// Search products of relator prefixes for the query.
    Oracle {
        file: PathBuf,
        word: String,
        /// Stop after storing this many distinct elements.
        #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Free reduction of a word, or Benois reduction of an automaton.
    Reduce {
        #[arg(long, conflicts_with = "fsa", required_unless_present = "fsa")]
        word: Option<String>,
        #[arg(long)]
        fsa: Option<PathBuf>,
    },
    /// Run a corpus manifest.
    Corpus { manifest: PathBuf },
}

enum Fail {
    Usage(String),
    Parse(String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

impl From<format::FormatError> for Fail {
    fn from(e: format::FormatError) -> Self {
        Fail::Parse(e.to_string())
    }
}

type Run = Result<u8, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn presentation(path: &Path) -> Result<Presentation, Fail> {
    parse_presentation(&read(path)?).map_err(|e| Fail::Parse(format!("{}: {e}", path.display())))
}

fn algo(s: &str) -> Result<Algo, Fail> {
    Algo::parse(s).ok_or_else(|| Fail::Usage(format!("unknown algorithm `{s}`; expected benois or adjan")))
}

/// The letters occurring in `words`, in alphabetical order.
fn inferred_alphabet(words: &[&str]) -> Result<Alphabet, Fail> {
    let mut cs: Vec<char> = words
        .iter()
        .flat_map(|w| w.chars())
        .filter(char::is_ascii_alphabetic)
        .map(|c| c.to_ascii_lowercase())
        .collect();
    cs.sort_unstable();
    cs.dedup();
    if cs.is_empty() {
        cs.push('a');
    }
    Ok(Alphabet::from_letters(&cs.iter().collect::<String>())?)
}

fn word(alphabet: &Alphabet, text: &str) -> Result<Word, Fail> {
    alphabet.parse_word(text).map_err(|e| Fail::Parse(format!("`{text}`: {e}")))
}

fn emit(cli: &Cli, r: &QueryReport) -> u8 {
    if cli.json {
        println!("{}", r.to_json());
    } else {
        print!("{}", r.to_text());
    }
    r.answer.exit_code() as u8
}

fn run(cli: &Cli) -> Run {
    match &cli.cmd {
        Cmd::Classify { file, algo: a } => {
            let p = presentation(file)?;
            let f = algo(a)?.factorise(&p.relator)?;
            let (tags, rejected) = query::classify_lines(&p, Some(&f));
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&json!({ "classes": tags, "rejected": rejected })).unwrap());
            } else if tags.is_empty() {
                println!("unsupported");
                for r in &rejected {
                    println!("  {r}");
                }
            } else {
                for t in &tags {
                    println!("{t}");
                }
            }
            Ok(if tags.is_empty() { 2 } else { 0 })
        }
        Cmd::Pieces { word: w, algo: a } => {
            let a = algo(a)?;
            let alphabet = inferred_alphabet(&[w])?;
            let w = word(&alphabet, w)?;
            let f = a.factorise(&w)?;
            if cli.json {
                println!("{}", query::pieces_json(&alphabet, &f, a));
            } else {
                println!("{}", query::format_pieces(&alphabet, &f));
            }
            Ok(0)
        }
        Cmd::Adjan { words } => {
            let texts: Vec<&str> = words.iter().map(String::as_str).collect();
            let alphabet = inferred_alphabet(&texts)?;
            let ws = texts.iter().map(|t| word(&alphabet, t)).collect::<Result<Vec<_>, _>>()?;
            let gamma: Vec<String> = adjan_overlap(&ws).iter().map(|g| alphabet.format(g)).collect();
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&json!({ "overlap": gamma })).unwrap());
            } else {
                for g in &gamma {
                    println!("{g}");
                }
            }
            Ok(0)
        }
        Cmd::PrefixMember(q) | Cmd::RightInvertible(q) => {
            let p = presentation(&q.file)?;
            let w = word(&p.alphabet, &q.word)?;
            let f = match algo(&q.algo)? {
                Algo::Benois => None,
                a => Some(a.factorise(&p.relator)?),
            };
            let solver = query::solver_for(&p, q.class.as_deref(), f.as_ref(), cli.automaton_cap);
            let r = if matches!(cli.cmd, Cmd::PrefixMember(_)) {
                query::prefix_member(&p, &solver, &w)?
            } else {
                query::right_invertible(&p, &solver, &w)?
            };
            Ok(emit(cli, &r))
        }
        Cmd::SubmonoidMember {
            amalgam,
            hnn,
            gens,
            word: w,
        } => {
            let gens_text = read(gens)?;
            let r = match (amalgam, hnn) {
                (Some(path), _) => {
                    let spec = parse_amalgam(&read(path)?)?;
                    let g = parse_word_list(&gens_text, &spec.alphabet)?;
                    let q = word(&spec.alphabet, w)?;
                    query::amalgam_member(&spec, &g, &q, cli.automaton_cap)?
                }
                (None, Some(path)) => {
                    let spec = parse_hnn(&read(path)?)?;
                    let g = parse_word_list(&gens_text, &spec.alphabet)?;
                    let q = word(&spec.alphabet, w)?;
                    query::hnn_member(&spec, &g, &q, cli.automaton_cap)?
                }
                (None, None) => return Err(Fail::Usage("one of --amalgam or --hnn is required".into())),
            };
            Ok(emit(cli, &r))
        }
        Cmd::MunnEq { u, v, trees } => {
            let alphabet = inferred_alphabet(&[u, v])?;
            let (u, v) = (word(&alphabet, u)?, word(&alphabet, v)?);
            let (tu, tv) = (munn_tree(&u), munn_tree(&v));
            let equal = tu == tv;
            let verts = |t: &onerel_core::munn::MunnTree| -> Vec<String> {
                t.vertices.iter().map(|x| alphabet.format_or_one(x)).collect()
            };
            if cli.json {
                let mut j = json!({ "answer": if equal { "equal" } else { "distinct" } });
                if *trees {
                    j["trees"] = json!([
                        { "vertices": verts(&tu), "endpoint": alphabet.format_or_one(&tu.endpoint) },
                        { "vertices": verts(&tv), "endpoint": alphabet.format_or_one(&tv.endpoint) },
                    ]);
                }
                println!("{}", serde_json::to_string_pretty(&j).unwrap());
            } else {
                println!("{}", if equal { "equal" } else { "distinct" });
                if *trees {
                    for t in [&tu, &tv] {
                        println!("{} -> {}", verts(t).join(" "), alphabet.format_or_one(&t.endpoint));
                    }
                }
            }
            Ok(if equal { 0 } else { 1 })
        }
        Cmd::Oracle { file, word: w, budget } => {
            let p = presentation(file)?;
            let q = word(&p.alphabet, w)?;
            let model = match query::oracle_model(&p, cli.automaton_cap) {
                Ok(m) => m,
                Err(e) => {
                    let mut r = QueryReport::new(p.alphabet.format_or_one(&q), Answer::Unsupported);
                    r.reason = Some(e.to_string());
                    return Ok(emit(cli, &r));
                }
            };
            let gens = query::prefixes(&p);
            let start = std::time::Instant::now();
            let found = oracle::oracle_member_with_budget(&gens, &*model, &q, cli.max_len, *budget)?;
            let mut r = QueryReport::new(p.alphabet.format_or_one(&q), Answer::No);
            r.method = Some(format!("product search over prefixes, up to {} factors", cli.max_len));
            match found {
                OracleAnswer::Found(seq) => {
                    r.answer = Answer::Yes;
                    r.witness = Some(Witness {
                        expression: query::expression(&p.alphabet, &gens, &seq),
                        factors: seq,
                    });
                }
                OracleAnswer::NotFound { depth, truncated } => {
                    r.reason = Some(if truncated {
                        format!("not found; search budget reached at {depth} factors")
                    } else {
                        format!("not found among products of at most {depth} factors")
                    });
                    if truncated {
                        r.answer = Answer::ResourceExceeded;
                    }
                }
            }
            r.elapsed = start.elapsed();
            Ok(emit(cli, &r))
        }
        Cmd::Reduce { word: w, fsa } => {
            if let Some(path) = fsa {
                let (a, alphabet) = format::parse_fsa(&read(path)?)?;
                let r = benois_reduce(&a);
                print!("{}", format::format_fsa(r.fsa(), &alphabet));
            } else if let Some(w) = w {
                let alphabet = inferred_alphabet(&[w])?;
                let x = word(&alphabet, w)?;
                println!("{}", alphabet.format_or_one(&x.free_reduce()));
            }
            Ok(0)
        }
        Cmd::Corpus { manifest } => {
            let s = corpus::run_corpus_with_cap(manifest, cli.automaton_cap).map_err(Fail::Usage)?;
            println!("{s}");
            Ok(if s.ok() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Fail::Parse(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_PARSE)
        }
        Err(Fail::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match Answer::from_error(&e) {
                Some(a) => a.exit_code() as u8,
                None => EXIT_PARSE,
            })
        }
    }
}
