//! Running queries and turning the outcome into a [`QueryReport`].

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use onerel_core::amalgam::{Amalgam, AmalgamThmA, AmalgamThmB};
use onerel_core::factorise::{adjan_factorisation, benois_pieces, Factorisation, UWord};
use onerel_core::group::{FreeSubmonoid, Group, Submonoid};
use onerel_core::hnn::{Hnn, HnnSubmonoid, HnnThmC};
use onerel_core::onerel::one_relator_group;
use onerel_core::prefix::{self, ClassTag, Presentation, Solver};
use onerel_core::{Alphabet, Error, Result, Word};

use crate::format::{AmalgamSpec, HnnSpec};
use crate::report::{Answer, QueryReport, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Benois,
    Adjan,
}

impl Algo {
    pub fn parse(s: &str) -> Option<Algo> {
        match s {
            "benois" => Some(Algo::Benois),
            "adjan" => Some(Algo::Adjan),
            _ => None,
        }
    }

    pub fn factorise(self, w: &Word) -> Result<Factorisation> {
        match self {
            Algo::Benois => benois_pieces(w),
            Algo::Adjan => Ok(adjan_factorisation(w)),
        }
    }
}

/// `(abcd)(acd)(ad)`.
pub fn format_pieces(alphabet: &Alphabet, f: &Factorisation) -> String {
    f.pieces()
        .iter()
        .map(|p| format!("({})", alphabet.format(p)))
        .collect()
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
enum CertFactor {
    Prefix(usize),
    InversePrefix(usize),
}

#[derive(Serialize)]
struct CertReport {
    cut: usize,
    factors: Vec<CertFactor>,
}

#[derive(Serialize)]
struct PiecesReport {
    word: String,
    algo: &'static str,
    pieces: Vec<String>,
    cuts: Vec<usize>,
    certificates: Vec<CertReport>,
}

pub fn pieces_json(alphabet: &Alphabet, f: &Factorisation, algo: Algo) -> String {
    let r = PiecesReport {
        word: alphabet.format(&f.relator),
        algo: match algo {
            Algo::Benois => "benois",
            Algo::Adjan => "adjan",
        },
        pieces: f.pieces().iter().map(|p| alphabet.format(p)).collect(),
        cuts: f.cuts.clone(),
        certificates: f
            .certificates
            .iter()
            .map(|c| CertReport {
                cut: c.cut,
                factors: c
                    .factors
                    .iter()
                    .map(|u| match *u {
                        UWord::Prefix(k) => CertFactor::Prefix(k),
                        UWord::InversePrefix(k) => CertFactor::InversePrefix(k),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&r).expect("report serializes")
}

/// The product written out factor by factor, `1` when empty.
pub fn expression(alphabet: &Alphabet, gens: &[Word], seq: &[usize]) -> String {
    if seq.is_empty() {
        return "1".into();
    }
    seq.iter()
        .map(|&i| format!("({})", alphabet.format_or_one(&gens[i])))
        .collect()
}

/// Prefixes P(0), …, P(|w|), indexed by length.
pub fn prefixes(p: &Presentation) -> Vec<Word> {
    (0..=p.relator.len()).map(|k| p.prefix(k)).collect()
}

/// Chooses the decider: the first class that applies, or the first candidate of
/// the named class.
pub fn solver_for(p: &Presentation, class: Option<&str>, f: Option<&Factorisation>, cap: usize) -> Result<Solver> {
    let Some(name) = class else {
        return prefix::first_solver(p, f, cap);
    };
    let mut last = Error::Unsupported(format!("no class named `{name}`"));
    for c in prefix::candidates(p).iter().filter(|c| c.name() == name) {
        match Solver::with_cap(p, c, f, cap) {
            Ok(s) => return Ok(s),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn failure(query: String, e: &Error) -> Result<QueryReport> {
    match Answer::from_error(e) {
        Some(a) => {
            let mut r = QueryReport::new(query, a);
            r.reason = Some(e.to_string());
            Ok(r)
        }
        None => Err(e.clone()),
    }
}

fn solver_report(p: &Presentation, s: &Solver, query: String, found: Option<Vec<usize>>) -> QueryReport {
    let mut r = QueryReport::new(query, if found.is_some() { Answer::Yes } else { Answer::No });
    r.class = Some(s.tag().name().into());
    r.method = Some(s.method().into());
    r.unchecked_hypotheses = s.unchecked_hypotheses().to_vec();
    r.witness = found.map(|seq| Witness {
        expression: expression(&p.alphabet, &prefixes(p), &seq),
        factors: seq,
    });
    r
}

/// Membership of `q` in the prefix monoid P_w.
pub fn prefix_member(p: &Presentation, solver: &Result<Solver>, q: &Word) -> Result<QueryReport> {
    let start = Instant::now();
    let query = p.alphabet.format_or_one(q);
    let mut r = match solver {
        Err(e) => failure(query, e)?,
        Ok(s) => match s.member(q) {
            Ok(found) => solver_report(p, s, query, found),
            Err(e) => failure(query, &e)?,
        },
    };
    r.elapsed = start.elapsed();
    Ok(r)
}

/// Right invertibility of `q` in the inverse monoid Inv⟨X | w = 1⟩.
pub fn right_invertible(p: &Presentation, solver: &Result<Solver>, q: &Word) -> Result<QueryReport> {
    let start = Instant::now();
    let query = p.alphabet.format_or_one(q);
    let mut r = match solver {
        Err(e) => failure(query, e)?,
        Ok(s) => match prefix::right_invertible(p, s, q) {
            Ok(found) => solver_report(p, s, query, found),
            Err(e) => failure(query, &e)?,
        },
    };
    r.elapsed = start.elapsed();
    Ok(r)
}

/// A group with the word problem for ⟨X | w⟩, independent of the class deciders when possible.
pub fn oracle_model(p: &Presentation, cap: usize) -> Result<Arc<dyn Group>> {
    match one_relator_group(p.rank(), &p.relator) {
        Ok(g) => Ok(g),
        Err(_) => {
            let s = prefix::first_solver(p, None, cap)?;
            Ok(Arc::new(s.model().clone()))
        }
    }
}

fn submonoid_report(
    alphabet: &Alphabet,
    model: &dyn Group,
    gens: &[Word],
    q: &Word,
    engine: &dyn Submonoid,
    method: &str,
    unchecked: Vec<String>,
) -> Result<QueryReport> {
    let query = alphabet.format_or_one(q);
    let mut r = match engine.member(q) {
        Ok(Some(toks)) => {
            let seq: Vec<usize> = toks.iter().map(|&t| t as usize).collect();
            let product = Word::product(seq.iter().map(|&i| &gens[i]));
            if !model.equal(&product, q)? {
                return Err(Error::Precondition("witness does not evaluate to the query".into()));
            }
            let mut r = QueryReport::new(query, Answer::Yes);
            r.witness = Some(Witness {
                expression: expression(alphabet, gens, &seq),
                factors: seq,
            });
            r
        }
        Ok(None) => QueryReport::new(query, Answer::No),
        Err(e) => return failure(query, &e),
    };
    r.method = Some(method.into());
    r.unchecked_hypotheses = unchecked;
    Ok(r)
}

/// Membership in the submonoid of an amalgam of free groups generated by `gens`;
/// each generator must lie in one factor.
pub fn amalgam_member(spec: &AmalgamSpec, gens: &[Word], q: &Word, cap: usize) -> Result<QueryReport> {
    let start = Instant::now();
    let rb = spec.rb;
    let g = Arc::new(Amalgam::free(rb, spec.rc, &spec.alphas, &spec.betas)?);
    let query = spec.alphabet.format_or_one(q);
    let mut sb = (Vec::new(), Vec::new());
    let mut sc = (Vec::new(), Vec::new());
    for (i, w) in gens.iter().enumerate() {
        if w.iter().all(|l| l.gen() < rb) {
            sb.0.push(w.clone());
            sb.1.push(i as u32);
        } else if w.iter().all(|l| l.gen() >= rb) {
            sc.0.push(w.rename(|x| x - rb));
            sc.1.push(i as u32);
        } else {
            let e = Error::Unsupported(format!(
                "generator {} mixes letters of both factors",
                spec.alphabet.format(w)
            ));
            return failure(query, &e);
        }
    }
    let mb = Arc::new(FreeSubmonoid::new(rb, sb.0, sb.1));
    let mc = Arc::new(FreeSubmonoid::new(spec.rc, sc.0, sc.1));
    let thm_a = AmalgamThmA::new(g.clone(), mb.clone(), mc.clone());
    let mut r = if thm_a.hypothesis_holds()? {
        submonoid_report(&spec.alphabet, &*g, gens, q, &thm_a, "syllables of a reduced form, A inside M", Vec::new())?
    } else {
        let thm_b = match AmalgamThmB::new(g.clone(), mb, mc) {
            Ok(t) => t.with_cap(cap),
            Err(e) => return failure(query, &e),
        };
        if !thm_b.swap_condition()? {
            let e = Error::Unsupported("S_B ∩ A and S_C ∩ A do not correspond under the amalgamation".into());
            return failure(query, &e);
        }
        submonoid_report(
            &spec.alphabet,
            &*g,
            gens,
            q,
            &thm_b,
            "alternating chain of rational subsets of A",
            vec!["M ∩ B = Mon⟨S_B⟩ and M ∩ C = Mon⟨S_C⟩".into()],
        )?
    };
    r.elapsed = start.elapsed();
    Ok(r)
}

/// Membership in the submonoid of an HNN extension of a free group generated by `gens`.
pub fn hnn_member(spec: &HnnSpec, gens: &[Word], q: &Word, cap: usize) -> Result<QueryReport> {
    let start = Instant::now();
    let g = Arc::new(Hnn::free(spec.base_rank, &spec.u, &spec.v)?);
    let t = spec.base_rank;
    let query = spec.alphabet.format_or_one(q);
    let t_tok = gens.iter().position(|w| w.len() == 1 && w[0].gen() == t && !w[0].is_inverse());
    let ti_tok = gens.iter().position(|w| w.len() == 1 && w[0].gen() == t && w[0].is_inverse());
    let rest: Vec<usize> = (0..gens.len()).filter(|&i| Some(i) != t_tok && Some(i) != ti_tok).collect();
    let mut r = if let (Some(a), Some(b)) = (t_tok, ti_tok) {
        if rest.iter().any(|&i| gens[i].occurrences(t) > 0) {
            let e = Error::Unsupported("with t and t⁻¹ as generators the others must avoid t".into());
            return failure(query, &e);
        }
        let base = Arc::new(FreeSubmonoid::new(
            spec.base_rank,
            rest.iter().map(|&i| gens[i].clone()).collect(),
            rest.iter().map(|&i| i as u32).collect(),
        ));
        let thm = HnnThmC::new(g.clone(), base, a as u32, b as u32);
        if !thm.hypothesis_holds()? {
            let e = Error::Unsupported("associated subgroups are not inside the base submonoid".into());
            return failure(query, &e);
        }
        submonoid_report(&spec.alphabet, &*g, gens, q, &thm, "Britton syllables in the base submonoid", Vec::new())?
    } else {
        let thm = match HnnSubmonoid::new(g.clone(), gens, (0..gens.len() as u32).collect()) {
            Ok(t) => t.with_cap(cap),
            Err(e) => return failure(query, &e),
        };
        submonoid_report(&spec.alphabet, &*g, gens, q, &thm, "Britton-count automaton families", Vec::new())?
    };
    r.elapsed = start.elapsed();
    Ok(r)
}

/// Names of the classes that apply, or the reasons none does.
pub fn classify_lines(p: &Presentation, f: Option<&Factorisation>) -> (Vec<String>, Vec<String>) {
    let a = prefix::analyse(p, f);
    let tags = a.solvers.iter().map(|s| describe(p, s.tag())).collect();
    let rejected = a.rejected.iter().map(|(n, r)| format!("{n}: {r}")).collect();
    (tags, rejected)
}

/// A tag with its parameters in letters.
pub fn describe(p: &Presentation, tag: &ClassTag) -> String {
    let l = |g: usize| p.alphabet.symbol(g).base.to_string();
    match tag {
        ClassTag::Marker { markers, .. } => {
            format!("marker ({})", markers.iter().map(|&g| l(g)).collect::<Vec<_>>().join(" "))
        }
        ClassTag::Disjoint { pieces, .. } => format!("disjoint ({pieces} pieces)"),
        ClassTag::CycPinched { split } => format!("cyc-pinched (split after {split})"),
        ClassTag::ConjPinched { t } => format!("conj-pinched (t = {})", l(*t)),
        ClassTag::PosNeg { t, negative } => format!(
            "posneg (t = {}, prefix {})",
            l(*t),
            if *negative { "negative" } else { "positive" }
        ),
        ClassTag::Adjan { stable } => format!("adjan (t = {})", l(*stable)),
        ClassTag::OHare { a, d } => format!("ohare (a = {}, d = {})", l(*a), l(*d)),
        ClassTag::Unsupported(r) => format!("unsupported: {r}"),
    }
}
