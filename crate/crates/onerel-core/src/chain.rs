//! Steps of the Q-chains shared by the amalgam and HNN submonoid procedures.
//!
//! A step automaton spells S⁻¹·Q·g with tagged junctions, so a witness path
//! through it can be cut back into its three parts.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fsa::Fsa;
use crate::rational::{path_label, RationalSet};
use crate::word::Word;

pub const J1: u32 = u32::MAX;
pub const J2: u32 = u32::MAX - 1;

/// Default bound on the states of any automaton built during one decision.
pub const DEFAULT_CAP: usize = 20_000;

pub fn check_cap(states: usize, cap: usize) -> Result<()> {
    if states > cap {
        return Err(Error::ResourceExceeded {
            what: "automaton states",
            limit: cap,
        });
    }
    Ok(())
}

/// `raw⁻¹ ·J1· q ·J2· g`; `raw` carries generator tags.
pub fn step_automaton(raw: &Fsa, q: &RationalSet, g: &Word, cap: usize) -> Result<Fsa> {
    let word = Fsa::from_word(q.rank(), g).without_tags();
    let d = raw
        .reverse_invert()
        .concat_tagged(q.fsa(), Some(J1))?
        .concat_tagged(&word, Some(J2))?;
    check_cap(d.states(), cap)?;
    Ok(d)
}

/// `q⁻¹ ·J1· raw`.
pub fn final_automaton(q: &RationalSet, raw: &Fsa, cap: usize) -> Result<Fsa> {
    let d = q.fsa().reverse_invert().concat_tagged(raw, Some(J1))?;
    check_cap(d.states(), cap)?;
    Ok(d)
}

fn junction(d: &Fsa, path: &[usize], tag: u32) -> usize {
    path.iter()
        .position(|&e| d.transitions()[e].tag == Some(tag))
        .expect("witness path crosses every junction")
}

fn tags(d: &Fsa, path: &[usize]) -> Vec<u32> {
    path.iter()
        .filter_map(|&e| d.transitions()[e].tag)
        .filter(|&t| t != J1 && t != J2)
        .collect()
}

/// Cuts a path through a step automaton: generator tags of the S part in their
/// original order, and the label read inside Q.
pub fn read_step(d: &Fsa, path: &[usize]) -> (Vec<u32>, Word) {
    let j1 = junction(d, path, J1);
    let j2 = junction(d, path, J2);
    let mut toks = tags(d, &path[..j1]);
    toks.reverse();
    (toks, path_label(d, &path[j1 + 1..j2]))
}

/// Cuts a path through a final automaton: the label read in Q⁻¹ and the tags of S.
pub fn read_final(d: &Fsa, path: &[usize]) -> (Word, Vec<u32>) {
    let j1 = junction(d, path, J1);
    (path_label(d, &path[..j1]), tags(d, &path[j1 + 1..]))
}
