//! Witness-bounded semi-deciders for the closure operators.

use std::fmt;

use serde::Serialize;

use super::{for_each_word, Condition};
use crate::model::UpWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureOp {
    PrefixRemoval,
    Interleaving,
    FactorPrefix,
}

impl fmt::Display for ClosureOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClosureOp::PrefixRemoval => "prefix",
            ClosureOp::Interleaving => "interleaving",
            ClosureOp::FactorPrefix => "factorprefix",
        })
    }
}

impl std::str::FromStr for ClosureOp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "prefix" => Ok(ClosureOp::PrefixRemoval),
            "interleaving" => Ok(ClosureOp::Interleaving),
            "factorprefix" => Ok(ClosureOp::FactorPrefix),
            _ => Err(format!("unknown closure operator `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureVerdict {
    Yes,
    NoWithinBounds,
    YesByMembership,
}

/// Membership of `w` in the closure of `inner`, searching witnesses up to `bound`.
pub fn closure_member(op: ClosureOp, inner: &Condition, w: &UpWord, bound: usize) -> ClosureVerdict {
    if inner.up_member(w) {
        return ClosureVerdict::YesByMembership;
    }
    let letters: Vec<usize> = (0..inner.alphabet().len()).collect();
    let found = match op {
        // w is a tail of some γ·w in the inner language
        ClosureOp::PrefixRemoval => (1..=bound).any(|n| {
            for_each_word(&letters, n, &mut |g| {
                let mut stem = g.to_vec();
                stem.extend_from_slice(&w.stem);
                inner.up_member(&UpWord::new(stem, w.cycle.clone()))
            })
        }),
        ClosureOp::Interleaving => interleaving_witness(inner, w, bound, &letters),
        // only purely periodic words have all prefixes recurring in an ultimately periodic word
        ClosureOp::FactorPrefix => {
            let n = w.normalized();
            n.stem.is_empty()
                && (1..=bound).any(|k| for_each_word(&letters, k, &mut |g| inner.up_member(&UpWord::new(g.to_vec(), n.cycle.clone()))))
        }
    };
    if found {
        ClosureVerdict::Yes
    } else {
        ClosureVerdict::NoWithinBounds
    }
}

/// The letters of `w` at the positions where `schedule` reads `p`.
fn component(w: &UpWord, schedule: &UpWord, p: usize) -> Result<UpWord, Vec<usize>> {
    let start = w.stem.len().max(schedule.stem.len());
    let period = lcm(w.cycle.len(), schedule.cycle.len());
    let pick = |range: std::ops::Range<usize>| -> Vec<usize> { range.filter(|&t| schedule.at(t) == p).map(|t| w.at(t)).collect() };
    let stem = pick(0..start);
    let cycle = pick(start..start + period);
    if cycle.is_empty() {
        Err(stem)
    } else {
        Ok(UpWord::new(stem, cycle))
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / num_integer::gcd(a, b) * b
}

fn extendable(inner: &Condition, prefix: &[usize], bound: usize, letters: &[usize]) -> bool {
    (1..=bound).any(|cl| {
        (0..=bound).any(|sl| {
            for_each_word(letters, sl + cl, &mut |x| {
                let mut stem = prefix.to_vec();
                stem.extend_from_slice(&x[..sl]);
                inner.up_member(&UpWord::new(stem, x[sl..].to_vec()))
            })
        })
    })
}

fn interleaving_witness(inner: &Condition, w: &UpWord, bound: usize, letters: &[usize]) -> bool {
    let ok = |part: Result<UpWord, Vec<usize>>| match part {
        Ok(u) => inner.up_member(&u),
        Err(prefix) => prefix.is_empty() || extendable(inner, &prefix, bound, letters),
    };
    for sl in 0..=bound {
        for cl in 1..=bound {
            let hit = for_each_word(&[0, 1], sl + cl, &mut |s| {
                let schedule = UpWord::new(s[..sl].to_vec(), s[sl..].to_vec());
                ok(component(w, &schedule, 0)) && ok(component(w, &schedule, 1))
            });
            if hit {
                return true;
            }
        }
    }
    false
}
