//! Bounded residual load: request maps, the satisfaction predicate, residual load and fairness variants.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::UpWord;

/// For each color, the set of color words any of which satisfies a request issued by that color.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RequestMap {
    words: Vec<Vec<Vec<usize>>>,
}

impl RequestMap {
    /// `words[c]` lists the request words of color `c`; an empty word means no obligation.
    pub fn new(words: Vec<Vec<Vec<usize>>>) -> RequestMap {
        let words = words.into_iter().map(canonical).collect();
        RequestMap { words }
    }

    /// Every color issues no obligation.
    pub fn request_free(colors: usize) -> RequestMap {
        RequestMap::new(vec![vec![Vec::new()]; colors])
    }

    pub fn colors(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self, c: usize) -> &[Vec<usize>] {
        &self.words[c]
    }

    fn free(&self, c: usize) -> bool {
        self.words[c].iter().any(Vec::is_empty)
    }

    /// The map simulating parity over integer priorities `prio`.
    pub fn parity_simulation(prio: &[i64]) -> RequestMap {
        let n = prio.len();
        let words = (0..n)
            .map(|c| {
                if prio[c].rem_euclid(2) == 0 {
                    (0..n).map(|k| vec![k]).collect()
                } else {
                    (0..n).filter(|&k| prio[k].rem_euclid(2) == 0 && prio[k] < prio[c]).map(|k| vec![k]).collect()
                }
            })
            .collect();
        RequestMap::new(words)
    }
}

fn canonical(mut set: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    set.sort();
    set.dedup();
    set
}

fn embeds(word: &[usize], text: &[usize]) -> bool {
    let mut it = text.iter();
    word.iter().all(|x| it.any(|y| y == x))
}

/// Whether some request word of `gamma[n]` embeds as a subsequence of positions `n+1 ..= n+d`.
pub fn s_predicate(gamma: &[usize], n: usize, d: usize, req: &RequestMap) -> Result<bool> {
    if n + d >= gamma.len() {
        return Err(Error::Validation(format!("position {n} with delay {d} exceeds prefix length {}", gamma.len())));
    }
    let window = &gamma[n + 1..=n + d];
    Ok(req.words(gamma[n]).iter().any(|u| embeds(u, window)))
}

/// Pending requests grouped by their canonical residual obligation sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PendingProfile {
    pending: BTreeMap<Vec<Vec<usize>>, usize>,
}

impl PendingProfile {
    pub fn new() -> PendingProfile {
        PendingProfile::default()
    }

    /// Reads one color: advances earlier obligations, then registers the new request.
    pub fn step(&mut self, c: usize, req: &RequestMap) {
        let mut next: BTreeMap<Vec<Vec<usize>>, usize> = BTreeMap::new();
        for (set, count) in std::mem::take(&mut self.pending) {
            let derived: Vec<Vec<usize>> = set.into_iter().map(|w| if w.first() == Some(&c) { w[1..].to_vec() } else { w }).collect();
            if derived.iter().any(Vec::is_empty) {
                continue;
            }
            *next.entry(canonical(derived)).or_default() += count;
        }
        if !req.free(c) {
            *next.entry(req.words(c).to_vec()).or_default() += 1;
        }
        self.pending = next;
    }

    pub fn load(&self) -> usize {
        self.pending.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.pending.len()
    }
}

/// Number of unsatisfied requests after each prefix `gamma[..=n]`.
pub fn residual_load(gamma: &[usize], req: &RequestMap) -> Vec<usize> {
    let mut p = PendingProfile::new();
    gamma
        .iter()
        .map(|&c| {
            p.step(c, req);
            p.load()
        })
        .collect()
}

fn satisfiable_in_cycle(c: usize, letters: &BTreeSet<usize>, req: &RequestMap) -> bool {
    req.words(c).iter().any(|u| u.iter().all(|x| letters.contains(x)))
}

/// Bounded residual load of `stem · cycle^ω`.
pub fn brl_up_decide(w: &UpWord, req: &RequestMap) -> bool {
    let letters = w.letters();
    w.cycle.iter().all(|&c| satisfiable_in_cycle(c, &letters, req))
}

/// Verdicts of the fairness variants on an ultimately periodic word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fairness {
    pub f: bool,
    pub fci: bool,
    pub ff: bool,
    pub brl: bool,
    pub brld: bool,
    /// Bounds `(b, d)` witnessing the delayed variant, when it holds.
    pub brld_witness: Option<(usize, usize)>,
}

fn stem_position_satisfiable(w: &UpWord, k: usize, req: &RequestMap) -> bool {
    let letters = w.letters();
    let rest = &w.stem[k + 1..];
    req.words(w.stem[k]).iter().any(|u| {
        let mut i = 0;
        for &x in rest {
            if i < u.len() && u[i] == x {
                i += 1;
            }
        }
        u[i..].iter().all(|x| letters.contains(x))
    })
}

/// F, FCI, FF, BRL and BRLD on `stem · cycle^ω`.
pub fn fairness_predicates(w: &UpWord, req: &RequestMap) -> Fairness {
    let letters = w.letters();
    let cycle_ok = w.cycle.iter().all(|&c| satisfiable_in_cycle(c, &letters, req));
    let stem_ok = (0..w.stem.len()).all(|k| stem_position_satisfiable(w, k, req));
    let f = cycle_ok && stem_ok;
    let brl = brl_up_decide(w, req);
    let brld_witness = delayed_load_bound(w, req);
    Fairness { f, fci: cycle_ok, ff: f, brl, brld: brld_witness.is_some(), brld_witness }
}

/// Simulates the pending requests older than `d` over whole periods and reports `(b, d)`
/// when their number stops growing.
fn delayed_load_bound(w: &UpWord, req: &RequestMap) -> Option<(usize, usize)> {
    let longest = (0..req.colors()).flat_map(|c| req.words(c).iter().map(Vec::len)).max().unwrap_or(0);
    let p = w.cycle.len();
    let d = w.stem.len() + (longest + 1) * p;
    let horizon = d + w.stem.len() + (longest + 3) * p;
    let mut born: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
    let mut counts = Vec::new();
    let mut max_old = 0;
    for n in 0..horizon + 2 * p {
        let c = w.at(n);
        born = born
            .into_iter()
            .filter_map(|(k, set)| {
                let derived: Vec<Vec<usize>> = set.into_iter().map(|u| if u.first() == Some(&c) { u[1..].to_vec() } else { u }).collect();
                (!derived.iter().any(Vec::is_empty)).then_some((k, derived))
            })
            .collect();
        if !req.free(c) {
            born.push((n, req.words(c).to_vec()));
        }
        let old = born.iter().filter(|(k, _)| k + d <= n).count();
        max_old = max_old.max(old);
        counts.push(old);
    }
    let a = counts[horizon - 1];
    let b = counts[horizon + p - 1];
    let c = counts[horizon + 2 * p - 1];
    (a == b && b == c).then_some((max_old, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Colors 0, 1, 2 where 0 asks for 1, 2 asks for 2 and 1 asks for 0.
    fn looping_map() -> RequestMap {
        RequestMap::new(vec![vec![vec![1]], vec![vec![0]], vec![vec![2]]])
    }

    #[test]
    fn never_solved_request() {
        let req = looping_map();
        let gamma = [0, 2, 2, 2, 2];
        for d in 0..=4 {
            assert!(!s_predicate(&gamma, 0, d, &req).unwrap());
        }
        assert_eq!(residual_load(&gamma, &req), vec![1, 2, 2, 2, 2]);
        let w = UpWord::new(vec![0], vec![2]);
        let f = fairness_predicates(&w, &req);
        assert!(f.brl && f.brld && !f.f && f.fci && !f.ff);
        assert!(!brl_up_decide(&UpWord::periodic(vec![0]), &req));
    }

    #[test]
    fn alternative_words() {
        // colors a=0, b=1, c=2, d=3; a asks for "bc" or "d"
        let req = RequestMap::new(vec![vec![vec![1, 2], vec![3]], vec![vec![]], vec![vec![]], vec![vec![]]]);
        assert!(s_predicate(&[0, 1, 3], 0, 2, &req).unwrap());
        assert!(!s_predicate(&[0, 1, 3], 0, 1, &req).unwrap());
        assert!(s_predicate(&[0, 1, 3], 0, 5, &req).is_err());
    }

    #[test]
    fn request_free_everything_holds() {
        let req = RequestMap::request_free(3);
        assert_eq!(residual_load(&[0, 1, 2, 0], &req), vec![0; 4]);
        let f = fairness_predicates(&UpWord::new(vec![2, 1], vec![0, 1]), &req);
        assert!(f.f && f.fci && f.ff && f.brl && f.brld);
    }

    #[test]
    fn parity_simulation_map() {
        let req = RequestMap::parity_simulation(&[0, 1]);
        assert!(brl_up_decide(&UpWord::periodic(vec![1, 0]), &req));
        assert!(!brl_up_decide(&UpWord::periodic(vec![1]), &req));
    }
}
