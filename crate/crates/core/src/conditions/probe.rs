//! Randomized search for counterexamples to the closure and completeness axioms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Condition, Nonempty};
use crate::interleave::interleave_up;
use crate::model::UpWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Interleaving,
    PrefixRemoval,
    FactorPrefix,
    FactorSet,
}

impl Axiom {
    pub fn describe(self) -> &'static str {
        match self {
            Axiom::Interleaving => "closed under interleaving",
            Axiom::PrefixRemoval => "closed under prefix removal",
            Axiom::FactorPrefix => "factor-prefix complete",
            Axiom::FactorSet => "factor-set complete",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ProbeResult {
    NoCounterexample { members_tested: usize },
    Counterexample { members: Vec<UpWord>, schedule: Option<UpWord>, produced: Option<UpWord>, colors: Option<Vec<usize>> },
}

fn random_word(rng: &mut ChaCha8Rng, letters: usize, period_bound: usize) -> UpWord {
    let sl = rng.gen_range(0..=period_bound);
    let cl = rng.gen_range(1..=period_bound);
    let stem = (0..sl).map(|_| rng.gen_range(0..letters)).collect();
    let cycle = (0..cl).map(|_| rng.gen_range(0..letters)).collect();
    UpWord::new(stem, cycle)
}

fn sample_member(w: &Condition, rng: &mut ChaCha8Rng, period_bound: usize, tries: usize) -> Option<UpWord> {
    let n = w.alphabet().len();
    (0..tries).map(|_| random_word(rng, n, period_bound)).find(|u| w.up_member(u))
}

/// Tests the axiom on `sample_budget` sampled members with periods up to `period_bound`.
pub fn axiom_probe(w: &Condition, axiom: Axiom, sample_budget: usize, period_bound: usize, seed: u64) -> ProbeResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pb = period_bound.max(1);
    let mut tested = 0;
    for _ in 0..sample_budget {
        let Some(m) = sample_member(w, &mut rng, pb, 64) else { continue };
        tested += 1;
        match axiom {
            Axiom::Interleaving => {
                let Some(m2) = sample_member(w, &mut rng, pb, 64) else { continue };
                let schedule = random_word(&mut rng, 2, pb);
                let produced = interleave_up([&m, &m2], &schedule).expect("binary schedule");
                if !w.up_member(&produced) {
                    return ProbeResult::Counterexample {
                        members: vec![m, m2],
                        schedule: Some(schedule),
                        produced: Some(produced),
                        colors: None,
                    };
                }
            }
            Axiom::PrefixRemoval => {
                for k in 1..=m.stem.len() + m.cycle.len() {
                    let tail = m.suffix(k);
                    if !w.up_member(&tail) {
                        return ProbeResult::Counterexample { members: vec![m], schedule: None, produced: Some(tail), colors: None };
                    }
                }
            }
            Axiom::FactorPrefix => {
                for r in 0..m.cycle.len() {
                    let mut c = m.cycle.clone();
                    c.rotate_left(r);
                    let rot = UpWord::periodic(c);
                    if !w.up_member(&rot) {
                        return ProbeResult::Counterexample { members: vec![m], schedule: None, produced: Some(rot), colors: None };
                    }
                }
            }
            Axiom::FactorSet => {
                let colors: Vec<usize> = m.letters().into_iter().collect();
                if let Ok(Nonempty::Empty) = w.restricted_nonempty(&colors) {
                    return ProbeResult::Counterexample { members: vec![m], schedule: None, produced: None, colors: Some(colors) };
                }
            }
        }
    }
    ProbeResult::NoCounterexample { members_tested: tested }
}
