//! Two-player decision through delayed responses, strategy synthesis, spoilers and LAR expansion.

mod lar;
mod prune;
mod select;
mod spoiler;
mod synth;

pub use lar::{lar_expand, LarGame, LarSummary, LAR_COLOR_CAP};
pub use select::{fpi_select, Selection};
pub use spoiler::{extract_spoiler, spoiler_game, Spoiler};
pub use synth::{decompose_trace, synthesize, Level, LevelKind, SynthNode, Synthesis};

use rayon::prelude::*;
use serde::Serialize;

use crate::conditions::{Axiom, Flag, Kind, Nonempty};
use crate::error::{Error, Result};
use crate::model::{Game, StatelessGame};
use crate::responses::{derive, product, DelayedResponse, ResponseSpace, DEFAULT_CAP};
use crate::solver1p::{solve_one_player, Bounds1p, Outcome1p, Solution1p};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Player1Wins,
    Player1Loses,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecideOptions {
    pub cap: u64,
    pub bounds: Bounds1p,
    /// Search partial responses instead of enumerating them; parity conditions only.
    pub prune: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { cap: DEFAULT_CAP, bounds: Bounds1p::default(), prune: false }
    }
}

/// One derived game and how it was solved.
#[derive(Clone, Debug, Serialize)]
pub struct ResponseLog {
    /// Position in enumeration order, in decimal.
    pub index: String,
    pub response: DelayedResponse,
    #[serde(flatten)]
    pub solution: Solution1p,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub responses_total: String,
    /// Logs in enumeration order, ending at the first lost derived game.
    pub responses: Vec<ResponseLog>,
    pub failing: Option<ResponseLog>,
    /// Partial responses visited by the pruned search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explored: Option<u64>,
}

fn require(g: &Game, axioms: &[Axiom]) -> Result<()> {
    let flags = g.condition.axioms();
    for &a in axioms {
        if flags.get(a) != Flag::DeclaredTrue {
            return Err(Error::Refused(format!(
                "condition `{}` is not declared {}; the delayed-response characterization needs it",
                g.condition.name(),
                a.describe()
            )));
        }
    }
    Ok(())
}

const CHUNK: usize = 256;

fn decide_responses(g: &Game, space: &ResponseSpace, opts: &DecideOptions) -> Result<Verdict> {
    if opts.prune {
        let Kind::Parity(prio) = &g.condition.kind else {
            return Err(Error::Refused(format!("pruned search needs a parity condition, found `{}`", g.condition.name())));
        };
        return Ok(prune::decide_parity(g, space, prio, opts.bounds));
    }
    let count = space.count();
    let mut it = space.iter_from(0, opts.cap)?.peekable();
    let mut logs = Vec::new();
    let mut inconclusive = false;
    while it.peek().is_some() {
        let chunk: Vec<(u64, DelayedResponse)> = it.by_ref().take(CHUNK).collect();
        let solved: Vec<ResponseLog> = chunk
            .into_par_iter()
            .map(|(index, response)| {
                let solution = solve_one_player(&derive(g, space, &response), opts.bounds);
                ResponseLog { index: index.to_string(), response, solution }
            })
            .collect();
        for log in solved {
            let v = log.solution.verdict;
            logs.push(log);
            match v {
                Outcome1p::Lose => {
                    let failing = logs.last().cloned();
                    return Ok(Verdict {
                        outcome: Outcome::Player1Loses,
                        responses_total: count.to_string(),
                        responses: logs,
                        failing,
                        explored: None,
                    });
                }
                Outcome1p::Inconclusive => inconclusive = true,
                Outcome1p::Win => {}
            }
        }
    }
    let outcome = if inconclusive { Outcome::Inconclusive } else { Outcome::Player1Wins };
    Ok(Verdict { outcome, responses_total: count.to_string(), responses: logs, failing: None, explored: None })
}

/// Player 1 wins iff she wins every derived one-player game.
pub fn decide(g: &Game, opts: &DecideOptions) -> Result<Verdict> {
    require(g, &[Axiom::Interleaving, Axiom::PrefixRemoval])?;
    decide_responses(g, &ResponseSpace::new(g), opts)
}

#[derive(Clone, Debug, Serialize)]
pub struct StateVerdict {
    pub state: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct AllStatesVerdict {
    /// Whether Player 1 wins from every state simultaneously.
    pub everywhere: Outcome,
    pub per_state: Vec<StateVerdict>,
    pub caveat: &'static str,
}

/// Decides winning from every state; needs only interleaving closure.
pub fn decide_all_states(g: &Game, opts: &DecideOptions) -> Result<AllStatesVerdict> {
    require(g, &[Axiom::Interleaving])?;
    let space = ResponseSpace::new(g);
    let mut per_state = Vec::new();
    for q in 0..g.nq() {
        let verdict = decide_responses(&g.with_initial(q), &space, opts)?;
        per_state.push(StateVerdict { state: g.states[q].clone(), verdict });
    }
    let everywhere = if per_state.iter().any(|s| s.verdict.outcome == Outcome::Player1Loses) {
        Outcome::Player1Loses
    } else if per_state.iter().all(|s| s.verdict.outcome == Outcome::Player1Wins) {
        Outcome::Player1Wins
    } else {
        Outcome::Inconclusive
    };
    Ok(AllStatesVerdict {
        everywhere,
        per_state,
        caveat: "without prefix-removal closure a lost derived game from one state does not by itself mean Player 1 loses from that state; only the conjunction over all states is characterized",
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TupleLog {
    pub tuple: Vec<usize>,
    pub colors: Vec<usize>,
    pub result: Nonempty,
}

#[derive(Clone, Debug, Serialize)]
pub struct StatelessVerdict {
    pub outcome: Outcome,
    pub row_colors: Vec<Vec<usize>>,
    pub tuples: Vec<TupleLog>,
    pub failing: Option<TupleLog>,
}

/// Player 1 wins iff for every choice of one color per row, some winning word uses only chosen colors.
pub fn decide_stateless(s: &StatelessGame, cap: u64) -> Result<StatelessVerdict> {
    let g = s.to_game()?;
    require(&g, &[Axiom::Interleaving])?;
    let mut rows: Vec<Vec<usize>> = s
        .col
        .iter()
        .map(|r| {
            let mut c = r.clone();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();
    rows.sort();
    rows.dedup();
    let radices: Vec<usize> = rows.iter().map(Vec::len).collect();
    let total: u128 = radices.iter().map(|&r| r as u128).product();
    if total > cap as u128 {
        return Err(Error::Cap { count: total.to_string(), cap });
    }
    let mut tuples = Vec::new();
    let mut inconclusive = false;
    for t in product(&radices) {
        let colors: Vec<usize> = t.iter().zip(&rows).map(|(&i, r)| r[i]).collect();
        let result = s.condition.restricted_nonempty(&colors)?;
        let log = TupleLog { tuple: t, colors, result };
        match log.result {
            Nonempty::Empty => {
                let failing = Some(log.clone());
                tuples.push(log);
                return Ok(StatelessVerdict { outcome: Outcome::Player1Loses, row_colors: rows, tuples, failing });
            }
            Nonempty::Inconclusive { .. } => inconclusive = true,
            Nonempty::Witness { .. } => {}
        }
        tuples.push(log);
    }
    let outcome = if inconclusive { Outcome::Inconclusive } else { Outcome::Player1Wins };
    Ok(StatelessVerdict { outcome, row_colors: rows, tuples, failing: None })
}
