//! Positional Player 2 strategies read off a failing delayed response.

use serde::Serialize;

use super::{Outcome, Verdict};
use crate::error::{Error, Result};
use crate::model::{Game, OnePlayerGame};
use crate::responses::{effect_sets, product};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Spoiler {
    /// `actions[q]` is Player 2's action at state `q`.
    Positional {
        actions: Vec<usize>,
    },
    NotTurnBased {
        state: String,
        reason: String,
    },
}

fn column_constant(g: &Game, q: usize) -> bool {
    (0..g.nb()).all(|b| (1..g.na()).all(|a| g.effect(q, a, b) == g.effect(q, 0, b)))
}

fn fmt_pair(g: &Game, p: (usize, usize)) -> String {
    format!("({},{})", g.alphabet()[p.0], g.states[p.1])
}

/// The first state at which neither player alone controls the outcome, with a response no column realizes.
fn concurrent_state(g: &Game) -> Option<(usize, String)> {
    for q in 0..g.nq() {
        let sets = effect_sets(g, q);
        if sets.iter().all(|s| s.pairs.len() == 1) || column_constant(g, q) {
            continue;
        }
        let radices: Vec<usize> = sets.iter().map(|s| s.pairs.len()).collect();
        let bad = product(&radices)
            .into_iter()
            .find(|e| !(0..g.nb()).any(|b| sets.iter().zip(e).all(|(s, &i)| g.effect(q, s.representative(), b) == s.pairs[i])));
        let reason = match bad {
            Some(e) => {
                let pairs: Vec<String> = sets.iter().zip(&e).map(|(s, &i)| fmt_pair(g, s.pairs[i])).collect();
                format!("state {} is concurrent: the response [{}] is not achievable in any column", g.states[q], pairs.join(""))
            }
            None => format!("state {} is concurrent: some effect set is not a singleton and some column is not constant", g.states[q]),
        };
        return Some((q, reason));
    }
    None
}

/// A positional Player 2 strategy realizing the failing response of a turn-based game.
pub fn extract_spoiler(g: &Game, v: &Verdict) -> Result<Spoiler> {
    if let Some((q, reason)) = concurrent_state(g) {
        return Ok(Spoiler::NotTurnBased { state: g.states[q].clone(), reason });
    }
    let failing = match (&v.outcome, &v.failing) {
        (Outcome::Player1Loses, Some(f)) => f,
        _ => return Err(Error::Validation("spoiler extraction needs a verdict in which Player 1 loses".into())),
    };
    let t = &failing.response;
    let mut actions = vec![0; g.nq()];
    for (q, act) in actions.iter_mut().enumerate() {
        let sets = effect_sets(g, q);
        if sets.iter().all(|s| s.pairs.len() == 1) {
            continue;
        }
        let want = sets[0].pairs[t.choice[q][0]];
        *act = (0..g.nb()).find(|&b| g.effect(q, 0, b) == want).expect("constant columns realize every pair");
    }
    Ok(Spoiler::Positional { actions })
}

/// The one-player game left to Player 1 once Player 2 is fixed to `actions`.
pub fn spoiler_game(g: &Game, actions: &[usize]) -> OnePlayerGame {
    let mut delta = Vec::new();
    let mut col = Vec::new();
    for (q, &b) in actions.iter().enumerate() {
        for a in 0..g.na() {
            let (c, n) = g.effect(q, a, b);
            col.push(c);
            delta.push(n);
        }
    }
    OnePlayerGame { states: g.states.clone(), p1: g.p1.clone(), initial: g.initial, condition: g.condition.clone(), delta, col }
}
