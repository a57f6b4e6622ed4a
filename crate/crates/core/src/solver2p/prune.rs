//! Branch and bound over partial delayed responses for parity conditions.

use super::{Outcome, ResponseLog, Verdict};
use crate::graph::{Graph, Path};
use crate::model::Game;
use crate::responses::{derive, DelayedResponse, ResponseSpace};
use crate::solver1p::{solve_one_player, Bounds1p, Outcome1p};

struct Search<'a> {
    g: &'a Game,
    space: &'a ResponseSpace,
    prio: &'a [i64],
    choice: Vec<Vec<Option<usize>>>,
    explored: u64,
}

impl Search<'_> {
    /// Edges fixed by the partial choice, plus every pair of an open set when `open` holds.
    fn graph(&self, open: bool) -> Graph {
        let mut gr = Graph::new(self.g.nq());
        for q in 0..self.g.nq() {
            for a in 0..self.g.na() {
                let i = self.space.set_of[q][a];
                let pairs = &self.space.sets[q][i].pairs;
                match self.choice[q][i] {
                    Some(k) => gr.out[q].push((a, pairs[k].1, pairs[k].0)),
                    None if open => gr.out[q].extend(pairs.iter().map(|&(c, n)| (a, n, c))),
                    None => {}
                }
            }
        }
        gr
    }

    fn lasso(&self, gr: &Graph) -> Option<(Path, Path)> {
        gr.parity_lasso(self.g.initial, &|c| self.prio[c])
    }

    /// A losing completion of the current partial choice, if one exists.
    /// Branches on an open set used by a winning lasso of the optimistic graph, trying first the pairs that break it.
    fn run(&mut self) -> Option<DelayedResponse> {
        self.explored += 1;
        let Some((stem, cycle)) = self.lasso(&self.graph(true)) else {
            let choice = self.choice.iter().map(|v| v.iter().map(|x| x.unwrap_or(0)).collect()).collect();
            return Some(DelayedResponse { choice });
        };
        if self.lasso(&self.graph(false)).is_some() {
            return None;
        }
        let (q, i, used) = stem
            .iter()
            .chain(&cycle)
            .find_map(|&(q, (a, n, c))| {
                let i = self.space.set_of[q][a];
                self.choice[q][i].is_none().then(|| (q, i, self.space.sets[q][i].pairs.iter().position(|&p| p == (c, n))))
            })
            .expect("a winning lasso of the optimistic graph uses an open set");
        let n = self.space.sets[q][i].pairs.len();
        for k in (0..n).filter(|&k| Some(k) != used).chain(used) {
            self.choice[q][i] = Some(k);
            if let Some(t) = self.run() {
                return Some(t);
            }
        }
        self.choice[q][i] = None;
        None
    }
}

/// Exact: Player 1 wins every derived game iff the search finds no losing completion.
pub(super) fn decide_parity(g: &Game, space: &ResponseSpace, prio: &[i64], bounds: Bounds1p) -> Verdict {
    let mut s = Search { g, space, prio, choice: space.sets.iter().map(|ss| vec![None; ss.len()]).collect(), explored: 0 };
    let found = s.run();
    let total = space.count().to_string();
    match found {
        Some(t) => {
            let solution = solve_one_player(&derive(g, space, &t), bounds);
            debug_assert_eq!(solution.verdict, Outcome1p::Lose);
            let log = ResponseLog { index: space.index_big(&t).to_string(), response: t, solution };
            Verdict {
                outcome: Outcome::Player1Loses,
                responses_total: total,
                responses: vec![log.clone()],
                failing: Some(log),
                explored: Some(s.explored),
            }
        }
        None => Verdict {
            outcome: Outcome::Player1Wins,
            responses_total: total,
            responses: Vec::new(),
            failing: None,
            explored: Some(s.explored),
        },
    }
}
