//! Finite-memory Player 1 strategies given by action and update tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Game;

/// `sigma[q][m]` is the action played at state `q` in memory `m`;
/// `mu[q][m][b]` is the memory after Player 2 answers `b` there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryStrategy {
    pub memory_count: usize,
    pub m0: usize,
    pub sigma: Vec<Vec<usize>>,
    pub mu: Vec<Vec<Vec<usize>>>,
}

/// A play of a strategy against a Player 2 word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Play {
    pub states: Vec<usize>,
    pub actions: Vec<(usize, usize)>,
    pub colors: Vec<usize>,
    pub memories: Vec<usize>,
}

impl MemoryStrategy {
    /// A memoryless strategy.
    pub fn positional(actions: &[usize], nb: usize) -> MemoryStrategy {
        MemoryStrategy {
            memory_count: 1,
            m0: 0,
            sigma: actions.iter().map(|&a| vec![a]).collect(),
            mu: actions.iter().map(|_| vec![vec![0; nb]]).collect(),
        }
    }

    pub fn check(&self, g: &Game) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.memory_count == 0 || self.m0 >= self.memory_count {
            return bad("initial memory out of range".into());
        }
        if self.sigma.len() != g.nq() || self.mu.len() != g.nq() {
            return bad(format!("strategy tables cover {} states, game has {}", self.sigma.len(), g.nq()));
        }
        for q in 0..g.nq() {
            if self.sigma[q].len() != self.memory_count || self.mu[q].len() != self.memory_count {
                return bad(format!("state {q}: tables are not total over memory"));
            }
            for m in 0..self.memory_count {
                if self.sigma[q][m] >= g.na() {
                    return bad(format!("state {q}, memory {m}: action out of range"));
                }
                if self.mu[q][m].len() != g.nb() || self.mu[q][m].iter().any(|&x| x >= self.memory_count) {
                    return bad(format!("state {q}, memory {m}: update is not total"));
                }
            }
        }
        Ok(())
    }

    pub fn action(&self, q: usize, m: usize) -> usize {
        self.sigma[q][m]
    }

    pub fn update(&self, q: usize, m: usize, b: usize) -> usize {
        self.mu[q][m][b]
    }

    /// Plays against the Player 2 word `beta` starting from the game's initial state.
    pub fn play(&self, g: &Game, beta: &[usize]) -> Play {
        self.play_from(g, g.initial, self.m0, beta)
    }

    pub fn play_from(&self, g: &Game, q: usize, m: usize, beta: &[usize]) -> Play {
        let (mut q, mut m) = (q, m);
        let mut p = Play { states: vec![q], actions: Vec::new(), colors: Vec::new(), memories: vec![m] };
        for &b in beta {
            let a = self.action(q, m);
            let (c, next) = g.effect(q, a, b);
            m = self.update(q, m, b);
            q = next;
            p.actions.push((a, b));
            p.colors.push(c);
            p.states.push(q);
            p.memories.push(m);
        }
        p
    }
}
