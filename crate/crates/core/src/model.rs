//! Arenas, one-player and stateless games, ultimately periodic words and histories.

use std::sync::Arc;

use serde::Serialize;

use crate::color::Color;
use crate::conditions::Condition;
use crate::error::{Error, Result};

/// A concurrent game with colored transitions; tables are dense in `(q, a, b)`.
#[derive(Clone, Debug)]
pub struct Game {
    pub states: Vec<String>,
    pub p1: Vec<String>,
    pub p2: Vec<String>,
    pub initial: usize,
    pub condition: Arc<Condition>,
    delta: Vec<usize>,
    col: Vec<usize>,
}

impl Game {
    /// `delta[q][a][b]` and `col[q][a][b]` must be total.
    pub fn new(
        states: Vec<String>,
        p1: Vec<String>,
        p2: Vec<String>,
        initial: usize,
        condition: Arc<Condition>,
        delta: &[Vec<Vec<usize>>],
        col: &[Vec<Vec<usize>>],
    ) -> Result<Game> {
        let (nq, na, nb) = (states.len(), p1.len(), p2.len());
        if nq == 0 || na == 0 || nb == 0 {
            return Err(Error::Validation("states and action sets must be non-empty".into()));
        }
        if initial >= nq {
            return Err(Error::Validation(format!("initial state {initial} out of range")));
        }
        let nc = condition.alphabet().len();
        let mut fd = Vec::with_capacity(nq * na * nb);
        let mut fc = Vec::with_capacity(nq * na * nb);
        for q in 0..nq {
            for a in 0..na {
                for b in 0..nb {
                    let cell = |t: &[Vec<Vec<usize>>]| t.get(q).and_then(|r| r.get(a)).and_then(|r| r.get(b)).copied();
                    let (Some(d), Some(c)) = (cell(delta), cell(col)) else {
                        return Err(Error::Validation(format!("missing cell ({}, {}, {})", states[q], p1[a], p2[b])));
                    };
                    if d >= nq {
                        return Err(Error::Validation(format!("successor {d} out of range")));
                    }
                    if c >= nc {
                        return Err(Error::Validation(format!("color index {c} outside the alphabet")));
                    }
                    fd.push(d);
                    fc.push(c);
                }
            }
        }
        for t in [delta, col] {
            if t.len() != nq || t.iter().any(|r| r.len() != na || r.iter().any(|c| c.len() != nb)) {
                return Err(Error::Validation("table shape does not match declared states and actions".into()));
            }
        }
        Ok(Game { states, p1, p2, initial, condition, delta: fd, col: fc })
    }

    pub fn nq(&self) -> usize {
        self.states.len()
    }
    pub fn na(&self) -> usize {
        self.p1.len()
    }
    pub fn nb(&self) -> usize {
        self.p2.len()
    }
    pub fn alphabet(&self) -> &[Color] {
        self.condition.alphabet()
    }

    fn idx(&self, q: usize, a: usize, b: usize) -> usize {
        (q * self.na() + a) * self.nb() + b
    }
    pub fn delta(&self, q: usize, a: usize, b: usize) -> usize {
        self.delta[self.idx(q, a, b)]
    }
    pub fn col(&self, q: usize, a: usize, b: usize) -> usize {
        self.col[self.idx(q, a, b)]
    }
    /// `(color, successor)` of a cell.
    pub fn effect(&self, q: usize, a: usize, b: usize) -> (usize, usize) {
        let i = self.idx(q, a, b);
        (self.col[i], self.delta[i])
    }

    pub(crate) fn set_cell(&mut self, q: usize, a: usize, b: usize, color: usize, next: usize) {
        let i = self.idx(q, a, b);
        self.col[i] = color;
        self.delta[i] = next;
    }

    pub fn with_initial(&self, q: usize) -> Game {
        let mut g = self.clone();
        g.initial = q;
        g
    }

    pub fn with_condition(&self, condition: Arc<Condition>) -> Game {
        let mut g = self.clone();
        g.condition = condition;
        g
    }

    /// Nested `[q][a][b]` copies of the tables.
    pub fn tables(&self) -> (Vec<Vec<Vec<usize>>>, Vec<Vec<Vec<usize>>>) {
        let nest = |f: &dyn Fn(usize, usize, usize) -> usize| {
            (0..self.nq()).map(|q| (0..self.na()).map(|a| (0..self.nb()).map(|b| f(q, a, b)).collect()).collect()).collect()
        };
        (nest(&|q, a, b| self.delta(q, a, b)), nest(&|q, a, b| self.col(q, a, b)))
    }

    /// Equality of tables and initial state, ignoring names and condition.
    pub fn same_tables(&self, other: &Game) -> bool {
        self.delta == other.delta && self.col == other.col && self.initial == other.initial
    }
}

/// A game in which only Player 1 acts.
#[derive(Clone, Debug)]
pub struct OnePlayerGame {
    pub states: Vec<String>,
    pub p1: Vec<String>,
    pub initial: usize,
    pub condition: Arc<Condition>,
    pub delta: Vec<usize>,
    pub col: Vec<usize>,
}

impl OnePlayerGame {
    pub fn nq(&self) -> usize {
        self.states.len()
    }
    pub fn na(&self) -> usize {
        self.p1.len()
    }
    pub fn delta(&self, q: usize, a: usize) -> usize {
        self.delta[q * self.na() + a]
    }
    pub fn col(&self, q: usize, a: usize) -> usize {
        self.col[q * self.na() + a]
    }

    /// Views the one-player game as a concurrent game with a single Player 2 action.
    pub fn to_game(&self) -> Game {
        let delta: Vec<Vec<Vec<usize>>> = (0..self.nq()).map(|q| (0..self.na()).map(|a| vec![self.delta(q, a)]).collect()).collect();
        let col: Vec<Vec<Vec<usize>>> = (0..self.nq()).map(|q| (0..self.na()).map(|a| vec![self.col(q, a)]).collect()).collect();
        Game::new(self.states.clone(), self.p1.clone(), vec!["_".into()], self.initial, self.condition.clone(), &delta, &col)
            .expect("one-player tables are total")
    }
}

/// A one-state game; only colors matter.
#[derive(Clone, Debug)]
pub struct StatelessGame {
    pub p1: Vec<String>,
    pub p2: Vec<String>,
    pub condition: Arc<Condition>,
    pub col: Vec<Vec<usize>>,
}

impl StatelessGame {
    pub fn new(p1: Vec<String>, p2: Vec<String>, condition: Arc<Condition>, col: Vec<Vec<usize>>) -> Result<Self> {
        let g = StatelessGame { p1, p2, condition, col };
        g.to_game()?;
        Ok(g)
    }

    pub fn to_game(&self) -> Result<Game> {
        let delta: Vec<Vec<Vec<usize>>> = vec![self.col.iter().map(|r| vec![0; r.len()]).collect()];
        Game::new(vec!["q0".into()], self.p1.clone(), self.p2.clone(), 0, self.condition.clone(), &delta, std::slice::from_ref(&self.col))
    }
}

/// The infinite word `stem · cycle^ω` over color indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct UpWord {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl UpWord {
    pub fn new(stem: Vec<usize>, cycle: Vec<usize>) -> UpWord {
        assert!(!cycle.is_empty(), "cycle of an ultimately periodic word must be non-empty");
        UpWord { stem, cycle }
    }

    pub fn periodic(cycle: Vec<usize>) -> UpWord {
        UpWord::new(Vec::new(), cycle)
    }

    pub fn at(&self, i: usize) -> usize {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Position `i` folded into the presentation (`< stem + cycle`).
    pub fn fold(&self, i: usize) -> usize {
        if i < self.stem.len() {
            i
        } else {
            self.stem.len() + (i - self.stem.len()) % self.cycle.len()
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// The word with its first `k` letters removed.
    pub fn suffix(&self, k: usize) -> UpWord {
        if k <= self.stem.len() {
            return UpWord::new(self.stem[k..].to_vec(), self.cycle.clone());
        }
        let r = (k - self.stem.len()) % self.cycle.len();
        let mut c = self.cycle[r..].to_vec();
        c.extend_from_slice(&self.cycle[..r]);
        UpWord::periodic(c)
    }

    /// Shortest presentation: minimal period and stem.
    pub fn normalized(&self) -> UpWord {
        let n = self.cycle.len();
        let p = (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.cycle[i] == self.cycle[i - p])).unwrap_or(n);
        let mut stem = self.stem.clone();
        let mut cycle = self.cycle[..p].to_vec();
        while let (Some(&s), Some(&c)) = (stem.last(), cycle.last()) {
            if s != c {
                break;
            }
            stem.pop();
            cycle.rotate_right(1);
        }
        UpWord { stem, cycle }
    }

    pub fn letters(&self) -> std::collections::BTreeSet<usize> {
        self.cycle.iter().copied().collect()
    }
}

/// Replays an action-pair sequence from the initial state.
pub fn run_trace(g: &Game, actions: &[(usize, usize)]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut h = FullHistory::new(g);
    for &(a, b) in actions {
        h.push(g, a, b)?;
    }
    Ok((h.states, h.colors))
}

/// A finite play with its state sequence and color trace kept in step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullHistory {
    pub actions: Vec<(usize, usize)>,
    pub states: Vec<usize>,
    pub colors: Vec<usize>,
}

impl FullHistory {
    pub fn new(g: &Game) -> FullHistory {
        FullHistory { actions: Vec::new(), states: vec![g.initial], colors: Vec::new() }
    }

    pub fn current(&self) -> usize {
        *self.states.last().expect("history has a state")
    }

    pub fn push(&mut self, g: &Game, a: usize, b: usize) -> Result<()> {
        if a >= g.na() || b >= g.nb() {
            return Err(Error::Validation(format!("action pair ({a}, {b}) out of range")));
        }
        let (c, n) = g.effect(self.current(), a, b);
        self.actions.push((a, b));
        self.states.push(n);
        self.colors.push(c);
        Ok(())
    }
}

/// Report produced by [`normalize_game`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NormalizationReport {
    pub merged_colors: Vec<String>,
    pub canonicalized_colors: Vec<String>,
}

/// Canonicalizes color values and merges duplicate alphabet entries.
pub fn normalize_game(g: &Game) -> Result<(Game, NormalizationReport)> {
    let mut report = NormalizationReport::default();
    let mut alphabet: Vec<Color> = Vec::new();
    let mut remap = Vec::new();
    for c in g.alphabet() {
        let canon = c.clone().canonical();
        if &canon != c {
            report.canonicalized_colors.push(c.to_string());
        }
        match alphabet.iter().position(|x| *x == canon) {
            Some(i) => {
                report.merged_colors.push(canon.to_string());
                remap.push(i);
            }
            None => {
                alphabet.push(canon);
                remap.push(alphabet.len() - 1);
            }
        }
    }
    let condition = Arc::new(Condition::build(g.condition.spec().clone(), alphabet)?);
    let (delta, col) = g.tables();
    let col: Vec<Vec<Vec<usize>>> =
        col.into_iter().map(|r| r.into_iter().map(|c| c.into_iter().map(|x| remap[x]).collect()).collect()).collect();
    let out = Game::new(g.states.clone(), g.p1.clone(), g.p2.clone(), g.initial, condition, &delta, &col)?;
    Ok((out, report))
}
