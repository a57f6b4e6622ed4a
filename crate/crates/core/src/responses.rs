//! Effect sets, delayed responses and the games derived from them.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Game, OnePlayerGame};

/// Default bound on the number of delayed responses enumerated.
pub const DEFAULT_CAP: u64 = 1_000_000;

/// The `(color, successor)` pairs Player 2 can induce against one Player 1 action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EffectSet {
    pub state: usize,
    /// Sorted, deduplicated `(color, successor)` pairs.
    pub pairs: Vec<(usize, usize)>,
    /// Player 1 actions sharing this set, increasing.
    pub actions: Vec<usize>,
}

impl EffectSet {
    pub fn representative(&self) -> usize {
        self.actions[0]
    }
}

/// Effect sets of `q` in lexicographic order of their pair lists.
pub fn effect_sets(g: &Game, q: usize) -> Vec<EffectSet> {
    let mut sets: Vec<EffectSet> = Vec::new();
    for a in 0..g.na() {
        let mut pairs: Vec<(usize, usize)> = (0..g.nb()).map(|b| g.effect(q, a, b)).collect();
        pairs.sort_unstable();
        pairs.dedup();
        match sets.iter_mut().find(|s| s.pairs == pairs) {
            Some(s) => s.actions.push(a),
            None => sets.push(EffectSet { state: q, pairs, actions: vec![a] }),
        }
    }
    sets.sort_by(|x, y| x.pairs.cmp(&y.pairs));
    sets
}

/// States with a non-singleton effect set.
pub fn states_involving_p2(g: &Game) -> Vec<usize> {
    (0..g.nq()).filter(|&q| effect_sets(g, q).iter().any(|s| s.pairs.len() > 1)).collect()
}

/// All effect sets of a game with the action-to-set lookup.
#[derive(Clone, Debug)]
pub struct ResponseSpace {
    pub sets: Vec<Vec<EffectSet>>,
    /// `set_of[q][a]` is the index of the effect set of `a` at `q`.
    pub set_of: Vec<Vec<usize>>,
    radices: Vec<usize>,
}

/// One pair chosen in every effect set of every state; `choice[q][i]` indexes `sets[q][i].pairs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DelayedResponse {
    pub choice: Vec<Vec<usize>>,
}

impl ResponseSpace {
    pub fn new(g: &Game) -> ResponseSpace {
        let sets: Vec<Vec<EffectSet>> = (0..g.nq()).map(|q| effect_sets(g, q)).collect();
        let set_of = sets
            .iter()
            .map(|ss| {
                let mut v = vec![0; g.na()];
                for (i, s) in ss.iter().enumerate() {
                    for &a in &s.actions {
                        v[a] = i;
                    }
                }
                v
            })
            .collect();
        let radices = sets.iter().flatten().map(|s| s.pairs.len()).collect();
        ResponseSpace { sets, set_of, radices }
    }

    pub fn count(&self) -> BigUint {
        self.radices.iter().fold(BigUint::one(), |acc, &r| acc * r)
    }

    /// The response at `index` in mixed-radix order, last effect set varying fastest.
    pub fn nth(&self, mut index: u64) -> Option<DelayedResponse> {
        if BigUint::from(index) >= self.count() {
            return None;
        }
        let mut digits = vec![0usize; self.radices.len()];
        for (d, &r) in digits.iter_mut().zip(&self.radices).rev() {
            *d = (index % r as u64) as usize;
            index /= r as u64;
        }
        let mut it = digits.into_iter();
        let choice = self.sets.iter().map(|ss| ss.iter().map(|_| it.next().unwrap()).collect()).collect();
        Some(DelayedResponse { choice })
    }

    /// Iterator over all responses starting at `offset`; fails above `cap`.
    pub fn iter_from(&self, offset: u64, cap: u64) -> Result<ResponseIter<'_>> {
        let count = self.count();
        if count > BigUint::from(cap) {
            return Err(Error::Cap { count: count.to_string(), cap });
        }
        Ok(ResponseIter { space: self, next: offset, end: count.to_u64().expect("below cap") })
    }

    pub fn pair(&self, t: &DelayedResponse, q: usize, a: usize) -> (usize, usize) {
        let i = self.set_of[q][a];
        self.sets[q][i].pairs[t.choice[q][i]]
    }

    /// Position of `t` in enumeration order, for products of any size.
    pub fn index_big(&self, t: &DelayedResponse) -> BigUint {
        let digits = t.choice.iter().flatten();
        digits.zip(&self.radices).fold(BigUint::from(0u32), |acc, (&d, &r)| acc * r + d)
    }

    pub fn index_of(&self, t: &DelayedResponse) -> u64 {
        let digits = t.choice.iter().flatten();
        digits.zip(&self.radices).fold(0u64, |acc, (&d, &r)| acc * r as u64 + d as u64)
    }

    /// All delayed responses restricted to `q`, in mixed-radix order.
    pub fn q_responses(&self, q: usize) -> Vec<Vec<usize>> {
        let radices: Vec<usize> = self.sets[q].iter().map(|s| s.pairs.len()).collect();
        product(&radices)
    }
}

/// All tuples below `radices`, last coordinate varying fastest.
pub fn product(radices: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &r in radices {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..r).map(move |x| {
                    let mut p = p.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// Lazy, cloneable enumeration of delayed responses.
#[derive(Clone, Debug)]
pub struct ResponseIter<'a> {
    space: &'a ResponseSpace,
    next: u64,
    end: u64,
}

impl Iterator for ResponseIter<'_> {
    type Item = (u64, DelayedResponse);
    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let i = self.next;
        self.next += 1;
        Some((i, self.space.nth(i).expect("index below count")))
    }
}

/// The one-player game in which Player 2 answers according to `t`.
pub fn derive(g: &Game, space: &ResponseSpace, t: &DelayedResponse) -> OnePlayerGame {
    let (mut delta, mut col) = (Vec::new(), Vec::new());
    for q in 0..g.nq() {
        for a in 0..g.na() {
            let (c, n) = space.pair(t, q, a);
            col.push(c);
            delta.push(n);
        }
    }
    OnePlayerGame { states: g.states.clone(), p1: g.p1.clone(), initial: g.initial, condition: g.condition.clone(), delta, col }
}

/// `g` with every cell at `q` replaced by the choice of `e` for its row's effect set.
pub fn derive_at_state(g: &Game, space: &ResponseSpace, q: usize, e: &[usize]) -> Game {
    let mut out = g.clone();
    for a in 0..g.na() {
        let i = space.set_of[q][a];
        let (c, n) = space.sets[q][i].pairs[e[i]];
        for b in 0..g.nb() {
            out.set_cell(q, a, b, c, n);
        }
    }
    out
}
