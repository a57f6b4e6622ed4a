//! Muller to parity through last-appearance records.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::color::Color;
use crate::conditions::{CondSpec, Condition, Kind};
use crate::error::{Error, Result};
use crate::model::Game;

/// Largest alphabet accepted by [`lar_expand`].
pub const LAR_COLOR_CAP: usize = 7;

#[derive(Clone, Debug)]
pub struct LarGame {
    pub game: Game,
    /// `(state, record, hit)` of each expanded state.
    pub records: Vec<(usize, Vec<usize>, usize)>,
    pub bound: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LarSummary {
    pub reachable_states: usize,
    pub bound: u64,
}

impl LarGame {
    pub fn summary(&self) -> LarSummary {
        LarSummary { reachable_states: self.records.len(), bound: self.bound }
    }
}

/// Product with records of the most recent color order; priority `2(n-1-h) + [moved prefix ∉ M]` for a hit at `h`.
pub fn lar_expand(g: &Game, cap: usize) -> Result<LarGame> {
    let Kind::Muller(masks) = &g.condition.kind else {
        return Err(Error::Validation(format!("LAR expansion needs a Muller condition, found `{}`", g.condition.name())));
    };
    let n = g.alphabet().len();
    if n > cap {
        return Err(Error::Cap { count: format!("{n} colors"), cap: cap as u64 });
    }
    let fact: u64 = (1..=n as u64).product();
    let bound = g.nq() as u64 * n as u64 * fact;
    let alphabet: Vec<Color> = (0..2 * n as i64).map(Color::Int).collect();
    let cond = Arc::new(Condition::build(CondSpec::Parity, alphabet)?);
    let start = (g.initial, (0..n).collect::<Vec<usize>>(), 0usize);
    let mut index: HashMap<(usize, Vec<usize>, usize), usize> = HashMap::from([(start.clone(), 0)]);
    let mut records = vec![start];
    let mut delta: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut col: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut i = 0;
    while i < records.len() {
        let (q, perm, _) = records[i].clone();
        let mut drows = Vec::new();
        let mut crows = Vec::new();
        for a in 0..g.na() {
            let mut dr = Vec::new();
            let mut cr = Vec::new();
            for b in 0..g.nb() {
                let (c, q2) = g.effect(q, a, b);
                let h = perm.iter().position(|&x| x == c).expect("record is a permutation");
                let mut p2 = perm.clone();
                p2.remove(h);
                p2.insert(0, c);
                let moved: u64 = p2[..=h].iter().fold(0, |m, &x| m | 1 << x);
                let prio = 2 * (n - 1 - h) + usize::from(!masks.contains(&moved));
                let key = (q2, p2, h);
                let id = *index.entry(key.clone()).or_insert_with(|| {
                    records.push(key);
                    records.len() - 1
                });
                dr.push(id);
                cr.push(prio);
            }
            drows.push(dr);
            crows.push(cr);
        }
        delta.push(drows);
        col.push(crows);
        i += 1;
    }
    let names = records
        .iter()
        .map(|(q, p, h)| {
            let p: Vec<String> = p.iter().map(|&c| g.alphabet()[c].to_string()).collect();
            format!("{}|{}|{h}", g.states[*q], p.join("."))
        })
        .collect();
    let game = Game::new(names, g.p1.clone(), g.p2.clone(), 0, cond, &delta, &col)?;
    Ok(LarGame { game, records, bound })
}
