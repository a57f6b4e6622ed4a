//! Brute-force ground truth for small games.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::conditions::{Kind, Monitor};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{Game, UpWord};
use crate::strategy::MemoryStrategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVerdict {
    P1ForcedWin,
    P1ForcedLoss,
    Unknown,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Val {
    Loss,
    Unknown,
    Win,
}

struct Minimax<'a> {
    g: &'a Game,
    closes: bool,
    configs: Vec<(usize, Option<Vec<i128>>)>,
    colors: Vec<usize>,
}

impl Minimax<'_> {
    fn p1(&mut self, q: usize, mon: &dyn Monitor, left: usize) -> Val {
        let mut best = Val::Loss;
        for a in 0..self.g.na() {
            let mut worst = Val::Win;
            for b in 0..self.g.nb() {
                worst = worst.min(self.child(q, a, b, mon, left));
                if worst == Val::Loss {
                    break;
                }
            }
            best = best.max(worst);
            if best == Val::Win {
                break;
            }
        }
        best
    }

    fn child(&mut self, q: usize, a: usize, b: usize, mon: &dyn Monitor, left: usize) -> Val {
        let (c, q2) = self.g.effect(q, a, b);
        let mut m = mon.clone_box();
        m.step(c);
        if m.violated() {
            return Val::Loss;
        }
        self.colors.push(c);
        let key = m.key();
        let v = match self.configs.iter().position(|x| self.closes && key.is_some() && x.0 == q2 && x.1 == key) {
            Some(i) => {
                let w = UpWord::new(self.colors[..i].to_vec(), self.colors[i..].to_vec());
                if self.g.condition.up_member(&w) {
                    Val::Win
                } else {
                    Val::Loss
                }
            }
            None if left <= 1 => Val::Unknown,
            None => {
                self.configs.push((q2, key));
                let v = self.p1(q2, m.as_ref(), left - 1);
                self.configs.pop();
                v
            }
        };
        self.colors.pop();
        v
    }
}

/// Game-tree search of the sequential game where Player 1 commits first.
/// Histories end at a monitor violation or, for conditions decided by their first cycle,
/// at the first repeated (state, monitor) configuration.
pub fn minimax_bounded(g: &Game, depth: usize) -> OracleVerdict {
    let mon = g.condition.monitor();
    let mut mm = Minimax { g, closes: g.condition.cycle_closure_sound(), configs: vec![(g.initial, mon.key())], colors: Vec::new() };
    match mm.p1(g.initial, mon.as_ref(), depth.max(1)) {
        Val::Win => OracleVerdict::P1ForcedWin,
        Val::Loss => OracleVerdict::P1ForcedLoss,
        Val::Unknown => OracleVerdict::Unknown,
    }
}

/// Turn-based arena: Player 1 nodes `q`, Player 2 nodes `(q,a)`, colored nodes `(q,a,b)`.
struct Arena {
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    owner: Vec<u8>,
    color: Vec<Option<usize>>,
}

impl Arena {
    fn new(g: &Game) -> Arena {
        let (nq, na, nb) = (g.nq(), g.na(), g.nb());
        let n = nq + nq * na + nq * na * nb;
        let mut succ = vec![Vec::new(); n];
        let mut owner = vec![0u8; n];
        let mut color = vec![None; n];
        for q in 0..nq {
            for a in 0..na {
                let qa = nq + q * na + a;
                succ[q].push(qa);
                owner[qa] = 1;
                for b in 0..nb {
                    let e = nq + nq * na + (q * na + a) * nb + b;
                    succ[qa].push(e);
                    let (c, t) = g.effect(q, a, b);
                    color[e] = Some(c);
                    succ[e].push(t);
                }
            }
        }
        let mut pred = vec![Vec::new(); n];
        for (v, ss) in succ.iter().enumerate() {
            for &s in ss {
                pred[s].push(v);
            }
        }
        Arena { succ, pred, owner, color }
    }

    fn attractor(&self, player: u8, alive: &[bool], target: &[bool]) -> Vec<bool> {
        let mut attr: Vec<bool> = target.iter().zip(alive).map(|(&t, &a)| t && a).collect();
        let mut stack: Vec<usize> = (0..attr.len()).filter(|&v| attr[v]).collect();
        let mut count: Vec<usize> = (0..attr.len()).map(|v| self.succ[v].iter().filter(|&&s| alive[s]).count()).collect();
        while let Some(v) = stack.pop() {
            for &p in &self.pred[v] {
                if !alive[p] || attr[p] {
                    continue;
                }
                count[p] -= 1;
                if self.owner[p] == player || count[p] == 0 {
                    attr[p] = true;
                    stack.push(p);
                }
            }
        }
        attr
    }

    /// Winning regions `[player 1, player 2]` of the subarena `alive`.
    fn solve(&self, alive: &[bool], wins: &dyn Fn(u64) -> bool) -> [Vec<bool>; 2] {
        let n = alive.len();
        if !alive.iter().any(|&a| a) {
            return [vec![false; n], vec![false; n]];
        }
        let colors = (0..n).filter(|&v| alive[v]).filter_map(|v| self.color[v]).fold(0u64, |m, c| m | 1 << c);
        let sigma = if wins(colors) { 0u8 } else { 1 };
        let other = 1 - sigma;
        for c in (0..64).filter(|c| colors >> c & 1 == 1) {
            let target: Vec<bool> = (0..n).map(|v| self.color[v] == Some(c)).collect();
            let a = self.attractor(sigma, alive, &target);
            let sub: Vec<bool> = (0..n).map(|v| alive[v] && !a[v]).collect();
            let w = self.solve(&sub, wins);
            if w[other as usize].iter().any(|&x| x) {
                let b = self.attractor(other, alive, &w[other as usize]);
                let rest: Vec<bool> = (0..n).map(|v| alive[v] && !b[v]).collect();
                let mut r = self.solve(&rest, wins);
                for v in 0..n {
                    if b[v] {
                        r[other as usize][v] = true;
                    }
                }
                return r;
            }
        }
        let mut out = [vec![false; n], vec![false; n]];
        out[sigma as usize] = alive.to_vec();
        out
    }
}

/// Largest alphabet handled by the exact Muller solver.
pub const EXACT_COLOR_CAP: usize = 16;

/// Exact winner for conditions given by the set of colors seen infinitely often.
pub fn solve_muller_exact(g: &Game) -> Option<bool> {
    if g.alphabet().len() > EXACT_COLOR_CAP {
        return None;
    }
    let wins: Box<dyn Fn(u64) -> bool> = match &g.condition.kind {
        Kind::All => Box::new(|_| true),
        Kind::Parity(p) => {
            let p = p.clone();
            Box::new(move |m| (0..64).filter(|c| m >> c & 1 == 1).map(|c| p[c]).min().is_some_and(|x| x.rem_euclid(2) == 0))
        }
        Kind::Muller(masks) => {
            let masks = masks.clone();
            Box::new(move |m| masks.contains(&m))
        }
        _ => return None,
    };
    let arena = Arena::new(g);
    let w = arena.solve(&vec![true; arena.succ.len()], wins.as_ref());
    Some(w[0][g.initial])
}

/// Exact verdict where available, otherwise the bounded game-tree search.
pub fn oracle_verdict(g: &Game, depth: usize) -> OracleVerdict {
    match solve_muller_exact(g) {
        Some(true) => OracleVerdict::P1ForcedWin,
        Some(false) => OracleVerdict::P1ForcedLoss,
        None => minimax_bounded(g, depth),
    }
}

/// Product of the strategy with the game; Player 2 picks every edge.
fn product(g: &Game, s: &MemoryStrategy) -> (Graph, usize) {
    let id = |q: usize, m: usize| q * s.memory_count + m;
    let mut gr = Graph::new(g.nq() * s.memory_count);
    for q in 0..g.nq() {
        for m in 0..s.memory_count {
            let a = s.action(q, m);
            for b in 0..g.nb() {
                let (c, t) = g.effect(q, a, b);
                gr.out[id(q, m)].push((b, id(t, s.update(q, m, b)), c));
            }
        }
    }
    (gr, id(g.initial, s.m0))
}

/// Least partial sum over all paths from `start`, `None` if a reachable cycle is negative.
fn min_partial_sum(gr: &Graph, start: usize, w: &[i128]) -> Option<i128> {
    let n = gr.len();
    let mut dist: Vec<Option<i128>> = vec![None; n];
    dist[start] = Some(0);
    for round in 0..=n {
        let mut changed = false;
        for v in 0..n {
            let Some(dv) = dist[v] else { continue };
            for e in &gr.out[v] {
                let cand = dv + w[e.2];
                if dist[e.1].is_none_or(|x| cand < x) {
                    dist[e.1] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            return dist.iter().flatten().copied().min();
        }
        if round == n {
            return None;
        }
    }
    None
}

/// Whether all reachable cycles have zero vector sum.
fn zero_cycles(gr: &Graph, start: usize, v: &[Vec<i128>]) -> bool {
    let reach = gr.reachable(start);
    let comp = gr.sccs(&reach, &|_, _| true);
    let dim = v.first().map_or(0, Vec::len);
    let mut pot: Vec<Option<Vec<i128>>> = vec![None; gr.len()];
    for root in (0..gr.len()).filter(|&r| reach[r]) {
        if pot[root].is_some() {
            continue;
        }
        pot[root] = Some(vec![0; dim]);
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            let px = pot[x].clone().expect("assigned");
            for e in gr.out[x].iter().filter(|e| comp[e.1] == comp[x]) {
                let mut p = px.clone();
                crate::color::add_into(&mut p, &v[e.2]);
                match &pot[e.1] {
                    Some(q) if *q != p => return false,
                    Some(_) => {}
                    None => {
                        pot[e.1] = Some(p);
                        stack.push(e.1);
                    }
                }
            }
        }
    }
    true
}

/// Exact check that `s` wins against every Player 2 behaviour.
pub fn verify_strategy(g: &Game, s: &MemoryStrategy) -> Result<bool> {
    s.check(g)?;
    let (gr, start) = product(g, s);
    Ok(match &g.condition.kind {
        Kind::All => true,
        Kind::Parity(p) => gr.parity_lasso(start, &|c| p[c] + 1).is_none(),
        Kind::Muller(masks) => {
            let n = g.alphabet().len();
            if n > EXACT_COLOR_CAP {
                return Err(Error::Guard(format!("{n} colors exceed the Muller check cap")));
            }
            let losing: Vec<u64> = (1..1u64 << n).filter(|m| !masks.contains(m)).collect();
            gr.muller_cycle(start, &losing).is_none()
        }
        Kind::Energy(w) => min_partial_sum(&gr, start, w).is_some_and(|x| x >= 0),
        Kind::MeanPayoff(w) => min_partial_sum(&gr, start, w).is_some(),
        Kind::Bounded { v, bound: None, .. } => zero_cycles(&gr, start, v),
        _ => return Err(Error::Refused(format!("no exact product check for `{}`", g.condition.name()))),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Enumeration {
    pub winning: Option<MemoryStrategy>,
    pub memory_bound: usize,
    pub candidates: u64,
}

/// Update tables for memory size `k` whose memories appear in breadth-first order and are all reachable.
fn canonical_updates(slots: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, used: usize, slots: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == slots {
            if used == k {
                out.push(cur.clone());
            }
            return;
        }
        for t in 0..=used.min(k - 1) {
            cur.push(t);
            rec(i + 1, used.max(t + 1), slots, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, 1, slots, k, &mut Vec::new(), &mut out);
    out
}

/// Searches every strategy with at most `memory_bound` memory states for a verified winner.
pub fn enumerate_strategies(g: &Game, memory_bound: usize, guard: f64) -> Result<Enumeration> {
    let (nq, na, nb) = (g.nq(), g.na(), g.nb());
    let mut candidates = 0u64;
    for k in 1..=memory_bound {
        let fact: f64 = (1..k).map(|x| x as f64).product();
        let est = (na as f64).powi((nq * k) as i32) * (k as f64).powi((nq * k * nb) as i32) / fact;
        if est > guard {
            return Err(Error::Guard(format!("about {est:.0} tables with memory {k} exceed the guard {guard:.0}")));
        }
        // Slots ordered memory-major so that the canonical numbering follows first use.
        let slot = |m: usize, q: usize, b: usize| (m * nq + q) * nb + b;
        let updates = canonical_updates(nq * k * nb, k);
        let sigmas = crate::responses::product(&vec![na; nq * k]);
        let tables: Vec<(usize, usize)> = (0..updates.len()).flat_map(|u| (0..sigmas.len()).map(move |s| (u, s))).collect();
        candidates += tables.len() as u64;
        let build = |&(u, si): &(usize, usize)| MemoryStrategy {
            memory_count: k,
            m0: 0,
            sigma: (0..nq).map(|q| (0..k).map(|m| sigmas[si][m * nq + q]).collect()).collect(),
            mu: (0..nq).map(|q| (0..k).map(|m| (0..nb).map(|b| updates[u][slot(m, q, b)]).collect()).collect()).collect(),
        };
        let found = tables.par_iter().map(build).find_first(|s| verify_strategy(g, s).unwrap_or(false));
        if let Some(s) = found {
            verify_strategy(g, &s)?;
            return Ok(Enumeration { winning: Some(s), memory_bound, candidates });
        }
    }
    Ok(Enumeration { winning: None, memory_bound, candidates })
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeCheck {
    pub survived: bool,
    pub depth: usize,
    pub histories: u64,
    pub cycles_checked: u64,
    pub counterexample: Option<Vec<usize>>,
}

/// Plays `s` against every Player 2 word of length `depth`; fails on a monitor violation or on a
/// repeated (state, memory) whose loop, repeated forever, is losing.
pub fn strategy_tree_check(g: &Game, s: &MemoryStrategy, depth: usize) -> TreeCheck {
    struct Walk<'a> {
        g: &'a Game,
        s: &'a MemoryStrategy,
        depth: usize,
        configs: Vec<(usize, usize)>,
        colors: Vec<usize>,
        beta: Vec<usize>,
        out: TreeCheck,
        judged: HashMap<Vec<usize>, bool>,
    }
    impl Walk<'_> {
        fn judge(&mut self, i: usize) -> bool {
            if let Some(&won) = self.judged.get(&self.colors[i..]) {
                return won;
            }
            match self.g.condition.loop_member(&self.colors[i..]) {
                Some(won) => {
                    self.judged.insert(self.colors[i..].to_vec(), won);
                    won
                }
                None => self.g.condition.up_member(&UpWord::new(self.colors[..i].to_vec(), self.colors[i..].to_vec())),
            }
        }
        fn go(&mut self, q: usize, m: usize, mon: &dyn Monitor) -> bool {
            if self.beta.len() == self.depth {
                self.out.histories += 1;
                return true;
            }
            let a = self.s.action(q, m);
            for b in 0..self.g.nb() {
                let (c, q2) = self.g.effect(q, a, b);
                let m2 = self.s.update(q, m, b);
                let mut mon2 = mon.clone_box();
                mon2.step(c);
                self.beta.push(b);
                self.colors.push(c);
                let mut ok = !mon2.violated();
                if ok {
                    if let Some(i) = self.configs.iter().position(|&x| x == (q2, m2)) {
                        self.out.cycles_checked += 1;
                        ok = self.judge(i);
                    }
                }
                if !ok {
                    self.out.counterexample = Some(self.beta.clone());
                    return false;
                }
                self.configs.push((q2, m2));
                let cont = self.go(q2, m2, mon2.as_ref());
                self.configs.pop();
                self.colors.pop();
                self.beta.pop();
                if !cont {
                    return false;
                }
            }
            true
        }
    }
    let mon = g.condition.monitor();
    let mut w = Walk {
        g,
        s,
        depth,
        configs: vec![(g.initial, s.m0)],
        colors: Vec::new(),
        beta: Vec::new(),
        out: TreeCheck { survived: false, depth, histories: 0, cycles_checked: 0, counterexample: None },
        judged: HashMap::new(),
    };
    w.out.survived = w.go(g.initial, s.m0, mon.as_ref());
    w.out
}
