//! Compound strategies that interleave winning strategies of simpler games.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use serde::Serialize;

use super::select::{fpi_select, Selection};
use super::{require, DecideOptions};
use crate::conditions::Axiom;
use crate::error::{Error, Result};
use crate::model::Game;
use crate::responses::{derive, derive_at_state, states_involving_p2, ResponseSpace};
use crate::solver1p::{lasso_to_strategy, solve_one_player, Lasso, Outcome1p};
use crate::strategy::MemoryStrategy;

/// Upper bound on the realized memory of one compound machine.
pub const MEMORY_CAP: usize = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelKind {
    /// No state involves Player 2; the lasso of the unique derived game is replayed.
    Base,
    /// A sub-strategy never reaches the split state and is used as is.
    Avoid,
    /// `d` sub-strategies interleaved through the split state.
    Compound,
}

/// Memory accounting for one node of the synthesis tree.
#[derive(Clone, Debug, Serialize)]
pub struct Level {
    pub depth: usize,
    pub kind: LevelKind,
    pub split_state: Option<String>,
    /// Number of responses at the split state.
    pub d: usize,
    /// Largest sub-strategy memory (the lasso length for base nodes).
    pub sub_memory: usize,
    /// `sub_memory^d · d` for compound nodes.
    pub nominal_memory: String,
    /// `d·log2(sub_memory) + log2(d)`.
    pub memory_bits: f64,
    /// Memory states actually reachable and tabulated.
    pub realized_memory: usize,
}

impl Level {
    /// Exact check of the nominal size against its defining product.
    pub fn accounting_holds(&self) -> bool {
        let expect = match self.kind {
            LevelKind::Compound => BigUint::from(self.sub_memory).pow(self.d as u32) * BigUint::from(self.d),
            _ => BigUint::from(self.sub_memory),
        };
        let bits = self.d as f64 * (self.sub_memory as f64).log2() + (self.d as f64).log2();
        expect.to_string() == self.nominal_memory
            && (self.kind != LevelKind::Compound || (bits - self.memory_bits).abs() < 1e-9)
            && BigUint::from(self.realized_memory) <= expect
    }
}

#[derive(Clone, Debug)]
pub struct SynthNode {
    pub game: Game,
    pub kind: LevelKind,
    pub strategy: MemoryStrategy,
    pub split: Option<usize>,
    pub children: Vec<SynthNode>,
    /// Start state and memory of each child inside the compound machine.
    pub starts: Vec<(usize, usize)>,
    /// Compound memory index to (child memories, active child).
    pub decode: Vec<(Vec<u32>, u32)>,
    pub lasso: Option<Lasso>,
}

#[derive(Clone, Debug)]
pub struct Synthesis {
    pub strategy: MemoryStrategy,
    pub levels: Vec<Level>,
    pub root: SynthNode,
}

/// Builds a finite-memory winning strategy by induction on the states involving Player 2.
pub fn synthesize(g: &Game, opts: &DecideOptions) -> Result<Synthesis> {
    require(g, &[Axiom::Interleaving, Axiom::PrefixRemoval])?;
    let mut levels = Vec::new();
    let root = node(g, opts, 0, &mut levels)?;
    root.strategy.check(g)?;
    Ok(Synthesis { strategy: root.strategy.clone(), levels, root })
}

fn node(g: &Game, opts: &DecideOptions, depth: usize, levels: &mut Vec<Level>) -> Result<SynthNode> {
    let involved = states_involving_p2(g);
    let space = ResponseSpace::new(g);
    let Some(&q1) = involved.first() else {
        let t = space.nth(0).expect("one response");
        let sol = solve_one_player(&derive(g, &space, &t), opts.bounds);
        let lasso = match (sol.verdict, sol.lasso) {
            (Outcome1p::Win, Some(l)) => l,
            (Outcome1p::Lose, _) => return Err(Error::Validation(format!("Player 1 loses the derived game {:?}", t.choice))),
            _ => return Err(Error::Inconclusive(format!("derived game {:?} unresolved by {}", t.choice, sol.method))),
        };
        let strategy = lasso_to_strategy(&lasso, g.nq(), g.nb());
        let n = strategy.memory_count;
        levels.push(Level {
            depth,
            kind: LevelKind::Base,
            split_state: None,
            d: 1,
            sub_memory: n,
            nominal_memory: n.to_string(),
            memory_bits: (n as f64).log2(),
            realized_memory: n,
        });
        return Ok(SynthNode {
            game: g.clone(),
            kind: LevelKind::Base,
            strategy,
            split: None,
            children: Vec::new(),
            starts: Vec::new(),
            decode: Vec::new(),
            lasso: Some(lasso),
        });
    };
    let at = levels.len();
    levels.push(Level {
        depth,
        kind: LevelKind::Compound,
        split_state: Some(g.states[q1].clone()),
        d: 0,
        sub_memory: 0,
        nominal_memory: String::new(),
        memory_bits: 0.0,
        realized_memory: 0,
    });
    let responses = space.q_responses(q1);
    let mut children = Vec::new();
    let mut starts = Vec::new();
    for (k, e) in responses.iter().enumerate() {
        let ge = derive_at_state(g, &space, q1, e);
        let child = node(&ge, opts, depth + 1, levels)?;
        match first_memory_at(g, &child.strategy, q1) {
            None => {
                let strategy = child.strategy.clone();
                let n = strategy.memory_count;
                levels[at] = Level {
                    kind: LevelKind::Avoid,
                    d: 1,
                    sub_memory: n,
                    nominal_memory: n.to_string(),
                    memory_bits: (n as f64).log2(),
                    realized_memory: n,
                    ..levels[at].clone()
                };
                return Ok(SynthNode {
                    game: g.clone(),
                    kind: LevelKind::Avoid,
                    strategy,
                    split: Some(q1),
                    children: vec![child],
                    starts: vec![(g.initial, 0)],
                    decode: Vec::new(),
                    lasso: None,
                });
            }
            Some(m) => {
                starts.push(if k == 0 { (g.initial, child.strategy.m0) } else { (q1, m) });
                children.push(child);
            }
        }
    }
    let (strategy, decode) = compound(g, &space, q1, &children, &starts)?;
    let d = children.len();
    let sub = children.iter().map(|c| c.strategy.memory_count).max().unwrap_or(1);
    levels[at] = Level {
        d,
        sub_memory: sub,
        nominal_memory: (BigUint::from(sub).pow(d as u32) * BigUint::from(d)).to_string(),
        memory_bits: d as f64 * (sub as f64).log2() + (d as f64).log2(),
        realized_memory: strategy.memory_count,
        ..levels[at].clone()
    };
    Ok(SynthNode { game: g.clone(), kind: LevelKind::Compound, strategy, split: Some(q1), children, starts, decode, lasso: None })
}

/// Memory of the first visit to `q1` in a breadth-first exploration from the start; `None` if never visited.
fn first_memory_at(g: &Game, s: &MemoryStrategy, q1: usize) -> Option<usize> {
    let mut seen = vec![vec![false; s.memory_count]; g.nq()];
    let mut queue = VecDeque::from([(g.initial, s.m0)]);
    seen[g.initial][s.m0] = true;
    while let Some((q, m)) = queue.pop_front() {
        if q == q1 {
            return Some(m);
        }
        let a = s.action(q, m);
        for b in 0..g.nb() {
            let (q2, m2) = (g.delta(q, a, b), s.update(q, m, b));
            if !seen[q2][m2] {
                seen[q2][m2] = true;
                queue.push_back((q2, m2));
            }
        }
    }
    None
}

struct Compound<'a> {
    g: &'a Game,
    q1: usize,
    subs: Vec<&'a MemoryStrategy>,
    sizes: Vec<usize>,
    reps: Vec<usize>,
    set_of: &'a [usize],
    pairs: Vec<&'a [(usize, usize)]>,
    cache: HashMap<Vec<usize>, Selection>,
}

impl Compound<'_> {
    fn index(&self, y: &[usize]) -> usize {
        y.iter().zip(&self.sizes).fold(0, |acc, (&x, &r)| acc * r + x)
    }

    fn select(&mut self, mem: &[u32]) -> Selection {
        let f: Vec<usize> = self.subs.iter().zip(mem).map(|(s, &m)| self.set_of[s.action(self.q1, m as usize)]).collect();
        if let Some(s) = self.cache.get(&f) {
            return s.clone();
        }
        let sizes = self.sizes.clone();
        let table = f.clone();
        let sel = fpi_select(&|y| table[self.index(y)], &sizes);
        debug_assert!(sel.validate(&|y| table[self.index(y)], &sizes));
        self.cache.insert(f, sel.clone());
        sel
    }

    fn action(&mut self, q: usize, mem: &(Vec<u32>, u32)) -> usize {
        if q == self.q1 {
            let i = self.select(&mem.0).index;
            self.reps[i]
        } else {
            let k = mem.1 as usize;
            self.subs[k].action(q, mem.0[k] as usize)
        }
    }

    fn update(&mut self, q: usize, mem: &(Vec<u32>, u32), b: usize) -> (Vec<u32>, u32) {
        let k = if q == self.q1 {
            let sel = self.select(&mem.0);
            let x = self.g.effect(self.q1, self.reps[sel.index], b);
            let xi = self.pairs[sel.index].iter().position(|&p| p == x).expect("effect in its set");
            self.index(&sel.witnesses[xi])
        } else {
            mem.1 as usize
        };
        let mut next = mem.0.clone();
        next[k] = self.subs[k].update(q, mem.0[k] as usize, b) as u32;
        (next, k as u32)
    }
}

#[allow(clippy::type_complexity)]
fn compound(
    g: &Game,
    space: &ResponseSpace,
    q1: usize,
    children: &[SynthNode],
    starts: &[(usize, usize)],
) -> Result<(MemoryStrategy, Vec<(Vec<u32>, u32)>)> {
    let sets = &space.sets[q1];
    let mut c = Compound {
        g,
        q1,
        subs: children.iter().map(|c| &c.strategy).collect(),
        sizes: sets.iter().map(|s| s.pairs.len()).collect(),
        reps: sets.iter().map(|s| s.representative()).collect(),
        set_of: &space.set_of[q1],
        pairs: sets.iter().map(|s| s.pairs.as_slice()).collect(),
        cache: HashMap::new(),
    };
    let start: (Vec<u32>, u32) = (starts.iter().map(|s| s.1 as u32).collect(), 0);
    let mut index: HashMap<(Vec<u32>, u32), usize> = HashMap::new();
    let mut decode = vec![start.clone()];
    index.insert(start, 0);
    let mut sigma: Vec<Vec<Option<usize>>> = vec![Vec::new(); g.nq()];
    let mut mu: Vec<Vec<Option<Vec<usize>>>> = vec![Vec::new(); g.nq()];
    let mut seen: HashSet<(usize, usize)> = HashSet::from([(g.initial, 0)]);
    let mut queue = VecDeque::from([(g.initial, 0usize)]);
    while let Some((q, mi)) = queue.pop_front() {
        let mem = decode[mi].clone();
        let a = c.action(q, &mem);
        let mut row = Vec::with_capacity(g.nb());
        for b in 0..g.nb() {
            let next = c.update(q, &mem, b);
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if decode.len() >= MEMORY_CAP {
                        return Err(Error::Cap { count: format!(">{MEMORY_CAP} compound memory states"), cap: MEMORY_CAP as u64 });
                    }
                    decode.push(next.clone());
                    index.insert(next, decode.len() - 1);
                    decode.len() - 1
                }
            };
            row.push(id);
            let q2 = g.delta(q, a, b);
            if seen.insert((q2, id)) {
                queue.push_back((q2, id));
            }
        }
        grow(&mut sigma[q], mi + 1);
        grow(&mut mu[q], mi + 1);
        sigma[q][mi] = Some(a);
        mu[q][mi] = Some(row);
    }
    let n = decode.len();
    let mut st = MemoryStrategy { memory_count: n, m0: 0, sigma: vec![vec![0; n]; g.nq()], mu: vec![vec![vec![0; g.nb()]; n]; g.nq()] };
    for q in 0..g.nq() {
        for mi in 0..n {
            let reached = sigma[q].get(mi).copied().flatten();
            match reached {
                Some(a) => {
                    st.sigma[q][mi] = a;
                    st.mu[q][mi] = mu[q][mi].clone().expect("row with action");
                }
                None => {
                    let mem = decode[mi].clone();
                    st.sigma[q][mi] = c.action(q, &mem);
                    for b in 0..g.nb() {
                        st.mu[q][mi][b] = index.get(&c.update(q, &mem, b)).copied().unwrap_or(mi);
                    }
                }
            }
        }
    }
    Ok((st, decode))
}

fn grow<T: Clone>(v: &mut Vec<Option<T>>, n: usize) {
    if v.len() < n {
        v.resize(n, None);
    }
}

/// Replays a compound node against `beta`; returns its color trace and each child's trace on its share of `beta`.
pub fn decompose_trace(node: &SynthNode, beta: &[usize]) -> Option<(Vec<usize>, Vec<Vec<usize>>)> {
    if node.kind != LevelKind::Compound {
        return None;
    }
    let g = &node.game;
    let play = node.strategy.play(g, beta);
    let mut shares: Vec<Vec<usize>> = vec![Vec::new(); node.children.len()];
    for (i, &b) in beta.iter().enumerate() {
        let active = node.decode[play.memories[i + 1]].1 as usize;
        shares[active].push(b);
    }
    let parts = node
        .children
        .iter()
        .zip(&node.starts)
        .zip(&shares)
        .map(|((c, &(q, m)), share)| c.strategy.play_from(g, q, m, share).colors)
        .collect();
    Some((play.colors, parts))
}
