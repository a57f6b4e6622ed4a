//! One-player games: lasso witnesses and per-condition solvers.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::brl::RequestMap;
use crate::conditions::Kind;
use crate::graph::{Edge, Graph, Path};
use crate::hull::{zero_in_hull_where, HullCertificate};
use crate::model::{OnePlayerGame, UpWord};
use crate::strategy::MemoryStrategy;

/// A run `stem · cycle^ω`; the cycle starts and ends at `anchor`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
    pub anchor: usize,
    pub word: UpWord,
}

impl Lasso {
    /// Replays the actions; `None` if the cycle does not close.
    pub fn replay(g: &OnePlayerGame, stem: Vec<usize>, cycle: Vec<usize>) -> Option<Lasso> {
        if cycle.is_empty() {
            return None;
        }
        let mut q = g.initial;
        let mut su = Vec::with_capacity(stem.len());
        for &a in &stem {
            su.push(g.col(q, a));
            q = g.delta(q, a);
        }
        let anchor = q;
        let mut cv = Vec::with_capacity(cycle.len());
        for &a in &cycle {
            cv.push(g.col(q, a));
            q = g.delta(q, a);
        }
        (q == anchor).then(|| Lasso { stem, cycle, anchor, word: UpWord::new(su, cv) })
    }

    pub fn validate(&self, g: &OnePlayerGame) -> bool {
        Lasso::replay(g, self.stem.clone(), self.cycle.clone()).as_ref() == Some(self)
    }

    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Memory `i` plays the `i`-th action of `stem · cycle` and then advances, wrapping into the cycle.
pub fn lasso_to_strategy(l: &Lasso, nq: usize, nb: usize) -> MemoryStrategy {
    let word: Vec<usize> = l.stem.iter().chain(&l.cycle).copied().collect();
    let n = word.len();
    let next = |i: usize| if i + 1 == n { l.stem.len() } else { i + 1 };
    MemoryStrategy { memory_count: n, m0: 0, sigma: vec![word.clone(); nq], mu: vec![(0..n).map(|i| vec![next(i); nb]).collect(); nq] }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome1p {
    Win,
    Lose,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Solution1p {
    pub verdict: Outcome1p,
    pub lasso: Option<Lasso>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<HullCertificate>,
    pub method: &'static str,
    pub checked_bounds: Option<(usize, usize)>,
}

/// Limits for the search-based parts of the one-player solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds1p {
    pub stem: usize,
    pub cycle: usize,
    /// Cap on candidate lassos, enumerated simple cycles and energy configurations.
    pub work: usize,
}

impl Default for Bounds1p {
    fn default() -> Self {
        Bounds1p { stem: 2, cycle: 2, work: 2_000_000 }
    }
}

fn graph_of(g: &OnePlayerGame) -> Graph {
    let mut gr = Graph::new(g.nq());
    for q in 0..g.nq() {
        for a in 0..g.na() {
            gr.out[q].push((a, g.delta(q, a), g.col(q, a)));
        }
    }
    gr
}

fn actions(p: &Path) -> Vec<usize> {
    p.iter().map(|s| s.1 .0).collect()
}

fn lasso_of(g: &OnePlayerGame, stem: &Path, cycle: &Path) -> Lasso {
    Lasso::replay(g, actions(stem), actions(cycle)).expect("graph cycle closes in the game")
}

/// Even-colored edge whose cycle avoids lower colors; complete for parity.
pub fn solve_parity_1p(g: &OnePlayerGame) -> Option<Lasso> {
    let prio = match &g.condition.kind {
        Kind::Parity(p) => p.clone(),
        _ => (0..g.condition.alphabet().len()).map(|c| c as i64).collect(),
    };
    let gr = graph_of(g);
    gr.parity_lasso(g.initial, &|c| prio[c]).map(|(s, c)| lasso_of(g, &s, &c))
}

/// Walks of length `n` from `from`, deduplicated by (end state, colors), in lexicographic action order.
fn walks(g: &OnePlayerGame, from: usize, n: usize, budget: &mut usize) -> Option<Vec<(usize, Vec<usize>, Vec<usize>)>> {
    let mut layer = vec![(from, Vec::new(), Vec::new())];
    for _ in 0..n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (q, acts, cols) in &layer {
            for a in 0..g.na() {
                let mut cols2: Vec<usize> = cols.clone();
                cols2.push(g.col(*q, a));
                let t = g.delta(*q, a);
                if seen.insert((t, cols2.clone())) {
                    let mut acts2: Vec<usize> = acts.clone();
                    acts2.push(a);
                    next.push((t, acts2, cols2));
                    *budget = budget.checked_sub(1)?;
                }
            }
        }
        layer = next;
    }
    Some(layer)
}

/// Exhaustive lasso search with `|stem| ≤ stem_bound·|Q|` and `|cycle| ≤ cycle_bound·|Q|`.
/// `Err(())` means the work cap was hit before the bounds were exhausted.
pub fn solve_lasso_1p(g: &OnePlayerGame, stem_bound: usize, cycle_bound: usize, work: usize) -> Result<Option<Lasso>, ()> {
    let smax = stem_bound * g.nq();
    let cmax = cycle_bound * g.nq();
    let cond = &g.condition;
    let mut budget = work;
    let gr = graph_of(g);
    let reach = gr.reachable(g.initial);
    // (length, actions, anchor)
    let mut stems: Vec<(Vec<usize>, usize)> = Vec::new();
    if cond.prefix_independent() {
        let mut anchors: Vec<(usize, Vec<usize>)> = (0..g.nq())
            .filter(|&q| reach[q])
            .filter_map(|q| {
                let p = gr.path(g.initial, q, &|_, _| true)?;
                (p.len() <= smax).then(|| (q, actions(&p)))
            })
            .collect();
        anchors.sort_by(|x, y| (x.1.len(), &x.1).cmp(&(y.1.len(), &y.1)));
        stems.extend(anchors.into_iter().map(|(q, p)| (p, q)));
    } else {
        for n in 0..=smax {
            for (q, acts, _) in walks(g, g.initial, n, &mut budget).ok_or(())? {
                stems.push((acts, q));
            }
        }
    }
    let mut cycles: HashMap<usize, Vec<Vec<usize>>> = HashMap::new();
    for (stem, anchor) in stems {
        if let std::collections::hash_map::Entry::Vacant(e) = cycles.entry(anchor) {
            let mut found = Vec::new();
            for n in 1..=cmax {
                for (q, acts, _) in walks(g, anchor, n, &mut budget).ok_or(())? {
                    if q == anchor {
                        found.push(acts);
                    }
                }
            }
            e.insert(found);
        }
        for cyc in &cycles[&anchor] {
            budget = budget.checked_sub(1).ok_or(())?;
            let l = Lasso::replay(g, stem.clone(), cyc.clone()).expect("closed walk");
            if cond.up_member(&l.word) {
                return Ok(Some(l));
            }
        }
    }
    Ok(None)
}

fn solution(verdict: Outcome1p, lasso: Option<Lasso>, method: &'static str) -> Solution1p {
    Solution1p { verdict, lasso, certificate: None, method, checked_bounds: None }
}

fn searched(g: &OnePlayerGame, b: Bounds1p, method: &'static str, exact_if_none: bool) -> Solution1p {
    let r = solve_lasso_1p(g, b.stem, b.cycle, b.work);
    let mut s = match r {
        Ok(Some(l)) => solution(Outcome1p::Win, Some(l), method),
        Ok(None) if exact_if_none => solution(Outcome1p::Lose, None, method),
        _ => solution(Outcome1p::Inconclusive, None, method),
    };
    s.checked_bounds = Some((b.stem, b.cycle));
    s
}

/// Decides the one-player game, with a lasso witness on wins.
pub fn solve_one_player(g: &OnePlayerGame, b: Bounds1p) -> Solution1p {
    let gr = graph_of(g);
    match &g.condition.kind {
        Kind::All => {
            let l = gr.parity_lasso(g.initial, &|_| 0).map(|(s, c)| lasso_of(g, &s, &c));
            solution(Outcome1p::Win, l, "any_cycle")
        }
        Kind::Parity(_) => match solve_parity_1p(g) {
            Some(l) => solution(Outcome1p::Win, Some(l), "parity_edge_deletion"),
            None => solution(Outcome1p::Lose, None, "parity_edge_deletion"),
        },
        Kind::Muller(masks) => {
            let l = solve_muller(g, &gr, masks);
            let v = if l.is_some() { Outcome1p::Win } else { Outcome1p::Lose };
            solution(v, l, "muller_components")
        }
        Kind::MeanPayoff(w) => {
            let l = gr.nonnegative_cycle(g.initial, &|e| w[e.2]).map(|(s, c)| lasso_of(g, &s, &c));
            let v = if l.is_some() { Outcome1p::Win } else { Outcome1p::Lose };
            solution(v, l, "nonnegative_cycle")
        }
        Kind::Energy(w) => match energy_graph(g, w, b.work) {
            Some(cg) => {
                let l = cg.parity_lasso(0, &|_| 0).map(|(s, c)| lasso_of(g, &s, &c));
                let v = if l.is_some() { Outcome1p::Win } else { Outcome1p::Lose };
                solution(v, l, "energy_configurations")
            }
            None => searched(g, b, "lasso_search", false),
        },
        Kind::EnergyParity { w, prio } => match energy_graph(g, w, b.work) {
            Some(cg) => match cg.parity_lasso(0, &|c| prio[c]) {
                Some((s, c)) => solution(Outcome1p::Win, Some(lasso_of(g, &s, &c)), "energy_configurations"),
                None if w.iter().all(|&x| x <= 0) => solution(Outcome1p::Lose, None, "energy_configurations"),
                None => searched(g, b, "lasso_search", false),
            },
            None => searched(g, b, "lasso_search", false),
        },
        Kind::Bounded { v, bound: None, .. } => solve_bounded(g, &gr, v, b),
        Kind::Brl(req) if g.condition.alphabet().len() <= 64 => {
            let reach = gr.reachable(g.initial);
            let l = brl_cycle_colors(&gr, &reach, u64::MAX, req)
                .and_then(|m| gr.muller_cycle(g.initial, &[m]))
                .map(|(s, c)| lasso_of(g, &s, &c));
            let v = if l.is_some() { Outcome1p::Win } else { Outcome1p::Lose };
            solution(v, l, "request_closed_components")
        }
        _ => searched(g, b, "lasso_search", false),
    }
}

/// Configurations (state, energy) with energy clamped at |Q|·max|w|; node 0 is the start.
fn energy_graph(g: &OnePlayerGame, w: &[i128], cap: usize) -> Option<Graph> {
    let wmax = w.iter().map(|x| x.abs()).max().unwrap_or(0);
    let k = (g.nq() as i128).checked_mul(wmax)?;
    if (k as f64 + 1.0) * g.nq() as f64 > cap as f64 {
        return None;
    }
    let mut index: HashMap<(usize, i128), usize> = HashMap::new();
    let mut nodes = vec![(g.initial, 0i128)];
    index.insert((g.initial, 0), 0);
    let mut edges: Vec<Vec<(usize, usize, usize)>> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let (q, e) = nodes[i];
        let mut out = Vec::new();
        for a in 0..g.na() {
            let c = g.col(q, a);
            let e2 = e + w[c];
            if e2 < 0 {
                continue;
            }
            let key = (g.delta(q, a), e2.min(k));
            let id = *index.entry(key).or_insert_with(|| {
                nodes.push(key);
                nodes.len() - 1
            });
            out.push((a, id, c));
        }
        edges.push(out);
        i += 1;
    }
    Some(Graph { out: edges })
}

fn solve_muller(g: &OnePlayerGame, gr: &Graph, masks: &[u64]) -> Option<Lasso> {
    gr.muller_cycle(g.initial, masks).map(|(s, c)| lasso_of(g, &s, &c))
}

/// Largest subset of `s` in which every color has a request word over the subset.
fn request_closed(s: u64, req: &RequestMap) -> u64 {
    let mut keep = s;
    loop {
        let next = (0..64)
            .filter(|&c| keep >> c & 1 == 1)
            .filter(|&c| req.words(c).iter().any(|u| u.iter().all(|&x| keep >> x & 1 == 1)))
            .fold(0u64, |m, c| m | 1 << c);
        if next == keep {
            return keep;
        }
        keep = next;
    }
}

/// Color set of some closed walk whose colors are request-closed, searching components within `allowed`.
fn brl_cycle_colors(gr: &Graph, alive: &[bool], allowed: u64, req: &RequestMap) -> Option<u64> {
    let keep = |_: usize, e: &Edge| allowed >> e.2 & 1 == 1;
    let comp = gr.sccs(alive, &keep);
    let mut cover: Vec<(usize, u64)> = Vec::new();
    for v in (0..gr.len()).filter(|&v| alive[v]) {
        for e in gr.out[v].iter().filter(|e| alive[e.1] && keep(v, e) && comp[e.1] == comp[v]) {
            match cover.iter_mut().find(|x| x.0 == comp[v]) {
                Some(x) => x.1 |= 1 << e.2,
                None => cover.push((comp[v], 1 << e.2)),
            }
        }
    }
    for (k, s) in cover {
        let closed = request_closed(s, req);
        if closed == s {
            return Some(s);
        }
        if closed != 0 {
            let inside: Vec<bool> = (0..gr.len()).map(|v| alive[v] && comp[v] == k).collect();
            if let Some(m) = brl_cycle_colors(gr, &inside, closed, req) {
                return Some(m);
            }
        }
    }
    None
}

const HULL_POINTS: usize = 256;

fn solve_bounded(g: &OnePlayerGame, gr: &Graph, v: &[Vec<i128>], b: Bounds1p) -> Solution1p {
    let reach = gr.reachable(g.initial);
    let Some(cycles) = gr.simple_cycles(&reach, b.work.min(100_000)) else {
        return searched(g, b, "lasso_search", false);
    };
    let comp = gr.sccs(&reach, &|_, _| true);
    let mut by_comp: Vec<(usize, Vec<&Path>)> = Vec::new();
    for c in &cycles {
        let k = comp[c[0].0];
        match by_comp.iter_mut().find(|x| x.0 == k) {
            Some(x) => x.1.push(c),
            None => by_comp.push((k, vec![c])),
        }
    }
    let dim = v.first().map_or(0, |x| x.len());
    let mut disconnected = false;
    for (_, cs) in &by_comp {
        if cs.len() > HULL_POINTS {
            return searched(g, b, "lasso_search", false);
        }
        let points: Vec<Vec<BigRational>> = cs
            .iter()
            .map(|c| {
                let mut s = vec![0i128; dim];
                for step in c.iter() {
                    crate::color::add_into(&mut s, &v[step.1 .2]);
                }
                s.into_iter().map(|x| BigRational::from_integer(BigInt::from(x))).collect()
            })
            .collect();
        let nodes: Vec<BTreeSet<usize>> = cs.iter().map(|c| c.iter().map(|s| s.0).collect()).collect();
        let connected = |sub: &[usize]| {
            let mut joined: BTreeSet<usize> = nodes[sub[0]].clone();
            let mut left: Vec<usize> = sub[1..].to_vec();
            while !left.is_empty() {
                let before = left.len();
                left.retain(|&j| {
                    if nodes[j].iter().any(|x| joined.contains(x)) {
                        joined.extend(nodes[j].iter().copied());
                        false
                    } else {
                        true
                    }
                });
                if left.len() == before {
                    return false;
                }
            }
            true
        };
        if let Some(cert) = zero_in_hull_where(&points, &connected) {
            let chosen: Vec<(&Path, u64)> = cert.support.iter().map(|&j| cs[j]).zip(cert.multiplicities.iter().copied()).collect();
            let walk = splice_cycles(&chosen);
            let start = walk[0].0;
            let stem = gr.path(g.initial, start, &|_, _| true).expect("reachable");
            let mut s = solution(Outcome1p::Win, Some(lasso_of(g, &stem, &walk)), "cycle_hull");
            s.certificate = Some(cert);
            return s;
        }
        if crate::hull::zero_in_hull(&points).is_some() {
            disconnected = true;
        }
    }
    if disconnected {
        return searched(g, b, "lasso_search", false);
    }
    solution(Outcome1p::Lose, None, "cycle_hull")
}

/// One closed walk traversing cycle `j` exactly `n_j` times; cycles must overlap connectedly.
fn splice_cycles(chosen: &[(&Path, u64)]) -> Path {
    fn go(j: usize, at: usize, chosen: &[(&Path, u64)], done: &mut [bool]) -> Path {
        done[j] = true;
        let c = chosen[j].0;
        let r = c.iter().position(|s| s.0 == at).expect("cycle visits the node");
        let rot: Path = c[r..].iter().chain(&c[..r]).copied().collect();
        let mut out = Vec::new();
        for _ in 0..chosen[j].1 {
            for step in &rot {
                for k in 0..chosen.len() {
                    if !done[k] && chosen[k].0.iter().any(|s| s.0 == step.0) {
                        out.extend(go(k, step.0, chosen, done));
                    }
                }
                out.push(*step);
            }
        }
        out
    }
    let mut done = vec![false; chosen.len()];
    go(0, chosen[0].0[0].0, chosen, &mut done)
}
