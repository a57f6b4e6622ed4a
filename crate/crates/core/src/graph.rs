//! Edge-labelled directed graphs used by the one-player solvers and the oracle.

use std::collections::{HashMap, VecDeque};

/// An edge `(label, target, color)`; labels are Player 1 actions.
pub type Edge = (usize, usize, usize);

#[derive(Clone, Debug)]
pub struct Graph {
    pub out: Vec<Vec<Edge>>,
}

/// A path given as the sequence of `(source, edge)` steps.
pub type Path = Vec<(usize, Edge)>;

impl Graph {
    pub fn new(n: usize) -> Graph {
        Graph { out: vec![Vec::new(); n] }
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn reachable(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &(_, t, _) in &self.out[v] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Shortest path from `from` to `to` using edges accepted by `keep`.
    pub fn path(&self, from: usize, to: usize, keep: &impl Fn(usize, &Edge) -> bool) -> Option<Path> {
        if from == to {
            return Some(Vec::new());
        }
        let mut parent: Vec<Option<(usize, Edge)>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for e in &self.out[v] {
                if !keep(v, e) || seen[e.1] {
                    continue;
                }
                seen[e.1] = true;
                parent[e.1] = Some((v, *e));
                if e.1 == to {
                    let mut p = Vec::new();
                    let mut cur = to;
                    while cur != from {
                        let (s, e) = parent[cur].expect("parent recorded");
                        p.push((s, e));
                        cur = s;
                    }
                    p.reverse();
                    return Some(p);
                }
                queue.push_back(e.1);
            }
        }
        None
    }

    /// Strongly connected components of the subgraph of `keep` edges among `alive` nodes.
    pub fn sccs(&self, alive: &[bool], keep: &impl Fn(usize, &Edge) -> bool) -> Vec<usize> {
        let n = self.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut comp = vec![usize::MAX; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut counter = 0;
        let mut ncomp = 0;
        for root in 0..n {
            if !alive[root] || index[root] != usize::MAX {
                continue;
            }
            let mut work: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut i)) = work.last_mut() {
                if *i < self.out[v].len() {
                    let e = self.out[v][*i];
                    *i += 1;
                    let w = e.1;
                    if !alive[w] || !keep(v, &e) {
                        continue;
                    }
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        work.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    work.pop();
                    if let Some(&(u, _)) = work.last() {
                        low[u] = low[u].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp[w] = ncomp;
                            if w == v {
                                break;
                            }
                        }
                        ncomp += 1;
                    }
                }
            }
        }
        comp
    }

    /// Stem to and cycle through an edge whose priority is even and minimal on the cycle.
    pub fn parity_lasso(&self, start: usize, prio: &impl Fn(usize) -> i64) -> Option<(Path, Path)> {
        let reach = self.reachable(start);
        let mut edges: Vec<(i64, usize, Edge)> = Vec::new();
        for v in (0..self.len()).filter(|&v| reach[v]) {
            for e in &self.out[v] {
                let p = prio(e.2);
                if p.rem_euclid(2) == 0 {
                    edges.push((p, v, *e));
                }
            }
        }
        edges.sort_by_key(|&(p, v, e)| (p, v, e.0));
        for (p, v, e) in edges {
            let keep = |_: usize, x: &Edge| prio(x.2) >= p;
            if let Some(back) = self.path(e.1, v, &keep) {
                let stem = self.path(start, v, &|_, _| true).expect("reachable");
                let mut cycle = vec![(v, e)];
                cycle.extend(back);
                return Some((stem, cycle));
            }
        }
        None
    }

    /// A reachable cycle whose integer weight sum is non-negative.
    pub fn nonnegative_cycle(&self, start: usize, weight: &impl Fn(&Edge) -> i128) -> Option<(Path, Path)> {
        let n = self.len();
        let reach = self.reachable(start);
        let scale = n as i128 + 1;
        let w2 = |e: &Edge| weight(e) * scale + 1;
        let mut dist = vec![0i128; n];
        let mut parent: Vec<Option<(usize, Edge)>> = vec![None; n];
        let mut last = None;
        for _ in 0..n {
            last = None;
            for v in (0..n).filter(|&v| reach[v]) {
                for e in &self.out[v] {
                    let cand = dist[v] + w2(e);
                    if cand > dist[e.1] {
                        dist[e.1] = cand;
                        parent[e.1] = Some((v, *e));
                        last = Some(e.1);
                    }
                }
            }
            last?;
        }
        let mut x = last?;
        for _ in 0..n {
            x = parent[x].expect("relaxed").0;
        }
        let mut cycle = Vec::new();
        let mut cur = x;
        loop {
            let (s, e) = parent[cur].expect("on cycle");
            cycle.push((s, e));
            cur = s;
            if cur == x {
                break;
            }
        }
        cycle.reverse();
        let stem = self.path(start, x, &|_, _| true).expect("reachable");
        Some((stem, cycle))
    }

    /// A reachable cycle whose set of colors is exactly one of `masks`.
    pub fn muller_cycle(&self, start: usize, masks: &[u64]) -> Option<(Path, Path)> {
        let reach = self.reachable(start);
        for &m in masks.iter().filter(|&&m| m != 0) {
            let keep = |_: usize, e: &Edge| m >> e.2 & 1 == 1;
            let comp = self.sccs(&reach, &keep);
            let mut cover: HashMap<usize, u64> = HashMap::new();
            for v in (0..self.len()).filter(|&v| reach[v]) {
                for e in self.out[v].iter().filter(|e| keep(v, e) && comp[e.1] == comp[v]) {
                    *cover.entry(comp[v]).or_default() |= 1 << e.2;
                }
            }
            let Some(k) = cover.iter().filter(|(_, &c)| c == m).map(|(&k, _)| k).min() else { continue };
            let inside = |v: usize, e: &Edge| keep(v, e) && comp[v] == k && comp[e.1] == k;
            let anchor = (0..self.len()).find(|&v| reach[v] && comp[v] == k).expect("component node");
            let mut cycle: Path = Vec::new();
            let mut cur = anchor;
            for c in (0..64).filter(|c| m >> c & 1 == 1) {
                let (v, e) = (0..self.len())
                    .filter(|&v| reach[v] && comp[v] == k)
                    .flat_map(|v| self.out[v].iter().map(move |e| (v, *e)))
                    .find(|(v, e)| e.2 == c && inside(*v, e))
                    .expect("covered color");
                cycle.extend(self.path(cur, v, &inside).expect("strongly connected"));
                cycle.push((v, e));
                cur = e.1;
            }
            cycle.extend(self.path(cur, anchor, &inside).expect("strongly connected"));
            let stem = self.path(start, anchor, &|_, _| true).expect("reachable");
            return Some((stem, cycle));
        }
        None
    }

    /// Simple cycles of the `alive` subgraph, each rooted at its least node; `None` above `cap`.
    pub fn simple_cycles(&self, alive: &[bool], cap: usize) -> Option<Vec<Path>> {
        let mut out = Vec::new();
        for s in (0..self.len()).filter(|&s| alive[s]) {
            let mut on_path = vec![false; self.len()];
            let mut path: Path = Vec::new();
            if !self.cycles_from(s, s, alive, &mut on_path, &mut path, &mut out, cap) {
                return None;
            }
        }
        Some(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn cycles_from(
        &self,
        root: usize,
        v: usize,
        alive: &[bool],
        on_path: &mut [bool],
        path: &mut Path,
        out: &mut Vec<Path>,
        cap: usize,
    ) -> bool {
        on_path[v] = true;
        for e in &self.out[v] {
            let t = e.1;
            if !alive[t] || t < root {
                continue;
            }
            path.push((v, *e));
            if t == root {
                out.push(path.clone());
                if out.len() > cap {
                    return false;
                }
            } else if !on_path[t] && !self.cycles_from(root, t, alive, on_path, path, out, cap) {
                return false;
            }
            path.pop();
        }
        on_path[v] = false;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        let mut g = Graph::new(3);
        g.out[0].push((0, 1, 1));
        g.out[1].push((0, 2, 0));
        g.out[2].push((0, 0, 3));
        g.out[2].push((1, 2, 5));
        g
    }

    #[test]
    fn cycles_and_components() {
        let g = triangle();
        let cycles = g.simple_cycles(&[true; 3], 10).unwrap();
        assert_eq!(cycles.len(), 2);
        let comp = g.sccs(&[true; 3], &|_, _| true);
        assert!(comp[0] == comp[1] && comp[1] == comp[2]);
    }

    #[test]
    fn parity_picks_even_minimum() {
        let g = triangle();
        let (stem, cycle) = g.parity_lasso(0, &|c| c as i64).unwrap();
        assert_eq!(stem.len(), 1);
        assert_eq!(cycle.iter().map(|s| s.1 .2).min(), Some(0));
        assert!(g.parity_lasso(0, &|c| if c == 0 { 1 } else { 3 }).is_none());
    }

    #[test]
    fn nonnegative_cycle_detection() {
        let g = triangle();
        assert!(g.nonnegative_cycle(0, &|e| -(e.2 as i128)).is_none());
        let (_, c) = g.nonnegative_cycle(0, &|e| if e.2 == 5 { 0 } else { -1 }).unwrap();
        assert_eq!(c.len(), 1);
    }
}
