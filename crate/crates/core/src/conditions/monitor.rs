//! Streaming monitors over color prefixes.

use std::sync::Arc;

use num_traits::ToPrimitive;

use super::{Condition, Kind};
use crate::brl::{PendingProfile, RequestMap};
use crate::color::{add_into, norm_inf};

/// Verdict of a monitor on the prefix read so far.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Status {
    /// No infinite extension is winning.
    Violated,
    Undetermined,
    Metric(f64),
}

pub trait Monitor: Send + MonitorClone {
    fn step(&mut self, c: usize);
    fn violated(&self) -> bool;
    /// Energy level, partial-sum norm, residual load, window minimum, running average.
    fn metric(&self) -> Option<f64>;
    /// Finite summary of the monitor state when one exists.
    fn key(&self) -> Option<Vec<i128>>;

    fn status(&self) -> Status {
        if self.violated() {
            Status::Violated
        } else {
            self.metric().map_or(Status::Undetermined, Status::Metric)
        }
    }
}

pub trait MonitorClone {
    fn clone_box(&self) -> Box<dyn Monitor>;
}

impl<T: Monitor + Clone + 'static> MonitorClone for T {
    fn clone_box(&self) -> Box<dyn Monitor> {
        Box::new(self.clone())
    }
}

impl Clone for Box<dyn Monitor> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

const WINDOW: usize = 64;

#[derive(Clone)]
struct Trivial;

impl Monitor for Trivial {
    fn step(&mut self, _: usize) {}
    fn violated(&self) -> bool {
        false
    }
    fn metric(&self) -> Option<f64> {
        None
    }
    fn key(&self) -> Option<Vec<i128>> {
        Some(Vec::new())
    }
}

/// Priorities of the last `WINDOW` colors in a ring.
#[derive(Clone)]
struct Parity {
    prio: Arc<[i64]>,
    ring: [i64; WINDOW],
    len: usize,
    head: usize,
}

impl Parity {
    fn new(prio: &[i64]) -> Parity {
        Parity { prio: prio.into(), ring: [0; WINDOW], len: 0, head: 0 }
    }
}

impl Monitor for Parity {
    fn step(&mut self, c: usize) {
        self.ring[self.head] = self.prio[c];
        self.head = (self.head + 1) % WINDOW;
        self.len = (self.len + 1).min(WINDOW);
    }
    fn violated(&self) -> bool {
        false
    }
    fn metric(&self) -> Option<f64> {
        self.ring[..self.len].iter().min().map(|&m| m as f64)
    }
    fn key(&self) -> Option<Vec<i128>> {
        Some(Vec::new())
    }
}

#[derive(Clone)]
struct Energy {
    w: Vec<i128>,
    den: f64,
    level: i128,
    dead: bool,
}

impl Monitor for Energy {
    fn step(&mut self, c: usize) {
        self.level = self.level.checked_add(self.w[c]).expect("energy overflow");
        self.dead |= self.level < 0;
    }
    fn violated(&self) -> bool {
        self.dead
    }
    fn metric(&self) -> Option<f64> {
        Some(self.level as f64 / self.den)
    }
    fn key(&self) -> Option<Vec<i128>> {
        Some(vec![self.level, self.dead as i128])
    }
}

#[derive(Clone)]
struct Average {
    w: Vec<i128>,
    den: f64,
    sum: i128,
    steps: u64,
}

impl Monitor for Average {
    fn step(&mut self, c: usize) {
        self.sum += self.w[c];
        self.steps += 1;
    }
    fn violated(&self) -> bool {
        false
    }
    fn metric(&self) -> Option<f64> {
        (self.steps > 0).then(|| self.sum as f64 / self.den / self.steps as f64)
    }
    fn key(&self) -> Option<Vec<i128>> {
        None
    }
}

#[derive(Clone)]
struct Bounded {
    v: Vec<Vec<i128>>,
    den: f64,
    sum: Vec<i128>,
    limit: Option<f64>,
    dead: bool,
}

impl Monitor for Bounded {
    fn step(&mut self, c: usize) {
        add_into(&mut self.sum, &self.v[c]);
        if let Some(l) = self.limit {
            self.dead |= norm_inf(&self.sum) as f64 / self.den > l;
        }
    }
    fn violated(&self) -> bool {
        self.dead
    }
    fn metric(&self) -> Option<f64> {
        Some(norm_inf(&self.sum) as f64 / self.den)
    }
    fn key(&self) -> Option<Vec<i128>> {
        Some(self.sum.clone())
    }
}

#[derive(Clone)]
struct Discounted {
    alpha: f64,
    w: Vec<f64>,
    pow: f64,
    total: f64,
}

impl Monitor for Discounted {
    fn step(&mut self, c: usize) {
        self.total += self.pow * self.w[c];
        self.pow *= self.alpha;
    }
    fn violated(&self) -> bool {
        false
    }
    fn metric(&self) -> Option<f64> {
        Some(self.total)
    }
    fn key(&self) -> Option<Vec<i128>> {
        None
    }
}

#[derive(Clone)]
struct AvgEnergy {
    energy: Energy,
    levels: i128,
    steps: u64,
}

impl Monitor for AvgEnergy {
    fn step(&mut self, c: usize) {
        self.energy.step(c);
        self.levels += self.energy.level;
        self.steps += 1;
    }
    fn violated(&self) -> bool {
        self.energy.dead
    }
    fn metric(&self) -> Option<f64> {
        (self.steps > 0).then(|| self.levels as f64 / self.energy.den / self.steps as f64)
    }
    fn key(&self) -> Option<Vec<i128>> {
        None
    }
}

#[derive(Clone)]
struct Brl {
    req: RequestMap,
    profile: PendingProfile,
}

impl Monitor for Brl {
    fn step(&mut self, c: usize) {
        self.profile.step(c, &self.req);
    }
    fn violated(&self) -> bool {
        false
    }
    fn metric(&self) -> Option<f64> {
        Some(self.profile.load() as f64)
    }
    fn key(&self) -> Option<Vec<i128>> {
        None
    }
}

#[derive(Clone)]
struct Pair {
    a: Box<dyn Monitor>,
    b: Box<dyn Monitor>,
    and: bool,
}

impl Monitor for Pair {
    fn step(&mut self, c: usize) {
        self.a.step(c);
        self.b.step(c);
    }
    fn violated(&self) -> bool {
        if self.and {
            self.a.violated() || self.b.violated()
        } else {
            self.a.violated() && self.b.violated()
        }
    }
    fn metric(&self) -> Option<f64> {
        self.a.metric().or_else(|| self.b.metric())
    }
    fn key(&self) -> Option<Vec<i128>> {
        let mut k = self.a.key()?;
        k.push(i128::MIN);
        k.extend(self.b.key()?);
        Some(k)
    }
}

#[derive(Clone)]
struct Opaque;

impl Monitor for Opaque {
    fn step(&mut self, _: usize) {}
    fn violated(&self) -> bool {
        false
    }
    fn metric(&self) -> Option<f64> {
        None
    }
    fn key(&self) -> Option<Vec<i128>> {
        None
    }
}

fn den_of(cond: &Condition) -> f64 {
    let rows: Vec<Vec<_>> = cond.alphabet().iter().filter_map(|c| c.scalar().map(|x| vec![x])).collect();
    crate::color::Scaled::new(&rows).map(|s| s.den as f64).unwrap_or(1.0)
}

pub(super) fn build(cond: &Condition) -> Box<dyn Monitor> {
    match &cond.kind {
        Kind::All => Box::new(Trivial),
        Kind::Parity(p) => Box::new(Parity::new(p)),
        Kind::Muller(_) => Box::new(Opaque),
        Kind::Energy(w) => Box::new(Energy { w: w.clone(), den: den_of(cond), level: 0, dead: false }),
        Kind::MeanPayoff(w) => Box::new(Average { w: w.clone(), den: den_of(cond), sum: 0, steps: 0 }),
        Kind::Bounded { v, bound, den } => Box::new(Bounded {
            v: v.clone(),
            den: *den as f64,
            sum: vec![0; v[0].len()],
            limit: bound.as_ref().and_then(|b| b.to_f64()),
            dead: false,
        }),
        Kind::Discounted { alpha, w, .. } => Box::new(Discounted {
            alpha: alpha.to_f64().unwrap_or(0.0),
            w: w.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect(),
            pow: 1.0,
            total: 0.0,
        }),
        Kind::EnergyParity { w, prio } => {
            let firsts: Vec<Vec<_>> = cond.alphabet().iter().filter_map(|c| c.vector().map(|v| vec![v[0].clone()])).collect();
            let den = crate::color::Scaled::new(&firsts).map(|s| s.den as f64).unwrap_or(1.0);
            Box::new(Pair { a: Box::new(Energy { w: w.clone(), den, level: 0, dead: false }), b: Box::new(Parity::new(prio)), and: true })
        }
        Kind::AvgEnergy { w, den, .. } => {
            Box::new(AvgEnergy { energy: Energy { w: w.clone(), den: *den as f64, level: 0, dead: false }, levels: 0, steps: 0 })
        }
        Kind::Brl(req) => Box::new(Brl { req: req.clone(), profile: PendingProfile::new() }),
        Kind::And(a, b) => Box::new(Pair { a: a.monitor(), b: b.monitor(), and: true }),
        Kind::Or(a, b) => Box::new(Pair { a: a.monitor(), b: b.monitor(), and: false }),
        Kind::Closure { .. } => Box::new(Opaque),
    }
}
