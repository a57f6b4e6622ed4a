//! Winning conditions: axiom flags, ultimately periodic membership, restricted non-emptiness,
//! boolean combinations and closure operators.

mod closure;
mod monitor;
mod probe;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use closure::{closure_member, ClosureOp, ClosureVerdict};
pub use monitor::{Monitor, Status};
pub use probe::{axiom_probe, Axiom, ProbeResult};

use crate::brl::{self, RequestMap};
use crate::color::{fmt_rational, Color, Scaled};
use crate::error::{Error, Result};
use crate::hull::{zero_in_hull, HullCertificate};
use crate::model::UpWord;

/// Condition syntax tree; colors are referenced by value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CondSpec {
    All,
    Parity,
    Muller { sets: Vec<Vec<Color>> },
    Energy,
    MeanPayoff { liminf: bool },
    Bounded { d: usize, bound: Option<BigRational> },
    Discounted { alpha: BigRational, t: BigRational },
    EnergyParity,
    AvgEnergy { t: BigRational },
    Brl { requests: Vec<(Color, Vec<Vec<Color>>)> },
    And(Box<CondSpec>, Box<CondSpec>),
    Or(Box<CondSpec>, Box<CondSpec>),
    Closure { op: ClosureOp, bound: usize, inner: Box<CondSpec> },
}

fn fmt_word(w: &[Color]) -> String {
    let toks: Vec<String> = w.iter().map(Color::to_string).collect();
    if toks.iter().all(|t| t.chars().count() == 1) {
        format!("\"{}\"", toks.concat())
    } else {
        format!("[{}]", toks.join(","))
    }
}

impl fmt::Display for CondSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CondSpec::All => f.write_str("all"),
            CondSpec::Parity => f.write_str("parity"),
            CondSpec::Muller { sets } => {
                let sets: Vec<String> =
                    sets.iter().map(|s| format!("[{}]", s.iter().map(Color::to_string).collect::<Vec<_>>().join(","))).collect();
                write!(f, "muller{{sets=[{}]}}", sets.join(","))
            }
            CondSpec::Energy => f.write_str("energy"),
            CondSpec::MeanPayoff { liminf: false } => f.write_str("meanpayoff"),
            CondSpec::MeanPayoff { liminf: true } => f.write_str("meanpayoff{liminf=true}"),
            CondSpec::Bounded { d, bound: None } => write!(f, "bounded{{d={d}}}"),
            CondSpec::Bounded { d, bound: Some(b) } => write!(f, "bounded{{d={d},bound={}}}", fmt_rational(b)),
            CondSpec::Discounted { alpha, t } => {
                write!(f, "discounted{{alpha={},t={}}}", fmt_rational(alpha), fmt_rational(t))
            }
            CondSpec::EnergyParity => f.write_str("energyparity"),
            CondSpec::AvgEnergy { t } => write!(f, "avgenergy{{t={}}}", fmt_rational(t)),
            CondSpec::Brl { requests } => {
                let items: Vec<String> = requests
                    .iter()
                    .map(|(c, ws)| format!("{c}:[{}]", ws.iter().map(|w| fmt_word(w)).collect::<Vec<_>>().join(",")))
                    .collect();
                write!(f, "brl{{{}}}", items.join(","))
            }
            CondSpec::And(a, b) => write!(f, "and({a},{b})"),
            CondSpec::Or(a, b) => write!(f, "or({a},{b})"),
            CondSpec::Closure { op, bound, inner } => write!(f, "closure{{op={op},bound={bound}}}({inner})"),
        }
    }
}

/// Three-valued axiom flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    DeclaredTrue,
    DeclaredFalse,
    Unknown,
}

impl Flag {
    pub fn is_true(self) -> bool {
        self == Flag::DeclaredTrue
    }
    fn of(b: bool) -> Flag {
        if b {
            Flag::DeclaredTrue
        } else {
            Flag::DeclaredFalse
        }
    }
    fn both(a: Flag, b: Flag) -> Flag {
        if a.is_true() && b.is_true() {
            Flag::DeclaredTrue
        } else {
            Flag::Unknown
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Axioms {
    pub interleaving_closed: Flag,
    pub prefix_removal_closed: Flag,
    pub factor_prefix_complete: Flag,
    pub factor_set_complete: Flag,
}

impl Axioms {
    /// Factor-set completeness follows from factor-prefix completeness over finite alphabets.
    fn new(i: bool, p: bool, fpc: bool) -> Axioms {
        Axioms {
            interleaving_closed: Flag::of(i),
            prefix_removal_closed: Flag::of(p),
            factor_prefix_complete: Flag::of(fpc),
            factor_set_complete: if fpc { Flag::DeclaredTrue } else { Flag::Unknown },
        }
    }

    pub fn get(&self, a: Axiom) -> Flag {
        match a {
            Axiom::Interleaving => self.interleaving_closed,
            Axiom::PrefixRemoval => self.prefix_removal_closed,
            Axiom::FactorPrefix => self.factor_prefix_complete,
            Axiom::FactorSet => self.factor_set_complete,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Kind {
    All,
    Parity(Vec<i64>),
    Muller(Vec<u64>),
    Energy(Vec<i128>),
    MeanPayoff(Vec<i128>),
    Bounded { v: Vec<Vec<i128>>, bound: Option<BigRational>, den: i128 },
    Discounted { alpha: BigRational, t: BigRational, w: Vec<BigRational> },
    EnergyParity { w: Vec<i128>, prio: Vec<i64> },
    AvgEnergy { w: Vec<i128>, t: BigRational, den: i128 },
    Brl(RequestMap),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
    Closure { op: ClosureOp, bound: usize, inner: Box<Condition> },
}

/// A winning condition compiled against a finite alphabet; colors are alphabet indices.
#[derive(Clone, Debug)]
pub struct Condition {
    spec: CondSpec,
    alphabet: Vec<Color>,
    pub(crate) kind: Kind,
    axioms: Axioms,
}

/// Outcome of [`Condition::restricted_nonempty`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Nonempty {
    Witness {
        word: UpWord,
        certificate: Option<HullCertificate>,
    },
    Empty,
    /// Nothing found by a bounded search that is not known to be complete.
    Inconclusive {
        searched_period: usize,
    },
}

const SEARCH_PERIOD: usize = 3;

fn err(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

fn ints(alphabet: &[Color], what: &str) -> Result<Vec<i64>> {
    alphabet.iter().map(|c| c.int().ok_or_else(|| err(format!("{what} needs integer colors, found `{c}`")))).collect()
}

fn scalars(alphabet: &[Color], what: &str) -> Result<Vec<BigRational>> {
    alphabet.iter().map(|c| c.scalar().ok_or_else(|| err(format!("{what} needs scalar colors, found `{c}`")))).collect()
}

fn scaled_scalars(alphabet: &[Color], what: &str) -> Result<(Vec<i128>, i128)> {
    let rows: Vec<Vec<BigRational>> = scalars(alphabet, what)?.into_iter().map(|x| vec![x]).collect();
    let s = Scaled::new(&rows).map_err(err)?;
    Ok((s.values.iter().map(|r| r[0]).collect(), s.den))
}

fn vectors(alphabet: &[Color], d: usize, what: &str) -> Result<Vec<Vec<BigRational>>> {
    alphabet
        .iter()
        .map(|c| match c.vector() {
            Some(v) if v.len() == d => Ok(v.to_vec()),
            _ => Err(err(format!("{what} needs vector colors of dimension {d}, found `{c}`"))),
        })
        .collect()
}

fn index_of(alphabet: &[Color], c: &Color) -> Result<usize> {
    let c = c.clone().canonical();
    alphabet.iter().position(|x| *x == c).ok_or_else(|| err(format!("color `{c}` is not in the alphabet")))
}

/// Energy over an alphabet of one sign degenerates into a safety or trivial condition.
fn energy_axioms(w: &[i128]) -> Axioms {
    if w.iter().all(|&x| x >= 0) || w.iter().all(|&x| x <= 0) {
        Axioms::new(true, true, true)
    } else {
        Axioms::new(true, false, false)
    }
}

impl Condition {
    pub fn build(spec: CondSpec, alphabet: Vec<Color>) -> Result<Condition> {
        if alphabet.is_empty() {
            return Err(err("alphabet must be non-empty"));
        }
        let a = &alphabet;
        let (kind, axioms) = match &spec {
            CondSpec::All => (Kind::All, Axioms::new(true, true, true)),
            CondSpec::Parity => (Kind::Parity(ints(a, "parity")?), Axioms::new(true, true, false)),
            CondSpec::Muller { sets } => {
                if a.len() > 64 {
                    return Err(err("muller supports at most 64 colors"));
                }
                let mut masks = Vec::new();
                for s in sets {
                    let mut m = 0u64;
                    for c in s {
                        m |= 1 << index_of(a, c)?;
                    }
                    masks.push(m);
                }
                masks.sort_unstable();
                masks.dedup();
                (Kind::Muller(masks), Axioms::new(false, true, false))
            }
            CondSpec::Energy => {
                let (w, _) = scaled_scalars(a, "energy")?;
                let ax = energy_axioms(&w);
                (Kind::Energy(w), ax)
            }
            CondSpec::MeanPayoff { .. } => (Kind::MeanPayoff(scaled_scalars(a, "meanpayoff")?.0), Axioms::new(true, true, false)),
            CondSpec::Bounded { d, bound } => {
                let s = Scaled::new(&vectors(a, *d, "bounded")?).map_err(err)?;
                let ax = match bound {
                    None => Axioms::new(true, true, true),
                    Some(b) if b.is_zero() => Axioms::new(true, true, true),
                    Some(_) => Axioms {
                        interleaving_closed: Flag::Unknown,
                        prefix_removal_closed: Flag::Unknown,
                        factor_prefix_complete: Flag::Unknown,
                        factor_set_complete: Flag::Unknown,
                    },
                };
                (Kind::Bounded { v: s.values, bound: bound.clone(), den: s.den }, ax)
            }
            CondSpec::Discounted { alpha, t } => {
                if !(alpha.is_positive() && *alpha < BigRational::one()) {
                    return Err(err("discount factor must lie strictly between 0 and 1"));
                }
                let w = scalars(a, "discounted")?;
                (Kind::Discounted { alpha: alpha.clone(), t: t.clone(), w }, Axioms::new(false, false, false))
            }
            CondSpec::EnergyParity => {
                let v = vectors(a, 2, "energyparity")?;
                let first: Vec<Vec<BigRational>> = v.iter().map(|x| vec![x[0].clone()]).collect();
                let w: Vec<i128> = Scaled::new(&first).map_err(err)?.values.iter().map(|r| r[0]).collect();
                let prio = v
                    .iter()
                    .map(|x| {
                        if x[1].is_integer() {
                            num_traits::ToPrimitive::to_i64(&x[1].to_integer()).ok_or_else(|| err("priority too large"))
                        } else {
                            Err(err("energyparity priorities must be integers"))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                let safety = energy_axioms(&w).prefix_removal_closed;
                let mut ax = Axioms::new(true, false, false);
                ax.prefix_removal_closed = if safety.is_true() { Flag::DeclaredTrue } else { Flag::DeclaredFalse };
                (Kind::EnergyParity { w, prio }, ax)
            }
            CondSpec::AvgEnergy { t } => {
                let (w, den) = scaled_scalars(a, "avgenergy")?;
                (Kind::AvgEnergy { w, t: t.clone(), den }, Axioms::new(true, true, false))
            }
            CondSpec::Brl { requests } => {
                let mut words = vec![vec![Vec::new()]; a.len()];
                let mut seen = BTreeSet::new();
                for (c, ws) in requests {
                    let i = index_of(a, c)?;
                    if !seen.insert(i) {
                        return Err(err(format!("color `{c}` has two request entries")));
                    }
                    words[i] =
                        ws.iter().map(|w| w.iter().map(|x| index_of(a, x)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
                }
                (Kind::Brl(RequestMap::new(words)), Axioms::new(true, true, true))
            }
            CondSpec::And(x, y) | CondSpec::Or(x, y) => {
                let x = Condition::build((**x).clone(), alphabet.clone())?;
                let y = Condition::build((**y).clone(), alphabet.clone())?;
                let and = matches!(spec, CondSpec::And(..));
                let ax = combine_axioms(&x.axioms, &y.axioms, and);
                let k = if and { Kind::And(Box::new(x), Box::new(y)) } else { Kind::Or(Box::new(x), Box::new(y)) };
                (k, ax)
            }
            CondSpec::Closure { op, bound, inner } => {
                let inner = Condition::build((**inner).clone(), alphabet.clone())?;
                let ax = closure_axioms(*op, &inner.axioms);
                (Kind::Closure { op: *op, bound: *bound, inner: Box::new(inner) }, ax)
            }
        };
        Ok(Condition { spec, alphabet, kind, axioms })
    }

    pub fn spec(&self) -> &CondSpec {
        &self.spec
    }
    pub fn alphabet(&self) -> &[Color] {
        &self.alphabet
    }
    pub fn axioms(&self) -> Axioms {
        self.axioms
    }
    pub fn name(&self) -> String {
        self.spec.to_string()
    }

    /// Combines two conditions over the same alphabet.
    pub fn combine(&self, other: &Condition, intersection: bool) -> Result<Condition> {
        if self.alphabet != other.alphabet {
            return Err(err("combined conditions must share one alphabet"));
        }
        let (a, b) = (Box::new(self.spec.clone()), Box::new(other.spec.clone()));
        let spec = if intersection { CondSpec::And(a, b) } else { CondSpec::Or(a, b) };
        Condition::build(spec, self.alphabet.clone())
    }

    /// Wraps the condition in a witness-bounded closure operator.
    pub fn closure(&self, op: ClosureOp, bound: usize) -> Condition {
        let spec = CondSpec::Closure { op, bound, inner: Box::new(self.spec.clone()) };
        Condition::build(spec, self.alphabet.clone()).expect("inner condition already validated")
    }

    pub fn check_word(&self, w: &UpWord) -> Result<()> {
        if w.cycle.is_empty() {
            return Err(err("cycle must be non-empty"));
        }
        match w.stem.iter().chain(&w.cycle).find(|&&c| c >= self.alphabet.len()) {
            Some(c) => Err(err(format!("color index {c} outside the alphabet"))),
            None => Ok(()),
        }
    }

    /// Membership of `stem · cycle^ω`; letters must be alphabet indices.
    pub fn up_member(&self, w: &UpWord) -> bool {
        debug_assert!(self.check_word(w).is_ok());
        match &self.kind {
            Kind::All => true,
            Kind::Parity(p) => parity_ok(p, w),
            Kind::Muller(masks) => masks.binary_search(&mask(&w.cycle)).is_ok(),
            Kind::Energy(e) => energy_ok(e, w),
            Kind::MeanPayoff(e) => w.cycle.iter().map(|&c| e[c]).sum::<i128>() >= 0,
            Kind::Bounded { v, bound, den } => bounded_ok(v, bound.as_ref(), *den, w),
            Kind::Discounted { alpha, t, w: vals } => discounted_value(alpha, vals, w) >= *t,
            Kind::EnergyParity { w: e, prio } => energy_ok(e, w) && parity_ok(prio, w),
            Kind::AvgEnergy { w: e, t, den } => avg_energy_ok(e, t, *den, w),
            Kind::Brl(req) => brl::brl_up_decide(w, req),
            Kind::And(a, b) => a.up_member(w) && b.up_member(w),
            Kind::Or(a, b) => a.up_member(w) || b.up_member(w),
            Kind::Closure { op, bound, inner } => closure_member(*op, inner, w, *bound) != ClosureVerdict::NoWithinBounds,
        }
    }

    /// Membership of `u · cycle^ω` for any stem `u` such that the monitor accepted `u · cycle`;
    /// `None` when the stem still matters.
    pub fn loop_member(&self, cycle: &[usize]) -> Option<bool> {
        if self.prefix_independent() {
            return Some(self.up_member(&UpWord::periodic(cycle.to_vec())));
        }
        let sum = |e: &[i128]| cycle.iter().map(|&c| e[c]).sum::<i128>();
        match &self.kind {
            // later passes through the cycle start no lower than the accepted first one
            Kind::Energy(e) => Some(sum(e) >= 0),
            Kind::EnergyParity { w, prio } => Some(sum(w) >= 0 && parity_ok(prio, &UpWord::periodic(cycle.to_vec()))),
            Kind::And(a, b) => Some(a.loop_member(cycle)? && b.loop_member(cycle)?),
            _ => None,
        }
    }

    pub fn try_up_member(&self, w: &UpWord) -> Result<bool> {
        self.check_word(w)?;
        Ok(self.up_member(w))
    }

    /// Whether some word over `colors` is winning.
    pub fn restricted_nonempty(&self, colors: &[usize]) -> Result<Nonempty> {
        let mut c0: Vec<usize> = colors.to_vec();
        c0.sort_unstable();
        c0.dedup();
        if c0.is_empty() {
            return Err(err("color subset must be non-empty"));
        }
        if let Some(&c) = c0.iter().find(|&&c| c >= self.alphabet.len()) {
            return Err(err(format!("color index {c} outside the alphabet")));
        }
        let single = |c: usize| Nonempty::Witness { word: UpWord::periodic(vec![c]), certificate: None };
        Ok(match &self.kind {
            Kind::All => single(c0[0]),
            Kind::Parity(p) => match c0.iter().find(|&&c| p[c].rem_euclid(2) == 0) {
                Some(&c) => single(c),
                None => Nonempty::Empty,
            },
            Kind::Muller(masks) => {
                let allowed = mask(&c0);
                match masks.iter().find(|&&m| m != 0 && m & !allowed == 0) {
                    Some(&m) => {
                        Nonempty::Witness { word: UpWord::periodic((0..64).filter(|i| m >> i & 1 == 1).collect()), certificate: None }
                    }
                    None => Nonempty::Empty,
                }
            }
            Kind::Energy(e) | Kind::MeanPayoff(e) => match c0.iter().copied().max_by_key(|&c| (e[c], std::cmp::Reverse(c))) {
                Some(c) if e[c] >= 0 => single(c),
                _ => Nonempty::Empty,
            },
            Kind::Bounded { v, bound: None, .. } => {
                let points: Vec<Vec<BigRational>> =
                    c0.iter().map(|&c| v[c].iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
                match zero_in_hull(&points) {
                    Some(cert) => {
                        let mut cycle = Vec::new();
                        for (&j, &m) in cert.support.iter().zip(&cert.multiplicities) {
                            cycle.extend(std::iter::repeat_n(c0[j], m as usize));
                        }
                        let cert = HullCertificate { support: cert.support.iter().map(|&j| c0[j]).collect(), ..cert };
                        Nonempty::Witness { word: UpWord::periodic(cycle), certificate: Some(cert) }
                    }
                    None => Nonempty::Empty,
                }
            }
            // Largest set of colors whose requests can all be met inside the set.
            Kind::Brl(req) => {
                let mut keep = c0.clone();
                loop {
                    let next: Vec<usize> =
                        keep.iter().copied().filter(|&c| req.words(c).iter().any(|u| u.iter().all(|x| keep.contains(x)))).collect();
                    if next.len() == keep.len() {
                        break;
                    }
                    keep = next;
                }
                if keep.is_empty() {
                    Nonempty::Empty
                } else {
                    Nonempty::Witness { word: UpWord::periodic(keep), certificate: None }
                }
            }
            Kind::Or(a, b) => match a.restricted_nonempty(&c0)? {
                w @ Nonempty::Witness { .. } => w,
                ra => match (ra, b.restricted_nonempty(&c0)?) {
                    (_, w @ Nonempty::Witness { .. }) => w,
                    (Nonempty::Empty, Nonempty::Empty) => Nonempty::Empty,
                    _ => Nonempty::Inconclusive { searched_period: SEARCH_PERIOD },
                },
            },
            _ => match self.search_up(&c0, SEARCH_PERIOD, SEARCH_PERIOD) {
                Some(word) => Nonempty::Witness { word, certificate: None },
                None => Nonempty::Inconclusive { searched_period: SEARCH_PERIOD },
            },
        })
    }

    /// First winning word over `letters` with stem and cycle lengths within the bounds.
    pub fn search_up(&self, letters: &[usize], stem_max: usize, cycle_max: usize) -> Option<UpWord> {
        for total in 1..=stem_max + cycle_max {
            for cl in 1..=cycle_max.min(total) {
                let sl = total - cl;
                if sl > stem_max {
                    continue;
                }
                let mut found = None;
                for_each_word(letters, total, &mut |w| {
                    let u = UpWord::new(w[..sl].to_vec(), w[sl..].to_vec());
                    if self.up_member(&u) {
                        found = Some(u);
                        true
                    } else {
                        false
                    }
                });
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }

    /// Whether membership of `u·v^ω` never depends on `u`.
    pub fn prefix_independent(&self) -> bool {
        match &self.kind {
            Kind::All | Kind::Parity(_) | Kind::Muller(_) | Kind::MeanPayoff(_) | Kind::Brl(_) => true,
            Kind::Bounded { bound, .. } => bound.is_none(),
            Kind::And(a, b) | Kind::Or(a, b) => a.prefix_independent() && b.prefix_independent(),
            _ => false,
        }
    }

    /// Whether every history repeating a configuration can be judged by its first cycle.
    pub fn cycle_closure_sound(&self) -> bool {
        match &self.kind {
            Kind::All | Kind::Parity(_) => true,
            Kind::Energy(w) => w.iter().all(|&x| x <= 0),
            Kind::EnergyParity { w, .. } => w.iter().all(|&x| x <= 0),
            _ => false,
        }
    }

    pub fn monitor(&self) -> Box<dyn Monitor> {
        monitor::build(self)
    }
}

/// Calls `f` on every word of length `n` over `letters` in lexicographic order until it returns true.
pub fn for_each_word(letters: &[usize], n: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    let mut idx = vec![0usize; n];
    let mut w: Vec<usize> = vec![letters[0]; n];
    loop {
        if f(&w) {
            return true;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < letters.len() {
                w[i] = letters[idx[i]];
                break;
            }
            idx[i] = 0;
            w[i] = letters[0];
        }
    }
}

fn combine_axioms(x: &Axioms, y: &Axioms, intersection: bool) -> Axioms {
    let unknown = Flag::Unknown;
    Axioms {
        interleaving_closed: if intersection { Flag::both(x.interleaving_closed, y.interleaving_closed) } else { unknown },
        prefix_removal_closed: unknown,
        factor_prefix_complete: Flag::both(x.factor_prefix_complete, y.factor_prefix_complete),
        factor_set_complete: if intersection { unknown } else { Flag::both(x.factor_set_complete, y.factor_set_complete) },
    }
}

fn keep(f: Flag) -> Flag {
    if f.is_true() {
        Flag::DeclaredTrue
    } else {
        Flag::Unknown
    }
}

fn closure_axioms(op: ClosureOp, x: &Axioms) -> Axioms {
    match op {
        ClosureOp::PrefixRemoval => Axioms {
            interleaving_closed: keep(x.interleaving_closed),
            prefix_removal_closed: Flag::DeclaredTrue,
            factor_prefix_complete: keep(x.factor_prefix_complete),
            factor_set_complete: keep(x.factor_set_complete),
        },
        ClosureOp::Interleaving => Axioms {
            interleaving_closed: Flag::DeclaredTrue,
            prefix_removal_closed: keep(x.prefix_removal_closed),
            factor_prefix_complete: keep(x.factor_prefix_complete),
            factor_set_complete: keep(x.factor_set_complete),
        },
        ClosureOp::FactorPrefix => Axioms {
            interleaving_closed: Flag::Unknown,
            prefix_removal_closed: keep(x.prefix_removal_closed),
            factor_prefix_complete: Flag::DeclaredTrue,
            factor_set_complete: Flag::DeclaredTrue,
        },
    }
}

pub(crate) fn mask(colors: &[usize]) -> u64 {
    colors.iter().fold(0u64, |m, &c| m | 1 << c)
}

fn parity_ok(p: &[i64], w: &UpWord) -> bool {
    w.cycle.iter().map(|&c| p[c]).min().expect("non-empty cycle").rem_euclid(2) == 0
}

fn energy_ok(e: &[i128], w: &UpWord) -> bool {
    let mut level = 0i128;
    if w.cycle.iter().map(|&c| e[c]).sum::<i128>() < 0 {
        return false;
    }
    // Later passes through the cycle start no lower than the first one.
    w.stem.iter().chain(&w.cycle).all(|&c| {
        level += e[c];
        level >= 0
    })
}

fn bounded_ok(v: &[Vec<i128>], bound: Option<&BigRational>, den: i128, w: &UpWord) -> bool {
    let d = v[0].len();
    let mut sum = vec![0i128; d];
    for &c in &w.cycle {
        crate::color::add_into(&mut sum, &v[c]);
    }
    if sum.iter().any(|&x| x != 0) {
        return false;
    }
    let Some(b) = bound else { return true };
    let mut acc = vec![0i128; d];
    w.stem.iter().chain(&w.cycle).all(|&c| {
        crate::color::add_into(&mut acc, &v[c]);
        let n = BigInt::from(crate::color::norm_inf(&acc));
        n * b.denom() <= b.numer() * BigInt::from(den)
    })
}

pub(crate) fn discounted_value(alpha: &BigRational, vals: &[BigRational], w: &UpWord) -> BigRational {
    let mut pow = BigRational::one();
    let mut total = BigRational::zero();
    for &c in &w.stem {
        total += &pow * &vals[c];
        pow = &pow * alpha;
    }
    let start = pow.clone();
    let mut cyc = BigRational::zero();
    let mut p = BigRational::one();
    for &c in &w.cycle {
        cyc += &p * &vals[c];
        p = &p * alpha;
    }
    total + start * cyc / (BigRational::one() - p)
}

fn avg_energy_ok(e: &[i128], t: &BigRational, den: i128, w: &UpWord) -> bool {
    if !energy_ok(e, w) || w.cycle.iter().map(|&c| e[c]).sum::<i128>() != 0 {
        return false;
    }
    let mut level: i128 = w.stem.iter().map(|&c| e[c]).sum();
    let mut total = BigInt::zero();
    for &c in &w.cycle {
        level += e[c];
        total += BigInt::from(level);
    }
    // mean level over one period, compared with t in units of 1/den
    total * t.denom() <= t.numer() * BigInt::from(den) * BigInt::from(w.cycle.len())
}
