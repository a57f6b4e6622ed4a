//! Monte-Carlo plays of constant positive stochastic Player 2 strategies against Player 1 policies.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::color::{fmt_rational, parse_rational};
use crate::conditions::{Axiom, Kind, Monitor};
use crate::error::{Error, Result};
use crate::format::GameFile;
use crate::model::{Game, UpWord};
use crate::solver2p::{decide_all_states, decide_stateless, DecideOptions, Outcome};
use crate::strategy::MemoryStrategy;

/// Generator used for every trial: ChaCha8 keyed by the seed, one stream per trial index.
pub const RNG_ALGORITHM: &str = "chacha8-stream-per-trial";

/// A full-support distribution over Player 2 actions, played identically at every round.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantStochasticStrategy {
    masses: Vec<BigRational>,
    weights: Vec<u64>,
    total: u64,
}

impl ConstantStochasticStrategy {
    pub fn new(masses: Vec<BigRational>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::Validation("distribution over no actions".into()));
        }
        if let Some(m) = masses.iter().find(|m| !m.is_positive()) {
            return Err(Error::Validation(format!("mass {} is not positive", fmt_rational(m))));
        }
        let sum: BigRational = masses.iter().sum();
        if !sum.is_one() {
            return Err(Error::Validation(format!("masses sum to {}, not 1", fmt_rational(&sum))));
        }
        let den = masses.iter().fold(num_bigint::BigInt::one(), |l, m| num_integer::Integer::lcm(&l, m.denom()));
        let weights: Option<Vec<u64>> = masses.iter().map(|m| (m.numer() * (&den / m.denom())).to_u64()).collect();
        let total = den.to_u64();
        match (weights, total) {
            (Some(weights), Some(total)) => Ok(ConstantStochasticStrategy { masses, weights, total }),
            _ => Err(Error::Validation("denominators too large for exact sampling".into())),
        }
    }

    pub fn uniform(n: usize) -> Self {
        let m = BigRational::new(1.into(), (n.max(1) as i64).into());
        ConstantStochasticStrategy::new(vec![m; n.max(1)]).expect("uniform masses are valid")
    }

    /// Comma-separated masses such as `1/3,2/3`.
    pub fn parse(text: &str) -> Result<Self> {
        let masses = text.split(',').map(|t| parse_rational(t.trim()).map_err(Error::Validation)).collect::<Result<Vec<_>>>()?;
        ConstantStochasticStrategy::new(masses)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[BigRational] {
        &self.masses
    }

    pub fn min_mass(&self) -> &BigRational {
        self.masses.iter().min().expect("non-empty")
    }

    pub fn describe(&self) -> Vec<String> {
        self.masses.iter().map(fmt_rational).collect()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let mut u = rng.gen_range(0..self.total);
        for (b, &w) in self.weights.iter().enumerate() {
            if u < w {
                return b;
            }
            u -= w;
        }
        self.weights.len() - 1
    }

    fn probability(&self, b: usize) -> f64 {
        self.weights[b] as f64 / self.total as f64
    }
}

#[derive(Clone, Debug)]
pub enum P1Policy {
    Uniform,
    /// Picks the action with the least expected badness after one step.
    Greedy,
    Fixed(MemoryStrategy),
    /// Always the same action.
    Constant(usize),
    /// Repeats the given action word.
    Scripted(Vec<usize>),
}

impl P1Policy {
    pub fn name(&self) -> String {
        match self {
            P1Policy::Uniform => "uniform".into(),
            P1Policy::Greedy => "greedy-metric".into(),
            P1Policy::Fixed(s) => format!("fixed({} memories)", s.memory_count),
            P1Policy::Constant(a) => format!("constant({a})"),
            P1Policy::Scripted(w) => format!("scripted({})", w.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")),
        }
    }

    fn check(&self, g: &Game) -> Result<()> {
        match self {
            P1Policy::Fixed(s) => s.check(g),
            P1Policy::Constant(a) if *a >= g.na() => Err(Error::Validation(format!("constant action {a} out of range"))),
            P1Policy::Scripted(w) if w.is_empty() => Err(Error::Validation("empty scripted policy".into())),
            P1Policy::Scripted(w) => match w.iter().find(|&&a| a >= g.na()) {
                Some(a) => Err(Error::Validation(format!("scripted action {a} out of range"))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

/// How far the monitored quantity is from what a win needs; larger is worse.
fn badness(g: &Game, m: &dyn Monitor) -> f64 {
    if m.violated() {
        return f64::INFINITY;
    }
    let x = || m.metric().unwrap_or(0.0);
    match &g.condition.kind {
        Kind::Bounded { .. } | Kind::Brl(_) => x(),
        Kind::Energy(_) | Kind::MeanPayoff(_) | Kind::AvgEnergy { .. } | Kind::EnergyParity { .. } => -x(),
        _ => 0.0,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub steps: usize,
    pub final_metric: Option<f64>,
    pub max_badness: f64,
    /// Round at which the loss indicator fired, if it did.
    pub loss_step: Option<usize>,
    #[serde(skip)]
    checkpoints: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Divergence {
    pub max_residual_load: Option<f64>,
    pub max_partial_sum_norm: Option<f64>,
    pub min_energy: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdFraction {
    pub threshold: f64,
    pub fraction_exceeding: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub rng: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub horizon: usize,
    pub policy: String,
    pub p2: Vec<String>,
    pub loss_indicator_fired: usize,
    pub divergence: Divergence,
    pub thresholds: Vec<ThresholdFraction>,
    pub per_trial: Vec<TrialReport>,
}

pub const DEFAULT_LADDER: [f64; 5] = [1.0, 10.0, 100.0, 1000.0, 10000.0];

fn run_trial(
    g: &Game,
    policy: &P1Policy,
    p2: &ConstantStochasticStrategy,
    horizon: usize,
    checkpoints: &[usize],
    seed: u64,
    trial: usize,
) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let mut mon = g.condition.monitor();
    let (mut q, mut m) = (
        g.initial,
        match policy {
            P1Policy::Fixed(s) => s.m0,
            _ => 0,
        },
    );
    let mut colors = Vec::with_capacity(horizon);
    let slots = match policy {
        P1Policy::Fixed(s) => g.nq() * s.memory_count,
        _ => 0,
    };
    let mut last: Vec<Option<usize>> = vec![None; slots];
    let mut judged: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut out = TrialReport {
        trial,
        steps: 0,
        final_metric: None,
        max_badness: badness(g, mon.as_ref()),
        loss_step: None,
        checkpoints: Vec::new(),
    };
    let mut next_cp = 0;
    for t in 0..horizon {
        if let P1Policy::Fixed(_) = policy {
            last[q * (slots / g.nq()) + m] = Some(t);
        }
        let a = match policy {
            P1Policy::Uniform => rng.gen_range(0..g.na()),
            P1Policy::Fixed(s) => s.action(q, m),
            P1Policy::Constant(a) => *a,
            P1Policy::Scripted(w) => w[t % w.len()],
            P1Policy::Greedy => {
                (0..g.na())
                    .map(|a| {
                        let e: f64 = (0..g.nb())
                            .map(|b| {
                                let mut m2 = mon.clone_box();
                                m2.step(g.col(q, a, b));
                                let x = badness(g, m2.as_ref());
                                if x.is_infinite() {
                                    1e300
                                } else {
                                    x * p2.probability(b)
                                }
                            })
                            .sum();
                        (a, e)
                    })
                    .fold((0, f64::INFINITY), |best, x| if x.1 < best.1 { x } else { best })
                    .0
            }
        };
        let b = p2.sample(&mut rng);
        let (c, q2) = g.effect(q, a, b);
        mon.step(c);
        colors.push(c);
        if let P1Policy::Fixed(s) = policy {
            m = s.update(q, m, b);
        }
        q = q2;
        out.steps = t + 1;
        out.max_badness = out.max_badness.max(badness(g, mon.as_ref()));
        if out.loss_step.is_none() {
            let fired = mon.violated()
                || match last.get(q * (slots / g.nq()) + m).copied().flatten() {
                    Some(i) => {
                        let cyc = &colors[i..];
                        let won = match judged.get(cyc) {
                            Some(&won) => Some(won),
                            None => g.condition.loop_member(cyc).inspect(|&won| {
                                judged.insert(cyc.to_vec(), won);
                            }),
                        };
                        !won.unwrap_or_else(|| g.condition.up_member(&UpWord::new(colors[..i].to_vec(), cyc.to_vec())))
                    }
                    _ => false,
                };
            if fired {
                out.loss_step = Some(t + 1);
            }
        }
        while next_cp < checkpoints.len() && checkpoints[next_cp] == t + 1 {
            out.checkpoints.push(out.max_badness);
            next_cp += 1;
        }
    }
    out.final_metric = mon.metric();
    out
}

fn divergence(g: &Game, trials: &[TrialReport]) -> Divergence {
    let max = || trials.iter().map(|t| t.max_badness).fold(f64::NEG_INFINITY, f64::max);
    match &g.condition.kind {
        Kind::Bounded { .. } => Divergence { max_residual_load: None, max_partial_sum_norm: Some(max()), min_energy: None },
        Kind::Brl(_) => Divergence { max_residual_load: Some(max()), max_partial_sum_norm: None, min_energy: None },
        Kind::Energy(_) | Kind::EnergyParity { .. } => {
            Divergence { max_residual_load: None, max_partial_sum_norm: None, min_energy: Some(-max()) }
        }
        _ => Divergence { max_residual_load: None, max_partial_sum_norm: None, min_energy: None },
    }
}

fn trials_parallel(
    g: &Game,
    policy: &P1Policy,
    p2: &ConstantStochasticStrategy,
    horizon: usize,
    checkpoints: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialReport>> {
    if horizon == 0 || trials == 0 {
        return Err(Error::Validation("horizon and trials must be at least 1".into()));
    }
    if p2.len() != g.nb() {
        return Err(Error::Validation(format!("distribution has {} masses for {} Player 2 actions", p2.len(), g.nb())));
    }
    policy.check(g)?;
    Ok((0..trials).into_par_iter().map(|i| run_trial(g, policy, p2, horizon, checkpoints, seed, i)).collect())
}

pub fn simulate(
    g: &Game,
    policy: &P1Policy,
    p2: &ConstantStochasticStrategy,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> Result<SimulationReport> {
    let per_trial = trials_parallel(g, policy, p2, horizon, &[], trials, seed)?;
    let thresholds = DEFAULT_LADDER
        .iter()
        .map(|&threshold| ThresholdFraction {
            threshold,
            fraction_exceeding: per_trial.iter().filter(|t| t.max_badness > threshold).count() as f64 / trials as f64,
        })
        .collect();
    Ok(SimulationReport {
        rng: RNG_ALGORITHM,
        seed,
        trials,
        horizon,
        policy: policy.name(),
        p2: p2.describe(),
        loss_indicator_fired: per_trial.iter().filter(|t| t.loss_step.is_some()).count(),
        divergence: divergence(g, &per_trial),
        thresholds,
        per_trial,
    })
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub horizons: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub threshold: f64,
    pub epsilon: f64,
    pub decide: DecideOptions,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            horizons: vec![100, 1000, 10000],
            trials: 1000,
            seed: 0,
            threshold: 10.0,
            epsilon: 0.01,
            decide: DecideOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdversaryResult {
    pub policy: String,
    /// Fraction of trials whose badness stayed within the threshold, per horizon.
    pub fraction_within: Vec<f64>,
    pub non_increasing: bool,
    pub below_epsilon: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub rng: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub horizons: Vec<usize>,
    pub threshold: f64,
    pub epsilon: f64,
    pub p2: Vec<String>,
    pub completeness_flag: Axiom,
    pub adversaries: Vec<AdversaryResult>,
    pub pass: bool,
    pub note: &'static str,
}

/// Default Player 1 suite: uniform, greedy, every constant action, and the cyclic word over all actions.
pub fn default_suite(g: &Game) -> Vec<P1Policy> {
    let mut v = vec![P1Policy::Uniform, P1Policy::Greedy];
    v.extend((0..g.na()).map(P1Policy::Constant));
    v.push(P1Policy::Scripted((0..g.na()).collect()));
    v
}

/// Statistical check that `p2` beats every policy in `suite` from a game Player 1 loses everywhere.
/// A stateless game is checked through its row color tuples and may rely on factor-set completeness.
pub fn semirandom_check(game: &GameFile, p2: &ConstantStochasticStrategy, suite: &[P1Policy], cfg: &CheckConfig) -> Result<CheckReport> {
    let g = &game.game()?;
    let ax = g.condition.axioms();
    let flag = match game {
        _ if ax.factor_prefix_complete.is_true() => Axiom::FactorPrefix,
        GameFile::Stateless(_) if ax.factor_set_complete.is_true() => Axiom::FactorSet,
        _ => return Err(Error::Refused(format!("the condition is not declared {}", Axiom::FactorPrefix.describe()))),
    };
    match game {
        GameFile::Stateless(s) => {
            let v = decide_stateless(s, cfg.decide.cap)?;
            if v.outcome != Outcome::Player1Loses {
                return Err(Error::Refused(format!("Player 1 is not shown to lose the stateless game ({:?})", v.outcome)));
            }
        }
        GameFile::Game(_) => {
            let all = decide_all_states(g, &cfg.decide)?;
            if let Some(s) = all.per_state.iter().find(|s| s.verdict.outcome != Outcome::Player1Loses) {
                return Err(Error::Refused(format!("Player 1 is not shown to lose from state {} ({:?})", s.state, s.verdict.outcome)));
            }
        }
    }
    let mut horizons = cfg.horizons.clone();
    horizons.sort_unstable();
    horizons.dedup();
    let top = *horizons.last().ok_or_else(|| Error::Validation("no horizons".into()))?;
    let mut adversaries = Vec::new();
    for policy in suite {
        let trials = trials_parallel(g, policy, p2, top, &horizons, cfg.trials, cfg.seed)?;
        let fraction_within: Vec<f64> = (0..horizons.len())
            .map(|h| trials.iter().filter(|t| t.checkpoints[h] <= cfg.threshold).count() as f64 / cfg.trials as f64)
            .collect();
        let non_increasing = fraction_within.windows(2).all(|w| w[1] <= w[0]);
        let below_epsilon = *fraction_within.last().expect("non-empty") < cfg.epsilon;
        adversaries.push(AdversaryResult {
            policy: policy.name(),
            fraction_within,
            non_increasing,
            below_epsilon,
            pass: non_increasing && below_epsilon,
        });
    }
    Ok(CheckReport {
        rng: RNG_ALGORITHM,
        seed: cfg.seed,
        trials: cfg.trials,
        horizons,
        threshold: cfg.threshold,
        epsilon: cfg.epsilon,
        p2: p2.describe(),
        completeness_flag: flag,
        pass: adversaries.iter().all(|a| a.pass),
        adversaries,
        note: "statistical evidence from finite simulations, not a proof of an almost-sure statement",
    })
}
