//! `cgame`: command-line front end for concurrent game analysis.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use cgame_core::conditions::Axiom;
use cgame_core::format::{parse_response, read_game_file, write_game, write_game_file, write_response, GameFile};
use cgame_core::oracle::{enumerate_strategies, minimax_bounded, solve_muller_exact, strategy_tree_check, verify_strategy};
use cgame_core::responses::{derive, effect_sets, states_involving_p2, ResponseSpace, DEFAULT_CAP};
use cgame_core::semirandom::{default_suite, semirandom_check, simulate, CheckConfig, ConstantStochasticStrategy, P1Policy};
use cgame_core::solver1p::{solve_one_player, Bounds1p};
use cgame_core::solver2p::{
    decide, decide_all_states, decide_stateless, extract_spoiler, lar_expand, synthesize, DecideOptions, LAR_COLOR_CAP,
};
use cgame_core::strategy::MemoryStrategy;
use cgame_core::{Error, Game, OnePlayerGame};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser)]
#[command(name = "cgame", version, about = "Decide, synthesize and simulate concurrent games with colored transitions")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Largest number of delayed responses enumerated.
    #[arg(long, default_value_t = DEFAULT_CAP, global = true)]
    cap: u64,
    /// Lasso search bounds `stem,cycle`, as multiples of the state count.
    #[arg(long, default_value = "2,2", global = true)]
    bounds: String,
    /// Decide parity games by searching partial responses instead of enumerating them.
    #[arg(long, global = true)]
    prune: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, normalize and echo a game file.
    Validate { game: PathBuf },
    /// Effect sets of every state and the number of delayed responses.
    Responses { game: PathBuf },
    /// Write the one-player game derived from a delayed response.
    Derive {
        game: PathBuf,
        /// Response index, or pairs such as `[(0,q0)(0,q0)];[(1,q0)(2,q1)]`.
        #[arg(long)]
        response: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve a game in which Player 2 has no influence.
    Solve1p { game: PathBuf },
    /// Decide whether Player 1 wins from the initial state.
    Decide { game: PathBuf },
    /// Decide winning from every state.
    DecideAll { game: PathBuf },
    /// Decide a stateless game through its row color tuples.
    Stateless { game: PathBuf },
    /// Synthesize a finite-memory winning strategy.
    Synthesize {
        game: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Positional Player 2 strategy for a lost turn-based game.
    Spoiler { game: PathBuf },
    /// Expand a Muller game into a parity game.
    Lar {
        game: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate Player 1 against a constant stochastic Player 2.
    Simulate {
        game: PathBuf,
        /// `uniform`, `greedy`, `strategy:<file>` or `script:<a,b,...>`.
        #[arg(long, default_value = "uniform")]
        policy: String,
        /// Player 2 masses such as `1/2,1/2`; uniform when omitted.
        #[arg(long)]
        p2: Option<String>,
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Omit the per-trial records.
        #[arg(long)]
        summary: bool,
    },
    /// Statistical check that a constant stochastic Player 2 wins a game Player 1 loses everywhere.
    SemirandomCheck {
        game: PathBuf,
        #[arg(long)]
        p2: Option<String>,
        /// JSON file with `horizons`, `trials`, `threshold` and `epsilon`.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Brute-force ground truth for small games.
    Oracle {
        game: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Also enumerate strategies with up to this many memory states.
        #[arg(long)]
        memory: Option<usize>,
        /// Check a strategy file exactly and by tree search.
        #[arg(long)]
        strategy: Option<PathBuf>,
    },
    /// Randomized search for counterexamples to the condition's closure properties.
    ClosureProbe {
        game: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        period: usize,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckFile {
    horizons: Option<Vec<usize>>,
    trials: Option<usize>,
    threshold: Option<f64>,
    epsilon: Option<f64>,
}

fn parse_bounds(s: &str) -> anyhow::Result<Bounds1p> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [stem, cycle] = parts[..] else { bail!("--bounds expects `stem,cycle`, got `{s}`") };
    let b = Bounds1p { stem: stem.parse()?, cycle: cycle.parse()?, ..Bounds1p::default() };
    if b.stem == 0 || b.cycle == 0 {
        bail!("--bounds must be at least 1");
    }
    Ok(b)
}

fn load(path: &Path) -> anyhow::Result<GameFile> {
    Ok(read_game_file(path)?)
}

fn load_game(path: &Path) -> anyhow::Result<Game> {
    Ok(load(path)?.game()?)
}

fn load_strategy(path: &Path) -> anyhow::Result<MemoryStrategy> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing strategy {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn one_player(g: &Game) -> anyhow::Result<OnePlayerGame> {
    let involved = states_involving_p2(g);
    if let Some(&q) = involved.first() {
        bail!("Player 2 influences state {}; use `decide`", g.states[q]);
    }
    let space = ResponseSpace::new(g);
    Ok(derive(g, &space, &space.nth(0).expect("exactly one response")))
}

fn matrix(g: &Game, q: usize) -> String {
    let a = g.alphabet();
    let cells: Vec<Vec<String>> =
        (0..g.na()).map(|x| (0..g.nb()).map(|y| format!("{},{}", a[g.col(q, x, y)], g.states[g.delta(q, x, y)])).collect()).collect();
    let w = cells.iter().flatten().map(String::len).chain(g.p2.iter().map(String::len)).max().unwrap_or(1);
    let lw = g.p1.iter().map(String::len).max().unwrap_or(1);
    let mut out = format!("{:lw$} |", g.states[q]);
    for b in &g.p2 {
        out.push_str(&format!(" {b:w$}"));
    }
    out.push('\n');
    for (x, row) in cells.iter().enumerate() {
        out.push_str(&format!("{:lw$} |", g.p1[x]));
        for c in row {
            out.push_str(&format!(" {c:w$}"));
        }
        out.push('\n');
    }
    out
}

fn responses_text(g: &Game) -> String {
    let space = ResponseSpace::new(g);
    let a = g.alphabet();
    let mut out = String::new();
    for q in 0..g.nq() {
        out.push_str(&matrix(g, q));
        for s in effect_sets(g, q) {
            let acts: Vec<&str> = s.actions.iter().map(|&x| g.p1[x].as_str()).collect();
            let pairs: Vec<String> = s.pairs.iter().map(|&(c, n)| format!("({},{})", a[c], g.states[n])).collect();
            out.push_str(&format!("  {{{}}} for {}\n", pairs.join(" "), acts.join(" ")));
        }
        out.push('\n');
    }
    out.push_str(&format!("delayed responses: {}\n", space.count()));
    out
}

/// Indented rendering of a JSON value.
fn text_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) | Value::Array(_) if !is_flat(x) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text_value(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", inline(x))),
                }
            }
        }
        Value::Array(xs) => {
            for x in xs {
                if is_flat(x) {
                    out.push_str(&format!("{pad}- {}\n", inline(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    text_value(x, indent + 1, out);
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", inline(v))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.iter().all(|x| !matches!(x, Value::Object(_))) && inline(v).len() <= 100,
        Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        _ => v.to_string(),
    }
}

struct Ctx {
    format: Format,
    seed: u64,
    cap: u64,
    bounds: Bounds1p,
    prune: bool,
    jobs: usize,
}

/// Writes to stdout; a reader that closed the pipe early ends the process quietly.
fn out(text: &str) {
    let mut w = std::io::stdout().lock();
    if let Err(e) = w.write_all(text.as_bytes()).and_then(|()| w.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing output: {e}");
        std::process::exit(1);
    }
}

impl Ctx {
    fn opts(&self) -> DecideOptions {
        DecideOptions { cap: self.cap, bounds: self.bounds, prune: self.prune }
    }

    fn emit(&self, command: &str, game: &Path, result: impl Serialize, text: Option<String>) -> anyhow::Result<()> {
        let result = serde_json::to_value(result)?;
        match self.format {
            Format::Json => {
                let report = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": command,
                    "game": game.display().to_string(),
                    "seed": self.seed,
                    "cap": self.cap,
                    "bounds": [self.bounds.stem, self.bounds.cycle],
                    "prune": self.prune,
                    "jobs": self.jobs,
                    "result": result,
                });
                out(&format!("{}\n", serde_json::to_string_pretty(&report)?));
            }
            Format::Text => match text {
                Some(t) => out(&t),
                None => {
                    let mut buf = String::new();
                    text_value(&result, 0, &mut buf);
                    out(&buf);
                }
            },
        }
        Ok(())
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let ctx =
        Ctx { format: cli.format, seed: cli.seed, cap: cli.cap, bounds: parse_bounds(&cli.bounds)?, prune: cli.prune, jobs: cli.jobs };
    match cli.command {
        Command::Validate { game } => {
            let f = load(&game)?;
            let g = f.game()?;
            let result = json!({
                "kind": if matches!(f, GameFile::Stateless(_)) { "stateless" } else { "game" },
                "states": g.states,
                "p1": g.p1,
                "p2": g.p2,
                "alphabet": g.alphabet().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "condition": g.condition.spec().to_string(),
                "axioms": g.condition.axioms(),
                "involving_player2": states_involving_p2(&g).iter().map(|&q| g.states[q].clone()).collect::<Vec<_>>(),
                "normalized": write_game_file(&f),
            });
            ctx.emit("validate", &game, result, Some(write_game_file(&f)))
        }
        Command::Responses { game } => {
            let g = load_game(&game)?;
            let space = ResponseSpace::new(&g);
            let states: Vec<Value> = (0..g.nq())
                .map(|q| {
                    let sets: Vec<Value> = effect_sets(&g, q)
                        .iter()
                        .map(|s| {
                            json!({
                                "actions": s.actions.iter().map(|&a| g.p1[a].clone()).collect::<Vec<_>>(),
                                "pairs": s.pairs.iter().map(|&(c, n)| json!([g.alphabet()[c].to_string(), g.states[n]])).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    json!({ "state": g.states[q], "effect_sets": sets })
                })
                .collect();
            let result = json!({ "count": space.count().to_string(), "states": states });
            ctx.emit("responses", &game, result, Some(responses_text(&g)))
        }
        Command::Derive { game, response, output } => {
            let g = load_game(&game)?;
            let space = ResponseSpace::new(&g);
            let t = match response.trim().parse::<u64>() {
                Ok(i) => space.nth(i).ok_or_else(|| anyhow!("response index {i} is out of range ({} responses)", space.count()))?,
                Err(_) => parse_response(&g, &space, &response)?,
            };
            let derived = write_game(&derive(&g, &space, &t).to_game());
            let result = json!({
                "index": space.index_of(&t),
                "response": write_response(&g, &space, &t),
                "output": output.as_ref().map(|p| p.display().to_string()),
                "game": if output.is_none() { Some(derived.clone()) } else { None },
            });
            if let Some(p) = &output {
                write_file(p, &derived)?;
            }
            ctx.emit("derive", &game, result, Some(derived))
        }
        Command::Solve1p { game } => {
            let g = load_game(&game)?;
            let sol = solve_one_player(&one_player(&g)?, ctx.bounds);
            ctx.emit("solve1p", &game, sol, None)
        }
        Command::Decide { game } => {
            let v = decide(&load_game(&game)?, &ctx.opts())?;
            ctx.emit("decide", &game, v, None)
        }
        Command::DecideAll { game } => {
            let v = decide_all_states(&load_game(&game)?, &ctx.opts())?;
            ctx.emit("decide-all", &game, v, None)
        }
        Command::Stateless { game } => {
            let GameFile::Stateless(s) = load(&game)? else { bail!("{} is not a stateless game", game.display()) };
            ctx.emit("stateless", &game, decide_stateless(&s, ctx.cap)?, None)
        }
        Command::Synthesize { game, output } => {
            let g = load_game(&game)?;
            let s = synthesize(&g, &ctx.opts())?;
            if let Some(p) = &output {
                write_file(p, &serde_json::to_string_pretty(&s.strategy)?)?;
            }
            let result = json!({
                "memory_count": s.strategy.memory_count,
                "levels": s.levels,
                "output": output.as_ref().map(|p| p.display().to_string()),
                "strategy": if output.is_none() { Some(&s.strategy) } else { None },
            });
            ctx.emit("synthesize", &game, result, None)
        }
        Command::Spoiler { game } => {
            let g = load_game(&game)?;
            let v = decide(&g, &ctx.opts())?;
            ctx.emit("spoiler", &game, extract_spoiler(&g, &v)?, None)
        }
        Command::Lar { game, output } => {
            let g = load_game(&game)?;
            let lar = lar_expand(&g, LAR_COLOR_CAP)?;
            if let Some(p) = &output {
                write_file(p, &write_game(&lar.game))?;
            }
            // Expansions have too many responses to enumerate.
            let verdict = decide(&lar.game, &DecideOptions { prune: true, ..ctx.opts() })?;
            let result = json!({
                "summary": lar.summary(),
                "output": output.as_ref().map(|p| p.display().to_string()),
                "outcome": verdict.outcome,
            });
            ctx.emit("lar", &game, result, None)
        }
        Command::Simulate { game, policy, p2, horizon, trials, summary } => {
            let g = load_game(&game)?;
            let policy = parse_policy(&policy)?;
            let p2 = p2.as_deref().map_or_else(|| Ok(ConstantStochasticStrategy::uniform(g.nb())), ConstantStochasticStrategy::parse)?;
            let mut r = simulate(&g, &policy, &p2, horizon, trials, ctx.seed)?;
            if summary {
                r.per_trial.clear();
            }
            ctx.emit("simulate", &game, r, None)
        }
        Command::SemirandomCheck { game, p2, config } => {
            let file = load(&game)?;
            let g = file.game()?;
            let p2 = p2.as_deref().map_or_else(|| Ok(ConstantStochasticStrategy::uniform(g.nb())), ConstantStochasticStrategy::parse)?;
            let mut cfg = CheckConfig { seed: ctx.seed, decide: ctx.opts(), ..CheckConfig::default() };
            if let Some(path) = config {
                let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                let f: CheckFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
                cfg.horizons = f.horizons.unwrap_or(cfg.horizons);
                cfg.trials = f.trials.unwrap_or(cfg.trials);
                cfg.threshold = f.threshold.unwrap_or(cfg.threshold);
                cfg.epsilon = f.epsilon.unwrap_or(cfg.epsilon);
            }
            let report = semirandom_check(&file, &p2, &default_suite(&g), &cfg)?;
            ctx.emit("semirandom-check", &game, report, None)
        }
        Command::Oracle { game, depth, memory, strategy } => {
            let g = load_game(&game)?;
            let mut result = json!({
                "depth": depth,
                "minimax": minimax_bounded(&g, depth),
                "exact": solve_muller_exact(&g),
            });
            if let Some(k) = memory {
                result["enumeration"] = serde_json::to_value(enumerate_strategies(&g, k, 5e7)?)?;
            }
            if let Some(p) = strategy {
                let s = load_strategy(&p)?;
                result["strategy_exact"] = json!(verify_strategy(&g, &s).ok());
                result["strategy_tree"] = serde_json::to_value(strategy_tree_check(&g, &s, depth))?;
            }
            ctx.emit("oracle", &game, result, None)
        }
        Command::ClosureProbe { game, samples, period } => {
            let g = load_game(&game)?;
            let ax = g.condition.axioms();
            let probes: Vec<Value> = [Axiom::Interleaving, Axiom::PrefixRemoval, Axiom::FactorPrefix, Axiom::FactorSet]
                .into_iter()
                .map(|a| {
                    json!({
                        "axiom": a,
                        "declared": ax.get(a),
                        "probe": cgame_core::conditions::axiom_probe(&g.condition, a, samples, period, ctx.seed),
                    })
                })
                .collect();
            ctx.emit("closure-probe", &game, json!({ "condition": g.condition.spec().to_string(), "probes": probes }), None)
        }
    }
}

fn parse_policy(s: &str) -> anyhow::Result<P1Policy> {
    Ok(match s {
        "uniform" => P1Policy::Uniform,
        "greedy" => P1Policy::Greedy,
        _ if s.starts_with("strategy:") => P1Policy::Fixed(load_strategy(Path::new(&s["strategy:".len()..]))?),
        _ if s.starts_with("script:") => {
            P1Policy::Scripted(s["script:".len()..].split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>()?)
        }
        _ => bail!("unknown policy `{s}`"),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        std::env::set_var("RAYON_NUM_THREADS", cli.jobs.to_string());
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Refused(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
