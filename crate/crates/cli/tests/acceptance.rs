//! End-to-end acceptance checks; prints one line per criterion and exits nonzero on any failure.

use std::collections::{HashSet, VecDeque};
use std::path::PathBuf;
use std::process::Command;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cgame_core::brl::{fairness_predicates, residual_load, s_predicate, RequestMap};
use cgame_core::conditions::{axiom_probe, Axiom, Flag, ProbeResult};
use cgame_core::format::{parse_condition, parse_response, read_game_file};
use cgame_core::interleave::is_interleaving;
use cgame_core::model::run_trace;
use cgame_core::oracle::{oracle_verdict, solve_muller_exact, strategy_tree_check, OracleVerdict};
use cgame_core::responses::{derive, ResponseSpace};
use cgame_core::semirandom::{default_suite, semirandom_check, simulate, CheckConfig, ConstantStochasticStrategy, P1Policy};
use cgame_core::solver1p::Outcome1p;
use cgame_core::solver2p::{decide, lar_expand, synthesize, DecideOptions, LevelKind, Outcome, Synthesis};
use cgame_core::strategy::MemoryStrategy;
use cgame_core::{Color, Condition, Game, UpWord};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn game(name: &str) -> Game {
    read_game_file(&fixture(name)).expect("fixture parses").game().expect("fixture embeds")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> std::result::Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn condition(text: &str, alphabet: &[&str]) -> Arc<Condition> {
    let colors = alphabet.iter().map(|c| Color::parse(c).expect("color")).collect();
    Arc::new(Condition::build(parse_condition(text).expect("condition"), colors).expect("condition builds"))
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn criterion_1() -> Check {
    let g = game("two_state.game");
    let start = Instant::now();
    let (states, colors) = run_trace(&g, &[(0, 0), (0, 1), (0, 0)]).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let states: Vec<&str> = states.iter().map(|&q| g.states[q].as_str()).collect();
    let colors: Vec<String> = colors.iter().map(|&c| g.alphabet()[c].to_string()).collect();
    ensure(states == ["q0", "q0", "q1", "q0"], || format!("states {states:?}"))?;
    ensure(colors == ["0", "0", "2"], || format!("colors {colors:?}"))?;
    ensure(t < Duration::from_millis(1), || format!("took {t:?}"))?;
    Ok(format!("states {} colors {} in {t:?}", states.join(" "), colors.join(" ")))
}

fn criterion_2() -> Check {
    let g = game("two_state.game");
    let space = ResponseSpace::new(&g);
    let t = parse_response(&g, &space, "[(0,q0)(0,q0)];[(1,q0)(2,q1)]").map_err(|e| e.to_string())?;
    let d = derive(&g, &space, &t);
    let expected = game("two_state_derived.game");
    let (ed, ec) = expected.tables();
    for q in 0..2 {
        for a in 0..2 {
            let got = (g.alphabet()[d.col(q, a)].to_string(), d.delta(q, a));
            let want = (expected.alphabet()[ec[q][a][0]].to_string(), ed[q][a][0]);
            ensure(got == want, || format!("state {q} action {a}: got {got:?}, want {want:?}"))?;
        }
    }
    ensure(d.states == expected.states && d.initial == expected.initial, || "state sets differ".into())?;
    Ok("derived tables equal the hand-built one-player game".into())
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let g = game("minkowski.game");
    let space = ResponseSpace::new(&g);
    let count = space.count().to_string();
    ensure(count == "8", || format!("{count} responses"))?;
    let v = decide(&g, &DecideOptions::default()).map_err(|e| e.to_string())?;
    ensure(v.outcome == Outcome::Player1Wins, || format!("outcome {:?}", v.outcome))?;
    ensure(v.responses.len() == 8, || format!("{} logs", v.responses.len()))?;
    for log in &v.responses {
        let s = &log.solution;
        ensure(s.verdict == Outcome1p::Win, || format!("response {} not won", log.index))?;
        let cert = s.certificate.as_ref().ok_or_else(|| format!("response {} has no certificate", log.index))?;
        let weights: Vec<BigRational> =
            cert.weights.iter().map(|w| BigRational::from_str(w).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
        ensure(weights.iter().all(|w| *w > BigRational::from_integer(0.into())), || "non-positive weight".into())?;
        let total: BigRational = weights.iter().sum();
        ensure(total == BigRational::from_integer(1.into()), || format!("weights sum to {total}"))?;
        let d = derive(&g, &space, &log.response);
        let lasso = s.lasso.as_ref().ok_or("no lasso")?;
        ensure(lasso.validate(&d), || format!("response {} lasso does not replay", log.index))?;
        let mut sum = vec![BigRational::from_integer(0.into()); 2];
        for &c in &lasso.word.cycle {
            let v = g.alphabet()[c].vector().ok_or("vector colors")?;
            for (x, y) in sum.iter_mut().zip(v) {
                *x += y;
            }
        }
        ensure(sum.iter().all(|x| *x == BigRational::from_integer(0.into())), || format!("cycle sum {sum:?}"))?;
    }
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("8 responses, all won with zero-sum cycles and hull weights, in {t:?}"))
}

/// Every table over `nq ≤ 2`, `na, nb ≤ 2` and the two colors, initial state 0.
fn suite(cond: &Arc<Condition>) -> Vec<Game> {
    let mut out = Vec::new();
    for nq in 1..=2usize {
        for na in 1..=2usize {
            for nb in 1..=2usize {
                let cells = nq * na * nb;
                let choices = 2 * nq;
                for mut code in 0..choices.pow(cells as u32) {
                    let mut delta = vec![vec![vec![0; nb]; na]; nq];
                    let mut col = delta.clone();
                    for q in 0..nq {
                        for a in 0..na {
                            for b in 0..nb {
                                col[q][a][b] = code % 2;
                                delta[q][a][b] = (code / 2) % nq;
                                code /= choices;
                            }
                        }
                    }
                    let g = Game::new(names("q", nq), names("a", na), names("b", nb), 0, cond.clone(), &delta, &col).expect("suite game");
                    out.push(g);
                }
            }
        }
    }
    out
}

struct SuiteResult {
    winners: Vec<Game>,
    games: usize,
    conclusive: usize,
}

fn criterion_4(winners: &mut Vec<Game>) -> Check {
    let start = Instant::now();
    let conds = [("parity", condition("parity", &["0", "1"])), ("energy", condition("energy", &["0", "-1"]))];
    let mut lines = Vec::new();
    let mut total = 0;
    for (name, cond) in &conds {
        let r = run_suite(cond)?;
        total += r.games;
        lines.push(format!("{name}: {} games, {} oracle-conclusive, {} won", r.games, r.conclusive, r.winners.len()));
        winners.extend(r.winners);
    }
    ensure(total >= 2000, || format!("only {total} games"))?;
    let t = within(start, Duration::from_secs(300))?;
    Ok(format!("{}; no contradictions, in {t:?}", lines.join("; ")))
}

fn run_suite(cond: &Arc<Condition>) -> std::result::Result<SuiteResult, String> {
    let opts = DecideOptions::default();
    let mut r = SuiteResult { winners: Vec::new(), games: 0, conclusive: 0 };
    for g in suite(cond) {
        r.games += 1;
        let v = decide(&g, &opts).map_err(|e| e.to_string())?;
        let o = oracle_verdict(&g, 8);
        if o != OracleVerdict::Unknown {
            r.conclusive += 1;
        }
        let contradiction = matches!(
            (v.outcome, o),
            (Outcome::Player1Wins, OracleVerdict::P1ForcedLoss) | (Outcome::Player1Loses, OracleVerdict::P1ForcedWin)
        );
        ensure(!contradiction, || format!("decide {:?} vs oracle {o:?} on\n{}", v.outcome, cgame_core::format::write_game(&g)))?;
        ensure(v.outcome != Outcome::Inconclusive, || format!("decide inconclusive on\n{}", cgame_core::format::write_game(&g)))?;
        if v.outcome == Outcome::Player1Wins {
            r.winners.push(g);
        }
    }
    Ok(r)
}

fn random_word(rng: &mut ChaCha8Rng, nb: usize, len: usize) -> Vec<usize> {
    (0..len).map(|_| rng.gen_range(0..nb)).collect()
}

/// Largest sup-norm of the partial sums over every play of `s`, by search over (state, memory, sum).
fn exact_norm_bound(g: &Game, s: &MemoryStrategy, cap: usize) -> Option<i64> {
    let vec_of = |c: usize| -> Vec<i64> {
        g.alphabet()[c].vector().expect("vector color").iter().map(|x| x.to_integer().try_into().expect("small")).collect()
    };
    let start = (g.initial, s.m0, vec![0i64; 2]);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut best = 0;
    while let Some((q, m, sum)) = queue.pop_front() {
        best = best.max(sum.iter().map(|x| x.abs()).max().unwrap_or(0));
        let a = s.action(q, m);
        for b in 0..g.nb() {
            let v = vec_of(g.col(q, a, b));
            let next: Vec<i64> = sum.iter().zip(&v).map(|(x, y)| x + y).collect();
            let n = (g.delta(q, a, b), s.update(q, m, b), next);
            if seen.insert(n.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(n);
            }
        }
    }
    Some(best)
}

fn check_synthesis(g: &Game, syn: &Synthesis, rng: &mut ChaCha8Rng, seed: u64) -> std::result::Result<bool, String> {
    let s = &syn.strategy;
    let tree = strategy_tree_check(g, s, 12);
    ensure(tree.survived, || format!("tree check failed at {:?}", tree.counterexample))?;
    let sim = simulate(g, &P1Policy::Fixed(s.clone()), &ConstantStochasticStrategy::uniform(g.nb()), 10_000, 1, seed)
        .map_err(|e| e.to_string())?;
    ensure(sim.loss_indicator_fired == 0, || "loss indicator fired".into())?;
    let compound = syn.root.kind == LevelKind::Compound;
    if compound {
        for _ in 0..100 {
            let beta = random_word(rng, g.nb(), 40);
            let (whole, parts) = cgame_core::solver2p::decompose_trace(&syn.root, &beta).ok_or("no decomposition")?;
            ensure(is_interleaving(&whole, &parts).is_some(), || format!("trace on {beta:?} is not an interleaving"))?;
        }
    }
    Ok(compound)
}

fn synthesize_checked(g: &Game) -> std::result::Result<Synthesis, String> {
    synthesize(g, &DecideOptions::default()).map_err(|e| format!("{e} on\n{}", cgame_core::format::write_game(g)))
}

fn criterion_5(winners: &[Game], machines: &mut Vec<Synthesis>) -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut compound = 0;
    for (i, g) in winners.iter().enumerate() {
        let syn = synthesize_checked(g)?;
        if check_synthesis(g, &syn, &mut rng, i as u64).map_err(|e| format!("{e} on\n{}", cgame_core::format::write_game(g)))? {
            compound += 1;
        }
        machines.push(syn);
    }
    let g = game("minkowski.game");
    let syn = synthesize_checked(&g)?;
    ensure(check_synthesis(&g, &syn, &mut rng, 2)?, || "two-dimensional example is not compound".into())?;
    let bound = exact_norm_bound(&g, &syn.strategy, 1_000_000).ok_or("partial sums unbounded under the machine")?;
    let sim = simulate(&g, &P1Policy::Fixed(syn.strategy.clone()), &ConstantStochasticStrategy::uniform(2), 10_000, 1, 2)
        .map_err(|e| e.to_string())?;
    let seen = sim.divergence.max_partial_sum_norm.ok_or("no norm reported")?;
    ensure(seen <= bound as f64, || format!("simulated norm {seen} exceeds exact bound {bound}"))?;
    machines.push(syn);
    Ok(format!(
        "{} suite winners and the two-dimensional example: depth-12 trees, 10^4-step runs, {} compound roots decomposed; \
         simulated norm {seen} <= exact {bound}; {:?}",
        winners.len(),
        compound + 1,
        start.elapsed()
    ))
}

fn criterion_6(machines: &[Synthesis]) -> Check {
    let mut levels = 0;
    for syn in machines {
        for l in &syn.levels {
            levels += 1;
            ensure(l.accounting_holds(), || format!("level {l:?}"))?;
        }
        let root = syn.levels.iter().find(|l| l.depth == 0).ok_or("no root level")?;
        ensure(root.realized_memory == syn.strategy.memory_count, || "root memory differs from the machine".into())?;
    }
    ensure(levels > 0, || "no levels".into())?;
    Ok(format!("{levels} levels over {} machines", machines.len()))
}

fn embeds(word: &[usize], text: &[usize]) -> bool {
    let mut i = 0;
    for &x in text {
        if i < word.len() && word[i] == x {
            i += 1;
        }
    }
    i == word.len()
}

fn random_map(rng: &mut ChaCha8Rng, n: usize) -> RequestMap {
    RequestMap::new(
        (0..n)
            .map(|_| (0..rng.gen_range(0..=2)).map(|_| (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..n)).collect()).collect())
            .collect(),
    )
}

fn map_text(m: &RequestMap) -> String {
    let items: Vec<String> = (0..m.colors())
        .map(|c| {
            let ws: Vec<String> =
                m.words(c).iter().map(|w| format!("\"{}\"", w.iter().map(|x| x.to_string()).collect::<String>())).collect();
            format!("{c}:[{}]", ws.join(","))
        })
        .collect();
    format!("brl{{{}}}", items.join(","))
}

fn criterion_7() -> Check {
    // 0 asks for 1, 1 asks for 0, 2 asks for 2
    let looping = RequestMap::new(vec![vec![vec![1]], vec![vec![0]], vec![vec![2]]]);
    let w = UpWord::new(vec![0], vec![2]);
    let f = fairness_predicates(&w, &looping);
    ensure(f.brl && !f.f, || format!("0·2^ω: {f:?}"))?;
    let load = residual_load(&[0, 2, 2, 2, 2], &looping);
    ensure(load == [1, 2, 2, 2, 2], || format!("loads on 02222: {load:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut words = 0;
    for i in 0..100 {
        let n = rng.gen_range(1..=3);
        let req = if i % 4 == 0 { RequestMap::parity_simulation(&(0..n as i64).collect::<Vec<_>>()) } else { random_map(&mut rng, n) };
        let (sl, cl) = (rng.gen_range(0..=4), rng.gen_range(1..=4));
        let stem = random_word(&mut rng, n, sl);
        let cycle = random_word(&mut rng, n, cl);
        let w = UpWord::new(stem, cycle);
        let f = fairness_predicates(&w, &req);
        ensure(f.brl == f.brld, || format!("brl {} vs brld {} on {w:?}", f.brl, f.brld))?;
        let len = rng.gen_range(1..=200);
        let gamma = w.prefix(len);
        let inc = residual_load(&gamma, &req);
        for n_ in 0..len {
            let prefix = &gamma[..=n_];
            let mut by_pred = 0;
            let mut naive = 0;
            for k in 0..=n_ {
                if !s_predicate(prefix, k, n_ - k, &req).map_err(|e| e.to_string())? {
                    by_pred += 1;
                }
                if !req.words(gamma[k]).iter().any(|u| embeds(u, &prefix[k + 1..])) {
                    naive += 1;
                }
            }
            ensure(inc[n_] == by_pred && by_pred == naive, || format!("load at {n_}: {} vs {by_pred} vs {naive}", inc[n_]))?;
        }
        words += 1;
    }
    let mut probes = 0;
    for seed in 0..20u64 {
        let n = 1 + (seed as usize % 3);
        let req = random_map(&mut rng, n);
        let alphabet: Vec<String> = (0..n).map(|c| c.to_string()).collect();
        let refs: Vec<&str> = alphabet.iter().map(String::as_str).collect();
        let cond = condition(&map_text(&req), &refs);
        for ax in [Axiom::Interleaving, Axiom::PrefixRemoval, Axiom::FactorPrefix] {
            ensure(cond.axioms().get(ax) == Flag::DeclaredTrue, || format!("{ax:?} not declared for {}", map_text(&req)))?;
            match axiom_probe(&cond, ax, 50, 4, seed) {
                ProbeResult::NoCounterexample { .. } => probes += 1,
                c => return Err(format!("{ax:?} counterexample for {}: {c:?}", map_text(&req))),
            }
        }
    }
    Ok(format!("0·2^ω has bounded load and is unfair; {words} words agree; {probes} probes clean"))
}

fn criterion_8() -> Check {
    let negatives = [("muller{sets=[[0],[1]]}", vec!["0", "1"]), ("discounted{alpha=1/2,t=1}", vec!["0", "1"])];
    for (text, alphabet) in &negatives {
        let cond = condition(text, alphabet);
        let found =
            (0..100u64).any(|seed| matches!(axiom_probe(&cond, Axiom::Interleaving, 200, 4, seed), ProbeResult::Counterexample { .. }));
        ensure(found, || format!("no interleaving counterexample for {text}"))?;
    }
    let positives = [
        ("parity", vec!["0", "1", "2"]),
        ("energy", vec!["1", "-1", "0"]),
        ("meanpayoff", vec!["1", "-1", "0"]),
        ("bounded{d=1}", vec!["(1)", "(-1)", "(0)"]),
    ];
    let mut probes = 0;
    for (text, alphabet) in &positives {
        let cond = condition(text, alphabet);
        for ax in [Axiom::Interleaving, Axiom::PrefixRemoval, Axiom::FactorPrefix, Axiom::FactorSet] {
            if cond.axioms().get(ax) != Flag::DeclaredTrue {
                continue;
            }
            for seed in 0..100u64 {
                if let c @ ProbeResult::Counterexample { .. } = axiom_probe(&cond, ax, 20, 4, seed) {
                    return Err(format!("{text} {ax:?} seed {seed}: {c:?}"));
                }
                probes += 1;
            }
        }
    }
    Ok(format!("both negative controls refuted; {probes} clean probes on declared axioms"))
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let file = read_game_file(&fixture("minkowski_drift.game")).map_err(|e| e.to_string())?;
    let g = file.game().map_err(|e| e.to_string())?;
    let cfg = CheckConfig { seed: 9, ..CheckConfig::default() };
    let r = semirandom_check(&file, &ConstantStochasticStrategy::uniform(g.nb()), &default_suite(&g), &cfg).map_err(|e| e.to_string())?;
    let summary: Vec<String> = r.adversaries.iter().map(|a| format!("{} {:?}", a.policy, a.fraction_within)).collect();
    ensure(r.pass, || format!("failed: {}", summary.join("; ")))?;
    let t = within(start, Duration::from_secs(120))?;
    Ok(format!("{} adversaries, fractions within 10: {}; {t:?}", r.adversaries.len(), summary.join("; ")))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn criterion_10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let opts = DecideOptions { prune: true, ..DecideOptions::default() };
    let mut wins = 0;
    let games = 300;
    for _ in 0..games {
        let (nq, na, nb, nc) = (rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=3));
        let sets: Vec<String> = (1u32..1 << nc)
            .filter(|_| rng.gen_bool(0.5))
            .map(|m| format!("[{}]", (0..nc).filter(|c| m >> c & 1 == 1).map(|c| c.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        let alphabet: Vec<String> = (0..nc).map(|c| c.to_string()).collect();
        let refs: Vec<&str> = alphabet.iter().map(String::as_str).collect();
        let cond = condition(&format!("muller{{sets=[{}]}}", sets.join(",")), &refs);
        let col: Vec<Vec<Vec<usize>>> =
            (0..nq).map(|_| (0..na).map(|_| (0..nb).map(|_| rng.gen_range(0..nc)).collect()).collect()).collect();
        let delta: Vec<Vec<Vec<usize>>> =
            (0..nq).map(|_| (0..na).map(|_| (0..nb).map(|_| rng.gen_range(0..nq)).collect()).collect()).collect();
        let g = Game::new(names("q", nq), names("a", na), names("b", nb), 0, cond, &delta, &col).map_err(|e| e.to_string())?;
        let text = cgame_core::format::write_game(&g);
        let lar = lar_expand(&g, 7).map_err(|e| e.to_string())?;
        let reach = lar.records.len();
        ensure(reach <= nq * nc * factorial(nc), || format!("{reach} reachable records on\n{text}"))?;
        let v = decide(&lar.game, &opts).map_err(|e| format!("{e} on\n{text}"))?;
        let exact = solve_muller_exact(&g).ok_or("oracle refused")?;
        let ours = match v.outcome {
            Outcome::Player1Wins => true,
            Outcome::Player1Loses => false,
            Outcome::Inconclusive => return Err(format!("inconclusive on\n{text}")),
        };
        ensure(ours == exact, || format!("expansion says {ours}, oracle {exact} on\n{text}"))?;
        wins += ours as usize;
    }
    Ok(format!("{games} random Muller games agree with the exact oracle ({wins} won)"))
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cgame")).args(args).output().expect("cgame runs")
}

fn criterion_11() -> Check {
    let dir = std::env::temp_dir().join(format!("cgame-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let p = |name: &str| fixture(name).to_string_lossy().into_owned();
    let out = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let f1 = p("two_state.game");
    let f2 = p("minkowski.game");
    let fl = p("minkowski_drift.game");
    let mu = p("muller.game");
    let tb = p("turn_based.game");
    let d1 = p("two_state_derived.game");
    let strat = out("two_state.strategy");
    let cfg = out("check.json");
    std::fs::write(&cfg, r#"{"trials":50,"horizons":[10,100]}"#).map_err(|e| e.to_string())?;
    let runs: Vec<Vec<String>> = vec![
        vec!["validate".into(), f1.clone()],
        vec!["responses".into(), f2.clone()],
        vec!["derive".into(), f1.clone(), "--response".into(), "[(0,q0)(0,q0)];[(1,q0)(2,q1)]".into(), "-o".into(), out("d.game")],
        vec!["solve1p".into(), d1],
        vec!["decide".into(), f2.clone()],
        vec!["decide-all".into(), f1.clone()],
        vec!["stateless".into(), f2.clone()],
        vec!["synthesize".into(), f1.clone(), "-o".into(), strat.clone()],
        vec!["spoiler".into(), tb],
        vec!["lar".into(), mu.clone(), "-o".into(), out("lar.game")],
        vec!["simulate".into(), f2.clone(), "--seed".into(), "3".into(), "--trials".into(), "20".into()],
        vec!["simulate".into(), f1.clone(), "--policy".into(), format!("strategy:{strat}"), "--summary".into()],
        vec!["semirandom-check".into(), fl, "--seed".into(), "4".into(), "--config".into(), cfg],
        vec!["oracle".into(), f1.clone(), "--memory".into(), "2".into()],
        vec!["closure-probe".into(), mu.clone(), "--seed".into(), "5".into()],
        vec!["--format".into(), "text".into(), "responses".into(), f1],
    ];
    for args in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = run_cli(&args);
        let b = run_cli(&args);
        ensure(a.status.success(), || format!("{args:?} failed: {}", String::from_utf8_lossy(&a.stderr)))?;
        ensure(a.stdout == b.stdout, || format!("{args:?} differs between runs"))?;
    }
    let refused = run_cli(&["decide", &mu]);
    ensure(refused.status.code() == Some(2), || format!("refusal exited {:?}", refused.status.code()))?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} invocations byte-identical twice; refusal exits 2", runs.len()))
}

fn report(n: usize, name: &str, r: Check, failed: &mut usize) {
    match r {
        Ok(detail) => println!("PASS {n:>2} {name}: {detail}"),
        Err(detail) => {
            *failed += 1;
            println!("FAIL {n:>2} {name}: {detail}");
        }
    }
}

/// Criterion numbers given on the command line select a subset; 5 and 6 still run their prerequisites.
fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let only: Vec<usize> = args.iter().filter_map(|a| a.parse().ok()).collect();
    let on = |n: usize| only.is_empty() || only.contains(&n);
    let (mut failed, mut ran) = (0, 0);
    let mut quiet = 0;
    let mut winners = Vec::new();
    let mut machines = Vec::new();
    let mut run = |n: usize, name: &str, r: &mut dyn FnMut() -> Check| {
        ran += 1;
        report(n, name, r(), &mut failed);
    };
    if on(1) {
        run(1, "trace of the two-state example", &mut criterion_1);
    }
    if on(2) {
        run(2, "derived one-player game", &mut criterion_2);
    }
    if on(3) {
        run(3, "two-dimensional boundedness example", &mut criterion_3);
    }
    if on(4) {
        run(4, "decide against the brute-force oracle", &mut || criterion_4(&mut winners));
    } else if on(5) || on(6) {
        report(4, "decide against the brute-force oracle (prerequisite)", criterion_4(&mut winners), &mut quiet);
    }
    if on(5) {
        run(5, "synthesized strategies", &mut || criterion_5(&winners, &mut machines));
    } else if on(6) {
        report(5, "synthesized strategies (prerequisite)", criterion_5(&winners, &mut machines), &mut quiet);
    }
    if on(6) {
        run(6, "memory accounting", &mut || criterion_6(&machines));
    }
    if on(7) {
        run(7, "bounded residual load", &mut criterion_7);
    }
    if on(8) {
        run(8, "closure probes", &mut criterion_8);
    }
    if on(9) {
        run(9, "constant stochastic opponents", &mut criterion_9);
    }
    if on(10) {
        run(10, "record expansion of Muller games", &mut criterion_10);
    }
    if on(11) {
        run(11, "deterministic command-line output", &mut criterion_11);
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed + quiet > 0 {
        std::process::exit(1);
    }
}
