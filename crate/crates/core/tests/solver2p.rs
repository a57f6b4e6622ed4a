mod common;

use cgame_core::conditions::Nonempty;
use cgame_core::error::Error;
use cgame_core::format::GameFile;
use cgame_core::oracle::{oracle_verdict, verify_strategy, OracleVerdict};
use cgame_core::solver1p::{solve_parity_1p, Outcome1p};
use cgame_core::solver2p::{
    decide, decide_all_states, decide_stateless, extract_spoiler, fpi_select, lar_expand, spoiler_game, synthesize, DecideOptions,
    LevelKind, Outcome, Spoiler,
};
use proptest::prelude::*;

fn opts() -> DecideOptions {
    DecideOptions::default()
}

#[test]
fn drifting_row_loses() {
    let g = common::fixture_game("minkowski_drift.game");
    let v = decide(&g, &opts()).unwrap();
    assert_eq!(v.outcome, Outcome::Player1Loses);
    let f = v.failing.unwrap();
    assert_eq!(f.solution.verdict, Outcome1p::Lose);
    let space = cgame_core::responses::ResponseSpace::new(&g);
    for a in 0..g.na() {
        let (c, _) = space.pair(&f.response, 0, a);
        let x = &g.alphabet()[c].vector().unwrap()[0];
        assert!(*x > num_rational::BigRational::from_integer(0.into()));
    }
}

#[test]
fn accepting_everything_wins() {
    let cond = common::condition("all", &["0", "1"]);
    let g = common::game_from(2, 2, 2, cond, &[(0, 1), (1, 0), (1, 1), (0, 0), (1, 0), (0, 1), (0, 0), (1, 1)]);
    assert_eq!(decide(&g, &opts()).unwrap().outcome, Outcome::Player1Wins);
}

#[test]
fn unsupported_conditions_are_refused() {
    let g = common::fixture_game("muller.game");
    assert!(matches!(decide(&g, &opts()), Err(Error::Refused(_))));
    let cond = common::condition("energy", &["-1", "1"]);
    let g = common::game_from(1, 1, 2, cond, &[(0, 0), (1, 0)]);
    assert!(matches!(synthesize(&g, &opts()), Err(Error::Refused(_))));
    let parity = common::fixture_game("turn_based.game");
    let pruned = DecideOptions { prune: true, ..opts() };
    assert!(decide(&parity, &pruned).is_ok());
    assert!(matches!(decide(&common::fixture_game("minkowski.game"), &pruned), Err(Error::Refused(_))));
}

#[test]
fn per_state_verdicts() {
    let g = common::fixture_game("minkowski.game");
    let all = decide_all_states(&g, &opts()).unwrap();
    assert_eq!(all.per_state.len(), 1);
    assert_eq!(all.everywhere, decide(&g, &opts()).unwrap().outcome);
    // q0 loops on 0; q1 is a sink on 1
    let cond = common::condition("parity", &["0", "1"]);
    let g = common::game_from(2, 1, 2, cond, &[(0, 0), (0, 0), (1, 1), (1, 1)]);
    let all = decide_all_states(&g, &opts()).unwrap();
    let outcomes: Vec<Outcome> = all.per_state.iter().map(|s| s.verdict.outcome).collect();
    assert_eq!(outcomes, [Outcome::Player1Wins, Outcome::Player1Loses]);
    assert_eq!(all.everywhere, Outcome::Player1Loses);
}

#[test]
fn stateless_decisions() {
    let GameFile::Stateless(s) = common::fixture("minkowski.game") else { panic!("stateless fixture") };
    let v = decide_stateless(&s, 1000).unwrap();
    assert_eq!(v.outcome, Outcome::Player1Wins);
    assert_eq!(v.tuples.len(), 8);
    assert!(v.tuples.iter().all(|t| matches!(t.result, Nonempty::Witness { certificate: Some(_), .. })));
    let GameFile::Stateless(odd) =
        cgame_core::format::parse_game("stateless\np1 a\np2 x y\nalphabet 0 1 3\ncondition parity\nmatrix\n  1 3\n").unwrap()
    else {
        panic!()
    };
    let v = decide_stateless(&odd, 1000).unwrap();
    assert_eq!(v.outcome, Outcome::Player1Loses);
    assert!(v.failing.is_some());
}

#[test]
fn turn_based_spoiler() {
    let g = common::fixture_game("turn_based.game");
    let v = decide(&g, &opts()).unwrap();
    assert_eq!(v.outcome, Outcome::Player1Loses);
    let Spoiler::Positional { actions } = extract_spoiler(&g, &v).unwrap() else { panic!("turn-based") };
    let left = spoiler_game(&g, &actions);
    assert!(solve_parity_1p(&left).is_none());
    assert_eq!(oracle_verdict(&left.to_game(), 10), OracleVerdict::P1ForcedLoss);
}

#[test]
fn concurrent_games_have_no_spoiler() {
    let g = common::fixture_game("minkowski_drift.game");
    let v = decide(&g, &opts()).unwrap();
    match extract_spoiler(&g, &v).unwrap() {
        Spoiler::NotTurnBased { reason, .. } => assert!(reason.contains("not achievable in any column")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn spoiler_needs_a_loss() {
    // Player 2 moves at q1 but every move is even
    let cond = common::condition("parity", &["0", "1"]);
    let g = common::game_from(2, 2, 2, cond, &[(1, 1), (1, 1), (1, 1), (1, 1), (0, 0), (0, 1), (0, 0), (0, 1)]);
    let v = decide(&g, &opts()).unwrap();
    assert_eq!(v.outcome, Outcome::Player1Wins);
    assert!(extract_spoiler(&g, &v).is_err());
}

#[test]
fn base_case_replays_the_lasso() {
    let g = common::fixture("two_state_derived.game").game().unwrap();
    let s = synthesize(&g, &opts()).unwrap();
    assert_eq!(s.levels.len(), 1);
    assert_eq!(s.levels[0].kind, LevelKind::Base);
    let lasso = s.root.lasso.as_ref().unwrap();
    assert_eq!(s.strategy.memory_count, lasso.len());
    assert!(verify_strategy(&g, &s.strategy).unwrap());
}

#[test]
fn example_strategy_is_exactly_winning() {
    for name in ["two_state.game", "minkowski.game"] {
        let g = common::fixture_game(name);
        let s = synthesize(&g, &opts()).unwrap();
        assert!(s.levels.iter().all(|l| l.accounting_holds()));
        if name == "two_state.game" {
            assert!(verify_strategy(&g, &s.strategy).unwrap());
        }
    }
}

#[test]
fn record_expansion_edge_cases() {
    let one = |sets: &str| {
        let cond = common::condition(&format!("muller{{sets=[{sets}]}}"), &["0", "1"]);
        common::game_from(1, 2, 2, cond, &[(0, 0), (1, 0), (1, 0), (0, 0)])
    };
    let pruned = DecideOptions { prune: true, ..opts() };
    let all = lar_expand(&one("[0],[1],[0,1]"), 7).unwrap();
    assert_eq!(decide(&all.game, &pruned).unwrap().outcome, Outcome::Player1Wins);
    let none = lar_expand(&one(""), 7).unwrap();
    assert_eq!(decide(&none.game, &pruned).unwrap().outcome, Outcome::Player1Loses);
    let zero = lar_expand(&one("[0]"), 7).unwrap();
    assert!(zero.records.len() <= 4);
    // Player 2 can always answer the other color, so 0 alone cannot recur forever
    assert_eq!(decide(&zero.game, &pruned).unwrap().outcome, Outcome::Player1Loses);
    assert!(lar_expand(&common::fixture_game("two_state.game"), 7).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn selection_certificates_validate((sizes, table) in prop::collection::vec(1usize..4, 1..4).prop_flat_map(|sizes| {
        let k = sizes.len();
        let n: usize = sizes.iter().product();
        (Just(sizes), prop::collection::vec(0..k, n))
    })) {
        let index = |y: &[usize]| y.iter().zip(&sizes).fold(0, |acc, (&d, &r)| acc * r + d);
        let f = |y: &[usize]| table[index(y)];
        let s = fpi_select(&f, &sizes);
        prop_assert!(s.validate(&f, &sizes));
    }

    #[test]
    fn random_parity_games_agree_with_the_oracle(g in common::arb_game(common::condition("parity", &["0", "1", "2"]), 2, 2, 2)) {
        let v = decide(&g, &opts()).unwrap();
        let o = oracle_verdict(&g, 8);
        prop_assert_ne!(o, OracleVerdict::Unknown);
        prop_assert_eq!(v.outcome == Outcome::Player1Wins, o == OracleVerdict::P1ForcedWin);
        if v.outcome == Outcome::Player1Wins {
            let s = synthesize(&g, &opts()).unwrap();
            prop_assert!(verify_strategy(&g, &s.strategy).unwrap());
        }
    }

    #[test]
    fn pruned_search_agrees(g in common::arb_game(common::condition("parity", &["0", "1", "2"]), 3, 2, 2)) {
        let full = decide(&g, &opts()).unwrap().outcome;
        let pruned = decide(&g, &DecideOptions { prune: true, ..opts() }).unwrap();
        prop_assert_eq!(full, pruned.outcome);
    }
}
