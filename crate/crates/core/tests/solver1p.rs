mod common;

use cgame_core::model::OnePlayerGame;
use cgame_core::solver1p::{lasso_to_strategy, solve_lasso_1p, solve_one_player, solve_parity_1p, Bounds1p, Lasso, Outcome1p};
use cgame_core::Game;
use proptest::prelude::*;

fn one_player(g: &Game) -> OnePlayerGame {
    OnePlayerGame {
        states: g.states.clone(),
        p1: g.p1.clone(),
        initial: g.initial,
        condition: g.condition.clone(),
        delta: (0..g.nq()).flat_map(|q| (0..g.na()).map(move |a| (q, a))).map(|(q, a)| g.delta(q, a, 0)).collect(),
        col: (0..g.nq()).flat_map(|q| (0..g.na()).map(move |a| (q, a))).map(|(q, a)| g.col(q, a, 0)).collect(),
    }
}

/// Every lasso with stem and cycle of at most `n` steps, by brute force.
fn some_winning_lasso(g: &OnePlayerGame, n: usize) -> bool {
    fn words(na: usize, len: usize) -> Vec<Vec<usize>> {
        (0..len).fold(vec![vec![]], |acc, _| acc.into_iter().flat_map(|w| (0..na).map(move |a| [w.clone(), vec![a]].concat())).collect())
    }
    (0..=n).flat_map(|s| words(g.na(), s)).any(|stem| {
        (1..=n)
            .flat_map(|c| words(g.na(), c))
            .any(|cycle| Lasso::replay(g, stem.clone(), cycle).is_some_and(|l| g.condition.up_member(&l.word)))
    })
}

#[test]
fn derived_example_loops_on_zero() {
    let g = common::fixture("two_state_derived.game").game().unwrap();
    let g1 = one_player(&g);
    let l = solve_parity_1p(&g1).unwrap();
    assert!(l.validate(&g1));
    assert!(g1.condition.up_member(&l.word));
    assert_eq!(l.word.cycle, [0]);
}

#[test]
fn odd_colors_lose() {
    let cond = common::condition("parity", &["1", "3"]);
    let g = common::game_from(1, 2, 1, cond, &[(0, 0), (1, 0)]);
    assert!(solve_parity_1p(&one_player(&g)).is_none());
}

#[test]
fn prefix_through_low_odd_color() {
    // q0 -1-> q1 -2-> q2 -0-> q2; the odd 1 is left behind
    let cond = common::condition("parity", &["0", "1", "2"]);
    let g = common::game_from(3, 1, 1, cond, &[(1, 1), (2, 2), (0, 2)]);
    let g1 = one_player(&g);
    let l = solve_parity_1p(&g1).unwrap();
    assert!(l.validate(&g1) && g1.condition.up_member(&l.word));
    assert!(some_winning_lasso(&g1, 3));
}

#[test]
fn all_negative_energy_loses() {
    let cond = common::condition("energy", &["-1", "-2"]);
    let g1 = one_player(&common::game_from(2, 2, 1, cond, &[(0, 1), (1, 0), (0, 0), (1, 1)]));
    assert_eq!(solve_lasso_1p(&g1, 2, 2, 100_000), Ok(None));
    assert_eq!(solve_one_player(&g1, Bounds1p::default()).verdict, Outcome1p::Lose);
}

#[test]
fn everything_accepted() {
    let cond = common::condition("all", &["0"]);
    let g1 = one_player(&common::game_from(2, 1, 1, cond, &[(0, 1), (0, 0)]));
    let l = solve_lasso_1p(&g1, 2, 2, 1000).unwrap().unwrap();
    assert!(l.validate(&g1));
}

#[test]
fn lasso_machines() {
    let cond = common::condition("parity", &["0", "1"]);
    let g1 = one_player(&common::game_from(1, 3, 1, cond, &[(0, 0), (1, 0), (0, 0)]));
    let l = Lasso::replay(&g1, vec![], vec![0]).unwrap();
    assert_eq!(lasso_to_strategy(&l, 1, 1).memory_count, 1);
    let l = Lasso::replay(&g1, vec![1], vec![0, 2]).unwrap();
    let s = lasso_to_strategy(&l, 1, 1);
    assert_eq!(s.memory_count, 3);
    let mut m = s.m0;
    let mut played = Vec::new();
    for _ in 0..7 {
        played.push(s.action(0, m));
        m = s.update(0, m, 0);
    }
    assert_eq!(played, [1, 0, 2, 0, 2, 0, 2]);
}

#[test]
fn stateless_example_is_won_with_a_certificate() {
    let g = common::fixture_game("minkowski.game");
    let g1 = one_player(&g);
    let s = solve_one_player(&g1, Bounds1p::default());
    assert_eq!(s.verdict, Outcome1p::Win);
    assert!(s.certificate.is_some());
    assert!(s.lasso.unwrap().validate(&g1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parity_solver_matches_brute_force(g in common::arb_game(common::condition("parity", &["0", "1", "2", "3"]), 3, 2, 1)) {
        let g1 = one_player(&g);
        let found = solve_parity_1p(&g1);
        if let Some(l) = &found {
            prop_assert!(l.validate(&g1));
            prop_assert!(g1.condition.up_member(&l.word));
        }
        prop_assert_eq!(found.is_some(), some_winning_lasso(&g1, g1.nq()));
    }

    #[test]
    fn energy_verdicts_match_brute_force(g in common::arb_game(common::condition("energy", &["-1", "0", "1"]), 3, 2, 1)) {
        let g1 = one_player(&g);
        let s = solve_one_player(&g1, Bounds1p::default());
        prop_assert_ne!(s.verdict, Outcome1p::Inconclusive);
        if let Some(l) = &s.lasso {
            prop_assert!(l.validate(&g1) && g1.condition.up_member(&l.word));
        }
        prop_assert_eq!(s.verdict == Outcome1p::Win, some_winning_lasso(&g1, 2 * g1.nq()));
    }
}
