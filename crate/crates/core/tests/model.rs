mod common;

use cgame_core::format::parse_game;
use cgame_core::interleave::{interleave_finite, interleave_up, is_interleaving};
use cgame_core::model::run_trace;
use cgame_core::UpWord;
use proptest::prelude::*;

fn names(g: &cgame_core::Game, states: &[usize]) -> Vec<String> {
    states.iter().map(|&q| g.states[q].clone()).collect()
}

#[test]
fn second_row_stays_home() {
    let g = common::fixture_game("two_state.game");
    let (states, colors) = run_trace(&g, &[(1, 0), (1, 0)]).unwrap();
    assert_eq!(names(&g, &states), ["q0", "q0", "q0"]);
    let colors: Vec<String> = colors.iter().map(|&c| g.alphabet()[c].to_string()).collect();
    assert_eq!(colors, ["1", "1"]);
}

#[test]
fn empty_history() {
    let g = common::fixture_game("two_state.game");
    let (states, colors) = run_trace(&g, &[]).unwrap();
    assert_eq!(states, [g.initial]);
    assert!(colors.is_empty());
}

#[test]
fn out_of_range_action_is_rejected() {
    let g = common::fixture_game("two_state.game");
    assert!(run_trace(&g, &[(2, 0)]).is_err());
}

#[test]
fn missing_cell_is_rejected() {
    let text = "states q0\ninitial q0\np1 a\np2 x y\nalphabet 0\ncondition parity\nstate q0\n  0,q0\n";
    assert!(parse_game(text).is_err());
}

#[test]
fn listed_interleavings() {
    let parts = vec![vec![0, 2, 4], vec![1, 3]];
    assert_eq!(interleave_finite(&parts, &[0, 1, 0, 1, 0]).unwrap(), [0, 1, 2, 3, 4]);
    assert_eq!(interleave_finite(&parts, &[1, 0, 0, 1, 0]).unwrap(), [1, 0, 2, 3, 4]);
    assert_eq!(is_interleaving(&[1, 0, 3, 2, 4], &parts).unwrap(), [1, 0, 1, 0, 0]);
    assert!(is_interleaving(&[3, 1, 0, 2, 4], &parts).is_none());
    assert!(is_interleaving(&[0, 1, 4, 3, 2], &parts).is_none());
    assert!(is_interleaving::<usize>(&[], &[vec![], vec![]]).unwrap().is_empty());
    assert!(interleave_finite(&parts, &[1, 1, 1]).is_err());
}

#[test]
fn alternating_constant_words() {
    let zeros = UpWord::periodic(vec![0]);
    let ones = UpWord::periodic(vec![1]);
    let w = interleave_up([&zeros, &ones], &UpWord::periodic(vec![0, 1])).unwrap();
    for i in 0..20 {
        assert_eq!(w.at(i), i % 2);
    }
}

fn parts_and_schedule() -> impl Strategy<Value = (Vec<Vec<u8>>, Vec<usize>)> {
    prop::collection::vec(prop::collection::vec(0u8..3, 0..6), 1..4).prop_flat_map(|parts| {
        let mut slots: Vec<usize> = parts.iter().enumerate().flat_map(|(i, p)| std::iter::repeat_n(i, p.len())).collect();
        let n = slots.len();
        (Just(parts), Just(std::mem::take(&mut slots)).prop_shuffle().prop_map(move |s| s[..n].to_vec()))
    })
}

fn up_word() -> impl Strategy<Value = UpWord> {
    (prop::collection::vec(0usize..3, 0..5), prop::collection::vec(0usize..3, 1..5)).prop_map(|(s, c)| UpWord::new(s, c))
}

proptest! {
    #[test]
    fn interleaving_is_recovered((parts, schedule) in parts_and_schedule()) {
        let whole = interleave_finite(&parts, &schedule).unwrap();
        let found = is_interleaving(&whole, &parts).expect("schedule exists");
        prop_assert_eq!(interleave_finite(&parts, &found).unwrap(), whole);
    }

    #[test]
    fn normalization_keeps_letters(w in up_word()) {
        let n = w.normalized();
        prop_assert!(n.stem.len() <= w.stem.len() && n.cycle.len() <= w.cycle.len());
        for i in 0..40 {
            prop_assert_eq!(w.at(i), n.at(i));
        }
    }

    #[test]
    fn up_interleaving_follows_schedule(a in up_word(), b in up_word(), s in prop::collection::vec(0usize..2, 1..4)) {
        prop_assume!(s.contains(&0) && s.contains(&1));
        let schedule = UpWord::periodic(s);
        let w = interleave_up([&a, &b], &schedule).unwrap();
        let mut pos = [0usize; 2];
        for t in 0..60 {
            let p = schedule.at(t);
            let expect = if p == 0 { a.at(pos[0]) } else { b.at(pos[1]) };
            pos[p] += 1;
            prop_assert_eq!(w.at(t), expect);
        }
    }
}
