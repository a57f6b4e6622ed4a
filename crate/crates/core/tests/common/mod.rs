#![allow(dead_code)]

use std::path::PathBuf;

use cgame_core::format::{read_game_file, GameFile};
use cgame_core::Game;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture(name: &str) -> GameFile {
    read_game_file(&fixture_path(name)).expect("fixture parses")
}

pub fn fixture_game(name: &str) -> Game {
    fixture(name).game().expect("fixture embeds as a game")
}

use std::sync::Arc;

use cgame_core::format::parse_condition;
use cgame_core::{Color, Condition};
use proptest::prelude::*;

pub fn condition(text: &str, alphabet: &[&str]) -> Arc<Condition> {
    let colors = alphabet.iter().map(|c| Color::parse(c).unwrap()).collect();
    Arc::new(Condition::build(parse_condition(text).unwrap(), colors).unwrap())
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Game from `(color, successor)` cells listed in `(q, a, b)` order.
pub fn game_from(nq: usize, na: usize, nb: usize, cond: Arc<Condition>, cells: &[(usize, usize)]) -> Game {
    let mut col = vec![vec![vec![0; nb]; na]; nq];
    let mut delta = col.clone();
    for q in 0..nq {
        for a in 0..na {
            for b in 0..nb {
                let (c, n) = cells[(q * na + a) * nb + b];
                col[q][a][b] = c;
                delta[q][a][b] = n;
            }
        }
    }
    Game::new(names("q", nq), names("a", na), names("b", nb), 0, cond, &delta, &col).unwrap()
}

/// Random games with up to `max_q` states and `max_a` actions per player over `cond`'s alphabet.
pub fn arb_game(cond: Arc<Condition>, max_q: usize, max_a: usize, max_b: usize) -> impl Strategy<Value = Game> {
    let nc = cond.alphabet().len();
    (1..=max_q, 1..=max_a, 1..=max_b).prop_flat_map(move |(nq, na, nb)| {
        let cond = cond.clone();
        prop::collection::vec((0..nc, 0..nq), nq * na * nb).prop_map(move |cells| game_from(nq, na, nb, cond.clone(), &cells))
    })
}
