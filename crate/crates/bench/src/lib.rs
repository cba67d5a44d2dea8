//! Fixtures shared by the benchmarks.

use atropos_core::{make_board, Color, Coord, Formula, GameState, Player, RulesConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded rainbow-free positions on `make_board(size)` with roughly
/// `fill` of the interior colored.
pub fn positions(size: u32, k: u32, fill: f64, count: usize, seed: u64) -> Vec<GameState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = make_board(size).expect("board size is positive");
    let interior: Vec<Coord> = base.interior().collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut b = base.clone();
        for &n in &interior {
            if rng.gen_bool(fill) {
                b.set(n, Color::PLAYER[rng.gen_range(0..3)]).expect("interior node");
            }
        }
        if b.count_uncolored() == 0 || b.has_rainbow() {
            continue;
        }
        let colored: Vec<Coord> = interior.iter().copied().filter(|&n| b.color(n).is_player()).collect();
        let last = (!colored.is_empty()).then(|| colored[rng.gen_range(0..colored.len())]);
        let config = RulesConfig::new(k).expect("k >= 1");
        out.push(GameState::resume(b, last, Player::Hero, config).expect("rainbow-free"));
    }
    out
}

/// A few fixed formulas of growing size, for compile and verify benches.
pub fn formulas() -> Vec<(&'static str, Formula)> {
    let named = [
        ("exists_x", "p cnf 1 1\ne 1 0\n1 0\n"),
        ("exists_forall", "p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n1 -2 0\n"),
        ("three_vars", "p cnf 3 2\ne 1 0\na 2 0\ne 3 0\n1 -2 3 0\n-1 2 -3 0\n"),
    ];
    let mut out: Vec<_> = named
        .into_iter()
        .map(|(n, t)| (n, atropos_core::parse_qdimacs(t).expect("fixture parses")))
        .collect();
    out.push(("random_5x5", atropos_core::random_formula(5, 5, 3, 4).expect("fixture")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_seeded_and_legal() {
        let a = positions(5, 2, 0.5, 6, 1);
        assert_eq!(a, positions(5, 2, 0.5, 6, 1));
        assert!(a.iter().all(|s| !s.is_over() && !s.board.has_rainbow()));
        assert_eq!(formulas().len(), 4);
    }
}
