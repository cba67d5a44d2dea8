//! Replays compiled states to check the reduction end to end.
//!
//! [`verify_reduction`] searches the game only at decision points: between
//! them every move must be forced, and the replay asserts that it is.
//! [`gadget_conformance`] checks each gadget's local behavior on a small
//! bench, and [`adversarial_probe`] tries off-script moves.

mod conformance;
mod probe;
mod walk;

use serde::{Deserialize, Serialize};

pub use conformance::{gadget_conformance, ConformanceCheck, ConformanceReport};
pub use probe::{adversarial_probe, ProbeReport};
pub use walk::{Explorer, Failure, FailureKind, Value, Walker};

use crate::error::{Error, Result};
use crate::qbf::Formula;
use crate::reduction::{compile, DecisionKind, ReductionOutput};

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Refuse formulas with more branching decisions than this. Defaults to
    /// `n + 2 + Σ clause widths`.
    pub max_decisions: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub formula: String,
    pub k: u32,
    pub eval: bool,
    pub hero_wins: bool,
    pub lines_explored: u64,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    /// Replay agrees with the formula and no assertion failed.
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.eval == self.hero_wins
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn verify_reduction(formula: &Formula, k: u32) -> Result<VerifyReport> {
    verify_with(formula, k, &VerifyOptions::default())
}

pub fn verify_with(formula: &Formula, k: u32, opts: &VerifyOptions) -> Result<VerifyReport> {
    let out = compile(formula, k)?;
    let bound = opts
        .max_decisions
        .unwrap_or(formula.n() + 2 + formula.clauses().iter().map(|c| c.len()).sum::<usize>());
    let branching = out.decisions.iter().filter(|d| d.kind != DecisionKind::CheckB).count();
    if branching > bound {
        return Err(Error::Refused(format!(
            "{branching} decision points exceed the bound of {bound}"
        )));
    }
    verify_output(&out, formula)
}

/// Replays an already compiled state of `formula`.
pub fn verify_output(out: &ReductionOutput, formula: &Formula) -> Result<VerifyReport> {
    let mut ex = Explorer::new(out)?;
    ex.cutoff = true;
    let v = ex.explore();
    let eval = formula.eval();
    let mut failures = ex.failures;
    if v.score == 0 {
        failures.push(Failure {
            kind: FailureKind::DeadEnd,
            message: "replay ended without a winner".into(),
            trace: Vec::new(),
        });
    }
    let hero_wins = v.score > 0;
    if hero_wins != eval {
        failures.push(Failure {
            kind: FailureKind::Outcome,
            message: format!("formula is {eval}, but hero_wins is {hero_wins}"),
            trace: Vec::new(),
        });
    }
    Ok(VerifyReport {
        formula: formula.to_string(),
        k: out.k,
        eval,
        hero_wins,
        lines_explored: ex.lines,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qbf::parse_qdimacs;

    fn check(text: &str, k: u32, want: bool) {
        let f = parse_qdimacs(text).unwrap();
        let r = verify_reduction(&f, k).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.hero_wins, want);
    }

    #[test]
    fn exists_x_x_hero_wins() {
        check("p cnf 1 1\ne 1 0\n1 0\n", 2, true);
    }

    #[test]
    fn forall_x_x_adversary_wins() {
        check("p cnf 1 1\na 1 0\n1 0\n", 2, false);
    }

    #[test]
    fn exists_forall_pair() {
        check("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n1 -2 0\n", 2, true);
        check("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n1 -2 0\n", 3, true);
    }

    #[test]
    fn forall_exists_false_instance() {
        // Whatever x1 is, x2 must equal it and differ from it.
        check("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n1 -2 0\n", 2, false);
    }

    #[test]
    fn small_random_formulas_agree_with_eval() {
        for seed in 0..6 {
            let f = crate::qbf::random_formula(2 + (seed % 2) as usize, 2, 2, seed).unwrap();
            let r = verify_reduction(&f, 2).unwrap();
            assert!(r.passed(), "{}", r.to_json());
        }
    }

    #[test]
    fn decision_bound_is_enforced() {
        let f = parse_qdimacs("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n1 -2 0\n").unwrap();
        let opts = VerifyOptions { max_decisions: Some(1) };
        assert!(matches!(verify_with(&f, 2, &opts), Err(Error::Refused(_))));
    }
}
