//! Atropos-k: game engine, exact solver, and a compiler from quantified
//! Boolean formulas to game states whose winner encodes the formula's truth.

pub mod error;
pub mod lattice;
pub mod qbf;
pub mod reduction;
pub mod rules;
pub mod solver;
pub mod verifier;

pub use error::{Error, MoveViolation, Result};
pub use lattice::{make_board, Board, Color, Coord, Corner, Dir};
pub use qbf::{eval, parse_qdimacs, random_formula, Formula, Literal, Quantifier};
pub use rules::{GameState, Move, Player, Reach, RulesConfig, Status};
pub use solver::{brute_force_solve, engine_move, solve, solve_parallel, SolveLimits, SolveResult};
pub use reduction::{compile, validate_output, GadgetKind, ReductionOutput, Sidecar, ValidationReport};
pub use verifier::{
    adversarial_probe, gadget_conformance, verify_reduction, verify_with, ConformanceReport, ProbeReport, VerifyOptions,
    VerifyReport,
};
