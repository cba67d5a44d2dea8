//! Prenex CNF quantified Boolean formulas: data model, QDIMACS I/O and a
//! brute-force evaluator used as the truth oracle for the reduction.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    Exists,
    ForAll,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Exists => Quantifier::ForAll,
            Quantifier::ForAll => Quantifier::Exists,
        }
    }

    fn token(self) -> &'static str {
        match self {
            Quantifier::Exists => "e",
            Quantifier::ForAll => "a",
        }
    }
}

/// A variable (numbered from 1) with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: u32,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: u32, positive: bool) -> Literal {
        Literal { var, positive }
    }

    /// From a DIMACS integer: `3` is x3, `-3` is ¬x3.
    pub fn from_dimacs(v: i64) -> Option<Literal> {
        let var = u32::try_from(v.unsigned_abs()).ok().filter(|&x| x > 0)?;
        Some(Literal::new(var, v > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn negated(self) -> Literal {
        Literal::new(self.var, !self.positive)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "¬x{}", self.var)
        }
    }
}

pub type Clause = Vec<Literal>;

/// A closed prenex formula whose matrix is in CNF. Variables are exactly
/// `1..=n`, each quantified once; `prefix` lists them outermost first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Formula {
    prefix: Vec<(Quantifier, u32)>,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(prefix: Vec<(Quantifier, u32)>, clauses: Vec<Clause>) -> Result<Formula> {
        let n = prefix.len() as u32;
        let mut seen = vec![false; n as usize + 1];
        for &(_, v) in &prefix {
            if v == 0 || v > n {
                return Err(Error::InvalidArgument(format!(
                    "variable {v} outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::InvalidArgument(format!("variable {v} quantified twice")));
            }
        }
        for (j, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::InvalidArgument(format!("clause {} is empty", j + 1)));
            }
            if let Some(l) = c.iter().find(|l| l.var == 0 || l.var > n) {
                return Err(Error::InvalidArgument(format!("clause {} uses free variable {}", j + 1, l.var)));
            }
        }
        Ok(Formula { prefix, clauses })
    }

    pub fn prefix(&self) -> &[(Quantifier, u32)] {
        &self.prefix
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn n(&self) -> usize {
        self.prefix.len()
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn quantifier_of(&self, var: u32) -> Option<Quantifier> {
        self.prefix.iter().find(|p| p.1 == var).map(|p| p.0)
    }

    /// Canonical QDIMACS: one quantifier line per run of equal quantifiers.
    pub fn to_qdimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n(), self.m());
        let mut i = 0;
        while i < self.prefix.len() {
            let q = self.prefix[i].0;
            out.push_str(q.token());
            while i < self.prefix.len() && self.prefix[i].0 == q {
                out.push_str(&format!(" {}", self.prefix[i].1));
                i += 1;
            }
            out.push_str(" 0\n");
        }
        for c in &self.clauses {
            for l in c {
                out.push_str(&format!("{} ", l.to_dimacs()));
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn eval(&self) -> bool {
        let mut assignment = vec![false; self.n() + 1];
        self.eval_from(0, &mut assignment)
    }

    fn eval_from(&self, depth: usize, assignment: &mut [bool]) -> bool {
        let Some(&(q, v)) = self.prefix.get(depth) else {
            return self.matrix_holds(assignment);
        };
        let branch = |value: bool, a: &mut [bool]| {
            a[v as usize] = value;
            self.eval_from(depth + 1, a)
        };
        match q {
            Quantifier::Exists => branch(false, assignment) || branch(true, assignment),
            Quantifier::ForAll => branch(false, assignment) && branch(true, assignment),
        }
    }

    /// CNF value under a full assignment indexed by variable.
    pub fn matrix_holds(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| assignment[l.var as usize] == l.positive))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(q, v) in &self.prefix {
            let sym = if q == Quantifier::Exists { '∃' } else { '∀' };
            write!(f, "{sym}x{v} ")?;
        }
        let clauses: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<String> = c.iter().map(|l| l.to_string()).collect();
                format!("({})", lits.join(" ∨ "))
            })
            .collect();
        if clauses.is_empty() {
            write!(f, "⊤")
        } else {
            write!(f, "{}", clauses.join(" ∧ "))
        }
    }
}

/// Free-function form of [`Formula::eval`].
pub fn eval(formula: &Formula) -> bool {
    formula.eval()
}

/// Parses the QDIMACS subset: comment lines `c ...`, a `p cnf n m` header,
/// quantifier lines `e|a v... 0`, then one clause per line ending in `0`.
pub fn parse_qdimacs(text: &str) -> Result<Formula> {
    let mut header: Option<(u32, usize)> = None;
    let mut prefix: Vec<(Quantifier, u32)> = Vec::new();
    let mut quantified_at: Vec<Option<usize>> = Vec::new();
    let mut clauses: Vec<Clause> = Vec::new();
    let mut last_line = 0;

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks = tokens(raw);
        let Some((n, _)) = header else {
            let words: Vec<&str> = toks.iter().map(|t| t.1).collect();
            if words.len() != 4 || words[0] != "p" || words[1] != "cnf" {
                return Err(Error::parse(line_no, 1, "expected header `p cnf <vars> <clauses>`"));
            }
            let n = words[2]
                .parse::<u32>()
                .map_err(|_| Error::parse(line_no, toks[2].0, "bad variable count"))?;
            let m = words[3]
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, toks[3].0, "bad clause count"))?;
            header = Some((n, m));
            quantified_at = vec![None; n as usize + 1];
            continue;
        };

        let (q, body) = match toks[0].1 {
            "e" => (Some(Quantifier::Exists), &toks[1..]),
            "a" => (Some(Quantifier::ForAll), &toks[1..]),
            _ => (None, &toks[..]),
        };
        if q.is_some() && !clauses.is_empty() {
            return Err(Error::parse(line_no, toks[0].0, "quantifier line after clauses"));
        }
        let Some((&(end_col, end), items)) = body.split_last() else {
            return Err(Error::parse(line_no, toks[0].0 + 1, "missing terminating 0"));
        };
        if end != "0" {
            return Err(Error::parse(line_no, end_col, "line must end with 0"));
        }
        let mut nums = Vec::with_capacity(items.len());
        for &(col, t) in items {
            let v: i64 = t
                .parse()
                .map_err(|_| Error::parse(line_no, col, format!("expected an integer, found `{t}`")))?;
            if v == 0 {
                return Err(Error::parse(line_no, col, "0 before end of line"));
            }
            if v.unsigned_abs() > n as u64 {
                return Err(Error::parse(line_no, col, format!("variable {} exceeds declared count {n}", v.abs())));
            }
            nums.push((col, v));
        }
        match q {
            Some(q) => {
                for (col, v) in nums {
                    if v < 0 {
                        return Err(Error::parse(line_no, col, "negative variable in quantifier line"));
                    }
                    if let Some(prev) = quantified_at[v as usize] {
                        return Err(Error::parse(
                            line_no,
                            col,
                            format!("variable {v} already quantified on line {prev}"),
                        ));
                    }
                    quantified_at[v as usize] = Some(line_no);
                    prefix.push((q, v as u32));
                }
            }
            None => {
                if nums.is_empty() {
                    return Err(Error::parse(line_no, end_col, "empty clause"));
                }
                let mut clause = Vec::with_capacity(nums.len());
                for (col, v) in nums {
                    if quantified_at[v.unsigned_abs() as usize].is_none() {
                        return Err(Error::parse(line_no, col, format!("free variable {}", v.abs())));
                    }
                    clause.push(Literal::from_dimacs(v).expect("nonzero"));
                }
                clauses.push(clause);
            }
        }
    }

    let Some((n, m)) = header else {
        return Err(Error::parse(last_line.max(1), 1, "missing `p cnf` header"));
    };
    if let Some(v) = (1..=n).find(|&v| quantified_at[v as usize].is_none()) {
        return Err(Error::parse(last_line, 1, format!("variable {v} is never quantified")));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            last_line,
            1,
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    Formula::new(prefix, clauses)
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (i, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((col + 1, i)),
            (true, Some((c, s))) => {
                out.push((c, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((c, s)) = start {
        out.push((c, &line[s..]));
    }
    out
}

/// A formula over `1..=n` with random quantifiers and `m` clauses of
/// `literals_per_clause` literals each (distinct variables when possible).
pub fn random_formula(n: usize, m: usize, literals_per_clause: usize, seed: u64) -> Result<Formula> {
    if n == 0 || m == 0 || literals_per_clause == 0 {
        return Err(Error::InvalidArgument("n, m and literals per clause must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prefix = (1..=n as u32)
        .map(|v| {
            let q = if rng.gen_bool(0.5) { Quantifier::Exists } else { Quantifier::ForAll };
            (q, v)
        })
        .collect();
    let clauses = (0..m)
        .map(|_| {
            let mut vars: Vec<u32> = Vec::with_capacity(literals_per_clause);
            while vars.len() < literals_per_clause {
                let v = rng.gen_range(1..=n as u32);
                if literals_per_clause > n || !vars.contains(&v) {
                    vars.push(v);
                }
            }
            vars.into_iter().map(|v| Literal::new(v, rng.gen_bool(0.5))).collect()
        })
        .collect();
    Formula::new(prefix, clauses)
}
