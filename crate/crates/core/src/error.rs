use thiserror::Error;

use crate::lattice::Coord;

/// Which rule a rejected move broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveViolation {
    NotInWindow,
    Recolor,
    Finished,
    Uncolored,
    OffBoard,
}

impl MoveViolation {
    pub fn as_str(self) -> &'static str {
        match self {
            MoveViolation::NotInWindow => "not-in-window",
            MoveViolation::Recolor => "recolor",
            MoveViolation::Finished => "finished",
            MoveViolation::Uncolored => "uncolored",
            MoveViolation::OffBoard => "off-board",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("node {0} is not on the board")]
    NotFound(Coord),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("boundary node {coord} carries {found}, allowed {allowed}")]
    Boundary {
        coord: Coord,
        found: char,
        allowed: String,
    },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid move: {}", .0.as_str())]
    InvalidMove(MoveViolation),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("placement conflict: {0}")]
    PlacementConflict(String),
    #[error("routing failure: {0}")]
    Routing(String),
    #[error("refused: {0}")]
    Refused(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
