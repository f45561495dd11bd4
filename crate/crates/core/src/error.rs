use thiserror::Error;

use crate::netsim::{PartyId, Round};

/// Errors raised by the sharing primitives, the simulator and the protocols.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty key range")]
    EmptyKeyRange,

    #[error("causality violation: {party} reads `{label}` in round {round}")]
    Causality {
        party: PartyId,
        label: String,
        round: Round,
    },

    #[error("phase violation: {phase} message from {from} to {to}")]
    PhaseViolation {
        phase: crate::netsim::Phase,
        from: PartyId,
        to: PartyId,
    },

    #[error("duplicate label `{label}` at {party}")]
    DuplicateLabel { party: PartyId, label: String },

    #[error("operand aliasing: both operands are slot {slot} of `{var}`")]
    OperandAliasing { var: String, slot: String },

    #[error("slot orientation: `{var}` must use its {expected} slot here")]
    SlotOrientation { var: String, expected: String },

    #[error("shares not resident at helper: {0}")]
    NotResident(String),

    #[error("slot budget exhausted for `{0}`")]
    SlotBudget(String),

    #[error("empty gate")]
    EmptyGate,

    #[error("fan-in budget: {w} operands exceed the maximum of {max}")]
    FanInBudget { w: usize, max: usize },

    #[error("base domain: the public base must be positive")]
    BaseDomain,

    #[error("value bound: {0}")]
    ValueBound(String),

    #[error("exponent must be an integer")]
    NonIntegerExponent,

    #[error("range too large: {states} states exceed the enumeration limit of {limit}")]
    RangeTooLarge { states: u128, limit: u128 },

    #[error("enumeration budget: {bits} tape bits exceed the limit of {limit}")]
    EnumerationBudget { bits: usize, limit: usize },

    #[error("draw count changed between runs ({expected} vs {found})")]
    DrawCountMismatch { expected: usize, found: usize },

    #[error("symbolic variable limit of {0} exceeded")]
    VariableLimit(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing input `{0}`")]
    MissingInput(String),

    #[error("cost bound needs 1 <= v <= t <= v(v-1)/2, got v={v} t={t}")]
    CostBoundRange { v: u64, t: u64 },

    #[error("transcript line {line}: {message}")]
    TranscriptFormat { line: usize, message: String },

    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
