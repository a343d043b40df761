use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph parameters: {0}")]
    InvalidGraph(String),

    #[error("n*d must be even for a d-regular graph (n={n}, d={d})")]
    DegreeParity { n: usize, d: usize },

    #[error("no simple {d}-regular graph on {n} vertices after {attempts} configuration-model attempts")]
    RetryCapExhausted { n: usize, d: usize, attempts: u32 },

    #[error("{what} is limited to {cap} bits/vertices, got {got}")]
    SizeCap { what: &'static str, cap: usize, got: usize },

    #[error("configuration length {got} does not match arity {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("threshold k={k} outside [1, {max_degree}]")]
    InvalidThreshold { k: usize, max_degree: usize },

    #[error("rectangle does not fit the host graph: {0}")]
    RectangleOutOfBounds(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("p={p} is above the critical value p*={p_star}; p = 1 - R(y) has no root")]
    NoRoot { p: f64, p_star: f64 },

    #[error("remark inapplicable: requires d < 2k + h_E (d={d}, k={k}, h_E={h_e})")]
    WitnessInapplicable { h_e: f64, d: usize, k: usize },

    #[error("degenerate regime: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),
}
