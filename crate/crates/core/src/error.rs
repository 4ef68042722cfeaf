use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |M - M†| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("angle {0} outside (0, π/2]")]
    AngleOutOfRange(f64),

    #[error("β = {0} outside [0, 2)")]
    BetaOutOfRange(f64),

    #[error("ε = {0} outside (0, 1)")]
    EpsilonOutOfRange(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("outcome {outcome} is not rank one (second eigenvalue {second_eigenvalue:.3e})")]
    NotRankOne {
        outcome: usize,
        second_eigenvalue: f64,
    },

    #[error("η matrix is ill-conditioned (κ = {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("{what} violated (residual {residual:.3e})")]
    Constraint { what: String, residual: f64 },

    #[error("ancilla marginal is rank deficient (smallest eigenvalue {min_eigenvalue:.3e})")]
    RankDeficient { min_eigenvalue: f64 },

    #[error("attack is degenerate: {0}")]
    DegenerateAttack(String),

    #[error("distribution is not normalized (total {total})")]
    Unnormalized { total: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
