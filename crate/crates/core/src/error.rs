use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("caustic: |det(M+1)| = {det:e} below tolerance")]
    Caustic { det: f64 },
    #[error("singular V: det V = 0")]
    SingularV,
    #[error("short-time divergence: |det(M-1)| = {det:e} below tolerance")]
    ShortTimeDivergence { det: f64 },
    #[error("accidental caustic: |det[V(M+1)]| = {det:e} below tolerance")]
    AccidentalCaustic { det: f64 },
    #[error("even N = {0} unsupported (Weyl symbol and reflections need odd N)")]
    EvenNUnsupported(usize),
    #[error("point ({p}, {q}) is not on the required lattice for N = {n}")]
    OffLattice { p: f64, q: f64, n: usize },
    #[error("no power k <= {cap} with U^k proportional to the identity (N = {n})")]
    NotFound { n: usize, cap: usize },
    #[error("Fock truncation failed: {0}")]
    Truncation(String),
    #[error("integer overflow computing matrix power t = {0}")]
    Overflow(u32),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
