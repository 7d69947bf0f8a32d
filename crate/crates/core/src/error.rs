use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid net: {0}")]
    InvalidNet(String),
    #[error("invalid Bayesian network: {0}")]
    InvalidBayesNet(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0} is not a controllable transition")]
    NotControllable(String),
    #[error("exploration budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("simulation step cap of {0} exceeded")]
    StepCapExceeded(usize),
    #[error("net is cyclic")]
    CyclicNet,
    #[error("net is not a free-choice occurrence net")]
    NotOccurrenceNet,
    #[error("net is not safe, acyclic and free-choice: {0}")]
    NotSafc(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("initial marking is empty")]
    EmptyInitialMarking,
    #[error("{0} controllable transitions exceed the cap of {1}")]
    CapExceeded(usize, usize),
    #[error("SMT solver unavailable: {0}")]
    SolverUnavailable(String),
    #[error("could not parse solver output: {0}")]
    SolverOutputUnparseable(String),
    #[error("solver timed out after {0} ms")]
    SolverTimeout(u64),
    #[error("solver witness failed exact verification: {0}")]
    WitnessVerificationFailed(String),
    #[error("conditioning on an event of probability zero")]
    ZeroConditioning,
    #[error("variable {0} is not binary")]
    NotBinary(String),
    #[error("variable {0} has parents and cannot be a MAP input")]
    NotUniformInput(String),
    #[error("bound {0} exceeded: {1}")]
    BoundExceeded(char, String),
    #[error("value iteration did not converge within {0} steps")]
    HorizonNotConverged(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
