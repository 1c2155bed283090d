use serde::Serialize;

/// Proven lower bound on `O_t / t`.
pub const LOWER_RATIO: f64 = 1.0 / 342.0;
/// Proven upper bound on `O_t / t`.
pub const UPPER_RATIO: f64 = 2.0 / 3.0;

pub const DEFAULT_DELTAS: [f64; 4] = [0.005, 0.01, 0.02, 0.05];

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot merge statistics from different runs ({0})")]
    ConfigMismatch(String),
    #[error("replica {0} appears in both operands of a merge")]
    OverlappingReplicas(u64),
    #[error("not enough data: {0}")]
    InsufficientData(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleConfig {
    /// Steps per replica.
    pub t: u64,
    pub replicas: u64,
    pub master_seed: u64,
    pub deltas: Vec<f64>,
    /// Series cadence per replica; 0 records nothing.
    pub cadence: u64,
    /// `(c1, c2)` for the per-replica check `c1 <= O/t <= c2`.
    pub c_bounds: (f64, f64),
}

impl EnsembleConfig {
    pub fn new(t: u64, replicas: u64, master_seed: u64) -> Self {
        EnsembleConfig {
            t,
            replicas,
            master_seed,
            deltas: DEFAULT_DELTAS.to_vec(),
            cadence: 0,
            c_bounds: (LOWER_RATIO, UPPER_RATIO),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.t < 1 {
            return Err(HarnessError::InvalidConfig("t must be at least 1".into()));
        }
        if self.replicas < 1 {
            return Err(HarnessError::InvalidConfig("at least one replica is needed".into()));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
            return Err(HarnessError::InvalidConfig(format!("delta {d} is not in (0, 1]")));
        }
        let (c1, c2) = self.c_bounds;
        if c1.partial_cmp(&c2) != Some(std::cmp::Ordering::Less) {
            return Err(HarnessError::InvalidConfig(format!(
                "c1 = {c1} must be below c2 = {c2}"
            )));
        }
        Ok(())
    }
}
