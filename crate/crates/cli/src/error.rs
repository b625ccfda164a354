use std::io;

use choquet_core::continuous::ContinuousError;
use choquet_core::discrete::ChoquetError;
use choquet_core::estimates::EstimateError;
use choquet_core::operators::OperatorError;
use choquet_core::quadrature::QuadratureError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric non-convergence: {0}")]
    NonConvergence(String),
    #[error("output error: {0}")]
    Io(#[from] io::Error),
    #[error("output error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::NonConvergence(_) => 3,
            _ => 2,
        }
    }
}

fn quadrature_stalled(e: &QuadratureError) -> bool {
    matches!(
        e,
        QuadratureError::NonConvergence { .. } | QuadratureError::NonFinite { .. }
    )
}

fn classify(non_convergence: bool, msg: String) -> CliError {
    if non_convergence {
        CliError::NonConvergence(msg)
    } else {
        CliError::Config(msg)
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        classify(e.is_non_convergence(), e.to_string())
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::Operator(op) => op.into(),
            EstimateError::Choquet(c) => c.into(),
            EstimateError::Domain(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<ChoquetError> for CliError {
    fn from(e: ChoquetError) -> Self {
        let stalled = matches!(&e, ChoquetError::Quadrature(q) if quadrature_stalled(q));
        classify(stalled, e.to_string())
    }
}

impl From<ContinuousError> for CliError {
    fn from(e: ContinuousError) -> Self {
        let stalled = match &e {
            ContinuousError::Divergence(_) => true,
            ContinuousError::Quadrature(q) => quadrature_stalled(q),
            _ => false,
        };
        classify(stalled, e.to_string())
    }
}
