use std::fs;
use std::path::{Path, PathBuf};

use choquet_core::capacity::{DiscreteCapacity, Distortion, KernelFamily};
use choquet_core::function::FunctionSpec;
use choquet_core::operators::{
    bernstein_choquet_capacity, comparison_pair, CapacitySpec, Domain, KernelRef, OperatorRegistry,
    OperatorSettings, PerturbationProfile,
};
use choquet_core::quadrature::QuadratureConfig;
use serde::{Deserialize, Deserializer};

use crate::error::CliError;

/// Uniform grid `min, .., max` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            min: 0.0,
            max: 1.0,
            count: 11,
        }
    }
}

impl GridSpec {
    /// Parses `min:max:count`.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Config(format!("--xgrid expects min:max:count, got `{s}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(GridSpec {
            min: parts[0].trim().parse().map_err(|_| bad())?,
            max: parts[1].trim().parse().map_err(|_| bad())?,
            count: parts[2].trim().parse().map_err(|_| bad())?,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.max
                } else {
                    self.min + k as f64 * step
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(CliError::Config(format!(
                "grid count must be at least 2, got {}",
                self.count
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(CliError::Config(format!(
                "grid needs finite min < max, got {}:{}",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Finite-ground-set capacities accepted by `integrate` and `verify`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiscreteRule {
    /// Raw table in bit-mask order; not checked for monotonicity.
    Table {
        size: usize,
        table: Vec<f64>,
    },
    Additive {
        weights: Vec<f64>,
    },
    Possibility {
        weights: Vec<f64>,
    },
    /// `γ(P(A))`; `P` is uniform on `size` points unless weights are given.
    Distorted {
        gamma: Distortion,
        #[serde(default)]
        size: Option<usize>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    BernsteinPerturbed {
        n: usize,
        x: f64,
        #[serde(default = "one")]
        i0: usize,
        #[serde(default = "one_f")]
        theta: f64,
    },
}

fn one() -> usize {
    1
}

fn one_f() -> f64 {
    1.0
}

impl DiscreteRule {
    pub fn build(&self) -> Result<DiscreteCapacity, CliError> {
        let cap = match self {
            DiscreteRule::Table { size, table } => {
                DiscreteCapacity::from_table(*size, table.clone())
            }
            DiscreteRule::Additive { weights } => DiscreteCapacity::additive(weights.clone()),
            DiscreteRule::Possibility { weights } => DiscreteCapacity::possibility(weights.clone()),
            DiscreteRule::Distorted {
                gamma,
                size,
                weights,
            } => {
                let w = match (weights, size) {
                    (Some(w), None) => w.clone(),
                    (Some(w), Some(s)) if w.len() == *s => w.clone(),
                    (None, Some(s)) if *s > 0 => vec![1.0 / *s as f64; *s],
                    _ => {
                        return Err(CliError::Config(
                            "distorted capacity needs `size` or matching `weights`".into(),
                        ))
                    }
                };
                DiscreteCapacity::distorted_probability(*gamma, w)
            }
            DiscreteRule::BernsteinPerturbed { n, x, i0, theta } => {
                return bernstein_choquet_capacity(*n, *x, &PerturbationProfile::new(*i0, *theta))
                    .map_err(|e| CliError::Config(e.to_string()))
            }
        };
        cap.map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Capacity section of the config: a real-line capacity for the kernel
/// operators or a finite one for discrete integration.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CapacityConfig {
    Possibility {
        #[serde(default)]
        kernel: KernelRef,
    },
    DistortedLebesgue {
        gamma: Distortion,
    },
    Discrete(DiscreteRule),
}

impl Default for CapacityConfig {
    fn default() -> Self {
        CapacityConfig::Possibility {
            kernel: KernelRef::default(),
        }
    }
}

impl CapacityConfig {
    /// Short names `possibility`, `sqrt`, `lebesgue`, or inline JSON.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "possibility" => Ok(CapacityConfig::default()),
            "sqrt" => Ok(CapacityConfig::DistortedLebesgue {
                gamma: Distortion::Sqrt,
            }),
            "lebesgue" => Ok(CapacityConfig::DistortedLebesgue {
                gamma: Distortion::Identity,
            }),
            t if t.starts_with('{') => {
                serde_json::from_str(t).map_err(|e| CliError::Config(format!("--capacity: {e}")))
            }
            other => Err(CliError::Config(format!(
                "--capacity expects possibility, sqrt, lebesgue or JSON, got `{other}`"
            ))),
        }
    }

    pub fn real(&self) -> Option<CapacitySpec> {
        match self {
            CapacityConfig::Possibility { kernel } => {
                Some(CapacitySpec::Possibility { kernel: *kernel })
            }
            CapacityConfig::DistortedLebesgue { gamma } => {
                Some(CapacitySpec::DistortedLebesgue { gamma: *gamma })
            }
            CapacityConfig::Discrete(_) => None,
        }
    }

    pub fn name(&self) -> String {
        match self.real() {
            Some(spec) => spec.name(),
            None => "discrete".into(),
        }
    }
}

fn function_spec<'de, D: Deserializer<'de>>(d: D) -> Result<FunctionSpec, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        Name(String),
        Spec(FunctionSpec),
    }
    match Either::deserialize(d)? {
        Either::Name(name) => FunctionSpec::from_name(&name).map_err(serde::de::Error::custom),
        Either::Spec(spec) => Ok(spec),
    }
}

fn default_function() -> FunctionSpec {
    FunctionSpec::ConcaveQuad
}

fn default_operator() -> String {
    "bernstein_choquet".into()
}

fn default_n_list() -> Vec<usize> {
    vec![4, 8, 16, 32, 64]
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operator: String,
    pub capacity: CapacityConfig,
    #[serde(deserialize_with = "function_spec")]
    pub function: FunctionSpec,
    pub n_list: Vec<usize>,
    pub x_grid: GridSpec,
    pub perturbation: PerturbationProfile,
    pub quadrature: QuadratureConfig,
    /// Kernel integrated by `integrate` on the real line.
    pub kernel: KernelFamily,
    /// Function values for discrete `integrate`.
    pub values: Option<Vec<f64>>,
    pub trials: usize,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            operator: default_operator(),
            capacity: CapacityConfig::default(),
            function: default_function(),
            n_list: default_n_list(),
            x_grid: GridSpec::default(),
            perturbation: PerturbationProfile::default(),
            quadrature: QuadratureConfig::default(),
            kernel: KernelFamily::Laplace,
            values: None,
            trials: default_trials(),
            out: None,
            seed: 0,
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub operator: Option<String>,
    pub capacity: Option<String>,
    pub function: Option<String>,
    pub n: Option<String>,
    pub xgrid: Option<String>,
    pub theta: Option<f64>,
    pub i0: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub trials: Option<usize>,
}

pub fn parse_function(s: &str) -> Result<FunctionSpec, CliError> {
    let t = s.trim();
    let parsed = if t.starts_with('{') {
        serde_json::from_str(t).map_err(|e| e.to_string())
    } else {
        FunctionSpec::from_name(t).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Config(format!("--function: {e}")))
}

pub fn parse_n_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("--n expects positive integers, got `{p}`")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Integrate,
    Operator,
    Verify,
    Compare,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>, o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(op) = &o.operator {
            cfg.operator = op.clone();
        }
        if let Some(c) = &o.capacity {
            cfg.capacity = CapacityConfig::parse(c)?;
        }
        if let Some(f) = &o.function {
            cfg.function = parse_function(f)?;
        }
        if let Some(n) = &o.n {
            cfg.n_list = parse_n_list(n)?;
        }
        if let Some(g) = &o.xgrid {
            cfg.x_grid = GridSpec::parse(g)?;
        }
        if let Some(theta) = o.theta {
            cfg.perturbation.theta = theta;
        }
        if let Some(i0) = o.i0 {
            cfg.perturbation.i0 = i0;
        }
        if let Some(seed) = o.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &o.out {
            cfg.out = Some(out.clone());
        }
        if let Some(t) = o.trials {
            cfg.trials = t;
        }
        Ok(cfg)
    }

    pub fn settings(&self) -> OperatorSettings {
        OperatorSettings {
            profile: self.perturbation,
            capacity: self.capacity.real().unwrap_or_default(),
            quadrature: self.quadrature,
        }
    }

    /// Every check that can fail before the first evaluation.
    pub fn validate(&self, cmd: Command, registry: &OperatorRegistry) -> Result<(), CliError> {
        let config = |e: &dyn std::fmt::Display| CliError::Config(e.to_string());
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(CliError::Config(format!(
                "n_list must be nonempty and positive, got {:?}",
                self.n_list
            )));
        }
        self.x_grid.validate()?;
        self.function.validate().map_err(|e| config(&e))?;
        self.quadrature.validate().map_err(|e| config(&e))?;
        match &self.capacity {
            CapacityConfig::Discrete(rule) => {
                rule.build()?;
            }
            _ => self
                .capacity
                .real()
                .unwrap_or_default()
                .validate()
                .map_err(|e| config(&e))?,
        }
        match cmd {
            Command::Integrate => self.validate_integrate(),
            Command::Operator => self.validate_operator(&self.operator, registry),
            Command::Compare => {
                let (classical, choquet) = comparison_pair(&self.operator).ok_or_else(|| {
                    CliError::Config(format!(
                        "operator `{}` has no classical counterpart; compare supports bernstein and picard",
                        self.operator
                    ))
                })?;
                self.validate_operator(classical, registry)?;
                self.validate_operator(choquet, registry)
            }
            Command::Verify => {
                if self.capacity.real().is_none() {
                    return Ok(());
                }
                if registry.contains(&self.operator) {
                    self.validate_operator(&self.operator, registry)
                } else {
                    Err(self.unknown_operator(&self.operator, registry))
                }
            }
        }
    }

    fn validate_integrate(&self) -> Result<(), CliError> {
        match (&self.capacity, &self.values) {
            (CapacityConfig::Discrete(rule), Some(values)) => {
                let size = rule.build()?.ground().size();
                if values.len() != size {
                    return Err(CliError::Config(format!(
                        "values has {} entries but the capacity has {size} elements",
                        values.len()
                    )));
                }
                if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                    return Err(CliError::Config(format!("non-finite value {v}")));
                }
                Ok(())
            }
            (CapacityConfig::Discrete(_), None) => Err(CliError::Config(
                "discrete integration needs `values` in the config".into(),
            )),
            (_, Some(_)) => Err(CliError::Config(
                "`values` only applies to a discrete capacity".into(),
            )),
            (_, None) => {
                if self.function.nonnegative_on_real() {
                    Ok(())
                } else {
                    Err(CliError::Config(format!(
                        "{} takes negative values on the real line",
                        self.function.name()
                    )))
                }
            }
        }
    }

    fn unknown_operator(&self, name: &str, registry: &OperatorRegistry) -> CliError {
        CliError::Config(format!(
            "unknown operator `{name}`; registered: {}",
            registry.names().join(", ")
        ))
    }

    fn validate_operator(&self, name: &str, registry: &OperatorRegistry) -> Result<(), CliError> {
        let op = registry
            .build(name, &self.settings())
            .map_err(|_| self.unknown_operator(name, registry))?;
        if self.capacity.real().is_none() {
            return Err(CliError::Config(format!(
                "operator `{name}` needs a real-line capacity, not a discrete one"
            )));
        }
        for x in self.x_grid.points() {
            op.domain()
                .check(x)
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        if op.domain() == Domain::RealLine && !self.function.nonnegative_on_real() {
            return Err(CliError::Config(format!(
                "{} takes negative values on the real line; `{name}` integrates nonnegative functions",
                self.function.name()
            )));
        }
        if name == "bernstein_choquet" {
            for &n in &self.n_list {
                self.perturbation
                    .validate(n)
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
        }
        Ok(())
    }
}
