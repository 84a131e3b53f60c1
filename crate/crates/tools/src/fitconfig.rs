//! Fit configuration and report documents.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use muscle_core::fitting::{
    default_bounds, error_report, FitOptions, FitProblem, FitResult, FreeParam, Stage,
};
use muscle_core::ModelKind;
use serde::{Deserialize, Serialize};

use crate::datasets::load_datasets;
use crate::error::{Result, ToolError};
use crate::params::{expected_unit, material_from};

/// Start and bounds of one free parameter; missing entries fall back to the
/// base parameter set and the default box.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeSpec {
    pub start: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageName {
    Passive,
    Active,
}

/// JSON fit configuration. Relative paths resolve against the directory of
/// the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub model: String,
    /// Base parameter file; the published set when absent.
    #[serde(default)]
    pub params: Option<PathBuf>,
    pub stage: StageName,
    pub free: BTreeMap<String, FreeSpec>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    pub datasets: Vec<PathBuf>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub restarts: usize,
}

impl FitConfig {
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
        let cfg = serde_json::from_str(&text).map_err(|e| ToolError::Json {
            path: path.into(),
            source: e,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn problem(&self, base: &Path) -> Result<FitProblem> {
        let kind: ModelKind = self.model.parse()?;
        let resolve = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base.join(p) };
        let mut material = material_from(kind, self.params.as_ref().map(resolve).as_deref())?;
        for (name, value) in &self.fixed {
            if self.free.contains_key(name) {
                return Err(ToolError::invalid(format!("'{name}' is both free and fixed")));
            }
            material.set(name, *value)?;
        }
        let mut free = Vec::with_capacity(self.free.len());
        for (name, spec) in &self.free {
            if material.get(name).is_none() {
                return Err(ToolError::invalid(format!("model {kind} has no parameter '{name}'")));
            }
            let (lo, hi) = default_bounds(kind, name);
            if let Some(start) = spec.start {
                material.set(name, start)?;
            }
            free.push(FreeParam {
                name: name.clone(),
                lower: spec.lower.unwrap_or(lo),
                upper: spec.upper.unwrap_or(hi),
            });
        }
        material.validate()?;
        let mut datasets = Vec::new();
        for p in &self.datasets {
            datasets.extend(load_datasets(&resolve(p))?);
        }
        let stage = match self.stage {
            StageName::Passive => Stage::Passive,
            StageName::Active => Stage::Active,
        };
        let mut problem = FitProblem::new(material, free, datasets, stage)?;
        problem.options = FitOptions {
            max_iterations: self.max_iterations.unwrap_or(problem.options.max_iterations),
            restarts: self.restarts,
            ..problem.options
        };
        Ok(problem)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamEstimate {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetReport {
    pub case: String,
    pub state: String,
    pub source: String,
    pub e_inf: f64,
    pub e_1: f64,
    pub e_2: f64,
    /// Model minus data at each point (kPa).
    pub residuals: Vec<f64>,
}

/// Machine-readable fit outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub model: String,
    pub converged: bool,
    pub iterations: usize,
    pub initial_cost: f64,
    pub cost: f64,
    pub params: Vec<ParamEstimate>,
    pub datasets: Vec<DatasetReport>,
}

impl FitReport {
    pub fn new(problem: &FitProblem, result: &FitResult) -> Self {
        let kind = result.material.kind();
        FitReport {
            model: kind.name().to_owned(),
            converged: result.converged,
            iterations: result.iterations,
            initial_cost: result.initial_cost,
            cost: result.cost,
            params: result
                .params
                .iter()
                .map(|(name, value)| ParamEstimate {
                    name: name.clone(),
                    value: *value,
                    unit: expected_unit(kind, name).unwrap_or("-").to_owned(),
                })
                .collect(),
            datasets: problem
                .datasets
                .iter()
                .zip(&result.residuals)
                .zip(&result.errors)
                .map(|((ds, res), e)| DatasetReport {
                    case: ds.spec.case.name().to_owned(),
                    state: ds.spec.state.name().to_owned(),
                    source: ds.source.clone(),
                    e_inf: e.inf,
                    e_1: e.l1,
                    e_2: e.l2,
                    residuals: res.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Human-readable summary: parameters, then the error table in percent.
pub fn human_summary(problem: &FitProblem, result: &FitResult) -> String {
    let mut out = format!(
        "model {}  converged {}  iterations {}  cost {:.6e} (start {:.6e})\n",
        result.material.kind(),
        result.converged,
        result.iterations,
        result.cost,
        result.initial_cost
    );
    let kind = result.material.kind();
    for (name, value) in &result.params {
        out.push_str(&format!(
            "  {name:<14} {value:>14.6} {}\n",
            expected_unit(kind, name).unwrap_or("-")
        ));
    }
    let rows: Vec<_> = problem
        .datasets
        .iter()
        .zip(&result.errors)
        .map(|(ds, e)| (ds.spec, vec![(kind, *e)]))
        .collect();
    out.push_str("relative errors (%)\n");
    out.push_str(&error_report(&rows));
    out
}
