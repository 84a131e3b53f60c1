//! Bound-constrained least-squares identification of model parameters from
//! stress-stretch data, and the relative error measures.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::loadcases::{LoadCase, LoadCaseSpec, MuscleState};
use crate::materials::{Material, ModelKind};
use crate::num;

/// Measured (or synthetic) nominal stresses of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub spec: LoadCaseSpec,
    /// `(stretch or shear, nominal stress in kPa)`, abscissae increasing.
    pub points: Vec<(f64, f64)>,
    pub weight: f64,
    pub source: String,
}

impl Dataset {
    pub fn new(spec: LoadCaseSpec, points: Vec<(f64, f64)>, weight: f64, source: impl Into<String>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::input(format!(
                "{} dataset needs at least 3 points, got {}",
                spec.case,
                points.len()
            )));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::input("non-finite data point"));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::input(format!(
                "{} abscissae must be strictly increasing",
                spec.case
            )));
        }
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(Error::input("dataset weight must be non-negative"));
        }
        Ok(Dataset {
            spec,
            points,
            weight,
            source: source.into(),
        })
    }

    pub fn abscissae(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn stresses(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// Model response at the dataset abscissae.
    pub fn model_curve(&self, material: &Material) -> Result<Vec<f64>> {
        self.points
            .iter()
            .map(|&(x, _)| self.spec.response(material, x))
            .collect()
    }
}

/// Which part of the response is identified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Passive,
    Active,
}

/// A parameter adjusted by the fit, with its box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeParam {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl FreeParam {
    /// Free parameter with the default bounds of the model.
    pub fn with_default_bounds(kind: ModelKind, name: &str) -> Self {
        let (lower, upper) = default_bounds(kind, name);
        FreeParam {
            name: name.to_string(),
            lower,
            upper,
        }
    }
}

/// Parameters that only shape the active response.
pub fn is_active_param(kind: ModelKind, name: &str) -> bool {
    match kind {
        ModelKind::Ble => matches!(name, "alpha_a" | "lambda_opt" | "c" | "t0"),
        _ => matches!(name, "lambda_opt" | "lambda_min" | "p_opt" | "n_a" | "c" | "t0"),
    }
}

/// Default box for a parameter: positivity for moduli and stiffnesses,
/// physiological ranges for the characteristic stretches.
pub fn default_bounds(kind: ModelKind, name: &str) -> (f64, f64) {
    match (kind, name) {
        (_, "lambda_opt") => (1.0, 1.5),
        (_, "lambda_min") => (0.3, 0.9),
        (_, "omega0") => (0.0, 1.0),
        (ModelKind::Ble, "lambda_star") => (1.0 + 1e-6, f64::INFINITY),
        (_, "t0") => (0.0, f64::INFINITY),
        (ModelKind::Ble, "mu") | (ModelKind::Ble, "alpha_a") => (0.0, f64::INFINITY),
        _ => (1e-6, f64::INFINITY),
    }
}

/// Stopping controls of the optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub step_tolerance: f64,
    pub cost_tolerance: f64,
    /// Extra optimizer runs started from the previous result with fresh
    /// damping; each continues only while it lowers the cost.
    pub restarts: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 500,
            gradient_tolerance: 1e-8,
            step_tolerance: 1e-10,
            cost_tolerance: 1e-10,
            restarts: 0,
        }
    }
}

/// Datasets, start material and free parameters of one identification.
#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    /// Start values of the free parameters and values of the fixed ones.
    pub material: Material,
    pub free: Vec<FreeParam>,
    pub datasets: Vec<Dataset>,
    pub stage: Stage,
    pub options: FitOptions,
}

impl FitProblem {
    pub fn new(material: Material, free: Vec<FreeParam>, datasets: Vec<Dataset>, stage: Stage) -> Result<Self> {
        let p = FitProblem {
            material,
            free,
            datasets,
            stage,
            options: FitOptions::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.material.kind();
        if self.datasets.is_empty() {
            return Err(Error::input("no datasets"));
        }
        if self.free.is_empty() {
            return Err(Error::input("no free parameters"));
        }
        for fp in &self.free {
            let v = self
                .material
                .get(&fp.name)
                .ok_or_else(|| Error::input(format!("model {kind} has no parameter '{}'", fp.name)))?;
            if !(fp.lower <= v && v <= fp.upper) {
                return Err(Error::input(format!(
                    "start value {v} of '{}' outside [{}, {}]",
                    fp.name, fp.lower, fp.upper
                )));
            }
            let active = is_active_param(kind, &fp.name);
            match self.stage {
                Stage::Passive if active => {
                    return Err(Error::input(format!(
                        "'{}' is an active parameter; fix it in the passive stage",
                        fp.name
                    )))
                }
                Stage::Active if !active => {
                    return Err(Error::input(format!(
                        "'{}' is a passive parameter; fix it in the active stage",
                        fp.name
                    )))
                }
                _ => {}
            }
        }
        for ds in &self.datasets {
            match self.stage {
                Stage::Passive if ds.spec.state != MuscleState::Passive => {
                    return Err(Error::input("passive stage uses passive data only"))
                }
                Stage::Active
                    if ds.spec.state != MuscleState::Active || ds.spec.case != LoadCase::Utcaf =>
                {
                    return Err(Error::input("active stage uses UTCAF active data only"))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn start(&self) -> Vec<f64> {
        self.free
            .iter()
            .map(|fp| self.material.get(&fp.name).unwrap_or(f64::NAN))
            .collect()
    }

    /// Material with the free parameters set to `x`.
    pub fn material_at(&self, x: &[f64]) -> Result<Material> {
        let mut m = self.material.clone();
        for (fp, v) in self.free.iter().zip(x) {
            m.set(&fp.name, *v)?;
        }
        Ok(m)
    }

    pub fn residual_count(&self) -> usize {
        self.datasets.iter().map(|d| d.points.len()).sum()
    }
}

/// Weighted residuals `√w·(model - data)` of all datasets, concatenated.
pub fn residuals(problem: &FitProblem, x: &[f64]) -> Result<Vec<f64>> {
    let material = problem.material_at(x)?;
    material.validate()?;
    residuals_for(&problem.datasets, &material)
}

fn residuals_for(datasets: &[Dataset], material: &Material) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (di, ds) in datasets.iter().enumerate() {
        let sw = num::sqrt(ds.weight);
        for (pi, &(x, y)) in ds.points.iter().enumerate() {
            let model = ds.spec.response(material, x).map_err(|e| Error::Residual {
                dataset: di,
                index: pi,
                reason: e.to_string(),
            })?;
            if !model.is_finite() {
                return Err(Error::Residual {
                    dataset: di,
                    index: pi,
                    reason: "non-finite model response".into(),
                });
            }
            out.push(sw * (model - y));
        }
    }
    Ok(out)
}

/// Relative deviation of a model curve from reference data in three norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMeasures {
    pub inf: f64,
    pub l1: f64,
    pub l2: f64,
}

/// `ε_p = L_p(x - x*) / L_p(x*)` for `p = ∞, 1, 2`.
pub fn error_measures(model: &[f64], reference: &[f64]) -> Result<ErrorMeasures> {
    if model.len() != reference.len() {
        return Err(Error::input("model and reference lengths differ"));
    }
    let norms = |it: &mut dyn Iterator<Item = f64>| {
        let (mut inf, mut l1, mut l2) = (0.0_f64, 0.0, 0.0);
        for v in it {
            let a = num::abs(v);
            inf = inf.max(a);
            l1 += a;
            l2 += v * v;
        }
        (inf, l1, num::sqrt(l2))
    };
    let r = norms(&mut reference.iter().copied());
    if r.0 == 0.0 {
        return Err(Error::UndefinedMeasure);
    }
    let d = norms(&mut model.iter().zip(reference).map(|(a, b)| a - b));
    Ok(ErrorMeasures {
        inf: d.0 / r.0,
        l1: d.1 / r.1,
        l2: d.2 / r.2,
    })
}

/// Outcome of [`fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub material: Material,
    /// Identified free parameters in problem order.
    pub params: Vec<(String, f64)>,
    /// Unweighted `model - data` per dataset.
    pub residuals: Vec<Vec<f64>>,
    pub errors: Vec<ErrorMeasures>,
    pub iterations: usize,
    pub converged: bool,
    pub initial_cost: f64,
    pub cost: f64,
    /// Cost after every accepted iteration.
    pub cost_history: Vec<f64>,
}

fn cost_of(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

fn clamp(v: f64, lo: f64, hi: f64) -> f64 {
    v.max(lo).min(hi)
}

fn jacobian(problem: &FitProblem, x: &[f64], r: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut cols = Vec::with_capacity(x.len());
    for (j, fp) in problem.free.iter().enumerate() {
        let mut h = 1e-7 * num::abs(x[j]).max(1.0);
        if x[j] + h > fp.upper {
            h = -h;
        }
        let mut xp = x.to_vec();
        xp[j] += h;
        let rp = residuals(problem, &xp)?;
        cols.push(rp.iter().zip(r).map(|(a, b)| (a - b) / h).collect());
    }
    Ok(cols)
}

fn projected_gradient(problem: &FitProblem, x: &[f64], g: &[f64]) -> f64 {
    problem
        .free
        .iter()
        .zip(x.iter().zip(g))
        .map(|(fp, (&xi, &gi))| num::abs(xi - clamp(xi - gi, fp.lower, fp.upper)))
        .fold(0.0, f64::max)
}

struct LmRun {
    x: Vec<f64>,
    cost: f64,
    history: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn levenberg_marquardt(problem: &FitProblem, x0: Vec<f64>, budget: usize) -> Result<LmRun> {
    let opts = problem.options;
    let n = problem.free.len();
    let mut x = x0;
    let mut r = residuals(problem, &x)?;
    let mut cost = cost_of(&r);
    let mut history = vec![cost];
    let mut scale = vec![0.0_f64; n];
    let mut damping = -1.0_f64;
    let mut growth = 2.0;
    let mut converged = false;
    let mut iterations = 0;
    let mut initial_pg = None;

    'outer: while iterations < budget {
        iterations += 1;
        if cost == 0.0 {
            converged = true;
            break;
        }
        let jac = jacobian(problem, &x, &r)?;
        let mut a = DenseMatrix::zeros(n);
        let mut g = vec![0.0; n];
        for i in 0..n {
            g[i] = jac[i].iter().zip(&r).map(|(u, v)| u * v).sum();
            for k in 0..n {
                a.set(i, k, jac[i].iter().zip(&jac[k]).map(|(u, v)| u * v).sum());
            }
        }
        let pg = projected_gradient(problem, &x, &g);
        let pg0 = *initial_pg.get_or_insert(pg);
        if pg <= opts.gradient_tolerance * pg0 || pg == 0.0 {
            converged = true;
            break;
        }
        for i in 0..n {
            scale[i] = scale[i].max(a.get(i, i)).max(1e-300);
        }
        if damping < 0.0 {
            damping = 1e-3 * (0..n).map(|i| a.get(i, i)).fold(0.0, f64::max).max(1e-300);
            damping /= scale.iter().copied().fold(0.0, f64::max);
        }
        // inner loop: raise the damping until a step reduces the cost
        loop {
            let mut m = a.clone();
            for i in 0..n {
                m.add(i, i, damping * scale[i]);
            }
            let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
            let delta = match m.solve(&rhs) {
                Ok(d) => d,
                Err(_) => {
                    damping *= growth;
                    growth *= 2.0;
                    if damping > 1e300 {
                        break 'outer;
                    }
                    continue;
                }
            };
            let x_new: Vec<f64> = problem
                .free
                .iter()
                .zip(x.iter().zip(&delta))
                .map(|(fp, (xi, di))| clamp(xi + di, fp.lower, fp.upper))
                .collect();
            let step: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let step_norm = num::sqrt(step.iter().map(|v| v * v).sum());
            let x_norm = num::sqrt(x.iter().map(|v| v * v).sum());
            if step_norm <= opts.step_tolerance * (x_norm + opts.step_tolerance) {
                converged = true;
                break 'outer;
            }
            let r_new = match residuals(problem, &x_new) {
                Ok(v) => v,
                // trial point outside the valid parameter region
                Err(Error::Residual { .. } | Error::Input(_)) => {
                    damping *= growth;
                    growth *= 2.0;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let cost_new = cost_of(&r_new);
            let mut as_ = 0.0;
            for i in 0..n {
                for k in 0..n {
                    as_ += step[i] * a.get(i, k) * step[k];
                }
            }
            let predicted = -(g.iter().zip(&step).map(|(u, v)| u * v).sum::<f64>() + 0.5 * as_);
            let rho = if predicted > 0.0 {
                (cost - cost_new) / predicted
            } else {
                -1.0
            };
            if cost_new < cost && rho > 0.0 {
                let small_change = cost - cost_new <= opts.cost_tolerance * cost;
                x = x_new;
                r = r_new;
                cost = cost_new;
                history.push(cost);
                let t = 2.0 * rho - 1.0;
                damping *= (1.0_f64 / 3.0).max(1.0 - t * t * t);
                growth = 2.0;
                if small_change {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            damping *= growth;
            growth *= 2.0;
            if damping > 1e300 {
                // no descent possible at working precision
                converged = true;
                break 'outer;
            }
        }
    }

    Ok(LmRun {
        x,
        cost,
        history,
        iterations,
        converged,
    })
}

/// Projected Levenberg-Marquardt with Marquardt scaling and adaptive
/// damping. Returns the best iterate; `converged` is false when the
/// iteration budget runs out.
pub fn fit(problem: &FitProblem) -> Result<FitResult> {
    problem.validate()?;
    let budget = problem.options.max_iterations;
    let mut run = levenberg_marquardt(problem, problem.start(), budget)?;
    let initial_cost = run.history[0];
    for _ in 0..problem.options.restarts {
        if run.iterations >= budget {
            break;
        }
        let next = levenberg_marquardt(problem, run.x.clone(), budget - run.iterations)?;
        run.iterations += next.iterations;
        if next.cost >= run.cost {
            break;
        }
        run.history.extend_from_slice(&next.history[1..]);
        run.x = next.x;
        run.cost = next.cost;
        run.converged = next.converged;
    }
    let LmRun {
        x,
        cost,
        history,
        iterations,
        converged,
    } = run;

    let material = problem.material_at(&x)?;
    let mut per_dataset = Vec::with_capacity(problem.datasets.len());
    let mut errors = Vec::with_capacity(problem.datasets.len());
    for ds in &problem.datasets {
        let curve = ds.model_curve(&material)?;
        let data = ds.stresses();
        per_dataset.push(curve.iter().zip(&data).map(|(a, b)| a - b).collect());
        errors.push(error_measures(&curve, &data)?);
    }
    Ok(FitResult {
        params: problem
            .free
            .iter()
            .zip(&x)
            .map(|(fp, v)| (fp.name.clone(), *v))
            .collect(),
        material,
        residuals: per_dataset,
        errors,
        iterations,
        converged,
        initial_cost,
        cost,
        cost_history: history,
    })
}

/// Error-measure table with one row per load case and one column block
/// per model, values in percent.
pub fn error_report(rows: &[(LoadCaseSpec, Vec<(ModelKind, ErrorMeasures)>)]) -> String {
    let mut models: Vec<ModelKind> = Vec::new();
    for (_, cols) in rows {
        for (k, _) in cols {
            if !models.contains(k) {
                models.push(*k);
            }
        }
    }
    let mut out = String::new();
    let _ = write!(out, "{:<16}", "case");
    for k in &models {
        let name = k.name().to_ascii_uppercase();
        let _ = write!(out, " | {:>8} {:>8} {:>8}", format!("{name} e_inf"), "e_1", "e_2");
    }
    out.push('\n');
    for (spec, cols) in rows {
        let _ = write!(out, "{:<16}", format!("{} ({})", spec.case, spec.state));
        for k in &models {
            match cols.iter().find(|(m, _)| m == k) {
                Some((_, e)) => {
                    let _ = write!(
                        out,
                        " | {:>8.3} {:>8.3} {:>8.3}",
                        100.0 * e.inf,
                        100.0 * e.l1,
                        100.0 * e.l2
                    );
                }
                None => {
                    let _ = write!(out, " | {:>8} {:>8} {:>8}", "-", "-", "-");
                }
            }
        }
        out.push('\n');
    }
    out
}
