//! CSV output of sweeps, element trajectories and activation curves.

use std::io::Write;

use muscle_core::activation::{f_active, f_t_tanh, f_xi, ActiveDrive};
use muscle_core::element::{
    solve_quasi_static, volume_change, BcProgram, HexElement, SolverOptions, Trajectory,
};
use muscle_core::loadcases::analytical_first_pk;
use muscle_core::materials::{BleParams, EhretParams};
use muscle_core::{LoadCase, LoadCaseSpec, Material};

use crate::error::{Result, ToolError};

/// Analytical and, optionally, single-element stress at one load value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub analytical: f64,
    pub element: Option<f64>,
}

/// Runs the element program of `spec` up to `value`.
pub fn element_run(material: &Material, spec: LoadCaseSpec, value: f64) -> Result<Trajectory> {
    let element = HexElement::unit_cube();
    let program = BcProgram::load_case(&element, spec.case, value, spec.state.input());
    Ok(solve_quasi_static(&element, material, &program, &SolverOptions::default())?)
}

/// Element stress in the measured component at the end of the program.
pub fn element_stress(material: &Material, spec: LoadCaseSpec, value: f64) -> Result<f64> {
    let traj = element_run(material, spec, value)?;
    let last = traj.last().ok_or_else(|| ToolError::invalid("empty trajectory"))?;
    Ok(last.first_pk[spec.case.measured()])
}

/// `element` supplies the material for the element column (it may carry a
/// different penalty than the analytical one).
pub fn sweep(
    material: &Material,
    spec: LoadCaseSpec,
    values: &[f64],
    element: Option<&Material>,
) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|&value| {
            Ok(SweepRow {
                value,
                analytical: analytical_first_pk(spec.case, material, value, &spec.state.input())?,
                element: element.map(|m| element_stress(m, spec, value)).transpose()?,
            })
        })
        .collect()
}

fn csv_err(e: csv::Error) -> ToolError {
    ToolError::Csv {
        context: "output".into(),
        source: e,
    }
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| ToolError::io("output", e))
}

/// Columns `value,p_analytical_kpa[,p_element_kpa]`.
pub fn write_sweep(out: impl Write, rows: &[SweepRow], with_element: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["value", "p_analytical_kpa"];
    if with_element {
        header.push("p_element_kpa");
    }
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.value.to_string(), r.analytical.to_string()];
        if with_element {
            rec.push(r.element.map(|v| v.to_string()).unwrap_or_default());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)
}

/// Columns `step,time,load_value,p_kpa,fiber_stretch,volume_change,iterations`.
/// `case` selects the stress component; free contraction reports `P₃₃`.
pub fn write_trajectory(out: impl Write, traj: &Trajectory, case: Option<LoadCase>) -> Result<()> {
    let component = case.map(LoadCase::measured).unwrap_or((2, 2));
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "step",
        "time",
        "load_value",
        "p_kpa",
        "fiber_stretch",
        "volume_change",
        "iterations",
    ])
    .map_err(csv_err)?;
    for (s, dv) in traj.steps.iter().zip(volume_change(traj)) {
        w.write_record([
            s.step.to_string(),
            s.time.to_string(),
            s.load_value.map(|v| v.to_string()).unwrap_or_default(),
            s.first_pk[component].to_string(),
            s.fiber_stretch.to_string(),
            dv.to_string(),
            s.iterations.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// Force-stretch curves: `lambda,f_xi,f_active,f_passive`.
pub fn write_stretch_curves(
    out: impl Write,
    values: &[f64],
    family: &EhretParams,
    ble: &BleParams,
) -> Result<()> {
    let passive = ble.passive_curve();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda", "f_xi", "f_active", "f_passive"]).map_err(csv_err)?;
    for &l in values {
        w.write_record([
            l.to_string(),
            f_xi(l, family.lambda_opt, family.lambda_min).to_string(),
            f_active(l, ble.lambda_opt).to_string(),
            passive.value(l).to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// Time functions: `time,f_t_twitch,f_t_tanh`.
pub fn write_time_curves(out: impl Write, values: &[f64], twitch: &ActiveDrive, ble: &BleParams) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "f_t_twitch", "f_t_tanh"]).map_err(csv_err)?;
    for &t in values {
        w.write_record([
            t.to_string(),
            twitch.f_t(t).to_string(),
            f_t_tanh(t, ble.c, ble.t0).to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}
