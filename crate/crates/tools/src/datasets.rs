//! Stress-stretch datasets as CSV with header `case,state,value,stress_kpa`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use muscle_core::fitting::Dataset;
use muscle_core::{LoadCase, LoadCaseSpec, MuscleState};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolError};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Row {
    case: String,
    state: String,
    value: f64,
    stress_kpa: f64,
}

/// Reads datasets, one per `(case, state)` pair in order of first
/// appearance. `source` tags every dataset.
pub fn read_datasets(reader: impl Read, source: &str) -> Result<Vec<Dataset>> {
    let context = |line: Option<u64>| match line {
        Some(l) => format!("{source}, line {l}"),
        None => source.to_owned(),
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| ToolError::Csv {
        context: context(None),
        source: e,
    })?;
    if headers != vec!["case", "state", "value", "stress_kpa"] {
        return Err(ToolError::invalid(format!(
            "{source}: header must be case,state,value,stress_kpa"
        )));
    }
    let mut groups: Vec<(LoadCaseSpec, Vec<(f64, f64)>)> = Vec::new();
    for record in rdr.deserialize::<Row>() {
        let row = record.map_err(|e| ToolError::Csv {
            context: context(e.position().map(|p| p.line())),
            source: e,
        })?;
        let case: LoadCase = row.case.parse()?;
        let state: MuscleState = row.state.parse()?;
        let spec = LoadCaseSpec::new(case, state)?;
        match groups.iter_mut().find(|(s, _)| *s == spec) {
            Some((_, pts)) => pts.push((row.value, row.stress_kpa)),
            None => groups.push((spec, vec![(row.value, row.stress_kpa)])),
        }
    }
    if groups.is_empty() {
        return Err(ToolError::invalid(format!("{source}: no data rows")));
    }
    groups
        .into_iter()
        .map(|(spec, pts)| {
            Dataset::new(spec, pts, 1.0, source).map_err(|e| {
                ToolError::invalid(format!("{source}: {} ({}): {e}", spec.case, spec.state))
            })
        })
        .collect()
}

pub fn load_datasets(path: &Path) -> Result<Vec<Dataset>> {
    let file = File::open(path).map_err(|e| ToolError::io(path, e))?;
    read_datasets(file, &path.display().to_string())
}

/// Writes datasets in the shared schema. Numbers use the shortest
/// representation that parses back to the same double.
pub fn write_datasets(writer: impl Write, datasets: &[Dataset]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e| ToolError::Csv {
        context: "dataset output".into(),
        source: e,
    };
    for ds in datasets {
        for &(value, stress) in &ds.points {
            w.serialize(Row {
                case: ds.spec.case.name().to_owned(),
                state: ds.spec.state.name().to_owned(),
                value,
                stress_kpa: stress,
            })
            .map_err(err)?;
        }
    }
    w.flush().map_err(|e| ToolError::io("dataset output", e))
}

pub fn save_datasets(path: &Path, datasets: &[Dataset]) -> Result<()> {
    let file = File::create(path).map_err(|e| ToolError::io(path, e))?;
    write_datasets(file, datasets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_by_case_and_state() {
        let text = "case,state,value,stress_kpa\n\
                    UTCAF,passive,0.9,-1\nUTCAF,passive,1.0,0\nUTCAF,passive,1.1,1.5\n\
                    UTCAF,active,0.9,20\nUTCAF,active,1.0,30\nUTCAF,active,1.1,35\n";
        let ds = read_datasets(text.as_bytes(), "t").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds[1].spec.state, MuscleState::Active);
        assert_eq!(ds[0].points[2], (1.1, 1.5));
    }

    #[test]
    fn rejects_bad_rows() {
        let bad = [
            "case,state,value\nUTCAF,passive,1\n",
            "case,state,value,stress_kpa\nSAF,active,0.1,1\nSAF,active,0.2,1\nSAF,active,0.3,1\n",
            "case,state,value,stress_kpa\nUTCAF,passive,1.0,x\n",
            "case,state,value,stress_kpa\nUTCAF,passive,1.0,1\nUTCAF,passive,0.9,1\nUTCAF,passive,1.1,1\n",
            "case,state,value,stress_kpa\n",
        ];
        for text in bad {
            assert!(read_datasets(text.as_bytes(), "t").is_err(), "{text}");
        }
    }
}
