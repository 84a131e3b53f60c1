//! Parameter files: a JSON document with `model`, `params`, `units` and
//! `note`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use muscle_core::activation::{ActiveDrive, TwitchTrain, TwitchUnit};
use muscle_core::materials::{BleParams, EhretParams};
use muscle_core::{Material, ModelKind};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    model: String,
    params: BTreeMap<String, f64>,
    units: BTreeMap<String, String>,
    #[serde(default)]
    note: String,
}

/// Named parameter values of one model with their units.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamFile {
    pub model: ModelKind,
    pub params: BTreeMap<String, f64>,
    pub units: BTreeMap<String, String>,
    pub note: String,
}

const KPA: &str = "kPa";
const SECONDS: &str = "s";
const NONE: &str = "-";

const TWITCH_FIELDS: [(&str, &str); 4] = [
    ("force", "mN"),
    ("contraction_time", SECONDS),
    ("interval", SECONDS),
    ("fraction", NONE),
];

fn scalar_unit(kind: ModelKind, name: &str) -> Option<&'static str> {
    let unit = match (kind, name) {
        (ModelKind::Ble, "g1" | "g2" | "kappa" | "sigma_max" | "mu") => KPA,
        (ModelKind::Ble, "p1" | "p2" | "lambda_opt" | "lambda_star" | "alpha_a" | "c") => NONE,
        (ModelKind::Ble, "t0") => SECONDS,
        (ModelKind::Ble, _) => return None,
        (_, "gamma" | "p_opt") => KPA,
        (_, "alpha" | "beta" | "omega0" | "kappa" | "lambda_opt" | "lambda_min" | "c") => NONE,
        (_, "n_a") => "1/mm^2",
        (_, "t0") => SECONDS,
        _ => return None,
    };
    Some(unit)
}

/// `(unit index, field)` of a twitch key `unit<k>_<field>`.
fn twitch_key(name: &str) -> Option<(usize, &'static str)> {
    let rest = name.strip_prefix("unit")?;
    let (index, field) = rest.split_once('_')?;
    let index: usize = index.parse().ok().filter(|&k| k >= 1)?;
    TWITCH_FIELDS
        .iter()
        .find(|(f, _)| *f == field)
        .map(|(f, _)| (index, *f))
}

/// Expected unit of a key, `None` for unknown keys.
pub fn expected_unit(kind: ModelKind, name: &str) -> Option<&'static str> {
    if kind != ModelKind::Ble {
        if let Some((_, field)) = twitch_key(name) {
            return TWITCH_FIELDS.iter().find(|(f, _)| *f == field).map(|(_, u)| *u);
        }
    }
    scalar_unit(kind, name)
}

impl ParamFile {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let doc: Document = serde_json::from_str(text).map_err(|e| e.to_string())?;
        Self::from_document(doc)
    }

    fn from_document(doc: Document) -> std::result::Result<Self, String> {
        let model: ModelKind = doc.model.parse().map_err(|e: muscle_core::Error| e.to_string())?;
        for (name, value) in &doc.params {
            let Some(unit) = expected_unit(model, name) else {
                return Err(format!("unknown parameter '{name}' for model {model}"));
            };
            if !value.is_finite() {
                return Err(format!("parameter '{name}' is not finite"));
            }
            match doc.units.get(name) {
                None => return Err(format!("missing unit for '{name}'")),
                Some(u) if u != unit => {
                    return Err(format!("parameter '{name}' has unit '{u}', expected '{unit}'"))
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = doc.units.keys().find(|k| !doc.params.contains_key(*k)) {
            return Err(format!("unit given for unknown parameter '{extra}'"));
        }
        let file = ParamFile {
            model,
            params: doc.params,
            units: doc.units,
            note: doc.note,
        };
        file.to_material().map_err(|e| e.to_string())?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
        Self::parse(&text).map_err(|msg| ToolError::invalid(format!("{}: {msg}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let doc = Document {
            model: self.model.name().to_owned(),
            params: self.params.clone(),
            units: self.units.clone(),
            note: self.note.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("plain maps serialize");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| ToolError::io(path, e))
    }

    fn require(&self, name: &str) -> Result<f64> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| ToolError::invalid(format!("missing required parameter '{name}'")))
    }

    /// Builds and validates the material.
    pub fn to_material(&self) -> Result<Material> {
        let material = match self.model {
            ModelKind::Ble => {
                let mut p = BleParams::published();
                for name in BleParams::NAMES {
                    *p.get_mut(name).expect("listed name") = self.require(name)?;
                }
                Material::Ble(p)
            }
            kind => Material::from_ehret(kind, self.ehret_params()?)?,
        };
        material.validate()?;
        Ok(material)
    }

    fn ehret_params(&self) -> Result<EhretParams> {
        let drive = if self.params.contains_key("p_opt") {
            ActiveDrive::Tanh {
                p_opt: self.require("p_opt")?,
                c: self.require("c")?,
                t0: self.require("t0")?,
            }
        } else {
            let count = self.params.keys().filter_map(|k| twitch_key(k)).map(|(i, _)| i).max();
            let Some(count) = count else {
                return Err(ToolError::invalid("need either p_opt or twitch unit parameters"));
            };
            if self.params.contains_key("c") {
                return Err(ToolError::invalid("the twitch drive takes no tanh rate c"));
            }
            let mut units = Vec::with_capacity(count);
            for k in 1..=count {
                let field = |f: &str| self.require(&format!("unit{k}_{f}"));
                units.push(TwitchUnit {
                    force: field("force")?,
                    contraction_time: field("contraction_time")?,
                    interval: field("interval")?,
                    fraction: field("fraction")?,
                });
            }
            ActiveDrive::Twitch(TwitchTrain {
                n_a: self.require("n_a")?,
                units,
                t0: self.require("t0")?,
            })
        };
        if matches!(drive, ActiveDrive::Tanh { .. })
            && self.params.keys().any(|k| k == "n_a" || twitch_key(k).is_some())
        {
            return Err(ToolError::invalid("p_opt and twitch parameters are mutually exclusive"));
        }
        Ok(EhretParams {
            alpha: self.require("alpha")?,
            beta: self.require("beta")?,
            gamma: self.require("gamma")?,
            omega0: self.require("omega0")?,
            kappa: self.require("kappa")?,
            lambda_opt: self.require("lambda_opt")?,
            lambda_min: self.require("lambda_min")?,
            drive,
        })
    }

    /// Parameter file describing `material`.
    pub fn from_material(material: &Material, note: impl Into<String>) -> Self {
        let kind = material.kind();
        let mut params = BTreeMap::new();
        for name in material.param_names() {
            params.insert((*name).to_owned(), material.get(name).expect("listed name"));
        }
        if let Some(ActiveDrive::Twitch(train)) = material.ehret().map(|p| &p.drive) {
            for (k, u) in train.units.iter().enumerate() {
                let values = [u.force, u.contraction_time, u.interval, u.fraction];
                for ((field, _), v) in TWITCH_FIELDS.iter().zip(values) {
                    params.insert(format!("unit{}_{field}", k + 1), v);
                }
            }
        }
        let units = params
            .keys()
            .map(|k| (k.clone(), expected_unit(kind, k).expect("known key").to_owned()))
            .collect();
        ParamFile {
            model: kind,
            params,
            units,
            note: note.into(),
        }
    }
}

/// Parameters from `path`, or the published set of `kind` when absent.
pub fn material_from(kind: ModelKind, path: Option<&Path>) -> Result<Material> {
    match path {
        None => Ok(Material::published(kind)),
        Some(p) => {
            let file = ParamFile::load(p)?;
            if file.model != kind {
                return Err(ToolError::invalid(format!(
                    "{} holds {} parameters, not {kind}",
                    p.display(),
                    file.model
                )));
            }
            file.to_material()
        }
    }
}
