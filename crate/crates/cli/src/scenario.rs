//! Scenario files: a parameter block, a design and the list of
//! non-response rates to tabulate.

use anyhow::{bail, Context, Result};
use nonresp_core::{ClassShape, Design, PopulationParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(rename = "N")]
    pub size: usize,
    #[serde(rename = "Ybar")]
    pub y_mean: f64,
    #[serde(rename = "Xbar")]
    pub x_mean: f64,
    #[serde(rename = "S_Y", default, skip_serializing_if = "Option::is_none")]
    pub s_y: Option<f64>,
    #[serde(rename = "S2_Y", default, skip_serializing_if = "Option::is_none")]
    pub s2_y: Option<f64>,
    #[serde(rename = "C_Y", default, skip_serializing_if = "Option::is_none")]
    pub cv_y: Option<f64>,
    #[serde(rename = "S_X", default, skip_serializing_if = "Option::is_none")]
    pub s_x: Option<f64>,
    #[serde(rename = "S2_X", default, skip_serializing_if = "Option::is_none")]
    pub s2_x: Option<f64>,
    #[serde(rename = "C_X", default, skip_serializing_if = "Option::is_none")]
    pub cv_x: Option<f64>,
    pub rho: f64,
    /// Non-response group standard deviation of y.
    #[serde(rename = "S_Y2", default, skip_serializing_if = "Option::is_none")]
    pub s_y2: Option<f64>,
    #[serde(rename = "S2_Y2", default, skip_serializing_if = "Option::is_none")]
    pub s2_y2: Option<f64>,
    /// Non-response group mean square as a fraction of `S2_Y`.
    #[serde(rename = "S2_Y2_ratio", default, skip_serializing_if = "Option::is_none")]
    pub s2_y2_ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_prime: Option<usize>,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub eta: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub params: ParamsSpec,
    pub design: DesignSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_shape: Option<ShapeSpec>,
    #[serde(rename = "W2_values")]
    pub w2_values: Vec<f64>,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: ParamsSpec,
    pub design: Design,
    pub class_shape: ClassShape,
    pub w2_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Table1,
    Table2,
    Table3,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Table1 => "table1",
            Preset::Table2 => "table2",
            Preset::Table3 => "table3",
        }
    }

    fn source(self) -> &'static str {
        match self {
            Preset::Table1 => include_str!("../presets/table1.json"),
            Preset::Table2 => include_str!("../presets/table2.json"),
            Preset::Table3 => include_str!("../presets/table3.json"),
        }
    }

    pub fn scenario(self) -> Scenario {
        Scenario::from_json(self.name(), self.source()).expect("built-in preset is valid")
    }
}

impl std::str::FromStr for Preset {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Preset::Table1),
            "table2" => Ok(Preset::Table2),
            "table3" => Ok(Preset::Table3),
            other => bail!("unknown preset `{other}` (expected table1, table2 or table3)"),
        }
    }
}

fn exactly_one(field: &str, options: &[(&str, Option<f64>)]) -> Result<(usize, f64)> {
    let given: Vec<_> = options
        .iter()
        .enumerate()
        .filter_map(|(i, (_, v))| v.map(|v| (i, v)))
        .collect();
    match given.as_slice() {
        [one] => Ok(*one),
        _ => {
            let names: Vec<_> = options.iter().map(|(n, _)| *n).collect();
            bail!(
                "params: exactly one of {} must be given for {field}",
                names.join(", ")
            )
        }
    }
}

impl ParamsSpec {
    /// Resolves the block into population parameters at non-response rate `w2`.
    pub fn resolve(&self, w2: f64) -> Result<PopulationParams> {
        if self.x_mean == 0.0 {
            bail!("params: Xbar must be non-zero");
        }
        let (which, v) = exactly_one("the study variable", &[
            ("S_Y", self.s_y),
            ("S2_Y", self.s2_y),
            ("C_Y", self.cv_y),
        ])?;
        let s2_y = match which {
            0 => v * v,
            1 => v,
            _ => (v * self.y_mean).powi(2),
        };
        let (which, v) = exactly_one("the auxiliary variable", &[
            ("S_X", self.s_x),
            ("S2_X", self.s2_x),
            ("C_X", self.cv_x),
        ])?;
        let s2_x = match which {
            0 => v * v,
            1 => v,
            _ => (v * self.x_mean).powi(2),
        };
        let (which, v) = exactly_one("the non-response group", &[
            ("S_Y2", self.s_y2),
            ("S2_Y2", self.s2_y2),
            ("S2_Y2_ratio", self.s2_y2_ratio),
        ])?;
        let s2_y2 = match which {
            0 => v * v,
            1 => v,
            _ => v * s2_y,
        };
        let mut p = PopulationParams::from_mean_squares(
            self.size,
            self.y_mean,
            self.x_mean,
            s2_y,
            s2_x,
            self.rho,
            w2,
            s2_y2,
        )
        .context("params")?;
        // keep the coefficients of variation exactly as given
        if let Some(cy) = self.cv_y {
            p.cv_y = cy;
        }
        if let Some(cx) = self.cv_x {
            p.cv_x = cx;
        }
        Ok(p)
    }
}

impl Scenario {
    pub fn from_json(name: &str, text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).with_context(|| format!("parsing scenario {name}"))?;
        Self::from_file(name, file)
    }

    pub fn from_file(name: &str, file: ScenarioFile) -> Result<Self> {
        let d = file.design;
        let design = match d.n_prime {
            None => Design::single(d.n, d.k),
            Some(np) => Design::two_phase(np, d.n, d.k),
        };
        design
            .validate(file.params.size)
            .context("design")?;
        if file.w2_values.is_empty() {
            bail!("W2_values: at least one value required");
        }
        if let Some(w) = file.w2_values.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            bail!("W2_values: {w} is outside [0, 1]");
        }
        let class_shape = match file.class_shape {
            None => ClassShape::default(),
            Some(s) => {
                if s.eta == 0.0 {
                    bail!("class_shape: eta must be non-zero");
                }
                ClassShape {
                    eta: s.eta,
                    lambda: s.lambda,
                }
            }
        };
        let scenario = Self {
            name: name.to_string(),
            params: file.params,
            design,
            class_shape,
            w2_values: file.w2_values,
        };
        for &w2 in &scenario.w2_values {
            scenario.params.resolve(w2)?;
        }
        Ok(scenario)
    }

    pub fn with_w2_values(mut self, w2_values: Vec<f64>) -> Result<Self> {
        if let Some(w) = w2_values.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            bail!("--W2: {w} is outside [0, 1]");
        }
        if !w2_values.is_empty() {
            self.w2_values = w2_values;
        }
        Ok(self)
    }

    pub fn with_k(mut self, k: f64) -> Result<Self> {
        self.design.k = k;
        self.design
            .validate(self.params.size)
            .context("--k")?;
        Ok(self)
    }
}
