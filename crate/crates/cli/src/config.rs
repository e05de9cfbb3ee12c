use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use lightcone_heun::lightcone_model::{Channel, PotentialSpec, QuantumNumbers};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Cornell,
    Kratzer,
    Coulomb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Every flag, all optional so that a config file can fill the gaps.
/// Config keys are the long flag names.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    /// TOML file with `flag = value` pairs; flags given on the command line win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub potential: Option<PotentialKind>,
    /// Cornell Coulomb strength
    #[arg(long = "A", allow_negative_numbers = true)]
    #[serde(rename = "A")]
    pub a: Option<f64>,
    /// Cornell slope
    #[arg(long = "B", allow_negative_numbers = true)]
    #[serde(rename = "B")]
    pub b: Option<f64>,
    /// Kratzer inverse-square strength
    #[arg(long = "C", allow_negative_numbers = true)]
    #[serde(rename = "C")]
    pub c: Option<f64>,
    /// Kratzer Coulomb strength
    #[arg(long = "D", allow_negative_numbers = true)]
    #[serde(rename = "D")]
    pub d: Option<f64>,
    /// Coulomb vector-field charge
    #[arg(long, allow_negative_numbers = true)]
    pub z: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,

    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub ell: Option<usize>,
    /// Angular quantum number entering lambda = n_ang + ell + 1/2
    #[arg(long)]
    pub n_ang: Option<usize>,
    #[arg(long, value_enum)]
    pub channel: Option<ChannelArg>,
    /// Energy parameter; required for the Coulomb field
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Separation constant override for `angular`
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    pub r_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Angular sample count
    #[arg(long)]
    pub samples: Option<usize>,
    /// Oracle grid size
    #[arg(long)]
    pub n_grid: Option<usize>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Replaces every residual and identity threshold of `verify`
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub inject_q_sign_flip: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl Options {
    /// Fills unset flags from `--config`, if given.
    pub fn resolve(self) -> Result<Options, ConfigError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_config(&path)?;
        let mut merged = to_object(&file);
        for (k, v) in to_object(&self) {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
        let mut out: Options = serde_json::from_value(Value::Object(merged))
            .map_err(|e| ConfigError(format!("merging {}: {e}", path.display())))?;
        out.config = Some(path);
        Ok(out)
    }

    /// The resolved options without unset entries, echoed as `inputs`.
    pub fn echo(&self) -> Value {
        let mut obj = to_object(self);
        obj.retain(|_, v| !v.is_null());
        if let Some(p) = &self.config {
            obj.insert("config".into(), Value::String(p.display().to_string()));
        }
        Value::Object(obj)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let reals = [
            ("A", self.a),
            ("B", self.b),
            ("C", self.c),
            ("D", self.d),
            ("z", self.z),
            ("m", self.m),
            ("epsilon", self.epsilon),
            ("lambda", self.lambda),
            ("r-min", self.r_min),
            ("r-max", self.r_max),
            ("tol", self.tol),
        ];
        for (name, v) in reals {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(ConfigError(format!("--{name} must be finite, got {v}")));
                }
            }
        }
        if let Some(t) = self.tol {
            if t <= 0.0 {
                return Err(ConfigError(format!("--tol must be positive, got {t}")));
            }
        }
        if let Some(p) = self.points {
            if p < 2 {
                return Err(ConfigError(format!("--points must be at least 2, got {p}")));
            }
        }
        if let (Some(lo), Some(hi)) = (self.r_min, self.r_max) {
            if !(0.0 < lo && lo < hi) {
                return Err(ConfigError(format!(
                    "need 0 < r-min < r-max, got [{lo}, {hi}]"
                )));
            }
        }
        if let (Some(n), Some(n_max)) = (self.n, self.n_max) {
            if n > n_max {
                return Err(ConfigError(format!("empty level range {n}..={n_max}")));
            }
        }
        Ok(())
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec, ConfigError> {
        let need = |v: Option<f64>, name: &str, kind: &str| {
            v.ok_or_else(|| ConfigError(format!("--{name} is required for the {kind} potential")))
        };
        let spec = match self.potential {
            None => return Err(ConfigError("--potential is required".into())),
            Some(PotentialKind::Cornell) => PotentialSpec::Cornell {
                a: need(self.a, "A", "cornell")?,
                b: need(self.b, "B", "cornell")?,
            },
            Some(PotentialKind::Kratzer) => PotentialSpec::Kratzer {
                c: need(self.c, "C", "kratzer")?,
                d: need(self.d, "D", "kratzer")?,
            },
            Some(PotentialKind::Coulomb) => PotentialSpec::CoulombVector {
                z: need(self.z, "z", "coulomb")?,
            },
        };
        Ok(spec)
    }

    pub fn mass(&self) -> Result<f64, ConfigError> {
        self.m.ok_or_else(|| ConfigError("--m is required".into()))
    }

    pub fn quantum_numbers(&self, n: usize) -> QuantumNumbers {
        let mut qn = QuantumNumbers::new(n, self.ell.unwrap_or(0));
        qn.n_ang = self.n_ang.unwrap_or(0);
        qn.channel = match self.channel {
            Some(ChannelArg::Minus) => Channel::Minus,
            _ => Channel::Plus,
        };
        qn
    }

    /// Levels requested through `--n` and `--n-max`.
    pub fn levels(&self) -> std::ops::RangeInclusive<usize> {
        match (self.n, self.n_max) {
            (Some(n), Some(hi)) => n..=hi,
            (None, Some(hi)) => 0..=hi,
            (Some(n), None) => n..=n,
            (None, None) => 0..=0,
        }
    }
}

fn to_object(o: &Options) -> Map<String, Value> {
    match serde_json::to_value(o) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

fn read_config(path: &Path) -> Result<Options, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.message())))
}
