use std::fmt;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Scale;
use crate::tubes::{FanParams, S_MAX};

fn cfg_err(field: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        msg: msg.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Riesz,
    Fan,
    Pipeline,
    DiscreteSt,
    Examples,
    Sweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Riesz,
        ExperimentKind::Fan,
        ExperimentKind::Pipeline,
        ExperimentKind::DiscreteSt,
        ExperimentKind::Examples,
        ExperimentKind::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Riesz => "riesz",
            ExperimentKind::Fan => "fan",
            ExperimentKind::Pipeline => "pipeline",
            ExperimentKind::DiscreteSt => "discrete_st",
            ExperimentKind::Examples => "examples",
            ExperimentKind::Sweep => "sweep",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| cfg_err("kind", format!("unknown experiment kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Ap,
    Cantor,
    Random,
    Figure3,
    Planted,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Ap,
        GeneratorKind::Cantor,
        GeneratorKind::Random,
        GeneratorKind::Figure3,
        GeneratorKind::Planted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Ap => "ap",
            GeneratorKind::Cantor => "cantor",
            GeneratorKind::Random => "random",
            GeneratorKind::Figure3 => "figure3",
            GeneratorKind::Planted => "planted",
        }
    }

    /// Generators producing a set on the line.
    pub fn is_linear(self) -> bool {
        matches!(self, GeneratorKind::Ap | GeneratorKind::Cantor | GeneratorKind::Random)
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| cfg_err("generator", format!("unknown generator `{s}`")))
    }
}

/// Optional constant overrides; unset fields keep the library defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub tau: Option<f64>,
    pub c_e: Option<f64>,
    pub c_avg: Option<f64>,
    pub c_fan: Option<f64>,
    pub c_near: Option<f64>,
    pub c_rich: Option<f64>,
    pub c_heavy: Option<f64>,
    pub c_bad: Option<f64>,
    pub c_st: Option<f64>,
}

impl Overrides {

    fn slot(&mut self, key: &str) -> Option<&mut Option<f64>> {
        Some(match key {
            "tau" => &mut self.tau,
            "c_e" => &mut self.c_e,
            "c_avg" => &mut self.c_avg,
            "c_fan" => &mut self.c_fan,
            "c_near" => &mut self.c_near,
            "c_rich" => &mut self.c_rich,
            "c_heavy" => &mut self.c_heavy,
            "c_bad" => &mut self.c_bad,
            "c_st" => &mut self.c_st,
            _ => return None,
        })
    }

    fn entries(&self) -> [(&'static str, Option<f64>); 9] {
        [
            ("tau", self.tau),
            ("c_e", self.c_e),
            ("c_avg", self.c_avg),
            ("c_fan", self.c_fan),
            ("c_near", self.c_near),
            ("c_rich", self.c_rich),
            ("c_heavy", self.c_heavy),
            ("c_bad", self.c_bad),
            ("c_st", self.c_st),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub m_values: Vec<u32>,
    pub s: f64,
    pub sigma: f64,
    pub generator: GeneratorKind,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub overrides: Overrides,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, m_values: Vec<u32>, s: f64, sigma: f64, generator: GeneratorKind) -> Self {
        Self {
            kind,
            m_values,
            s,
            sigma,
            generator,
            seed: 0,
            out_dir: PathBuf::from("out"),
            overrides: Overrides::default(),
        }
    }

    pub fn fan_params(&self) -> FanParams {
        let mut p = FanParams::new(self.s, self.sigma);
        let o = &self.overrides;
        p.tau = o.tau.unwrap_or(p.tau);
        p.c_e = o.c_e.unwrap_or(p.c_e);
        p.c_avg = o.c_avg.unwrap_or(p.c_avg);
        p.c_fan = o.c_fan.unwrap_or(p.c_fan);
        p.c_near = o.c_near.unwrap_or(p.c_near);
        p.c_rich = o.c_rich.unwrap_or(p.c_rich);
        p.c_heavy = o.c_heavy.unwrap_or(p.c_heavy);
        p.c_bad = o.c_bad.unwrap_or(p.c_bad);
        p
    }

    pub fn c_st(&self) -> f64 {
        self.overrides.c_st.unwrap_or(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_values.is_empty() {
            return Err(cfg_err("m_values", "at least one scale is required"));
        }
        for &m in &self.m_values {
            Scale::new(m).map_err(|e| cfg_err("m_values", e.to_string()))?;
        }
        if self.m_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(cfg_err("m_values", "scales must be strictly ascending"));
        }
        let s = self.s;
        let ok = match self.kind {
            ExperimentKind::Fan | ExperimentKind::Pipeline => s >= 0.5 && s < S_MAX,
            ExperimentKind::DiscreteSt | ExperimentKind::Examples => s > 0.5 && s < 1.0,
            ExperimentKind::Riesz | ExperimentKind::Sweep => s > 0.0 && s <= 1.0,
        };
        if !ok {
            let range = match self.kind {
                ExperimentKind::Fan | ExperimentKind::Pipeline => "[1/2, 2 - sqrt 2)",
                ExperimentKind::DiscreteSt | ExperimentKind::Examples => "(1/2, 1)",
                _ => "(0, 1]",
            };
            return Err(cfg_err("s", format!("{s} outside {range} for kind {}", self.kind)));
        }
        let linear_only = matches!(
            self.kind,
            ExperimentKind::Riesz | ExperimentKind::Pipeline | ExperimentKind::Sweep
        );
        if linear_only && !self.generator.is_linear() {
            return Err(cfg_err(
                "generator",
                format!("kind {} needs a set on the line (ap, cantor or random), got {}", self.kind, self.generator),
            ));
        }
        if matches!(self.kind, ExperimentKind::Fan | ExperimentKind::Pipeline) {
            self.fan_params().validate().map_err(|e| match e {
                Error::InvalidParameter { name, reason } => cfg_err(name, reason),
                other => other,
            })?;
        }
        if self.overrides.c_st.is_some_and(|c| !(c > 0.0)) {
            return Err(cfg_err("c_st", "must be positive"));
        }
        if self.out_dir.as_os_str().is_empty() {
            return Err(cfg_err("out_dir", "must not be empty"));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "kind={}", self.kind).unwrap();
        let ms: Vec<String> = self.m_values.iter().map(u32::to_string).collect();
        writeln!(out, "m_values={}", ms.join(",")).unwrap();
        writeln!(out, "s={}", self.s).unwrap();
        writeln!(out, "sigma={}", self.sigma).unwrap();
        writeln!(out, "generator={}", self.generator).unwrap();
        writeln!(out, "seed={}", self.seed).unwrap();
        writeln!(out, "out_dir={}", self.out_dir.display()).unwrap();
        for (k, v) in self.overrides.entries() {
            if let Some(v) = v {
                writeln!(out, "{k}={v}").unwrap();
            }
        }
        out
    }

    /// Parses the flat `key=value` form; `#` starts a comment line. The
    /// result is not validated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut m_values = None;
        let mut s = None;
        let mut sigma = None;
        let mut generator = None;
        let mut seed = None;
        let mut out_dir = None;
        let mut overrides = Overrides::default();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| cfg_err(line, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|e| cfg_err(key, format!("`{v}`: {e}")));
            match key {
                "kind" => kind = Some(value.parse()?),
                "m_values" => {
                    m_values = Some(
                        value
                            .split(',')
                            .map(|t| t.trim().parse::<u32>().map_err(|e| cfg_err(key, format!("`{t}`: {e}"))))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "s" => s = Some(num(value)?),
                "sigma" => sigma = Some(num(value)?),
                "generator" => generator = Some(value.parse()?),
                "seed" => seed = Some(value.parse::<u64>().map_err(|e| cfg_err(key, e.to_string()))?),
                "out_dir" => out_dir = Some(PathBuf::from(value)),
                other => match overrides.slot(other) {
                    Some(slot) => *slot = Some(num(value)?),
                    None => return Err(cfg_err(other, "unknown field")),
                },
            }
        }
        let need = |f: &str| cfg_err(f, "missing");
        Ok(Self {
            kind: kind.ok_or_else(|| need("kind"))?,
            m_values: m_values.ok_or_else(|| need("m_values"))?,
            s: s.ok_or_else(|| need("s"))?,
            sigma: sigma.unwrap_or(0.5 * s.unwrap_or(1.0)),
            generator: generator.ok_or_else(|| need("generator"))?,
            seed: seed.unwrap_or(0),
            out_dir: out_dir.unwrap_or_else(|| PathBuf::from("out")),
            overrides,
        })
    }
}
