//! Run configuration: an optional JSON file merged with command-line flags.
//!
//! Every field is optional at this level. Flags win over the file. Commands
//! resolve the fields they need and report missing or invalid values by
//! their dotted field name (`law.beta`, `process.alpha`, ...).

use std::path::{Path, PathBuf};

use ousample_core::design::Family;
use ousample_core::estimators::Method;
use ousample_core::optimize::log_space;
use ousample_core::{ProcessParams, SpacingLaw};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

/// A drift grid: `"lo:hi:count"` (log-spaced) or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Spec(String),
    List(Vec<f64>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "is_default")]
    pub process: ProcessSection,
    #[serde(default, skip_serializing_if = "is_default")]
    pub law: LawSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_bounds: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw: Option<PathBuf>,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// Field-wise merge; values present in `over` win.
    pub fn merge(self, over: RunConfig) -> RunConfig {
        RunConfig {
            process: ProcessSection {
                alpha: over.process.alpha.or(self.process.alpha),
                sigma2: over.process.sigma2.or(self.process.sigma2),
            },
            law: LawSection {
                kind: over.law.kind.or(self.law.kind),
                beta: over.law.beta.or(self.law.beta),
                delta: over.law.delta.or(self.law.delta),
            },
            n: over.n.or(self.n),
            replicates: over.replicates.or(self.replicates),
            seed: over.seed.or(self.seed),
            method: over.method.or(self.method),
            preset: over.preset.or(self.preset),
            criterion: over.criterion.or(self.criterion),
            alpha_grid: over.alpha_grid.or(self.alpha_grid),
            alpha_lo: over.alpha_lo.or(self.alpha_lo),
            alpha_hi: over.alpha_hi.or(self.alpha_hi),
            grid_size: over.grid_size.or(self.grid_size),
            beta_bounds: over.beta_bounds.or(self.beta_bounds),
            input: over.input.or(self.input),
            out: over.out.or(self.out),
            out_dir: over.out_dir.or(self.out_dir),
            raw: over.raw.or(self.raw),
        }
    }

    /// The configuration as echoed into output metadata.
    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn params(&self) -> Result<ProcessParams, CliError> {
        let alpha = positive("process.alpha", required("process.alpha", "--alpha", self.process.alpha)?)?;
        let sigma2 = positive("process.sigma2", required("process.sigma2", "--sigma2", self.process.sigma2)?)?;
        Ok(ProcessParams { alpha, sigma2 })
    }

    pub fn law(&self) -> Result<SpacingLaw, CliError> {
        let kind = required("law.kind", "--law", self.law.kind.clone())?;
        let beta = || positive("law.beta", required("law.beta", "--beta", self.law.beta)?);
        let delta = |allow_zero: bool| -> Result<f64, CliError> {
            let d = required("law.delta", "--delta", self.law.delta)?;
            if allow_zero { non_negative("law.delta", d) } else { positive("law.delta", d) }
        };
        Ok(match normalize(&kind).as_str() {
            "uniform" => SpacingLaw::Uniform { delta: delta(false)? },
            "exponential" => SpacingLaw::Exponential { beta: beta()? },
            "truncated" | "shifted_exponential" | "truncated_exponential" => SpacingLaw::ShiftedExponential {
                delta: delta(true)?,
                beta: beta()?,
            },
            _ => {
                return Err(CliError::Usage(format!(
                    "law.kind must be one of uniform, exponential, truncated (got {kind:?})"
                )))
            }
        })
    }

    /// Law if enough is given to build one, `None` if `law.kind` is absent.
    pub fn law_opt(&self) -> Result<Option<SpacingLaw>, CliError> {
        match self.law.kind {
            None => Ok(None),
            Some(_) => self.law().map(Some),
        }
    }

    /// Spacing family for design: exponential, or truncated with `law.delta`.
    pub fn family(&self) -> Result<Family, CliError> {
        let kind = required("law.kind", "--law", self.law.kind.clone())?;
        match normalize(&kind).as_str() {
            "exponential" => Ok(Family::Exponential),
            "truncated" | "shifted_exponential" | "truncated_exponential" => {
                let d = non_negative("law.delta", required("law.delta", "--delta", self.law.delta)?)?;
                Ok(if d == 0.0 { Family::Exponential } else { Family::ShiftedExponential { delta: d } })
            }
            _ => Err(CliError::Usage(format!(
                "law.kind must be exponential or truncated for design (got {kind:?})"
            ))),
        }
    }

    pub fn method(&self) -> Result<Method, CliError> {
        match self.method.as_deref().map(normalize).as_deref() {
            None | Some("moment") => Ok(Method::Moment),
            Some("mle_uniform") => Ok(Method::MleUniform),
            Some("mle_numeric") => Ok(Method::MleNumeric),
            Some(other) => Err(CliError::Usage(format!(
                "method must be one of moment, mle-uniform, mle-numeric (got {other:?})"
            ))),
        }
    }

    pub fn n(&self) -> Result<usize, CliError> {
        let n = required("n", "--n", self.n)?;
        if n < 2 {
            return Err(CliError::Usage(format!("n must be >= 2 (got {n})")));
        }
        Ok(n)
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        required("seed", "--seed", self.seed)
    }

    pub fn beta_bounds(&self) -> Result<(f64, f64), CliError> {
        let [lo, hi] = self.beta_bounds.unwrap_or([
            ousample_core::design::DEFAULT_BETA_BOUNDS.0,
            ousample_core::design::DEFAULT_BETA_BOUNDS.1,
        ]);
        positive("beta_bounds[0]", lo)?;
        if !(hi.is_finite() && hi > lo) {
            return Err(CliError::Usage(format!(
                "beta_bounds[1] must be finite and greater than beta_bounds[0] (got [{lo}, {hi}])"
            )));
        }
        Ok((lo, hi))
    }

    pub fn alpha_grid(&self) -> Result<Vec<f64>, CliError> {
        match self.alpha_grid.as_ref() {
            None => Err(CliError::Usage("alpha_grid is required (--alpha-grid lo:hi:count)".into())),
            Some(GridSpec::List(v)) => {
                if v.is_empty() {
                    return Err(CliError::Usage("alpha_grid must be non-empty".into()));
                }
                for &a in v {
                    positive("alpha_grid", a)?;
                }
                if v.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(CliError::Usage("alpha_grid must be increasing".into()));
                }
                Ok(v.clone())
            }
            Some(GridSpec::Spec(s)) => parse_grid(s),
        }
    }
}

/// Parses `lo:hi:count` into `count` log-spaced points.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("alpha_grid must look like lo:hi:count with 0 < lo < hi (got {spec:?})"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi.is_finite() && count >= 1 && (lo < hi || (count == 1 && lo == hi))) {
        return Err(bad());
    }
    Ok(log_space(lo, hi, count))
}

fn normalize(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace('-', "_")
}

fn required<T>(field: &str, flag: &str, v: Option<T>) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{field} is required (flag {flag} or config field {field})")))
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{field} must be finite and > 0 (got {v})")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{field} must be finite and >= 0 (got {v})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: RunConfig =
            serde_json::from_str(r#"{"process": {"alpha": 2, "sigma2": 3}, "law": {"kind": "exponential", "beta": 4}, "n": 10}"#)
                .unwrap();
        let flags = RunConfig {
            process: ProcessSection {
                alpha: Some(5.0),
                sigma2: None,
            },
            n: Some(20),
            ..Default::default()
        };
        let merged = file.merge(flags);
        assert_eq!(merged.params().unwrap(), ProcessParams { alpha: 5.0, sigma2: 3.0 });
        assert_eq!(merged.n().unwrap(), 20);
        assert_eq!(merged.law().unwrap(), SpacingLaw::Exponential { beta: 4.0 });
    }

    #[test]
    fn errors_name_fields() {
        let c = RunConfig {
            law: LawSection {
                kind: Some("exponential".into()),
                beta: Some(0.0),
                delta: None,
            },
            ..Default::default()
        };
        assert!(c.law().unwrap_err().to_string().contains("law.beta must be finite and > 0"));
        assert!(c.params().unwrap_err().to_string().contains("process.alpha is required"));
        let c = RunConfig {
            n: Some(1),
            ..Default::default()
        };
        assert!(c.n().unwrap_err().to_string().contains("n must be >= 2"));
        let err = serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn law_kinds() {
        let mk = |kind: &str| RunConfig {
            law: LawSection {
                kind: Some(kind.into()),
                beta: Some(2.0),
                delta: Some(0.5),
            },
            ..Default::default()
        };
        assert_eq!(mk("uniform").law().unwrap(), SpacingLaw::Uniform { delta: 0.5 });
        assert_eq!(
            mk("truncated").law().unwrap(),
            SpacingLaw::ShiftedExponential { delta: 0.5, beta: 2.0 }
        );
        assert_eq!(mk("shifted-exponential").family().unwrap(), Family::ShiftedExponential { delta: 0.5 });
        assert!(mk("poisson").law().is_err());
        assert!(mk("uniform").family().is_err());
    }

    #[test]
    fn grids() {
        let g = parse_grid("0.05:2:50").unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[49], 2.0);
        assert_eq!(parse_grid("1:1:1").unwrap(), vec![1.0]);
        assert!(parse_grid("2:1:5").is_err());
        assert!(parse_grid("0:1:5").is_err());
        assert!(parse_grid("1:2").is_err());
        let c: RunConfig = serde_json::from_str(r#"{"alpha_grid": [0.5, 1.0]}"#).unwrap();
        assert_eq!(c.alpha_grid().unwrap(), vec![0.5, 1.0]);
    }

    #[test]
    fn default_beta_bounds() {
        assert_eq!(RunConfig::default().beta_bounds().unwrap(), (1e-2, 1e3));
        let c = RunConfig {
            beta_bounds: Some([2.0, 1.0]),
            ..Default::default()
        };
        assert!(c.beta_bounds().is_err());
    }
}
