//! On-disk formats.
//!
//! Every artifact starts with a metadata block naming the tool, its version,
//! the command, the seed and the effective configuration. JSON files carry it
//! as a top-level `metadata` object; CSV files as leading `# key=value` lines
//! (nested configuration keys are flattened with dots). Readers skip `#`
//! lines.

use std::io::{Read, Write};

use ousample_core::design::CurvePoint;
use ousample_core::estimators::EstimateReport;
use ousample_core::{AsymptoticSummary, SampledPath};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;
use crate::montecarlo::ReplicateOutcome;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub config: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn new(command: &str, seed: Option<u64>, config: Value) -> Self {
        Metadata {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            seed,
            config,
            notes: Vec::new(),
        }
    }

    /// `# key=value` lines.
    pub fn comment_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# tool={}", self.tool),
            format!("# version={}", self.version),
            format!("# command={}", self.command),
        ];
        if let Some(seed) = self.seed {
            lines.push(format!("# seed={seed}"));
        }
        let mut flat = Vec::new();
        flatten("config", &self.config, &mut flat);
        lines.extend(flat.into_iter().map(|(k, v)| format!("# {k}={v}")));
        lines.extend(self.notes.iter().map(|n| format!("# note={n}")));
        lines
    }

    fn write_comments<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for line in self.comment_lines() {
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{prefix}.{k}"), v, out);
            }
        }
        Value::Null => {}
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// `{"metadata": ..., "<key>": value}`, pretty-printed with a trailing newline.
pub fn json_document<T: Serialize>(meta: &Metadata, key: &str, value: &T) -> Result<String, CliError> {
    let mut doc = Map::new();
    doc.insert("metadata".into(), serde_json::to_value(meta).map_err(CliError::json)?);
    doc.insert(key.into(), serde_json::to_value(value).map_err(CliError::json)?);
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).map_err(CliError::json)?;
    s.push('\n');
    Ok(s)
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Path CSV with header `t,x`.
pub fn write_path_csv<W: Write>(mut w: W, meta: &Metadata, path: &SampledPath) -> Result<(), CliError> {
    meta.write_comments(&mut w).map_err(CliError::write)?;
    let mut out = csv_writer(w);
    out.write_record(["t", "x"]).map_err(CliError::csv_write)?;
    for (t, x) in path.times().iter().zip(path.values()) {
        out.write_record([t.to_string(), x.to_string()]).map_err(CliError::csv_write)?;
    }
    out.flush().map_err(CliError::write)
}

/// Reads a `t,x` CSV. Errors name the offending line.
pub fn read_path_csv<R: Read>(r: R) -> Result<SampledPath, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r);
    let headers = reader.headers().map_err(CliError::csv_read)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ti), Some(xi)) = (col("t"), col("x")) else {
        return Err(CliError::Format("path CSV needs a header with columns t and x".into()));
    };
    let mut times = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(CliError::csv_read)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<f64, CliError> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>()
                .map_err(|_| CliError::Format(format!("line {line}: cannot parse {name} value {raw:?} as a number")))
        };
        times.push(field(ti, "t")?);
        values.push(field(xi, "x")?);
    }
    SampledPath::new(times, values).map_err(|e| CliError::Format(e.to_string()))
}

pub const ESTIMATE_HEADER: [&str; 8] = ["method", "n", "alpha_hat", "sigma2_hat", "t_n", "v_n", "g_hat", "status"];

pub fn write_estimate_csv<W: Write>(mut w: W, meta: &Metadata, r: &EstimateReport) -> Result<(), CliError> {
    meta.write_comments(&mut w).map_err(CliError::write)?;
    let mut out = csv_writer(w);
    out.write_record(ESTIMATE_HEADER).map_err(CliError::csv_write)?;
    out.write_record([
        r.method.to_string(),
        r.n.to_string(),
        num(r.alpha_hat),
        num(r.sigma2_hat),
        r.t_n.to_string(),
        r.v_n.to_string(),
        r.g_hat.to_string(),
        r.status.to_string(),
    ])
    .map_err(CliError::csv_write)?;
    out.flush().map_err(CliError::write)
}

pub const SUMMARY_HEADER: [&str; 13] = [
    "n",
    "e_tn",
    "e_vn",
    "n_var_tn",
    "n_var_vn",
    "n_cov_tv",
    "g_bias_n",
    "g_var_n",
    "alpha_bias_n",
    "alpha_var_n",
    "sigma2_bias_n",
    "sigma2_var_n",
    "conditional_mean_variance",
];

/// One-row CSV of the limit constants. The last column is the lag-zero
/// variance term the `n_var_tn` constant leaves out.
pub fn write_summary_csv<W: Write>(mut w: W, meta: &Metadata, s: &AsymptoticSummary, omitted: f64) -> Result<(), CliError> {
    meta.write_comments(&mut w).map_err(CliError::write)?;
    let mut out = csv_writer(w);
    out.write_record(SUMMARY_HEADER).map_err(CliError::csv_write)?;
    let n = s.n.map(|n| n.to_string()).unwrap_or_default();
    let row = [
        s.e_tn,
        s.e_vn,
        s.n_var_tn,
        s.n_var_vn,
        s.n_cov_tv,
        s.g_bias_n,
        s.g_var_n,
        s.alpha_bias_n,
        s.alpha_var_n,
        s.sigma2_bias_n,
        s.sigma2_var_n,
        omitted,
    ];
    let mut record = vec![n];
    record.extend(row.iter().map(|v| v.to_string()));
    out.write_record(record).map_err(CliError::csv_write)?;
    out.flush().map_err(CliError::write)
}

pub const CURVE_HEADER: [&str; 5] = ["alpha", "criterion", "beta_star", "objective", "status"];

pub fn write_curve_csv<W: Write>(mut w: W, meta: &Metadata, points: &[CurvePoint]) -> Result<(), CliError> {
    meta.write_comments(&mut w).map_err(CliError::write)?;
    let mut out = csv_writer(w);
    out.write_record(CURVE_HEADER).map_err(CliError::csv_write)?;
    for p in points {
        out.write_record([
            p.alpha.to_string(),
            p.criterion.to_string(),
            num(p.beta_star),
            num(p.objective),
            p.status.clone(),
        ])
        .map_err(CliError::csv_write)?;
    }
    out.flush().map_err(CliError::write)
}

pub const RAW_HEADER: [&str; 7] = ["replicate", "seed", "alpha_hat", "sigma2_hat", "t_n", "v_n", "status"];

/// Per-replicate estimates.
pub fn write_raw_csv<W: Write>(mut w: W, meta: &Metadata, outcomes: &[ReplicateOutcome]) -> Result<(), CliError> {
    meta.write_comments(&mut w).map_err(CliError::write)?;
    let mut out = csv_writer(w);
    out.write_record(RAW_HEADER).map_err(CliError::csv_write)?;
    for o in outcomes {
        let e = &o.estimate;
        out.write_record([
            o.replicate.to_string(),
            o.seed.to_string(),
            num(e.alpha_hat),
            num(e.sigma2_hat),
            e.t_n.to_string(),
            e.v_n.to_string(),
            e.status.to_string(),
        ])
        .map_err(CliError::csv_write)?;
    }
    out.flush().map_err(CliError::write)
}

/// File name of a design curve: `figure1_<criterion>.csv` without a minimum
/// separation, `figure2_delta<delta>_<criterion>.csv` with one.
pub fn curve_file_name(delta: f64, criterion_label: &str) -> String {
    if delta == 0.0 {
        format!("figure1_{criterion_label}.csv")
    } else {
        format!("figure2_delta{delta}_{criterion_label}.csv")
    }
}
