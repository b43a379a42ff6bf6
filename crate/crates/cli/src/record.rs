use crate::config::{usage, ExperimentConfig};
use asymconv::envelope::{GridFunction1D, GridFunction2D};
use asymconv::moduli::ModulusCurve;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum CurveData {
    Modulus(ModulusCurve),
    Table { columns: Vec<String>, rows: Vec<Vec<f64>> },
    Grid1d(GridFunction1D),
    Grid2d(GridFunction2D),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCurve {
    pub name: String,
    #[serde(flatten)]
    pub data: CurveData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

/// What a command produces before it is wrapped into a record.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub results: serde_json::Value,
    pub curves: Vec<NamedCurve>,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub id: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub results: serde_json::Value,
    pub curves: Vec<NamedCurve>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
    pub wall_clock_seconds: f64,
}

impl ExperimentRecord {
    pub fn new(config: ExperimentConfig, outcome: Outcome, wall_clock_seconds: f64) -> Self {
        let passed = outcome.assertions.iter().all(|a| a.pass);
        ExperimentRecord {
            id: config.hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            results: outcome.results,
            curves: outcome.curves,
            assertions: outcome.assertions,
            passed,
            wall_clock_seconds,
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn run_dir(out: &Path, id: &str) -> PathBuf {
    out.join("runs").join(id)
}

/// Writes curve CSVs, then the record. An existing `record.json` is never
/// replaced; later runs of the same config go to `record-<n>.json`.
pub fn persist(out: &Path, record: &ExperimentRecord) -> anyhow::Result<PathBuf> {
    let dir = run_dir(out, &record.id);
    let curves = dir.join("curves");
    fs::create_dir_all(&curves)?;
    for c in &record.curves {
        write_atomic(&curves.join(format!("{}.csv", c.name)), &curve_csv(&c.data, false)?)?;
    }
    let mut path = dir.join("record.json");
    let mut n = 2;
    while path.exists() {
        path = dir.join(format!("record-{n}.json"));
        n += 1;
    }
    write_atomic(&path, &serde_json::to_vec_pretty(record)?)?;
    Ok(path)
}

pub fn curve_csv(data: &CurveData, log_columns: bool) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    match data {
        CurveData::Modulus(c) => c.write_csv(&mut buf, log_columns)?,
        CurveData::Grid1d(g) => g.write_csv(&mut buf)?,
        CurveData::Grid2d(g) => g.write_csv(&mut buf)?,
        CurveData::Table { columns, rows } => {
            buf.extend(columns.join(",").bytes());
            buf.push(b'\n');
            for r in rows {
                let line: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                buf.extend(line.join(",").bytes());
                buf.push(b'\n');
            }
        }
    }
    Ok(buf)
}

/// Finds a record by id (under `out/runs`), directory or file path.
pub fn load(out: &Path, reference: &str) -> anyhow::Result<(ExperimentRecord, PathBuf)> {
    let candidates = [
        PathBuf::from(reference),
        PathBuf::from(reference).join("record.json"),
        run_dir(out, reference).join("record.json"),
    ];
    for c in candidates {
        if c.is_file() {
            let record: ExperimentRecord = serde_json::from_slice(&fs::read(&c)?)?;
            let dir = c.parent().map(Path::to_path_buf).unwrap_or_default();
            return Ok((record, dir));
        }
    }
    usage(format!("unknown record '{reference}'"))
}

/// One file per curve; modulus curves get `log_t,log_value` columns in CSV.
pub fn export(record: &ExperimentRecord, dest: &Path, json: bool) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dest)?;
    let mut written = Vec::new();
    for c in &record.curves {
        let path = if json {
            let p = dest.join(format!("{}.json", c.name));
            write_atomic(&p, &serde_json::to_vec_pretty(c)?)?;
            p
        } else {
            let p = dest.join(format!("{}.csv", c.name));
            write_atomic(&p, &curve_csv(&c.data, true)?)?;
            if let CurveData::Modulus(m) = &c.data {
                let side = dest.join(format!("{}.meta.json", c.name));
                write_atomic(&side, &serde_json::to_vec_pretty(&m.sidecar_json())?)?;
            }
            p
        };
        written.push(path);
    }
    Ok(written)
}
