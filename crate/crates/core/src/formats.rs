//! Line-oriented CSV and structured JSON forms of every field type.
//!
//! CSV files carry one row per on-support site, `t,n,value` for scalar
//! fields (`t,n,plus,minus` for wave fields). JSON files hold dense slices,
//! `{"schema_version": 1, "horizon": T, "slices": [[...], ...]}`, except
//! schedules, which list `{"t", "n", "value"}` entries with `null` marking
//! undefined sites. Readers reject rows that break parity or leave the
//! light cone, naming the offending row.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    from_storage_index, to_storage_index, CoinSchedule, ComplexWaveField, FluxField, JumpSchedule,
    Lattice, ProbabilitySequence, WaveField,
};
use crate::scalar::{tol, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse {
                location: "format".into(),
                message: format!("unknown format '{other}', expected csv or json"),
            }),
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| "null".into())
}

fn parse_err(location: impl Into<String>, message: impl ToString) -> Error {
    Error::Parse { location: location.into(), message: message.to_string() }
}

fn json_err(e: serde_json::Error) -> Error {
    parse_err(format!("line {}, column {}", e.line(), e.column()), e)
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn check_schema(version: Option<u32>) -> Result<()> {
    match version {
        None | Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(parse_err("schema_version", format!("unsupported schema version {v}"))),
    }
}

#[derive(Serialize, Deserialize)]
struct SlicesDoc {
    #[serde(default)]
    schema_version: Option<u32>,
    horizon: usize,
    slices: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct WaveDoc {
    #[serde(default)]
    schema_version: Option<u32>,
    horizon: usize,
    plus: Vec<Vec<f64>>,
    minus: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ComplexWaveDoc {
    #[serde(default)]
    schema_version: Option<u32>,
    horizon: usize,
    /// `[re, im]` pairs.
    plus: Vec<Vec<[f64; 2]>>,
    minus: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleDoc {
    #[serde(default)]
    schema_version: Option<u32>,
    horizon: usize,
    kind: String,
    entries: Vec<ScheduleEntry>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleEntry {
    t: i64,
    n: i64,
    value: Option<f64>,
}

fn to_f64_slices<T: Scalar>(lattice: &Lattice<T>) -> Vec<Vec<f64>> {
    lattice.slices().iter().map(|s| s.iter().map(|v| v.as_f64()).collect()).collect()
}

fn from_f64_slices<T: Scalar>(slices: Vec<Vec<f64>>) -> Vec<Vec<T>> {
    slices.into_iter().map(|s| s.into_iter().map(T::lit).collect()).collect()
}

fn check_slices_shape<V>(slices: &[Vec<V>], expected_count: usize, what: &str) -> Result<()> {
    if slices.len() != expected_count {
        return Err(parse_err(
            "horizon",
            format!("{what} declares {} slices but holds {}", expected_count, slices.len()),
        ));
    }
    for (t, s) in slices.iter().enumerate() {
        if s.len() != t + 1 {
            return Err(parse_err(
                format!("slice t={t}"),
                format!("expected {} entries, found {}", t + 1, s.len()),
            ));
        }
    }
    Ok(())
}

/// A row of a `t,n,...` CSV file after index validation.
struct Row {
    t: usize,
    k: usize,
    fields: Vec<String>,
}

fn read_rows(text: &str, header: &[&str]) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let found: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err("header", e))?
        .iter()
        .map(str::to_string)
        .collect();
    if found != header {
        return Err(parse_err("header", format!("expected '{}', found '{}'", header.join(","), found.join(","))));
    }
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err("csv", e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let location = format!("row {line}");
        let t: i64 = record[0].parse().map_err(|e| parse_err(&location, format!("bad t: {e}")))?;
        let n: i64 = record[1].parse().map_err(|e| parse_err(&location, format!("bad n: {e}")))?;
        let k = to_storage_index(n, t).map_err(|e| parse_err(&location, e))?;
        if !seen.insert((t, n)) {
            return Err(parse_err(&location, format!("duplicate site (n={n}, t={t})")));
        }
        rows.push(Row { t: t as usize, k, fields: record.iter().skip(2).map(str::to_string).collect() });
    }
    Ok(rows)
}

fn parse_value(field: &str, t: usize, k: usize) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|e| parse_err(format!("site (n={}, t={t})", from_storage_index(k, t)), e))
}

fn assemble<V: Clone>(rows: &[Row], count: usize, fill: V, mut value: impl FnMut(&Row) -> Result<V>) -> Result<Lattice<V>> {
    let mut slices: Vec<Vec<V>> = (0..count).map(|t| vec![fill.clone(); t + 1]).collect();
    for row in rows {
        if row.t >= count {
            continue;
        }
        slices[row.t][row.k] = value(row)?;
    }
    Lattice::from_slices(slices)
}

fn max_t(rows: &[Row]) -> Option<usize> {
    rows.iter().map(|r| r.t).max()
}

// ---------------------------------------------------------------- sequences

pub fn write_probability<T: Scalar, W: Write>(rho: &ProbabilitySequence<T>, format: Format, out: W) -> Result<()> {
    write_scalar_lattice(rho.lattice(), rho.horizon(), format, out)
}

fn write_scalar_lattice<T: Scalar, W: Write>(
    lattice: &Lattice<T>,
    horizon: usize,
    format: Format,
    mut out: W,
) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "t,n,value")?;
            for (t, n, v) in lattice.iter() {
                writeln!(out, "{t},{n},{}", fmt_num(v.as_f64()))?;
            }
        }
        Format::Json => {
            let doc = SlicesDoc {
                schema_version: Some(SCHEMA_VERSION),
                horizon,
                slices: to_f64_slices(lattice),
            };
            serde_json::to_writer(&mut out, &doc).map_err(json_err)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Parses a probability sequence in either format, accepting slices
/// normalized within `1e-9` and rescaling them to unit mass.
pub fn parse_probability<T: Scalar>(text: &str) -> Result<ProbabilitySequence<T>> {
    let slices: Vec<Vec<T>> = if looks_like_json(text) {
        let doc: SlicesDoc = serde_json::from_str(text).map_err(json_err)?;
        check_schema(doc.schema_version)?;
        check_slices_shape(&doc.slices, doc.horizon + 1, "sequence")?;
        from_f64_slices(doc.slices)
    } else {
        let rows = read_rows(text, &["t", "n", "value"])?;
        let count = max_t(&rows).map(|t| t + 1).ok_or_else(|| parse_err("csv", "no data rows"))?;
        assemble(&rows, count, T::zero(), |r| Ok(T::lit(parse_value(&r.fields[0], r.t, r.k)?)))?
            .into_slices()
    };
    ProbabilitySequence::renormalized(slices, T::tol(tol::INGEST))
}

pub fn read_probability<T: Scalar>(path: impl AsRef<Path>) -> Result<ProbabilitySequence<T>> {
    parse_probability(&fs::read_to_string(path)?)
}

// ---------------------------------------------------------------- flux

pub fn write_flux<T: Scalar, W: Write>(flux: &FluxField<T>, format: Format, out: W) -> Result<()> {
    write_scalar_lattice(flux.lattice(), flux.horizon(), format, out)
}

pub fn parse_flux<T: Scalar>(text: &str) -> Result<FluxField<T>> {
    let lattice = if looks_like_json(text) {
        let doc: SlicesDoc = serde_json::from_str(text).map_err(json_err)?;
        check_schema(doc.schema_version)?;
        check_slices_shape(&doc.slices, doc.horizon, "flux")?;
        Lattice::from_slices(from_f64_slices(doc.slices))?
    } else {
        let rows = read_rows(text, &["t", "n", "value"])?;
        let count = max_t(&rows).map(|t| t + 1).unwrap_or(0);
        assemble(&rows, count, T::zero(), |r| Ok(T::lit(parse_value(&r.fields[0], r.t, r.k)?)))?
    };
    Ok(FluxField::new(lattice))
}

// ---------------------------------------------------------------- wave fields

pub fn write_wavefield<T: Scalar, W: Write>(w: &WaveField<T>, format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "t,n,plus,minus")?;
            for (t, n, p) in w.plus_lattice().iter() {
                writeln!(out, "{t},{n},{},{}", fmt_num(p.as_f64()), fmt_num(w.minus(n, t).as_f64()))?;
            }
        }
        Format::Json => {
            let doc = WaveDoc {
                schema_version: Some(SCHEMA_VERSION),
                horizon: w.horizon(),
                plus: to_f64_slices(w.plus_lattice()),
                minus: to_f64_slices(w.minus_lattice()),
            };
            serde_json::to_writer(&mut out, &doc).map_err(json_err)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn parse_wavefield<T: Scalar>(text: &str) -> Result<WaveField<T>> {
    let (plus, minus) = if looks_like_json(text) {
        let doc: WaveDoc = serde_json::from_str(text).map_err(json_err)?;
        check_schema(doc.schema_version)?;
        check_slices_shape(&doc.plus, doc.horizon + 1, "plus component")?;
        check_slices_shape(&doc.minus, doc.horizon + 1, "minus component")?;
        (
            Lattice::from_slices(from_f64_slices(doc.plus))?,
            Lattice::from_slices(from_f64_slices(doc.minus))?,
        )
    } else {
        let rows = read_rows(text, &["t", "n", "plus", "minus"])?;
        let count = max_t(&rows).map(|t| t + 1).ok_or_else(|| parse_err("csv", "no data rows"))?;
        let plus = assemble(&rows, count, T::zero(), |r| Ok(T::lit(parse_value(&r.fields[0], r.t, r.k)?)))?;
        let minus = assemble(&rows, count, T::zero(), |r| Ok(T::lit(parse_value(&r.fields[1], r.t, r.k)?)))?;
        (plus, minus)
    };
    WaveField::new(plus, minus)
}

pub fn write_complex_wavefield<T: Scalar, W: Write>(
    w: &ComplexWaveField<T>,
    format: Format,
    mut out: W,
) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "t,n,plus_re,plus_im,minus_re,minus_im")?;
            for (t, n, p) in w.plus_lattice().iter() {
                let m = w.minus(n, t);
                writeln!(
                    out,
                    "{t},{n},{},{},{},{}",
                    fmt_num(p.re.as_f64()),
                    fmt_num(p.im.as_f64()),
                    fmt_num(m.re.as_f64()),
                    fmt_num(m.im.as_f64())
                )?;
            }
        }
        Format::Json => {
            let pairs = |l: &Lattice<Complex<T>>| -> Vec<Vec<[f64; 2]>> {
                l.slices()
                    .iter()
                    .map(|s| s.iter().map(|c| [c.re.as_f64(), c.im.as_f64()]).collect())
                    .collect()
            };
            let doc = ComplexWaveDoc {
                schema_version: Some(SCHEMA_VERSION),
                horizon: w.horizon(),
                plus: pairs(w.plus_lattice()),
                minus: pairs(w.minus_lattice()),
            };
            serde_json::to_writer(&mut out, &doc).map_err(json_err)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn parse_complex_wavefield<T: Scalar>(text: &str) -> Result<ComplexWaveField<T>> {
    let doc: ComplexWaveDoc = serde_json::from_str(text).map_err(json_err)?;
    check_schema(doc.schema_version)?;
    check_slices_shape(&doc.plus, doc.horizon + 1, "plus component")?;
    check_slices_shape(&doc.minus, doc.horizon + 1, "minus component")?;
    let unpair = |s: Vec<Vec<[f64; 2]>>| -> Vec<Vec<Complex<T>>> {
        s.into_iter()
            .map(|row| row.into_iter().map(|[re, im]| Complex::new(T::lit(re), T::lit(im))).collect())
            .collect()
    };
    ComplexWaveField::new(
        Lattice::from_slices(unpair(doc.plus))?,
        Lattice::from_slices(unpair(doc.minus))?,
    )
}

// ---------------------------------------------------------------- schedules

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Coin,
    Jump,
}

impl ScheduleKind {
    fn as_str(self) -> &'static str {
        match self {
            ScheduleKind::Coin => "coin",
            ScheduleKind::Jump => "jump",
        }
    }
}

fn write_schedule<T: Scalar, W: Write>(
    lattice: &Lattice<Option<T>>,
    kind: ScheduleKind,
    format: Format,
    mut out: W,
) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "t,n,value")?;
            for (t, n, v) in lattice.iter() {
                match v {
                    Some(v) => writeln!(out, "{t},{n},{}", fmt_num(v.as_f64()))?,
                    None => writeln!(out, "{t},{n},")?,
                }
            }
        }
        Format::Json => {
            let doc = ScheduleDoc {
                schema_version: Some(SCHEMA_VERSION),
                horizon: lattice.len(),
                kind: kind.as_str().into(),
                entries: lattice
                    .iter()
                    .map(|(t, n, v)| ScheduleEntry { t: t as i64, n, value: v.map(|x| x.as_f64()) })
                    .collect(),
            };
            serde_json::to_writer(&mut out, &doc).map_err(json_err)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn parse_schedule<T: Scalar>(text: &str, expected: ScheduleKind) -> Result<Lattice<Option<T>>> {
    if looks_like_json(text) {
        let doc: ScheduleDoc = serde_json::from_str(text).map_err(json_err)?;
        check_schema(doc.schema_version)?;
        if doc.kind != expected.as_str() {
            return Err(parse_err(
                "kind",
                format!("expected a {} schedule, found '{}'", expected.as_str(), doc.kind),
            ));
        }
        let mut slices: Vec<Vec<Option<T>>> = (0..doc.horizon).map(|t| vec![None; t + 1]).collect();
        let mut seen = HashSet::new();
        for (i, e) in doc.entries.iter().enumerate() {
            let location = format!("entry {i}");
            let k = to_storage_index(e.n, e.t).map_err(|err| parse_err(&location, err))?;
            if e.t as usize >= doc.horizon {
                return Err(parse_err(&location, format!("t={} beyond horizon {}", e.t, doc.horizon)));
            }
            if !seen.insert((e.t, e.n)) {
                return Err(parse_err(&location, format!("duplicate site (n={}, t={})", e.n, e.t)));
            }
            slices[e.t as usize][k] = e.value.map(T::lit);
        }
        Lattice::from_slices(slices)
    } else {
        let rows = read_rows(text, &["t", "n", "value"])?;
        let count = max_t(&rows).map(|t| t + 1).unwrap_or(0);
        assemble(&rows, count, None, |r| {
            if r.fields[0].is_empty() || r.fields[0] == "null" {
                Ok(None)
            } else {
                Ok(Some(T::lit(parse_value(&r.fields[0], r.t, r.k)?)))
            }
        })
    }
}

pub fn write_coin_schedule<T: Scalar, W: Write>(s: &CoinSchedule<T>, format: Format, out: W) -> Result<()> {
    write_schedule(s.lattice(), ScheduleKind::Coin, format, out)
}

pub fn write_jump_schedule<T: Scalar, W: Write>(s: &JumpSchedule<T>, format: Format, out: W) -> Result<()> {
    write_schedule(s.lattice(), ScheduleKind::Jump, format, out)
}

pub fn parse_coin_schedule<T: Scalar>(text: &str) -> Result<CoinSchedule<T>> {
    CoinSchedule::new(parse_schedule(text, ScheduleKind::Coin)?)
}

pub fn parse_jump_schedule<T: Scalar>(text: &str) -> Result<JumpSchedule<T>> {
    JumpSchedule::new(parse_schedule(text, ScheduleKind::Jump)?)
}

/// Kind declared by a JSON schedule document, if any.
pub fn schedule_kind(text: &str) -> Option<ScheduleKind> {
    let doc: serde_json::Value = serde_json::from_str(text).ok()?;
    match doc.get("kind")?.as_str()? {
        "coin" => Some(ScheduleKind::Coin),
        "jump" => Some(ScheduleKind::Jump),
        _ => None,
    }
}

// ---------------------------------------------------------------- monte carlo

/// `t,n,rho,stderr` rows for a Monte Carlo estimate.
pub fn write_estimate_csv<T: Scalar, W: Write>(
    rho: &ProbabilitySequence<T>,
    stderr: &Lattice<T>,
    mut out: W,
) -> Result<()> {
    writeln!(out, "t,n,rho,stderr")?;
    for (t, n, v) in rho.iter() {
        writeln!(out, "{t},{n},{},{}", fmt_num(v.as_f64()), fmt_num(stderr.value(n, t).as_f64()))?;
    }
    Ok(())
}
