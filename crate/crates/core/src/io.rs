//! CSV reading and writing for signals and periodograms.
//!
//! Signals use a two-column `x,y` layout with a header line. Values are
//! written with 17 significant digits, so a written file parses back to the
//! identical bits. Rows may arrive in any order and are sorted by `x` on read.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::lombscargle::Periodogram;
use crate::signal_model::SampledSignal;

/// Minimum peak power for the periodogram export to flag a row.
pub const PEAK_FLAG_THRESHOLD: f64 = 1e-9;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::from(io),
        other => Error::InvalidInput(format!("{other:?}")),
    }
}

fn parse_field(field: Option<&str>, line: u64, name: &str) -> Result<f64> {
    let raw =
        field.ok_or_else(|| Error::InvalidInput(format!("line {line}: missing {name} column")))?;
    let v: f64 = raw.trim().parse().map_err(|_| {
        Error::InvalidInput(format!("line {line}: cannot parse {name} value {raw:?}"))
    })?;
    if !v.is_finite() {
        return Err(Error::InvalidInput(format!(
            "line {line}: {name} value is not finite"
        )));
    }
    Ok(v)
}

/// Reads `x,y` rows. A first line that does not parse as numbers is taken as
/// a header. Blank lines are skipped; any other malformed row is an error
/// naming its line number.
pub fn read_signal<R: Read>(reader: R) -> Result<SampledSignal> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut pairs = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(k as u64 + 1, |p| p.line());
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() > 2 {
            return Err(Error::InvalidInput(format!(
                "line {line}: expected 2 columns, found {}",
                rec.len()
            )));
        }
        let x = parse_field(rec.get(0), line, "x");
        if k == 0 && pairs.is_empty() && x.is_err() {
            continue;
        }
        pairs.push((x?, parse_field(rec.get(1), line, "y")?));
    }
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no data rows".into()));
    }
    SampledSignal::from_unsorted(pairs)
}

pub fn read_signal_file(path: impl AsRef<Path>) -> Result<SampledSignal> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_signal(BufReader::new(file))
}

pub fn write_signal<W: Write>(writer: W, s: &SampledSignal) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "y"]).map_err(csv_err)?;
    for (x, y) in s.iter() {
        w.write_record([fmt(x), fmt(y)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_signal_file(path: impl AsRef<Path>, s: &SampledSignal) -> Result<()> {
    write_signal(create(path.as_ref())?, s)
}

/// Writes `f,p,peak` rows; `peak` is 1 on the highest-power row and 0
/// elsewhere. No row is flagged when the peak power is at most
/// [`PEAK_FLAG_THRESHOLD`].
pub fn write_periodogram<W: Write>(writer: W, pg: &Periodogram) -> Result<()> {
    let peak = pg
        .peak_index()
        .filter(|&k| pg.power[k] > PEAK_FLAG_THRESHOLD);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["f", "p", "peak"]).map_err(csv_err)?;
    for (k, (&f, &p)) in pg.frequencies.iter().zip(&pg.power).enumerate() {
        let flag = if Some(k) == peak { "1" } else { "0" };
        w.write_record([fmt(f), fmt(p), flag.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_periodogram_file(path: impl AsRef<Path>, pg: &Periodogram) -> Result<()> {
    write_periodogram(create(path.as_ref())?, pg)
}
