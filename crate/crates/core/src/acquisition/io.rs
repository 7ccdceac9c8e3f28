//! Record files.
//!
//! Text: header `index,theta_a,theta_b,q_a,q_b`, then one comma-separated
//! row per record with floats at 9 significant digits.
//!
//! Binary: magic `EPRT`, one version byte, then little-endian `f64`
//! quintuples `(index, theta_a, theta_b, q_a, q_b)`.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::QuadratureRecord;
use crate::{Error, Result};

pub const TEXT_HEADER: &str = "index,theta_a,theta_b,q_a,q_b";
pub const MAGIC: &[u8; 4] = b"EPRT";
pub const BINARY_VERSION: u8 = 1;
const RECORD_BYTES: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecordFormat {
    #[default]
    Csv,
    Binary,
}

impl std::str::FromStr for RecordFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(RecordFormat::Csv),
            "bin" => Ok(RecordFormat::Binary),
            other => Err(Error::invalid("format", format!("`{other}` (expected `csv` or `bin`)"))),
        }
    }
}

pub struct RecordWriter<W: Write> {
    out: W,
    format: RecordFormat,
    last_index: Option<u64>,
    count: u64,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(mut out: W, format: RecordFormat) -> Result<Self> {
        match format {
            RecordFormat::Csv => writeln!(out, "{TEXT_HEADER}")?,
            RecordFormat::Binary => {
                out.write_all(MAGIC)?;
                out.write_all(&[BINARY_VERSION])?;
            }
        }
        Ok(Self { out, format, last_index: None, count: 0 })
    }

    pub fn write(&mut self, r: &QuadratureRecord) -> Result<()> {
        if self.last_index.is_some_and(|l| r.index <= l) {
            return Err(Error::invalid("index", format!("record index {} is not increasing", r.index)));
        }
        let values = [r.theta_a, r.theta_b, r.q_a, r.q_b];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("record", format!("non-finite value in record {}", r.index)));
        }
        match self.format {
            RecordFormat::Csv => writeln!(
                self.out,
                "{},{:.8e},{:.8e},{:.8e},{:.8e}",
                r.index, r.theta_a, r.theta_b, r.q_a, r.q_b
            )?,
            RecordFormat::Binary => {
                let mut buf = [0u8; RECORD_BYTES];
                buf[..8].copy_from_slice(&(r.index as f64).to_le_bytes());
                for (k, v) in values.iter().enumerate() {
                    buf[8 * (k + 1)..8 * (k + 2)].copy_from_slice(&v.to_le_bytes());
                }
                self.out.write_all(&buf)?;
            }
        }
        self.last_index = Some(r.index);
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Writes a record stream to `path`, returning the number of records.
pub fn write_records<I>(records: I, path: &Path, format: RecordFormat) -> Result<u64>
where
    I: IntoIterator<Item = QuadratureRecord>,
{
    let mut w = RecordWriter::new(BufWriter::new(File::create(path)?), format)?;
    for r in records {
        w.write(&r)?;
    }
    let n = w.count();
    w.finish()?;
    Ok(n)
}

enum Source<R> {
    Text(io::Lines<BufReader<R>>),
    Binary(BufReader<R>),
}

/// Streaming reader; the format is detected from the first bytes.
pub struct RecordReader<R: Read> {
    source: Source<R>,
    path: PathBuf,
    line: usize,
    last_index: Option<u64>,
    done: bool,
}

impl RecordReader<File> {
    pub fn open(path: &Path) -> Result<Self> {
        Self::new(File::open(path)?, path)
    }
}

impl<R: Read> RecordReader<R> {
    pub fn new(inner: R, path: &Path) -> Result<Self> {
        let mut reader = BufReader::new(inner);
        let head = reader.fill_buf()?;
        let path = path.to_path_buf();
        let source = if head.starts_with(MAGIC) {
            let mut prefix = [0u8; 5];
            reader.read_exact(&mut prefix)?;
            if prefix[4] != BINARY_VERSION {
                return Err(Error::Parse { path, line: 0, message: format!("unsupported binary version {}", prefix[4]) });
            }
            Source::Binary(reader)
        } else {
            let mut lines = reader.lines();
            match lines.next() {
                Some(Ok(h)) if h.trim_end() == TEXT_HEADER => {}
                Some(Ok(h)) => {
                    return Err(Error::Parse { path, line: 1, message: format!("malformed header `{h}`") });
                }
                Some(Err(e)) => return Err(e.into()),
                None => return Err(Error::Parse { path, line: 1, message: "empty file".into() }),
            }
            Source::Text(lines)
        };
        Ok(Self { source, path, line: 1, last_index: None, done: false })
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { path: self.path.clone(), line: self.line, message: message.into() }
    }

    fn parse_row(&self, row: &str) -> Result<QuadratureRecord> {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 5 {
            return Err(self.error(format!("expected 5 fields, found {}", fields.len())));
        }
        let index: u64 = fields[0].trim().parse().map_err(|_| self.error(format!("bad index `{}`", fields[0])))?;
        let mut v = [0.0; 4];
        for (k, f) in fields[1..].iter().enumerate() {
            v[k] = f.trim().parse().map_err(|_| self.error(format!("bad number `{f}`")))?;
        }
        Ok(QuadratureRecord { index, theta_a: v[0], theta_b: v[1], q_a: v[2], q_b: v[3] })
    }

    fn read_next(&mut self) -> Result<Option<QuadratureRecord>> {
        self.line += 1;
        let record = match &mut self.source {
            Source::Text(lines) => loop {
                match lines.next() {
                    None => return Ok(None),
                    Some(Err(e)) => return Err(e.into()),
                    Some(Ok(l)) if l.trim().is_empty() => self.line += 1,
                    Some(Ok(l)) => break self.parse_row(&l)?,
                }
            },
            Source::Binary(reader) => {
                let mut buf = [0u8; RECORD_BYTES];
                let mut filled = 0;
                while filled < RECORD_BYTES {
                    let n = reader.read(&mut buf[filled..])?;
                    if n == 0 {
                        break;
                    }
                    filled += n;
                }
                if filled == 0 {
                    return Ok(None);
                }
                if filled < RECORD_BYTES {
                    return Err(self.error("truncated binary record"));
                }
                let f = |k: usize| f64::from_le_bytes(buf[8 * k..8 * (k + 1)].try_into().expect("8-byte slice"));
                let index = f(0);
                if !(index >= 0.0 && index.fract() == 0.0 && index < 2f64.powi(53)) {
                    return Err(self.error(format!("bad index {index}")));
                }
                QuadratureRecord { index: index as u64, theta_a: f(1), theta_b: f(2), q_a: f(3), q_b: f(4) }
            }
        };
        if [record.theta_a, record.theta_b, record.q_a, record.q_b].iter().any(|v| !v.is_finite()) {
            return Err(self.error("non-finite value"));
        }
        if self.last_index.is_some_and(|l| record.index <= l) {
            return Err(self.error(format!("index {} is not increasing", record.index)));
        }
        self.last_index = Some(record.index);
        Ok(Some(record))
    }
}

impl<R: Read> Iterator for RecordReader<R> {
    type Item = Result<QuadratureRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.read_next().transpose();
        if !matches!(item, Some(Ok(_))) {
            self.done = true;
        }
        item
    }
}

pub fn read_records(path: &Path) -> Result<Vec<QuadratureRecord>> {
    RecordReader::open(path)?.collect()
}
