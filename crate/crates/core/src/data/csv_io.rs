use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::robust::{Dataset, Label, Sample};

/// Load `x_1,…,x_d,label` rows; labels must be ±1. A first row containing a
/// non-numeric field is treated as a header.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    read_csv(File::open(path)?)
}

pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut samples = Vec::new();
    let mut dim: Option<usize> = None;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            column: 0,
            message: e.to_string(),
        })?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if i == 0 && rec.iter().any(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if rec.len() < 2 {
            return Err(Error::Parse {
                row,
                column: rec.len(),
                message: "need at least one feature and a label".into(),
            });
        }
        let d = rec.len() - 1;
        if let Some(expected) = dim {
            if d != expected {
                return Err(Error::Parse {
                    row,
                    column: rec.len(),
                    message: format!("expected {} fields, found {}", expected + 1, rec.len()),
                });
            }
        }
        dim = Some(d);
        let mut x = Vec::with_capacity(d);
        for (j, field) in rec.iter().take(d).enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                column: j + 1,
                message: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: j + 1,
                    message: "feature is not finite".into(),
                });
            }
            x.push(v);
        }
        let raw = &rec[d];
        let y = raw
            .parse::<f64>()
            .ok()
            .and_then(|v| {
                if v == 1.0 {
                    Some(Label::Pos)
                } else if v == -1.0 {
                    Some(Label::Neg)
                } else {
                    None
                }
            })
            .ok_or_else(|| Error::Parse {
                row,
                column: d + 1,
                message: format!("label '{raw}' must be -1 or +1"),
            })?;
        samples.push(Sample::new(x, y));
    }
    Dataset::new(samples)
}

/// Write a dataset in the format [`load_csv`] reads. Numbers use the shortest
/// text that parses back to the same binary64 value.
pub fn save_csv(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    let mut f = File::create(path)?;
    write_csv(&mut f, data)
}

pub fn write_csv<W: Write>(out: &mut W, data: &Dataset) -> Result<()> {
    let mut buf = String::new();
    for s in data.iter() {
        for v in &s.x {
            buf.push_str(&format!("{v:?},"));
        }
        buf.push_str(if s.y == Label::Pos { "1\n" } else { "-1\n" });
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}
