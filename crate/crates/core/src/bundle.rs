//! Matrix bundles: a JSON header plus a sibling payload file.
//!
//! ```text
//! name.json  {"format_version":1,"name":"…","rows":R,"cols":C,
//!             "encoding":"doubled-int"|"f64","layout":"row-major",
//!             "payload":"csv"|"bin","data_file":"name.csv"|"name.bin"}
//! name.csv   R lines of C comma-separated doubled integers
//! name.bin   R·C little-endian i32 (doubled-int) or f64 values
//! ```
//!
//! Every file is written to a temporary sibling and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfint::HalfIntMatrix;
use crate::FORMAT_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    DoubledInt,
    F64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    Csv,
    Bin,
}

impl Payload {
    fn extension(self) -> &'static str {
        match self {
            Payload::Csv => "csv",
            Payload::Bin => "bin",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleHeader {
    pub format_version: u32,
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub encoding: Encoding,
    pub layout: String,
    pub payload: Payload,
    pub data_file: String,
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    // Temporary files are created owner-only.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(fs::Permissions::from_mode(0o644))
            .map_err(|e| Error::io(path, e))?;
    }
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn header_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.json"))
}

fn write_header(dir: &Path, header: &BundleHeader) -> Result<PathBuf> {
    let path = header_path(dir, &header.name);
    let mut text = serde_json::to_string_pretty(header)?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Writes a half-integer matrix; returns the header path.
pub fn write_halfint_bundle(dir: &Path, name: &str, m: &HalfIntMatrix, payload: Payload) -> Result<PathBuf> {
    let data_file = format!("{name}.{}", payload.extension());
    let data = match payload {
        Payload::Csv => {
            let mut s = String::new();
            for r in 0..m.rows() {
                let line: Vec<String> = m.row(r).iter().map(|v| v.to_string()).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
            s.into_bytes()
        }
        Payload::Bin => {
            let mut bytes = Vec::with_capacity(m.rows() * m.cols() * 4);
            for &v in m.doubled_entries() {
                let v32 = i32::try_from(v)
                    .map_err(|_| Error::InvalidInput(format!("doubled entry {v} does not fit in i32")))?;
                bytes.extend_from_slice(&v32.to_le_bytes());
            }
            bytes
        }
    };
    write_atomic(&dir.join(&data_file), &data)?;
    write_header(
        dir,
        &BundleHeader {
            format_version: FORMAT_VERSION,
            name: name.to_string(),
            rows: m.rows(),
            cols: m.cols(),
            encoding: Encoding::DoubledInt,
            layout: "row-major".into(),
            payload,
            data_file,
        },
    )
}

/// Writes a float matrix (row-major values) as a little-endian f64 bundle.
pub fn write_f64_bundle(dir: &Path, name: &str, rows: usize, cols: usize, values: &[f64]) -> Result<PathBuf> {
    if values.len() != rows * cols {
        return Err(Error::InvalidInput(format!(
            "{} values do not fill a {rows}x{cols} matrix",
            values.len()
        )));
    }
    let data_file = format!("{name}.bin");
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    write_atomic(&dir.join(&data_file), &bytes)?;
    write_header(
        dir,
        &BundleHeader {
            format_version: FORMAT_VERSION,
            name: name.to_string(),
            rows,
            cols,
            encoding: Encoding::F64,
            layout: "row-major".into(),
            payload: Payload::Bin,
            data_file,
        },
    )
}

pub fn read_header(path: &Path) -> Result<BundleHeader> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let header: BundleHeader = serde_json::from_str(&text).map_err(|e| format_err(path, e.to_string()))?;
    if header.format_version != FORMAT_VERSION {
        return Err(format_err(
            path,
            format!("unsupported format version {}", header.format_version),
        ));
    }
    if header.layout != "row-major" {
        return Err(format_err(path, format!("unsupported layout {}", header.layout)));
    }
    Ok(header)
}

fn read_payload(header_file: &Path, header: &BundleHeader) -> Result<(PathBuf, Vec<u8>)> {
    let dir = header_file.parent().unwrap_or(Path::new("."));
    let data_path = dir.join(&header.data_file);
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    Ok((data_path, bytes))
}

/// Reads a doubled-int bundle from its header path.
pub fn read_halfint_bundle(path: &Path) -> Result<(BundleHeader, HalfIntMatrix)> {
    let header = read_header(path)?;
    if header.encoding != Encoding::DoubledInt {
        return Err(format_err(path, "expected doubled-int encoding"));
    }
    let (data_path, bytes) = read_payload(path, &header)?;
    let n = header.rows * header.cols;
    let values: Vec<i64> = match header.payload {
        Payload::Bin => {
            if bytes.len() != 4 * n {
                return Err(format_err(
                    &data_path,
                    format!("expected {} bytes, found {}", 4 * n, bytes.len()),
                ));
            }
            bytes
                .chunks_exact(4)
                .map(|c| i32::from_le_bytes(c.try_into().expect("chunk of 4")) as i64)
                .collect()
        }
        Payload::Csv => {
            let text = String::from_utf8(bytes).map_err(|e| format_err(&data_path, e.to_string()))?;
            let mut values = Vec::with_capacity(n);
            for (lineno, line) in text.lines().enumerate() {
                let row: Vec<&str> = line.split(',').collect();
                if row.len() != header.cols {
                    return Err(format_err(
                        &data_path,
                        format!("line {} has {} fields, expected {}", lineno + 1, row.len(), header.cols),
                    ));
                }
                for f in row {
                    values.push(
                        f.trim()
                            .parse::<i64>()
                            .map_err(|e| format_err(&data_path, format!("line {}: {e}", lineno + 1)))?,
                    );
                }
            }
            values
        }
    };
    if values.len() != n {
        return Err(format_err(
            &data_path,
            format!("expected {n} values, found {}", values.len()),
        ));
    }
    let m = HalfIntMatrix::from_doubled(header.rows, header.cols, values)?;
    Ok((header, m))
}

/// Reads an f64 bundle from its header path.
pub fn read_f64_bundle(path: &Path) -> Result<(BundleHeader, Vec<f64>)> {
    let header = read_header(path)?;
    if header.encoding != Encoding::F64 || header.payload != Payload::Bin {
        return Err(format_err(path, "expected f64 binary payload"));
    }
    let (data_path, bytes) = read_payload(path, &header)?;
    let n = header.rows * header.cols;
    if bytes.len() != 8 * n {
        return Err(format_err(
            &data_path,
            format!("expected {} bytes, found {}", 8 * n, bytes.len()),
        ));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((header, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfint::HalfInt;
    use proptest::prelude::*;

    fn matrix(rows: usize, cols: usize, vals: Vec<i64>) -> HalfIntMatrix {
        HalfIntMatrix::from_doubled(rows, cols, vals).unwrap()
    }

    proptest! {
        #[test]
        fn halfint_round_trip(
            (rows, cols, vals) in (1usize..6, 1usize..6)
                .prop_flat_map(|(r, c)| (Just(r), Just(c), proptest::collection::vec(-9i64..=9, r * c))),
            csv in any::<bool>()
        ) {
            let dir = tempfile::tempdir().unwrap();
            let m = matrix(rows, cols, vals);
            let payload = if csv { Payload::Csv } else { Payload::Bin };
            let h = write_halfint_bundle(dir.path(), "m", &m, payload).unwrap();
            let (header, back) = read_halfint_bundle(&h).unwrap();
            prop_assert_eq!(back, m);
            prop_assert_eq!(header.payload, payload);
        }

        #[test]
        fn f64_round_trip_is_bit_exact(vals in proptest::collection::vec(any::<f64>(), 6)) {
            let dir = tempfile::tempdir().unwrap();
            let h = write_f64_bundle(dir.path(), "g", 2, 3, &vals).unwrap();
            let (_, back) = read_f64_bundle(&h).unwrap();
            let a: Vec<u64> = vals.iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = back.iter().map(|v| v.to_bits()).collect();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn header_shape() {
        let dir = tempfile::tempdir().unwrap();
        let m = HalfIntMatrix::from_fn(2, 2, |r, c| HalfInt::from_doubled((r * 2 + c) as i64 - 1));
        let h = write_halfint_bundle(dir.path(), "sigma_01", &m, Payload::Csv).unwrap();
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&h).unwrap()).unwrap();
        assert_eq!(json["encoding"], "doubled-int");
        assert_eq!(json["layout"], "row-major");
        assert_eq!(json["data_file"], "sigma_01.csv");
        assert_eq!(
            fs::read_to_string(dir.path().join("sigma_01.csv")).unwrap(),
            "-1,0\n1,2\n"
        );
    }

    #[test]
    fn malformed_payloads_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let m = HalfIntMatrix::identity(3);
        let h = write_halfint_bundle(dir.path(), "id", &m, Payload::Bin).unwrap();
        fs::write(dir.path().join("id.bin"), [0u8; 5]).unwrap();
        assert!(matches!(read_halfint_bundle(&h), Err(Error::Format { .. })));
        assert!(matches!(read_f64_bundle(&h), Err(Error::Format { .. })));
    }
}
