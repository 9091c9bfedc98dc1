//! RepFile: the JSON interchange format for representations, plus a lossy
//! CSV export.
//!
//! A RepFile records the weights, the coefficient family, the basis labels
//! with their (H1, H2, H3) weights, and the nonzero entries of every
//! generator matrix as `[row, col, "scalar"]` triples in canonical scalar
//! syntax. Generators appear in the fixed order H1, H2, H3, E11, E22, E33,
//! E12, E21, E23, E32, E13, E31 and entries in (row, col) order, so the same
//! representation always serializes to the same bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use qgl21::{
    build_basis, BasisLabel, CoeffFamily, Generator, HalfInt, QScalar, RealizationParams,
    Representation, SparseMatrix,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Current schema version.
pub const FORMAT_VERSION: u32 = 1;

/// Errors reading or writing representation files.
#[derive(Debug, Error)]
pub enum RepFileError {
    /// Malformed JSON, located in the file.
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    /// The file was written by an incompatible schema version.
    #[error("{path}: schema version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch {
        path: String,
        found: u32,
        expected: u32,
    },
    /// Well-formed JSON with inconsistent content.
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    /// Filesystem error.
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Output format for `export_rep`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Authoritative, lossless.
    Json,
    /// One CSV file per generator; drops parameters and labels.
    Csv,
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
struct ParamsRecord {
    j1: String,
    j2: String,
    j3: String,
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
struct BasisRecord {
    tower: u8,
    proj: String,
    weights: [i64; 3],
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
struct Entry(usize, usize, String);

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
struct GeneratorRecord {
    name: String,
    entries: Vec<Entry>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
struct RepFile {
    format_version: u32,
    params: ParamsRecord,
    coefficients: String,
    dimension: usize,
    basis: Vec<BasisRecord>,
    generators: Vec<GeneratorRecord>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

fn to_record(rep: &Representation) -> RepFile {
    let p = rep.params();
    RepFile {
        format_version: FORMAT_VERSION,
        params: ParamsRecord {
            j1: p.j1.to_string(),
            j2: p.j2.to_string(),
            j3: p.j3.to_string(),
        },
        coefficients: p.coeffs.descriptor(),
        dimension: rep.dim(),
        basis: rep
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| BasisRecord {
                tower: l.tower,
                proj: l.proj.to_string(),
                weights: rep.weight(i).unwrap_or_else(|| l.weights(p.j2, p.j3, p.j1)),
            })
            .collect(),
        generators: rep
            .matrices()
            .map(|(g, m)| GeneratorRecord {
                name: g.name().to_string(),
                entries: m
                    .entries()
                    .into_iter()
                    .map(|(i, j, v)| Entry(i, j, v.to_string()))
                    .collect(),
            })
            .collect(),
    }
}

/// Serialize to the canonical JSON text (with a trailing newline).
pub fn to_json(rep: &Representation) -> String {
    let mut s = serde_json::to_string_pretty(&to_record(rep)).expect("serializable");
    s.push('\n');
    s
}

/// Parse JSON text; `path` is only used in error messages.
pub fn from_json(text: &str, path: &str) -> Result<Representation, RepFileError> {
    let parse_err = |e: serde_json::Error| RepFileError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column().max(1),
        message: e.to_string(),
    };
    let probe: VersionProbe = serde_json::from_str(text).map_err(parse_err)?;
    if probe.format_version != FORMAT_VERSION {
        return Err(RepFileError::SchemaVersionMismatch {
            path: path.to_string(),
            found: probe.format_version,
            expected: FORMAT_VERSION,
        });
    }
    let rec: RepFile = serde_json::from_str(text).map_err(parse_err)?;
    from_record(rec).map_err(|message| RepFileError::Invalid {
        path: path.to_string(),
        message,
    })
}

fn from_record(rec: RepFile) -> Result<Representation, String> {
    let half = |field: &str, s: &str| {
        s.parse::<HalfInt>()
            .map_err(|e| format!("params.{field}: {e}"))
    };
    let params = RealizationParams::new(
        half("j1", &rec.params.j1)?,
        half("j2", &rec.params.j2)?,
        half("j3", &rec.params.j3)?,
    )
    .with_coeffs(CoeffFamily::parse(&rec.coefficients).map_err(|e| format!("coefficients: {e}"))?);
    params.validate().map_err(|e| e.to_string())?;

    if rec.basis.len() != rec.dimension {
        return Err(format!(
            "dimension is {} but the basis lists {} labels",
            rec.dimension,
            rec.basis.len()
        ));
    }
    let mut labels = Vec::with_capacity(rec.basis.len());
    for (i, b) in rec.basis.iter().enumerate() {
        if !(1..=4).contains(&b.tower) {
            return Err(format!("basis[{i}].tower: {} is not in 1..4", b.tower));
        }
        labels.push(BasisLabel::new(
            b.tower,
            half(&format!("basis[{i}].proj"), &b.proj)?,
        ));
    }

    let dim = rec.dimension;
    let mut matrices = BTreeMap::new();
    let names: Vec<&str> = rec.generators.iter().map(|g| g.name.as_str()).collect();
    let expected: Vec<&str> = Generator::ALL.iter().map(|g| g.name()).collect();
    if names != expected {
        return Err(format!(
            "generators must be listed as {} (found {})",
            expected.join(", "),
            names.join(", ")
        ));
    }
    for gr in &rec.generators {
        let g = Generator::from_name(&gr.name).expect("checked above");
        let mut m = SparseMatrix::zeros(dim);
        for (k, Entry(i, j, v)) in gr.entries.iter().enumerate() {
            if *i >= dim || *j >= dim {
                return Err(format!("{}.entries[{k}]: index ({i}, {j}) out of range", gr.name));
            }
            let x: QScalar = v
                .parse()
                .map_err(|e| format!("{}.entries[{k}]: {e}", gr.name))?;
            if x.is_zero() {
                return Err(format!("{}.entries[{k}]: explicit zero entry", gr.name));
            }
            m.set(*i, *j, x);
        }
        matrices.insert(g, m);
    }

    let fock = if labels == BasisLabel::all(params.j1) {
        build_basis(&params)
            .ok()
            .map(|b| b.into_iter().map(|(_, v)| v).collect())
    } else {
        None
    };
    let rep = Representation::new(params, labels, fock, matrices).map_err(|e| e.to_string())?;
    for (i, b) in rec.basis.iter().enumerate() {
        if rep.weight(i) != Some(b.weights) {
            return Err(format!(
                "basis[{i}].weights {:?} disagree with the H diagonal",
                b.weights
            ));
        }
    }
    Ok(rep)
}

/// Read a RepFile from disk.
pub fn import_rep(path: &Path) -> Result<Representation, RepFileError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| RepFileError::Io {
        path: shown.clone(),
        source,
    })?;
    from_json(&text, &shown)
}

/// Paths of the per-generator CSV files for an output path `dir/name.ext`:
/// `dir/name_H1.csv`, `dir/name_H2.csv`, ...
pub fn csv_paths(path: &Path) -> Vec<(Generator, PathBuf)> {
    let stem = path
        .file_stem()
        .map_or_else(|| "rep".to_string(), |s| s.to_string_lossy().into_owned());
    let dir = path.parent().unwrap_or_else(|| Path::new(""));
    Generator::ALL
        .into_iter()
        .map(|g| (g, dir.join(format!("{stem}_{}.csv", g.name()))))
        .collect()
}

/// Text of a value cell: a plain rational for constants, otherwise the
/// canonical scalar string.
fn csv_value(v: &QScalar) -> String {
    match v.to_rational() {
        Some(r) => r.to_string(),
        None => v.to_string(),
    }
}

/// CSV text of one matrix (`row,col,value` header, (row, col) order).
pub fn matrix_csv(m: &SparseMatrix) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["row", "col", "value"]).expect("in-memory write");
    for (i, j, v) in m.entries() {
        w.write_record([i.to_string(), j.to_string(), csv_value(&v)])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

/// Write a representation. JSON goes to `path`; CSV writes one file per
/// generator next to it (see [`csv_paths`]). Returns the files written.
pub fn export_rep(
    rep: &Representation,
    path: &Path,
    format: Format,
) -> Result<Vec<PathBuf>, RepFileError> {
    let write = |p: &Path, text: &str| {
        fs::write(p, text).map_err(|source| RepFileError::Io {
            path: p.display().to_string(),
            source,
        })
    };
    match format {
        Format::Json => {
            write(path, &to_json(rep))?;
            Ok(vec![path.to_path_buf()])
        }
        Format::Csv => {
            let mut out = Vec::new();
            for (g, p) in csv_paths(path) {
                write(&p, &matrix_csv(rep.matrix(g)))?;
                out.push(p);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qgl21::build_rep;

    fn rep() -> Representation {
        build_rep(&RealizationParams::from_twice(1, 2, 0)).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let r = rep();
        let text = to_json(&r);
        let back = from_json(&text, "mem").unwrap();
        assert_eq!(back, r);
        assert_eq!(to_json(&back), text);
    }

    #[test]
    fn custom_family_round_trip() {
        let p = RealizationParams::from_twice(1, 3, 1).with_coeffs(CoeffFamily::q_pow_n());
        let r = build_rep(&p).unwrap();
        assert_eq!(from_json(&to_json(&r), "mem").unwrap(), r);
    }

    #[test]
    fn truncated_file_is_located() {
        let text = to_json(&rep());
        let cut = &text[..text.len() / 2];
        match from_json(cut, "r.json") {
            Err(RepFileError::Parse { line, column, .. }) => assert!(line > 1 && column > 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_version_is_rejected() {
        let text = to_json(&rep()).replacen("\"format_version\": 1", "\"format_version\": 7", 1);
        assert!(matches!(
            from_json(&text, "r.json"),
            Err(RepFileError::SchemaVersionMismatch { found: 7, .. })
        ));
    }

    #[test]
    fn bad_scalar_names_the_entry() {
        let text = to_json(&rep()).replacen("\"(2)/(1)\"", "\"(2/(1)\"", 1);
        let e = from_json(&text, "r.json").unwrap_err().to_string();
        assert!(e.contains("entries["), "{e}");
    }

    #[test]
    fn h1_csv_is_integer_diagonal() {
        let csv = matrix_csv(rep().matrix(Generator::H1));
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("row,col,value"));
        for l in lines {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[0], f[1]);
            f[2].parse::<i64>().unwrap();
        }
    }
}
