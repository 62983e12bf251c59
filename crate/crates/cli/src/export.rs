//! File formats: per-matrix CSV, JSON bundles, correlation profiles and
//! parameter tables.

use std::fmt::Write as _;

use qcss::bounds::{ParamTable, TableRow};
use qcss::correlation::CorrelationProfile;
use qcss::PhaseMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA: &str = "qcss/1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema {found:?}, expected {SCHEMA:?}")]
    Schema { found: String },
    #[error("invalid matrix: {0}")]
    Matrix(#[from] qcss::QcssError),
}

/// A single set with the exponent that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRecord {
    pub exponent: u64,
    pub matrix: PhaseMatrix,
}

/// Row-major CSV with a `# N=…, k=…, m=…, e=…` header.
pub fn matrix_to_csv(matrix: &PhaseMatrix, exponent: u64) -> String {
    let mut out = format!(
        "# N={}, k={}, m={}, e={}\n",
        matrix.n(),
        matrix.k(),
        matrix.m(),
        exponent
    );
    for row in matrix.rows() {
        let cells: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<MatrixRecord, FormatError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| FormatError::Csv("empty input".into()))?;
    let body = header
        .strip_prefix('#')
        .ok_or_else(|| FormatError::Csv("missing '#' header".into()))?;
    let (mut n, mut k, mut m, mut e) = (None, None, None, None);
    for field in body.split(',') {
        let (key, value) = field
            .trim()
            .split_once('=')
            .ok_or_else(|| FormatError::Csv(format!("bad header field {field:?}")))?;
        let value: u64 = value
            .trim()
            .parse()
            .map_err(|_| FormatError::Csv(format!("bad header value {value:?}")))?;
        match key.trim() {
            "N" => n = Some(value),
            "k" => k = Some(value),
            "m" => m = Some(value),
            "e" => e = Some(value),
            other => return Err(FormatError::Csv(format!("unknown header key {other:?}"))),
        }
    }
    let missing = |name| FormatError::Csv(format!("header lacks {name}"));
    let n = n.ok_or_else(|| missing("N"))?;
    let k = k.ok_or_else(|| missing("k"))?;
    let m = m.ok_or_else(|| missing("m"))?;
    let exponent = e.ok_or_else(|| missing("e"))?;

    let mut phases = Vec::new();
    for (row, line) in lines.enumerate() {
        let before = phases.len();
        for cell in line.split(',') {
            let v: u32 = cell
                .trim()
                .parse()
                .map_err(|_| FormatError::Csv(format!("row {row}: bad cell {cell:?}")))?;
            phases.push(v);
        }
        if phases.len() - before != n as usize {
            return Err(FormatError::Csv(format!(
                "row {row} has {} cells, expected {n}",
                phases.len() - before
            )));
        }
    }
    let matrix = PhaseMatrix::from_phases(n as u32, k as u32, m as u32, phases)?;
    Ok(MatrixRecord { exponent, matrix })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BundleKind {
    Set,
    Ccc,
    Qcss,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberJson {
    pub u: u64,
    pub k: u32,
    pub m: u32,
    pub phases: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleJson {
    pub schema: String,
    pub n: u32,
    pub exponent: u64,
    pub p0: u64,
    pub kind: BundleKind,
    pub members: Vec<MemberJson>,
}

/// Decoded JSON bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub n: u32,
    pub exponent: u64,
    pub p0: u64,
    pub kind: BundleKind,
    pub members: Vec<(u64, PhaseMatrix)>,
}

pub fn bundle_to_json(bundle: &Bundle) -> Result<String, FormatError> {
    let doc = BundleJson {
        schema: SCHEMA.to_string(),
        n: bundle.n,
        exponent: bundle.exponent,
        p0: bundle.p0,
        kind: bundle.kind,
        members: bundle
            .members
            .iter()
            .map(|(u, c)| MemberJson {
                u: *u,
                k: c.k(),
                m: c.m(),
                phases: c.rows().map(<[u32]>::to_vec).collect(),
            })
            .collect(),
    };
    Ok(serde_json::to_string(&doc)?)
}

pub fn bundle_from_json(text: &str) -> Result<Bundle, FormatError> {
    let doc: BundleJson = serde_json::from_str(text)?;
    if doc.schema != SCHEMA {
        return Err(FormatError::Schema { found: doc.schema });
    }
    let members = doc
        .members
        .into_iter()
        .map(|mj| {
            let phases = mj.phases.concat();
            Ok((mj.u, PhaseMatrix::from_phases(doc.n, mj.k, mj.m, phases)?))
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(Bundle {
        n: doc.n,
        exponent: doc.exponent,
        p0: doc.p0,
        kind: doc.kind,
        members,
    })
}

/// `tau,magnitude` rows over every shift.
pub fn profile_to_csv(profile: &CorrelationProfile) -> String {
    let mut out = String::from("tau,magnitude\n");
    for (tau, value) in profile.iter() {
        let _ = writeln!(out, "{tau},{}", value.norm());
    }
    out
}

fn table_columns(table: ParamTable, row: &TableRow) -> [String; 5] {
    let rho = format!("{:.4}", row.rho_rounded());
    match table {
        ParamTable::PrimeSquare => [
            row.alphabet.clone(),
            row.flock_size.to_string(),
            row.length.to_string(),
            row.set_size.to_string(),
            rho,
        ],
        _ => [
            row.alphabet.clone(),
            row.set_size.to_string(),
            row.flock_size.to_string(),
            row.length.to_string(),
            rho,
        ],
    }
}

fn table_header(table: ParamTable) -> [&'static str; 5] {
    match table {
        ParamTable::PrimeSquare => ["alphabet", "M", "N", "K", "rho"],
        _ => ["alphabet", "K", "M", "N", "rho"],
    }
}

pub fn table_to_csv(table: ParamTable, rows: &[TableRow]) -> String {
    let mut out = table_header(table).join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&table_columns(table, row).join(","));
        out.push('\n');
    }
    out
}

pub fn table_to_text(table: ParamTable, rows: &[TableRow]) -> String {
    let cells: Vec<[String; 5]> = std::iter::once(table_header(table).map(str::to_string))
        .chain(rows.iter().map(|r| table_columns(table, r)))
        .collect();
    let mut widths = [0usize; 5];
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = format!("# {}\n", table.title());
    for row in &cells {
        let line: Vec<String> = row
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcss::Codebook;

    #[test]
    fn csv_header_and_rows() {
        let b = Codebook::new(35).unwrap();
        let c = b.build_set(1, 0).unwrap();
        let text = matrix_to_csv(&c, 5);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# N=35, k=1, m=0, e=5"));
        assert!(lines.nth(1).unwrap().starts_with("0,1,4,5,2,3,6,7,8,11,"));
        let back = matrix_from_csv(&text).unwrap();
        assert_eq!(back.matrix, c);
        assert_eq!(back.exponent, 5);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(matrix_from_csv("").is_err());
        assert!(matrix_from_csv("N=3, k=1, m=0, e=3\n0,0,0").is_err());
        assert!(matrix_from_csv("# N=3, k=1, m=0\n0,0,0\n0,0,0\n0,0,0").is_err());
        assert!(matrix_from_csv("# N=3, k=1, m=0, e=3\n0,0\n0,0,0\n0,0,0").is_err());
        assert!(matrix_from_csv("# N=3, k=1, m=0, e=3\n0,0,0\n0,0,0").is_err());
        assert!(matrix_from_csv("# N=3, k=1, m=0, e=3\n0,0,3\n0,0,0\n0,0,0").is_err());
    }

    #[test]
    fn json_rejects_unknown_schema() {
        let text = r#"{"schema":"qcss/2","n":3,"exponent":3,"p0":3,"kind":"set","members":[]}"#;
        assert!(matches!(
            bundle_from_json(text),
            Err(FormatError::Schema { .. })
        ));
    }

    #[test]
    fn prime_square_columns_are_reordered() {
        let rows = qcss::bounds::table_rows(ParamTable::PrimeSquare);
        let csv = table_to_csv(ParamTable::PrimeSquare, &rows);
        assert_eq!(csv.lines().next(), Some("alphabet,M,N,K,rho"));
        assert_eq!(csv.lines().nth(2), Some("Z_{13*13},169,169,2028,1.2247"));
    }
}
