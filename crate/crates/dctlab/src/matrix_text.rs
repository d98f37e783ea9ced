//! Plain-text integer matrices.
//!
//! One row per line with space-separated integers. An optional
//! `# scale p/q` line records a rational pre-scale; other `#` lines are
//! comments. Several matrices in one file are separated by blank lines.

use std::fmt::Write as _;

use dctlab_core::linalg::{IntMatrix, PreScale};

#[derive(Debug, thiserror::Error)]
pub enum MatrixTextError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] dctlab_core::Error),
}

/// A matrix with its optional scale and free-form comment lines.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRecord {
    pub comments: Vec<String>,
    pub scale: Option<PreScale>,
    pub matrix: IntMatrix,
}

impl MatrixRecord {
    pub fn new(matrix: IntMatrix) -> Self {
        Self { comments: Vec::new(), scale: None, matrix }
    }

    pub fn with_comment(mut self, c: impl Into<String>) -> Self {
        self.comments.push(c.into());
        self
    }

    pub fn with_scale(mut self, s: PreScale) -> Self {
        self.scale = (!s.is_one()).then_some(s);
        self
    }
}

pub fn format_matrix(m: &IntMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(i32::to_string).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn format_records(records: &[MatrixRecord]) -> String {
    let mut s = String::new();
    for (k, r) in records.iter().enumerate() {
        if k > 0 {
            s.push('\n');
        }
        for c in &r.comments {
            let _ = writeln!(s, "# {c}");
        }
        if let Some(p) = r.scale {
            let _ = writeln!(s, "# scale {}/{}", p.num, p.den);
        }
        s.push_str(&format_matrix(&r.matrix));
    }
    s
}

fn parse_scale(body: &str, line: usize) -> Result<PreScale, MatrixTextError> {
    let err = |msg: &str| MatrixTextError::Parse { line, msg: msg.to_string() };
    let (p, q) = body.split_once('/').ok_or_else(|| err("scale must be written p/q"))?;
    let num: i32 = p.trim().parse().map_err(|_| err("bad scale numerator"))?;
    let den: i32 = q.trim().parse().map_err(|_| err("bad scale denominator"))?;
    if num <= 0 || den <= 0 {
        return Err(err("scale terms must be positive"));
    }
    Ok(PreScale { num, den })
}

pub fn parse_records(text: &str) -> Result<Vec<MatrixRecord>, MatrixTextError> {
    let mut out = Vec::new();
    let mut comments = Vec::new();
    let mut scale = None;
    let mut rows: Vec<Vec<i32>> = Vec::new();
    let mut flush = |comments: &mut Vec<String>, scale: &mut Option<PreScale>, rows: &mut Vec<Vec<i32>>| -> Result<(), MatrixTextError> {
        if !rows.is_empty() {
            out.push(MatrixRecord { comments: std::mem::take(comments), scale: scale.take(), matrix: IntMatrix::from_rows(rows)? });
            rows.clear();
        }
        Ok(())
    };
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            flush(&mut comments, &mut scale, &mut rows)?;
        } else if let Some(c) = line.strip_prefix('#') {
            let c = c.trim();
            if !rows.is_empty() {
                flush(&mut comments, &mut scale, &mut rows)?;
            }
            match c.strip_prefix("scale ") {
                Some(body) => scale = Some(parse_scale(body, k + 1)?),
                None => comments.push(c.to_string()),
            }
        } else {
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<i32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| MatrixTextError::Parse { line: k + 1, msg: e.to_string() })?;
            if rows.first().is_some_and(|r| r.len() != row.len()) {
                return Err(MatrixTextError::Parse { line: k + 1, msg: "ragged row".into() });
            }
            rows.push(row);
        }
    }
    flush(&mut comments, &mut scale, &mut rows)?;
    Ok(out)
}

/// Parse a file that holds exactly one matrix.
pub fn parse_single(text: &str) -> Result<MatrixRecord, MatrixTextError> {
    let mut v = parse_records(text)?;
    match v.len() {
        1 => Ok(v.remove(0)),
        n => Err(MatrixTextError::Parse { line: 0, msg: format!("expected one matrix, found {n}") }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dctlab_core::catalog::{get_entry, t1_matrix};

    #[test]
    fn records_round_trip() {
        let lo = get_entry("LO").unwrap().t;
        let recs = vec![MatrixRecord::new(t1_matrix()).with_comment("id m0"), MatrixRecord::new(lo).with_scale(PreScale { num: 1, den: 2 })];
        let text = format_records(&recs);
        assert!(text.contains("# scale 1/2\n"));
        assert_eq!(parse_records(&text).unwrap(), recs);
    }

    #[test]
    fn unit_scale_is_omitted() {
        let r = MatrixRecord::new(t1_matrix()).with_scale(PreScale::ONE);
        assert!(!format_records(&[r]).contains("scale"));
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_records("1 2\n3 x\n").unwrap_err();
        assert!(matches!(e, MatrixTextError::Parse { line: 2, .. }));
        assert!(parse_records("1 2\n3\n").is_err());
        assert!(parse_records("# scale 0/2\n1\n").is_err());
    }
}
