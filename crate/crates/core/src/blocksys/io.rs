//! Matrix Market coordinate files and plain `re im` vector files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::numkernel::{ComplexMatrix, ComplexVector};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Complex,
    Real,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

/// Parses a square matrix in Matrix Market `coordinate` format.
///
/// Entries are `i j re im` with 1-based indices (`i j value` for `real` and
/// `integer` fields). Symmetric, skew-symmetric and Hermitian storage is
/// expanded to the full matrix. Duplicate entries are summed.
pub fn parse_matrix_market(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse(format!(
            "bad Matrix Market header: {header:?}"
        )));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Parse(format!(
            "unsupported format {:?}; only coordinate",
            tokens[2]
        )));
    }
    let field = match tokens[3].as_str() {
        "complex" => Field::Complex,
        "real" => Field::Real,
        "integer" => Field::Integer,
        other => return Err(Error::Parse(format!("unsupported field {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(Error::Parse(format!("unsupported symmetry {other:?}"))),
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (lno, size_line) = data
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))?;
    let sizes = parse_numbers::<usize>(size_line, lno)?;
    let [rows, cols, nnz] = sizes[..] else {
        return Err(Error::Parse(format!(
            "line {}: size line needs 3 integers",
            lno + 1
        )));
    };
    if rows != cols || rows == 0 {
        return Err(Error::Parse(format!(
            "matrix must be square and nonempty, got {rows}x{cols}"
        )));
    }

    let mut m = ComplexMatrix::zeros(rows);
    let mut count = 0;
    for (lno, line) in data {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let want = if field == Field::Complex { 4 } else { 3 };
        if parts.len() != want {
            return Err(Error::Parse(format!(
                "line {}: expected {want} fields, got {}",
                lno + 1,
                parts.len()
            )));
        }
        let idx = |s: &str| -> Result<usize> {
            let v: usize = s
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad index {s:?}", lno + 1)))?;
            if v == 0 || v > rows {
                return Err(Error::Parse(format!(
                    "line {}: index {v} out of range 1..={rows}",
                    lno + 1
                )));
            }
            Ok(v - 1)
        };
        let (i, j) = (idx(parts[0])?, idx(parts[1])?);
        let re = parse_f64(parts[2], lno)?;
        let im = if field == Field::Complex {
            parse_f64(parts[3], lno)?
        } else {
            0.0
        };
        let v = C64::new(re, im);
        m[(i, j)] += v;
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => m[(j, i)] += v,
                Symmetry::SkewSymmetric => m[(j, i)] -= v,
                Symmetry::Hermitian => m[(j, i)] += v.conj(),
            }
        } else if symmetry == Symmetry::SkewSymmetric && v != C64::new(0.0, 0.0) {
            return Err(Error::Parse(format!(
                "line {}: skew-symmetric diagonal must be zero",
                lno + 1
            )));
        }
        count += 1;
    }
    if count != nnz {
        return Err(Error::Parse(format!(
            "expected {nnz} entries, found {count}"
        )));
    }
    if !m.is_finite() {
        return Err(Error::Parse("matrix has non-finite entries".into()));
    }
    Ok(m)
}

pub fn read_matrix_market(path: &Path) -> Result<ComplexMatrix> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix_market(&text)
}

/// Writes the nonzero entries in `coordinate complex general` format.
pub fn format_matrix_market(m: &ComplexMatrix) -> String {
    let n = m.dim();
    let entries: Vec<(usize, usize, C64)> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .map(|(i, j)| (i, j, m[(i, j)]))
        .filter(|&(_, _, v)| v != C64::new(0.0, 0.0))
        .collect();
    let mut out = String::from("%%MatrixMarket matrix coordinate complex general\n");
    let _ = writeln!(out, "{n} {n} {}", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im);
    }
    out
}

/// Parses one entry per line, `re im` or just `re`. Blank lines and lines
/// starting with `%` or `#` are skipped.
pub fn parse_vector(text: &str) -> Result<ComplexVector> {
    let mut out = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        let nums = parse_numbers::<f64>(t, lno)?;
        match nums[..] {
            [re] => out.push(C64::new(re, 0.0)),
            [re, im] => out.push(C64::new(re, im)),
            _ => return Err(Error::Parse(format!("line {}: expected `re im`", lno + 1))),
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("vector file has no entries".into()));
    }
    let v = ComplexVector::from(out);
    if !v.is_finite() {
        return Err(Error::Parse("vector has non-finite entries".into()));
    }
    Ok(v)
}

pub fn read_vector(path: &Path) -> Result<ComplexVector> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_vector(&text)
}

pub fn format_vector(v: &[C64]) -> String {
    v.iter()
        .map(|z| format!("{:e} {:e}\n", z.re, z.im))
        .collect()
}

fn parse_f64(s: &str, lno: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {}: bad number {s:?}", lno + 1)))
}

fn parse_numbers<T: std::str::FromStr>(line: &str, lno: usize) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Parse(format!("line {}: bad number {s:?}", lno + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_general() {
        let text = "%%MatrixMarket matrix coordinate complex general\n% comment\n2 2 3\n1 1 0.5 0\n1 2 0 -0.25\n2 2 -1e-1 0.2\n";
        let m = parse_matrix_market(text).unwrap();
        assert_eq!(m[(0, 0)], C64::new(0.5, 0.0));
        assert_eq!(m[(0, 1)], C64::new(0.0, -0.25));
        assert_eq!(m[(1, 0)], C64::new(0.0, 0.0));
        assert_eq!(m[(1, 1)], C64::new(-0.1, 0.2));
    }

    #[test]
    fn hermitian_expansion() {
        let text =
            "%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 1 0\n2 1 0.5 0.5\n";
        let m = parse_matrix_market(text).unwrap();
        assert_eq!(m[(1, 0)], C64::new(0.5, 0.5));
        assert_eq!(m[(0, 1)], C64::new(0.5, -0.5));
        assert!(m.is_hermitian(0.0));
    }

    #[test]
    fn symmetric_real() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n3 3 2\n2 1 0.3\n3 3 1\n";
        let m = parse_matrix_market(text).unwrap();
        assert_eq!(m[(0, 1)], C64::new(0.3, 0.0));
        assert_eq!(m[(1, 0)], C64::new(0.3, 0.0));
    }

    #[test]
    fn malformed_inputs() {
        for bad in [
            "",
            "%%MatrixMarket matrix array complex general\n2 2\n",
            "%%MatrixMarket matrix coordinate complex general\n2 3 0\n",
            "%%MatrixMarket matrix coordinate complex general\n2 2 1\n3 1 1 0\n",
            "%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 1 1\n",
            "%%MatrixMarket matrix coordinate complex general\n2 2 2\n1 1 1 0\n",
            "%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 1 x 0\n",
        ] {
            assert!(
                matches!(parse_matrix_market(bad), Err(Error::Parse(_))),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn matrix_text_round_trip() {
        let m = ComplexMatrix::from_fn(3, |i, j| {
            if (i + j) % 2 == 0 {
                C64::new(0.1 * i as f64 + 0.3, -0.7 * j as f64)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert_eq!(parse_matrix_market(&format_matrix_market(&m)).unwrap(), m);
    }

    #[test]
    fn vectors() {
        let v = parse_vector("# b\n1 0\n\n0.5 -0.5\n2\n").unwrap();
        assert_eq!(
            &v[..],
            &[C64::new(1.0, 0.0), C64::new(0.5, -0.5), C64::new(2.0, 0.0)]
        );
        assert_eq!(parse_vector(&format_vector(&v)).unwrap(), v);
        assert!(parse_vector("1 2 3\n").is_err());
        assert!(parse_vector("\n").is_err());
    }
}
