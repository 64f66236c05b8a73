//! Matrix Market reader and writer for square matrices and vectors.
//!
//! Supported headers: `%%MatrixMarket matrix {coordinate|array}
//! {real|integer|complex|pattern} {general|symmetric|skew-symmetric|hermitian}`
//! (`pattern` only with `coordinate`). Duplicate coordinate entries are
//! rejected rather than summed. The writer emits `coordinate` with Rust's
//! shortest round-trip float formatting, so write-then-read is exact.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::ParseError;
use crate::matrix::{ComplexMatrix, ZERO};

/// Largest order accepted, to keep hostile headers from allocating unboundedly.
pub const MAX_ORDER: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
    Hermitian,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column, message: message.into() }
    }
}

fn tokens(line: &str, number: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (pos, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token { text: &line[s..pos], line: number, column: line[..s].chars().count() + 1 });
                start = None;
            }
            (false, None) => start = Some(pos),
            _ => {}
        }
    }
    out
}

struct Header {
    format: Format,
    field: Field,
    symmetry: Symmetry,
}

fn parse_header(line: &str) -> Result<Header, ParseError> {
    let toks = tokens(line, 1);
    let err = |col: usize, msg: &str| ParseError { line: 1, column: col, message: msg.into() };
    if toks.is_empty() || !toks[0].text.eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(err(1, "expected `%%MatrixMarket` banner"));
    }
    if toks.len() != 5 {
        let col = toks.get(toks.len().min(4)).map_or(line.chars().count() + 1, |t| t.column);
        return Err(err(col, "banner needs: matrix <format> <field> <symmetry>"));
    }
    if !toks[1].text.eq_ignore_ascii_case("matrix") {
        return Err(toks[1].error("only `matrix` objects are supported"));
    }
    let format = match toks[2].text.to_ascii_lowercase().as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        _ => return Err(toks[2].error("format must be `coordinate` or `array`")),
    };
    let field = match toks[3].text.to_ascii_lowercase().as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" if format == Format::Coordinate => Field::Pattern,
        _ => return Err(toks[3].error("field must be real, integer, complex or pattern")),
    };
    let symmetry = match toks[4].text.to_ascii_lowercase().as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        "hermitian" if field == Field::Complex => Symmetry::Hermitian,
        _ => {
            return Err(toks[4].error("symmetry must be general, symmetric, skew-symmetric or hermitian (complex only)"))
        }
    };
    Ok(Header { format, field, symmetry })
}

/// Data tokens after the banner, skipping comments and blank lines.
fn data_lines(text: &str) -> impl Iterator<Item = Vec<Token<'_>>> {
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim_start().starts_with('%'))
        .map(|(i, l)| tokens(l, i + 1))
        .filter(|t| !t.is_empty())
}

fn parse_float(t: &Token<'_>) -> Result<f64, ParseError> {
    let v: f64 = t.text.parse().map_err(|_| t.error(format!("`{}` is not a number", t.text)))?;
    if !v.is_finite() {
        return Err(t.error("value is not finite"));
    }
    Ok(v)
}

fn parse_index(t: &Token<'_>, bound: usize) -> Result<usize, ParseError> {
    let v: usize = t.text.parse().map_err(|_| t.error(format!("`{}` is not an index", t.text)))?;
    if v == 0 || v > bound {
        return Err(t.error(format!("index {v} outside 1..={bound}")));
    }
    Ok(v - 1)
}

fn parse_value(field: Field, toks: &[Token<'_>], line_end: usize, line: usize) -> Result<Complex64, ParseError> {
    let need = match field {
        Field::Pattern => 0,
        Field::Real | Field::Integer => 1,
        Field::Complex => 2,
    };
    if toks.len() != need {
        let column = toks.get(need).map_or(line_end, |t| t.column);
        return Err(ParseError {
            line,
            column,
            message: format!("expected {need} value token(s), found {}", toks.len()),
        });
    }
    match field {
        Field::Pattern => Ok(Complex64::new(1.0, 0.0)),
        Field::Integer => {
            let t = &toks[0];
            let v: i64 = t.text.parse().map_err(|_| t.error(format!("`{}` is not an integer", t.text)))?;
            Ok(Complex64::new(v as f64, 0.0))
        }
        Field::Real => Ok(Complex64::new(parse_float(&toks[0])?, 0.0)),
        Field::Complex => Ok(Complex64::new(parse_float(&toks[0])?, parse_float(&toks[1])?)),
    }
}

fn end_column(toks: &[Token<'_>]) -> usize {
    toks.last().map_or(1, |t| t.column + t.text.chars().count())
}

/// Row, column, value, and the 1-based line and column it came from.
type RawEntry = (usize, usize, Complex64, usize, usize);

fn parse_raw(text: &str) -> Result<(Header, usize, usize, Vec<RawEntry>), ParseError> {
    let first = text.lines().next().ok_or(ParseError { line: 1, column: 1, message: "empty input".into() })?;
    let header = parse_header(first)?;
    let mut lines = data_lines(text);
    let size = lines.next().ok_or(ParseError {
        line: text.lines().count().max(1),
        column: 1,
        message: "missing size line".into(),
    })?;
    let want = if header.format == Format::Coordinate { 3 } else { 2 };
    if size.len() != want {
        let column = size.get(want).map_or(end_column(&size), |t| t.column);
        return Err(ParseError { line: size[0].line, column, message: format!("size line needs {want} integers") });
    }
    let dim = |t: &Token<'_>| -> Result<usize, ParseError> {
        let v: usize = t.text.parse().map_err(|_| t.error(format!("`{}` is not a size", t.text)))?;
        if v == 0 || v > MAX_ORDER {
            return Err(t.error(format!("size {v} outside 1..={MAX_ORDER}")));
        }
        Ok(v)
    };
    let rows = dim(&size[0])?;
    let cols = dim(&size[1])?;
    if header.symmetry != Symmetry::General && rows != cols {
        return Err(size[1].error("symmetric storage needs a square matrix"));
    }
    let mut out = Vec::new();
    match header.format {
        Format::Coordinate => {
            let nnz: usize = size[2].text.parse().map_err(|_| size[2].error("bad entry count"))?;
            if nnz > rows * cols {
                return Err(size[2].error(format!("{nnz} entries cannot fit a {rows}x{cols} matrix")));
            }
            for _ in 0..nnz {
                let toks = lines.next().ok_or(ParseError {
                    line: text.lines().count() + 1,
                    column: 1,
                    message: format!("expected {nnz} entries"),
                })?;
                if toks.len() < 2 {
                    return Err(ParseError {
                        line: toks[0].line,
                        column: end_column(&toks),
                        message: "entry needs row and column".into(),
                    });
                }
                let i = parse_index(&toks[0], rows)?;
                let j = parse_index(&toks[1], cols)?;
                let v = parse_value(header.field, &toks[2..], end_column(&toks), toks[0].line)?;
                out.push((i, j, v, toks[0].line, toks[0].column));
            }
        }
        Format::Array => {
            let mut coords = Vec::new();
            for j in 0..cols {
                let start = match header.symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric | Symmetry::Hermitian => j,
                    Symmetry::Skew => j + 1,
                };
                for i in start..rows {
                    coords.push((i, j));
                }
            }
            for (i, j) in coords {
                let toks = lines.next().ok_or(ParseError {
                    line: text.lines().count() + 1,
                    column: 1,
                    message: "too few array entries".into(),
                })?;
                let v = parse_value(header.field, &toks, end_column(&toks), toks[0].line)?;
                out.push((i, j, v, toks[0].line, toks[0].column));
            }
        }
    }
    if let Some(extra) = lines.next() {
        return Err(extra[0].error("unexpected data after the last entry"));
    }
    Ok((header, rows, cols, out))
}

fn place(
    dense: &mut [Option<Complex64>],
    n_cols: usize,
    i: usize,
    j: usize,
    v: Complex64,
    at: (usize, usize),
) -> Result<(), ParseError> {
    let slot = &mut dense[i * n_cols + j];
    if slot.is_some() {
        return Err(ParseError {
            line: at.0,
            column: at.1,
            message: format!("duplicate entry ({}, {})", i + 1, j + 1),
        });
    }
    *slot = Some(v);
    Ok(())
}

fn expand(
    header: &Header,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Complex64, usize, usize)>,
) -> Result<Vec<Complex64>, ParseError> {
    let mut dense: Vec<Option<Complex64>> = vec![None; rows * cols];
    for (i, j, v, line, column) in entries {
        let at = (line, column);
        match header.symmetry {
            Symmetry::General => place(&mut dense, cols, i, j, v, at)?,
            sym => {
                if j > i || (sym == Symmetry::Skew && i == j) {
                    return Err(ParseError {
                        line,
                        column,
                        message: "symmetric storage lists the lower triangle only".into(),
                    });
                }
                if i == j && sym == Symmetry::Hermitian && v.im != 0.0 {
                    return Err(ParseError { line, column, message: "hermitian diagonal must be real".into() });
                }
                place(&mut dense, cols, i, j, v, at)?;
                if i != j {
                    let mirror = match sym {
                        Symmetry::Symmetric => v,
                        Symmetry::Skew => -v,
                        _ => v.conj(),
                    };
                    place(&mut dense, cols, j, i, mirror, at)?;
                }
            }
        }
    }
    Ok(dense.into_iter().map(|z| z.unwrap_or(ZERO)).collect())
}

/// Parses a square matrix.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, ParseError> {
    let (header, rows, cols, entries) = parse_raw(text)?;
    if rows != cols {
        return Err(ParseError { line: 2, column: 1, message: format!("matrix must be square, got {rows}x{cols}") });
    }
    let data = expand(&header, rows, cols, entries)?;
    ComplexMatrix::new(rows, data).map_err(|e| ParseError { line: 2, column: 1, message: e.to_string() })
}

/// Parses an `n x 1` (or `1 x n`) matrix as a vector.
pub fn parse_vector(text: &str) -> Result<Vec<Complex64>, ParseError> {
    let (header, rows, cols, entries) = parse_raw(text)?;
    if rows != 1 && cols != 1 {
        return Err(ParseError { line: 2, column: 1, message: format!("vector must be n x 1, got {rows}x{cols}") });
    }
    if header.symmetry != Symmetry::General && rows * cols > 1 {
        return Err(ParseError { line: 1, column: 1, message: "vectors use general storage".into() });
    }
    expand(&header, rows, cols, entries)
}

/// Coordinate format, real when every entry is real, nonzeros only.
pub fn write_matrix(a: &ComplexMatrix) -> String {
    let n = a.order();
    let real = a.is_real();
    let mut entries = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if !a.is_structural_zero(i, j) {
                entries.push((i, j, a[(i, j)]));
            }
        }
    }
    let mut s = String::new();
    let field = if real { "real" } else { "complex" };
    let _ = writeln!(s, "%%MatrixMarket matrix coordinate {field} general");
    let _ = writeln!(s, "{n} {n} {}", entries.len());
    for (i, j, z) in entries {
        if real {
            let _ = writeln!(s, "{} {} {}", i + 1, j + 1, z.re);
        } else {
            let _ = writeln!(s, "{} {} {} {}", i + 1, j + 1, z.re, z.im);
        }
    }
    s
}

/// Dense `n x 1` array.
pub fn write_vector(x: &[Complex64]) -> String {
    let real = x.iter().all(|z| z.im == 0.0);
    let mut s = String::new();
    let field = if real { "real" } else { "complex" };
    let _ = writeln!(s, "%%MatrixMarket matrix array {field} general");
    let _ = writeln!(s, "{} 1", x.len());
    for z in x {
        if real {
            let _ = writeln!(s, "{}", z.re);
        } else {
            let _ = writeln!(s, "{} {}", z.re, z.im);
        }
    }
    s
}
