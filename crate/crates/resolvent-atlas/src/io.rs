//! Text formats: matrix files, complex/spectrum literals, and grid specs.
//!
//! * Complex matrices travel as JSON objects
//!   `{"rows": 2, "cols": 2, "entries": [[re, im], ...]}` with entries in
//!   row-major order.
//! * Real matrices may use a bare CSV of numbers, one row per line.
//! * Complex literals use the shell-friendly `a+bi` form (`0.5`, `-0.2i`,
//!   `0.3+0.2i`, `i`); spectra are comma-separated lists of them.
//! * Evaluation grids are `circle:RADIUS:COUNT`, `segment:FROM:TO:COUNT`
//!   (complex endpoints), or `list:z1,z2,...`.
//!
//! These parsers face untrusted input, so they never panic: every failure
//! comes back as a structured [`ParseError`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::Spectrum;
use crate::error::{ParseError, Result};
use crate::matrix::ComplexMatrix;

/// Hard cap on grid sizes accepted from grid specs.
pub const MAX_GRID_POINTS: usize = 100_000;

/// Serialized form of a complex matrix: row-major `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

/// Parses the JSON matrix format.
pub fn parse_matrix_json(text: &str) -> Result<ComplexMatrix> {
    let decoded: MatrixJson = serde_json::from_str(text).map_err(|e| ParseError::MatrixJson {
        message: e.to_string(),
    })?;
    if decoded.entries.len() != decoded.rows * decoded.cols {
        return Err(ParseError::MatrixJson {
            message: format!(
                "{}x{} matrix needs {} entries, got {}",
                decoded.rows,
                decoded.cols,
                decoded.rows.saturating_mul(decoded.cols),
                decoded.entries.len()
            ),
        }
        .into());
    }
    let entries: Vec<Complex64> = decoded
        .entries
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect();
    ComplexMatrix::new(decoded.rows, decoded.cols, entries)
}

/// Writes a matrix in the JSON format accepted by [`parse_matrix_json`].
pub fn write_matrix_json(m: &ComplexMatrix) -> String {
    let body = MatrixJson {
        rows: m.rows(),
        cols: m.cols(),
        entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string(&body).expect("plain struct serializes")
}

/// Parses a real matrix from CSV text: one row per non-empty line,
/// comma-separated numeric fields, every row the same width.
pub fn parse_matrix_csv(text: &str) -> Result<ComplexMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in trimmed.split(',') {
            let value: f64 = field.trim().parse().map_err(|_| ParseError::Csv {
                line: line_no,
                message: format!("bad numeric field {:?}", field.trim()),
            })?;
            if !value.is_finite() {
                return Err(ParseError::Csv {
                    line: line_no,
                    message: format!("non-finite field {:?}", field.trim()),
                }
                .into());
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(ParseError::Csv {
                    line: line_no,
                    message: format!("expected {} fields, got {}", first.len(), row.len()),
                }
                .into());
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ParseError::Csv {
            line: 0,
            message: "no data rows".to_string(),
        }
        .into());
    }
    let cols = rows[0].len();
    let entries: Vec<Complex64> = rows
        .iter()
        .flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)))
        .collect();
    ComplexMatrix::new(rows.len(), cols, entries)
}

fn complex_error(text: &str, message: impl Into<String>) -> ParseError {
    ParseError::ComplexLiteral {
        text: text.to_string(),
        message: message.into(),
    }
}

fn parse_real_part(text: &str, original: &str) -> Result<f64, ParseError> {
    text.parse::<f64>()
        .map_err(|_| complex_error(original, format!("bad real component {text:?}")))
        .and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(complex_error(original, "component overflows f64"))
            }
        })
}

/// Parses a complex literal: `a`, `bi`, `a+bi`, `a-bi`, with `i` accepted
/// for a unit imaginary coefficient (`i`, `-i`, `3+i`). Whitespace is
/// ignored; components use ordinary float syntax including exponents.
pub fn parse_complex(text: &str) -> Result<Complex64, ParseError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(complex_error(text, "empty literal"));
    }
    if !compact.ends_with(['i', 'I']) {
        return Ok(Complex64::new(parse_real_part(&compact, text)?, 0.0));
    }
    let body = &compact[..compact.len() - 1];
    // Find the sign separating real and imaginary components: the last
    // '+'/'-' that is neither leading nor part of an exponent.
    let split = body
        .char_indices()
        .rev()
        .find(|(pos, c)| {
            matches!(c, '+' | '-')
                && *pos > 0
                && !matches!(body.as_bytes()[pos - 1], b'e' | b'E')
        })
        .map(|(pos, _)| pos);
    let (real_text, imag_text) = match split {
        Some(pos) => (&body[..pos], &body[pos..]),
        None => ("", body),
    };
    let real = if real_text.is_empty() {
        0.0
    } else {
        parse_real_part(real_text, text)?
    };
    let imag = match imag_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real_part(other, text)?,
    };
    Ok(Complex64::new(real, imag))
}

/// Canonical `a+bi` rendering that [`parse_complex`] round-trips exactly
/// (components print in shortest round-trip form).
pub fn format_complex(z: Complex64) -> String {
    if z.im >= 0.0 || z.im.is_nan() {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}{}i", z.re, z.im)
    }
}

/// Parses a comma-separated list of complex literals into a [`Spectrum`]
/// (so the unit-disk margin is enforced on the way in).
pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    if text.trim().is_empty() {
        return Err(ParseError::SpectrumLiteral {
            message: "empty spectrum literal".to_string(),
        }
        .into());
    }
    let points: Vec<Complex64> = text
        .split(',')
        .map(|field| {
            parse_complex(field).map_err(|e| ParseError::SpectrumLiteral {
                message: e.to_string(),
            })
        })
        .collect::<Result<_, _>>()?;
    Spectrum::new(points)
}

/// An evaluation grid for resolvent sweeps.
#[derive(Clone, Debug, PartialEq)]
pub enum GridSpec {
    /// `count` equally spaced points on the circle of the given radius.
    Circle { radius: f64, count: usize },
    /// `count` equally spaced points on the segment `[from, to]`, endpoints
    /// included (a single point degenerates to `from`).
    Segment {
        from: Complex64,
        to: Complex64,
        count: usize,
    },
    /// Explicit list of points.
    List(Vec<Complex64>),
}

impl GridSpec {
    /// Materializes the grid points in deterministic order.
    pub fn points(&self) -> Vec<Complex64> {
        match self {
            GridSpec::Circle { radius, count } => (0..*count)
                .map(|k| {
                    Complex64::from_polar(
                        *radius,
                        std::f64::consts::TAU * k as f64 / *count as f64,
                    )
                })
                .collect(),
            GridSpec::Segment { from, to, count } => {
                if *count == 1 {
                    return vec![*from];
                }
                (0..*count)
                    .map(|k| {
                        let t = k as f64 / (*count as f64 - 1.0);
                        from + (to - from) * t
                    })
                    .collect()
            }
            GridSpec::List(points) => points.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GridSpec::Circle { count, .. } | GridSpec::Segment { count, .. } => *count,
            GridSpec::List(points) => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn grid_error(text: &str, message: impl Into<String>) -> ParseError {
    ParseError::GridSpec {
        text: text.to_string(),
        message: message.into(),
    }
}

fn parse_grid_count(field: &str, original: &str) -> Result<usize, ParseError> {
    let count: usize = field
        .trim()
        .parse()
        .map_err(|_| grid_error(original, format!("bad point count {:?}", field.trim())))?;
    if count == 0 {
        return Err(grid_error(original, "grid must contain at least one point"));
    }
    if count > MAX_GRID_POINTS {
        return Err(grid_error(
            original,
            format!("point count {count} exceeds the cap of {MAX_GRID_POINTS}"),
        ));
    }
    Ok(count)
}

/// Parses a grid spec: `circle:RADIUS:COUNT`, `segment:FROM:TO:COUNT`, or
/// `list:z1,z2,...`.
pub fn parse_grid(text: &str) -> Result<GridSpec, ParseError> {
    let trimmed = text.trim();
    if let Some(rest) = trimmed.strip_prefix("circle:") {
        let mut parts = rest.split(':');
        let (radius_text, count_text) = match (parts.next(), parts.next(), parts.next()) {
            (Some(r), Some(c), None) => (r, c),
            _ => return Err(grid_error(text, "expected circle:RADIUS:COUNT")),
        };
        let radius: f64 = radius_text
            .trim()
            .parse()
            .map_err(|_| grid_error(text, format!("bad radius {:?}", radius_text.trim())))?;
        if !radius.is_finite() || radius <= 0.0 {
            return Err(grid_error(text, "radius must be positive and finite"));
        }
        let count = parse_grid_count(count_text, text)?;
        Ok(GridSpec::Circle { radius, count })
    } else if let Some(rest) = trimmed.strip_prefix("segment:") {
        let mut parts = rest.split(':');
        let (from_text, to_text, count_text) =
            match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(f), Some(t), Some(c), None) => (f, t, c),
                _ => return Err(grid_error(text, "expected segment:FROM:TO:COUNT")),
            };
        let from = parse_complex(from_text).map_err(|e| grid_error(text, e.to_string()))?;
        let to = parse_complex(to_text).map_err(|e| grid_error(text, e.to_string()))?;
        let count = parse_grid_count(count_text, text)?;
        Ok(GridSpec::Segment { from, to, count })
    } else if let Some(rest) = trimmed.strip_prefix("list:") {
        let points: Vec<Complex64> = rest
            .split(',')
            .map(|field| parse_complex(field).map_err(|e| grid_error(text, e.to_string())))
            .collect::<Result<_, _>>()?;
        if points.is_empty() {
            return Err(grid_error(text, "list grid must contain at least one point"));
        }
        if points.len() > MAX_GRID_POINTS {
            return Err(grid_error(
                text,
                format!("{} points exceed the cap of {MAX_GRID_POINTS}", points.len()),
            ));
        }
        Ok(GridSpec::List(points))
    } else {
        Err(grid_error(
            text,
            "expected circle:RADIUS:COUNT, segment:FROM:TO:COUNT, or list:z1,z2,...",
        ))
    }
}
