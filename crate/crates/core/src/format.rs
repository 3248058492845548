//! Text formats: bit-reversed hex measurement strings and the plain matrix format.

use crate::error::{Error, Result};
use crate::matmul::{minimal_width, IntMatrix};

fn reverse_bits(value: u64, width: usize) -> u64 {
    (0..width).fold(0, |r, b| r | (((value >> b) & 1) << (width - 1 - b)))
}

/// Renders a register measurement the way a simulator histogram shows it: the
/// `width`-bit string reversed, then as `0x`-prefixed hex with `ceil(width/4)` digits.
///
/// `format_measurement(10, 12) == "0x500"`: 10 is `000000001010`, reversed
/// `010100000000`.
pub fn format_measurement(value: u64, register_width: usize) -> String {
    assert!(
        (1..=64).contains(&register_width) && (register_width == 64 || value >> register_width == 0),
        "value {value} does not fit in {register_width} bits"
    );
    let digits = register_width.div_ceil(4);
    format!("0x{:0digits$x}", reverse_bits(value, register_width))
}

/// Inverse of [`format_measurement`].
pub fn parse_measurement(text: &str, register_width: usize) -> Result<u64> {
    let hex = text
        .strip_prefix("0x")
        .ok_or_else(|| Error::parse(1, format!("`{text}` lacks a 0x prefix")))?;
    let reversed =
        u64::from_str_radix(hex, 16).map_err(|e| Error::parse(1, format!("bad hex `{text}`: {e}")))?;
    if register_width < 64 && reversed >> register_width != 0 {
        return Err(Error::parse(1, format!("`{text}` exceeds {register_width} bits")));
    }
    Ok(reverse_bits(reversed, register_width))
}

/// Parses the matrix file format: first line `rows cols`, then `rows*cols`
/// whitespace-separated integers in row-major order.
pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let mut tokens = text
        .lines()
        .enumerate()
        .flat_map(|(i, line)| {
            let line = line.split('#').next().unwrap_or("");
            line.split_whitespace().map(move |t| (i + 1, t))
        });
    let mut header = |what: &str| -> Result<usize> {
        let (line, tok) = tokens
            .next()
            .ok_or_else(|| Error::parse(1, format!("missing {what} in header")))?;
        tok.parse()
            .map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))
    };
    let rows = header("row count")?;
    let cols = header("column count")?;
    let mut elements = Vec::with_capacity(rows * cols);
    let mut last_line = 1;
    for (line, tok) in tokens {
        last_line = line;
        elements.push(
            tok.parse::<i64>()
                .map_err(|_| Error::parse(line, format!("bad matrix element `{tok}`")))?,
        );
    }
    if elements.len() != rows * cols {
        return Err(Error::parse(
            last_line,
            format!("expected {} elements for {rows}x{cols}, found {}", rows * cols, elements.len()),
        ));
    }
    let width = minimal_width(&elements);
    IntMatrix::new(rows, cols, elements, width).map_err(|e| Error::parse(1, e.to_string()))
}

/// Parses the inline form `1,2;3,4` (rows split by `;`, elements by `,` or spaces).
pub fn parse_inline_matrix(text: &str) -> Result<IntMatrix> {
    let rows: Vec<Vec<i64>> = text
        .split(';')
        .map(|row| {
            row.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| Error::parse(1, format!("bad matrix element `{t}`")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    IntMatrix::from_rows(&rows).map_err(|e| Error::parse(1, e.to_string()))
}

pub fn write_matrix(m: &IntMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for row in m.to_rows() {
        let cells: Vec<String> = row.iter().map(i64::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}
