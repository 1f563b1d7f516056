//! Plain-text matrix format.
//!
//! A matrix is a header line `rows cols` followed by `rows` lines of exactly
//! `cols` characters from `{0,1}`. A generator file is a sequence of matrices
//! separated by blank lines. Printing then parsing is the identity, and parsing
//! then printing reproduces any file written by [`format_matrix`] byte for byte.

use super::{BitMatrix, BitVector, Gf2Error, Subspace};

pub fn format_matrix(m: &BitMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        out.push_str(&m.row(i).to_bit_string());
        out.push('\n');
    }
    out
}

pub fn format_matrices(ms: &[BitMatrix]) -> String {
    ms.iter().map(format_matrix).collect::<Vec<_>>().join("\n")
}

/// Subspaces are written as their canonical basis matrix (`dim ambient`).
pub fn format_subspace(s: &Subspace) -> String {
    format_matrix(&s.basis_matrix())
}

fn parse_err(line: usize, message: impl Into<String>) -> Gf2Error {
    Gf2Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_block(lines: &[(usize, &str)]) -> Result<BitMatrix, Gf2Error> {
    let (hline, header) = lines[0];
    let mut parts = header.split_whitespace();
    let mut next_num = |what: &str| -> Result<usize, Gf2Error> {
        parts
            .next()
            .ok_or_else(|| parse_err(hline, format!("missing {what} in header")))?
            .parse::<usize>()
            .map_err(|e| parse_err(hline, format!("bad {what}: {e}")))
    };
    let rows = next_num("row count")?;
    let cols = next_num("column count")?;
    if parts.next().is_some() {
        return Err(parse_err(hline, "header must be `rows cols`"));
    }
    if lines.len() != rows + 1 {
        return Err(parse_err(
            hline,
            format!("header announces {rows} rows but {} follow", lines.len() - 1),
        ));
    }
    let mut vs = Vec::with_capacity(rows);
    for &(ln, text) in &lines[1..] {
        let text = text.trim_end();
        if text.len() != cols {
            return Err(parse_err(ln, format!("expected {cols} bits, found {}", text.len())));
        }
        let v: BitVector = text.parse().map_err(|_| parse_err(ln, "row must contain only 0 and 1"))?;
        vs.push(v);
    }
    Ok(BitMatrix::from_rows(cols, &vs))
}

fn blocks(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push((i + 1, line));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<BitMatrix, Gf2Error> {
    let bs = blocks(text);
    match bs.len() {
        1 => parse_block(&bs[0]),
        0 => Err(parse_err(1, "empty input")),
        n => Err(parse_err(bs[1][0].0, format!("expected one matrix, found {n}"))),
    }
}

pub fn parse_matrices(text: &str) -> Result<Vec<BitMatrix>, Gf2Error> {
    blocks(text).iter().map(|b| parse_block(b)).collect()
}

pub fn parse_subspace(text: &str) -> Result<Subspace, Gf2Error> {
    let m = parse_matrix(text)?;
    Ok(Subspace::span(m.cols(), &m.row_vectors()))
}

// Serde goes through the text format, so a matrix in a JSON report is the same
// block a generator file would hold.

impl serde::Serialize for BitMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_matrix(self))
    }
}

impl<'de> serde::Deserialize<'de> for BitMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_matrix(&text).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bit_string())
    }
}

impl<'de> serde::Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_subspace(self))
    }
}

impl<'de> serde::Deserialize<'de> for Subspace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_subspace(&text).map_err(serde::de::Error::custom)
    }
}
