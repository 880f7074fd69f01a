//! graph6 and edge-list text formats.
//!
//! graph6 follows McKay's layout: an order prefix (one byte for `n <= 62`,
//! `~` plus three bytes up to 258047, `~~` plus six bytes beyond) followed by
//! the upper triangle in column order `x(0,1), x(0,2), x(1,2), x(0,3), ...`,
//! packed six bits per byte, zero padded, each byte offset by 63.
//!
//! The edge-list format is `"n m"` on the first line followed by `m` lines
//! `"u v"` with 0-indexed endpoints.

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError { offset, message: message.into() }
    }
}

const HEADER: &str = ">>graph6<<";

pub fn emit_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.push(126);
        out.push(126);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are printable ASCII")
}

/// Parses one graph6 string. A leading `>>graph6<<` header and trailing
/// newline are accepted.
pub fn parse_graph6(text: &str) -> Result<Graph, ParseError> {
    let base = if text.starts_with(HEADER) { HEADER.len() } else { 0 };
    let body = text[base..].trim_end_matches(['\n', '\r']).as_bytes();
    let at = |i: usize| base + i;
    for (i, &b) in body.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(ParseError::new(at(i), format!("byte {b:#04x} outside graph6 range")));
        }
    }
    if body.is_empty() {
        return Err(ParseError::new(at(0), "empty input"));
    }
    let (n, mut pos) = if body[0] != 126 {
        ((body[0] - 63) as usize, 1)
    } else if body.len() >= 2 && body[1] == 126 {
        if body.len() < 8 {
            return Err(ParseError::new(at(body.len()), "truncated order prefix"));
        }
        let n = body[2..8].iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
        (n, 8)
    } else {
        if body.len() < 4 {
            return Err(ParseError::new(at(body.len()), "truncated order prefix"));
        }
        let n = body[1..4].iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
        (n, 4)
    };
    if n == 0 {
        return Err(ParseError::new(at(0), "graph of order 0"));
    }
    let bits = n * (n - 1) / 2;
    let need = bits.div_ceil(6);
    if body.len() - pos != need {
        let offset = if body.len() - pos < need { body.len() } else { pos + need };
        return Err(ParseError::new(
            at(offset),
            format!("expected {need} adjacency bytes, found {}", body.len() - pos),
        ));
    }
    let mut edges = Vec::new();
    let mut k = 0;
    let mut byte = 0u8;
    for j in 1..n {
        for i in 0..j {
            if k % 6 == 0 {
                byte = body[pos] - 63;
                pos += 1;
            }
            if byte >> (5 - k % 6) & 1 == 1 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    if bits % 6 != 0 && (body[pos - 1] - 63) & ((1 << (6 - bits % 6)) - 1) != 0 {
        return Err(ParseError::new(at(pos - 1), "nonzero padding bits"));
    }
    Graph::from_edges(n, edges).map_err(|e| ParseError::new(at(0), e.to_string()))
}

pub fn emit_edgelist(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn parse_edgelist(text: &str) -> Result<Graph, ParseError> {
    let mut offset = 0;
    let mut lines = Vec::new();
    for line in text.split_inclusive('\n') {
        lines.push((offset, line.trim_end_matches(['\n', '\r'])));
        offset += line.len();
    }
    let mut rows = lines.into_iter().filter(|(_, l)| !l.trim().is_empty());
    let (hoff, header) = rows.next().ok_or_else(|| ParseError::new(0, "missing header line"))?;
    let [n, m] = parse_pair(hoff, header)?;
    let mut edges = Vec::with_capacity(m);
    for (off, line) in rows {
        edges.push(parse_pair(off, line).map(|[u, v]| (u, v))?);
        if edges.len() > m {
            return Err(ParseError::new(off, format!("more than {m} edge lines")));
        }
    }
    if edges.len() != m {
        return Err(ParseError::new(text.len(), format!("expected {m} edge lines, found {}", edges.len())));
    }
    Graph::from_edges(n, edges).map_err(|e: GraphError| ParseError::new(hoff, e.to_string()))
}

fn parse_pair(offset: usize, line: &str) -> Result<[usize; 2], ParseError> {
    let mut out = [0usize; 2];
    let mut fields = 0;
    let mut col = 0;
    for tok in line.split_whitespace() {
        let start = line[col..].find(tok).map(|p| p + col).unwrap_or(col);
        col = start + tok.len();
        if fields == 2 {
            return Err(ParseError::new(offset + start, "expected exactly two integers"));
        }
        out[fields] = tok
            .parse()
            .map_err(|_| ParseError::new(offset + start, format!("not a nonnegative integer: {tok:?}")))?;
        fields += 1;
    }
    if fields != 2 {
        return Err(ParseError::new(offset, "expected exactly two integers"));
    }
    Ok(out)
}

/// Sniffs the format from the first non-empty line: two integers means an
/// edge list, anything else is read as graph6.
pub fn parse_any(text: &str) -> Result<Graph, ParseError> {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let toks: Vec<&str> = first.split_whitespace().collect();
    if toks.len() == 2 && toks.iter().all(|t| t.parse::<usize>().is_ok()) {
        parse_edgelist(text)
    } else {
        let start = text.len() - text.trim_start().len();
        parse_graph6(first.trim()).map_err(|e| ParseError::new(e.offset + start, e.message))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k1_is_at_sign() {
        assert_eq!(emit_graph6(&Graph::complete(1).unwrap()), "@");
        assert_eq!(parse_graph6("@").unwrap(), Graph::complete(1).unwrap());
    }

    #[test]
    fn known_strings() {
        // A-C, A-E, B-D, D-E on five vertices
        let g = Graph::from_edges(5, [(0, 2), (0, 4), (1, 3), (3, 4)]).unwrap();
        assert_eq!(emit_graph6(&g), "DQc");
        assert_eq!(emit_graph6(&Graph::complete(4).unwrap()), "C~");
        assert_eq!(emit_graph6(&Graph::path(3).unwrap()), "Bg");
        assert_eq!(parse_graph6(">>graph6<<DQc\n").unwrap(), g);
    }

    #[test]
    fn long_order_prefix() {
        let g = Graph::complete(63).unwrap();
        let s = emit_graph6(&g);
        assert_eq!(&s.as_bytes()[..4], &[126, 63, 63, 126]);
        assert_eq!(parse_graph6(&s).unwrap(), g);
        let big = Graph::path(300).unwrap();
        assert_eq!(parse_graph6(&emit_graph6(&big)).unwrap(), big);
    }

    #[test]
    fn graph6_errors_carry_offsets() {
        assert_eq!(parse_graph6("D Q").unwrap_err().offset, 1);
        assert_eq!(parse_graph6("DQ").unwrap_err().offset, 2);
        assert_eq!(parse_graph6("DQcc").unwrap_err().offset, 3);
        assert_eq!(parse_graph6(">>graph6<<D!c").unwrap_err().offset, 11);
        // P_3 with a padding bit set
        assert!(parse_graph6("Bh").unwrap_err().message.contains("padding"));
    }

    #[test]
    fn edgelist() {
        let g = parse_edgelist("3 2\n0 1\n1 2").unwrap();
        assert_eq!(g, Graph::path(3).unwrap());
        assert_eq!(parse_edgelist(&emit_edgelist(&g)).unwrap(), g);
        let err = parse_edgelist("3 2\n0 1\n1 x\n").unwrap_err();
        assert_eq!(err.offset, 10);
        assert!(parse_edgelist("3 2\n0 1\n").is_err());
        assert!(parse_edgelist("3 1\n0 0\n").is_err());
    }

    #[test]
    fn sniffing() {
        assert_eq!(parse_any("3 2\n0 1\n1 2\n").unwrap(), Graph::path(3).unwrap());
        assert_eq!(parse_any("Bg\n").unwrap(), Graph::path(3).unwrap());
    }
}
