//! The line-oriented IFS text format.
//!
//! ```text
//! # comment
//! ifs dim=2 kind=affine
//! map
//! 0 -1
//! 1 0
//! t 1 0
//! ```
//!
//! Every map is a `map` line followed by `dim` rows of `dim` reals; affine
//! systems add a `t` row with the translation. Numbers are written in their
//! shortest round-trip form, so `parse(serialize(f)) == f` bit for bit.

use std::fmt::{self, Write as _};

use ifs_spectral_core::{AffineMap, IfsKind, IfsSystem, Matrix, Vector};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

struct Header {
    dim: usize,
    kind: IfsKind,
}

fn parse_header(line: usize, words: &[&str]) -> Result<Header, ParseError> {
    let mut dim = None;
    let mut kind = None;
    for w in &words[1..] {
        match w.split_once('=') {
            Some(("dim", v)) => {
                let n: usize = v.parse().map_err(|_| err(line, format!("bad dimension `{v}`")))?;
                if n == 0 {
                    return Err(err(line, "dimension must be positive"));
                }
                dim = Some(n);
            }
            Some(("kind", "linear")) => kind = Some(IfsKind::Linear),
            Some(("kind", "affine")) => kind = Some(IfsKind::Affine),
            Some(("kind", v)) => return Err(err(line, format!("unknown kind `{v}`"))),
            _ => return Err(err(line, format!("unexpected header field `{w}`"))),
        }
    }
    Ok(Header {
        dim: dim.ok_or_else(|| err(line, "header needs dim=<n>"))?,
        kind: kind.ok_or_else(|| err(line, "header needs kind=<linear|affine>"))?,
    })
}

fn parse_reals(line: usize, words: &[&str]) -> Result<Vec<f64>, ParseError> {
    words
        .iter()
        .map(|w| match w.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(err(line, format!("`{w}` is not a finite real"))),
        })
        .collect()
}

#[derive(Default)]
struct Pending {
    start: usize,
    rows: Vec<f64>,
    n_rows: usize,
    translation: Option<Vec<f64>>,
}

pub fn parse_ifs(text: &str) -> Result<IfsSystem, ParseError> {
    let mut header: Option<Header> = None;
    let mut maps = Vec::new();
    let mut cur: Option<Pending> = None;
    let mut last_line = 0;

    let finish = |p: Pending, h: &Header, maps: &mut Vec<AffineMap>| -> Result<(), ParseError> {
        if p.n_rows != h.dim {
            return Err(err(p.start, format!("map has {} rows, expected {}", p.n_rows, h.dim)));
        }
        if h.kind == IfsKind::Affine && p.translation.is_none() {
            return Err(err(p.start, "affine map needs a `t` row"));
        }
        let linear = Matrix::from_row_major(h.dim, p.rows).map_err(|e| err(p.start, e.to_string()))?;
        let t = Vector::new(p.translation.unwrap_or_else(|| vec![0.0; h.dim]));
        maps.push(AffineMap::new(linear, t).map_err(|e| err(p.start, e.to_string()))?);
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some(&first) = words.first() else { continue };
        let Some(h) = header.as_ref() else {
            if first != "ifs" {
                return Err(err(line, "expected header `ifs dim=<n> kind=<linear|affine>`"));
            }
            header = Some(parse_header(line, &words)?);
            continue;
        };
        match first {
            "ifs" => return Err(err(line, "duplicate header")),
            "map" => {
                if words.len() > 1 {
                    return Err(err(line, "`map` takes no arguments"));
                }
                if let Some(p) = cur.take() {
                    finish(p, h, &mut maps)?;
                }
                cur = Some(Pending {
                    start: line,
                    ..Pending::default()
                });
            }
            "t" => {
                let p = cur.as_mut().ok_or_else(|| err(line, "translation outside a map"))?;
                if h.kind == IfsKind::Linear {
                    return Err(err(line, "translation row in a linear system"));
                }
                if p.translation.is_some() {
                    return Err(err(line, "second translation row"));
                }
                if p.n_rows != h.dim {
                    return Err(err(line, "translation must follow the matrix rows"));
                }
                let t = parse_reals(line, &words[1..])?;
                if t.len() != h.dim {
                    return Err(err(line, format!("translation has {} entries, expected {}", t.len(), h.dim)));
                }
                p.translation = Some(t);
            }
            _ => {
                let p = cur.as_mut().ok_or_else(|| err(line, "matrix row outside a map"))?;
                let row = parse_reals(line, &words)?;
                if row.len() != h.dim {
                    return Err(err(line, format!("row has {} entries, expected {}", row.len(), h.dim)));
                }
                if p.n_rows == h.dim {
                    return Err(err(line, format!("map has more than {} rows", h.dim)));
                }
                p.rows.extend(row);
                p.n_rows += 1;
            }
        }
    }
    let h = header.ok_or_else(|| err(last_line.max(1), "missing header"))?;
    if let Some(p) = cur.take() {
        finish(p, &h, &mut maps)?;
    }
    if maps.is_empty() {
        return Err(err(last_line.max(1), "no maps"));
    }
    IfsSystem::new(h.dim, maps, h.kind).map_err(|e| err(last_line, e.to_string()))
}

/// Shortest decimal that parses back to the same `f64`.
pub fn real(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn serialize_ifs(f: &IfsSystem) -> String {
    let mut s = String::new();
    writeln!(s, "ifs dim={} kind={}", f.dim(), f.kind().as_str()).unwrap();
    for m in f.maps() {
        s.push_str("map\n");
        for i in 0..f.dim() {
            let row: Vec<String> = m.linear.row(i).iter().map(|&x| real(x)).collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
        if f.kind() == IfsKind::Affine {
            let t: Vec<String> = m.translation.iter().map(|&x| real(x)).collect();
            writeln!(s, "t {}", t.join(" ")).unwrap();
        }
    }
    s
}

/// Display wrapper that writes the system in the text format.
pub struct Text<'a>(pub &'a IfsSystem);

impl fmt::Display for Text<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_ifs(self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ELLIPSE: &str = "# single elliptic map\nifs dim=2 kind=linear\nmap\n65.264 -86.116\n156.98 62.224\n";

    #[test]
    fn parses_a_linear_file() {
        let f = parse_ifs(ELLIPSE).unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.len(), 1);
        assert_eq!(f.kind(), IfsKind::Linear);
        assert_eq!(f.maps()[0].linear.get(1, 0), 156.98);
    }

    #[test]
    fn translation_row_makes_it_affine() {
        let f = parse_ifs("ifs dim=2 kind=affine\nmap\n0 -1\n1 0\nt 1 0\n").unwrap();
        assert_eq!(f.kind(), IfsKind::Affine);
        assert_eq!(&f.maps()[0].translation[..], &[1.0, 0.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let mixed = "ifs dim=2 kind=linear\nmap\n1 0\n0 1\nmap\n1 0 0\n0 1 0\n0 0 1\n";
        assert_eq!(parse_ifs(mixed).unwrap_err().line, 6);
        assert_eq!(parse_ifs("ifs dim=2 kind=linear\n").unwrap_err().message, "no maps");
        assert_eq!(parse_ifs("map\n").unwrap_err().line, 1);
        let short = "ifs dim=2 kind=linear\nmap\n1 0\nmap\n1 0\n0 1\n";
        assert_eq!(parse_ifs(short).unwrap_err().line, 2);
        assert_eq!(parse_ifs("ifs dim=1 kind=linear\nmap\nx\n").unwrap_err().line, 3);
        assert_eq!(parse_ifs("ifs dim=1 kind=linear\nmap\n1\nt 1\n").unwrap_err().line, 4);
        assert_eq!(parse_ifs("ifs dim=1 kind=affine\nmap\n1\n").unwrap_err().line, 2);
        assert_eq!(parse_ifs("ifs dim=1 kind=linear\nmap\ninf\n").unwrap_err().line, 3);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let f = parse_ifs("ifs dim=2 kind=affine\nmap\n0.1 -0\n1e-300 3.0000000000000004\nt 123456789012345680000 -2.5e-7\n").unwrap();
        let text = serialize_ifs(&f);
        let g = parse_ifs(&text).unwrap();
        for (a, b) in f.maps().iter().zip(g.maps()) {
            let bits = |m: &AffineMap| {
                m.linear
                    .as_slice()
                    .iter()
                    .chain(m.translation.iter())
                    .map(|x| x.to_bits())
                    .collect::<Vec<_>>()
            };
            assert_eq!(bits(a), bits(b));
        }
        assert_eq!(Text(&g).to_string(), text);
    }
}
