//! Plain-text point set format.
//!
//! ```text
//! # assouad-kit pointset v1, d=2, resolution=0.001, label=cantor
//! 0,0
//! 0.25,0.75
//! ```
//!
//! Coordinates are written with the shortest representation that parses back
//! to the same float, so a write/read round trip is bit-exact.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::scalar::Scalar;

const MAGIC: &str = "# assouad-kit pointset v1";

pub fn write_pointset<T: Scalar, W: Write>(set: &PointSet<T>, mut out: W) -> Result<()> {
    let mut buf = String::new();
    let _ = writeln!(
        buf,
        "{MAGIC}, d={}, resolution={}, label={}",
        set.dim(),
        set.resolution(),
        set.label().replace('\n', " ")
    );
    for p in set.points() {
        for (i, x) in p.iter().enumerate() {
            if i > 0 {
                buf.push(',');
            }
            let _ = write!(buf, "{x}");
        }
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())
        .map_err(|e| Error::Format(e.to_string()))
}

pub fn pointset_to_string<T: Scalar>(set: &PointSet<T>) -> String {
    let mut out = Vec::new();
    write_pointset(set, &mut out).expect("writing to memory");
    String::from_utf8(out).expect("ascii output")
}

pub fn read_pointset<T: Scalar, R: BufRead>(input: R) -> Result<PointSet<T>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("missing header".into()))?
        .map_err(|e| Error::Format(e.to_string()))?;
    let (dim, resolution, label) = parse_header::<T>(&header)?;
    let mut coords = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Format(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let before = coords.len();
        for field in line.split(',') {
            let x = field.trim().parse::<T>().map_err(|_| {
                Error::Format(format!("line {}: bad coordinate {field:?}", lineno + 2))
            })?;
            coords.push(x);
        }
        if coords.len() - before != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() - before,
            });
        }
    }
    PointSet::from_flat(dim, coords, resolution, label)
}

pub fn pointset_from_str<T: Scalar>(text: &str) -> Result<PointSet<T>> {
    read_pointset(text.as_bytes())
}

fn parse_header<T: Scalar>(header: &str) -> Result<(usize, T, String)> {
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| Error::Format("not an assouad-kit pointset v1 file".into()))?;
    let (fields, label) = match rest.find(", label=") {
        Some(i) => (&rest[..i], rest[i + ", label=".len()..].to_string()),
        None => (rest, String::new()),
    };
    let mut dim = None;
    let mut resolution = None;
    for field in fields.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad header field {field:?}")))?;
        match key {
            "d" => {
                dim = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| Error::Format(format!("bad dimension {value:?}")))?,
                )
            }
            "resolution" => {
                resolution = Some(
                    value
                        .parse::<T>()
                        .map_err(|_| Error::Format(format!("bad resolution {value:?}")))?,
                )
            }
            _ => return Err(Error::Format(format!("unknown header field {key:?}"))),
        }
    }
    Ok((
        dim.ok_or_else(|| Error::Format("header lacks d=".into()))?,
        resolution.ok_or_else(|| Error::Format("header lacks resolution=".into()))?,
        label,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let s = PointSet::new(2, vec![vec![0.0, 0.5]], 0.001, "demo").unwrap();
        let text = pointset_to_string(&s);
        assert_eq!(
            text,
            "# assouad-kit pointset v1, d=2, resolution=0.001, label=demo\n0,0.5\n"
        );
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let pts: Vec<Vec<f64>> = (1..200)
            .map(|i| vec![1.0 / i as f64, (i as f64).sqrt().fract()])
            .collect();
        let s = PointSet::new(2, pts, 1e-7, "label, with comma").unwrap();
        let back: PointSet<f64> = pointset_from_str(&pointset_to_string(&s)).unwrap();
        assert_eq!(back.label(), "label, with comma");
        assert_eq!(back.resolution().to_bits(), s.resolution().to_bits());
        for (a, b) in s.coords().iter().zip(back.coords()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(pointset_from_str::<f64>("0,1\n").is_err());
        let bad = "# assouad-kit pointset v1, d=2, resolution=0, label=x\n0\n";
        assert!(matches!(
            pointset_from_str::<f64>(bad),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
