//! Plain-text patch serialization.
//!
//! ```text
//! degrees 2 2 1
//! knots.xi 0 0 0 1 1 1
//! knots.eta 0 0 0 1 1 1
//! knots.zeta 0 0 1 1
//! cpts 3 3 2
//! x y z w
//! ...
//! ```
//!
//! Control points follow in ξ-fastest order, one `x y z w` line each. Floats
//! are written with the shortest representation that parses back to the same
//! bits. Blank lines and lines starting with `#` are ignored.

use super::{KnotVector, NurbsPatch};
use crate::error::{Result, ScatterError};
use std::fmt::Write as _;

/// Serializes a patch.
pub fn write_patch(patch: &NurbsPatch) -> String {
    let mut s = String::new();
    let d = patch.degrees();
    let n = patch.dims();
    let _ = writeln!(s, "degrees {} {} {}", d[0], d[1], d[2]);
    for (name, kv) in ["xi", "eta", "zeta"].iter().zip(&patch.kv) {
        let _ = write!(s, "knots.{name}");
        for k in &kv.knots {
            let _ = write!(s, " {k:?}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "cpts {} {} {}", n[0], n[1], n[2]);
    for (p, w) in patch.cpts.iter().zip(&patch.weights) {
        let _ = writeln!(s, "{:?} {:?} {:?} {:?}", p[0], p[1], p[2], w);
    }
    s
}

fn parse_f64s(tokens: &[&str], line: usize) -> Result<Vec<f64>> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| ScatterError::Parse(format!("line {line}: bad number {t:?}: {e}")))
        })
        .collect()
}

fn parse_usizes(tokens: &[&str], line: usize) -> Result<Vec<usize>> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| ScatterError::Parse(format!("line {line}: bad integer {t:?}: {e}")))
        })
        .collect()
}

/// Parses a patch written by [`write_patch`].
pub fn read_patch(text: &str) -> Result<NurbsPatch> {
    let mut degrees: Option<Vec<usize>> = None;
    let mut knots: [Option<Vec<f64>>; 3] = [None, None, None];
    let mut dims: Option<Vec<usize>> = None;
    let mut cpts = Vec::new();
    let mut weights = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let tok: Vec<&str> = t.split_whitespace().collect();
        match tok[0] {
            "degrees" => {
                let v = parse_usizes(&tok[1..], line)?;
                if v.len() != 3 {
                    return Err(ScatterError::Parse(format!("line {line}: expected three degrees")));
                }
                degrees = Some(v);
            }
            "knots.xi" => knots[0] = Some(parse_f64s(&tok[1..], line)?),
            "knots.eta" => knots[1] = Some(parse_f64s(&tok[1..], line)?),
            "knots.zeta" => knots[2] = Some(parse_f64s(&tok[1..], line)?),
            "cpts" => {
                let v = parse_usizes(&tok[1..], line)?;
                if v.len() != 3 {
                    return Err(ScatterError::Parse(format!("line {line}: expected three control net dimensions")));
                }
                dims = Some(v);
            }
            _ => {
                if dims.is_none() {
                    return Err(ScatterError::Parse(format!("line {line}: unexpected {:?}", tok[0])));
                }
                let v = parse_f64s(&tok, line)?;
                if v.len() != 4 {
                    return Err(ScatterError::Parse(format!("line {line}: expected `x y z w`")));
                }
                cpts.push([v[0], v[1], v[2]]);
                weights.push(v[3]);
            }
        }
    }
    let degrees = degrees.ok_or_else(|| ScatterError::Parse("missing `degrees`".into()))?;
    let dims = dims.ok_or_else(|| ScatterError::Parse("missing `cpts`".into()))?;
    let mut kv = Vec::with_capacity(3);
    for d in 0..3 {
        let k = knots[d]
            .take()
            .ok_or_else(|| ScatterError::Parse(format!("missing knot vector {d}")))?;
        let kvd = KnotVector::new(k, degrees[d])?;
        if kvd.n_basis() != dims[d] {
            return Err(ScatterError::Parse(format!(
                "direction {d}: knot vector implies {} control points, header says {}",
                kvd.n_basis(),
                dims[d]
            )));
        }
        kv.push(kvd);
    }
    let kv: [KnotVector; 3] = kv.try_into().expect("three knot vectors");
    NurbsPatch::new(kv, cpts, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nurbs::make_spherical_shell;

    #[test]
    fn round_trip_is_bit_exact() {
        let s = make_spherical_shell(0.1 + 0.2, 1.0 / 3.0 + 1.0).unwrap();
        let txt = write_patch(&s);
        assert_eq!(read_patch(&txt).unwrap(), s);
        assert_eq!(write_patch(&read_patch(&txt).unwrap()), txt);
    }

    #[test]
    fn reports_malformed_input() {
        assert!(matches!(read_patch("degrees 1 1\n"), Err(ScatterError::Parse(_))));
        let bad = "degrees 1 1 1\nknots.xi 0 0 1 1\nknots.eta 0 0 1 1\nknots.zeta 0 0 1 1\ncpts 2 2 2\n0 0 0 1\n";
        assert!(read_patch(bad).is_err());
    }
}
