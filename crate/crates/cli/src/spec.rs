//! Subset specifications on the command line:
//!
//! ```text
//! interval:START:LEN
//! ap:START:STEP:LEN
//! gp:START:RATIO:LEN
//! random:SIZE:SEED
//! pullback:POLY:SPEC      {x : POLY(x) in SPEC}, POLY in x
//! ```

use std::str::FromStr;

use expanderlab::expansion::SubsetSpec;
use thiserror::Error;

use crate::parse::{parse_poly, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("unknown subset kind `{0}` (expected interval, ap, gp, random or pullback)")]
    UnknownKind(String),
    #[error("`{kind}` takes {expected} fields, got {got}")]
    FieldCount {
        kind: String,
        expected: usize,
        got: usize,
    },
    #[error("field `{field}` of `{kind}` is not a valid integer: `{value}`")]
    BadNumber {
        kind: String,
        field: &'static str,
        value: String,
    },
    #[error("pullback polynomial: {0}")]
    Poly(#[from] ParseError),
}

fn number<T: FromStr>(kind: &str, field: &'static str, value: &str) -> Result<T, SpecError> {
    value.trim().parse().map_err(|_| SpecError::BadNumber {
        kind: kind.to_string(),
        field,
        value: value.to_string(),
    })
}

fn fields<'a>(kind: &str, rest: &'a str, names: &[&str]) -> Result<Vec<&'a str>, SpecError> {
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != names.len() {
        return Err(SpecError::FieldCount {
            kind: kind.to_string(),
            expected: names.len(),
            got: parts.len(),
        });
    }
    Ok(parts)
}

pub fn parse_subset(src: &str) -> Result<SubsetSpec, SpecError> {
    let (kind, rest) = src.trim().split_once(':').unwrap_or((src.trim(), ""));
    match kind {
        "interval" => {
            let f = fields(kind, rest, &["start", "len"])?;
            Ok(SubsetSpec::Interval {
                start: number(kind, "start", f[0])?,
                len: number(kind, "len", f[1])?,
            })
        }
        "ap" => {
            let f = fields(kind, rest, &["start", "step", "len"])?;
            Ok(SubsetSpec::Ap {
                start: number(kind, "start", f[0])?,
                step: number(kind, "step", f[1])?,
                len: number(kind, "len", f[2])?,
            })
        }
        "gp" => {
            let f = fields(kind, rest, &["start", "ratio", "len"])?;
            Ok(SubsetSpec::Gp {
                start: number(kind, "start", f[0])?,
                ratio: number(kind, "ratio", f[1])?,
                len: number(kind, "len", f[2])?,
            })
        }
        "random" => {
            let f = fields(kind, rest, &["size", "seed"])?;
            Ok(SubsetSpec::Random {
                size: number(kind, "size", f[0])?,
                seed: number(kind, "seed", f[1])?,
            })
        }
        "pullback" => {
            let (poly, base) = rest.split_once(':').ok_or(SpecError::FieldCount {
                kind: kind.to_string(),
                expected: 2,
                got: 1,
            })?;
            Ok(SubsetSpec::Pullback {
                f: parse_poly(poly, &["x"])?,
                base: Box::new(parse_subset(base)?),
            })
        }
        other => Err(SpecError::UnknownKind(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        assert_eq!(
            parse_subset("ap:0:1:957").unwrap(),
            SubsetSpec::Ap { start: 0, step: 1, len: 957 }
        );
        assert_eq!(
            parse_subset("gp:1:-3:10").unwrap(),
            SubsetSpec::Gp { start: 1, ratio: -3, len: 10 }
        );
        assert_eq!(
            parse_subset("random:50:7").unwrap(),
            SubsetSpec::Random { size: 50, seed: 7 }
        );
        let pb = parse_subset("pullback:x^2:interval:0:10").unwrap();
        let SubsetSpec::Pullback { f, base } = pb else { panic!() };
        assert_eq!(f.to_string(), "x^2");
        assert_eq!(*base, SubsetSpec::Interval { start: 0, len: 10 });
    }

    #[test]
    fn rejects() {
        assert!(matches!(parse_subset("cube:1"), Err(SpecError::UnknownKind(_))));
        assert!(matches!(parse_subset("ap:1:2"), Err(SpecError::FieldCount { .. })));
        assert!(matches!(parse_subset("random:-1:2"), Err(SpecError::BadNumber { .. })));
        assert!(matches!(parse_subset("pullback:y:ap:0:1:2"), Err(SpecError::Poly(_))));
    }
}
