//! Input parsing: a small JSON object or an inline `key = value` form.
//!
//! ```text
//! {"p":5,"roots":["0","5","1","6"],"c":"1"}
//! {"p":7,"coeffs":["0","-6","11","-6","1"]}
//! p=5; c=1; roots=[0, 5, 1, 6]
//! ```
//!
//! Exactly one of `roots`/`coeffs` must be present; `c` accompanies roots
//! only (for coefficients it is the leading coefficient). Rationals are
//! written "a" or "a/b"; "inf" is allowed among roots. A polynomial of odd
//! degree branches at infinity, so the coefficients form appends the
//! infinite point itself.

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use hyperred_core::arith::{self, rational_roots, OddPrime, RatPoly};
use hyperred_core::tree::RawPoint;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Domain(#[from] hyperred_core::Error),
}

impl InputError {
    pub fn is_internal(&self) -> bool {
        match self {
            InputError::Parse { .. } => false,
            InputError::Domain(e) => e.is_internal(),
        }
    }
}

pub type Result<T> = std::result::Result<T, InputError>;

/// Parsed input, before domain validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInput {
    pub p: u64,
    pub data: CurveData,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveData {
    Roots { c: BigRational, roots: Vec<RawPoint> },
    /// Dense coefficients, constant term first.
    Coeffs { coeffs: Vec<BigRational> },
}

fn err_at(line: usize, col: usize, msg: impl Into<String>) -> InputError {
    InputError::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn err(msg: impl Into<String>) -> InputError {
    err_at(1, 1, msg)
}

pub fn parse_input(text: &str) -> Result<RawInput> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        parse_json(text)
    } else {
        parse_inline(text)
    }
}

fn parse_rational_str(s: &str) -> Result<BigRational> {
    arith::parse_rational(s).ok_or_else(|| err(format!("invalid rational '{s}'")))
}

fn parse_point_str(s: &str) -> Result<RawPoint> {
    if s.trim() == "inf" {
        Ok(RawPoint::Infinity)
    } else {
        Ok(RawPoint::Finite(parse_rational_str(s)?))
    }
}

fn parse_json(text: &str) -> Result<RawInput> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        err_at(e.line(), e.column().max(1), e.to_string())
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| err("input must be a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "p" | "c" | "roots" | "coeffs") {
            return Err(err(format!("unknown key '{key}'")));
        }
    }
    let p = obj
        .get("p")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| err("missing or invalid 'p'"))?;
    let scalar = |v: &serde_json::Value| -> Result<String> {
        match v {
            serde_json::Value::String(s) => Ok(s.clone()),
            serde_json::Value::Number(n) => Ok(n.to_string()),
            _ => Err(err("rationals must be strings or numbers")),
        }
    };
    let list = |v: &serde_json::Value| -> Result<Vec<String>> {
        v.as_array()
            .ok_or_else(|| err("expected an array"))?
            .iter()
            .map(scalar)
            .collect()
    };
    match (obj.get("roots"), obj.get("coeffs")) {
        (Some(roots), None) => {
            let c = match obj.get("c") {
                Some(v) => parse_rational_str(&scalar(v)?)?,
                None => BigRational::one(),
            };
            let roots = list(roots)?
                .iter()
                .map(|s| parse_point_str(s))
                .collect::<Result<_>>()?;
            Ok(RawInput {
                p,
                data: CurveData::Roots { c, roots },
            })
        }
        (None, Some(coeffs)) => {
            if obj.contains_key("c") {
                return Err(err(
                    "'c' is determined by 'coeffs'; give it with 'roots' only",
                ));
            }
            let coeffs = list(coeffs)?
                .iter()
                .map(|s| parse_rational_str(s))
                .collect::<Result<_>>()?;
            Ok(RawInput {
                p,
                data: CurveData::Coeffs { coeffs },
            })
        }
        (Some(_), Some(_)) => Err(err("give either 'roots' or 'coeffs', not both")),
        (None, None) => Err(err("one of 'roots' or 'coeffs' is required")),
    }
}

/// Line/column aware scanner for the inline form.
fn parse_inline(text: &str) -> Result<RawInput> {
    let mut p: Option<u64> = None;
    let mut c: Option<BigRational> = None;
    let mut roots: Option<Vec<RawPoint>> = None;
    let mut coeffs: Option<Vec<BigRational>> = None;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        for raw_stmt in line.split(';') {
            let stmt = raw_stmt.trim();
            if stmt.is_empty() || stmt.starts_with('#') {
                continue;
            }
            let col = line.find(raw_stmt.trim_start()).map_or(1, |i| i + 1);
            let (key, value) = stmt
                .split_once('=')
                .ok_or_else(|| err_at(lineno, col, format!("expected key=value, got '{stmt}'")))?;
            let key = key.trim();
            let value = value.trim();
            let bracket_list = |v: &str| -> Result<Vec<String>> {
                let inner = v
                    .strip_prefix('[')
                    .and_then(|s| s.strip_suffix(']'))
                    .ok_or_else(|| err_at(lineno, col, "expected a [..] list"))?;
                Ok(inner
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect())
            };
            match key {
                "p" => {
                    p = Some(value.parse().map_err(|_| {
                        err_at(lineno, col, format!("invalid prime '{value}'"))
                    })?);
                }
                "c" => {
                    c = Some(arith::parse_rational(value).ok_or_else(|| {
                        err_at(lineno, col, format!("invalid rational '{value}'"))
                    })?);
                }
                "roots" => {
                    roots = Some(
                        bracket_list(value)?
                            .iter()
                            .map(|s| parse_point_str(s))
                            .collect::<Result<_>>()?,
                    );
                }
                "coeffs" => {
                    coeffs = Some(
                        bracket_list(value)?
                            .iter()
                            .map(|s| parse_rational_str(s))
                            .collect::<Result<_>>()?,
                    );
                }
                other => {
                    return Err(err_at(lineno, col, format!("unknown key '{other}'")));
                }
            }
        }
    }
    let p = p.ok_or_else(|| err("missing 'p'"))?;
    match (roots, coeffs) {
        (Some(roots), None) => Ok(RawInput {
            p,
            data: CurveData::Roots {
                c: c.unwrap_or_else(BigRational::one),
                roots,
            },
        }),
        (None, Some(coeffs)) => {
            if c.is_some() {
                return Err(err("'c' is determined by 'coeffs'; give it with 'roots' only"));
            }
            Ok(RawInput {
                p,
                data: CurveData::Coeffs { coeffs },
            })
        }
        (Some(_), Some(_)) => Err(err("give either 'roots' or 'coeffs', not both")),
        (None, None) => Err(err("one of 'roots' or 'coeffs' is required")),
    }
}

/// Domain validation: check the prime, and for coefficient input extract
/// the branch points (squarefree, split over Q; odd degree adds infinity).
pub fn to_curve_data(input: &RawInput) -> Result<(OddPrime, BigRational, Vec<RawPoint>)> {
    let p = OddPrime::new(input.p)?;
    match &input.data {
        CurveData::Roots { c, roots } => Ok((p, c.clone(), roots.clone())),
        CurveData::Coeffs { coeffs } => {
            if coeffs.is_empty() || coeffs.last().is_some_and(num_traits::Zero::is_zero) {
                return Err(InputError::Domain(
                    hyperred_core::Error::ZeroLeadingCoefficient,
                ));
            }
            let f = RatPoly::new(coeffs.clone());
            if f.degree() < 3 {
                return Err(InputError::Domain(hyperred_core::Error::WrongPointCount(
                    f.degree(),
                )));
            }
            let c = f.leading().clone();
            let mut points: Vec<BigRational> = Vec::new();
            for (root, mult) in rational_roots(&f)? {
                if mult > 1 {
                    return Err(InputError::Domain(hyperred_core::Error::NotSquarefree(
                        arith::format_rational(&root),
                    )));
                }
                points.push(root);
            }
            points.sort();
            let mut raw: Vec<RawPoint> = points.into_iter().map(RawPoint::Finite).collect();
            if f.degree() % 2 == 1 {
                raw.push(RawPoint::Infinity);
            }
            Ok((p, c, raw))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperred_core::arith::integer;

    #[test]
    fn json_roots_form() {
        let input = parse_input(r#"{"p":5,"roots":["0","5","1","6"],"c":"1"}"#).unwrap();
        assert_eq!(input.p, 5);
        let CurveData::Roots { c, roots } = &input.data else {
            panic!("expected roots")
        };
        assert_eq!(*c, integer(1));
        assert_eq!(roots.len(), 4);
        assert_eq!(roots[1], RawPoint::Finite(integer(5)));
    }

    #[test]
    fn json_coeffs_to_roots() {
        // x^4 - 6x^3 + 11x^2 - 6x = x(x-1)(x-2)(x-3)
        let input = parse_input(r#"{"p":7,"coeffs":["0","-6","11","-6","1"]}"#).unwrap();
        let (p, c, raw) = to_curve_data(&input).unwrap();
        assert_eq!(p.get(), 7);
        assert_eq!(c, integer(1));
        assert_eq!(
            raw,
            vec![
                RawPoint::Finite(integer(0)),
                RawPoint::Finite(integer(1)),
                RawPoint::Finite(integer(2)),
                RawPoint::Finite(integer(3)),
            ]
        );
    }

    #[test]
    fn inline_form() {
        let input = parse_input("p=5; c=1; roots=[0, 5, 1, 6]").unwrap();
        let json = parse_input(r#"{"p":5,"roots":["0","5","1","6"],"c":"1"}"#).unwrap();
        assert_eq!(input, json);
    }

    #[test]
    fn odd_degree_adds_infinity() {
        // x^3 - x = x(x-1)(x+1)
        let input = parse_input(r#"{"p":5,"coeffs":["0","-1","0","1"]}"#).unwrap();
        let (_, _, raw) = to_curve_data(&input).unwrap();
        assert_eq!(raw.len(), 4);
        assert_eq!(raw.last(), Some(&RawPoint::Infinity));
    }

    #[test]
    fn char_two_rejected() {
        let input = parse_input(r#"{"p":2,"roots":["0","1","2","3"]}"#).unwrap();
        let e = to_curve_data(&input).unwrap_err();
        assert!(matches!(
            e,
            InputError::Domain(hyperred_core::Error::ResidueCharTwo)
        ));
    }

    #[test]
    fn composite_p_rejected() {
        let input = parse_input("p=15; roots=[0,1,2,3]").unwrap();
        let e = to_curve_data(&input).unwrap_err();
        assert!(matches!(
            e,
            InputError::Domain(hyperred_core::Error::CompositeModulus(15))
        ));
    }

    #[test]
    fn repeated_root_rejected() {
        // x^2(x-1)(x-2) has a double root
        let input = parse_input(r#"{"p":5,"coeffs":["0","0","2","-3","1"]}"#).unwrap();
        let e = to_curve_data(&input).unwrap_err();
        assert!(matches!(
            e,
            InputError::Domain(hyperred_core::Error::NotSquarefree(_))
        ));
    }

    #[test]
    fn non_splitting_rejected() {
        // x^4 - 2 is irreducible over Q
        let input = parse_input(r#"{"p":5,"coeffs":["-2","0","0","0","1"]}"#).unwrap();
        let e = to_curve_data(&input).unwrap_err();
        assert!(matches!(
            e,
            InputError::Domain(hyperred_core::Error::IrrationalBranchPoints)
        ));
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = parse_input("p=5\nroots=[0,1,2,3").unwrap_err();
        let InputError::Parse { line, .. } = e else {
            panic!("expected parse error")
        };
        assert_eq!(line, 2);
        assert!(parse_input("{\"p\":5,\"bogus\":1}").is_err());
        assert!(parse_input("p=5; roots=[0,1]; coeffs=[1]").is_err());
    }
}
