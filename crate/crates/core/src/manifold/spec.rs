//! JSON manifold descriptions.
//!
//! ```text
//! {"kind":"sphere","radius":R,"ambient_dim":N}
//! {"kind":"quadric","matrix":[[...]],"level":1.0}
//! {"kind":"implicit","ambient_dim":N,"expr":"<φ>","level":c}
//! {"kind":"parametric","dim":n,"ambient_dim":N,"maps":["f1",…],"domain":[[lo,hi],…]}
//! ```
//!
//! Every kind accepts an optional `"orientation": 1 | -1`.

use serde_json::{Map, Value};

use super::Manifold;
use crate::error::{Error, Result};
use crate::ga::LinearMapN;

type Object = Map<String, Value>;

fn field<'a>(obj: &'a Object, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::spec(name, "missing required field"))
}

fn number(obj: &Object, name: &str) -> Result<f64> {
    field(obj, name)?
        .as_f64()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::spec(name, "expected a finite number"))
}

fn integer(obj: &Object, name: &str) -> Result<usize> {
    field(obj, name)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::spec(name, "expected a non-negative integer"))
}

fn string<'a>(obj: &'a Object, name: &str) -> Result<&'a str> {
    field(obj, name)?
        .as_str()
        .ok_or_else(|| Error::spec(name, "expected a string"))
}

fn ambient_dim(obj: &Object) -> Result<usize> {
    let n = integer(obj, "ambient_dim")?;
    if !(2..=crate::ga::MAX_DIM).contains(&n) {
        return Err(Error::spec(
            "ambient_dim",
            format!("must lie in 2..={}", crate::ga::MAX_DIM),
        ));
    }
    Ok(n)
}

fn check_keys(obj: &Object, allowed: &[&str]) -> Result<()> {
    for key in obj.keys() {
        if key != "kind" && key != "orientation" && !allowed.contains(&key.as_str()) {
            return Err(Error::spec(key.as_str(), "unknown field"));
        }
    }
    Ok(())
}

/// Rewrites errors raised while building a manifold so they name `name`.
fn blame(name: &str, err: Error) -> Error {
    match err {
        Error::Spec { .. } => err,
        other => Error::spec(name, other.to_string()),
    }
}

pub(super) fn from_json(text: &str) -> Result<Manifold> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::spec("<document>", format!("invalid JSON: {e}")))?;
    from_value(&value)
}

pub(super) fn from_value(value: &Value) -> Result<Manifold> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::spec("<document>", "expected a JSON object"))?;
    let kind = string(obj, "kind")?;
    let manifold = match kind {
        "sphere" => {
            check_keys(obj, &["radius", "ambient_dim"])?;
            let radius = number(obj, "radius")?;
            if radius <= 0.0 {
                return Err(Error::spec("radius", "must be positive"));
            }
            Manifold::sphere(radius, ambient_dim(obj)?)?
        }
        "quadric" => {
            check_keys(obj, &["matrix", "level"])?;
            let rows = field(obj, "matrix")?
                .as_array()
                .ok_or_else(|| Error::spec("matrix", "expected an array of rows"))?;
            let rows = rows
                .iter()
                .map(|row| {
                    row.as_array()
                        .and_then(|r| r.iter().map(Value::as_f64).collect::<Option<Vec<f64>>>())
                        .ok_or_else(|| Error::spec("matrix", "rows must be arrays of numbers"))
                })
                .collect::<Result<Vec<_>>>()?;
            if rows.len() < 2 || rows.len() > crate::ga::MAX_DIM {
                return Err(Error::spec(
                    "matrix",
                    format!("size must lie in 2..={}", crate::ga::MAX_DIM),
                ));
            }
            let matrix =
                LinearMapN::symmetric_positive_definite(&rows).map_err(|e| blame("matrix", e))?;
            let level = number(obj, "level")?;
            if level <= 0.0 {
                return Err(Error::spec("level", "must be positive"));
            }
            Manifold::quadric(matrix, level).map_err(|e| blame("matrix", e))?
        }
        "implicit" => {
            check_keys(obj, &["ambient_dim", "expr", "level"])?;
            let n = ambient_dim(obj)?;
            let level = if obj.contains_key("level") {
                number(obj, "level")?
            } else {
                0.0
            };
            Manifold::implicit(string(obj, "expr")?, n, level).map_err(|e| blame("expr", e))?
        }
        "parametric" => {
            check_keys(obj, &["dim", "ambient_dim", "maps", "domain"])?;
            let n = ambient_dim(obj)?;
            let dim = integer(obj, "dim")?;
            if dim == 0 || dim >= n {
                return Err(Error::spec("dim", format!("must lie in 1..{n}")));
            }
            let maps = field(obj, "maps")?
                .as_array()
                .and_then(|a| a.iter().map(Value::as_str).collect::<Option<Vec<&str>>>())
                .ok_or_else(|| Error::spec("maps", "expected an array of strings"))?;
            if maps.len() != n {
                return Err(Error::spec(
                    "maps",
                    format!("expected {n} maps, found {}", maps.len()),
                ));
            }
            let domain = field(obj, "domain")?
                .as_array()
                .and_then(|a| {
                    a.iter()
                        .map(|iv| match iv.as_array().map(Vec::as_slice) {
                            Some([lo, hi]) => Some((lo.as_f64()?, hi.as_f64()?)),
                            _ => None,
                        })
                        .collect::<Option<Vec<_>>>()
                })
                .ok_or_else(|| Error::spec("domain", "expected an array of [lo, hi] pairs"))?;
            if domain.len() != dim {
                return Err(Error::spec(
                    "domain",
                    format!("expected {dim} intervals, found {}", domain.len()),
                ));
            }
            if domain.iter().any(|&(lo, hi)| !(lo < hi)) {
                return Err(Error::spec("domain", "each interval needs lo < hi"));
            }
            Manifold::parametric(&maps, &domain).map_err(|e| blame("maps", e))?
        }
        other => {
            return Err(Error::spec(
                "kind",
                format!("unknown kind `{other}` (expected sphere, quadric, implicit or parametric)"),
            ))
        }
    };
    let orientation = match obj.get("orientation") {
        None => 1.0,
        Some(v) => match v.as_i64() {
            Some(1) => 1.0,
            Some(-1) => -1.0,
            _ => return Err(Error::spec("orientation", "must be 1 or -1")),
        },
    };
    Ok(manifold.with_orientation(orientation))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(text: &str) -> String {
        match Manifold::from_json(text) {
            Err(Error::Spec { field, .. }) => field,
            other => panic!("expected a spec error, got {other:?}"),
        }
    }

    #[test]
    fn parses_each_kind() {
        let s = Manifold::from_json(r#"{"kind":"sphere","radius":2,"ambient_dim":3}"#).unwrap();
        assert_eq!((s.dim(), s.ambient_dim()), (2, 3));
        let q = Manifold::from_json(r#"{"kind":"quadric","matrix":[[1,0],[0,0.25]],"level":1}"#)
            .unwrap();
        assert_eq!(q.ambient_dim(), 2);
        let i = Manifold::from_json(
            r#"{"kind":"implicit","ambient_dim":3,"expr":"x3","level":0,"orientation":-1}"#,
        )
        .unwrap();
        assert_eq!(i.orientation(), -1.0);
        let p = Manifold::from_json(
            r#"{"kind":"parametric","dim":1,"ambient_dim":3,"maps":["cos(u1)","sin(u1)","u1"],"domain":[[-1,1]]}"#,
        )
        .unwrap();
        assert_eq!(p.dim(), 1);
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(field_of(r#"{"kind":"sphere","ambient_dim":3}"#), "radius");
        assert_eq!(field_of(r#"{"kind":"sphere","radius":-1,"ambient_dim":3}"#), "radius");
        assert_eq!(field_of(r#"{"kind":"cube"}"#), "kind");
        assert_eq!(field_of(r#"{"radius":1}"#), "kind");
        assert_eq!(
            field_of(r#"{"kind":"quadric","matrix":[[1,2],[2,1]],"level":1}"#),
            "matrix"
        );
        assert_eq!(
            field_of(r#"{"kind":"implicit","ambient_dim":3,"expr":"x1 +* x2"}"#),
            "expr"
        );
        assert_eq!(
            field_of(r#"{"kind":"sphere","radius":1,"ambient_dim":3,"radus":2}"#),
            "radus"
        );
        assert_eq!(
            field_of(r#"{"kind":"parametric","dim":1,"ambient_dim":3,"maps":["u1","0"],"domain":[[0,1]]}"#),
            "maps"
        );
        assert_eq!(
            field_of(r#"{"kind":"sphere","radius":1,"ambient_dim":3,"orientation":2}"#),
            "orientation"
        );
        assert_eq!(field_of("not json"), "<document>");
    }
}
