//! JSON schemas for bodies, measures, concavity transforms, targets and
//! reports.
//!
//! Parsing goes through `serde_json::Value` so every schema violation names
//! the offending path (`normals[1]`, `zonotope.generators[0][2]`, ...).
//! Floats are written in shortest round-trip form and object keys in a fixed
//! order, so equal inputs give byte-identical output.

use crate::bodies::{wulff, zonotope, HPolytope};
use crate::error::{Error, Result};
use crate::geom::{to_vec, Vec3};
use crate::measures::{DensitySpec, FSpec};
use crate::minkowski::SolveReport;
use crate::surfmeas::SphericalAtomMeasure;
use serde::Serialize;
use serde_json::{json, Map, Value};

/// Parses JSON text, reporting syntax errors with their position.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::invalid(
            "$",
            format!("invalid JSON at line {} column {}: {e}", e.line(), e.column()),
        )
    })
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::invalid(if path.is_empty() { "$" } else { path }, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::invalid(join(path, key), "missing field"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::invalid(path, format!("expected a number, got {v}")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::invalid(path, "expected an array"))
}

fn numbers(v: &Value, path: &str) -> Result<Vec<f64>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

/// A point or direction with exactly `dim` coordinates.
fn vector(v: &Value, path: &str, dim: usize) -> Result<Vec3> {
    let xs = numbers(v, path)?;
    if xs.len() != dim {
        return Err(Error::invalid(
            path,
            format!("expected {dim} coordinates, got {}", xs.len()),
        ));
    }
    let mut out = [0.0; 3];
    out[..dim].copy_from_slice(&xs);
    Ok(out)
}

fn vectors(v: &Value, path: &str, dim: usize) -> Result<Vec<Vec3>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| vector(x, &format!("{path}[{i}]"), dim))
        .collect()
}

fn dimension(obj: &Map<String, Value>, path: &str) -> Result<usize> {
    let p = join(path, "dim");
    let d = field(obj, path, "dim")?
        .as_u64()
        .ok_or_else(|| Error::invalid(&p, "expected 2 or 3"))?;
    match d {
        2 | 3 => Ok(d as usize),
        _ => Err(Error::invalid(p, format!("must be 2 or 3, got {d}"))),
    }
}

/// Infers the dimension of a generator list from its first entry.
fn generator_dim(gens: &[Value], path: &str) -> Result<usize> {
    let first = gens
        .first()
        .ok_or_else(|| Error::invalid(path, "at least one generator required"))?;
    let n = array(first, &format!("{path}[0]"))?.len();
    match n {
        2 | 3 => Ok(n),
        _ => Err(Error::invalid(
            format!("{path}[0]"),
            format!("expected 2 or 3 coordinates, got {n}"),
        )),
    }
}

/// `{"dim","normals","offsets"}` or `{"zonotope":{"generators":[..]}}`.
///
/// Derived keys (`vertices`, `facet_areas`) are accepted and ignored, so
/// emitted bodies read back unchanged.
pub fn body_from_value(v: &Value) -> Result<HPolytope> {
    body_at(v, "")
}

fn body_at(v: &Value, path: &str) -> Result<HPolytope> {
    let obj = as_object(v, path)?;
    if let Some(z) = obj.get("zonotope") {
        let zp = join(path, "zonotope");
        let zobj = as_object(z, &zp)?;
        let gp = join(&zp, "generators");
        let garr = array(field(zobj, &zp, "generators")?, &gp)?;
        let dim = match obj.get("dim") {
            Some(_) => dimension(obj, path)?,
            None => generator_dim(garr, &gp)?,
        };
        let gens = vectors(field(zobj, &zp, "generators")?, &gp, dim)?;
        return Ok(zonotope(dim, &gens).map_err(|e| prefix(e, path))?.into_body());
    }
    let dim = dimension(obj, path)?;
    let normals = vectors(field(obj, path, "normals")?, &join(path, "normals"), dim)?;
    let offsets = numbers(field(obj, path, "offsets")?, &join(path, "offsets"))?;
    wulff(dim, &normals, &offsets).map_err(|e| prefix(e, path))
}

/// Prepends `path` to the path of a validation error.
fn prefix(e: Error, path: &str) -> Error {
    match e {
        Error::Invalid { path: p, msg } if !path.is_empty() => Error::invalid(join(path, &p), msg),
        other => other,
    }
}

pub fn parse_body(text: &str) -> Result<HPolytope> {
    body_from_value(&parse_json(text)?)
}

fn coords(vs: &[Vec3], dim: usize) -> Value {
    Value::Array(vs.iter().map(|v| json!(to_vec(v, dim))).collect())
}

/// H-data plus derived vertices and facet areas (areas in facet order).
pub fn body_to_value(k: &HPolytope) -> Value {
    let d = k.dim();
    json!({
        "dim": d,
        "normals": coords(k.normals(), d),
        "offsets": k.offsets(),
        "vertices": coords(k.vertices(), d),
        "facet_areas": k.facet_areas(),
    })
}

/// `{"family":"lebesgue"|"gaussian"}` or `{"family":"power","s":..}`.
pub fn measure_from_value(v: &Value, dim: Option<usize>) -> Result<DensitySpec> {
    let obj = as_object(v, "measure")?;
    let fam = field(obj, "measure", "family")?
        .as_str()
        .ok_or_else(|| Error::invalid("measure.family", "expected a string"))?;
    let mu = match fam {
        "lebesgue" => DensitySpec::Lebesgue,
        "gaussian" => DensitySpec::Gaussian,
        "power" => DensitySpec::Power {
            s: number(field(obj, "measure", "s")?, "measure.s")?,
        },
        other => {
            return Err(Error::invalid(
                "measure.family",
                format!("unknown family '{other}' (lebesgue, gaussian, power)"),
            ))
        }
    };
    // Without a body the weakest requirement (n = 2) applies.
    mu.validate(dim.unwrap_or(2))?;
    Ok(mu)
}

pub fn parse_measure(text: &str, dim: Option<usize>) -> Result<DensitySpec> {
    measure_from_value(&parse_json(text)?, dim)
}

/// Short names used on the command line: `lebesgue`, `gaussian`, `power:s`.
pub fn measure_from_name(name: &str) -> Result<DensitySpec> {
    match name {
        "lebesgue" => Ok(DensitySpec::Lebesgue),
        "gaussian" => Ok(DensitySpec::Gaussian),
        _ => match name.strip_prefix("power:") {
            Some(s) => {
                let s: f64 = s
                    .parse()
                    .map_err(|_| Error::invalid("measure.s", format!("not a number: '{s}'")))?;
                let mu = DensitySpec::Power { s };
                mu.validate(2)?;
                Ok(mu)
            }
            None => Err(Error::invalid(
                "measure",
                format!("unknown measure '{name}' (lebesgue, gaussian, power:<s>, or a JSON file)"),
            )),
        },
    }
}

pub fn measure_to_value(mu: &DensitySpec) -> Value {
    serde_json::to_value(mu).expect("measure serializes")
}

/// `{"family":"power","p":..}`, `{"family":"log"}` or `{"family":"ehrhard"}`.
pub fn f_from_value(v: &Value) -> Result<FSpec> {
    let obj = as_object(v, "f")?;
    let fam = field(obj, "f", "family")?
        .as_str()
        .ok_or_else(|| Error::invalid("f.family", "expected a string"))?;
    match fam {
        "log" => Ok(FSpec::Log),
        "ehrhard" => Ok(FSpec::Ehrhard),
        "power" => {
            let p = number(field(obj, "f", "p")?, "f.p")?;
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::invalid("f.p", format!("must be positive, got {p}")));
            }
            Ok(FSpec::Power { p })
        }
        other => Err(Error::invalid(
            "f.family",
            format!("unknown family '{other}' (power, log, ehrhard)"),
        )),
    }
}

/// Short names: `log`, `ehrhard`, `power:p`.
pub fn f_from_name(name: &str) -> Result<FSpec> {
    match name {
        "log" => Ok(FSpec::Log),
        "ehrhard" => Ok(FSpec::Ehrhard),
        _ => match name.strip_prefix("power:") {
            Some(p) => f_from_value(&json!({"family": "power", "p": p.parse::<f64>().map_err(
                |_| Error::invalid("f.p", format!("not a number: '{p}'"))
            )?})),
            None => Err(Error::invalid(
                "f",
                format!("unknown F '{name}' (log, ehrhard, power:<p>)"),
            )),
        },
    }
}

/// Spherical target `{"dim","directions","weights"}`.
pub fn nu_from_value(v: &Value) -> Result<SphericalAtomMeasure> {
    let obj = as_object(v, "")?;
    let dim = dimension(obj, "")?;
    let dirs = vectors(field(obj, "", "directions")?, "directions", dim)?;
    let weights = numbers(field(obj, "", "weights")?, "weights")?;
    SphericalAtomMeasure::new(dim, dirs, weights)
}

pub fn parse_nu(text: &str) -> Result<SphericalAtomMeasure> {
    nu_from_value(&parse_json(text)?)
}

pub fn nu_to_value(nu: &SphericalAtomMeasure) -> Value {
    let d = nu.dim();
    json!({
        "dim": d,
        "directions": coords(nu.dirs(), d),
        "weights": nu.weights(),
    })
}

/// Solver report with the solved body embedded.
pub fn solve_report_to_value(r: &SolveReport) -> Value {
    json!({
        "body": body_to_value(&r.body),
        "c": r.c,
        "beta": r.beta,
        "q": r.q,
        "iterations": r.iterations,
        "residual_inf": r.residual_inf,
        "residual_rel": r.residual_rel,
        "converged": r.converged,
        "floor_binding": r.floor_binding,
        "ceiling_binding": r.ceiling_binding,
        "ceiling": r.ceiling,
        "functional_trace": r.functional_trace,
    })
}

/// Any serializable report as a JSON value.
pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

/// CSV cell for a float in the same shortest round-trip form as the JSON.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite float serializes")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::axis_box;

    fn err_path(r: Result<impl std::fmt::Debug>) -> String {
        match r.unwrap_err() {
            Error::Invalid { path, .. } => path,
            e => panic!("expected a schema error, got {e:?}"),
        }
    }

    #[test]
    fn square_round_trip() {
        let text = r#"{"dim":2,"normals":[[1,0],[0,1],[-1,0],[0,-1]],"offsets":[1,1,1,1]}"#;
        let k = parse_body(text).unwrap();
        let out = to_json_string(&body_to_value(&k));
        let back = parse_body(&out).unwrap();
        assert_eq!(back.offsets(), k.offsets());
        assert_eq!(back.vertices(), k.vertices());
        let v = parse_json(&out).unwrap();
        assert_eq!(v["facet_areas"], json!([2.0, 2.0, 2.0, 2.0]));
        assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
        assert_eq!(v["vertices"][0].as_array().unwrap().len(), 2);
    }

    #[test]
    fn zonotope_input() {
        let k = parse_body(r#"{"zonotope":{"generators":[[1,0,0],[0,1,0],[0,0,1]]}}"#).unwrap();
        assert_eq!(k.dim(), 3);
        assert!((k.volume() - 8.0).abs() < 1e-12);
        assert!(k.is_symmetric(1e-12));
    }

    #[test]
    fn errors_name_the_offending_entry() {
        let bad = r#"{"dim":2,"normals":[[1,0],[0,2],[-1,0],[0,-1]],"offsets":[1,1,1,1]}"#;
        let e = parse_body(bad).unwrap_err();
        assert_eq!(err_path(parse_body(bad)), "normals[1]");
        assert!(e.to_string().contains("not a unit vector"), "{e}");
        let short = r#"{"dim":3,"normals":[[1,0]],"offsets":[1]}"#;
        assert_eq!(err_path(parse_body(short)), "normals[0]");
        let neg = r#"{"dim":2,"normals":[[1,0],[0,1],[-1,0],[0,-1]],"offsets":[1,-1,1,1]}"#;
        assert_eq!(err_path(parse_body(neg)), "offsets[1]");
        assert_eq!(err_path(parse_body(r#"{"normals":[],"offsets":[]}"#)), "dim");
        assert_eq!(err_path(parse_body(r#"{"dim":2,"normals":[[1,"x"]],"offsets":[1]}"#)), "normals[0][1]");
        assert_eq!(err_path(parse_body(r#"{"dim":2,"#)), "$");
        let z = r#"{"zonotope":{"generators":[[1,0],[0,"a"]]}}"#;
        assert_eq!(err_path(parse_body(z)), "zonotope.generators[1][1]");
    }

    #[test]
    fn halfplanes_that_do_not_bound_are_refused() {
        let open = r#"{"dim":2,"normals":[[1,0],[0,1]],"offsets":[1,1]}"#;
        assert_eq!(parse_body(open).unwrap_err(), Error::UnboundedWulff);
    }

    #[test]
    fn measures_and_f() {
        assert_eq!(parse_measure(r#"{"family":"gaussian"}"#, None).unwrap(), DensitySpec::Gaussian);
        assert_eq!(
            parse_measure(r#"{"family":"power","s":1.0}"#, Some(3)).unwrap(),
            DensitySpec::Power { s: 1.0 }
        );
        assert_eq!(err_path(parse_measure(r#"{"family":"power"}"#, None)), "measure.s");
        assert_eq!(err_path(parse_measure(r#"{"family":"power","s":-3}"#, Some(2))), "measure.s");
        assert_eq!(err_path(parse_measure(r#"{"family":"cauchy"}"#, None)), "measure.family");
        assert_eq!(measure_from_name("power:2").unwrap(), DensitySpec::Power { s: 2.0 });
        let m = DensitySpec::Power { s: 0.5 };
        assert_eq!(measure_from_value(&measure_to_value(&m), Some(2)).unwrap(), m);
        assert_eq!(f_from_name("power:0.5").unwrap(), FSpec::Power { p: 0.5 });
        assert_eq!(f_from_value(&json!({"family":"ehrhard"})).unwrap(), FSpec::Ehrhard);
        assert_eq!(err_path(f_from_value(&json!({"family":"power","p":0}))), "f.p");
    }

    #[test]
    fn nu_round_trip_and_errors() {
        let text = r#"{"dim":2,"directions":[[1,0],[-1,0],[0,1],[0,-1]],"weights":[1,1,2,2]}"#;
        let nu = parse_nu(text).unwrap();
        assert_eq!(nu.total(), 6.0);
        let back = nu_from_value(&nu_to_value(&nu)).unwrap();
        assert_eq!(back, nu);
        let bad = r#"{"dim":2,"directions":[[1,0],[-1,0]],"weights":[1,-1]}"#;
        assert_eq!(err_path(parse_nu(bad)), "weights[1]");
        let dup = r#"{"dim":2,"directions":[[1,0],[1,0]],"weights":[1,1]}"#;
        assert_eq!(err_path(parse_nu(dup)), "directions[1]");
    }

    #[test]
    fn serialization_is_deterministic() {
        let k = axis_box(&[0.1, 1.0 / 3.0, 2.0]).unwrap();
        let a = to_json_string(&body_to_value(&k));
        let b = to_json_string(&body_to_value(&k.clone()));
        assert_eq!(a, b);
        assert!(a.contains("0.3333333333333333"));
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(1.0 / 3.0), "0.3333333333333333");
    }
}
