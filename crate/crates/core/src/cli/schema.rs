//! Keys accepted by each experiment, shared by config files and flags.

use serde_json::Value;

use crate::dynamics::DomainSpec;
use crate::geometry::{parse_rational, BlockGeometry, Polytope};

/// Value type of a key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Uint,
    Bool,
    Str,
    Rational,
    Ints,
    Floats,
    Rationals,
    /// `[a, b]`.
    Window,
    /// `[[a, b], [c, d]]`.
    Windows,
    Block,
    Polytope,
    Sites,
    Domain,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Float => "FLOAT",
            Kind::Int => "INT",
            Kind::Uint => "UINT",
            Kind::Bool => "BOOL",
            Kind::Str => "STRING",
            Kind::Rational => "RATIONAL",
            Kind::Ints => "INTS",
            Kind::Floats => "FLOATS",
            Kind::Rationals => "RATIONALS",
            Kind::Window => "[A,B]",
            Kind::Windows => "[[A,B],[C,D]]",
            Kind::Block => "BLOCK",
            Kind::Polytope => "POLYTOPE",
            Kind::Sites => "SITES",
            Kind::Domain => "DOMAIN",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub required: bool,
    pub help: &'static str,
}

const fn req(name: &'static str, kind: Kind, help: &'static str) -> Key {
    Key { name, kind, required: true, help }
}

const fn opt(name: &'static str, kind: Kind, help: &'static str) -> Key {
    Key { name, kind, required: false, help }
}

/// Every experiment, in the order of the command line.
pub const ESTIMATORS: [&str; 14] = [
    "validate", "simulate", "survival", "pc", "shape", "edges", "torus", "density", "crossing", "bgprobe",
    "goodblock", "meet", "cone", "crosspath",
];

const P: Key = req("p", Kind::Float, "site density");
const T: Key = req("T", Kind::Int, "horizon");
const REPS: Key = req("reps", Kind::Uint, "replica count");
const SEED: Key = req("seed", Kind::Uint, "master seed");

/// Keys of `estimator`, common keys first; `None` for unknown names.
pub fn keys(estimator: &str) -> Option<Vec<Key>> {
    let mut out = vec![
        req("model", Kind::Str, "model file, relative to the config file"),
        opt("estimator", Kind::Str, "experiment name"),
        opt("sublattice", Kind::Bool, "accept offsets generating a proper sublattice"),
    ];
    let own: Vec<Key> = match estimator {
        "validate" => vec![],
        "simulate" => vec![
            P,
            T,
            SEED,
            opt("reps", Kind::Uint, "replica count (default 1)"),
            opt("start", Kind::Sites, "initial sites in slab coordinates (default the origin)"),
            opt("domain", Kind::Domain, "restriction region (default the full space)"),
            opt("dual", Kind::Bool, "run the dual chain"),
        ],
        "survival" => vec![
            P,
            T,
            REPS,
            SEED,
            opt("kind", Kind::Str, "primal | dual | death | decay (default primal)"),
            opt("window", Kind::Window, "death fit window (kind = death)"),
            opt("windows", Kind::Windows, "decay fit windows (kind = decay)"),
            opt("stride", Kind::Int, "splitting stride (kind = decay, default 10)"),
        ],
        "pc" => vec![
            T,
            REPS,
            SEED,
            req("L_stop", Kind::Int, "spatial extent that also counts as survival"),
            req("tol", Kind::Float, "bracket width"),
            opt("stability_sets", Kind::Uint, "independent seed sets (default 2)"),
        ],
        "shape" => vec![
            P,
            T,
            REPS,
            SEED,
            opt("grid", Kind::Uint, "directions on the circle when d = 3 (default 16)"),
            opt("T_cond", Kind::Int, "conditioning horizon (default T)"),
        ],
        "edges" => vec![P, T, REPS, SEED],
        "torus" => vec![P, T, REPS, SEED, req("sizes", Kind::Ints, "torus sides")],
        "density" => vec![
            P,
            T,
            REPS,
            SEED,
            req("sizes", Kind::Ints, "box half-sides n"),
            opt("a_grid", Kind::Floats, "levels a for P(Y_n <= a)"),
            opt("theta_reps", Kind::Uint, "replicas for theta (default reps)"),
        ],
        "crossing" => vec![
            P,
            REPS,
            SEED,
            req("L", Kind::Int, "box height"),
            req("eps", Kind::Float, "box half-width over L"),
            req("slope", Kind::Rational, "box tilt"),
        ],
        "bgprobe" => vec![
            P,
            REPS,
            SEED,
            req("block", Kind::Block, "B(w, h, v) as {w, h, v}"),
            req("n", Kind::Int, "half-side of B_n"),
        ],
        "goodblock" => vec![
            P,
            REPS,
            SEED,
            req("L", Kind::Int, "block scale"),
            req("C", Kind::Int, "aspect constant"),
            opt("v", Kind::Rationals, "block tilt (default centre of the spread)"),
        ],
        "meet" => vec![
            P,
            REPS,
            SEED,
            req("times", Kind::Ints, "meeting times t"),
            req("v_hat", Kind::Rationals, "drift estimate"),
        ],
        "cone" => vec![
            P,
            T,
            REPS,
            SEED,
            req("t0", Kind::Int, "top of the start window"),
            req("polytope", Kind::Polytope, "cone base O"),
            opt("shape_T", Kind::Int, "horizon of the shape estimate (default T)"),
            opt("shape_reps", Kind::Uint, "replicas of the shape estimate (default reps)"),
            opt("grid", Kind::Uint, "shape directions when d = 3 (default 16)"),
        ],
        "crosspath" => vec![
            P,
            REPS,
            SEED,
            req("L", Kind::Int, "box height"),
            req("eps", Kind::Float, "sprinkling"),
            req("box_eps", Kind::Float, "box half-width over L"),
            req("alpha", Kind::Rational, "tilt of B"),
            req("beta", Kind::Rational, "tilt of B'"),
            opt("n", Kind::Int, "half-side of the probe box (default 2)"),
            opt("budget", Kind::Uint, "attempts before giving up (default 100 reps)"),
        ],
        _ => return None,
    };
    out.extend(own);
    Some(out)
}

fn is_rational(v: &Value) -> bool {
    match v {
        Value::String(s) => parse_rational(s).is_ok(),
        Value::Number(n) => n.is_i64(),
        _ => false,
    }
}

fn is_window(v: &Value) -> bool {
    v.as_array().is_some_and(|a| a.len() == 2 && a.iter().all(Value::is_i64))
}

fn list_of(v: &Value, f: impl Fn(&Value) -> bool) -> bool {
    v.as_array().is_some_and(|a| a.iter().all(f))
}

/// Type check of one value; the message names the expected shape.
pub fn check(kind: Kind, v: &Value) -> Result<(), String> {
    let ok = match kind {
        Kind::Float => v.is_number(),
        Kind::Int => v.is_i64(),
        Kind::Uint => v.is_u64(),
        Kind::Bool => v.is_boolean(),
        Kind::Str => v.is_string(),
        Kind::Rational => is_rational(v),
        Kind::Ints => list_of(v, Value::is_i64),
        Kind::Floats => list_of(v, Value::is_number),
        Kind::Rationals => list_of(v, is_rational),
        Kind::Window => is_window(v),
        Kind::Windows => v.as_array().is_some_and(|a| a.len() == 2 && a.iter().all(is_window)),
        Kind::Sites => list_of(v, |s| list_of(s, Value::is_i64)),
        Kind::Block => {
            return serde_json::from_value::<BlockGeometry>(v.clone()).map(|_| ()).map_err(|e| e.to_string())
        }
        Kind::Polytope => {
            return serde_json::from_value::<Polytope>(v.clone()).map(|_| ()).map_err(|e| e.to_string())
        }
        Kind::Domain => {
            return serde_json::from_value::<DomainSpec>(v.clone()).map(|_| ()).map_err(|e| e.to_string())
        }
    };
    if ok {
        Ok(())
    } else {
        Err(format!("expected {}, got {v}", kind.name()))
    }
}

/// Reads a command-line value: JSON where it parses, otherwise a string or
/// a comma-separated list.
pub fn parse_flag(kind: Kind, raw: &str) -> Value {
    if kind == Kind::Str {
        return Value::String(raw.to_string());
    }
    if let Ok(v) = serde_json::from_str::<Value>(raw) {
        return v;
    }
    match kind {
        Kind::Ints | Kind::Floats | Kind::Rationals => Value::Array(
            raw.split(',')
                .map(|s| {
                    let s = s.trim();
                    serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()))
                })
                .collect(),
        ),
        _ => Value::String(raw.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn every_estimator_has_keys() {
        for e in ESTIMATORS {
            let ks = keys(e).unwrap();
            let mut names: Vec<&str> = ks.iter().map(|k| k.name).collect();
            names.sort();
            names.dedup();
            assert_eq!(names.len(), ks.len(), "{e}");
        }
        assert!(keys("nope").is_none());
    }

    #[test]
    fn kinds() {
        assert!(check(Kind::Rational, &json!("3/4")).is_ok());
        assert!(check(Kind::Rational, &json!(2)).is_ok());
        assert!(check(Kind::Rational, &json!(0.5)).is_err());
        assert!(check(Kind::Uint, &json!(-1)).is_err());
        assert!(check(Kind::Windows, &json!([[1, 2], [3, 4]])).is_ok());
        assert!(check(Kind::Block, &json!({"w": [4], "h": 8, "v": ["1/2"]})).is_ok());
        assert!(check(Kind::Block, &json!({"w": [4], "h": 8})).is_err());
    }

    #[test]
    fn flags() {
        assert_eq!(parse_flag(Kind::Rational, "3/4"), json!("3/4"));
        assert_eq!(parse_flag(Kind::Float, "0.8"), json!(0.8));
        assert_eq!(parse_flag(Kind::Ints, "8,16,32"), json!([8, 16, 32]));
        assert_eq!(parse_flag(Kind::Rationals, "1/2,-1"), json!(["1/2", -1]));
        assert_eq!(parse_flag(Kind::Str, "12"), json!("12"));
    }
}
