//! On-disk problem description and canonical JSON emission.
//!
//! Output is deterministic: object keys are sorted, indentation is two
//! spaces, and floats are printed like C's `%.12g`.

use std::fmt;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

use crate::error::Result as CoreResult;
use crate::graph::Digraph;
use crate::oracle::{AdditiveFunction, CoverageFunction, TableFunction, ValueOracle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Objective {
    Coverage {
        universe_size: usize,
        sets: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    Additive {
        weights: Vec<f64>,
    },
    /// Explicit values indexed by vertex bitmask (bit `i` set iff vertex `i`
    /// is a member). For small test fixtures only.
    Table {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub directed: bool,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub objective: Objective,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
}

impl Instance {
    /// The digraph the solvers run on; undirected edges are bidirected.
    pub fn graph(&self) -> CoreResult<Digraph> {
        let edges = self.edges.iter().map(|&[u, v]| (u, v));
        if self.directed {
            Digraph::new(self.n, edges)
        } else {
            Digraph::bidirect(self.n, edges)
        }
    }

    pub fn to_oracle(&self) -> CoreResult<ValueOracle> {
        Ok(match &self.objective {
            Objective::Coverage { universe_size, sets, weights } => {
                ValueOracle::new(CoverageFunction::new(*universe_size, sets.clone(), weights.clone())?)
            }
            Objective::Additive { weights } => ValueOracle::new(AdditiveFunction::new(weights.clone())?),
            Objective::Table { values } => ValueOracle::new(TableFunction::new(self.n, values.clone())?),
        })
    }
}

/// One offending field, addressed like `edges[3]` or `objective.sets[1][0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid instance:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Schema(Vec<FieldError>),
}

#[derive(Default)]
struct Checker {
    errors: Vec<FieldError>,
}

impl Checker {
    fn fail(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(FieldError { path: path.into(), message: message.into() });
    }

    fn uint(&mut self, path: &str, v: Option<&Value>) -> Option<usize> {
        match v {
            None => {
                self.fail(path, "missing required field");
                None
            }
            Some(Value::Number(x)) if x.as_u64().is_some() => Some(x.as_u64().unwrap() as usize),
            Some(other) => {
                self.fail(path, format!("expected a non-negative integer, got {other}"));
                None
            }
        }
    }

    fn real(&mut self, path: &str, v: &Value, nonneg: bool) {
        match v.as_f64() {
            Some(x) if !nonneg || x >= 0.0 => {}
            Some(x) => self.fail(path, format!("must be non-negative, got {x}")),
            None => self.fail(path, format!("expected a number, got {v}")),
        }
    }

    fn array<'v>(&mut self, path: &str, v: Option<&'v Value>) -> Option<&'v Vec<Value>> {
        match v {
            None => {
                self.fail(path, "missing required field");
                None
            }
            Some(Value::Array(a)) => Some(a),
            Some(other) => {
                self.fail(path, format!("expected an array, got {other}"));
                None
            }
        }
    }

    fn reals(&mut self, path: &str, v: Option<&Value>, len: Option<usize>, nonneg: bool) {
        let Some(items) = self.array(path, v) else { return };
        if let Some(len) = len {
            if items.len() != len {
                self.fail(path, format!("expected {len} entries, got {}", items.len()));
            }
        }
        for (i, x) in items.iter().enumerate() {
            self.real(&format!("{path}[{i}]"), x, nonneg);
        }
    }

    fn unknown_keys(&mut self, prefix: &str, obj: &Map<String, Value>, allowed: &[&str]) {
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                self.fail(format!("{prefix}{key}"), "unknown field");
            }
        }
    }

    fn objective(&mut self, v: Option<&Value>, n: Option<usize>) {
        let obj = match v {
            Some(Value::Object(o)) => o,
            Some(other) => return self.fail("objective", format!("expected an object, got {other}")),
            None => return self.fail("objective", "missing required field"),
        };
        match obj.get("type").and_then(Value::as_str) {
            Some("coverage") => {
                self.unknown_keys("objective.", obj, &["type", "universe_size", "sets", "weights"]);
                let universe = self.uint("objective.universe_size", obj.get("universe_size"));
                if let Some(sets) = self.array("objective.sets", obj.get("sets")) {
                    if let Some(n) = n.filter(|&n| n != sets.len()) {
                        self.fail("objective.sets", format!("expected {n} per-vertex lists, got {}", sets.len()));
                    }
                    for (i, set) in sets.iter().enumerate() {
                        let path = format!("objective.sets[{i}]");
                        let Some(items) = self.array(&path, Some(set)) else { continue };
                        for (j, e) in items.iter().enumerate() {
                            let p = format!("{path}[{j}]");
                            match e.as_u64() {
                                Some(e) if universe.map_or(true, |u| (e as usize) < u) => {}
                                Some(e) => self.fail(p, format!("element {e} not below universe_size {}", universe.unwrap())),
                                None => self.fail(p, format!("expected an element id, got {e}")),
                            }
                        }
                    }
                }
                match obj.get("weights") {
                    None | Some(Value::Null) => {}
                    w => self.reals("objective.weights", w, universe, true),
                }
            }
            Some("additive") => {
                self.unknown_keys("objective.", obj, &["type", "weights"]);
                self.reals("objective.weights", obj.get("weights"), n, true);
            }
            Some("table") => {
                self.unknown_keys("objective.", obj, &["type", "values"]);
                match n {
                    Some(n) if n > TableFunction::MAX_GROUND => {
                        self.fail("objective", format!("table objectives support at most {} vertices", TableFunction::MAX_GROUND))
                    }
                    _ => self.reals("objective.values", obj.get("values"), n.map(|n| 1 << n), false),
                }
            }
            Some(other) => self.fail("objective.type", format!("unknown objective type {other:?}")),
            None => self.fail("objective.type", "missing or not a string"),
        }
    }
}

fn check(value: &Value) -> Vec<FieldError> {
    let mut c = Checker::default();
    let Value::Object(obj) = value else {
        c.fail("$", "expected a JSON object");
        return c.errors;
    };
    c.unknown_keys("", obj, &["directed", "n", "edges", "objective", "k", "root"]);
    if !matches!(obj.get("directed"), Some(Value::Bool(_))) {
        c.fail("directed", "expected a boolean");
    }
    let n = c.uint("n", obj.get("n"));
    if let Some(edges) = c.array("edges", obj.get("edges")) {
        for (i, e) in edges.iter().enumerate() {
            let path = format!("edges[{i}]");
            let pair: Option<Vec<u64>> = e.as_array().and_then(|a| a.iter().map(Value::as_u64).collect());
            match pair.as_deref() {
                Some(&[u, v]) => {
                    if let Some(n) = n {
                        if u as usize >= n || v as usize >= n {
                            c.fail(path, format!("endpoint out of range for n = {n}: [{u}, {v}]"));
                            continue;
                        }
                    }
                    if u == v {
                        c.fail(path, format!("self-loop at {u}"));
                    }
                }
                _ => c.fail(path, format!("expected a [u, v] pair of vertex ids, got {e}")),
            }
        }
    }
    c.objective(obj.get("objective"), n);
    if let Some(k) = c.uint("k", obj.get("k")) {
        if k < 1 {
            c.fail("k", "must be at least 1");
        }
    }
    match obj.get("root") {
        None | Some(Value::Null) => {}
        Some(r) => match (r.as_u64(), n) {
            (Some(r), Some(n)) if r as usize >= n => c.fail("root", format!("vertex {r} out of range for n = {n}")),
            (Some(_), _) => {}
            (None, _) => c.fail("root", format!("expected a vertex id, got {r}")),
        },
    }
    c.errors
}

/// Parses and strictly validates an instance, reporting every offending field.
pub fn parse_instance(bytes: &[u8]) -> Result<Instance, InstanceError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| InstanceError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let errors = check(&value);
    if !errors.is_empty() {
        return Err(InstanceError::Schema(errors));
    }
    serde_json::from_value(value).map_err(|e| InstanceError::Schema(vec![FieldError { path: "$".into(), message: e.to_string() }]))
}

pub fn emit_instance(instance: &Instance) -> Vec<u8> {
    emit_json(instance)
}

/// `printf("%.12g", x)`.
pub fn format_g12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    const P: i32 = 12;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= P {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pretty printer with `%.12g` floats.
struct CanonicalFormatter(PrettyFormatter<'static>);

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_g12(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Canonical JSON: sorted keys, two-space indent, `%.12g` floats, trailing newline.
pub fn emit_json<T: Serialize>(value: &T) -> Vec<u8> {
    let tree = serde_json::to_value(value).expect("plain data serializes");
    emit_value(&tree)
}

pub(crate) fn emit_value(tree: &Value) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter(PrettyFormatter::new()));
    tree.serialize(&mut ser).expect("writing to memory");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"directed": true, "n": 1, "edges": [], "objective": {"type": "additive", "weights": [1.0]}, "k": 1}"#;

    #[test]
    fn minimal_instance_round_trips() {
        let inst = parse_instance(MINIMAL.as_bytes()).unwrap();
        let bytes = emit_instance(&inst);
        let again = parse_instance(&bytes).unwrap();
        assert_eq!(inst, again);
        assert_eq!(emit_instance(&again), bytes);
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with("{\n  \"directed\": true,\n  \"edges\": [],\n  \"k\": 1,"), "{text}");
    }

    fn schema_paths(src: &str) -> Vec<String> {
        match parse_instance(src.as_bytes()) {
            Err(InstanceError::Schema(errs)) => errs.into_iter().map(|e| e.path).collect(),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_edge_is_named() {
        let src = r#"{"directed": true, "n": 2, "edges": [[0, 1], [1, 2]], "objective": {"type": "additive", "weights": [0, 1]}, "k": 1}"#;
        assert_eq!(schema_paths(src), vec!["edges[1]"]);
    }

    #[test]
    fn coverage_element_beyond_universe() {
        let src = r#"{"directed": false, "n": 2, "edges": [[0, 1]], "objective": {"type": "coverage", "universe_size": 2, "sets": [[0], [1, 2]]}, "k": 1}"#;
        assert_eq!(schema_paths(src), vec!["objective.sets[1][1]"]);
    }

    #[test]
    fn every_offending_field_is_listed() {
        let src = r#"{"directed": 1, "n": 2, "edges": [[0, 0], [5]], "objective": {"type": "additive", "weights": [-1]}, "k": 0, "root": 7, "extra": null}"#;
        let mut paths = schema_paths(src);
        paths.sort();
        assert_eq!(paths, vec!["directed", "edges[0]", "edges[1]", "extra", "k", "objective.weights", "objective.weights[0]", "root"]);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_instance(b"{\n  \"n\": 1,\n  oops\n}") {
            Err(InstanceError::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn g12_matches_printf() {
        let cases = [
            (1.0, "1"),
            (0.5, "0.5"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0, "0.666666666667"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (1e100, "1e+100"),
            (0.0, "0"),
            (999999999999.5, "1e+12"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g12(x), want, "{x}");
        }
    }

    #[test]
    fn graph_and_oracle_helpers() {
        let src = r#"{"directed": false, "n": 3, "edges": [[0, 1], [1, 2]], "objective": {"type": "coverage", "universe_size": 3, "sets": [[0], [1], [2]], "weights": [1, 2, 3]}, "k": 2, "root": 0}"#;
        let inst = parse_instance(src.as_bytes()).unwrap();
        let g = inst.graph().unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(inst.to_oracle().unwrap().value(&[1, 2]).unwrap(), 5.0);
    }
}
