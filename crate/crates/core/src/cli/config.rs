//! JSON run configuration.
//!
//! ```json
//! {
//!   "timescale": {"type": "finite", "points": [0, 1, 2, 3, 4, 5]},
//!   "frozen_argument": 3,
//!   "potential": {"type": "table", "values": [-3, 10, -5, 1]},
//!   "boundary": {"separated": {"h": 0.5, "H": 1}},
//!   "solver": {"tol": 1e-10, "rational": true},
//!   "command": "eigs"
//! }
//! ```
//!
//! Potentials: `{"type":"const","value":c}`, `{"type":"poly","coeffs":[c0,c1,..]}`
//! (ascending), `{"type":"table","values":[..],"points":[..]}` (values at the
//! points of `T^κ²` unless `points` is given) and
//! `{"type":"sampled","grid":[..],"values":[..]}` (linear interpolation).
//! Boundary: `{"general":{"a":[a11,a12,a21,a22],"b":[b11,b12,b21,b22]}}` or
//! `{"separated":{"h":h,"H":H}}` for `y^Δ(α) + h y(α) = 0`,
//! `y^Δ(β) - H y(β) = 0`.

use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::matrix::{bc_to_general, SeparatedBC};
use crate::problem::{BoundaryCoefficients, Potential, ProblemSpec};
use crate::timescale::TimeScale;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Eigs,
    Count,
    Matrix,
    Charfn,
    Asymptotics,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eigs => "eigs",
            Command::Count => "count",
            Command::Matrix => "matrix",
            Command::Charfn => "charfn",
            Command::Asymptotics => "asymptotics",
            Command::Verify => "verify",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "eigs" => Command::Eigs,
            "count" => Command::Count,
            "matrix" => Command::Matrix,
            "charfn" => Command::Charfn,
            "asymptotics" => Command::Asymptotics,
            "verify" => Command::Verify,
            other => return Err(format!("unknown command `{other}`")),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

/// Boundary conditions as written in the config.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundarySpec {
    General(BoundaryCoefficients),
    Separated(SeparatedBC),
}

impl BoundarySpec {
    pub fn coefficients(&self) -> BoundaryCoefficients {
        match self {
            BoundarySpec::General(bc) => *bc,
            BoundarySpec::Separated(s) => bc_to_general(s),
        }
    }
}

/// λ samples for `charfn`.
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl LambdaGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            LambdaGrid::List(v) => v.clone(),
            LambdaGrid::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

/// Rectangle `re.0 < Re λ < re.1`, `im.0 < Im λ < im.1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxSpec {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub lambda_max: Option<f64>,
    pub lambda_min: Option<f64>,
    pub n_max: usize,
    pub rational: bool,
    pub lambda_grid: Option<LambdaGrid>,
    pub count_box: Option<BoxSpec>,
    pub quad_points: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            lambda_max: None,
            lambda_min: None,
            n_max: 40,
            rational: false,
            lambda_grid: None,
            count_box: None,
            quad_points: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub spec: ProblemSpec,
    pub boundary: BoundarySpec,
    pub command: Option<Command>,
    pub solver: SolverOptions,
    pub output: OutputFormat,
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::config(join(path, key), "missing required field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::config(path, "expected an object"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| Error::config(path, "expected a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::config(path, "number must be finite"))
    }
}

fn numbers(v: &Value, path: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::config(path, "expected an array of numbers"))?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

fn row4(v: &Value, path: &str) -> Result<[f64; 4]> {
    let xs = numbers(v, path)?;
    xs.try_into()
        .map_err(|_| Error::config(path, "expected exactly 4 numbers"))
}

fn pair(v: &Value, path: &str) -> Result<(f64, f64)> {
    match numbers(v, path)?.as_slice() {
        [a, b] if a < b => Ok((*a, *b)),
        [_, _] => Err(Error::config(path, "expected [lo, hi] with lo < hi")),
        _ => Err(Error::config(path, "expected [lo, hi]")),
    }
}

fn parse_timescale(v: &Value) -> Result<TimeScale> {
    let path = "timescale";
    let obj = object(v, path)?;
    let kind = field(obj, "type", path)?
        .as_str()
        .ok_or_else(|| Error::config("timescale.type", "expected a string"))?;
    let ts = match kind {
        "finite" => TimeScale::finite(numbers(field(obj, "points", path)?, "timescale.points")?),
        "two_interval" => {
            let g = |k: &str| -> Result<f64> { number(field(obj, k, path)?, &join(path, k)) };
            TimeScale::two_interval(g("alpha")?, g("delta1")?, g("delta2")?, g("beta")?)
        }
        other => {
            return Err(Error::config(
                "timescale.type",
                format!("unknown time scale type `{other}` (expected finite or two_interval)"),
            ))
        }
    };
    ts.map_err(|e| Error::config(path, e.to_string()))
}

fn parse_potential(v: &Value, ts: &TimeScale) -> Result<Potential> {
    let path = "potential";
    let obj = object(v, path)?;
    let kind = field(obj, "type", path)?
        .as_str()
        .ok_or_else(|| Error::config("potential.type", "expected a string"))?;
    Ok(match kind {
        "const" => Potential::Constant(number(field(obj, "value", path)?, "potential.value")?),
        "poly" => Potential::Polynomial(numbers(field(obj, "coeffs", path)?, "potential.coeffs")?),
        "table" => {
            let values = numbers(field(obj, "values", path)?, "potential.values")?;
            let points = match obj.get("points") {
                Some(p) => numbers(p, "potential.points")?,
                None => match ts.points() {
                    Some(p) if p.len() >= 2 => p[..p.len() - 2].to_vec(),
                    _ => {
                        return Err(Error::config(
                            "potential.points",
                            "table potentials need explicit points on this time scale",
                        ))
                    }
                },
            };
            if points.len() != values.len() {
                return Err(Error::config(
                    "potential.values",
                    format!(
                        "expected {} values (one per point of T^κ²), got {}",
                        points.len(),
                        values.len()
                    ),
                ));
            }
            Potential::Table(points.into_iter().zip(values).collect())
        }
        "sampled" => {
            let grid = numbers(field(obj, "grid", path)?, "potential.grid")?;
            let values = numbers(field(obj, "values", path)?, "potential.values")?;
            if grid.len() != values.len() || grid.len() < 2 {
                return Err(Error::config(
                    "potential.values",
                    "grid and values must have the same length (at least 2)",
                ));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config("potential.grid", "grid must be strictly increasing"));
            }
            Potential::Sampled { grid, values }
        }
        other => {
            return Err(Error::config(
                "potential.type",
                format!("unknown potential type `{other}` (expected const, poly, table or sampled)"),
            ))
        }
    })
}

fn parse_boundary(v: &Value) -> Result<BoundarySpec> {
    let path = "boundary";
    let obj = object(v, path)?;
    match (obj.get("general"), obj.get("separated")) {
        (Some(g), None) => {
            let g = object(g, "boundary.general")?;
            Ok(BoundarySpec::General(BoundaryCoefficients::new(
                row4(field(g, "a", "boundary.general")?, "boundary.general.a")?,
                row4(field(g, "b", "boundary.general")?, "boundary.general.b")?,
            )))
        }
        (None, Some(s)) => {
            let s = object(s, "boundary.separated")?;
            Ok(BoundarySpec::Separated(SeparatedBC::new(
                number(field(s, "h", "boundary.separated")?, "boundary.separated.h")?,
                number(field(s, "H", "boundary.separated")?, "boundary.separated.H")?,
            )))
        }
        _ => Err(Error::config(
            path,
            "expected exactly one of `general` or `separated`",
        )),
    }
}

fn parse_solver(v: Option<&Value>) -> Result<SolverOptions> {
    let mut opts = SolverOptions::default();
    let Some(v) = v else {
        return Ok(opts);
    };
    let path = "solver";
    let obj = object(v, path)?;
    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "tol" | "lambda_max" | "lambda_min" | "n_max" | "rational" | "lambda_grid" | "box" | "quad_points"
        ) {
            return Err(Error::config(join(path, key), "unknown solver option"));
        }
    }
    if let Some(t) = obj.get("tol") {
        opts.tol = number(t, "solver.tol")?;
        if opts.tol <= 0.0 {
            return Err(Error::config("solver.tol", "must be positive"));
        }
    }
    if let Some(x) = obj.get("lambda_max") {
        opts.lambda_max = Some(number(x, "solver.lambda_max")?);
    }
    if let Some(x) = obj.get("lambda_min") {
        opts.lambda_min = Some(number(x, "solver.lambda_min")?);
    }
    if let Some(x) = obj.get("n_max") {
        opts.n_max = x
            .as_u64()
            .ok_or_else(|| Error::config("solver.n_max", "expected a nonnegative integer"))?
            as usize;
    }
    if let Some(x) = obj.get("quad_points") {
        opts.quad_points = x
            .as_u64()
            .ok_or_else(|| Error::config("solver.quad_points", "expected a nonnegative integer"))?
            as usize;
    }
    if let Some(x) = obj.get("rational") {
        opts.rational = x
            .as_bool()
            .ok_or_else(|| Error::config("solver.rational", "expected a boolean"))?;
    }
    if let Some(g) = obj.get("lambda_grid") {
        opts.lambda_grid = Some(if g.is_array() {
            LambdaGrid::List(numbers(g, "solver.lambda_grid")?)
        } else {
            let p = "solver.lambda_grid";
            let o = object(g, p)?;
            LambdaGrid::Range {
                start: number(field(o, "start", p)?, "solver.lambda_grid.start")?,
                stop: number(field(o, "stop", p)?, "solver.lambda_grid.stop")?,
                count: field(o, "count", p)?
                    .as_u64()
                    .ok_or_else(|| Error::config("solver.lambda_grid.count", "expected a nonnegative integer"))?
                    as usize,
            }
        });
    }
    if let Some(b) = obj.get("box") {
        let o = object(b, "solver.box")?;
        opts.count_box = Some(BoxSpec {
            re: pair(field(o, "re", "solver.box")?, "solver.box.re")?,
            im: pair(field(o, "im", "solver.box")?, "solver.box.im")?,
        });
    }
    Ok(opts)
}

fn problem_path(e: &Error) -> &'static str {
    match e {
        Error::InvalidProblem(m) if m.contains("frozen argument") => "frozen_argument",
        Error::InvalidProblem(m) if m.contains("potential") => "potential",
        Error::InvalidProblem(m) if m.contains("boundary") => "boundary",
        _ => "",
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| Error::config("", format!("invalid JSON: {e}")))?;
    let obj = object(&doc, "")?;
    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "timescale" | "frozen_argument" | "potential" | "boundary" | "solver" | "command" | "output"
        ) {
            return Err(Error::config(key.clone(), "unknown field"));
        }
    }
    let ts = parse_timescale(field(obj, "timescale", "")?)?;
    let a = number(field(obj, "frozen_argument", "")?, "frozen_argument")?;
    let q = parse_potential(field(obj, "potential", "")?, &ts)?;
    let boundary = parse_boundary(field(obj, "boundary", "")?)?;
    let solver = parse_solver(obj.get("solver"))?;
    let command = match obj.get("command") {
        None => None,
        Some(c) => Some(
            c.as_str()
                .ok_or_else(|| Error::config("command", "expected a string"))?
                .parse::<Command>()
                .map_err(|e| Error::config("command", e))?,
        ),
    };
    let output = match obj.get("output").map(|o| o.as_str()) {
        None => OutputFormat::Json,
        Some(Some("json")) => OutputFormat::Json,
        Some(Some("csv")) => OutputFormat::Csv,
        Some(Some("text")) => OutputFormat::Text,
        Some(_) => return Err(Error::config("output", "expected json, csv or text")),
    };
    let spec = ProblemSpec::new(ts, a, q, boundary.coefficients())
        .map_err(|e| Error::config(problem_path(&e), e.to_string()))?;
    let config = RunConfig {
        spec,
        boundary,
        command,
        solver,
        output,
    };
    if let Some(c) = command {
        validate_command(&config, c)?;
    }
    Ok(config)
}

/// Command-specific requirements, checked before dispatch.
pub fn validate_command(config: &RunConfig, command: Command) -> Result<()> {
    let two_interval = !config.spec.ts.is_finite();
    match command {
        Command::Matrix => {
            if !config.spec.ts.is_unit_uniform() {
                return Err(Error::config(
                    "timescale",
                    "`matrix` needs the uniform scale {0, 1, ..., n-1}",
                ));
            }
            if !matches!(config.boundary, BoundarySpec::Separated(_)) {
                return Err(Error::config(
                    "boundary",
                    "`matrix` needs separated boundary conditions",
                ));
            }
        }
        Command::Asymptotics if !two_interval => {
            return Err(Error::config(
                "timescale",
                "`asymptotics` needs a two-interval time scale",
            ))
        }
        _ => {}
    }
    Ok(())
}

impl RunConfig {
    /// Serialize into the config schema; parsing the result gives back an
    /// equal `RunConfig`.
    pub fn to_json(&self) -> Value {
        let ts = match &self.spec.ts {
            TimeScale::Finite(p) => json!({"type": "finite", "points": p}),
            TimeScale::TwoInterval {
                alpha,
                delta1,
                delta2,
                beta,
            } => json!({"type": "two_interval", "alpha": alpha, "delta1": delta1, "delta2": delta2, "beta": beta}),
        };
        let q = match &self.spec.q {
            Potential::Constant(c) => json!({"type": "const", "value": c}),
            Potential::Polynomial(c) => json!({"type": "poly", "coeffs": c}),
            Potential::Table(pairs) => json!({
                "type": "table",
                "points": pairs.iter().map(|p| p.0).collect::<Vec<_>>(),
                "values": pairs.iter().map(|p| p.1).collect::<Vec<_>>(),
            }),
            Potential::Sampled { grid, values } => {
                json!({"type": "sampled", "grid": grid, "values": values})
            }
        };
        let boundary = match &self.boundary {
            BoundarySpec::General(bc) => json!({"general": {"a": bc.a, "b": bc.b}}),
            BoundarySpec::Separated(s) => json!({"separated": {"h": s.h, "H": s.big_h}}),
        };
        let s = &self.solver;
        let mut solver = json!({
            "tol": s.tol,
            "n_max": s.n_max,
            "rational": s.rational,
            "quad_points": s.quad_points,
        });
        let so = solver.as_object_mut().expect("object");
        if let Some(x) = s.lambda_max {
            so.insert("lambda_max".into(), json!(x));
        }
        if let Some(x) = s.lambda_min {
            so.insert("lambda_min".into(), json!(x));
        }
        match &s.lambda_grid {
            Some(LambdaGrid::List(v)) => {
                so.insert("lambda_grid".into(), json!(v));
            }
            Some(LambdaGrid::Range { start, stop, count }) => {
                so.insert(
                    "lambda_grid".into(),
                    json!({"start": start, "stop": stop, "count": count}),
                );
            }
            None => {}
        }
        if let Some(b) = s.count_box {
            so.insert("box".into(), json!({"re": [b.re.0, b.re.1], "im": [b.im.0, b.im.1]}));
        }
        let mut doc = json!({
            "timescale": ts,
            "frozen_argument": self.spec.a,
            "potential": q,
            "boundary": boundary,
            "solver": solver,
            "output": match self.output {
                OutputFormat::Json => "json",
                OutputFormat::Csv => "csv",
                OutputFormat::Text => "text",
            },
        });
        if let Some(c) = self.command {
            doc["command"] = json!(c.name());
        }
        doc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIXED_SPECTRUM: &str = r#"{
        "timescale": {"type": "finite", "points": [0, 1, 2, 3, 4, 5]},
        "frozen_argument": 3,
        "potential": {"type": "table", "values": [-3, 10, -5, 1]},
        "boundary": {"separated": {"h": 0.5, "H": 1}}
    }"#;

    #[test]
    fn example_config_parses() {
        let c = parse_config(MIXED_SPECTRUM).unwrap();
        assert_eq!(c.spec.q_at(1.0), 10.0);
        assert_eq!(c.spec.bc.b, [0.0, 0.0, -1.0, 1.0]);
        assert_eq!(c.solver.tol, 1e-10);
    }

    #[test]
    fn rejections_name_the_field() {
        let bad = MIXED_SPECTRUM.replace("\"frozen_argument\": 3", "\"frozen_argument\": 5");
        match parse_config(&bad) {
            Err(Error::Config { path, message }) => {
                assert_eq!(path, "frozen_argument");
                assert!(message.contains("T^κ"));
            }
            other => panic!("{other:?}"),
        }
        let bad = r#"{"timescale": {"type": "two_interval", "alpha": 0, "delta1": 2, "delta2": 1, "beta": 3},
            "frozen_argument": 0.5, "potential": {"type": "const", "value": 0},
            "boundary": {"general": {"a": [0,1,0,0], "b": [0,0,0,1]}}}"#;
        assert!(matches!(parse_config(bad), Err(Error::Config { path, .. }) if path == "timescale"));
        let bad = MIXED_SPECTRUM.replace("\"values\": [-3, 10, -5, 1]", "\"values\": [1, 2]");
        assert!(matches!(parse_config(&bad), Err(Error::Config { path, .. }) if path == "potential.values"));
    }

    #[test]
    fn round_trip() {
        let mut c = parse_config(MIXED_SPECTRUM).unwrap();
        c.solver.lambda_grid = Some(LambdaGrid::Range { start: -1.0, stop: 2.5, count: 7 });
        c.command = Some(Command::Matrix);
        let again = parse_config(&c.to_json().to_string()).unwrap();
        assert_eq!(c, again);
    }
}
