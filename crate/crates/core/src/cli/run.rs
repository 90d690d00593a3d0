use num_complex::Complex64;
use serde_json::{json, Value};

use super::config::{validate_command, BoundarySpec, BoxSpec, Command, LambdaGrid, RunConfig};
use super::report::{fmt_num, spectrum_json, spectrum_table, Report, Table};
use super::verify;
use crate::continuum::{self, asymptotic_table, count_eigs_in_box, find_real_eigs};
use crate::error::{Error, Result};
use crate::finite::{self, eigs_finite, predicted_count, Arithmetic};
use crate::matrix::{build_q, eigs_dense, exact_rows};
use crate::scalar::{Rational, Scalar};
use crate::spectrum::matching_distance;
use crate::timescale::TimeScale;

pub fn arithmetic(config: &RunConfig) -> Arithmetic {
    if config.solver.rational {
        Arithmetic::Rational
    } else {
        Arithmetic::Float
    }
}

/// Upper end of real-axis scans: the configured value, or enough to reach
/// index `n_max + 1` of the predicted eigenvalue grid, stopping midway
/// between grid points so box edges avoid zeros.
pub fn lambda_max(config: &RunConfig) -> f64 {
    if let Some(x) = config.solver.lambda_max {
        return x;
    }
    match config.spec.ts {
        TimeScale::TwoInterval { delta2, beta, .. } => {
            let s = std::f64::consts::PI / (2.0 * (beta - delta2));
            ((config.solver.n_max as f64 + 0.5) * s).powi(2)
        }
        TimeScale::Finite(_) => 100.0,
    }
}

/// Lower end of real-axis scans; by default `-min(λ_max, 100)`.
pub fn lambda_min(config: &RunConfig) -> f64 {
    config
        .solver
        .lambda_min
        .unwrap_or_else(|| -lambda_max(config).abs().min(100.0))
}

fn exact_poly_strings(p: &crate::poly::QPoly) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .map(|c| json!(c.exact_string().unwrap_or_default()))
            .collect(),
    )
}

fn eigs(config: &RunConfig) -> Result<Report> {
    let spec = &config.spec;
    if spec.ts.is_finite() {
        let arith = arithmetic(config);
        let mut report = match eigs_finite(spec, config.solver.tol, arith) {
            Ok(sp) => Report::new(
                json!({
                    "eigenvalues": spectrum_json(&sp),
                    "count": sp.count(),
                    "degenerate": false,
                }),
                spectrum_table(&sp),
            ),
            Err(Error::Degenerate) => {
                let mut r = Report::new(
                    json!({
                        "eigenvalues": [],
                        "count": null,
                        "degenerate": true,
                        "message": Error::Degenerate.to_string(),
                    }),
                    spectrum_table(&Default::default()),
                );
                r.notes.push(format!("degenerate: {}", Error::Degenerate));
                r
            }
            Err(e) => return Err(e),
        };
        if arith == Arithmetic::Rational {
            let p = finite::char_poly::<Rational>(spec)?;
            report.json["char_poly"] = exact_poly_strings(&p);
        }
        return Ok(report);
    }
    let (lo, hi) = (lambda_min(config), lambda_max(config));
    let scan = find_real_eigs(spec, lo, hi, config.solver.tol)?;
    let mut report = Report::new(
        json!({
            "eigenvalues": spectrum_json(&scan.spectrum),
            "count": scan.spectrum.count(),
            "degenerate": false,
            "scan": {"lambda_min": lo, "lambda_max": hi},
            "possible_double_roots": scan.possible_double_roots,
        }),
        spectrum_table(&scan.spectrum),
    );
    report.notes.push(format!("real eigenvalues in [{lo}, {hi}]"));
    for x in &scan.possible_double_roots {
        report.notes.push(format!("possible double root near {x}"));
    }
    Ok(report)
}

fn count(config: &RunConfig) -> Result<Report> {
    let spec = &config.spec;
    if spec.ts.is_finite() {
        let arith = arithmetic(config);
        let p = predicted_count(spec, arith)?;
        let degree = match arith {
            Arithmetic::Rational => finite::char_poly::<Rational>(spec)?.degree(),
            Arithmetic::Float => finite::char_poly::<Complex64>(spec)?
                .degree_and_leading()
                .map(|(d, _)| d),
        };
        let mut body = json!({
            "n": p.n,
            "detA": p.det_a,
            "predicted": p.count,
            "exact": p.exact,
            "degree": degree,
        });
        if let Some(d) = &p.det_a_exact {
            body["detA_exact"] = json!(d.exact_string());
        }
        let mut t = Table::new(&["n", "detA", "predicted", "exact", "degree"]);
        t.push(vec![
            p.n.to_string(),
            fmt_num(p.det_a),
            p.count.to_string(),
            p.exact.to_string(),
            degree.map_or("none".into(), |d| d.to_string()),
        ]);
        let mut r = Report::new(body, t);
        r.notes.push(if p.exact {
            format!("det A != 0: exactly {} eigenvalues", p.count)
        } else {
            format!("det A = 0: fewer than {} eigenvalues", p.count)
        });
        return Ok(r);
    }
    let b = config.solver.count_box.unwrap_or(BoxSpec {
        re: (lambda_min(config), lambda_max(config)),
        im: (-5.0, 5.0),
    });
    let k = count_eigs_in_box(spec, b.re, b.im, config.solver.quad_points)?;
    let mut t = Table::new(&["re_lo", "re_hi", "im_lo", "im_hi", "count"]);
    t.push(vec![
        fmt_num(b.re.0),
        fmt_num(b.re.1),
        fmt_num(b.im.0),
        fmt_num(b.im.1),
        k.to_string(),
    ]);
    Ok(Report::new(
        json!({"box": {"re": [b.re.0, b.re.1], "im": [b.im.0, b.im.1]}, "count": k}),
        t,
    ))
}

/// Potential values at `0, ..., n-3` and the frozen index.
pub(crate) fn matrix_inputs(config: &RunConfig) -> Result<(usize, Vec<f64>, usize)> {
    let n = config.spec.n_points().unwrap_or(0);
    let q: Vec<f64> = (0..n.saturating_sub(2)).map(|i| config.spec.q_at(i as f64)).collect();
    Ok((n, q, config.spec.a as usize))
}

fn matrix(config: &RunConfig) -> Result<Report> {
    validate_command(config, Command::Matrix)?;
    let BoundarySpec::Separated(bc) = config.boundary else {
        unreachable!("validated above");
    };
    let (n, q, a) = matrix_inputs(config)?;
    let m = build_q(n, &bc, &q, a)?;
    let sp = eigs_dense(&m, config.solver.tol)?;
    let poly = eigs_finite(&config.spec, config.solver.tol, Arithmetic::Rational)?;
    let distance = matching_distance(&sp.flatten(), &poly.flatten());
    let mut body = json!({
        "n": n,
        "dim": m.dim(),
        "Q": m.rows(),
        "trace": m.trace(),
        "eigenvalues": spectrum_json(&sp),
        "count": sp.count(),
        "polynomial_path_distance": distance,
        "agrees_with_polynomial_path": distance <= 1e-6,
    });
    if config.solver.rational {
        body["Q_exact"] = json!(exact_rows(&m));
    }
    let mut t = Table {
        header: (0..m.dim()).map(|j| format!("col{j}")).collect(),
        rows: Vec::new(),
    };
    for row in m.rows() {
        t.push(row.into_iter().map(fmt_num).collect());
    }
    let mut r = Report::new(body, t);
    r.notes.push(format!("Q ({0}x{0}), trace {1}", m.dim(), m.trace()));
    for e in &sp.eigenvalues {
        r.notes.push(format!(
            "eigenvalue {} {}i multiplicity {}",
            fmt_num(e.value.re),
            fmt_num(e.value.im),
            e.multiplicity
        ));
    }
    r.notes.push(format!("polynomial path distance {distance:e}"));
    Ok(r)
}

fn charfn(config: &RunConfig) -> Result<Report> {
    let spec = &config.spec;
    let grid = config
        .solver
        .lambda_grid
        .clone()
        .unwrap_or(LambdaGrid::Range {
            start: lambda_min(config),
            stop: lambda_max(config),
            count: 101,
        })
        .points();
    let values: Vec<Complex64> = grid
        .iter()
        .map(|&l| {
            let z = Complex64::new(l, 0.0);
            if spec.ts.is_finite() {
                finite::char_value(spec, z)
            } else {
                continuum::char_fn(spec, z)
            }
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["lambda", "re", "im"]);
    let mut samples = Vec::with_capacity(grid.len());
    for (l, v) in grid.iter().zip(&values) {
        t.push(vec![fmt_num(*l), fmt_num(v.re), fmt_num(v.im)]);
        samples.push(json!({"lambda": l, "re": v.re, "im": v.im}));
    }
    Ok(Report::new(json!({ "samples": samples }), t))
}

fn asymptotics(config: &RunConfig) -> Result<Report> {
    validate_command(config, Command::Asymptotics)?;
    let spec = &config.spec;
    let n_max = config.solver.n_max;
    let scan = find_real_eigs(spec, lambda_min(config), lambda_max(config), config.solver.tol)?;
    let table = asymptotic_table(spec, &scan.spectrum, n_max)?;
    let lo = 10.min(n_max);
    let slope = table.decay_slope(lo, n_max);
    let spacing = table.spacing_deviation(lo, n_max);
    let mut t = Table::new(&["n", "predicted_sqrt", "computed_sqrt", "residual", "n_residual"]);
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            t.push(vec![
                r.n.to_string(),
                fmt_num(r.predicted_sqrt),
                fmt_num(r.computed_sqrt),
                fmt_num(r.residual),
                fmt_num(r.scaled_residual),
            ]);
            json!({
                "n": r.n,
                "predicted_sqrt": r.predicted_sqrt,
                "computed_sqrt": r.computed_sqrt,
                "residual": r.residual,
                "n_residual": r.scaled_residual,
            })
        })
        .collect();
    let mut rep = Report::new(
        json!({
            "rows": rows,
            "spacing": table.spacing,
            "banner": table.banner,
            "truncated": table.truncated,
            "decay_slope": slope,
            "max_spacing_deviation": spacing,
            "window": [lo, n_max],
        }),
        t,
    );
    if let Some(b) = &table.banner {
        rep.notes.push(b.clone());
    }
    if table.truncated {
        rep.notes.push(format!("table truncated: fewer than {n_max} eigenvalues; raise lambda_max"));
    }
    rep.notes.push(format!(
        "spacing pi/(2(beta - delta2)) = {}; decay slope {slope:?}; max spacing deviation {spacing:?}",
        table.spacing
    ));
    Ok(rep)
}

/// Run one command.
pub fn run(config: &RunConfig, command: Command) -> Result<Report> {
    validate_command(config, command)?;
    match command {
        Command::Eigs => eigs(config),
        Command::Count => count(config),
        Command::Matrix => matrix(config),
        Command::Charfn => charfn(config),
        Command::Asymptotics => asymptotics(config),
        Command::Verify => verify::run(config),
    }
}
