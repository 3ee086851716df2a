use midrange_core::{
    diamond_midpoint, dist, examine_gap_candidate, find_gap_instance, geodesic_point,
    geometric_mean, solve, star_midpoint, vector_midrange, FeasibilityReport, GapInstance,
    GapSearchOptions, GeodesicKind, MetricKind, MidrangeProblem, SolverOptions, SpdMatrix, Verdict,
};
use serde_json::{json, Value};

use crate::io::{self, number, MatrixFile, ResultDocument};
use crate::{CliError, ErrorKind, MidpointKind};

pub fn parse_metric(name: &str) -> Result<MetricKind, CliError> {
    match name {
        "thompson" => Ok(MetricKind::Thompson),
        "riemannian" => Ok(MetricKind::Riemannian),
        _ => {
            let p = name
                .strip_prefix("p=")
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| CliError::validation(format!("unknown metric {name:?}")))?;
            Ok(MetricKind::p_norm(p)?)
        }
    }
}

fn load_matrices(path: &str) -> Result<MatrixFile, CliError> {
    io::parse_matrix_file(&io::read_source(path)?)
}

fn merge(doc: &mut ResultDocument, body: Value) {
    if let Value::Object(map) = body {
        for (k, v) in map {
            doc.output(&k, v);
        }
    }
}

pub fn distance(path: &str, a: &str, b: &str, metric: &str) -> Result<ResultDocument, CliError> {
    let kind = parse_metric(metric)?;
    let file = load_matrices(path)?;
    let (ma, mb) = (file.spd(a)?, file.spd(b)?);
    let mut doc = ResultDocument::new("distance", vec![a.into(), b.into()]);
    doc.output("metric", json!(metric));
    doc.output("distance", number(dist(&ma, &mb, kind)?));
    Ok(doc)
}

pub fn midpoint(
    path: &str,
    a: &str,
    b: &str,
    kind: MidpointKind,
    t: Option<f64>,
) -> Result<ResultDocument, CliError> {
    let file = load_matrices(path)?;
    let (ma, mb) = (file.spd(a)?, file.spd(b)?);
    let label = match kind {
        MidpointKind::Star => "star",
        MidpointKind::Geometric => "geometric",
        MidpointKind::Diamond => "diamond",
    };
    let m = match (kind, t) {
        (MidpointKind::Star, None) => star_midpoint(&ma, &mb)?,
        (MidpointKind::Geometric, None) => geometric_mean(&ma, &mb)?,
        (MidpointKind::Diamond, None) => diamond_midpoint(&ma, &mb)?,
        (MidpointKind::Star, Some(t)) => geodesic_point(&ma, &mb, t, GeodesicKind::Nussbaum)?,
        (MidpointKind::Geometric, Some(t)) => {
            geodesic_point(&ma, &mb, t, GeodesicKind::Riemannian)?
        }
        (MidpointKind::Diamond, Some(_)) => {
            return Err(CliError::validation(
                "the diamond midpoint has no geodesic; drop --t",
            ));
        }
    };
    let name = match t {
        None => format!("{label}({a},{b})"),
        Some(t) => format!("{label}({a},{b};t={t})"),
    };
    let mut doc = ResultDocument::new("midpoint", vec![a.into(), b.into()]);
    doc.output("kind", json!(label));
    doc.output("t", t.map_or(Value::Null, number));
    merge(&mut doc, io::matrix_outputs(file.n, &[(name, m.as_sym())]));
    let d_ab = dist(&ma, &mb, MetricKind::Thompson)?;
    doc.diagnostic("thompson_a_m", number(dist(&ma, &m, MetricKind::Thompson)?));
    doc.diagnostic("thompson_m_b", number(dist(&m, &mb, MetricKind::Thompson)?));
    doc.diagnostic("thompson_a_b", number(d_ab));
    Ok(doc)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Feasible => "feasible",
        Verdict::Infeasible => "infeasible",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn report_json(r: &FeasibilityReport) -> Value {
    json!({
        "t": number(r.t),
        "verdict": verdict_name(r.verdict),
        "proven": r.proven_infeasible(),
        "residual": number(r.residual),
        "threshold": number(r.threshold),
        "iterations": r.iters,
        "dual_bound": r.dual_bound.map_or(Value::Null, number),
    })
}

pub fn midrange(
    path: &str,
    vector: bool,
    tol: Option<f64>,
    max_iters: Option<usize>,
    strict: bool,
) -> Result<ResultDocument, CliError> {
    let text = io::read_source(path)?;
    if vector {
        let file = io::parse_vector_file(&text)?;
        let v = vector_midrange(&file.positive()?)?;
        let mut doc = ResultDocument::new(
            "midrange",
            file.vectors.iter().map(|v| v.name.clone()).collect(),
        );
        doc.output(
            "x",
            Value::Array(v.x.as_slice().iter().map(|&x| number(x)).collect()),
        );
        doc.output("cost", number(v.cost));
        doc.output("l", number(v.lower_bound));
        doc.output("attained_lower", json!(true));
        return Ok(doc);
    }

    let file = io::parse_matrix_file(&text)?;
    let defaults = SolverOptions::default();
    let options = SolverOptions {
        tol_t: tol.unwrap_or(defaults.tol_t),
        max_proj_iters: max_iters.unwrap_or(defaults.max_proj_iters),
        ..defaults
    };
    let ys: Vec<SpdMatrix> = file.all_spd()?;
    let s = solve(&MidrangeProblem::new(ys, options)?)?;

    let mut doc = ResultDocument::new("midrange", file.names());
    doc.output("t_star", number(s.t_star));
    doc.output("l", number(s.lower_bound));
    doc.output("u", number(s.upper_bound));
    doc.output("attained_lower", json!(s.attained_lower));
    doc.output("converged", json!(s.converged));
    doc.output("bracket", json!([number(s.bracket.0), number(s.bracket.1)]));
    merge(
        &mut doc,
        io::matrix_outputs(file.n, &[("x_star".into(), s.x_star.as_sym())]),
    );
    let iterations: usize = s.trace.iter().map(|r| r.iters).sum();
    doc.diagnostic("iterations", json!(iterations));
    doc.diagnostic(
        "feasibility_checks",
        Value::Array(s.trace.iter().map(report_json).collect()),
    );
    if strict && !s.converged {
        let message = format!(
            "the optimal cost is only known to lie in [{:.12}, {:.12}]",
            s.bracket.0, s.bracket.1
        );
        return Err(CliError::with_document(ErrorKind::Numerical, message, doc));
    }
    Ok(doc)
}

fn gap_document(found: &GapInstance, names: Vec<String>) -> ResultDocument {
    let mut doc = ResultDocument::new("find-gap", names.clone());
    doc.output("gap_instance", json!(true));
    doc.output("l", number(found.lower));
    doc.output("best_cost", number(found.best_cost));
    doc.output("gap", number(found.gap));
    doc.output("tested_t", number(found.tested_t));
    doc.output("proven_lower", found.dual_bound.map_or(Value::Null, number));
    doc.output("seed", json!(found.seed));
    doc.output("trial", json!(found.trial));
    let named: Vec<(String, &midrange_core::SymMatrix)> = names
        .into_iter()
        .zip(found.ys.iter().map(|y| y.as_sym()))
        .collect();
    merge(&mut doc, io::matrix_outputs(found.ys[0].dim(), &named));
    doc
}

pub fn find_gap(
    path: Option<&str>,
    dim: usize,
    count: usize,
    trials: usize,
    seed: u64,
    margin: f64,
) -> Result<ResultDocument, CliError> {
    let options = GapSearchOptions {
        dim,
        count,
        trials,
        seed,
        gap_margin: margin,
        ..GapSearchOptions::default()
    };
    if let Some(path) = path {
        let file = load_matrices(path)?;
        let ys = file.all_spd()?;
        return Ok(match examine_gap_candidate(ys.clone(), &options)? {
            Some(found) => gap_document(&found, file.names()),
            None => {
                let mut doc = ResultDocument::new("find-gap", file.names());
                doc.output("gap_instance", json!(false));
                doc.output("l", number(midrange_core::bounds(&ys)?.lower));
                doc
            }
        });
    }
    match find_gap_instance(&options) {
        Ok(found) => {
            let names = (1..=found.ys.len()).map(|k| format!("Y{k}")).collect();
            let mut doc = gap_document(&found, names);
            doc.diagnostic("trials_run", json!(found.trial + 1));
            Ok(doc)
        }
        Err(midrange_core::Error::SearchExhausted { trials }) => {
            let mut doc = ResultDocument::new("find-gap", Vec::new());
            doc.output("gap_instance", json!(false));
            doc.diagnostic("trials_run", json!(trials));
            doc.diagnostic("seed", json!(seed));
            let message = format!("no gap instance found in {trials} trials");
            Err(CliError::with_document(ErrorKind::Numerical, message, doc))
        }
        Err(e) => Err(e.into()),
    }
}
