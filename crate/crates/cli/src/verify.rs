//! Property suites run on the matrices of a user file.
//!
//! Each property reports the number of cases it covered and its worst
//! residual; a property passes when that residual is at most `TOL`. A
//! property with no applicable case (say, `order` on a file without
//! ordered pairs) passes vacuously with `cases = 0`.

use midrange_core::random::{random_invertible, seeded};
use midrange_core::{
    diamond_midpoint, dist, geometric_mean, star_midpoint, MetricKind, SpdMatrix, SymMatrix,
    TOL_METRIC,
};
use serde_json::{json, Value};

use crate::io::{self, number, ResultDocument};
use crate::{CliError, ErrorKind, Suite};

const TOL: f64 = TOL_METRIC;
/// Scalars of the scaling checks besides the seeded random pair.
const SCALES: (f64, f64) = (2.0, 0.5);

struct Property {
    name: &'static str,
    cases: usize,
    worst: f64,
}

impl Property {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            worst: 0.0,
        }
    }

    fn record(&mut self, residual: f64) {
        self.cases += 1;
        self.worst = self.worst.max(residual);
    }

    fn passed(&self) -> bool {
        self.worst <= TOL
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed(),
            "cases": self.cases,
            "max_residual": number(self.worst),
        })
    }
}

type Outcome = Result<Vec<Property>, CliError>;

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// `‖a − b‖_F / max(‖a‖_F, ‖b‖_F, 1)`
fn rel_diff(a: &SymMatrix, b: &SymMatrix) -> f64 {
    (a.matrix() - b.matrix()).norm() / a.frobenius_norm().max(b.frobenius_norm()).max(1.0)
}

fn thompson(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64, CliError> {
    Ok(dist(a, b, MetricKind::Thompson)?)
}

fn metric_suite(ys: &[SpdMatrix], seed: u64) -> Outcome {
    let mut identity = Property::new("identity");
    let mut symmetry = Property::new("symmetry");
    let mut triangle = Property::new("triangle_inequality");
    let mut invariance = Property::new("affine_invariance");
    let x = random_invertible(&mut seeded(seed), ys[0].dim());
    let moved: Vec<SpdMatrix> = ys
        .iter()
        .map(|y| y.congruence(&x))
        .collect::<Result<_, _>>()?;
    for y in ys {
        identity.record(thompson(y, y)?);
    }
    for (i, j) in pairs(ys.len()) {
        for kind in [MetricKind::Thompson, MetricKind::Riemannian] {
            let d = dist(&ys[i], &ys[j], kind)?;
            symmetry.record((d - dist(&ys[j], &ys[i], kind)?).abs());
            invariance.record((dist(&moved[i], &moved[j], kind)? - d).abs() / d.max(1.0));
        }
    }
    for i in 0..ys.len() {
        for (j, k) in pairs(ys.len()) {
            if i == j || i == k {
                continue;
            }
            // every vertex of the triangle {i, j, k} takes a turn in the middle
            let excess =
                thompson(&ys[j], &ys[k])? - thompson(&ys[j], &ys[i])? - thompson(&ys[i], &ys[k])?;
            triangle.record(excess.max(0.0));
        }
    }
    Ok(vec![identity, symmetry, triangle, invariance])
}

fn midpoint_suite(ys: &[SpdMatrix], seed: u64) -> Outcome {
    let mut star = Property::new("star_is_thompson_midpoint");
    let mut mean = Property::new("geometric_mean_is_thompson_midpoint");
    let mut mean2 = Property::new("geometric_mean_is_riemannian_midpoint");
    let mut diamond = Property::new("diamond_is_thompson_midpoint");
    let mut swap = Property::new("star_symmetry");
    let mut affine = Property::new("star_affine_equivariance");
    let x = random_invertible(&mut seeded(seed), ys[0].dim());
    let halves = |a: &SpdMatrix, b: &SpdMatrix, m: &SpdMatrix, kind| -> Result<f64, CliError> {
        let half = 0.5 * dist(a, b, kind)?;
        Ok((dist(a, m, kind)? - half)
            .abs()
            .max((dist(m, b, kind)? - half).abs()))
    };
    for (i, j) in pairs(ys.len()) {
        let (a, b) = (&ys[i], &ys[j]);
        let s = star_midpoint(a, b)?;
        let g = geometric_mean(a, b)?;
        star.record(halves(a, b, &s, MetricKind::Thompson)?);
        mean.record(halves(a, b, &g, MetricKind::Thompson)?);
        mean2.record(halves(a, b, &g, MetricKind::Riemannian)?);
        diamond.record(halves(
            a,
            b,
            &diamond_midpoint(a, b)?,
            MetricKind::Thompson,
        )?);
        swap.record(rel_diff(s.as_sym(), star_midpoint(b, a)?.as_sym()));
        let moved = star_midpoint(&a.congruence(&x)?, &b.congruence(&x)?)?;
        affine.record(rel_diff(moved.as_sym(), &s.as_sym().congruence(&x)?));
    }
    Ok(vec![star, mean, mean2, diamond, swap, affine])
}

/// Relative amount by which `lo ⪯ hi` fails.
fn order_violation(lo: &SpdMatrix, hi: &SpdMatrix) -> Result<f64, CliError> {
    let gap = hi.as_sym().sub(lo.as_sym()).min_eigenvalue()?;
    Ok((-gap / hi.lambda_max()?).max(0.0))
}

fn order_suite(ys: &[SpdMatrix]) -> Outcome {
    let mut star = Property::new("star_between_ordered_pair");
    let mut mean = Property::new("geometric_mean_between_ordered_pair");
    for i in 0..ys.len() {
        for j in 0..ys.len() {
            if i == j || order_violation(&ys[i], &ys[j])? > 0.0 {
                continue;
            }
            let (a, b) = (&ys[i], &ys[j]);
            for (m, p) in [
                (star_midpoint(a, b)?, &mut star),
                (geometric_mean(a, b)?, &mut mean),
            ] {
                p.record(order_violation(a, &m)?.max(order_violation(&m, b)?));
            }
        }
    }
    Ok(vec![star, mean])
}

fn scaling_suite(ys: &[SpdMatrix], seed: u64) -> Outcome {
    use rand::Rng;
    let mut rng = seeded(seed);
    let random = (rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0));
    let mut star = Property::new("star_geometric_scaling");
    let mut mean = Property::new("geometric_mean_scaling");
    for (i, j) in pairs(ys.len()) {
        let (a, b) = (&ys[i], &ys[j]);
        let (s, g) = (star_midpoint(a, b)?, geometric_mean(a, b)?);
        for (ca, cb) in [SCALES, random] {
            let (sa, sb) = (a.scale(ca)?, b.scale(cb)?);
            let factor = (ca * cb).sqrt();
            star.record(rel_diff(
                star_midpoint(&sa, &sb)?.as_sym(),
                &s.as_sym().scale(factor),
            ));
            mean.record(rel_diff(
                geometric_mean(&sa, &sb)?.as_sym(),
                &g.as_sym().scale(factor),
            ));
        }
    }
    Ok(vec![star, mean])
}

pub fn verify(path: &str, suite: Suite, seed: u64) -> Result<ResultDocument, CliError> {
    let file = io::parse_matrix_file(&io::read_source(path)?)?;
    let ys = file.all_spd()?;
    let mut sections = Vec::new();
    let wanted = |s: Suite| suite == s || suite == Suite::All;
    if wanted(Suite::Metric) {
        sections.push(("metric", metric_suite(&ys, seed)?));
    }
    if wanted(Suite::Midpoint) {
        sections.push(("midpoint", midpoint_suite(&ys, seed)?));
    }
    if wanted(Suite::Order) {
        sections.push(("order", order_suite(&ys)?));
    }
    if wanted(Suite::Scaling) {
        sections.push(("scaling", scaling_suite(&ys, seed)?));
    }

    let mut doc = ResultDocument::new("verify", file.names());
    let mut failed = Vec::new();
    let mut results = serde_json::Map::new();
    for (name, props) in &sections {
        failed.extend(
            props
                .iter()
                .filter(|p| !p.passed())
                .map(|p| format!("{name}.{}", p.name)),
        );
        results.insert(
            name.to_string(),
            Value::Array(props.iter().map(Property::to_json).collect()),
        );
    }
    doc.output("suites", Value::Object(results));
    doc.output("all_passed", json!(failed.is_empty()));
    doc.diagnostic("tolerance", number(TOL));
    doc.diagnostic("seed", json!(seed));
    if !failed.is_empty() {
        let message = format!("failed properties: {}", failed.join(", "));
        return Err(CliError::with_document(
            ErrorKind::PropertyFailed,
            message,
            doc,
        ));
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    #[test]
    fn suites_pass_on_a_small_ensemble() {
        let ys = [diag(&[1.0, 2.0]), diag(&[3.0, 1.0]), diag(&[2.0, 5.0])];
        for props in [
            metric_suite(&ys, 1).unwrap(),
            midpoint_suite(&ys, 1).unwrap(),
            order_suite(&ys).unwrap(),
            scaling_suite(&ys, 1).unwrap(),
        ] {
            for p in props {
                assert!(p.passed(), "{} residual {}", p.name, p.worst);
            }
        }
    }

    #[test]
    fn order_suite_only_counts_ordered_pairs() {
        // diag(1, 2) ⪯ diag(3, 5); diag(4, 1) is ordered with neither
        let ys = [diag(&[1.0, 2.0]), diag(&[3.0, 5.0]), diag(&[4.0, 1.0])];
        let props = order_suite(&ys).unwrap();
        assert!(props.iter().all(|p| p.cases == 1));
    }

    #[test]
    fn triangle_covers_every_middle_vertex() {
        let ys = [diag(&[1.0]), diag(&[2.0]), diag(&[4.0])];
        let props = metric_suite(&ys, 0).unwrap();
        let triangle = props
            .iter()
            .find(|p| p.name == "triangle_inequality")
            .unwrap();
        assert_eq!(triangle.cases, 3);
        assert!(triangle.worst <= 1e-15);
    }
}
