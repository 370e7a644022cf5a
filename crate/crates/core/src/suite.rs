//! The verification suite: every identity and inequality checked on built-in
//! fixtures and on seeded random windows.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use crate::cheeger::{
    cheeger_enumerate, cheeger_parametric_cut, coarea_check, evaluate_ratio, gamma_k, level_set_integrals,
    verify_inequalities, Ratio, VertexMeasure,
};
use crate::dtn::{assemble_dtn, assemble_dtn_by_extension, blowup_spectrum, dirichlet_laplacian_spectrum, dtn_spectrum};
use crate::error::Result;
use crate::exhaustion::{ExhaustionSequence, RegularTree};
use crate::graph::{build_domain, make_window, Domain, VertexId, WeightedGraph, Window};
use crate::harmonic::{capacity, dirichlet_energy, green_residual, harmonic_extension, total_weight, BoundaryData};
use crate::io::{serialize_f64, write_graph};
use crate::random::{random_instance, RandomConfig};

/// Identity tolerance, multiplied by the problem scale ‖f‖∞ · total weight.
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    /// Soft assertions are reported but do not fail an instance.
    pub hard: bool,
    pub passed: bool,
    /// Distance to failure; negative when failed.
    #[serde(serialize_with = "serialize_f64")]
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub label: String,
    pub size: usize,
    pub boundary: usize,
    pub sigma: Vec<f64>,
    #[serde(serialize_with = "serialize_f64")]
    pub h: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub h_j: f64,
    /// min_k σ_k k⁶ / h_k.
    pub c_hat: Option<f64>,
    /// min_k λ_{k,D} k⁶ / Γ_k with ν = d.
    pub c_hat_gamma: Option<f64>,
    pub assertions: Vec<Assertion>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed || !a.hard)
    }

    /// Failed hard assertions.
    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed && a.hard)
    }

    /// Failed soft assertions.
    pub fn violations(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed && !a.hard)
    }
}

struct Recorder(Vec<Assertion>);

impl Recorder {
    /// |residual| ≤ tol.
    fn near(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        let slack = tol - residual.abs();
        self.0.push(Assertion {
            name: name.into(),
            hard: true,
            passed: slack >= 0.0,
            slack,
        });
    }

    /// lhs ≤ rhs + tol.
    fn le(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) {
        self.le_with(name, lhs, rhs, tol, true);
    }

    fn le_with(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, tol: f64, hard: bool) {
        let slack = if rhs == f64::INFINITY && lhs.is_finite() {
            f64::INFINITY
        } else {
            rhs - lhs
        };
        self.0.push(Assertion {
            name: name.into(),
            hard,
            passed: slack + tol >= 0.0,
            slack,
        });
    }
}

/// Deterministic signed boundary data.
fn probe_data(window: &Window<'_>) -> Result<BoundaryData> {
    let values = (0..window.boundary_len()).map(|i| (1.7 * i as f64 + 0.3).cos()).collect();
    BoundaryData::new(window, values)
}

/// Runs every per-window check. `k_max` bounds the higher orders.
pub fn check_window(window: &Window<'_>, label: &str, k_max: usize) -> Result<InstanceReport> {
    let mut rec = Recorder(Vec::new());
    let p = window.boundary_len();
    let n = window.len();
    let weight = total_weight(window).max(1.0);

    // DtN assembly
    let form = assemble_dtn(window)?;
    let direct = assemble_dtn_by_extension(window)?;
    let scale = IDENTITY_TOL * weight;
    let mut schur_gap: f64 = 0.0;
    let mut asym: f64 = 0.0;
    for i in 0..p {
        for j in 0..p {
            schur_gap = schur_gap.max((form.form.get(i, j) - direct[i][j]).abs());
            asym = asym.max((direct[i][j] - direct[j][i]).abs());
        }
    }
    rec.near("dtn_schur_equals_extension", schur_gap, scale);
    rec.near("dtn_symmetric", asym, scale);

    // spectra
    let sigma = dtn_spectrum(window)?;
    let lambda = dirichlet_laplacian_spectrum(window)?;
    for (k, &s) in sigma.iter().enumerate() {
        rec.le(format!("sigma_{}_nonnegative", k + 1), 0.0, s, IDENTITY_TOL);
        rec.le(format!("sigma_{}_at_most_one", k + 1), s, 1.0, IDENTITY_TOL);
        if let Some(&l) = lambda.get(k) {
            rec.le(format!("sigma_{}_ge_lambda_D", k + 1), l, s, IDENTITY_TOL);
        }
    }
    let alias = blowup_spectrum(window, 1.0)?;
    let alias_gap = alias.iter().zip(&lambda).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    rec.near("blowup_r1_equals_dirichlet", alias_gap, 0.0);

    // harmonic extension and capacity
    let f = probe_data(window)?;
    let sup = f.sup_norm().max(1.0);
    let tol = IDENTITY_TOL * sup * weight;
    let u = harmonic_extension(window, &f)?;
    let again = harmonic_extension(window, &f)?;
    let drift = u.values.iter().zip(&again.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    rec.near("extension_unique", drift, 1e-12 * sup);
    let (lo, hi) = f.values().iter().fold((0.0f64, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let worst = u.values[p..n]
        .iter()
        .map(|&v| (lo - v).max(v - hi))
        .fold(f64::NEG_INFINITY, f64::max);
    if n > p {
        rec.le("maximum_principle", worst, 0.0, 1e-12 * sup);
    }
    let g: Vec<f64> = (0..window.closure_len()).map(|i| (0.9 * i as f64).sin()).collect();
    rec.near("green_formula", green_residual(window, &u.values, &g)?, tol);
    let mut quad = 0.0;
    for i in 0..p {
        for j in 0..p {
            quad += f.values()[i] * form.form.get(i, j) * f.values()[j];
        }
    }
    let cap = capacity(window, &f)?;
    let energy = dirichlet_energy(window, &u.values)?;
    rec.near("dtn_form_equals_capacity", quad - cap, tol);
    rec.near("capacity_equals_energy", cap - energy, tol);
    rec.le("capacity_at_most_norm", cap, f.norm_squared(window), tol);

    // level sets of |u_f|
    let abs: Vec<f64> = u.values.iter().map(|v| v.abs()).collect();
    rec.near("coarea", coarea_check(window, &abs)?.gap, tol);
    let (all, bdry) = level_set_integrals(window, &abs)?;
    rec.near("level_set_measure", all.gap, tol);
    rec.near("level_set_boundary_measure", bdry.gap, tol);

    // Cheeger constants
    let (h, h_j) = cheeger_enumerate(window)?;
    let cut_h = cheeger_parametric_cut(window, Ratio::Classical)?;
    let cut_j = cheeger_parametric_cut(window, Ratio::Jammes)?;
    rec.near("h_enumeration_equals_cut", h.value - cut_h.value, IDENTITY_TOL);
    rec.near("h_J_enumeration_equals_cut", h_j.value - cut_j.value, IDENTITY_TOL);
    rec.near("h_witness_reproduces", evaluate_ratio(window, &h.witness[0], Ratio::Classical)? - h.value, 0.0);
    rec.near("h_J_witness_reproduces", evaluate_ratio(window, &h_j.witness[0], Ratio::Jammes)? - h_j.value, 0.0);
    rec.le("h_J_ge_h", h.value, h_j.value, 0.0);

    // inequalities
    let report = verify_inequalities(window, k_max)?;
    rec.le("sandwich_lower", h.value * h_j.value / 2.0, sigma[0], IDENTITY_TOL);
    rec.le("sandwich_upper", sigma[0], h_j.value, IDENTITY_TOL);
    for c in report.higher.iter().filter(|c| c.k >= 2) {
        // indicators of adjacent sets are not D-orthogonal, so only the doubled
        // bound is guaranteed
        rec.le_with(format!("sigma_{}_le_h_J^{}", c.k, c.k), c.sigma, c.h_j_k.value, IDENTITY_TOL, false);
        rec.le(format!("sigma_{}_le_2h_J^{}", c.k, c.k), c.sigma, 2.0 * c.h_j_k.value, IDENTITY_TOL);
    }

    // Γ_k against the Dirichlet spectrum, reported only
    let nu = VertexMeasure::from_domain(window);
    let mut c_hat_gamma: Option<f64> = None;
    for k in 1..=k_max.min(n) {
        let gamma = match gamma_k(window, k, &nu) {
            Ok(g) => g.value,
            Err(e) if e.is_budget() => break,
            Err(e) => return Err(e),
        };
        if gamma.is_finite() && gamma > 0.0 {
            let c = lambda[k - 1] * (k as f64).powi(6) / gamma;
            c_hat_gamma = Some(c_hat_gamma.map_or(c, |m| m.min(c)));
        }
    }

    Ok(InstanceReport {
        label: label.to_string(),
        size: n,
        boundary: p,
        sigma,
        h: h.value,
        h_j: h_j.value,
        c_hat: report.c_hat,
        c_hat_gamma,
        assertions: rec.0,
    })
}

/// A named fixture with reference values.
pub struct Fixture {
    pub name: &'static str,
    pub domain: Domain,
    pub members: Vec<VertexId>,
    /// Expected (quantity, value) pairs.
    pub expected: Vec<(&'static str, f64)>,
}

/// The path 0 – 1 – … – 6 with δΩ = {0} and W = {0, …, 4}.
pub fn half_line_fixture() -> Fixture {
    let edges: Vec<_> = (0..6).map(|i| (i, i + 1, 1.0)).collect();
    let graph = WeightedGraph::from_edges(7, &edges).expect("valid fixture");
    let domain = build_domain(&graph, &(1..7).collect::<Vec<_>>()).expect("valid fixture");
    Fixture {
        name: "half-line",
        domain,
        members: (0..5).collect(),
        expected: vec![("sigma_1", 0.2), ("h", 1.0 / 9.0), ("h_J", 1.0), ("capacity", 0.2)],
    }
}

/// Boundary vertices 0 and 1 joined to a center 2, which is joined to 3;
/// Ω = {2, 3} and W = {0, 1, 2}.
pub fn star_fixture() -> Fixture {
    let graph = WeightedGraph::from_edges(4, &[(0, 2, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).expect("valid fixture");
    let domain = build_domain(&graph, &[2, 3]).expect("valid fixture");
    Fixture {
        name: "star",
        domain,
        members: vec![0, 1, 2],
        expected: vec![
            ("sigma_1", 1.0 / 3.0),
            ("sigma_2", 1.0),
            ("h", 0.2),
            ("h_J", 0.5),
            ("h_J^2", 1.0),
            ("gamma_2", 1.0),
        ],
    }
}

/// Ball of radius 3 in the degree-three tree with one root.
pub fn tree_fixture() -> Fixture {
    let tree = RegularTree::new(3, 1).expect("valid fixture");
    let mut seq = ExhaustionSequence::new(&tree).expect("valid fixture");
    let realized = seq.realize(3, usize::MAX).expect("valid fixture");
    Fixture {
        name: "tree-radius-3",
        domain: realized.domain,
        members: realized.members,
        expected: vec![("sigma_1", 8.0 / 15.0), ("h", 4.0 / 11.0), ("h_J", 1.0), ("capacity", 8.0 / 15.0)],
    }
}

pub fn fixtures() -> Vec<Fixture> {
    vec![half_line_fixture(), star_fixture(), tree_fixture()]
}

/// Computes a named quantity on a window.
pub fn fixture_quantity(window: &Window<'_>, name: &str) -> Result<f64> {
    let sigma = || dtn_spectrum(window);
    Ok(match name {
        "sigma_1" => sigma()?[0],
        "sigma_2" => sigma()?[1],
        "h" => cheeger_enumerate(window)?.0.value,
        "h_J" => cheeger_enumerate(window)?.1.value,
        "h_J^2" => crate::cheeger::higher_order_constants(window, 2)?.1.value,
        "gamma_2" => gamma_k(window, 2, &VertexMeasure::from_domain(window))?.value,
        "capacity" => capacity(window, &BoundaryData::constant(window, 1.0))?,
        other => return Err(crate::error::Error::InvalidParameter(format!("unknown fixture quantity {other}"))),
    })
}

fn check_fixture(fixture: &Fixture, k_max: usize) -> Result<InstanceReport> {
    let window = make_window(&fixture.domain, &fixture.members)?;
    let mut report = check_window(&window, fixture.name, k_max)?;
    for &(name, expected) in &fixture.expected {
        let value = fixture_quantity(&window, name)?;
        let tol = 1e-12 * expected.abs().max(1.0);
        let slack = tol - (value - expected).abs();
        report.assertions.push(Assertion {
            name: format!("fixture_{name}"),
            hard: true,
            passed: slack >= 0.0,
            slack,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub count: usize,
    pub k_max: usize,
    pub fixtures: bool,
    pub random: RandomConfig,
    /// Directory receiving replayable graph files of failing instances.
    pub dump_dir: Option<PathBuf>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            count: 0,
            k_max: 3,
            fixtures: true,
            random: RandomConfig::default(),
            dump_dir: None,
        }
    }
}

/// Per-assertion tally over all instances.
#[derive(Debug, Clone, Serialize)]
pub struct Tally {
    pub hard: bool,
    pub checked: usize,
    pub failed: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub min_slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub count: usize,
    pub fixtures: Vec<InstanceReport>,
    pub tallies: BTreeMap<String, Tally>,
    /// Random instances with at least one failed hard assertion.
    pub failures: Vec<InstanceReport>,
    /// Labels of instances violating a soft assertion, with the assertion.
    pub violations: Vec<String>,
    pub dumped: Vec<String>,
    pub c_hat: Option<f64>,
    pub c_hat_gamma: Option<f64>,
    pub passed: bool,
}

fn tally_name(name: &str) -> String {
    // fold per-order names such as sigma_3_at_most_one into one entry
    let mut out = String::with_capacity(name.len());
    let mut chars = name.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_ascii_digit() && (out.ends_with('_') || out.ends_with('^')) {
            while chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                chars.next();
            }
            out.push('k');
        } else {
            out.push(c);
        }
    }
    out
}

pub fn run_suite(options: &SuiteOptions) -> Result<SuiteReport> {
    let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
    let mut record = |report: &InstanceReport| {
        for a in &report.assertions {
            let t = tallies.entry(tally_name(&a.name)).or_insert(Tally {
                hard: a.hard,
                checked: 0,
                failed: 0,
                min_slack: f64::INFINITY,
            });
            t.checked += 1;
            t.failed += usize::from(!a.passed);
            t.min_slack = t.min_slack.min(a.slack);
        }
    };
    let mut c_hat: Option<f64> = None;
    let mut c_hat_gamma: Option<f64> = None;
    let fold = |acc: &mut Option<f64>, v: Option<f64>| {
        if let Some(v) = v {
            *acc = Some(acc.map_or(v, |m| m.min(v)));
        }
    };
    let mut fixture_reports = Vec::new();
    if options.fixtures {
        for fixture in fixtures() {
            let report = check_fixture(&fixture, options.k_max)?;
            record(&report);
            fold(&mut c_hat, report.c_hat);
            fold(&mut c_hat_gamma, report.c_hat_gamma);
            fixture_reports.push(report);
        }
    }
    let mut failures = Vec::new();
    let mut violations = Vec::new();
    let mut dumped = Vec::new();
    for index in 0..options.count as u64 {
        let instance = random_instance(options.seed, index, &options.random)?;
        let window = instance.window()?;
        let label = format!("random-{}-{}", options.seed, index);
        let report = check_window(&window, &label, options.k_max)?;
        record(&report);
        fold(&mut c_hat, report.c_hat);
        fold(&mut c_hat_gamma, report.c_hat_gamma);
        violations.extend(report.violations().map(|a| format!("{label}: {}", a.name)));
        if !report.passed() {
            if let Some(dir) = &options.dump_dir {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("{label}.json"));
                write_graph(&path, &instance.domain, Some(&instance.members))?;
                dumped.push(path.display().to_string());
            }
            failures.push(report);
        }
    }
    let passed = failures.is_empty() && fixture_reports.iter().all(InstanceReport::passed);
    Ok(SuiteReport {
        seed: options.seed,
        count: options.count,
        fixtures: fixture_reports,
        tallies,
        failures,
        violations,
        dumped,
        c_hat,
        c_hat_gamma,
        passed,
    })
}
