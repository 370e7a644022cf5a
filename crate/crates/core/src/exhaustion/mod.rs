//! Exhaustions of infinite graphs by metric balls around δΩ, monotone limits
//! of the window quantities, and the capacity-based recurrence test.
//!
//! The window at radius r is W_r = {x ∈ Ω̄ : dist(x, δΩ) ≤ r}. Radii run
//! 0, s, 2s, … for a step s ≥ 1. Each monitored quantity is non-increasing
//! along the sequence; a violation beyond 1e−12 relative is a hard error.

pub mod families;

use std::collections::HashMap;

use serde::Serialize;

use crate::cheeger::{cheeger_parametric_cut, higher_order_constants_with, HigherOrderMode, Method, Ratio};
use crate::dtn::{dirichlet_laplacian_spectrum, dtn_spectrum};
use crate::error::{Error, Result};
use crate::graph::{make_window, Domain, GraphBuilder, Role, VertexId, Window};
use crate::harmonic::{capacity, BoundaryData};

pub use families::{FamilySpec, FiniteFamily, GraphFamily, HalfLine, RegularTree, WeightedBinaryTree};

/// Environment variable overriding the default vertex budget.
pub const VERTEX_BUDGET_ENV: &str = "STEKLOV_VERTEX_BUDGET";
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_DEPTH: usize = 64;
pub const DEFAULT_VERTEX_BUDGET: usize = 2_000_000;
const MONOTONE_TOL: f64 = 1e-12;
const ORDER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustionConfig {
    /// Successive-gap stopping threshold; 0 disables early stopping.
    pub tol: f64,
    /// Largest radius visited.
    pub depth_max: usize,
    /// Largest #W_r realized.
    pub vertex_budget: usize,
    /// Radius increment between consecutive windows.
    pub step: usize,
}

impl Default for ExhaustionConfig {
    fn default() -> Self {
        let vertex_budget = std::env::var(VERTEX_BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_VERTEX_BUDGET);
        Self {
            tol: DEFAULT_TOL,
            depth_max: DEFAULT_DEPTH,
            vertex_budget,
            step: 1,
        }
    }
}

impl ExhaustionConfig {
    fn validate(&self) -> Result<()> {
        if self.step == 0 {
            return Err(Error::InvalidParameter("radius step must be positive".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be nonnegative, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Lazily realized balls around δΩ. Vertices are numbered in BFS order, so
/// every ball is a prefix of the numbering.
pub struct ExhaustionSequence<'f> {
    family: &'f dyn GraphFamily,
    ids: Vec<u64>,
    index: HashMap<u64, usize>,
    /// `layer_end[l]` = number of realized vertices at distance ≤ l.
    layer_end: Vec<usize>,
    /// Pruned neighbors (local ids) of every vertex whose layer has been
    /// expanded.
    adjacency: Vec<Vec<(usize, f64)>>,
}

/// One realized window: the finite domain W̄_r and the members of W_r.
pub struct RealizedWindow {
    pub radius: usize,
    pub domain: Domain,
    pub members: Vec<VertexId>,
    /// Family ids of the local vertices.
    pub ids: Vec<u64>,
    /// True when W_r has no collar inside Ω̄, so W_r = Ω̄.
    pub complete: bool,
}

impl RealizedWindow {
    pub fn window(&self) -> Result<Window<'_>> {
        make_window(&self.domain, &self.members)
    }
}

impl<'f> ExhaustionSequence<'f> {
    pub fn new(family: &'f dyn GraphFamily) -> Result<Self> {
        let boundary = family.boundary();
        if boundary.is_empty() {
            return Err(Error::NoBoundary);
        }
        let mut index = HashMap::new();
        let mut ids = Vec::new();
        for v in boundary {
            if !family.is_boundary(v) {
                return Err(Error::InvalidParameter(format!("{v} is listed as boundary but is not")));
            }
            if index.insert(v, ids.len()).is_none() {
                ids.push(v);
            }
        }
        let layer_end = vec![ids.len()];
        Ok(Self {
            family,
            ids,
            index,
            layer_end,
            adjacency: Vec::new(),
        })
    }

    /// Realizes layers up to distance `layer`.
    fn expand_to(&mut self, layer: usize) {
        let mut buffer = Vec::new();
        while self.layer_end.len() <= layer {
            let from = self.adjacency.len();
            let to = *self.layer_end.last().unwrap();
            for x in from..to {
                buffer.clear();
                self.family.neighbors(self.ids[x], &mut buffer);
                let mut row = Vec::with_capacity(buffer.len());
                for &(y, w) in &buffer {
                    let local = *self.index.entry(y).or_insert_with(|| {
                        self.ids.push(y);
                        self.ids.len() - 1
                    });
                    row.push((local, w));
                }
                self.adjacency.push(row);
            }
            self.layer_end.push(self.ids.len());
        }
    }

    /// #W_r, realizing layers as needed.
    pub fn size_at(&mut self, radius: usize) -> usize {
        self.expand_to(radius);
        self.layer_end[radius]
    }

    /// Builds W_r and its collar, refusing when #W_r exceeds `budget`.
    pub fn realize(&mut self, radius: usize, budget: usize) -> Result<RealizedWindow> {
        let members = self.size_at(radius);
        if members > budget {
            return Err(Error::Budget(format!(
                "window at radius {radius} has {members} vertices, over the budget of {budget}"
            )));
        }
        self.expand_to(radius + 1);
        let total = self.layer_end[radius + 1];
        let mut builder = GraphBuilder::with_unlabeled(total);
        for x in 0..members {
            for &(y, w) in &self.adjacency[x] {
                // members' edges once; edges to the collar from the member side
                if y >= members || y >= x {
                    builder.edge(x, y, w)?;
                }
            }
        }
        let graph = builder.build();
        let roles = (0..total)
            .map(|x| if self.family.is_boundary(self.ids[x]) { Role::Boundary } else { Role::Interior })
            .collect();
        let measure = (0..total).map(|x| self.family.measure(self.ids[x])).collect();
        Ok(RealizedWindow {
            radius,
            domain: Domain::from_realization(graph, roles, measure),
            members: (0..members).collect(),
            ids: self.ids[..total].to_vec(),
            complete: total == members,
        })
    }
}

/// How a sequence ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Successive gap fell below the tolerance.
    Converged,
    /// W_r reached all of Ω̄.
    Stabilized,
    /// The depth cap was reached first.
    DepthExhausted,
    /// The vertex or work budget was reached first.
    BudgetExceeded,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub radius: usize,
    pub size: usize,
    pub values: Vec<f64>,
}

/// A limit estimate: the last value with the last successive gap as error bar.
#[derive(Debug, Clone, Serialize)]
pub struct Limit {
    pub quantity: String,
    pub estimate: f64,
    pub error_bar: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustionTable {
    pub family: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub status: Status,
    pub limits: Vec<Limit>,
    /// Per-depth inequality failures; empty on success.
    pub violations: Vec<String>,
    pub note: Option<String>,
}

impl ExhaustionTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|x| x == name)?;
        Some(self.rows.iter().map(|r| r.values[c]).collect())
    }

    pub fn limit(&self, name: &str) -> Option<&Limit> {
        self.limits.iter().find(|l| l.quantity == name)
    }
}

/// Which columns must be non-increasing and which drive the stopping rule.
struct Driver<'a> {
    family: &'a dyn GraphFamily,
    config: &'a ExhaustionConfig,
    columns: Vec<&'static str>,
    monotone: Vec<bool>,
    tracked: Vec<bool>,
}

impl Driver<'_> {
    /// Runs `eval` on successive windows until a stopping condition holds.
    fn run(
        &self,
        mut eval: impl FnMut(&Window<'_>, &mut Vec<String>) -> Result<Option<Vec<f64>>>,
    ) -> Result<ExhaustionTable> {
        self.config.validate()?;
        let mut seq = ExhaustionSequence::new(self.family)?;
        let mut rows: Vec<Row> = Vec::new();
        let mut violations = Vec::new();
        let mut status = Status::DepthExhausted;
        let mut note = None;
        let mut gaps = vec![f64::INFINITY; self.columns.len()];
        let mut radius = 0;
        while radius <= self.config.depth_max {
            let realized = match seq.realize(radius, self.config.vertex_budget) {
                Ok(r) => r,
                Err(e) if e.is_budget() => {
                    status = Status::BudgetExceeded;
                    note = Some(e.to_string());
                    break;
                }
                Err(e) => return Err(e),
            };
            let window = realized.window()?;
            let values = match eval(&window, &mut violations) {
                Ok(Some(v)) => v,
                Ok(None) => {
                    status = Status::BudgetExceeded;
                    note = Some(format!("exact evaluation unaffordable at radius {radius}"));
                    break;
                }
                Err(e) if e.is_budget() => {
                    status = Status::BudgetExceeded;
                    note = Some(e.to_string());
                    break;
                }
                Err(e) => return Err(e),
            };
            if let Some(prev) = rows.last() {
                for (c, name) in self.columns.iter().enumerate() {
                    let (p, v) = (prev.values[c], values[c]);
                    if self.monotone[c] && v > p + MONOTONE_TOL * p.abs().max(1.0) {
                        return Err(Error::NotMonotone {
                            quantity: name.to_string(),
                            radius,
                            previous: p,
                            current: v,
                        });
                    }
                    gaps[c] = if p == v { 0.0 } else { (p - v).abs() };
                }
            }
            let size = window.len();
            let grew = rows.last().is_none_or(|r| r.size != size);
            rows.push(Row { radius, size, values });
            if !grew || realized.complete {
                status = Status::Stabilized;
                if !grew {
                    break;
                }
            }
            let settled = rows.len() > 1
                && self
                    .tracked
                    .iter()
                    .zip(&gaps)
                    .all(|(&t, &g)| !t || g < self.config.tol);
            if settled {
                status = Status::Converged;
                break;
            }
            if status == Status::Stabilized {
                // one more radius confirms the sequence is constant
                status = Status::DepthExhausted;
            }
            radius += self.config.step;
        }
        let limits = if rows.is_empty() {
            Vec::new()
        } else {
            let last = rows.last().unwrap();
            self.columns
                .iter()
                .enumerate()
                .filter(|&(c, _)| self.tracked[c])
                .map(|(c, name)| Limit {
                    quantity: name.to_string(),
                    estimate: last.values[c],
                    error_bar: gaps[c],
                })
                .collect()
        };
        Ok(ExhaustionTable {
            family: self.family.describe(),
            columns: self.columns.iter().map(|c| c.to_string()).collect(),
            rows,
            status,
            limits,
            violations,
            note,
        })
    }
}

fn check_k(family: &dyn GraphFamily, k: usize) -> Result<()> {
    let p = family.boundary().len();
    if k < 1 || k > p {
        return Err(Error::InvalidParameter(format!("order k = {k} must lie in 1..={p} (#δΩ)")));
    }
    Ok(())
}

/// σ_k(W_r) along the exhaustion, with limit estimate σ_k(Ω).
pub fn exhaust_spectrum(family: &dyn GraphFamily, k: usize, config: &ExhaustionConfig) -> Result<ExhaustionTable> {
    check_k(family, k)?;
    let driver = Driver {
        family,
        config,
        columns: vec!["sigma_k"],
        monotone: vec![true],
        tracked: vec![true],
    };
    driver.run(|w, _| Ok(Some(vec![dtn_spectrum(w)?[k - 1]])))
}

/// h(W_r) and h_J(W_r) by parametric minimum cut, with limits h(Ω̄), h_J(Ω).
pub fn exhaust_cheeger(family: &dyn GraphFamily, config: &ExhaustionConfig) -> Result<ExhaustionTable> {
    let driver = Driver {
        family,
        config,
        columns: vec!["h", "h_J"],
        monotone: vec![true, true],
        tracked: vec![true, true],
    };
    driver.run(|w, _| {
        let h = cheeger_parametric_cut(w, Ratio::Classical)?;
        let hj = cheeger_parametric_cut(w, Ratio::Jammes)?;
        Ok(Some(vec![h.value, hj.value]))
    })
}

/// σ_k, h_k and h_J^k with exact constants while affordable; checks
/// σ_k ≤ h_J^k at every radius and tracks ĉ = σ_k k⁶ / h_k.
pub fn exhaust_higher(family: &dyn GraphFamily, k: usize, config: &ExhaustionConfig) -> Result<ExhaustionTable> {
    check_k(family, k)?;
    let driver = Driver {
        family,
        config,
        columns: vec!["sigma_k", "h_k", "h_J^k", "c_hat"],
        monotone: vec![true, true, true, false],
        tracked: vec![true, true, true, false],
    };
    let mut table = driver.run(|w, violations| {
        let sigma = dtn_spectrum(w)?[k - 1];
        let (h_k, h_j_k) = match higher_order_constants_with(w, k, HigherOrderMode::Exact) {
            Ok(c) => c,
            Err(e) if e.is_budget() => return Ok(None),
            Err(e) => return Err(e),
        };
        debug_assert_eq!(h_k.method, Method::Enumeration);
        if sigma > h_j_k.value + ORDER_TOL {
            violations.push(format!(
                "sigma_{k} = {sigma:e} exceeds h_J^{k} = {:e} on a window of {} vertices",
                h_j_k.value,
                w.len()
            ));
        }
        let c_hat = if h_k.value > 0.0 && h_k.value.is_finite() {
            sigma * (k as f64).powi(6) / h_k.value
        } else {
            f64::NAN
        };
        Ok(Some(vec![sigma, h_k.value, h_j_k.value, c_hat]))
    })?;
    let c_min = table
        .column("c_hat")
        .unwrap_or_default()
        .into_iter()
        .filter(|c| c.is_finite())
        .fold(f64::INFINITY, f64::min);
    if c_min.is_finite() {
        table.limits.push(Limit {
            quantity: "c_hat_min".into(),
            estimate: c_min,
            error_bar: 0.0,
        });
    }
    Ok(table)
}

/// λ_{k,D}(W_r) along the exhaustion, checking σ_k(W_r) ≥ λ_{k,D}(W_r).
pub fn graph_eigen_limit(family: &dyn GraphFamily, k: usize, config: &ExhaustionConfig) -> Result<ExhaustionTable> {
    check_k(family, k)?;
    let driver = Driver {
        family,
        config,
        columns: vec!["lambda_k_D", "sigma_k"],
        monotone: vec![false, true],
        tracked: vec![true, false],
    };
    driver.run(|w, violations| {
        let lambda = match dirichlet_laplacian_spectrum(w)?.get(k - 1) {
            Some(&l) => l,
            None => f64::NAN,
        };
        let sigma = dtn_spectrum(w)?[k - 1];
        if lambda > sigma + ORDER_TOL {
            violations.push(format!(
                "lambda_{k},D = {lambda:e} exceeds sigma_{k} = {sigma:e} on a window of {} vertices",
                w.len()
            ));
        }
        Ok(Some(vec![lambda, sigma]))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Recurrent,
    Transient,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceReport {
    pub verdict: Verdict,
    pub tol: f64,
    pub table: ExhaustionTable,
}

/// Capacities c_r = Cap(𝟙, W_r). Recurrent once c_r < tol; transient once the
/// relative decrease (c_prev − c_r)/c_prev drops below tol while c_r > 10·tol;
/// inconclusive when the depth or vertex budget runs out first.
pub fn recurrence_test(family: &dyn GraphFamily, tol: f64, config: &ExhaustionConfig) -> Result<RecurrenceReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("recurrence tolerance must be positive, got {tol}")));
    }
    let mut verdict = Verdict::Inconclusive;
    let mut previous: Option<f64> = None;
    let inner = ExhaustionConfig {
        tol: 0.0,
        ..config.clone()
    };
    let driver = Driver {
        family,
        config: &inner,
        columns: vec!["capacity"],
        monotone: vec![true],
        tracked: vec![true],
    };
    // the driver keeps going until the verdict is reached; stopping is
    // signalled through a sentinel budget error
    const DECIDED: &str = "verdict reached";
    let mut table = driver.run(|w, _| {
        if verdict != Verdict::Inconclusive {
            return Err(Error::Budget(DECIDED.into()));
        }
        let c = capacity(w, &BoundaryData::constant(w, 1.0))?;
        if c < tol {
            verdict = Verdict::Recurrent;
        } else if let Some(p) = previous {
            if p > 0.0 && (p - c) / p < tol && c > 10.0 * tol {
                verdict = Verdict::Transient;
            }
        }
        previous = Some(c);
        Ok(Some(vec![c]))
    })?;
    if verdict != Verdict::Inconclusive {
        table.status = Status::Converged;
        table.note = None;
    } else if table.status == Status::Stabilized || table.status == Status::Converged {
        // a finite graph with constant capacity
        let last = table.rows.last().map(|r| r.values[0]).unwrap_or(0.0);
        verdict = if last < tol { Verdict::Recurrent } else { Verdict::Transient };
    }
    Ok(RecurrenceReport { verdict, tol, table })
}
