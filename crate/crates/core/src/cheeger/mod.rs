//! Cheeger-type constants of a window: the classical h, the Jammes-type h_J,
//! their k-th order versions h_k and h_J^k, and Γ_k. Also the coarea and
//! level-set identities and the inequality checks tying them to σ_k.
//!
//! For A ⊆ W, the relative edge boundary ∂_W A is the full edge boundary of A
//! in the pruned graph, so every constant is a minimum of
//! `cut(A) / den(A)` with `den` either d(A) or d(A∩δΩ). Subsets with zero
//! denominator count as +∞.

mod higher;
pub mod maxflow;

use serde::Serialize;

use crate::dtn::dtn_spectrum;
use crate::error::{Error, Result};
use crate::graph::{VertexId, Window};
use crate::harmonic::total_weight;

pub use higher::{
    first_dirichlet_eigenvalue, gamma_k, higher_order_constants, higher_order_constants_with,
    HigherOrderMode, VertexMeasure, EXACT_WORK_BUDGET,
};

/// Largest window handled by subset enumeration.
pub const ENUMERATION_CAP: usize = 22;
/// Dinkelbach stops once the auxiliary minimum is at least −this·scale.
pub const DINKELBACH_TOL: f64 = 1e-12;
const DINKELBACH_MAX_ITERATIONS: usize = 200;
/// Tolerance of every inequality check.
pub const INEQUALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Enumeration,
    ParametricCut,
    HeuristicUpperBound,
}

/// Which denominator a Cheeger ratio uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ratio {
    /// d(A)
    Classical,
    /// d(A∩δΩ)
    Jammes,
}

/// A constant with the subset (or tuple of subsets) attaining it.
#[derive(Debug, Clone, Serialize)]
pub struct CheegerResult {
    #[serde(serialize_with = "crate::io::serialize_f64")]
    pub value: f64,
    pub witness: Vec<Vec<VertexId>>,
    pub method: Method,
}

impl CheegerResult {
    fn infinite(method: Method) -> Self {
        Self {
            value: f64::INFINITY,
            witness: Vec::new(),
            method,
        }
    }
}

/// Per-member data of a window in local indices.
pub(crate) struct MemberGraph {
    /// Neighbors inside W.
    pub adj: Vec<Vec<(usize, f64)>>,
    /// Total weight of E(W, W̄) at each member, collar edges included.
    pub degree: Vec<f64>,
    /// Weight from each member into δW.
    pub collar: Vec<f64>,
    pub den_classical: Vec<f64>,
    pub den_jammes: Vec<f64>,
}

impl MemberGraph {
    pub fn new(window: &Window<'_>) -> Self {
        let n = window.len();
        let mut adj = vec![Vec::new(); n];
        let mut degree = vec![0.0; n];
        let mut collar = vec![0.0; n];
        for e in window.edges() {
            degree[e.a] += e.weight;
            if e.b < n {
                degree[e.b] += e.weight;
                adj[e.a].push((e.b, e.weight));
                adj[e.b].push((e.a, e.weight));
            } else {
                collar[e.a] += e.weight;
            }
        }
        let den_classical: Vec<f64> = (0..n).map(|i| window.measure_at(i)).collect();
        let den_jammes = (0..n)
            .map(|i| if i < window.boundary_len() { den_classical[i] } else { 0.0 })
            .collect();
        Self {
            adj,
            degree,
            collar,
            den_classical,
            den_jammes,
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn den(&self, which: Ratio) -> &[f64] {
        match which {
            Ratio::Classical => &self.den_classical,
            Ratio::Jammes => &self.den_jammes,
        }
    }

    /// cut and denominator of a set given by membership flags.
    pub fn cut_and_den(&self, inside: &[bool], which: Ratio) -> (f64, f64) {
        let den = self.den(which);
        let mut cut = 0.0;
        let mut d = 0.0;
        for i in 0..self.len() {
            if inside[i] {
                d += den[i];
                cut += self.collar[i];
                for &(j, w) in &self.adj[i] {
                    if !inside[j] {
                        cut += w;
                    }
                }
            }
        }
        (cut, d)
    }
}

pub(crate) fn ratio(cut: f64, den: f64) -> f64 {
    if den > 0.0 {
        cut / den
    } else {
        f64::INFINITY
    }
}

/// μ(∂_W A) / den(A) for a nonempty A ⊆ W, +∞ on a zero denominator.
pub fn evaluate_ratio(window: &Window<'_>, a: &[VertexId], which: Ratio) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let locals = window.locals_in_members(a)?;
    let graph = MemberGraph::new(window);
    let mut inside = vec![false; window.len()];
    for i in locals {
        inside[i] = true;
    }
    let (cut, den) = graph.cut_and_den(&inside, which);
    Ok(ratio(cut, den))
}

fn witness_from_mask(window: &Window<'_>, mask: u64) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = (0..window.len())
        .filter(|&i| mask & (1 << i) != 0)
        .map(|i| window.vertex(i))
        .collect();
    out.sort_unstable();
    out
}

/// Exact h(W) and h_J(W) over all nonempty subsets. Ties go to the smallest
/// subset bitmask in local order.
pub fn cheeger_enumerate(window: &Window<'_>) -> Result<(CheegerResult, CheegerResult)> {
    cheeger_enumerate_capped(window, ENUMERATION_CAP)
}

pub fn cheeger_enumerate_capped(window: &Window<'_>, cap: usize) -> Result<(CheegerResult, CheegerResult)> {
    let n = window.len();
    if n > cap || n > 62 {
        return Err(Error::EnumerationCap { size: n, cap });
    }
    let graph = MemberGraph::new(window);
    let scale = total_weight(window).max(1.0);
    let near = 1e-12 * scale;

    let mut inside = vec![false; n];
    let exact = |mask: u64, which: Ratio| -> f64 {
        let flags: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
        let (c, d) = graph.cut_and_den(&flags, which);
        ratio(c, d)
    };
    // (value, mask) per ratio kind
    let mut best = [(f64::INFINITY, 0u64), (f64::INFINITY, 0u64)];
    let kinds = [Ratio::Classical, Ratio::Jammes];
    let (mut cut, mut den_h, mut den_j) = (0.0, 0.0, 0.0);
    let mut boundary_inside = 0usize;
    let mut gray = 0u64;
    for step in 1u64..(1u64 << n) {
        let v = step.trailing_zeros() as usize;
        gray ^= 1 << v;
        let shared: f64 = graph.adj[v].iter().filter(|&&(j, _)| inside[j]).map(|&(_, w)| w).sum();
        let delta = graph.degree[v] - 2.0 * shared;
        let on_boundary = v < window.boundary_len();
        if inside[v] {
            inside[v] = false;
            boundary_inside -= on_boundary as usize;
            cut -= delta;
            den_h -= graph.den_classical[v];
            den_j -= graph.den_jammes[v];
        } else {
            inside[v] = true;
            boundary_inside += on_boundary as usize;
            cut += delta;
            den_h += graph.den_classical[v];
            den_j += graph.den_jammes[v];
        }
        for (slot, (&kind, den)) in best.iter_mut().zip(kinds.iter().zip([den_h, den_j])) {
            if kind == Ratio::Jammes && boundary_inside == 0 {
                continue;
            }
            let approx = ratio(cut, den);
            if approx.is_infinite() || approx > slot.0 + near {
                continue;
            }
            let value = exact(gray, kind);
            if value < slot.0 || (value == slot.0 && gray < slot.1) {
                *slot = (value, gray);
            }
        }
    }
    let make = |(value, mask): (f64, u64)| {
        if value.is_infinite() {
            CheegerResult::infinite(Method::Enumeration)
        } else {
            CheegerResult {
                value,
                witness: vec![witness_from_mask(window, mask)],
                method: Method::Enumeration,
            }
        }
    };
    Ok((make(best[0]), make(best[1])))
}

/// Minimizes cut(A)/den(A) over nonempty A ⊆ W with A limited to members
/// flagged in `allowed`, by Dinkelbach iteration on parametric minimum cuts.
/// Returns the optimal ratio and the local indices of a minimizer, or +∞
/// with an empty set when every allowed member has zero denominator.
pub(crate) fn minimize_ratio(
    graph: &MemberGraph,
    den: &[f64],
    allowed: &[bool],
    scale: f64,
) -> Result<(f64, Vec<usize>)> {
    let n = graph.len();
    let mut inside: Vec<bool> = allowed.to_vec();
    let total_den: f64 = (0..n).filter(|&i| inside[i]).map(|i| den[i]).sum();
    if !(total_den > 0.0) {
        return Ok((f64::INFINITY, Vec::new()));
    }
    let eval = |inside: &[bool]| -> (f64, f64) {
        let mut cut = 0.0;
        let mut d = 0.0;
        for i in 0..n {
            if inside[i] {
                d += den[i];
                cut += graph.collar[i];
                for &(j, w) in &graph.adj[i] {
                    if !inside[j] {
                        cut += w;
                    }
                }
            }
        }
        (cut, d)
    };
    let (c0, d0) = eval(&inside);
    let mut t = c0 / d0;
    let (s, sink) = (n, n + 1);
    let total_capacity: f64 = graph.degree.iter().sum::<f64>() + total_den * t.max(1.0);
    let forbid = 2.0 * total_capacity + 1.0;
    let mut lower = 0.0;
    for _ in 0..DINKELBACH_MAX_ITERATIONS {
        let mut net = maxflow::FlowNetwork::new(n + 2);
        for i in 0..n {
            if allowed[i] {
                if den[i] > 0.0 && t > 0.0 {
                    net.add_edge(s, i, t * den[i], 0.0);
                }
            } else {
                net.add_edge(i, sink, forbid, 0.0);
            }
            if graph.collar[i] > 0.0 {
                net.add_edge(i, sink, graph.collar[i], 0.0);
            }
            for &(j, w) in &graph.adj[i] {
                if i < j {
                    net.add_edge(i, j, w, w);
                }
            }
        }
        let eps = 1e-15 * (total_capacity + t * total_den + 1.0);
        let cut = maxflow::min_cut(&net, s, sink, eps);
        let candidate: Vec<bool> = (0..n).map(|i| cut.source_side[i] && allowed[i]).collect();
        let (c, d) = eval(&candidate);
        let objective = c - t * d;
        let min_den = den.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
        lower = t + (cut.value - t * total_den).min(0.0) / min_den;
        if candidate.iter().any(|&b| b) && d > 0.0 && objective < -DINKELBACH_TOL * scale {
            t = c / d;
            inside = candidate;
        } else {
            let set = (0..n).filter(|&i| inside[i]).collect();
            return Ok((t, set));
        }
    }
    Err(Error::CutNoConvergence { lower, upper: t })
}

/// h(W) or h_J(W) by parametric minimum cut; exact at any window size.
pub fn cheeger_parametric_cut(window: &Window<'_>, which: Ratio) -> Result<CheegerResult> {
    if which == Ratio::Jammes && window.boundary_len() == 0 {
        return Err(Error::NoBoundary);
    }
    let graph = MemberGraph::new(window);
    let allowed = vec![true; graph.len()];
    let scale = total_weight(window).max(1.0);
    let (value, set) = minimize_ratio(&graph, graph.den(which), &allowed, scale)?;
    let mut witness: Vec<VertexId> = set.into_iter().map(|i| window.vertex(i)).collect();
    witness.sort_unstable();
    Ok(CheegerResult {
        value,
        witness: vec![witness],
        method: Method::ParametricCut,
    })
}

/// Enumeration when the window fits under the cap, parametric cut otherwise.
pub fn cheeger_auto(window: &Window<'_>) -> Result<(CheegerResult, CheegerResult)> {
    if window.len() <= ENUMERATION_CAP {
        return cheeger_enumerate(window);
    }
    let h = cheeger_parametric_cut(window, Ratio::Classical)?;
    let hj = if window.boundary_len() == 0 {
        CheegerResult::infinite(Method::ParametricCut)
    } else {
        cheeger_parametric_cut(window, Ratio::Jammes)?
    };
    Ok((h, hj))
}

/// Both sides of an integral identity over level sets and their difference.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            gap: (lhs - rhs).abs(),
        }
    }
}

/// Squared values on W sorted descending, with validation of f.
fn level_order(window: &Window<'_>, f: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
    if f.len() != window.closure_len() {
        return Err(Error::DimensionMismatch {
            expected: window.closure_len(),
            found: f.len(),
        });
    }
    for (i, &v) in f.iter().enumerate() {
        if v < 0.0 || v.is_nan() {
            return Err(Error::NegativeValue {
                vertex: window.domain().name(window.vertex(i)).into_owned(),
                value: v,
            });
        }
        if i >= window.len() && v != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "function must vanish on the collar, found {v} at `{}`",
                window.domain().name(window.vertex(i))
            )));
        }
    }
    let sq: Vec<f64> = f.iter().map(|v| v * v).collect();
    let mut order: Vec<usize> = (0..window.len()).collect();
    order.sort_by(|&a, &b| sq[b].total_cmp(&sq[a]).then(a.cmp(&b)));
    Ok((sq, order))
}

/// Integrates `size(S_t)` over t ∈ (0, ∞), where S_t = {x ∈ W : f²(x) ≥ t}.
/// `grow` adds one vertex to the running level set and returns the new size.
fn integrate_levels(sq: &[f64], order: &[usize], mut grow: impl FnMut(usize) -> f64) -> f64 {
    let mut integral = 0.0;
    let mut k = 0;
    let mut size = 0.0;
    while k < order.len() {
        let level = sq[order[k]];
        if level <= 0.0 {
            break;
        }
        while k < order.len() && sq[order[k]] == level {
            size = grow(order[k]);
            k += 1;
        }
        let next = if k < order.len() { sq[order[k]].max(0.0) } else { 0.0 };
        integral += (level - next) * size;
    }
    integral
}

/// Discrete coarea formula: ∫₀^∞ μ(∂_W S_t) dt against
/// Σ_{E(W,W̄)} μ_xy |f²(x) − f²(y)|.
pub fn coarea_check(window: &Window<'_>, f: &[f64]) -> Result<IdentityCheck> {
    let (sq, order) = level_order(window, f)?;
    let graph = MemberGraph::new(window);
    let mut inside = vec![false; window.len()];
    let mut cut = 0.0;
    let lhs = integrate_levels(&sq, &order, |v| {
        let shared: f64 = graph.adj[v].iter().filter(|&&(j, _)| inside[j]).map(|&(_, w)| w).sum();
        cut += graph.degree[v] - 2.0 * shared;
        inside[v] = true;
        cut
    });
    let rhs = window
        .edges()
        .iter()
        .map(|e| e.weight * (sq[e.a] - sq[e.b]).abs())
        .sum();
    Ok(IdentityCheck::new(lhs, rhs))
}

/// ∫ d(S_t) dt = Σ_W f² d and ∫ d(S_t∩δΩ) dt = Σ_{W∩δΩ} f² d.
pub fn level_set_integrals(window: &Window<'_>, f: &[f64]) -> Result<(IdentityCheck, IdentityCheck)> {
    let (sq, order) = level_order(window, f)?;
    let mut all = 0.0;
    let lhs_all = integrate_levels(&sq, &order, |v| {
        all += window.measure_at(v);
        all
    });
    let mut bdry = 0.0;
    let lhs_boundary = integrate_levels(&sq, &order, |v| {
        if v < window.boundary_len() {
            bdry += window.measure_at(v);
        }
        bdry
    });
    let rhs_all = (0..window.len()).map(|i| sq[i] * window.measure_at(i)).sum();
    let rhs_boundary = (0..window.boundary_len()).map(|i| sq[i] * window.measure_at(i)).sum();
    Ok((
        IdentityCheck::new(lhs_all, rhs_all),
        IdentityCheck::new(lhs_boundary, rhs_boundary),
    ))
}

/// One inequality with its slack (positive when satisfied).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Check {
    pub passed: bool,
    #[serde(serialize_with = "crate::io::serialize_f64")]
    pub slack: f64,
}

impl Check {
    /// `lhs ≤ rhs` up to [`INEQUALITY_TOL`].
    pub fn le(lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            passed: lhs <= rhs + INEQUALITY_TOL || (lhs.is_finite() && rhs == f64::INFINITY),
            slack,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HigherOrderCheck {
    pub k: usize,
    #[serde(serialize_with = "crate::io::serialize_f64")]
    pub sigma: f64,
    pub h_k: CheegerResult,
    pub h_j_k: CheegerResult,
    /// σ_k ≤ h_J^k.
    pub upper: Check,
    /// σ_k k⁶ / h_k when h_k is exact, finite and positive.
    pub c_hat: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub sigma: Vec<f64>,
    pub h: CheegerResult,
    pub h_j: CheegerResult,
    /// h·h_J/2 ≤ σ₁
    pub sandwich_lower: Check,
    /// σ₁ ≤ h_J
    pub sandwich_upper: Check,
    pub higher: Vec<HigherOrderCheck>,
    /// Minimum of the per-order ĉ values.
    pub c_hat: Option<f64>,
    /// False when some h_k came from the heuristic mode.
    pub exact: bool,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.sandwich_lower.passed && self.sandwich_upper.passed && self.higher.iter().all(|c| c.upper.passed)
    }
}

/// Checks h·h_J/2 ≤ σ₁ ≤ h_J and σ_k ≤ h_J^k for 2 ≤ k ≤ min(k_max, P), and
/// reports the empirical ĉ = min_k σ_k k⁶ / h_k.
pub fn verify_inequalities(window: &Window<'_>, k_max: usize) -> Result<InequalityReport> {
    let sigma = dtn_spectrum(window)?;
    let (h, h_j) = cheeger_auto(window)?;
    let s1 = sigma[0];
    let sandwich_lower = Check::le(h.value * h_j.value / 2.0, s1);
    let sandwich_upper = Check::le(s1, h_j.value);
    let mut higher = Vec::new();
    let mut exact = true;
    let mut c_hat: Option<f64> = None;
    for k in 1..=k_max.min(sigma.len()) {
        let (h_k, h_j_k) = higher_order_constants(window, k)?;
        let sigma_k = sigma[k - 1];
        let is_exact = h_k.method == Method::Enumeration;
        exact &= is_exact;
        let c = (is_exact && h_k.value.is_finite() && h_k.value > 0.0)
            .then(|| sigma_k * (k as f64).powi(6) / h_k.value);
        if let Some(c) = c {
            c_hat = Some(c_hat.map_or(c, |m| m.min(c)));
        }
        higher.push(HigherOrderCheck {
            k,
            sigma: sigma_k,
            upper: Check::le(sigma_k, h_j_k.value),
            h_k,
            h_j_k,
            c_hat: c,
        });
    }
    Ok(InequalityReport {
        sigma,
        h,
        h_j,
        sandwich_lower,
        sandwich_upper,
        higher,
        c_hat,
        exact,
    })
}
