//! k-th order constants h_k, h_J^k and Γ_k.
//!
//! Each is a min over disjoint k-tuples of a max of a per-subset quantity g
//! that is non-increasing under inclusion. The tuples may therefore be taken
//! to partition W, and the exact value is computed by dynamic programming over
//! subset bitmasks.

use crate::dtn::{dirichlet_laplacian, DENSE_SPECTRUM_LIMIT};
use crate::error::{Error, Result};
use crate::graph::{VertexId, Window};
use crate::harmonic::total_weight;
use crate::numerics::{eigh_generalized, eigvalsh_generalized, SymMatrix};

use super::{minimize_ratio, ratio, CheegerResult, MemberGraph, Method, Ratio};

/// Largest window size for the bitmask tables.
const MASK_LIMIT: usize = 20;
/// Upper limit on elementary steps of an exact higher-order computation.
pub const EXACT_WORK_BUDGET: f64 = 2e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HigherOrderMode {
    /// Exact when within budget, heuristic otherwise.
    Auto,
    Exact,
    Heuristic,
}

/// A positive measure ν on W, in the window's local order.
#[derive(Debug, Clone)]
pub struct VertexMeasure {
    values: Vec<f64>,
}

impl VertexMeasure {
    pub fn new(window: &Window<'_>, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::DimensionMismatch {
                expected: window.len(),
                found: values.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositiveMass { index, value });
        }
        Ok(Self { values })
    }

    /// ν = d.
    pub fn from_domain(window: &Window<'_>) -> Self {
        Self {
            values: (0..window.len()).map(|i| window.measure_at(i)).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn check_order(window: &Window<'_>, k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidParameter("order k must be at least 1".into()));
    }
    if k > window.len() {
        return Err(Error::InvalidParameter(format!(
            "no {k} disjoint nonempty subsets exist in a window of {} vertices",
            window.len()
        )));
    }
    Ok(())
}

fn exact_work(n: usize, k: usize) -> f64 {
    let n_f = n as f64;
    if k <= 2 {
        n_f * 2f64.powi(n as i32)
    } else {
        (k as f64) * 3f64.powi(n as i32)
    }
}

fn exact_feasible(n: usize, k: usize) -> bool {
    n <= MASK_LIMIT && exact_work(n, k) <= EXACT_WORK_BUDGET
}

/// Minimum over submasks, ties to the smallest submask.
fn submask_minima(values: &[f64]) -> (Vec<f64>, Vec<u32>) {
    let size = values.len();
    let mut best = vec![f64::INFINITY; size];
    let mut arg = vec![0u32; size];
    for m in 1..size {
        let (mut v, mut a) = (values[m], m as u32);
        let mut rest = m;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            rest ^= bit;
            let sub = m ^ bit;
            if sub != 0 && (best[sub] < v || (best[sub] == v && arg[sub] < a)) {
                v = best[sub];
                a = arg[sub];
            }
        }
        best[m] = v;
        arg[m] = a;
    }
    (best, arg)
}

/// min over partitions of `full` into k nonempty parts of max g(part).
/// Returns the value and the parts as masks.
fn min_max_partition(g: &[f64], n: usize, k: usize) -> (f64, Vec<usize>) {
    let full = (1usize << n) - 1;
    if k == 1 {
        return (g[full], vec![full]);
    }
    if k == 2 {
        let (mut best, mut arg) = (f64::INFINITY, 0usize);
        // parts containing vertex 0, so each unordered pair is seen once
        let mut a = full;
        loop {
            if a & 1 == 1 && a != full {
                let v = g[a].max(g[full ^ a]);
                if v < best || (v == best && a < arg) {
                    best = v;
                    arg = a;
                }
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & full;
        }
        return if best.is_finite() {
            (best, vec![arg, full ^ arg])
        } else {
            (best, Vec::new())
        };
    }
    // level j holds F_j(S) for every mask S and the part containing the
    // lowest vertex of S in an optimal split
    let size = 1usize << n;
    let mut levels: Vec<(Vec<f64>, Vec<u32>)> = vec![(g.to_vec(), (0..size as u32).collect())];
    for j in 2..=k {
        let prev = &levels[j - 2].0;
        let mut f = vec![f64::INFINITY; size];
        let mut choice = vec![0u32; size];
        let masks: Box<dyn Iterator<Item = usize>> = if j == k {
            Box::new(std::iter::once(full))
        } else {
            Box::new(1..size)
        };
        for s in masks {
            if (s.count_ones() as usize) < j {
                continue;
            }
            let low = s & s.wrapping_neg();
            let rest = s ^ low;
            // a = low ∪ sub for sub ⊊ rest
            let mut sub = rest;
            loop {
                let a = low | sub;
                if a != s {
                    let v = g[a].max(prev[s ^ a]);
                    if v < f[s] || (v == f[s] && (a as u32) < choice[s]) {
                        f[s] = v;
                        choice[s] = a as u32;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        levels.push((f, choice));
    }
    let value = levels[k - 1].0[full];
    if !value.is_finite() {
        return (value, Vec::new());
    }
    let mut parts = Vec::with_capacity(k);
    let mut s = full;
    for j in (2..=k).rev() {
        let a = levels[j - 1].1[s] as usize;
        parts.push(a);
        s ^= a;
    }
    parts.push(s);
    (value, parts)
}

fn mask_to_vertices(window: &Window<'_>, mask: usize) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = (0..window.len())
        .filter(|&i| mask & (1 << i) != 0)
        .map(|i| window.vertex(i))
        .collect();
    out.sort_unstable();
    out
}

/// cut, d(A) and d(A∩δΩ) for every bitmask.
fn mask_tables(graph: &MemberGraph) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = graph.len();
    let size = 1usize << n;
    let mut cut = vec![0.0; size];
    let mut dh = vec![0.0; size];
    let mut dj = vec![0.0; size];
    for m in 1..size {
        let i = m.trailing_zeros() as usize;
        let prev = m & (m - 1);
        let shared: f64 = graph.adj[i]
            .iter()
            .filter(|&&(j, _)| prev & (1 << j) != 0)
            .map(|&(_, w)| w)
            .sum();
        cut[m] = cut[prev] + graph.degree[i] - 2.0 * shared;
        dh[m] = dh[prev] + graph.den_classical[i];
        dj[m] = dj[prev] + graph.den_jammes[i];
    }
    (cut, dh, dj)
}

fn exact_constants(window: &Window<'_>, k: usize) -> (CheegerResult, CheegerResult) {
    let graph = MemberGraph::new(window);
    let n = graph.len();
    let (cut, dh, dj) = mask_tables(&graph);
    let r_j: Vec<f64> = cut.iter().zip(&dj).map(|(&c, &d)| ratio(c, d)).collect();
    let r_h: Vec<f64> = cut.iter().zip(&dh).map(|(&c, &d)| ratio(c, d)).collect();
    drop((cut, dh, dj));
    let (best_j, arg_j) = submask_minima(&r_j);
    let (best_h, _) = submask_minima(&r_h);
    let product: Vec<f64> = best_j
        .iter()
        .zip(&best_h)
        .map(|(&a, &b)| if a.is_infinite() { f64::INFINITY } else { a * b })
        .collect();

    let (hk_value, hk_parts) = min_max_partition(&product, n, k);
    let (hjk_value, hjk_parts) = min_max_partition(&best_j, n, k);
    let h_k = CheegerResult {
        value: hk_value,
        witness: hk_parts.iter().map(|&m| mask_to_vertices(window, m)).collect(),
        method: Method::Enumeration,
    };
    let h_j_k = CheegerResult {
        value: hjk_value,
        witness: hjk_parts
            .iter()
            .map(|&m| mask_to_vertices(window, arg_j[m] as usize))
            .collect(),
        method: Method::Enumeration,
    };
    (h_k, h_j_k)
}

/// Upper bounds from a partition of W by the dominant low Dirichlet
/// eigenvector at each vertex.
fn heuristic_constants(window: &Window<'_>, k: usize) -> Result<(CheegerResult, CheegerResult)> {
    let n = window.len();
    if n > DENSE_SPECTRUM_LIMIT {
        return Err(Error::Budget(format!(
            "heuristic higher-order bound needs a dense eigensolve of order {n}"
        )));
    }
    let mass: Vec<f64> = (0..n).map(|i| window.measure_at(i)).collect();
    let eig = eigh_generalized(&dirichlet_laplacian(window), &mass)?;
    let mut label = vec![0usize; n];
    for (x, slot) in label.iter_mut().enumerate() {
        let mut best = f64::NEG_INFINITY;
        for l in 0..k {
            let v = eig.vectors[l][x].abs() * mass[x].sqrt();
            if v > best {
                best = v;
                *slot = l;
            }
        }
    }
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (x, &l) in label.iter().enumerate() {
        parts[l].push(x);
    }
    if parts.iter().any(Vec::is_empty) {
        // fall back to k − 1 singletons and the rest of W
        parts = (0..k - 1).map(|x| vec![x]).collect();
        parts.push((k - 1..n).collect());
    }

    let graph = MemberGraph::new(window);
    let scale = total_weight(window).max(1.0);
    let (mut hk_value, mut hjk_value) = (0.0f64, 0.0f64);
    let mut hjk_witness = Vec::with_capacity(k);
    for part in &parts {
        let mut allowed = vec![false; n];
        for &x in part {
            allowed[x] = true;
        }
        let (hj, hj_set) = minimize_ratio(&graph, graph.den(Ratio::Jammes), &allowed, scale)?;
        let (h, _) = minimize_ratio(&graph, graph.den(Ratio::Classical), &allowed, scale)?;
        hjk_value = hjk_value.max(hj);
        hk_value = hk_value.max(if hj.is_infinite() { f64::INFINITY } else { hj * h });
        let set = if hj_set.is_empty() { part.clone() } else { hj_set };
        let mut ids: Vec<VertexId> = set.into_iter().map(|i| window.vertex(i)).collect();
        ids.sort_unstable();
        hjk_witness.push(ids);
    }
    let witness = parts
        .iter()
        .map(|p| {
            let mut ids: Vec<VertexId> = p.iter().map(|&i| window.vertex(i)).collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    Ok((
        CheegerResult {
            value: hk_value,
            witness,
            method: Method::HeuristicUpperBound,
        },
        CheegerResult {
            value: hjk_value,
            witness: hjk_witness,
            method: Method::HeuristicUpperBound,
        },
    ))
}

/// (h_k(W), h_J^k(W)), exact when affordable.
pub fn higher_order_constants(window: &Window<'_>, k: usize) -> Result<(CheegerResult, CheegerResult)> {
    higher_order_constants_with(window, k, HigherOrderMode::Auto)
}

pub fn higher_order_constants_with(
    window: &Window<'_>,
    k: usize,
    mode: HigherOrderMode,
) -> Result<(CheegerResult, CheegerResult)> {
    check_order(window, k)?;
    let feasible = exact_feasible(window.len(), k);
    match mode {
        HigherOrderMode::Exact if !feasible => Err(Error::Budget(format!(
            "exact order-{k} constants over {} vertices exceed the work budget",
            window.len()
        ))),
        HigherOrderMode::Heuristic => heuristic_constants(window, k),
        _ if feasible => Ok(exact_constants(window, k)),
        _ => heuristic_constants(window, k),
    }
}

fn restricted_first_eigenvalue(full: &SymMatrix, nu: &[f64], locals: &[usize]) -> Result<f64> {
    let m = locals.len();
    let mut a = SymMatrix::zeros(m);
    for (p, &i) in locals.iter().enumerate() {
        for (q, &j) in locals.iter().enumerate().take(p + 1) {
            a.set(p, q, full.get(i, j));
        }
    }
    let mass: Vec<f64> = locals.iter().map(|&i| nu[i]).collect();
    Ok(eigvalsh_generalized(&a, &mass)?[0])
}

/// λ^ν_{1,D}(A): the smallest eigenvalue of the Laplacian on A with zero
/// values on W̄ ∖ A, against the mass ν.
pub fn first_dirichlet_eigenvalue(window: &Window<'_>, a: &[VertexId], nu: &VertexMeasure) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let locals = window.locals_in_members(a)?;
    if locals.len() > DENSE_SPECTRUM_LIMIT {
        return Err(Error::Budget(format!("dense spectrum of order {}", locals.len())));
    }
    restricted_first_eigenvalue(&dirichlet_laplacian(window), nu.values(), &locals)
}

/// Γ_k(W) = min over disjoint k-tuples of max_l λ^ν_{1,D}(A_l), exact.
pub fn gamma_k(window: &Window<'_>, k: usize, nu: &VertexMeasure) -> Result<CheegerResult> {
    check_order(window, k)?;
    let n = window.len();
    let solves = 2f64.powi(n as i32) * (n as f64).powi(3);
    if n > MASK_LIMIT || !exact_feasible(n, k) || solves > EXACT_WORK_BUDGET {
        return Err(Error::Budget(format!("exact Γ_{k} over {n} vertices exceeds the work budget")));
    }
    let full = dirichlet_laplacian(window);
    let size = 1usize << n;
    let mut g = vec![f64::INFINITY; size];
    for (m, slot) in g.iter_mut().enumerate().skip(1) {
        let locals: Vec<usize> = (0..n).filter(|&i| m & (1 << i) != 0).collect();
        *slot = restricted_first_eigenvalue(&full, nu.values(), &locals)?;
    }
    let (value, parts) = min_max_partition(&g, n, k);
    Ok(CheegerResult {
        value,
        witness: parts.iter().map(|&m| mask_to_vertices(window, m)).collect(),
        method: Method::Enumeration,
    })
}
