//! Library results against independent computations: closed forms, direct
//! evaluation of the definitions on the host graph, and a separate dense
//! elimination.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steklov_core::cheeger::{
    cheeger_enumerate, cheeger_parametric_cut, gamma_k, higher_order_constants_with, HigherOrderMode, Ratio,
    VertexMeasure,
};
use steklov_core::dtn::{assemble_dtn, blowup_spectrum, dirichlet_laplacian_spectrum, dtn_spectrum};
use steklov_core::exhaustion::{ExhaustionSequence, RegularTree};
use steklov_core::harmonic::{capacity, harmonic_extension, normal_derivative, BoundaryData};
use steklov_core::{build_domain, make_window, WeightedGraph};

/// A host graph with Ω and a window, kept in raw form.
struct Host {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    omega: Vec<bool>,
    members: Vec<usize>,
}

impl Host {
    fn random(rng: &mut ChaCha8Rng, max_window: usize) -> Host {
        loop {
            let n = rng.gen_range(5..=max_window + 4);
            let mut edges = Vec::new();
            for v in 1..n {
                edges.push((rng.gen_range(0..v), v, rng.gen_range(1..=5) as f64));
            }
            for _ in 0..n / 2 {
                let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if u != v && !edges.iter().any(|&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u)) {
                    edges.push((u, v, rng.gen_range(1..=5) as f64));
                }
            }
            if rng.gen_bool(0.5) {
                let x = rng.gen_range(0..n);
                edges.push((x, x, 2.0));
            }
            let omega: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.6)).collect();
            if omega.iter().all(|&o| o) || omega.iter().all(|&o| !o) {
                continue;
            }
            let host = Host {
                n,
                edges,
                omega,
                members: Vec::new(),
            };
            let closure: Vec<usize> = (0..n).filter(|&x| host.in_closure(x)).collect();
            let boundary: Vec<usize> = closure.iter().copied().filter(|&x| !host.omega[x]).collect();
            if boundary.is_empty() {
                continue;
            }
            let size = rng.gen_range(2..=max_window.min(closure.len()));
            let mut members = vec![boundary[rng.gen_range(0..boundary.len())]];
            while members.len() < size {
                let frontier: Vec<usize> = closure
                    .iter()
                    .copied()
                    .filter(|&y| !members.contains(&y) && members.iter().any(|&x| host.relevant(x, y)))
                    .collect();
                if frontier.is_empty() {
                    break;
                }
                members.push(frontier[rng.gen_range(0..frontier.len())]);
            }
            return Host { members, ..host };
        }
    }

    fn in_closure(&self, x: usize) -> bool {
        self.omega[x] || self.edges.iter().any(|&(u, v, _)| (u == x && self.omega[v]) || (v == x && self.omega[u]))
    }

    /// Edge between x and y that survives pruning.
    fn relevant(&self, x: usize, y: usize) -> bool {
        self.edges
            .iter()
            .any(|&(u, v, _)| ((u, v) == (x, y) || (u, v) == (y, x)) && (self.omega[u] || self.omega[v]))
    }

    fn pruned(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges
            .iter()
            .copied()
            .filter(|&(u, v, _)| self.omega[u] || self.omega[v])
    }

    fn measure(&self, x: usize) -> f64 {
        self.pruned()
            .filter(|&(u, v, _)| u == x || v == x)
            .map(|(_, _, w)| w)
            .sum()
    }

    fn is_boundary(&self, x: usize) -> bool {
        !self.omega[x]
    }

    fn cut(&self, set: &[usize]) -> f64 {
        self.pruned()
            .filter(|&(u, v, _)| set.contains(&u) != set.contains(&v))
            .map(|(_, _, w)| w)
            .sum()
    }

    fn graph(&self) -> WeightedGraph {
        WeightedGraph::from_edges(self.n, &self.edges).unwrap()
    }

    fn interior(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.omega[x]).collect()
    }

    /// Schur complement of the window Laplacian onto W∩δΩ, in the order given.
    fn schur(&self, boundary: &[usize]) -> Vec<Vec<f64>> {
        let interior: Vec<usize> = self.members.iter().copied().filter(|&x| self.omega[x]).collect();
        let laplacian = |x: usize, y: usize| -> f64 {
            if x == y {
                self.pruned()
                    .filter(|&(u, v, _)| u != v && (u == x || v == x))
                    .map(|(_, _, w)| w)
                    .sum()
            } else {
                -self
                    .pruned()
                    .filter(|&(u, v, _)| (u, v) == (x, y) || (u, v) == (y, x))
                    .map(|(_, _, w)| w)
                    .sum::<f64>()
            }
        };
        let m = interior.len();
        let p = boundary.len();
        let mut out = vec![vec![0.0; p]; p];
        for (j, &b) in boundary.iter().enumerate() {
            let a: Vec<Vec<f64>> = interior.iter().map(|&x| interior.iter().map(|&y| laplacian(x, y)).collect()).collect();
            let rhs: Vec<f64> = interior.iter().map(|&x| laplacian(x, b)).collect();
            let z = if m == 0 { Vec::new() } else { gauss_solve(a, rhs) };
            for (i, &c) in boundary.iter().enumerate() {
                let correction: f64 = interior.iter().zip(&z).map(|(&x, zx)| laplacian(c, x) * zx).sum();
                out[i][j] = laplacian(c, b) - correction;
            }
        }
        out
    }
}

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col];
        if a[col][col] == 0.0 {
            return 0.0;
        }
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

fn subsets(items: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (1u32..1 << items.len()).map(move |m| (0..items.len()).filter(|&i| m >> i & 1 == 1).map(|i| items[i]).collect())
}

#[test]
fn measure_and_pruning_match_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let host = Host::random(&mut rng, 8);
        let domain = build_domain(&host.graph(), &host.interior()).unwrap();
        for x in 0..host.n {
            assert_eq!(domain.in_closure(x), host.in_closure(x));
            if host.in_closure(x) {
                assert_eq!(domain.measure(x), host.measure(x), "vertex {x}");
                assert_eq!(domain.is_boundary(x), host.is_boundary(x));
            }
        }
    }
}

#[test]
fn dtn_matches_dense_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let host = Host::random(&mut rng, 9);
        let domain = build_domain(&host.graph(), &host.interior()).unwrap();
        let window = make_window(&domain, &host.members).unwrap();
        let form = assemble_dtn(&window).unwrap();
        let expected = host.schur(window.boundary());
        let p = window.boundary_len();
        for i in 0..p {
            for j in 0..p {
                assert!((form.form.get(i, j) - expected[i][j]).abs() < 1e-10);
            }
        }
        // trace and determinant of diag(d)^-1 B against the spectrum
        let d: Vec<f64> = window.boundary().iter().map(|&z| host.measure(z)).collect();
        let sigma = dtn_spectrum(&window).unwrap();
        let trace: f64 = (0..p).map(|i| expected[i][i] / d[i]).sum();
        assert!((sigma.iter().sum::<f64>() - trace).abs() < 1e-9);
        let det = determinant(expected) / d.iter().product::<f64>();
        assert!((sigma.iter().product::<f64>() - det).abs() < 1e-9 * det.abs().max(1.0));
    }
}

#[test]
fn cheeger_constants_match_direct_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let host = Host::random(&mut rng, 9);
        let domain = build_domain(&host.graph(), &host.interior()).unwrap();
        let window = make_window(&domain, &host.members).unwrap();
        let mut h = f64::INFINITY;
        let mut h_j = f64::INFINITY;
        for a in subsets(&host.members) {
            let cut = host.cut(&a);
            h = h.min(cut / a.iter().map(|&x| host.measure(x)).sum::<f64>());
            let den: f64 = a.iter().filter(|&&x| host.is_boundary(x)).map(|&x| host.measure(x)).sum();
            if den > 0.0 {
                h_j = h_j.min(cut / den);
            }
        }
        let (eh, ej) = cheeger_enumerate(&window).unwrap();
        assert!((eh.value - h).abs() < 1e-12);
        assert!((ej.value - h_j).abs() < 1e-12);
        let ch = cheeger_parametric_cut(&window, Ratio::Classical).unwrap();
        let cj = cheeger_parametric_cut(&window, Ratio::Jammes).unwrap();
        assert!((ch.value - h).abs() < 1e-12);
        assert!((cj.value - h_j).abs() < 1e-12);
    }
}

/// Every assignment of W to k labelled parts or to no part.
fn assignments(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (k + 1).pow(n as u32);
    (0..total).map(move |mut code| {
        let mut labels = vec![0; n];
        for l in labels.iter_mut() {
            *l = code % (k + 1);
            code /= k + 1;
        }
        labels
    })
}

#[test]
fn higher_order_constants_match_assignment_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    while checked < 60 {
        let host = Host::random(&mut rng, 6);
        let domain = build_domain(&host.graph(), &host.interior()).unwrap();
        let window = make_window(&domain, &host.members).unwrap();
        let n = host.members.len();
        let ratio_j = |a: &[usize]| {
            let den: f64 = a.iter().filter(|&&x| host.is_boundary(x)).map(|&x| host.measure(x)).sum();
            if den > 0.0 {
                host.cut(a) / den
            } else {
                f64::INFINITY
            }
        };
        let inner = |a: &[usize]| {
            let mut h = f64::INFINITY;
            let mut h_j = f64::INFINITY;
            for b in subsets(a) {
                h = h.min(host.cut(&b) / b.iter().map(|&x| host.measure(x)).sum::<f64>());
                h_j = h_j.min(ratio_j(&b));
            }
            h * h_j
        };
        for k in 2..=3.min(n) {
            let mut best_j = f64::INFINITY;
            let mut best_k = f64::INFINITY;
            for labels in assignments(n, k) {
                let parts: Vec<Vec<usize>> = (1..=k)
                    .map(|l| (0..n).filter(|&i| labels[i] == l).map(|i| host.members[i]).collect())
                    .collect();
                if parts.iter().any(|p| p.is_empty()) {
                    continue;
                }
                best_j = best_j.min(parts.iter().map(|p| ratio_j(p)).fold(0.0, f64::max));
                best_k = best_k.min(parts.iter().map(|p| inner(p)).fold(0.0, f64::max));
            }
            let (h_k, h_j_k) = higher_order_constants_with(&window, k, HigherOrderMode::Exact).unwrap();
            assert!(h_j_k.value == best_j || (h_j_k.value - best_j).abs() < 1e-12, "{} {}", h_j_k.value, best_j);
            assert!(h_k.value == best_k || (h_k.value - best_k).abs() < 1e-12, "{} {}", h_k.value, best_k);
        }
        checked += 1;
    }
}

fn half_line(len: usize) -> steklov_core::Domain {
    let edges: Vec<_> = (0..len - 1).map(|i| (i, i + 1, 1.0)).collect();
    build_domain(&WeightedGraph::from_edges(len, &edges).unwrap(), &(1..len).collect::<Vec<_>>()).unwrap()
}

#[test]
fn half_line_closed_forms() {
    let domain = half_line(40);
    for n in 1..30 {
        let window = make_window(&domain, &(0..n).collect::<Vec<_>>()).unwrap();
        let f = BoundaryData::constant(&window, 1.0);
        let u = harmonic_extension(&window, &f).unwrap();
        for i in 0..=n {
            assert!((u.values[i] - (1.0 - i as f64 / n as f64)).abs() < 1e-13);
        }
        assert!((normal_derivative(&window, &u.values, 0).unwrap() - 1.0 / n as f64).abs() < 1e-13);
        assert!((capacity(&window, &f).unwrap() - 1.0 / n as f64).abs() < 1e-13);
        assert!((dtn_spectrum(&window).unwrap()[0] - 1.0 / n as f64).abs() < 1e-13);
        let lambda = dirichlet_laplacian_spectrum(&window).unwrap()[0];
        assert!(lambda <= 1.0 / n as f64 + 1e-12);
        if n <= 20 {
            let (h, h_j) = cheeger_enumerate(&window).unwrap();
            // the whole window: one cut edge over d = 1 + 2(n − 1)
            assert!((h.value - 1.0 / (2 * n - 1) as f64).abs() < 1e-15);
            assert_eq!(h_j.value, 1.0);
        }
    }
}

#[test]
fn weighted_path_capacity_is_series_conductance() {
    let weights = [2.0, 0.5, 3.0, 1.0, 4.0, 0.25];
    let edges: Vec<_> = weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)).collect();
    let graph = WeightedGraph::from_edges(7, &edges).unwrap();
    let domain = build_domain(&graph, &(1..7).collect::<Vec<_>>()).unwrap();
    for n in 1..6 {
        let window = make_window(&domain, &(0..n).collect::<Vec<_>>()).unwrap();
        let resistance: f64 = weights[..n].iter().map(|w| 1.0 / w).sum();
        let cap = capacity(&window, &BoundaryData::constant(&window, 1.0)).unwrap();
        assert!((cap - 1.0 / resistance).abs() < 1e-13);
        // σ₁ = Cap / d(0) with the single boundary vertex
        assert!((dtn_spectrum(&window).unwrap()[0] - cap / weights[0]).abs() < 1e-13);
    }
}

#[test]
fn half_line_pencils() {
    let domain = half_line(6);
    let window = make_window(&domain, &[0, 1]).unwrap();
    let lambda = dirichlet_laplacian_spectrum(&window).unwrap();
    assert!((lambda[0] - (1.0 - 0.5f64.sqrt())).abs() < 1e-14);
    assert!((lambda[1] - (1.0 + 0.5f64.sqrt())).abs() < 1e-14);
    // mass diag(1, 2/r): (2/r)λ² − (2 + 2/r)λ + 1 = 0
    for r in [100.0, 1024.0, 1_048_576.0] {
        let (a, b): (f64, f64) = (2.0 / r, -(2.0 + 2.0 / r));
        let disc = (b * b - 4.0 * a).sqrt();
        let small = 2.0 / (-b + disc);
        let large = (-b + disc) / (2.0 * a);
        let values = blowup_spectrum(&window, r).unwrap();
        assert!((values[0] - small).abs() < 1e-12 * large.max(1.0), "r = {r}");
        assert!((values[1] - large).abs() < 1e-9 * large);
    }
    let at_100 = blowup_spectrum(&window, 100.0).unwrap()[0];
    assert!((at_100 - 0.4975000625).abs() < 1e-9);
    let top = blowup_spectrum(&window, 1_048_576.0).unwrap();
    assert!((top[0] - 0.5).abs() <= 3e-6);
    assert!((top[1] / 1_048_576.0 - 1.0).abs() < 0.1);
}

#[test]
fn star_fixture_values() {
    let graph = WeightedGraph::from_edges(4, &[(0, 2, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
    let domain = build_domain(&graph, &[2, 3]).unwrap();
    let window = make_window(&domain, &[0, 1, 2]).unwrap();
    let form = assemble_dtn(&window).unwrap();
    let expected = [[2.0 / 3.0, -1.0 / 3.0], [-1.0 / 3.0, 2.0 / 3.0]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((form.form.get(i, j) - expected[i][j]).abs() < 1e-15);
        }
    }
    let f = BoundaryData::new(&window, vec![1.0, 0.0]).unwrap();
    let u = harmonic_extension(&window, &f).unwrap();
    assert!((u.values[2] - 1.0 / 3.0).abs() < 1e-15);
    assert!((normal_derivative(&window, &u.values, 0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((normal_derivative(&window, &u.values, 1).unwrap() + 1.0 / 3.0).abs() < 1e-15);
    let sigma = dtn_spectrum(&window).unwrap();
    assert!((sigma[0] - 1.0 / 3.0).abs() < 1e-14 && (sigma[1] - 1.0).abs() < 1e-14);
    let (h_2, h_j_2) = higher_order_constants_with(&window, 2, HigherOrderMode::Exact).unwrap();
    assert_eq!(h_j_2.value, 1.0);
    assert!(h_2.value > 0.0);
    // Γ₂ by hand: the pair ({b₁}, {b₂}) gives max(1, 1) = 1 and nothing does better
    let gamma = gamma_k(&window, 2, &VertexMeasure::from_domain(&window)).unwrap();
    assert!((gamma.value - 1.0).abs() < 1e-14);
}

#[test]
fn tree_balls_closed_forms() {
    let tree = RegularTree::new(3, 1).unwrap();
    let mut seq = ExhaustionSequence::new(&tree).unwrap();
    for radius in 0..12 {
        let ball = seq.realize(radius, usize::MAX).unwrap();
        let window = ball.window().unwrap();
        let p = 2f64.powi(radius as i32);
        assert_eq!(window.len(), p as usize);
        let sigma = dtn_spectrum(&window).unwrap()[0];
        assert!((sigma - 1.0 / (2.0 - 1.0 / p)).abs() < 1e-13);
        let h = cheeger_parametric_cut(&window, Ratio::Classical).unwrap().value;
        assert!((h - p / (3.0 * p - 2.0)).abs() < 1e-13);
        assert_eq!(cheeger_parametric_cut(&window, Ratio::Jammes).unwrap().value, 1.0);
    }
}
