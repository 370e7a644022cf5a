use steklov_core::dtn::dtn_spectrum;
use steklov_core::exhaustion::{
    exhaust_cheeger, exhaust_higher, exhaust_spectrum, graph_eigen_limit, recurrence_test, ExhaustionConfig,
    FamilySpec, FiniteFamily, HalfLine, RegularTree, WeightedBinaryTree,
};
use steklov_core::{build_domain, make_window, Status, Verdict, WeightedGraph};

fn config(depth: usize, tol: f64) -> ExhaustionConfig {
    ExhaustionConfig {
        tol,
        depth_max: depth,
        vertex_budget: 2_000_000,
        step: 1,
    }
}

#[test]
fn tree_spectrum_rows_follow_closed_form() {
    let tree = RegularTree::new(3, 1).unwrap();
    let table = exhaust_spectrum(&tree, 1, &config(14, 0.0)).unwrap();
    assert_eq!(table.status, Status::DepthExhausted);
    for row in &table.rows {
        let p = 2f64.powi(row.radius as i32);
        assert_eq!(row.size, p as usize);
        assert!((row.values[0] - 1.0 / (2.0 - 1.0 / p)).abs() < 1e-12);
    }
}

#[test]
fn binary_tree_limits() {
    let tree = RegularTree::new(3, 1).unwrap();
    let sigma = exhaust_spectrum(&tree, 1, &config(40, 1e-6)).unwrap();
    assert_eq!(sigma.status, Status::Converged);
    let limit = sigma.limit("sigma_k").unwrap();
    assert!((limit.estimate - 0.5).abs() <= 1e-6);
    let cheeger = exhaust_cheeger(&tree, &config(12, 0.0)).unwrap();
    let h = cheeger.limit("h").unwrap();
    // 2^r/(3·2^r − 2) decreases to 1/3
    assert!(h.estimate > 1.0 / 3.0 && h.estimate - 1.0 / 3.0 < 1e-4);
    assert!(cheeger.column("h_J").unwrap().iter().all(|&v| v == 1.0));
}

#[test]
fn weighted_tree_capacity_is_harmonic_series() {
    let recurrent = WeightedBinaryTree::new(0.5).unwrap();
    let report = recurrence_test(&recurrent, 0.05, &config(30, 0.0)).unwrap();
    assert_eq!(report.verdict, Verdict::Recurrent);
    for row in &report.table.rows {
        // every level has total conductance 1, so W_r is r + 1 unit resistors in series
        assert!((row.values[0] - 1.0 / (row.radius as f64 + 1.0)).abs() < 1e-12);
    }
    let transient = WeightedBinaryTree::new(1.0).unwrap();
    let report = recurrence_test(&transient, 1e-6, &config(64, 0.0)).unwrap();
    assert_eq!(report.verdict, Verdict::Transient);
    let last = report.table.rows.last().unwrap().values[0];
    assert!((last - 0.5).abs() < 1e-5);
}

#[test]
fn half_line_is_recurrent() {
    let report = recurrence_test(&HalfLine, 1e-2, &config(128, 0.0)).unwrap();
    assert_eq!(report.verdict, Verdict::Recurrent);
    assert_eq!(report.table.rows.last().unwrap().size, 101);
}

#[test]
fn finite_family_stabilizes_at_the_whole_domain() {
    let graph = WeightedGraph::from_edges(
        6,
        &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 3.0), (4, 5, 1.0), (1, 4, 1.0)],
    )
    .unwrap();
    let domain = build_domain(&graph, &[1, 2, 3, 4]).unwrap();
    let closure = domain.closure();
    let whole = make_window(&domain, &closure).unwrap();
    let expected = dtn_spectrum(&whole).unwrap();
    let family = FiniteFamily::new(domain.clone()).unwrap();
    let table = exhaust_spectrum(&family, 2, &config(20, 1e-9)).unwrap();
    assert_eq!(table.status, Status::Stabilized);
    let last = table.rows.last().unwrap();
    assert_eq!(last.size, closure.len());
    assert!((last.values[0] - expected[1]).abs() < 1e-12);
}

#[test]
fn two_root_tree_reports_the_second_constant() {
    let tree = RegularTree::new(3, 2).unwrap();
    let table = exhaust_higher(&tree, 2, &config(3, 0.0)).unwrap();
    let sigma = table.column("sigma_k").unwrap();
    let h_j = table.column("h_J^k").unwrap();
    assert!(!sigma.is_empty());
    for (s, j) in sigma.iter().zip(&h_j) {
        assert!(*s <= 2.0 * j + 1e-10);
        assert!(*s > 0.0 && *s <= 1.0 + 1e-12);
    }
    let flagged = sigma.iter().zip(&h_j).filter(|(s, j)| **s > **j + 1e-10).count();
    assert_eq!(table.violations.len(), flagged);
}

#[test]
fn coarser_steps_visit_a_subsequence() {
    let tree = RegularTree::new(3, 1).unwrap();
    let fine = exhaust_spectrum(&tree, 1, &config(12, 0.0)).unwrap();
    let coarse = exhaust_spectrum(&tree, 1, &ExhaustionConfig { step: 3, ..config(12, 0.0) }).unwrap();
    for row in &coarse.rows {
        let same = fine.rows.iter().find(|r| r.radius == row.radius).unwrap();
        assert_eq!(same.size, row.size);
        assert!((same.values[0] - row.values[0]).abs() < 1e-14);
    }
}

#[test]
fn budget_stops_with_partial_table() {
    let tree = RegularTree::new(4, 1).unwrap();
    let table = exhaust_spectrum(&tree, 1, &ExhaustionConfig { vertex_budget: 500, ..config(40, 0.0) }).unwrap();
    assert_eq!(table.status, Status::BudgetExceeded);
    assert!(table.rows.iter().all(|r| r.size <= 500));
    assert!(!table.rows.is_empty());
}

#[test]
fn dirichlet_eigenvalue_lies_below_steklov() {
    let table = graph_eigen_limit(&HalfLine, 1, &config(40, 0.0)).unwrap();
    let lambda = table.column("lambda_k_D").unwrap();
    let sigma = table.column("sigma_k").unwrap();
    for (l, s) in lambda.iter().zip(&sigma) {
        assert!(*l <= *s + 1e-12);
    }
}

#[test]
fn family_specs_parse() {
    let spec: FamilySpec = serde_json::from_str(r#"{"family":"regular_tree","degree":3}"#).unwrap();
    assert_eq!(spec, FamilySpec::RegularTree { degree: 3, roots: 1 });
    let spec: FamilySpec = serde_json::from_str(r#"{"family":"binary_tree_weighted","ratio":0.5}"#).unwrap();
    assert_eq!(spec.build(|_| unreachable!()).unwrap().describe(), "binary_tree_weighted(ratio=0.5)");
    assert!(serde_json::from_str::<FamilySpec>(r#"{"family":"half_line","extra":1}"#).is_err());
}
