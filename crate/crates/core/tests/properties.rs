use proptest::prelude::*;

use steklov_core::cheeger::{cheeger_enumerate, cheeger_parametric_cut, coarea_check, level_set_integrals, Ratio};
use steklov_core::dtn::{assemble_dtn, dtn_spectrum};
use steklov_core::harmonic::{capacity, dirichlet_energy, harmonic_extension, BoundaryData};
use steklov_core::random::{random_instance, RandomConfig, RandomInstance};
use steklov_core::{build_domain, make_window, Domain, WeightedGraph, Window};

fn instance(seed: u64, index: u64) -> RandomInstance {
    random_instance(seed, index, &RandomConfig::default()).unwrap()
}

fn instances() -> impl Strategy<Value = RandomInstance> {
    (any::<u64>(), 0u64..1000).prop_map(|(s, i)| instance(s, i))
}

fn scaled(domain: &Domain, c: f64) -> Domain {
    let edges: Vec<_> = domain.graph().edges().map(|(u, v, w)| (u, v, c * w)).collect();
    let graph = WeightedGraph::from_edges(domain.graph().vertex_count(), &edges).unwrap();
    build_domain(&graph, &domain.interior()).unwrap()
}

/// Values on the closure of W: `inner` on W, zero on the collar.
fn on_window(window: &Window<'_>, inner: &[f64]) -> Vec<f64> {
    let mut u: Vec<f64> = inner.iter().copied().cycle().take(window.len()).collect();
    u.resize(window.closure_len(), 0.0);
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dtn_is_symmetric_and_spectrum_in_unit_interval(inst in instances()) {
        let window = inst.window().unwrap();
        let form = assemble_dtn(&window).unwrap();
        let p = window.boundary_len();
        for i in 0..p {
            for j in 0..i {
                prop_assert!((form.form.get(i, j) - form.form.get(j, i)).abs() < 1e-12);
            }
        }
        for s in dtn_spectrum(&window).unwrap() {
            prop_assert!(s >= -1e-12 && s <= 1.0 + 1e-12, "sigma = {}", s);
        }
    }

    #[test]
    fn extension_minimises_energy(inst in instances(), data in prop::collection::vec(-3.0f64..3.0, 12), free in prop::collection::vec(-3.0f64..3.0, 12)) {
        let window = inst.window().unwrap();
        let p = window.boundary_len();
        let f = BoundaryData::new(&window, data.iter().copied().cycle().take(p).collect()).unwrap();
        let u = harmonic_extension(&window, &f).unwrap();
        let mut phi = on_window(&window, &free);
        phi[..p].copy_from_slice(f.values());
        let min = dirichlet_energy(&window, &u.values).unwrap();
        prop_assert!(min <= dirichlet_energy(&window, &phi).unwrap() + 1e-10 * min.max(1.0));
    }

    #[test]
    fn measure_is_additive_and_satisfies_handshake(inst in instances()) {
        let domain = &inst.domain;
        let interior = domain.interior();
        let boundary = domain.boundary();
        // every edge of E(Ω, Ω̄) counted once per endpoint, loops once
        let twice: f64 = domain.graph().edges().map(|(u, v, w)| if u == v { w } else { 2.0 * w }).sum();
        let loops: f64 = domain.graph().edges().filter(|(u, v, _)| u == v).map(|(_, _, w)| w).sum();
        let cross: f64 = domain
            .graph()
            .edges()
            .filter(|&(u, v, _)| domain.is_interior(u) != domain.is_interior(v))
            .map(|(_, _, w)| w)
            .sum();
        let total = domain.measure_of(&interior) + domain.measure_of(&boundary);
        prop_assert!((total - twice).abs() < 1e-9);
        prop_assert!((domain.measure_of(&boundary) - cross).abs() < 1e-9);
        prop_assert!(loops >= 0.0);
        let closure = domain.closure();
        let parts: f64 = closure.iter().map(|&x| domain.measure(x)).sum();
        prop_assert!((domain.measure_of(&closure) - parts).abs() < 1e-9);
    }

    #[test]
    fn enumeration_agrees_with_parametric_cut(inst in instances()) {
        let window = inst.window().unwrap();
        let (h, h_j) = cheeger_enumerate(&window).unwrap();
        let ch = cheeger_parametric_cut(&window, Ratio::Classical).unwrap();
        let cj = cheeger_parametric_cut(&window, Ratio::Jammes).unwrap();
        prop_assert!((h.value - ch.value).abs() <= 1e-12 * h.value.max(1.0));
        prop_assert!((h_j.value - cj.value).abs() <= 1e-12 * h_j.value.max(1.0));
        prop_assert!(h_j.value >= h.value);
    }

    #[test]
    fn coarea_and_level_sets(inst in instances(), values in prop::collection::vec(0.0f64..4.0, 12)) {
        let window = inst.window().unwrap();
        let f = on_window(&window, &values);
        let scale: f64 = 1.0 + window.edges().iter().map(|e| e.weight).sum::<f64>() * 16.0;
        prop_assert!(coarea_check(&window, &f).unwrap().gap <= 1e-12 * scale);
        let (all, bdry) = level_set_integrals(&window, &f).unwrap();
        prop_assert!(all.gap <= 1e-12 * scale);
        prop_assert!(bdry.gap <= 1e-12 * scale);
    }

    #[test]
    fn constants_decrease_as_window_grows(inst in instances(), pick in any::<prop::sample::Index>()) {
        let domain = &inst.domain;
        let window = inst.window().unwrap();
        let candidates: Vec<_> = window.collar().to_vec();
        prop_assume!(!candidates.is_empty());
        let extra = *pick.get(&candidates);
        let mut grown = inst.members.clone();
        grown.push(extra);
        let larger = make_window(domain, &grown).unwrap();
        let (h0, j0) = cheeger_enumerate(&window).unwrap();
        let (h1, j1) = cheeger_enumerate(&larger).unwrap();
        prop_assert!(h1.value <= h0.value + 1e-12);
        prop_assert!(j1.value <= j0.value + 1e-12);
        if !domain.is_boundary(extra) {
            // same W∩δΩ: capacity and σ₁ cannot increase
            let c0 = capacity(&window, &BoundaryData::constant(&window, 1.0)).unwrap();
            let c1 = capacity(&larger, &BoundaryData::constant(&larger, 1.0)).unwrap();
            prop_assert!(c1 <= c0 + 1e-10 * c0.max(1.0));
            let s0 = dtn_spectrum(&window).unwrap()[0];
            let s1 = dtn_spectrum(&larger).unwrap()[0];
            prop_assert!(s1 <= s0 + 1e-10);
        }
    }

    #[test]
    fn uniform_weight_scaling(inst in instances(), c in 0.01f64..100.0) {
        let other = scaled(&inst.domain, c);
        let a = inst.window().unwrap();
        let b = make_window(&other, &inst.members).unwrap();
        for (s, t) in dtn_spectrum(&a).unwrap().iter().zip(dtn_spectrum(&b).unwrap()) {
            prop_assert!((s - t).abs() < 1e-10);
        }
        let (ha, ja) = cheeger_enumerate(&a).unwrap();
        let (hb, jb) = cheeger_enumerate(&b).unwrap();
        prop_assert!((ha.value - hb.value).abs() < 1e-12 * ha.value.max(1.0));
        prop_assert!((ja.value - jb.value).abs() < 1e-12 * ja.value.max(1.0));
        let ca = capacity(&a, &BoundaryData::constant(&a, 1.0)).unwrap();
        let cb = capacity(&b, &BoundaryData::constant(&b, 1.0)).unwrap();
        prop_assert!((cb - c * ca).abs() < 1e-9 * (c * ca).max(1.0));
    }
}
