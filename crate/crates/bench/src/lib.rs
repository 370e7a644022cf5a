//! Workloads shared by the benchmarks.

use steklov_core::exhaustion::{ExhaustionSequence, RealizedWindow, RegularTree};
use steklov_core::numerics::SymMatrix;
use steklov_core::random::{random_instance, RandomConfig, RandomInstance};

/// Ball of the given radius in the degree-three tree with one root.
pub fn tree_ball(radius: usize) -> RealizedWindow {
    let tree = RegularTree::new(3, 1).expect("valid tree");
    let mut seq = ExhaustionSequence::new(&tree).expect("tree has a root");
    seq.realize(radius, usize::MAX).expect("no budget")
}

/// Ball of the given radius in the degree-three tree with `roots` roots.
pub fn rooted_tree_ball(roots: u64, radius: usize) -> RealizedWindow {
    let tree = RegularTree::new(3, roots).expect("valid tree");
    let mut seq = ExhaustionSequence::new(&tree).expect("tree has roots");
    seq.realize(radius, usize::MAX).expect("no budget")
}

pub fn random_window(seed: u64, max_window: usize) -> RandomInstance {
    let config = RandomConfig {
        min_window: max_window,
        max_window,
        min_boundary: 3,
        ..RandomConfig::default()
    };
    random_instance(seed, 0, &config).expect("random instance")
}

/// Dense symmetric matrix with entries in [−1, 1] from a fixed LCG.
pub fn dense_symmetric(n: usize) -> SymMatrix {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut a = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            a.set(i, j, (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0);
        }
    }
    a
}
