//! Seeded random instances: a connected host graph, a random Ω with nonempty
//! δΩ, and a window grown inside Ω̄ from a boundary vertex.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{build_domain, make_window, Domain, VertexId, WeightedGraph, Window};

#[derive(Debug, Clone)]
pub struct RandomConfig {
    pub min_window: usize,
    pub max_window: usize,
    /// Minimum #(W∩δΩ).
    pub min_boundary: usize,
    /// Largest integer edge weight; weights are drawn from 1..=max_weight.
    pub max_weight: u32,
    /// Probability of a self-loop at each vertex.
    pub loop_probability: f64,
}

impl Default for RandomConfig {
    fn default() -> Self {
        Self {
            min_window: 4,
            max_window: 12,
            min_boundary: 1,
            max_weight: 5,
            loop_probability: 0.1,
        }
    }
}

/// One generated instance. `seed` and `index` reproduce it.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub seed: u64,
    pub index: u64,
    pub domain: Domain,
    pub members: Vec<VertexId>,
}

impl RandomInstance {
    pub fn window(&self) -> Result<Window<'_>> {
        make_window(&self.domain, &self.members)
    }
}

const MAX_ATTEMPTS: usize = 1000;

/// The `index`-th instance of the stream for `seed`. Each index uses its own
/// ChaCha stream, so instances do not depend on one another.
pub fn random_instance(seed: u64, index: u64, config: &RandomConfig) -> Result<RandomInstance> {
    if config.min_window < 1 || config.min_window > config.max_window {
        return Err(Error::InvalidParameter(format!(
            "window size range {}..={} is empty",
            config.min_window, config.max_window
        )));
    }
    if config.min_boundary > config.max_window || config.max_weight < 1 {
        return Err(Error::InvalidParameter("unsatisfiable random instance configuration".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    for _ in 0..MAX_ATTEMPTS {
        if let Some((domain, members)) = attempt(&mut rng, config)? {
            return Ok(RandomInstance {
                seed,
                index,
                domain,
                members,
            });
        }
    }
    Err(Error::InvalidParameter("random instance constraints could not be met".into()))
}

/// Instances `0..count` of the stream for `seed`.
pub fn random_instances(seed: u64, count: usize, config: &RandomConfig) -> Result<Vec<RandomInstance>> {
    (0..count as u64).map(|i| random_instance(seed, i, config)).collect()
}

fn attempt(rng: &mut ChaCha8Rng, config: &RandomConfig) -> Result<Option<(Domain, Vec<VertexId>)>> {
    let n = rng.gen_range(config.max_window.max(4)..=config.max_window + 6);
    let graph = random_host(rng, n, config)?;
    let p = rng.gen_range(0.3..0.8);
    let mut omega: Vec<VertexId> = (0..n).filter(|_| rng.gen_bool(p)).collect();
    if omega.is_empty() {
        omega.push(rng.gen_range(0..n));
    }
    if omega.len() == n {
        let drop = rng.gen_range(0..n);
        omega.retain(|&x| x != drop);
    }
    let domain = build_domain(&graph, &omega)?;
    let boundary = domain.boundary();
    if boundary.is_empty() {
        return Ok(None);
    }
    let target = rng.gen_range(config.min_window..=config.max_window);
    let start = *boundary.choose(rng).unwrap();
    let members = grow_window(rng, &domain, start, target);
    let on_boundary = members.iter().filter(|&&x| domain.is_boundary(x)).count();
    if members.len() < config.min_window || on_boundary < config.min_boundary {
        return Ok(None);
    }
    Ok(Some((domain, members)))
}

/// Random spanning tree plus about n/2 extra edges and occasional loops.
fn random_host(rng: &mut ChaCha8Rng, n: usize, config: &RandomConfig) -> Result<WeightedGraph> {
    let weight = |rng: &mut ChaCha8Rng| rng.gen_range(1..=config.max_weight) as f64;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    let mut present = HashSet::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        present.insert((order[i].min(parent), order[i].max(parent)));
        edges.push((order[i], parent, weight(rng)));
    }
    for _ in 0..rng.gen_range(0..=n / 2 + 1) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && present.insert((u.min(v), u.max(v))) {
            edges.push((u, v, weight(rng)));
        }
    }
    for x in 0..n {
        if rng.gen_bool(config.loop_probability) {
            edges.push((x, x, weight(rng)));
        }
    }
    WeightedGraph::from_edges(n, &edges)
}

/// Grows a connected subset of Ω̄ from `start` by adding random frontier
/// vertices of the pruned graph.
fn grow_window(rng: &mut ChaCha8Rng, domain: &Domain, start: VertexId, target: usize) -> Vec<VertexId> {
    let mut members = vec![start];
    let mut frontier: Vec<VertexId> = Vec::new();
    let push_neighbors = |x: VertexId, members: &[VertexId], frontier: &mut Vec<VertexId>| {
        for (y, _) in domain.graph().neighbors(x) {
            if !members.contains(&y) && !frontier.contains(&y) {
                frontier.push(y);
            }
        }
    };
    push_neighbors(start, &members, &mut frontier);
    while members.len() < target && !frontier.is_empty() {
        let y = frontier.swap_remove(rng.gen_range(0..frontier.len()));
        members.push(y);
        push_neighbors(y, &members, &mut frontier);
    }
    members
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible_and_valid() {
        let config = RandomConfig::default();
        for i in 0..50 {
            let a = random_instance(3, i, &config).unwrap();
            let b = random_instance(3, i, &config).unwrap();
            assert_eq!(a.members, b.members);
            let w = a.window().unwrap();
            assert!((4..=12).contains(&w.len()));
            assert!(w.boundary_len() >= 1);
            for x in a.domain.interior() {
                assert!(a.domain.measure(x) > 0.0);
            }
            for (_, _, wt) in a.domain.graph().edges() {
                assert!(wt == wt.round() && (1.0..=5.0).contains(&wt));
            }
        }
    }

    #[test]
    fn boundary_minimum_is_honored() {
        let config = RandomConfig {
            min_boundary: 3,
            max_window: 10,
            ..RandomConfig::default()
        };
        for i in 0..20 {
            let inst = random_instance(11, i, &config).unwrap();
            assert!(inst.window().unwrap().boundary_len() >= 3);
        }
    }
}
