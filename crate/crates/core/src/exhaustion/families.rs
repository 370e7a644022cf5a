//! Built-in graph families given by neighbor oracles.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Domain, Role};

/// An infinite (or finite) weighted graph with a finite vertex boundary δΩ,
/// exposed through a neighbor oracle on the pruned graph (Ω̄, E(Ω, Ω̄)).
pub trait GraphFamily {
    fn describe(&self) -> String;

    /// δΩ; finite and adjacent to Ω.
    fn boundary(&self) -> Vec<u64>;

    fn is_boundary(&self, v: u64) -> bool;

    /// Appends the pruned neighbors of `v` with their weights. A self-loop
    /// appears once.
    fn neighbors(&self, v: u64, out: &mut Vec<(u64, f64)>);

    /// d(v) on the pruned graph.
    fn measure(&self, v: u64) -> f64 {
        let mut out = Vec::new();
        self.neighbors(v, &mut out);
        out.iter().map(|&(_, w)| w).sum()
    }
}

/// A regular tree of degree `degree` cut open at `roots` boundary vertices.
///
/// Each boundary root has one neighbor in Ω and every vertex of Ω has degree
/// `degree`: one parent and `degree − 1` children. With one root and degree
/// three, h_J(Ω) = 1, h(Ω) = 1/3 and σ₁(Ω) = 1/2.
///
/// Ids: roots are `0..roots`; Ω vertex j has id `roots + j`, and the children
/// of Ω vertex j are Ω vertices `roots + (degree − 1)·j + t`.
#[derive(Debug, Clone)]
pub struct RegularTree {
    pub degree: u64,
    pub roots: u64,
}

impl RegularTree {
    pub fn new(degree: u64, roots: u64) -> Result<Self> {
        if degree < 3 {
            return Err(Error::InvalidParameter(format!("tree degree must be at least 3, got {degree}")));
        }
        if roots < 1 {
            return Err(Error::InvalidParameter("tree needs at least one root".into()));
        }
        Ok(Self { degree, roots })
    }
}

impl GraphFamily for RegularTree {
    fn describe(&self) -> String {
        format!("regular_tree(degree={}, roots={})", self.degree, self.roots)
    }

    fn boundary(&self) -> Vec<u64> {
        (0..self.roots).collect()
    }

    fn is_boundary(&self, v: u64) -> bool {
        v < self.roots
    }

    fn neighbors(&self, v: u64, out: &mut Vec<(u64, f64)>) {
        let m = self.roots;
        if v < m {
            out.push((m + v, 1.0));
            return;
        }
        let j = v - m;
        let branching = self.degree - 1;
        let parent = if j < m { j } else { m + (j - m) / branching };
        out.push((parent, 1.0));
        for t in 0..branching {
            out.push((m + m + branching * j + t, 1.0));
        }
    }
}

/// The path 0 – 1 – 2 – … with unit weights and δΩ = {0}.
#[derive(Debug, Clone, Default)]
pub struct HalfLine;

impl GraphFamily for HalfLine {
    fn describe(&self) -> String {
        "half_line".into()
    }

    fn boundary(&self) -> Vec<u64> {
        vec![0]
    }

    fn is_boundary(&self, v: u64) -> bool {
        v == 0
    }

    fn neighbors(&self, v: u64, out: &mut Vec<(u64, f64)>) {
        if v > 0 {
            out.push((v - 1, 1.0));
        }
        out.push((v + 1, 1.0));
    }
}

/// The single-root binary tree (root with one child, every Ω vertex with two
/// children) where an edge from level ℓ to level ℓ + 1 has weight ratioˡ.
/// The boundary root sits at level 0. Ratio 1/2 gives a recurrent graph,
/// ratio 1 the transient unweighted tree.
#[derive(Debug, Clone)]
pub struct WeightedBinaryTree {
    pub ratio: f64,
}

impl WeightedBinaryTree {
    pub fn new(ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight ratio must be positive, got {ratio}")));
        }
        Ok(Self { ratio })
    }

    fn level(v: u64) -> u32 {
        // ids follow RegularTree { degree: 3, roots: 1 }: root 0, then level ℓ ≥ 1
        // holds ids 2^(ℓ−1) ..= 2^ℓ − 1
        if v == 0 {
            0
        } else {
            64 - v.leading_zeros()
        }
    }
}

impl GraphFamily for WeightedBinaryTree {
    fn describe(&self) -> String {
        format!("binary_tree_weighted(ratio={})", self.ratio)
    }

    fn boundary(&self) -> Vec<u64> {
        vec![0]
    }

    fn is_boundary(&self, v: u64) -> bool {
        v == 0
    }

    fn neighbors(&self, v: u64, out: &mut Vec<(u64, f64)>) {
        let start = out.len();
        RegularTree { degree: 3, roots: 1 }.neighbors(v, out);
        for entry in &mut out[start..] {
            let upper = Self::level(v).min(Self::level(entry.0));
            entry.1 = self.ratio.powi(upper as i32);
        }
    }
}

/// A finite domain used as a degenerate family.
#[derive(Debug, Clone)]
pub struct FiniteFamily {
    domain: Domain,
}

impl FiniteFamily {
    pub fn new(domain: Domain) -> Result<Self> {
        if domain.boundary().is_empty() {
            return Err(Error::NoBoundary);
        }
        Ok(Self { domain })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }
}

impl GraphFamily for FiniteFamily {
    fn describe(&self) -> String {
        format!(
            "finite_file({} vertices, {} boundary)",
            self.domain.closure().len(),
            self.domain.boundary().len()
        )
    }

    fn boundary(&self) -> Vec<u64> {
        self.domain.boundary().into_iter().map(|x| x as u64).collect()
    }

    fn is_boundary(&self, v: u64) -> bool {
        self.domain.role(v as usize) == Role::Boundary
    }

    fn neighbors(&self, v: u64, out: &mut Vec<(u64, f64)>) {
        out.extend(self.domain.graph().neighbors(v as usize).map(|(y, w)| (y as u64, w)));
    }

    fn measure(&self, v: u64) -> f64 {
        self.domain.measure(v as usize)
    }
}

/// JSON description of a family, e.g. `{"family":"regular_tree","degree":3}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    RegularTree {
        degree: u64,
        #[serde(default = "one")]
        roots: u64,
    },
    HalfLine {},
    BinaryTreeWeighted {
        ratio: f64,
    },
    FiniteFile {
        path: String,
    },
}

fn one() -> u64 {
    1
}

impl FamilySpec {
    /// Instantiates the family. `finite_file` reads its graph with `load`.
    pub fn build(&self, load: impl FnOnce(&str) -> Result<Domain>) -> Result<Box<dyn GraphFamily>> {
        Ok(match self {
            FamilySpec::RegularTree { degree, roots } => Box::new(RegularTree::new(*degree, *roots)?),
            FamilySpec::HalfLine {} => Box::new(HalfLine),
            FamilySpec::BinaryTreeWeighted { ratio } => Box::new(WeightedBinaryTree::new(*ratio)?),
            FamilySpec::FiniteFile { path } => Box::new(FiniteFamily::new(load(path)?)?),
        })
    }
}

/// Checks the oracle is symmetric on every vertex within `radius` of δΩ.
pub fn check_symmetry(family: &dyn GraphFamily, radius: usize) -> Result<()> {
    let mut seen: BTreeSet<u64> = family.boundary().into_iter().collect();
    let mut frontier: Vec<u64> = seen.iter().copied().collect();
    let mut out = Vec::new();
    let mut back = Vec::new();
    for _ in 0..=radius {
        let mut next = Vec::new();
        for &v in &frontier {
            out.clear();
            family.neighbors(v, &mut out);
            for &(y, w) in &out {
                back.clear();
                family.neighbors(y, &mut back);
                let mirrored: f64 = back.iter().filter(|&&(x, _)| x == v).map(|&(_, w)| w).sum();
                let forward: f64 = out.iter().filter(|&&(x, _)| x == y).map(|&(_, w)| w).sum();
                if mirrored != forward || !(w >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "neighbor oracle of {} is not symmetric at {v} -- {y}",
                        family.describe()
                    )));
                }
                if seen.insert(y) {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    Ok(())
}
