//! Weighted graphs, domains with their vertex boundary, and finite windows.
//!
//! A [`WeightedGraph`] is stored in compressed sparse row form with symmetric
//! weights. A [`Domain`] fixes an interior set Ω, derives its vertex boundary
//! δΩ, removes every edge that does not touch Ω, and carries the vertex measure
//! `d`. A [`Window`] is a finite probe set W ⊆ Ω̄ together with its outer
//! collar δW; every finite computation in this crate runs on a window.

use std::borrow::Cow;
use std::collections::HashMap;

use crate::error::{Error, Result};

/// Dense vertex index assigned at ingestion.
pub type VertexId = usize;

const NONE: usize = usize::MAX;

/// Accumulates vertices and edges before freezing them into a [`WeightedGraph`].
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    unlabeled: usize,
    edges: Vec<(VertexId, VertexId, f64)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder for `n` vertices that are named by their index.
    pub fn with_unlabeled(n: usize) -> Self {
        Self {
            unlabeled: n,
            ..Self::default()
        }
    }

    /// Returns the id of `name`, creating the vertex on first use.
    pub fn vertex(&mut self, name: &str) -> VertexId {
        assert_eq!(self.unlabeled, 0, "cannot mix labeled and unlabeled vertices");
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len().max(self.unlabeled)
    }

    /// Adds `weight` to the edge {u, v}. Zero weights are dropped, negative or
    /// non-finite weights are rejected.
    pub fn edge(&mut self, u: VertexId, v: VertexId, weight: f64) -> Result<()> {
        let n = self.vertex_count();
        for x in [u, v] {
            if x >= n {
                return Err(Error::UnknownVertex(x.to_string()));
            }
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidWeight {
                u: self.label(u).into_owned(),
                v: self.label(v).into_owned(),
                weight,
            });
        }
        if weight > 0.0 {
            self.edges.push((u.min(v), u.max(v), weight));
        }
        Ok(())
    }

    /// Named variant of [`GraphBuilder::edge`]; creates missing vertices.
    pub fn named_edge(&mut self, u: &str, v: &str, weight: f64) -> Result<()> {
        let (a, b) = (self.vertex(u), self.vertex(v));
        self.edge(a, b, weight)
    }

    fn label(&self, x: VertexId) -> Cow<'_, str> {
        match self.labels.get(x) {
            Some(s) => Cow::Borrowed(s.as_str()),
            None => Cow::Owned(x.to_string()),
        }
    }

    pub fn build(self) -> WeightedGraph {
        let n = self.vertex_count();
        let mut edges = self.edges;
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(VertexId, VertexId, f64)> = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += w,
                _ => merged.push((u, v, w)),
            }
        }
        let mut degree = vec![0usize; n];
        for &(u, v, _) in &merged {
            degree[u] += 1;
            if u != v {
                degree[v] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        for &(u, v, w) in &merged {
            targets[fill[u]] = v;
            weights[fill[u]] = w;
            fill[u] += 1;
            if u != v {
                targets[fill[v]] = u;
                weights[fill[v]] = w;
                fill[v] += 1;
            }
        }
        // merged is sorted by (u, v), so each row is filled in increasing
        // target order except for the mirrored entries; sort rows to restore it.
        for x in 0..n {
            let (lo, hi) = (offsets[x], offsets[x + 1]);
            let mut row: Vec<(usize, f64)> = targets[lo..hi]
                .iter()
                .copied()
                .zip(weights[lo..hi].iter().copied())
                .collect();
            row.sort_by_key(|&(t, _)| t);
            for (k, (t, w)) in row.into_iter().enumerate() {
                targets[lo + k] = t;
                weights[lo + k] = w;
            }
        }
        WeightedGraph {
            labels: if self.labels.is_empty() {
                None
            } else {
                Some(self.labels)
            },
            index: self.index,
            offsets,
            targets,
            weights,
        }
    }
}

/// Symmetric, nonnegatively weighted, locally finite graph. Self-loops are
/// allowed and stored once in their vertex's row.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    labels: Option<Vec<String>>,
    index: HashMap<String, VertexId>,
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Graph on `n` unlabeled vertices with the given edges.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId, f64)]) -> Result<Self> {
        let mut b = GraphBuilder::with_unlabeled(n);
        for &(u, v, w) in edges {
            b.edge(u, v, w)?;
        }
        Ok(b.build())
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Neighbors of `x` in increasing id order, with weights.
    pub fn neighbors(&self, x: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        let (lo, hi) = (self.offsets[x], self.offsets[x + 1]);
        self.targets[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    pub fn degree(&self, x: VertexId) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// μ(x, y); zero when the vertices are not adjacent.
    pub fn weight(&self, x: VertexId, y: VertexId) -> f64 {
        let (lo, hi) = (self.offsets[x], self.offsets[x + 1]);
        match self.targets[lo..hi].binary_search(&y) {
            Ok(k) => self.weights[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Each edge once as (u, v, μ) with u ≤ v.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| v >= u)
                .map(move |(v, w)| (u, v, w))
        })
    }

    pub fn name(&self, x: VertexId) -> Cow<'_, str> {
        match &self.labels {
            Some(labels) => Cow::Borrowed(labels[x].as_str()),
            None => Cow::Owned(x.to_string()),
        }
    }

    pub fn id(&self, name: &str) -> Option<VertexId> {
        match &self.labels {
            Some(_) => self.index.get(name).copied(),
            None => name.parse().ok().filter(|&x| x < self.vertex_count()),
        }
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    /// Copy of this graph keeping only the edges accepted by `keep`.
    fn filtered(&self, mut keep: impl FnMut(VertexId, VertexId) -> bool) -> WeightedGraph {
        let n = self.vertex_count();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(self.targets.len());
        let mut weights = Vec::with_capacity(self.weights.len());
        for x in 0..n {
            for (y, w) in self.neighbors(x) {
                if keep(x, y) {
                    targets.push(y);
                    weights.push(w);
                }
            }
            offsets.push(targets.len());
        }
        WeightedGraph {
            labels: self.labels.clone(),
            index: self.index.clone(),
            offsets,
            targets,
            weights,
        }
    }
}

/// Position of a vertex relative to a domain Ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Interior,
    Boundary,
    Outside,
}

/// An interior set Ω in a host graph, its derived boundary δΩ, the pruned
/// weights of E(Ω, Ω̄) and the vertex measure `d`.
#[derive(Debug, Clone)]
pub struct Domain {
    graph: WeightedGraph,
    roles: Vec<Role>,
    measure: Vec<f64>,
}

/// Builds the domain with interior `interior` inside `graph`.
///
/// δΩ is derived from adjacency, every edge not incident to Ω is removed, and
/// `d` is computed on the pruned weights: for x ∈ Ω it sums μ over Ω̄
/// (self-loops included), for x ∈ δΩ it sums μ over Ω.
pub fn build_domain(graph: &WeightedGraph, interior: &[VertexId]) -> Result<Domain> {
    if interior.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let n = graph.vertex_count();
    let mut roles = vec![Role::Outside; n];
    for &x in interior {
        if x >= n {
            return Err(Error::UnknownVertex(x.to_string()));
        }
        roles[x] = Role::Interior;
    }
    for &x in interior {
        for (y, _) in graph.neighbors(x) {
            if roles[y] == Role::Outside {
                roles[y] = Role::Boundary;
            }
        }
    }
    let pruned = graph.filtered(|x, y| roles[x] == Role::Interior || roles[y] == Role::Interior);
    let mut measure = vec![0.0; n];
    for x in 0..n {
        if roles[x] != Role::Outside {
            measure[x] = pruned.neighbors(x).map(|(_, w)| w).sum();
        }
    }
    for &x in interior {
        if measure[x] <= 0.0 {
            return Err(Error::ZeroMeasure(graph.name(x).into_owned()));
        }
    }
    Ok(Domain {
        graph: pruned,
        roles,
        measure,
    })
}

impl Domain {
    /// Domain over an already pruned, finite realization of a larger graph.
    /// Roles and measures come from the caller because vertices at the edge of
    /// the realization have neighbors that are not materialized.
    pub(crate) fn from_realization(graph: WeightedGraph, roles: Vec<Role>, measure: Vec<f64>) -> Self {
        debug_assert_eq!(graph.vertex_count(), roles.len());
        debug_assert_eq!(graph.vertex_count(), measure.len());
        debug_assert!(graph
            .edges()
            .all(|(x, y, _)| roles[x] == Role::Interior || roles[y] == Role::Interior));
        Domain {
            graph,
            roles,
            measure,
        }
    }

    /// The pruned graph (Ω̄, E(Ω, Ω̄), μ).
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn role(&self, x: VertexId) -> Role {
        self.roles[x]
    }

    pub fn is_interior(&self, x: VertexId) -> bool {
        self.roles[x] == Role::Interior
    }

    pub fn is_boundary(&self, x: VertexId) -> bool {
        self.roles[x] == Role::Boundary
    }

    pub fn in_closure(&self, x: VertexId) -> bool {
        self.roles[x] != Role::Outside
    }

    /// d(x).
    pub fn measure(&self, x: VertexId) -> f64 {
        self.measure[x]
    }

    /// d(A) = Σ_{x∈A} d(x).
    pub fn measure_of(&self, set: &[VertexId]) -> f64 {
        set.iter().map(|&x| self.measure[x]).sum()
    }

    pub fn interior(&self) -> Vec<VertexId> {
        self.with_role(Role::Interior)
    }

    /// δΩ in increasing id order.
    pub fn boundary(&self) -> Vec<VertexId> {
        self.with_role(Role::Boundary)
    }

    /// Ω̄ = Ω ∪ δΩ in increasing id order.
    pub fn closure(&self) -> Vec<VertexId> {
        (0..self.roles.len()).filter(|&x| self.in_closure(x)).collect()
    }

    fn with_role(&self, role: Role) -> Vec<VertexId> {
        (0..self.roles.len()).filter(|&x| self.roles[x] == role).collect()
    }

    pub fn name(&self, x: VertexId) -> Cow<'_, str> {
        self.graph.name(x)
    }
}

/// One edge of E(W, W̄) in window-local indices. `a` always lies in W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// A finite set W ⊆ Ω̄ split into W∩δΩ, W∩Ω and the collar δW.
///
/// Local indices order W̄ as: boundary part `0..P`, interior part `P..N`, collar
/// `N..N+C`. Functions on W̄ are plain slices in this order. Self-loops are not
/// part of [`Window::edges`]: they never change an energy or a cut and only
/// enter through the measure.
#[derive(Debug, Clone)]
pub struct Window<'d> {
    domain: &'d Domain,
    vertices: Vec<VertexId>,
    n_boundary: usize,
    n_members: usize,
    local: Vec<usize>,
    edges: Vec<WindowEdge>,
}

/// Builds the window on `w`. Duplicate ids are ignored.
pub fn make_window<'d>(domain: &'d Domain, w: &[VertexId]) -> Result<Window<'d>> {
    if w.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = domain.graph.vertex_count();
    let mut boundary = Vec::new();
    let mut interior = Vec::new();
    let mut seen = vec![false; n];
    for &x in w {
        if x >= n {
            return Err(Error::UnknownVertex(x.to_string()));
        }
        if seen[x] {
            continue;
        }
        seen[x] = true;
        match domain.roles[x] {
            Role::Boundary => boundary.push(x),
            Role::Interior => {
                if domain.measure[x] <= 0.0 {
                    return Err(Error::ZeroMeasure(domain.name(x).into_owned()));
                }
                interior.push(x)
            }
            Role::Outside => return Err(Error::OutsideClosure(domain.name(x).into_owned())),
        }
    }
    boundary.sort_unstable();
    interior.sort_unstable();
    let mut collar = Vec::new();
    for &x in boundary.iter().chain(interior.iter()) {
        for (y, _) in domain.graph.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                collar.push(y);
            }
        }
    }
    collar.sort_unstable();

    let n_boundary = boundary.len();
    let n_members = n_boundary + interior.len();
    let mut vertices = boundary;
    vertices.extend(interior);
    vertices.extend(collar);
    let mut local = vec![NONE; n];
    for (i, &x) in vertices.iter().enumerate() {
        local[x] = i;
    }
    let mut edges = Vec::new();
    for (i, &x) in vertices[..n_members].iter().enumerate() {
        for (y, weight) in domain.graph.neighbors(x) {
            let j = local[y];
            // internal edges once (from the lower local index), collar edges always
            if j != i && (j >= n_members || j > i) {
                edges.push(WindowEdge { a: i, b: j, weight });
            }
        }
    }
    Ok(Window {
        domain,
        vertices,
        n_boundary,
        n_members,
        local,
        edges,
    })
}

impl<'d> Window<'d> {
    pub fn domain(&self) -> &'d Domain {
        self.domain
    }

    /// P = #(W∩δΩ).
    pub fn boundary_len(&self) -> usize {
        self.n_boundary
    }

    /// #(W∩Ω).
    pub fn interior_len(&self) -> usize {
        self.n_members - self.n_boundary
    }

    /// N = #W.
    pub fn len(&self) -> usize {
        self.n_members
    }

    pub fn is_empty(&self) -> bool {
        self.n_members == 0
    }

    /// #W̄.
    pub fn closure_len(&self) -> usize {
        self.vertices.len()
    }

    pub fn collar_len(&self) -> usize {
        self.vertices.len() - self.n_members
    }

    /// W∩δΩ in local order.
    pub fn boundary(&self) -> &[VertexId] {
        &self.vertices[..self.n_boundary]
    }

    /// W∩Ω in local order.
    pub fn interior(&self) -> &[VertexId] {
        &self.vertices[self.n_boundary..self.n_members]
    }

    /// W in local order.
    pub fn members(&self) -> &[VertexId] {
        &self.vertices[..self.n_members]
    }

    /// δW in local order.
    pub fn collar(&self) -> &[VertexId] {
        &self.vertices[self.n_members..]
    }

    /// W̄ = W ∪ δW in local order.
    pub fn closure(&self) -> &[VertexId] {
        &self.vertices
    }

    /// E(W, W̄) without self-loops; each edge exactly once.
    pub fn edges(&self) -> &[WindowEdge] {
        &self.edges
    }

    /// Local index of a vertex of W̄.
    pub fn local(&self, x: VertexId) -> Option<usize> {
        self.local.get(x).copied().filter(|&i| i != NONE)
    }

    pub fn vertex(&self, local: usize) -> VertexId {
        self.vertices[local]
    }

    /// d of the vertex at a local index.
    pub fn measure_at(&self, local: usize) -> f64 {
        self.domain.measure[self.vertices[local]]
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.local(x).is_some_and(|i| i < self.n_members)
    }

    pub(crate) fn is_boundary_local(&self, i: usize) -> bool {
        i < self.n_boundary
    }

    /// Local indices of a vertex set that must lie in W.
    pub(crate) fn locals_in_members(&self, set: &[VertexId]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(set.len());
        for &x in set {
            match self.local(x) {
                Some(i) if i < self.n_members => out.push(i),
                _ => return Err(Error::NotInWindow(self.domain.name(x).into_owned())),
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Collects a function on W̄ in local order from a per-vertex closure.
    pub fn function(&self, mut f: impl FnMut(VertexId) -> f64) -> Vec<f64> {
        self.vertices.iter().map(|&x| f(x)).collect()
    }
}

/// μ(∂_W A): total weight of edges of E(W, W̄) with exactly one endpoint in A.
pub fn relative_edge_boundary(window: &Window<'_>, a: &[VertexId]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let locals = window.locals_in_members(a)?;
    let mut inside = vec![false; window.closure_len()];
    for i in locals {
        inside[i] = true;
    }
    Ok(window
        .edges()
        .iter()
        .filter(|e| inside[e.a] != inside[e.b])
        .map(|e| e.weight)
        .sum())
}
