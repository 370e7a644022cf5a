//! Harmonic extension, Laplacian, normal derivative, Dirichlet form and
//! capacity on a window.
//!
//! Functions on W̄ are slices in the window's local order (see [`Window`]).

use crate::error::{Error, Result};
use crate::graph::{VertexId, Window};
use crate::numerics::{conjugate_gradient, Cholesky, CsrMatrix, SymMatrix};

/// Interior systems larger than this are solved by conjugate gradient.
pub const DENSE_SOLVE_LIMIT: usize = 3000;
/// Relative residual target of the iterative interior solve.
pub const CG_TOLERANCE: f64 = 1e-12;

/// Real values on W∩δΩ, in the window's boundary order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    values: Vec<f64>,
}

impl BoundaryData {
    pub fn new(window: &Window<'_>, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.boundary_len() {
            return Err(Error::DimensionMismatch {
                expected: window.boundary_len(),
                found: values.len(),
            });
        }
        Ok(Self { values })
    }

    /// Data given by (vertex, value) pairs; unspecified boundary vertices get 0.
    pub fn from_pairs(window: &Window<'_>, pairs: &[(VertexId, f64)]) -> Result<Self> {
        let mut values = vec![0.0; window.boundary_len()];
        for &(z, v) in pairs {
            match window.local(z) {
                Some(i) if window.is_boundary_local(i) => values[i] = v,
                _ => return Err(Error::NotBoundary(window.domain().name(z).into_owned())),
            }
        }
        Ok(Self { values })
    }

    pub fn constant(window: &Window<'_>, c: f64) -> Self {
        Self {
            values: vec![c; window.boundary_len()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// ‖f‖² in ℓ²(W∩δΩ, d).
    pub fn norm_squared(&self, window: &Window<'_>) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, f)| f * f * window.measure_at(i))
            .sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// The harmonic extension u_f^W as a function on W̄.
#[derive(Debug, Clone)]
pub struct Extension {
    pub values: Vec<f64>,
    pub data: BoundaryData,
}

enum Solver {
    Empty,
    Dense(Cholesky),
    Sparse(CsrMatrix),
}

/// Factored interior block L_ii of the window Laplacian, zeros imposed on δW.
pub(crate) struct InteriorSystem {
    offset: usize,
    solver: Solver,
}

impl InteriorSystem {
    pub(crate) fn new(window: &Window<'_>) -> Result<Self> {
        let offset = window.boundary_len();
        let n = window.interior_len();
        let end = offset + n;
        let interior = |i: usize| i >= offset && i < end;
        let solver = if n == 0 {
            Solver::Empty
        } else if n <= DENSE_SOLVE_LIMIT {
            let mut a = SymMatrix::zeros(n);
            for e in window.edges() {
                if interior(e.a) {
                    a.add(e.a - offset, e.a - offset, e.weight);
                }
                if interior(e.b) {
                    a.add(e.b - offset, e.b - offset, e.weight);
                }
                if interior(e.a) && interior(e.b) {
                    a.add(e.a - offset, e.b - offset, -e.weight);
                }
            }
            Solver::Dense(Cholesky::factor(&a)?)
        } else {
            let mut triplets = Vec::with_capacity(3 * window.edges().len());
            for e in window.edges() {
                if interior(e.a) {
                    triplets.push((e.a - offset, e.a - offset, e.weight));
                }
                if interior(e.b) {
                    triplets.push((e.b - offset, e.b - offset, e.weight));
                }
                if interior(e.a) && interior(e.b) {
                    triplets.push((e.a - offset, e.b - offset, -e.weight));
                    triplets.push((e.b - offset, e.a - offset, -e.weight));
                }
            }
            Solver::Sparse(CsrMatrix::from_triplets(n, triplets))
        };
        Ok(Self { offset, solver })
    }

    /// Solves L_ii u = rhs.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match &self.solver {
            Solver::Empty => Ok(Vec::new()),
            Solver::Dense(chol) => chol.solve(rhs),
            Solver::Sparse(a) => {
                let max_iter = 20 * a.order() + 100;
                Ok(conjugate_gradient(a, rhs, CG_TOLERANCE, max_iter)?.solution)
            }
        }
    }

    /// −L_ib f, the interior right-hand side for boundary data `f`.
    pub(crate) fn boundary_rhs(&self, window: &Window<'_>, f: &[f64]) -> Vec<f64> {
        let offset = self.offset;
        let mut rhs = vec![0.0; window.interior_len()];
        for e in window.edges() {
            // boundary-boundary edges do not exist after pruning
            if e.a < offset && e.b >= offset && e.b < window.len() {
                rhs[e.b - offset] += e.weight * f[e.a];
            } else if e.b < offset && e.a >= offset {
                rhs[e.a - offset] += e.weight * f[e.b];
            }
        }
        rhs
    }
}

/// Solves for the function equal to `f` on W∩δΩ, zero on δW and harmonic on
/// W∩Ω.
pub fn harmonic_extension(window: &Window<'_>, f: &BoundaryData) -> Result<Extension> {
    let system = InteriorSystem::new(window)?;
    extend_with(window, &system, f)
}

pub(crate) fn extend_with(window: &Window<'_>, system: &InteriorSystem, f: &BoundaryData) -> Result<Extension> {
    if f.values.len() != window.boundary_len() {
        return Err(Error::DimensionMismatch {
            expected: window.boundary_len(),
            found: f.values.len(),
        });
    }
    let interior = system.solve(&system.boundary_rhs(window, &f.values))?;
    let mut values = Vec::with_capacity(window.closure_len());
    values.extend_from_slice(&f.values);
    values.extend(interior);
    values.resize(window.closure_len(), 0.0);
    Ok(Extension {
        values,
        data: f.clone(),
    })
}

fn check_function(window: &Window<'_>, u: &[f64]) -> Result<()> {
    if u.len() != window.closure_len() {
        return Err(Error::DimensionMismatch {
            expected: window.closure_len(),
            found: u.len(),
        });
    }
    Ok(())
}

/// Δu(x) = (1/d(x)) Σ_y μ_xy (u(y) − u(x)) at an interior vertex x of W.
pub fn laplacian(window: &Window<'_>, u: &[f64], x: VertexId) -> Result<f64> {
    check_function(window, u)?;
    match window.local(x) {
        Some(i) if i >= window.boundary_len() && i < window.len() => Ok(laplacian_at(window, u, i)),
        _ => Err(Error::NotInterior(window.domain().name(x).into_owned())),
    }
}

/// Δu at a vertex of W given by local index; the sum runs over the pruned
/// neighbors, all of which lie in W̄.
fn laplacian_at(window: &Window<'_>, u: &[f64], i: usize) -> f64 {
    let domain = window.domain();
    let x = window.vertex(i);
    let s: f64 = domain
        .graph()
        .neighbors(x)
        .map(|(y, w)| w * (u[window.local(y).expect("neighbor of W lies in W̄")] - u[i]))
        .sum();
    s / domain.measure(x)
}

/// ∂u/∂n(z) = (1/d(z)) Σ_{x∈Ω, x∼z} μ_zx (u(z) − u(x)) for z ∈ W∩δΩ.
pub fn normal_derivative(window: &Window<'_>, u: &[f64], z: VertexId) -> Result<f64> {
    check_function(window, u)?;
    match window.local(z) {
        Some(i) if window.is_boundary_local(i) => Ok(-laplacian_at(window, u, i)),
        _ => Err(Error::NotBoundary(window.domain().name(z).into_owned())),
    }
}

/// D_W(u, v) = Σ_{E(W,W̄)} μ_xy (u(x) − u(y))(v(x) − v(y)).
pub fn dirichlet_form(window: &Window<'_>, u: &[f64], v: &[f64]) -> Result<f64> {
    check_function(window, u)?;
    check_function(window, v)?;
    Ok(window
        .edges()
        .iter()
        .map(|e| e.weight * (u[e.a] - u[e.b]) * (v[e.a] - v[e.b]))
        .sum())
}

/// D_W(u) = D_W(u, u).
pub fn dirichlet_energy(window: &Window<'_>, u: &[f64]) -> Result<f64> {
    dirichlet_form(window, u, u)
}

/// Both sides of Green's formula on W:
/// ⟨Δu, g⟩_W and −D_W(u, g) + Σ_{y∈δW} Σ_{x∈W, x∼y} μ_xy (u(y) − u(x)) g(y).
pub fn green_sides(window: &Window<'_>, u: &[f64], g: &[f64]) -> Result<(f64, f64)> {
    check_function(window, u)?;
    check_function(window, g)?;
    let lhs: f64 = (0..window.len())
        .map(|i| laplacian_at(window, u, i) * g[i] * window.measure_at(i))
        .sum();
    let collar: f64 = window
        .edges()
        .iter()
        .filter(|e| e.b >= window.len())
        .map(|e| e.weight * (u[e.b] - u[e.a]) * g[e.b])
        .sum();
    Ok((lhs, collar - dirichlet_form(window, u, g)?))
}

/// |LHS − RHS| of Green's formula.
pub fn green_residual(window: &Window<'_>, u: &[f64], g: &[f64]) -> Result<f64> {
    let (lhs, rhs) = green_sides(window, u, g)?;
    Ok((lhs - rhs).abs())
}

/// Cap(f, W) = D_W(u_f^W).
pub fn capacity(window: &Window<'_>, f: &BoundaryData) -> Result<f64> {
    let u = harmonic_extension(window, f)?;
    dirichlet_energy(window, &u.values)
}

/// Total weight of E(W, W̄); a natural scale for identity tolerances.
pub fn total_weight(window: &Window<'_>) -> f64 {
    window.edges().iter().map(|e| e.weight).sum()
}
