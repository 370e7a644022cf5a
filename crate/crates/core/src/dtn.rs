//! The Dirichlet-to-Neumann operator of a window, its spectrum, the
//! Dirichlet Laplacian spectrum, and blow-up spectra converging to the DtN
//! spectrum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{VertexId, Window};
use crate::harmonic::{extend_with, harmonic_extension, normal_derivative, BoundaryData, InteriorSystem};
use crate::numerics::{eigh_generalized, eigvalsh_generalized, EigenResult, SymMatrix};

/// Dense eigenproblems above this order are refused.
pub const DENSE_SPECTRUM_LIMIT: usize = 4096;

/// Quadratic form of Λ_W on W∩δΩ: `f·B g = D_W(u_f, u_g)`, with the boundary
/// measure as mass.
#[derive(Debug, Clone)]
pub struct DtnForm {
    pub boundary: Vec<VertexId>,
    pub form: SymMatrix,
    pub mass: Vec<f64>,
}

impl DtnForm {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }
}

fn boundary_mass(window: &Window<'_>) -> Vec<f64> {
    (0..window.boundary_len()).map(|i| window.measure_at(i)).collect()
}

/// Assembles B = L_bb − L_bi L_ii⁻¹ L_ib from one factorization of the
/// interior block.
pub fn assemble_dtn(window: &Window<'_>) -> Result<DtnForm> {
    let p = window.boundary_len();
    if p == 0 {
        return Err(Error::NoBoundary);
    }
    let system = InteriorSystem::new(window)?;
    let mut columns = Vec::with_capacity(p);
    for j in 0..p {
        let mut unit = vec![0.0; p];
        unit[j] = 1.0;
        let u = system.solve(&system.boundary_rhs(window, &unit))?;
        let mut col = vec![0.0; p];
        for e in window.edges() {
            // every edge at a boundary vertex of W leads into Ω
            let (z, x) = if e.a < p {
                (e.a, e.b)
            } else if e.b < p {
                (e.b, e.a)
            } else {
                continue;
            };
            if z == j {
                col[z] += e.weight;
            }
            if x >= p && x < window.len() {
                col[z] -= e.weight * u[x - p];
            }
        }
        columns.push(col);
    }
    let mut form = SymMatrix::zeros(p);
    for i in 0..p {
        for j in 0..=i {
            form.set(i, j, 0.5 * (columns[j][i] + columns[i][j]));
        }
    }
    Ok(DtnForm {
        boundary: window.boundary().to_vec(),
        form,
        mass: boundary_mass(window),
    })
}

/// Builds the same form column by column from harmonic extensions of unit
/// data: B[z][y] = d(z)·(Λ_W e_y)(z). No symmetrization is applied.
pub fn assemble_dtn_by_extension(window: &Window<'_>) -> Result<Vec<Vec<f64>>> {
    let p = window.boundary_len();
    if p == 0 {
        return Err(Error::NoBoundary);
    }
    let mut rows = vec![vec![0.0; p]; p];
    for y in 0..p {
        let mut unit = vec![0.0; p];
        unit[y] = 1.0;
        let u = harmonic_extension(window, &BoundaryData::new(window, unit)?)?;
        for (z, row) in rows.iter_mut().enumerate() {
            row[y] = window.measure_at(z) * normal_derivative(window, &u.values, window.vertex(z))?;
        }
    }
    Ok(rows)
}

/// σ_1 ≤ … ≤ σ_P with eigenvectors, d-orthonormal on W∩δΩ.
pub fn dtn_eigen(window: &Window<'_>) -> Result<EigenResult> {
    let form = assemble_dtn(window)?;
    eigh_generalized(&form.form, &form.mass)
}

/// σ_1 ≤ … ≤ σ_P, the eigenvalues of the pencil (B, diag d).
pub fn dtn_spectrum(window: &Window<'_>) -> Result<Vec<f64>> {
    let form = assemble_dtn(window)?;
    eigvalsh_generalized(&form.form, &form.mass)
}

/// Λ_W f as boundary data.
pub fn apply_dtn(window: &Window<'_>, f: &BoundaryData) -> Result<BoundaryData> {
    let system = InteriorSystem::new(window)?;
    let u = extend_with(window, &system, f)?;
    let values = window
        .boundary()
        .iter()
        .map(|&z| normal_derivative(window, &u.values, z))
        .collect::<Result<Vec<_>>>()?;
    BoundaryData::new(window, values)
}

/// Unnormalized Laplacian on W with δW deleted.
pub fn dirichlet_laplacian(window: &Window<'_>) -> SymMatrix {
    let n = window.len();
    let mut a = SymMatrix::zeros(n);
    for e in window.edges() {
        a.add(e.a, e.a, e.weight);
        if e.b < n {
            a.add(e.b, e.b, e.weight);
            a.add(e.a, e.b, -e.weight);
        }
    }
    a
}

fn pencil_values(window: &Window<'_>, mass: &[f64]) -> Result<Vec<f64>> {
    if window.len() > DENSE_SPECTRUM_LIMIT {
        return Err(Error::Budget(format!(
            "dense spectrum of order {} exceeds {}",
            window.len(),
            DENSE_SPECTRUM_LIMIT
        )));
    }
    eigvalsh_generalized(&dirichlet_laplacian(window), mass)
}

/// λ_{1,D} ≤ … ≤ λ_{N,D}, the eigenvalues of (L_W, diag d|_W).
pub fn dirichlet_laplacian_spectrum(window: &Window<'_>) -> Result<Vec<f64>> {
    let mass: Vec<f64> = (0..window.len()).map(|i| window.measure_at(i)).collect();
    pencil_values(window, &mass)
}

/// The blow-up mass m^(r): d on W∩δΩ and d/r on W∩Ω.
pub fn blowup_mass(window: &Window<'_>, r: f64) -> Result<Vec<f64>> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("blow-up parameter must be positive, got {r}")));
    }
    Ok((0..window.len())
        .map(|i| {
            let d = window.measure_at(i);
            if i < window.boundary_len() {
                d
            } else {
                d / r
            }
        })
        .collect())
}

/// λ^(r)_{1,D} ≤ … ≤ λ^(r)_{N,D}, the eigenvalues of (L_W, diag m^(r)).
pub fn blowup_spectrum(window: &Window<'_>, r: f64) -> Result<Vec<f64>> {
    let mass = blowup_mass(window, r)?;
    pencil_values(window, &mass)
}

/// One entry of a blow-up convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct BlowupRow {
    pub r: f64,
    pub k: usize,
    pub lambda: f64,
    /// |λ^(r)_k − σ_k| for k ≤ P.
    pub gap: Option<f64>,
    /// λ^(r)_k / r for k > P.
    pub ratio: Option<f64>,
}

/// Blow-up spectra along an increasing schedule of r, compared against σ_k.
pub fn blowup_convergence(window: &Window<'_>, schedule: &[f64]) -> Result<Vec<BlowupRow>> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty blow-up schedule".into()));
    }
    if schedule.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("blow-up schedule must be increasing".into()));
    }
    let sigma = dtn_spectrum(window)?;
    let mut rows = Vec::new();
    for &r in schedule {
        for (k, lambda) in blowup_spectrum(window, r)?.into_iter().enumerate() {
            let (gap, ratio) = match sigma.get(k) {
                Some(s) => (Some((lambda - s).abs()), None),
                None => (None, Some(lambda / r)),
            };
            rows.push(BlowupRow {
                r,
                k: k + 1,
                lambda,
                gap,
                ratio,
            });
        }
    }
    Ok(rows)
}
