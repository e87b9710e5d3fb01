//! Lanczos tridiagonalization of the adjacency operator with full
//! reorthogonalization, plus completion of an orthonormal basis of the
//! reference component by restarting in the orthogonal complement.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LanczosError {
    #[error("start vector has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("start vector has length {got}, graph has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("max_dim must lie in 1..={n}, got {max_dim}")]
    InvalidMaxDim { max_dim: usize, n: usize },
    #[error("invalid Jacobi coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("existing bases leave an empty complement")]
    EmptyExisting,
}

const UNIT_TOL: f64 = 1e-12;

/// Diagonal `alphas` (α₀..α_{d−1}) and off-diagonal `betas` (β₁..β_{d−1})
/// of the Jacobi matrix. `betas[i]` is β_{i+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiCoefficients {
    alphas: Vec<f64>,
    betas: Vec<f64>,
}

impl JacobiCoefficients {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self, LanczosError> {
        if alphas.is_empty() {
            return Err(LanczosError::InvalidCoefficients(
                "dimension is zero".into(),
            ));
        }
        if betas.len() + 1 != alphas.len() {
            return Err(LanczosError::InvalidCoefficients(format!(
                "{} alphas need {} betas, got {}",
                alphas.len(),
                alphas.len() - 1,
                betas.len()
            )));
        }
        if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(LanczosError::InvalidCoefficients(format!(
                "beta {b} is not strictly positive"
            )));
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(LanczosError::InvalidCoefficients("non-finite alpha".into()));
        }
        Ok(Self { alphas, betas })
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.alphas[i]
    }

    /// β_i for `1 <= i < dim`.
    pub fn beta(&self, i: usize) -> f64 {
        self.betas[i - 1]
    }

    /// ln(β₁⋯β_k).
    pub fn log_beta_product(&self, k: usize) -> f64 {
        self.betas[..k].iter().map(|b| b.ln()).sum()
    }
}

/// Orthonormal vectors over the vertex space, grown from `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalBasis {
    pub vectors: Vec<Vec<f64>>,
    pub start: Vec<f64>,
}

impl OrthonormalBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        gram_error(self.vectors.iter().map(Vec::as_slice))
    }
}

/// Four interleaved partial sums, which lets the loop vectorize.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    let mut acc = [0.0f64; 4];
    for (x, y) in ca.zip(cb) {
        for lane in 0..4 {
            acc[lane] += x[lane] * y[lane];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn gram_error<'a>(vectors: impl Iterator<Item = &'a [f64]> + Clone) -> f64 {
    let vs: Vec<&[f64]> = vectors.collect();
    let mut worst = 0.0f64;
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(a, b) - target).abs());
        }
    }
    worst
}

/// Canonical basis vector e_v of length n.
pub fn unit_vector(n: usize, v: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[v] = 1.0;
    e
}

/// 1e−10 · max(1, ‖A‖₁); ‖A‖₁ is the maximum degree.
pub fn default_breakdown_tol(g: &Graph) -> f64 {
    1e-10 * (g.max_degree() as f64).max(1.0)
}

/// Removes the components of `v` along every vector in `against` by modified
/// Gram–Schmidt, repeating the pass when the first one cancels more than
/// 1/√2 of the norm.
fn reorthogonalize<'a>(v: &mut [f64], against: impl Iterator<Item = &'a [f64]> + Clone) {
    let pass = |v: &mut [f64]| {
        for q in against.clone() {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    };
    let before = norm(v);
    pass(v);
    if norm(v) < std::f64::consts::FRAC_1_SQRT_2 * before {
        pass(v);
    }
}

/// Runs Lanczos on the adjacency operator of `g` from `start`.
///
/// Stops at breakdown (β ≤ `breakdown_tol`) or after `max_dim` vectors.
pub fn lanczos_run(
    g: &Graph,
    start: &[f64],
    max_dim: usize,
    breakdown_tol: f64,
) -> Result<(JacobiCoefficients, OrthonormalBasis), LanczosError> {
    lanczos_deflated(g, start, max_dim, breakdown_tol, &[])
}

/// Lanczos from `e_o` up to the full vertex count with the default tolerance.
pub fn lanczos_from_vertex(
    g: &Graph,
    o: usize,
) -> Result<(JacobiCoefficients, OrthonormalBasis), LanczosError> {
    let n = g.vertex_count();
    if o >= n {
        return Err(LanczosError::DimensionMismatch {
            expected: n,
            got: o + 1,
        });
    }
    lanczos_run(g, &unit_vector(n, o), n, default_breakdown_tol(g))
}

/// Lanczos that additionally keeps every new vector orthogonal to the
/// `locked` vectors. Used when restarting inside an invariant complement.
fn lanczos_deflated(
    g: &Graph,
    start: &[f64],
    max_dim: usize,
    breakdown_tol: f64,
    locked: &[&[f64]],
) -> Result<(JacobiCoefficients, OrthonormalBasis), LanczosError> {
    let n = g.vertex_count();
    if start.len() != n {
        return Err(LanczosError::DimensionMismatch {
            expected: n,
            got: start.len(),
        });
    }
    if max_dim == 0 || max_dim > n {
        return Err(LanczosError::InvalidMaxDim { max_dim, n });
    }
    let start_norm = norm(start);
    if (start_norm - 1.0).abs() > UNIT_TOL {
        return Err(LanczosError::NotUnit(start_norm));
    }

    let mut basis: Vec<Vec<f64>> = vec![start.to_vec()];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut v = vec![0.0; n];
    loop {
        let i = basis.len() - 1;
        g.apply_adjacency(&basis[i], &mut v);
        let alpha = dot(&basis[i], &v);
        alphas.push(alpha);
        if basis.len() == max_dim {
            break;
        }
        axpy(-alpha, &basis[i], &mut v);
        if i > 0 {
            axpy(-betas[i - 1], &basis[i - 1], &mut v);
        }
        reorthogonalize(
            &mut v,
            basis
                .iter()
                .map(Vec::as_slice)
                .chain(locked.iter().copied()),
        );
        let beta = norm(&v);
        if beta <= breakdown_tol {
            break;
        }
        betas.push(beta);
        basis.push(v.iter().map(|x| x / beta).collect());
    }
    let jacobi = JacobiCoefficients::new(alphas, betas)?;
    Ok((
        jacobi,
        OrthonormalBasis {
            vectors: basis,
            start: start.to_vec(),
        },
    ))
}

/// Extends the mutually orthonormal `existing` bases to an orthonormal basis
/// of the reference component (the component containing the support of the
/// first basis's start vector).
///
/// Each restart picks the canonical vector e_v with the largest residual
/// after projecting out everything found so far (lowest index on ties),
/// normalizes the residual and runs Lanczos from it. Returns only the new
/// bases, in generation order; an already complete input yields an empty list.
pub fn complete_basis(
    g: &Graph,
    existing: &[OrthonormalBasis],
    breakdown_tol: f64,
) -> Result<Vec<OrthonormalBasis>, LanczosError> {
    let first = existing.first().ok_or(LanczosError::EmptyExisting)?;
    let n = g.vertex_count();
    let mut in_component = vec![false; n];
    for (v, &c) in first.start.iter().enumerate() {
        if c != 0.0 && !in_component[v] {
            for w in g.component_of(v) {
                in_component[w] = true;
            }
        }
    }
    let component: Vec<usize> = (0..n).filter(|&v| in_component[v]).collect();

    let mut found: Vec<Vec<f64>> = existing
        .iter()
        .flat_map(|b| b.vectors.iter().cloned())
        .collect();
    let mut supplements = Vec::new();
    while found.len() < component.len() {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for &v in &component {
            let mut r = unit_vector(n, v);
            reorthogonalize(&mut r, found.iter().map(Vec::as_slice));
            let rn = norm(&r);
            let better = match &best {
                None => true,
                Some((bn, _)) => rn > bn * (1.0 + 1e-9),
            };
            if better {
                best = Some((rn, r));
            }
        }
        let (rn, mut r) = best.expect("component is non-empty");
        if rn <= breakdown_tol {
            // numerically spanned already
            break;
        }
        r.iter_mut().for_each(|x| *x /= rn);
        let remaining = component.len() - found.len();
        let locked: Vec<&[f64]> = found.iter().map(Vec::as_slice).collect();
        let (_, basis) = lanczos_deflated(g, &r, remaining, breakdown_tol, &locked)?;
        found.extend(basis.vectors.iter().cloned());
        supplements.push(basis);
    }
    Ok(supplements)
}
