//! Orthogonal polynomials of a Jacobi matrix, its Stieltjes transform, and
//! the discrete spectral measure (atoms and Gauss weights).
//!
//! Polynomials are carried in normalized form, P_k = P'_k / (β₁⋯β_k), so
//! that long chains neither overflow nor underflow. At `k = dim` there is no
//! β_dim; the recursion is continued with β_dim = 1, which makes P_dim a
//! positive multiple of the characteristic polynomial and keeps its roots.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lanczos::JacobiCoefficients;
use crate::tridiag::{symmetric_tridiagonal_eigen, Accumulate};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("polynomial index {k} exceeds the allowed maximum {max}")]
    IndexOutOfRange { k: usize, max: usize },
    #[error("z = {0} is a pole of the Stieltjes transform")]
    PoleAtAtom(Complex64),
    #[error("x = {x} is not an atom (|P_dim(x)| = {residual:e})")]
    NotAnAtom { x: f64, residual: f64 },
    #[error("tridiagonal eigensolver did not converge")]
    NoConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub weight: f64,
}

/// Discrete probability measure Σ_l A_l δ(x − x_l), atoms ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub atoms: Vec<Atom>,
}

impl SpectralMeasure {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.x)
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.weight)
    }

    pub fn total_mass(&self) -> f64 {
        self.weights().sum()
    }

    /// Σ_l A_l x_l^m.
    pub fn moment(&self, m: u32) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * a.x.powi(m as i32))
            .sum()
    }

    /// Σ_l A_l / (z − x_l).
    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        self.atoms.iter().map(|a| a.weight / (z - a.x)).sum()
    }

    /// Smallest distance between consecutive atoms.
    pub fn min_gap(&self) -> f64 {
        self.atoms
            .windows(2)
            .map(|w| w[1].x - w[0].x)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json_string(self)
    }
}

/// Normalized P_k(x) via β_{k+1}P_{k+1} = (x − α_k)P_k − β_k P_{k−1}.
pub fn eval_poly_p(j: &JacobiCoefficients, k: usize, x: f64) -> Result<f64, SpectralError> {
    if k > j.dim() {
        return Err(SpectralError::IndexOutOfRange { k, max: j.dim() });
    }
    Ok(normalized_values(j.alphas(), j.betas(), k, x).0)
}

/// P_0(x), …, P_{dim−1}(x).
pub fn eval_poly_p_all(j: &JacobiCoefficients, x: f64) -> Vec<f64> {
    let (a, b) = (j.alphas(), j.betas());
    let mut out = Vec::with_capacity(j.dim());
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(cur);
    for k in 0..j.dim() - 1 {
        let back = if k == 0 { 0.0 } else { b[k - 1] * prev };
        let next = ((x - a[k]) * cur - back) / b[k];
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// The monic P'_k(x) = β₁⋯β_k · P_k(x), returned as the pair
/// (P_k(x), ln(β₁⋯β_k)) so that neither factor overflows.
pub fn eval_poly_p_scaled(
    j: &JacobiCoefficients,
    k: usize,
    x: f64,
) -> Result<(f64, f64), SpectralError> {
    let p = eval_poly_p(j, k, x)?;
    Ok((p, j.log_beta_product(k.min(j.dim() - 1))))
}

/// First-associated polynomial Q⁽¹⁾_k(x): Q₀ = 1, Q₁ = x − α₁,
/// Q_{k+1} = (x − α_{k+1})Q_k − β²_{k+1}Q_{k−1}.
pub fn eval_poly_q1(j: &JacobiCoefficients, k: usize, x: f64) -> Result<f64, SpectralError> {
    if k + 1 > j.dim() {
        return Err(SpectralError::IndexOutOfRange {
            k,
            max: j.dim() - 1,
        });
    }
    let (a, b) = (j.alphas(), j.betas());
    let (mut prev, mut cur) = (0.0, 1.0);
    for i in 0..k {
        let next = (x - a[i + 1]) * cur - if i == 0 { 0.0 } else { b[i] * b[i] * prev };
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Normalized recursion up to index `k` (β continued as 1 past the end).
/// Returns (P_k, P_k′).
fn normalized_values(alphas: &[f64], betas: &[f64], k: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for i in 0..k {
        let b_next = betas.get(i).copied().unwrap_or(1.0);
        let b_cur = if i == 0 { 0.0 } else { betas[i - 1] };
        let p_next = ((x - alphas[i]) * p - b_cur * p_prev) / b_next;
        let d_next = (p + (x - alphas[i]) * d - b_cur * d_prev) / b_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Finite continued fraction 1/(z − α₀ − β₁²/(z − α₁ − ⋯)), evaluated from
/// the bottom up.
pub fn stieltjes(j: &JacobiCoefficients, z: Complex64) -> Result<Complex64, SpectralError> {
    let (a, b) = (j.alphas(), j.betas());
    let d = j.dim();
    if z.im == 0.0 {
        // real line: IEEE infinities carry the fraction through interior zeros
        let x = z.re;
        let mut w = x - a[d - 1];
        for i in (0..d - 1).rev() {
            w = x - a[i] - b[i] * b[i] / w;
        }
        let g = 1.0 / w;
        if w == 0.0 || !g.is_finite() {
            return Err(SpectralError::PoleAtAtom(z));
        }
        return Ok(Complex64::new(g, 0.0));
    }
    let mut w = z - a[d - 1];
    for i in (0..d - 1).rev() {
        w = z - a[i] - b[i] * b[i] / w;
    }
    let g = w.inv();
    if !(g.re.is_finite() && g.im.is_finite()) {
        return Err(SpectralError::PoleAtAtom(z));
    }
    Ok(g)
}

/// Eigenvalues of the Jacobi matrix as atoms; weights are the squared first
/// components of the unit eigenvectors.
pub fn measure_from_jacobi(j: &JacobiCoefficients) -> Result<SpectralMeasure, SpectralError> {
    let eig = symmetric_tridiagonal_eigen(j.alphas(), j.betas(), Accumulate::FirstRow)
        .ok_or(SpectralError::NoConvergence)?;
    Ok(SpectralMeasure {
        atoms: eig
            .values
            .iter()
            .zip(&eig.rows[0])
            .map(|(&x, &c)| Atom { x, weight: c * c })
            .collect(),
    })
}

/// Atoms together with `table[l][k]` = P_k(x_l), read off the unit
/// eigenvectors as u_{kl}/u_{0l}. Stable where the forward recursion is not.
pub fn measure_with_polynomials(
    j: &JacobiCoefficients,
) -> Result<(SpectralMeasure, Vec<Vec<f64>>), SpectralError> {
    let eig = symmetric_tridiagonal_eigen(j.alphas(), j.betas(), Accumulate::Full)
        .ok_or(SpectralError::NoConvergence)?;
    let d = eig.values.len();
    let mut atoms = Vec::with_capacity(d);
    let mut table = Vec::with_capacity(d);
    for (l, &x) in eig.values.iter().enumerate() {
        let u0 = eig.rows[0][l];
        atoms.push(Atom { x, weight: u0 * u0 });
        table.push((0..d).map(|k| eig.rows[k][l] / u0).collect());
    }
    Ok((SpectralMeasure { atoms }, table))
}

/// Residue of the Stieltjes transform at the atom `x`:
/// A = Q⁽¹⁾_{dim−1}(x) / (d/dx P'_dim)(x), computed in normalized form.
pub fn weight_by_residue(j: &JacobiCoefficients, x: f64) -> Result<f64, SpectralError> {
    let d = j.dim();
    let (a, b) = (j.alphas(), j.betas());
    let (p, dp) = normalized_values(a, b, d, x);
    let residual = p.abs();
    if residual > 1e-7 * x.abs().max(1.0).powi(d as i32) {
        return Err(SpectralError::NotAnAtom { x, residual });
    }
    if d == 1 {
        return Ok(1.0 / dp);
    }
    // Q⁽¹⁾_{dim−1}/(β₂⋯β_{dim−1}) is the normalized polynomial of the Jacobi
    // matrix with its first row and column removed.
    let (q, _) = normalized_values(&a[1..], &b[1..], d - 1, x);
    Ok(q / (b[0] * dp))
}
