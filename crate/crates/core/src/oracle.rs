//! Reference computations kept independent of the Lanczos/measure pipeline:
//! dense eigendecomposition by cyclic Jacobi rotations, exact evolution,
//! Bessel and Chebyshev functions, and the large-graph limiting formulas.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("graph with {n} vertices exceeds the dense cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("Jacobi rotations did not converge")]
    NoConvergence,
}

pub const DEFAULT_DENSE_CAP: usize = 4096;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[j]` is the unit eigenvector for `eigenvalues[j]`.
    pub eigenvectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// e^{−iAt}|e_o⟩ = Σ_j e^{−iλ_j t} u_j ⟨u_j|e_o⟩.
    pub fn evolve(&self, o: usize, t: f64) -> Result<Vec<Complex64>, OracleError> {
        let n = self.dim();
        if o >= n {
            return Err(OracleError::VertexOutOfRange { vertex: o, n });
        }
        let mut psi = vec![Complex64::new(0.0, 0.0); n];
        for (lam, u) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let coef = Complex64::from_polar(u[o], -lam * t);
            for (p, &c) in psi.iter_mut().zip(u) {
                *p += coef * c;
            }
        }
        Ok(psi)
    }

    /// Σ_{j : |λ_j − x| ≤ tol} |⟨u_j|e_o⟩|².
    pub fn spectral_weight(&self, o: usize, x: f64, tol: f64) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .filter(|(lam, _)| (*lam - x).abs() <= tol)
            .map(|(_, u)| u[o] * u[o])
            .sum()
    }
}

pub fn dense_eig(g: &Graph) -> Result<EigenDecomposition, OracleError> {
    dense_eig_capped(g, DEFAULT_DENSE_CAP)
}

pub fn dense_eig_capped(g: &Graph, cap: usize) -> Result<EigenDecomposition, OracleError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    jacobi_eigen(g.dense_adjacency())
}

/// Cyclic Jacobi sweeps on a dense symmetric matrix.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> Result<EigenDecomposition, OracleError> {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale: f64 = a
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    let mut converged = false;
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (rp, rq) = (a[p].clone(), a[q].clone());
                for k in 0..n {
                    a[p][k] = c * rp[k] - s * rq[k];
                    a[q][k] = s * rp[k] + c * rq[k];
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(OracleError::NoConvergence);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    Ok(EigenDecomposition {
        eigenvalues: order.iter().map(|&j| a[j][j]).collect(),
        eigenvectors: order
            .iter()
            .map(|&j| v.iter().map(|row| row[j]).collect())
            .collect(),
    })
}

pub fn exact_evolution(g: &Graph, o: usize, t: f64) -> Result<Vec<Complex64>, OracleError> {
    dense_eig(g)?.evolve(o, t)
}

/// J_l(x) = (1/2π)∫₀^{2π} cos(lθ − x sin θ) dθ by the periodic trapezoidal
/// rule, with enough nodes that the aliasing terms J_{N±l}(x) vanish.
fn bessel_j_any(l: u32, x: f64) -> f64 {
    let nodes = 2 * (x.abs().ceil() as usize + l as usize) + 64;
    let h = 2.0 * PI / nodes as f64;
    let lf = f64::from(l);
    let sum: f64 = (0..nodes)
        .map(|i| {
            let th = i as f64 * h;
            (lf * th - x * th.sin()).cos()
        })
        .sum();
    sum / nodes as f64
}

/// Bessel function of the first kind, integer order `l <= 64`, `|x| <= 1e3`.
pub fn bessel_j(l: u32, x: f64) -> Result<f64, OracleError> {
    if l > 64 {
        return Err(OracleError::OutOfRange(format!("order {l} > 64")));
    }
    if x.is_nan() || x.abs() > 1e3 {
        return Err(OracleError::OutOfRange(format!("|x| = {} > 1e3", x.abs())));
    }
    Ok(bessel_j_any(l, x))
}

/// Chebyshev polynomial of the second kind by U_{l+1} = 2xU_l − U_{l−1}.
pub fn chebyshev_u(l: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if l == 0 {
        return prev;
    }
    for _ in 1..l {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Large-dimension kite limit q_l(t) = (l + 1) iˡ J_{l+1}(2t) / t.
pub fn kite_limit_amplitude(l: u32, t: f64) -> Complex64 {
    if t == 0.0 {
        return if l == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let mag = f64::from(l + 1) * bessel_j_any(l + 1, 2.0 * t) / t;
    Complex64::new(0.0, 1.0).powu(l) * mag
}

/// Infinite-path limit of the return amplitude from the second vertex,
/// 4J₁(2t)/t − 6J₂(2t)/t².
pub fn path_limit_q0(t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    4.0 * bessel_j_any(1, 2.0 * t) / t - 6.0 * bessel_j_any(2, 2.0 * t) / (t * t)
}

/// (1/2π) x² √(4 − x²) on [−2, 2], zero outside.
pub fn path_limit_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        return 0.0;
    }
    x * x * (4.0 - x * x).sqrt() / (2.0 * PI)
}

/// (k/2π) √(4(k+1) − x²) / (k² + x²) on |x| ≤ 2√(k+1), zero outside.
pub fn kite_limit_density(k: u32, x: f64) -> f64 {
    let kf = f64::from(k);
    let edge2 = 4.0 * (kf + 1.0);
    if x.abs() >= 2.0 * (kf + 1.0).sqrt() {
        return 0.0;
    }
    kf / (2.0 * PI) * (edge2 - x * x).sqrt() / (kf * kf + x * x)
}

/// ∫_{−a}^{a} f(x) dx via x = a cos θ and the trapezoidal rule in θ, which
/// converges spectrally for densities with square-root band edges.
pub fn integrate_band<F>(half_width: f64, nodes: usize, f: F) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let h = PI / nodes as f64;
    (0..nodes)
        .map(|i| {
            let th = (i as f64 + 0.5) * h;
            f(half_width * th.cos()) * (half_width * th.sin())
        })
        .sum::<Complex64>()
        * h
}

/// ∫ e^{−ixt} μ(x) dx for the infinite-path density, by quadrature.
pub fn path_limit_fourier(t: f64, nodes: usize) -> Complex64 {
    integrate_band(2.0, nodes, |x| {
        Complex64::from_polar(path_limit_density(x), -x * t)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, gen_path, gen_tree_fig4};

    /// Ascending series Σ (−1)^m (x/2)^{l+2m} / (m!(m+l)!), summed to convergence.
    fn bessel_series(l: u32, x: f64) -> f64 {
        let mut term = (x / 2.0).powi(l as i32) / (1..=l).map(f64::from).product::<f64>();
        let mut sum = term;
        for m in 1..200 {
            term *= -(x / 2.0).powi(2) / (m as f64 * (m as f64 + f64::from(l)));
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    #[test]
    fn dense_spectra() {
        let e = dense_eig(&build_graph(2, &[(0, 1)]).unwrap()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14 && (e.eigenvalues[1] - 1.0).abs() < 1e-14);
        let e = dense_eig(&gen_path(4).unwrap()).unwrap();
        for (j, lam) in e.eigenvalues.iter().enumerate() {
            let l = 4 - j;
            assert!((lam - 2.0 * (l as f64 * PI / 5.0).cos()).abs() < 1e-13);
        }
        let e = dense_eig(&gen_tree_fig4()).unwrap();
        for target in [(2.0 + 3f64.sqrt()).sqrt(), (2.0 - 3f64.sqrt()).sqrt()] {
            for s in [-1.0, 1.0] {
                assert!(e.eigenvalues.iter().any(|l| (l - s * target).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn decomposition_invariants() {
        let g = crate::graph::gen_random(25, 0.2, 3).unwrap();
        let e = dense_eig(&g).unwrap();
        let a = g.dense_adjacency();
        let mut av = vec![0.0; 25];
        for (lam, u) in e.eigenvalues.iter().zip(&e.eigenvectors) {
            g.apply_adjacency(u, &mut av);
            for (x, y) in av.iter().zip(u) {
                assert!((x - lam * y).abs() < 1e-9 * a.len() as f64);
            }
        }
        assert!(crate::lanczos::gram_error(e.eigenvectors.iter().map(Vec::as_slice)) < 1e-10);
        assert!(dense_eig_capped(&g, 10).is_err());
    }

    #[test]
    fn evolution() {
        let g = build_graph(2, &[(0, 1)]).unwrap();
        let psi = exact_evolution(&g, 0, PI).unwrap();
        assert!((psi[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert!(psi[1].norm() < 1e-14);
        let t = gen_tree_fig4();
        let psi0 = exact_evolution(&t, 2, 0.0).unwrap();
        assert!((psi0[2] - 1.0).norm() < 1e-14);
        for tt in [0.3, 4.0, 17.0] {
            let psi = exact_evolution(&t, 0, tt).unwrap();
            let nrm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
            assert!((nrm - 1.0).abs() < 1e-10);
        }
        assert!(exact_evolution(&t, 6, 1.0).is_err());
    }

    #[test]
    fn bessel_values() {
        assert!((bessel_j(0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(bessel_j(1, 0.0).unwrap().abs() < 1e-15);
        assert!((bessel_j(1, 2.0).unwrap() - 0.5767248077568734).abs() < 1e-12);
        assert!((bessel_j(2, 2.0).unwrap() - 0.35283402861563772).abs() < 1e-12);
        for l in [0u32, 1, 3, 7, 20] {
            for x in [0.3, 1.7, 5.0, 11.0] {
                assert!((bessel_j(l, x).unwrap() - bessel_series(l, x)).abs() < 1e-10);
            }
        }
        assert!((bessel_j(3, -1.5).unwrap() + bessel_series(3, 1.5)).abs() < 1e-12);
        assert!(bessel_j(65, 1.0).is_err());
        assert!(bessel_j(1, 1e4).is_err());
    }

    #[test]
    fn bessel_recurrence_and_sum_rule() {
        for i in 1..=100 {
            let x = 0.1 * i as f64;
            let j0 = bessel_j(0, x).unwrap();
            let j1 = bessel_j(1, x).unwrap();
            let j2 = bessel_j(2, x).unwrap();
            assert!((j2 - (2.0 / x * j1 - j0)).abs() < 1e-10);
        }
        for x in [0.5, 3.0, 10.0, 40.0, 400.0] {
            let s: f64 = bessel_j(0, x).unwrap().powi(2)
                + 2.0
                    * (1..=64)
                        .map(|l| bessel_j(l, x).unwrap().powi(2))
                        .sum::<f64>()
                + 2.0
                    * (65..(x as u32 + 80))
                        .map(|l| bessel_j_any(l, x).powi(2))
                        .sum::<f64>();
            assert!((s - 1.0).abs() < 1e-8, "x = {x}: {s}");
        }
    }

    #[test]
    fn chebyshev() {
        assert_eq!(chebyshev_u(0, 0.3), 1.0);
        assert_eq!(chebyshev_u(1, 0.3), 0.6);
        assert!(chebyshev_u(4, (PI / 5.0).cos()).abs() < 1e-14);
        for l in [2usize, 5, 9] {
            let th = 0.7f64;
            let closed = ((l as f64 + 1.0) * th).sin() / th.sin();
            assert!((chebyshev_u(l, th.cos()) - closed).abs() < 1e-12);
        }
        assert_eq!(chebyshev_u(4, 1.5), 55.0);
    }

    #[test]
    fn kite_limit() {
        assert!((kite_limit_amplitude(0, 1e-6) - 1.0).norm() < 1e-9);
        assert_eq!(kite_limit_amplitude(0, 0.0), Complex64::new(1.0, 0.0));
        let q = kite_limit_amplitude(1, 1.0);
        assert!((q - Complex64::new(0.0, 2.0 * 0.35283402861563772)).norm() < 1e-12);
        let total: f64 = (0..=200)
            .map(|l| kite_limit_amplitude(l, 3.0).norm_sqr())
            .sum();
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn path_limit() {
        assert!((path_limit_q0(1e-4) - 1.0).abs() < 1e-6);
        assert_eq!(path_limit_q0(0.0), 1.0);
        let mass = integrate_band(2.0, 400, |x| Complex64::new(path_limit_density(x), 0.0));
        assert!((mass.re - 1.0).abs() < 1e-8);
        let f = path_limit_fourier(2.0, 400);
        assert!((f - Complex64::new(path_limit_q0(2.0), 0.0)).norm() < 1e-8);
    }

    #[test]
    fn kite_density() {
        for k in [2u32, 10, 100] {
            let edge = 2.0 * (f64::from(k) + 1.0).sqrt();
            let mass = integrate_band(edge, 4000, |x| {
                Complex64::new(kite_limit_density(k, x), 0.0)
            });
            assert!((mass.re - 1.0).abs() < 1e-8, "k = {k}: {}", mass.re);
            assert_eq!(kite_limit_density(k, edge), 0.0);
            assert_eq!(kite_limit_density(k, -edge), 0.0);
        }
        assert!((kite_limit_density(2, 0.0) - 0.275664447710896).abs() < 1e-14);
    }
}
