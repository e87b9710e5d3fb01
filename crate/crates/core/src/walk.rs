//! Walk amplitudes from the spectral measure, vertex-level amplitudes,
//! long-time average probabilities, and stratum-vector (QD/GQD)
//! certification.

use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::io::csv_float;
use crate::lanczos::{lanczos_from_vertex, unit_vector, JacobiCoefficients, OrthonormalBasis};
use crate::spectral::{
    measure_from_jacobi, measure_with_polynomials, SpectralError, SpectralMeasure,
};
use crate::stratify::{stratify, Stratification};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WalkError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {k} out of range for dimension {dim}")]
    IndexOutOfRange { k: usize, dim: usize },
    #[error("basis was not grown from the reference vertex {0}")]
    MismatchedReference(usize),
    #[error("time scale must be positive and finite, got {0}")]
    InvalidTimeScale(f64),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Amplitudes on a time grid: `krylov[i][k]` = q_k(times[i]) and, when
/// present, `vertex[i][v]` = ⟨v|e^{−iAt/s}|φ₀⟩.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSeries {
    pub time_scale: f64,
    pub times: Vec<f64>,
    pub krylov: Vec<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<Vec<Vec<Complex64>>>,
}

fn norm_sqr_sum(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}

impl AmplitudeSeries {
    /// max_t |Σ_k |q_k(t)|² − 1|.
    pub fn conservation_error(&self) -> f64 {
        self.krylov
            .iter()
            .map(|row| (norm_sqr_sum(row) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Same check over the vertex amplitudes (0 when absent).
    pub fn vertex_conservation_error(&self) -> f64 {
        self.vertex.as_ref().map_or(0.0, |rows| {
            rows.iter()
                .map(|row| (norm_sqr_sum(row) - 1.0).abs())
                .fold(0.0, f64::max)
        })
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json_string(self)
    }

    /// One row per time: `t`, then `q{k}_re,q{k}_im` per Krylov index and
    /// `v{a}_re,v{a}_im` per vertex when vertex amplitudes are present.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let dim = self.krylov.first().map_or(0, Vec::len);
        let nv = self
            .vertex
            .as_ref()
            .and_then(|v| v.first())
            .map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        for k in 0..dim {
            header.push(format!("q{k}_re"));
            header.push(format!("q{k}_im"));
        }
        for a in 0..nv {
            header.push(format!("v{a}_re"));
            header.push(format!("v{a}_im"));
        }
        w.write_record(&header)?;
        for (i, &t) in self.times.iter().enumerate() {
            let mut rec = vec![csv_float(t)];
            let mut push = |c: &Complex64| {
                rec.push(csv_float(c.re));
                rec.push(csv_float(c.im));
            };
            self.krylov[i].iter().for_each(&mut push);
            if let Some(v) = &self.vertex {
                v[i].iter().for_each(&mut push);
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Precomputed A_l and P_k(x_l) for repeated amplitude evaluation.
#[derive(Debug, Clone)]
pub struct Propagator {
    points: Vec<f64>,
    weights: Vec<f64>,
    /// `poly[l][k]` = P_k(x_l).
    poly: Vec<Vec<f64>>,
}

impl Propagator {
    pub fn new(m: &SpectralMeasure, j: &JacobiCoefficients) -> Result<Self, WalkError> {
        if m.len() != j.dim() {
            return Err(WalkError::DimensionMismatch {
                expected: j.dim(),
                got: m.len(),
            });
        }
        let (full, poly) = measure_with_polynomials(j)?;
        Ok(Self {
            points: m.points().collect(),
            weights: full.weights().collect(),
            poly,
        })
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    fn phases(&self, t: f64) -> impl Iterator<Item = Complex64> + '_ {
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| Complex64::from_polar(w, -x * t))
    }

    /// q_k(t) = Σ_l A_l e^{−i x_l t} P_k(x_l), summed in ascending atom order.
    pub fn amplitude(&self, k: usize, t: f64) -> Complex64 {
        self.phases(t)
            .zip(&self.poly)
            .map(|(ph, p)| ph * p[k])
            .sum()
    }

    /// q_0(t), …, q_{dim−1}(t).
    pub fn amplitudes(&self, t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (ph, p) in self.phases(t).zip(&self.poly) {
            for (o, &pk) in out.iter_mut().zip(p) {
                *o += ph * pk;
            }
        }
        out
    }
}

/// q_k(t/s) for every time in `times`, where s = `time_scale`.
pub fn krylov_amplitudes(
    m: &SpectralMeasure,
    j: &JacobiCoefficients,
    times: &[f64],
    time_scale: f64,
) -> Result<AmplitudeSeries, WalkError> {
    if !(time_scale > 0.0 && time_scale.is_finite()) {
        return Err(WalkError::InvalidTimeScale(time_scale));
    }
    let prop = Propagator::new(m, j)?;
    Ok(AmplitudeSeries {
        time_scale,
        times: times.to_vec(),
        krylov: times
            .iter()
            .map(|&t| prop.amplitudes(t / time_scale))
            .collect(),
        vertex: None,
    })
}

/// lim_{T→∞} (1/T)∫₀ᵀ |q_k(t)|² dt = Σ_l A_l² P_k(x_l)².
pub fn average_probability(
    m: &SpectralMeasure,
    j: &JacobiCoefficients,
    k: usize,
) -> Result<f64, WalkError> {
    if k >= j.dim() {
        return Err(WalkError::IndexOutOfRange { k, dim: j.dim() });
    }
    let prop = Propagator::new(m, j)?;
    Ok(prop
        .weights
        .iter()
        .zip(&prop.poly)
        .map(|(w, p)| (w * p[k]).powi(2))
        .sum())
}

/// Expands ψ(t) = Σ_k q_k(t) φ_k over the vertices.
pub fn vertex_amplitudes(
    basis: &OrthonormalBasis,
    series: &AmplitudeSeries,
) -> Result<AmplitudeSeries, WalkError> {
    let n = basis.start.len();
    let rows = series
        .krylov
        .iter()
        .map(|q| {
            if q.len() != basis.len() {
                return Err(WalkError::DimensionMismatch {
                    expected: basis.len(),
                    got: q.len(),
                });
            }
            let mut psi = vec![Complex64::new(0.0, 0.0); n];
            for (qk, phi) in q.iter().zip(&basis.vectors) {
                for (p, &c) in psi.iter_mut().zip(phi) {
                    *p += qk * c;
                }
            }
            Ok(psi)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AmplitudeSeries {
        vertex: Some(rows),
        ..series.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GqdStatus {
    Qd,
    Gqd,
    NonGqd,
}

/// First failed check, with the offending stratum and size of the miss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub stratum: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GqdCertificate {
    pub status: GqdStatus,
    /// `coefficients[k][i]` is g for the i-th vertex of stratum k (same order
    /// as the stratification), scaled so that each stratum's minimum is 1.
    pub coefficients: Option<Vec<Vec<f64>>>,
    /// Whether every g is an integer within tolerance. Reported, not required.
    pub integral: bool,
    /// γ_1..γ_{d−1}; `gammas[k − 1]` is γ_k.
    pub gammas: Vec<f64>,
    /// η_0..η_{d−1}.
    pub etas: Vec<f64>,
    /// β_k = γ_k √(Σg_k² / Σg_{k−1}²) reconstructed from the conditions.
    pub derived_betas: Vec<f64>,
    pub diagnostic: Option<Violation>,
}

impl GqdCertificate {
    fn rejected(condition: impl Into<String>, stratum: usize, magnitude: f64) -> Self {
        Self {
            status: GqdStatus::NonGqd,
            coefficients: None,
            integral: false,
            gammas: Vec::new(),
            etas: Vec::new(),
            derived_betas: Vec::new(),
            diagnostic: Some(Violation {
                condition: condition.into(),
                stratum,
                magnitude,
            }),
        }
    }
}

pub const SUPPORT_TOL: f64 = 1e-8;

/// Value shared by every entry of `ratios` within relative `tol`, or the
/// worst relative spread.
fn common_value(ratios: &[f64], tol: f64) -> Result<f64, f64> {
    let Some(&first) = ratios.first() else {
        return Ok(0.0);
    };
    let scale = ratios.iter().fold(1.0f64, |m, r| m.max(r.abs()));
    let spread = ratios
        .iter()
        .map(|r| (r - first).abs() / scale)
        .fold(0.0, f64::max);
    if spread <= tol {
        Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
    } else {
        Err(spread)
    }
}

/// Decides whether the Lanczos vectors are stratum vectors and, if so,
/// checks the up/same/down sum conditions on their coefficients.
pub fn gqd_certify(
    g: &Graph,
    s: &Stratification,
    basis: &OrthonormalBasis,
    j: &JacobiCoefficients,
    tol: f64,
) -> Result<GqdCertificate, WalkError> {
    let n = g.vertex_count();
    if basis.start != unit_vector(n, s.reference) {
        return Err(WalkError::MismatchedReference(s.reference));
    }
    if basis.len() != s.depth() {
        return Ok(GqdCertificate::rejected(
            format!(
                "basis size {} differs from {} strata",
                basis.len(),
                s.depth()
            ),
            basis.len().min(s.depth()),
            basis.len().abs_diff(s.depth()) as f64,
        ));
    }

    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(s.depth());
    for (k, (phi, stratum)) in basis.vectors.iter().zip(&s.strata).enumerate() {
        let max = phi.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let zero = SUPPORT_TOL * max;
        for (v, &c) in phi.iter().enumerate() {
            if c.abs() > zero && s.distance(v) != Some(k) {
                return Ok(GqdCertificate::rejected(
                    format!("basis vector {k} has weight on vertex {v} outside stratum {k}"),
                    k,
                    c.abs() / max,
                ));
            }
        }
        let comps: Vec<f64> = stratum.iter().map(|&v| phi[v]).collect();
        if let Some(c) = comps.iter().find(|c| c.abs() <= zero) {
            return Ok(GqdCertificate::rejected(
                format!("basis vector {k} vanishes on part of stratum {k}"),
                k,
                c.abs(),
            ));
        }
        if comps.iter().any(|&c| c.signum() != comps[0].signum()) {
            return Ok(GqdCertificate::rejected(
                format!("basis vector {k} changes sign within stratum {k}"),
                k,
                1.0,
            ));
        }
        let min = comps.iter().fold(f64::INFINITY, |m, c| m.min(c.abs()));
        coeffs.push(comps.iter().map(|c| c.abs() / min).collect());
    }

    let d = s.depth();
    let mut gv = vec![0.0; n];
    for (stratum, cs) in s.strata.iter().zip(&coeffs) {
        for (&v, &c) in stratum.iter().zip(cs) {
            gv[v] = c;
        }
    }
    let sum_into = |nu: usize, k: usize| -> f64 {
        g.neighbors(nu)
            .iter()
            .filter(|&&a| s.distance(a) == Some(k))
            .map(|&a| gv[a])
            .sum()
    };
    let sq: Vec<f64> = coeffs
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum())
        .collect();

    let mut gammas = Vec::with_capacity(d.saturating_sub(1));
    let mut etas = Vec::with_capacity(d);
    let mut derived_betas = Vec::with_capacity(d.saturating_sub(1));
    let mut diagnostic = None;
    let fail = |cond: &str, k: usize, mag: f64, diag: &mut Option<Violation>| {
        if diag.is_none() {
            *diag = Some(Violation {
                condition: cond.to_string(),
                stratum: k,
                magnitude: mag,
            });
        }
    };

    for k in 0..d {
        // same-stratum sums
        let ratios: Vec<f64> = s.strata[k]
            .iter()
            .map(|&nu| sum_into(nu, k) / gv[nu])
            .collect();
        match common_value(&ratios, tol) {
            Ok(eta) => etas.push(eta),
            Err(spread) => {
                fail(
                    "same-stratum sums not proportional to g",
                    k,
                    spread,
                    &mut diagnostic,
                );
                etas.push(f64::NAN);
            }
        }
        if k + 1 == d {
            break;
        }
        // up-sums into stratum k + 1
        let ratios: Vec<f64> = s.strata[k + 1]
            .iter()
            .map(|&nu| sum_into(nu, k) / gv[nu])
            .collect();
        let gamma = match common_value(&ratios, tol) {
            Ok(gamma) => gamma,
            Err(spread) => {
                fail(
                    "up-sums not proportional to g",
                    k + 1,
                    spread,
                    &mut diagnostic,
                );
                f64::NAN
            }
        };
        gammas.push(gamma);
        let norm_ratio = sq[k + 1] / sq[k];
        // down-sums from stratum k + 1 onto stratum k
        let expected = gamma * norm_ratio;
        let worst = s.strata[k]
            .iter()
            .map(|&nu| (sum_into(nu, k + 1) - expected * gv[nu]).abs() / expected.abs().max(1.0))
            .fold(0.0, f64::max);
        if worst.is_nan() || worst > tol {
            fail(
                "down-sums violate the squared-norm ratio",
                k + 1,
                worst,
                &mut diagnostic,
            );
        }
        derived_betas.push(gamma * norm_ratio.sqrt());
    }

    if diagnostic.is_none() {
        for (k, (&b, &jb)) in derived_betas.iter().zip(j.betas()).enumerate() {
            let miss = (b - jb).abs();
            if miss > tol * jb.max(1.0) {
                fail(
                    "reconstructed beta differs from Lanczos",
                    k + 1,
                    miss,
                    &mut diagnostic,
                );
            }
        }
        for (k, (&a, &ja)) in etas.iter().zip(j.alphas()).enumerate() {
            let miss = (a - ja).abs();
            if miss > tol * ja.abs().max(1.0) {
                fail(
                    "reconstructed alpha differs from Lanczos",
                    k,
                    miss,
                    &mut diagnostic,
                );
            }
        }
    }

    let integral = coeffs
        .iter()
        .flatten()
        .all(|c| (c - c.round()).abs() <= tol * c.max(1.0));
    let status = if diagnostic.is_some() {
        GqdStatus::NonGqd
    } else if coeffs.iter().flatten().all(|c| (c - 1.0).abs() <= tol) {
        GqdStatus::Qd
    } else {
        GqdStatus::Gqd
    };
    Ok(GqdCertificate {
        status,
        coefficients: Some(coeffs),
        integral,
        gammas,
        etas,
        derived_betas,
        diagnostic,
    })
}

/// Stratification, Lanczos data and spectral measure for a walk started at
/// one vertex.
#[derive(Debug, Clone)]
pub struct SpectralWalk {
    pub stratification: Stratification,
    pub jacobi: JacobiCoefficients,
    pub basis: OrthonormalBasis,
    pub measure: SpectralMeasure,
}

impl SpectralWalk {
    pub fn new(g: &Graph, start: usize) -> Result<Self, crate::Error> {
        let stratification = stratify(g, start)?;
        let (jacobi, basis) = lanczos_from_vertex(g, start)?;
        let measure = measure_from_jacobi(&jacobi)?;
        Ok(Self {
            stratification,
            jacobi,
            basis,
            measure,
        })
    }

    pub fn propagator(&self) -> Propagator {
        Propagator::new(&self.measure, &self.jacobi).expect("measure built from these coefficients")
    }

    pub fn series(
        &self,
        times: &[f64],
        time_scale: f64,
        with_vertices: bool,
    ) -> Result<AmplitudeSeries, WalkError> {
        let series = krylov_amplitudes(&self.measure, &self.jacobi, times, time_scale)?;
        if with_vertices {
            vertex_amplitudes(&self.basis, &series)
        } else {
            Ok(series)
        }
    }

    pub fn certify(&self, g: &Graph, tol: f64) -> Result<GqdCertificate, WalkError> {
        gqd_certify(g, &self.stratification, &self.basis, &self.jacobi, tol)
    }
}
