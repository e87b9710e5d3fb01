//! WebAssembly bindings for the browser demo.
//!
//! Each exported function takes a JSON configuration string and returns a
//! JSON document for the page to plot. The `*_json` functions do the work and
//! are usable natively.

use qwalk_core::graph::{gen_kite, gen_path, gen_random, gen_tree_fig4, parse_edge_list};
use qwalk_core::oracle::kite_limit_amplitude;
use qwalk_core::{Graph, SpectralWalk};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSource {
    Path { n: usize },
    Kite { k: usize, n: usize },
    TreeFig4,
    Random { n: usize, p: f64, seed: u64 },
    EdgeList { text: String },
}

impl GraphSource {
    pub fn build(&self) -> Result<Graph, String> {
        let g = match self {
            GraphSource::Path { n } => gen_path(*n),
            GraphSource::Kite { k, n } => gen_kite(*k, *n),
            GraphSource::TreeFig4 => Ok(gen_tree_fig4()),
            GraphSource::Random { n, p, seed } => gen_random(*n, *p, *seed),
            GraphSource::EdgeList { text } => parse_edge_list(text),
        };
        g.map_err(|e| e.to_string())
    }
}

/// Vertex limit for the browser, which runs everything on the UI thread.
pub const MAX_VERTICES: usize = 20_000;
pub const MAX_STEPS: usize = 2000;

fn time_grid(t_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(format!("t_max must be positive, got {t_max}"));
    }
    if !(2..=MAX_STEPS).contains(&steps) {
        return Err(format!("steps must lie in 2..={MAX_STEPS}, got {steps}"));
    }
    let h = t_max / (steps - 1) as f64;
    Ok((0..steps).map(|i| i as f64 * h).collect())
}

fn walk_for(source: &GraphSource, start: usize) -> Result<(Graph, SpectralWalk), String> {
    let g = source.build()?;
    if g.vertex_count() > MAX_VERTICES {
        return Err(format!(
            "{} vertices exceeds the demo limit of {MAX_VERTICES}",
            g.vertex_count()
        ));
    }
    if start >= g.vertex_count() {
        return Err(format!(
            "start vertex {start} out of range for {} vertices",
            g.vertex_count()
        ));
    }
    let w = SpectralWalk::new(&g, start).map_err(|e| e.to_string())?;
    Ok((g, w))
}

fn parse<'a, T: Deserialize<'a>>(config: &'a str) -> Result<T, String> {
    serde_json::from_str(config).map_err(|e| format!("bad configuration: {e}"))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

#[derive(Debug, Deserialize)]
struct WalkConfig {
    graph: GraphSource,
    #[serde(default)]
    start: usize,
    t_max: f64,
    steps: usize,
}

#[derive(Debug, Serialize)]
struct WalkCurves {
    vertices: usize,
    dim: usize,
    status: String,
    strata_sizes: Vec<usize>,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    times: Vec<f64>,
    /// `probabilities[k][i]` = |q_k(times[i])|².
    probabilities: Vec<Vec<f64>>,
}

/// Stratum occupation probabilities |q_k(t)|² on a uniform grid.
pub fn walk_curves_json(config: &str) -> Result<String, String> {
    let cfg: WalkConfig = parse(config)?;
    let times = time_grid(cfg.t_max, cfg.steps)?;
    let (g, w) = walk_for(&cfg.graph, cfg.start)?;
    let prop = w.propagator();
    let mut probabilities = vec![Vec::with_capacity(times.len()); prop.dim()];
    for &t in &times {
        for (row, q) in probabilities.iter_mut().zip(prop.amplitudes(t)) {
            row.push(q.norm_sqr());
        }
    }
    let status = w.certify(&g, 1e-8).map_err(|e| e.to_string())?.status;
    Ok(to_json(&WalkCurves {
        vertices: g.vertex_count(),
        dim: w.jacobi.dim(),
        status: serde_json::to_value(status)
            .unwrap()
            .as_str()
            .unwrap_or_default()
            .to_string(),
        strata_sizes: w.stratification.sizes(),
        alphas: w.jacobi.alphas().to_vec(),
        betas: w.jacobi.betas().to_vec(),
        times,
        probabilities,
    }))
}

#[derive(Debug, Deserialize)]
struct MeasureConfig {
    graph: GraphSource,
    #[serde(default)]
    start: usize,
}

#[derive(Debug, Serialize)]
struct MeasureView {
    points: Vec<f64>,
    weights: Vec<f64>,
    total_mass: f64,
}

/// Atoms and Gauss weights of the spectral distribution at the start vertex.
pub fn spectral_measure_json(config: &str) -> Result<String, String> {
    let cfg: MeasureConfig = parse(config)?;
    let (_, w) = walk_for(&cfg.graph, cfg.start)?;
    Ok(to_json(&MeasureView {
        points: w.measure.points().collect(),
        weights: w.measure.weights().collect(),
        total_mass: w.measure.total_mass(),
    }))
}

#[derive(Debug, Deserialize)]
struct KiteConfig {
    k: usize,
    n: usize,
    l: usize,
    t_max: f64,
    steps: usize,
}

#[derive(Debug, Serialize)]
struct KiteComparison {
    times: Vec<f64>,
    /// Re and Im of (−1)ˡ q_l(t) under A/√k, aligned with the limit's phase.
    finite_re: Vec<f64>,
    finite_im: Vec<f64>,
    limit_re: Vec<f64>,
    limit_im: Vec<f64>,
    max_error: f64,
}

/// Finite kite amplitude under A/√k against the large-k Bessel limit.
pub fn kite_limit_json(config: &str) -> Result<String, String> {
    let cfg: KiteConfig = parse(config)?;
    let times = time_grid(cfg.t_max, cfg.steps)?;
    let (_, w) = walk_for(&GraphSource::Kite { k: cfg.k, n: cfg.n }, 0)?;
    if cfg.l >= w.jacobi.dim() {
        return Err(format!(
            "stratum {} out of range; the walk has {} strata",
            cfg.l,
            w.jacobi.dim()
        ));
    }
    let scale = (cfg.k as f64).sqrt();
    let sign = if cfg.l.is_multiple_of(2) { 1.0 } else { -1.0 };
    let prop = w.propagator();
    let mut out = KiteComparison {
        times: times.clone(),
        finite_re: Vec::new(),
        finite_im: Vec::new(),
        limit_re: Vec::new(),
        limit_im: Vec::new(),
        max_error: 0.0,
    };
    for &t in &times {
        let q = prop.amplitude(cfg.l, t / scale) * sign;
        let lim = kite_limit_amplitude(cfg.l as u32, t);
        out.max_error = out.max_error.max((q - lim).norm());
        out.finite_re.push(q.re);
        out.finite_im.push(q.im);
        out.limit_re.push(lim.re);
        out.limit_im.push(lim.im);
    }
    Ok(to_json(&out))
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = walkCurves)]
pub fn walk_curves(config: &str) -> Result<String, JsValue> {
    js(walk_curves_json(config))
}

#[wasm_bindgen(js_name = spectralMeasure)]
pub fn spectral_measure(config: &str) -> Result<String, JsValue> {
    js(spectral_measure_json(config))
}

#[wasm_bindgen(js_name = kiteLimit)]
pub fn kite_limit(config: &str) -> Result<String, JsValue> {
    js(kite_limit_json(config))
}
