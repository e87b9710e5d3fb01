use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use qwalk_core::graph::{
    emit_edge_list, gen_kite, gen_path, gen_random, gen_tree_fig4, parse_edge_list,
};
use qwalk_core::io::{csv_float, write_json};
use qwalk_core::lanczos::{complete_basis, default_breakdown_tol, lanczos_from_vertex};
use qwalk_core::oracle::{dense_eig_capped, DEFAULT_DENSE_CAP};
use qwalk_core::spectral::measure_from_jacobi;
use qwalk_core::stratify::stratify;
use qwalk_core::{
    AmplitudeSeries, GqdCertificate, Graph, JacobiCoefficients, OrthonormalBasis, SpectralMeasure,
    SpectralWalk, Stratification,
};
use serde::Serialize;

use crate::args::{
    Format, GenArgs, GenKind, GenParams, GqdArgs, GraphArgs, OutputArgs, ReportArgs, TimeArgs,
    VerifyArgs, WalkArgs,
};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::VerifyFailed => write!(f, "verification failed"),
        }
    }
}

impl<E: Into<qwalk_core::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        let e = e.into();
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Serialize)]
struct GraphInfo {
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    vertices: usize,
    edges: usize,
}

fn require_n(kind: &str, n: Option<usize>) -> Result<usize> {
    n.ok_or_else(|| CliError::Input(format!("--n is required for the {kind} generator")))
}

fn generate(kind: GenKind, p: &GenParams) -> Result<(Graph, String, Option<u64>)> {
    Ok(match kind {
        GenKind::Path => {
            let n = require_n("path", p.n)?;
            (gen_path(n)?, format!("path(n={n})"), None)
        }
        GenKind::Kite => {
            let n = require_n("kite", p.n)?;
            (gen_kite(p.k, n)?, format!("kite(k={}, n={n})", p.k), None)
        }
        GenKind::TreeFig4 => (gen_tree_fig4(), "tree-fig4".to_string(), None),
        GenKind::Random => {
            let n = require_n("random", p.n)?;
            (
                gen_random(n, p.p, p.seed)?,
                format!("random(n={n}, p={})", p.p),
                Some(p.seed),
            )
        }
    })
}

fn load_graph(args: &GraphArgs) -> Result<(Graph, GraphInfo)> {
    let (g, source, seed) = match (&args.source.graph, args.source.generator) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            let g = parse_edge_list(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            (g, format!("file:{}", path.display()), None)
        }
        (None, Some(kind)) => generate(kind, &args.params)?,
        (None, None) => {
            return Err(CliError::Input(
                "one of --graph or --gen is required".into(),
            ))
        }
    };
    if args.start >= g.vertex_count() {
        return Err(CliError::Input(format!(
            "start vertex {} out of range for {} vertices",
            args.start,
            g.vertex_count()
        )));
    }
    let info = GraphInfo {
        source,
        seed,
        vertices: g.vertex_count(),
        edges: g.edge_count(),
    };
    Ok((g, info))
}

fn time_grid(t: &TimeArgs) -> Result<Vec<f64>> {
    if !(t.t_max.is_finite() && t.t_max > 0.0) {
        return Err(CliError::Input(format!(
            "--t-max must be positive, got {}",
            t.t_max
        )));
    }
    if t.steps == 0 {
        return Err(CliError::Input("--steps must be at least 1".into()));
    }
    if !(t.time_scale.is_finite() && t.time_scale > 0.0) {
        return Err(CliError::Input(format!(
            "--time-scale must be positive, got {}",
            t.time_scale
        )));
    }
    if t.steps == 1 {
        return Ok(vec![0.0]);
    }
    let h = t.t_max / (t.steps - 1) as f64;
    Ok((0..t.steps)
        .map(|i| {
            if i + 1 == t.steps {
                t.t_max
            } else {
                i as f64 * h
            }
        })
        .collect())
}

fn emit<F>(out: Option<&Path>, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| io_error(path, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)
                .and_then(|()| w.flush())
                .map_err(|e| io_error(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)
                .and_then(|()| w.flush())
                .map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    emit(out, |w| {
        write_json(&mut *w, value).map_err(io::Error::other)?;
        writeln!(w)
    })
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<()> {
    emit(out, |w| w.write_all(text.as_bytes()))
}

fn json_only(output: &OutputArgs, command: &str) -> Result<()> {
    match output.format {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::Input(format!(
            "{command} supports only --format json"
        ))),
    }
}

fn warn(messages: &[String]) {
    for m in messages {
        eprintln!("warning: {m}");
    }
}

/// Bases completing the walk space to the reference component.
fn supplementary(
    g: &Graph,
    s: &Stratification,
    basis: &OrthonormalBasis,
) -> Result<Vec<OrthonormalBasis>> {
    if basis.len() >= s.component_size() {
        return Ok(Vec::new());
    }
    Ok(complete_basis(
        g,
        std::slice::from_ref(basis),
        default_breakdown_tol(g),
    )?)
}

fn component_warnings(s: &Stratification, info: &GraphInfo) -> Vec<String> {
    let mut w = Vec::new();
    if s.proper_component {
        w.push(format!(
            "start vertex reaches {} of {} vertices; the rest never carry amplitude",
            s.component_size(),
            info.vertices
        ));
    }
    w
}

pub fn gen(args: &GenArgs) -> Result<()> {
    let (g, source, seed) = generate(args.kind, &args.params)?;
    let mut text = format!("# {source}\n");
    if let Some(seed) = seed {
        writeln!(text, "# seed {seed}").unwrap();
    }
    text.push_str(&emit_edge_list(&g));
    emit_text(args.out.as_deref(), &text)
}

#[derive(Serialize)]
struct StratifyReport<'a> {
    graph: GraphInfo,
    #[serde(flatten)]
    stratification: &'a Stratification,
    sizes: Vec<usize>,
}

pub fn stratify_cmd(args: &ReportArgs) -> Result<()> {
    let (g, info) = load_graph(&args.graph)?;
    let s = stratify(&g, args.graph.start)?;
    warn(&component_warnings(&s, &info));
    match args.output.format {
        Format::Json => emit_json(
            args.output.out.as_deref(),
            &StratifyReport {
                graph: info,
                sizes: s.sizes(),
                stratification: &s,
            },
        ),
        Format::Csv => {
            let mut text = String::from("vertex,stratum\n");
            for (k, stratum) in s.strata.iter().enumerate() {
                for v in stratum {
                    writeln!(text, "{v},{k}").unwrap();
                }
            }
            emit_text(args.output.out.as_deref(), &text)
        }
    }
}

#[derive(Serialize)]
struct LanczosReport<'a> {
    graph: GraphInfo,
    start: usize,
    dim: usize,
    jacobi: &'a JacobiCoefficients,
    basis: &'a [Vec<f64>],
    supplementary: Vec<Vec<Vec<f64>>>,
}

pub fn lanczos_cmd(args: &ReportArgs) -> Result<()> {
    let (g, info) = load_graph(&args.graph)?;
    let start = args.graph.start;
    let s = stratify(&g, start)?;
    let (j, basis) = lanczos_from_vertex(&g, start)?;
    let extra = supplementary(&g, &s, &basis)?;
    let mut warnings = component_warnings(&s, &info);
    if !extra.is_empty() {
        warnings.push(format!(
            "walk space has dimension {} < {}; {} supplementary vectors",
            j.dim(),
            s.component_size(),
            extra.iter().map(OrthonormalBasis::len).sum::<usize>()
        ));
    }
    warn(&warnings);
    match args.output.format {
        Format::Json => emit_json(
            args.output.out.as_deref(),
            &LanczosReport {
                graph: info,
                start,
                dim: j.dim(),
                jacobi: &j,
                basis: &basis.vectors,
                supplementary: extra.into_iter().map(|b| b.vectors).collect(),
            },
        ),
        Format::Csv => {
            let mut text = String::from("i,alpha,beta\n");
            for i in 0..j.dim() {
                let beta = if i == 0 {
                    String::new()
                } else {
                    csv_float(j.beta(i))
                };
                writeln!(text, "{i},{},{beta}", csv_float(j.alpha(i))).unwrap();
            }
            emit_text(args.output.out.as_deref(), &text)
        }
    }
}

#[derive(Serialize)]
struct MeasureReport<'a> {
    graph: GraphInfo,
    start: usize,
    #[serde(flatten)]
    measure: &'a SpectralMeasure,
    total_mass: f64,
}

pub fn measure_cmd(args: &ReportArgs) -> Result<()> {
    let (g, info) = load_graph(&args.graph)?;
    let start = args.graph.start;
    let (j, _) = lanczos_from_vertex(&g, start)?;
    let m = measure_from_jacobi(&j)?;
    match args.output.format {
        Format::Json => emit_json(
            args.output.out.as_deref(),
            &MeasureReport {
                graph: info,
                start,
                total_mass: m.total_mass(),
                measure: &m,
            },
        ),
        Format::Csv => {
            let mut text = String::from("x,weight\n");
            for a in &m.atoms {
                writeln!(text, "{},{}", csv_float(a.x), csv_float(a.weight)).unwrap();
            }
            emit_text(args.output.out.as_deref(), &text)
        }
    }
}

#[derive(Serialize)]
struct WalkMetadata<'a> {
    graph: GraphInfo,
    start: usize,
    jacobi: &'a JacobiCoefficients,
    measure: &'a SpectralMeasure,
    certificate: &'a GqdCertificate,
    supplementary_vectors: usize,
    conservation_error: f64,
    warnings: &'a [String],
}

#[derive(Serialize)]
struct WalkReport<'a> {
    #[serde(flatten)]
    series: &'a AmplitudeSeries,
    metadata: WalkMetadata<'a>,
}

const CONSERVATION_TOL: f64 = 1e-10;

pub fn walk_cmd(args: &WalkArgs) -> Result<()> {
    check_tol(args.tol)?;
    let (g, info) = load_graph(&args.graph)?;
    let start = args.graph.start;
    let times = time_grid(&args.time)?;
    let w = SpectralWalk::new(&g, start)?;
    let series = w.series(&times, args.time.time_scale, true)?;
    let certificate = w.certify(&g, args.tol)?;
    let extra: usize = supplementary(&g, &w.stratification, &w.basis)?
        .iter()
        .map(OrthonormalBasis::len)
        .sum();
    let conservation = series
        .conservation_error()
        .max(series.vertex_conservation_error());

    let mut warnings = component_warnings(&w.stratification, &info);
    if extra > 0 {
        warnings.push(format!(
            "walk space has dimension {} < {}; {extra} supplementary vectors carry no amplitude",
            w.jacobi.dim(),
            w.stratification.component_size()
        ));
    }
    if conservation > CONSERVATION_TOL {
        warnings.push(format!("probability conservation off by {conservation:e}"));
    }
    warn(&warnings);

    match args.output.format {
        Format::Json => emit_json(
            args.output.out.as_deref(),
            &WalkReport {
                series: &series,
                metadata: WalkMetadata {
                    graph: info,
                    start,
                    jacobi: &w.jacobi,
                    measure: &w.measure,
                    certificate: &certificate,
                    supplementary_vectors: extra,
                    conservation_error: conservation,
                    warnings: &warnings,
                },
            },
        ),
        Format::Csv => emit(args.output.out.as_deref(), |out| {
            series.write_csv(out).map_err(io::Error::other)
        }),
    }
}

#[derive(Serialize)]
struct VerifyReport {
    graph: GraphInfo,
    start: usize,
    t_max: f64,
    steps: usize,
    time_scale: f64,
    tol: f64,
    walk_dimension: usize,
    supplementary_vectors: usize,
    max_deviation: f64,
    worst_time: f64,
    complement_overlap: f64,
    conservation_error: f64,
    pass: bool,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "--tol must be a non-negative number, got {tol}"
        )))
    }
}

pub fn verify_cmd(args: &VerifyArgs) -> Result<()> {
    json_only(&args.output, "verify")?;
    check_tol(args.tol)?;
    let (g, info) = load_graph(&args.graph)?;
    let start = args.graph.start;
    let times = time_grid(&args.time)?;
    let scale = args.time.time_scale;
    let w = SpectralWalk::new(&g, start)?;
    let series = w.series(&times, scale, true)?;
    let extra = supplementary(&g, &w.stratification, &w.basis)?;
    let eig = dense_eig_capped(&g, DEFAULT_DENSE_CAP)?;

    let vertex = series.vertex.as_ref().expect("requested vertex amplitudes");
    let (mut max_dev, mut worst_time, mut overlap) = (0.0f64, times[0], 0.0f64);
    for (&t, psi) in times.iter().zip(vertex) {
        let exact = eig.evolve(start, t / scale)?;
        let dev = psi
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if dev > max_dev {
            max_dev = dev;
            worst_time = t;
        }
        for v in extra.iter().flat_map(|b| &b.vectors) {
            let ip: num_complex::Complex64 = v.iter().zip(&exact).map(|(&c, z)| z * c).sum();
            overlap = overlap.max(ip.norm());
        }
    }
    let pass = max_dev <= args.tol && overlap <= args.tol;
    let report = VerifyReport {
        graph: info,
        start,
        t_max: args.time.t_max,
        steps: args.time.steps,
        time_scale: scale,
        tol: args.tol,
        walk_dimension: w.jacobi.dim(),
        supplementary_vectors: extra.iter().map(OrthonormalBasis::len).sum(),
        max_deviation: max_dev,
        worst_time,
        complement_overlap: overlap,
        conservation_error: series.conservation_error(),
        pass,
    };
    emit_json(args.output.out.as_deref(), &report)?;
    let seed = report
        .graph
        .seed
        .map(|s| format!(", seed {s}"))
        .unwrap_or_default();
    eprintln!(
        "{}: max deviation {:e} (tol {:e}){seed}, {} supplementary vectors",
        if pass { "PASS" } else { "FAIL" },
        max_dev,
        args.tol,
        report.supplementary_vectors
    );
    if pass {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

#[derive(Serialize)]
struct GqdReport<'a> {
    graph: GraphInfo,
    start: usize,
    strata: &'a [Vec<usize>],
    #[serde(flatten)]
    certificate: &'a GqdCertificate,
}

pub fn gqd_cmd(args: &GqdArgs) -> Result<()> {
    json_only(&args.output, "gqd")?;
    check_tol(args.tol)?;
    let (g, info) = load_graph(&args.graph)?;
    let start = args.graph.start;
    let w = SpectralWalk::new(&g, start)?;
    let cert = w.certify(&g, args.tol)?;
    match &cert.diagnostic {
        Some(v) => eprintln!(
            "{:?}: {} (stratum {}, magnitude {:e})",
            cert.status, v.condition, v.stratum, v.magnitude
        ),
        None => eprintln!("{:?}", cert.status),
    }
    emit_json(
        args.output.out.as_deref(),
        &GqdReport {
            graph: info,
            start,
            strata: &w.stratification.strata,
            certificate: &cert,
        },
    )
}
