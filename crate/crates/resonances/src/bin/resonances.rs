use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use resonances::background::{photon_constant_fit, FitModel, RhoProfile, SdSParams};
use resonances::counting::{
    build_lattice, cluster_multiplicities, counting_curve, fit_exponent, match_lattice, Region, SignConvention,
    Weighting, DEFAULT_CLUSTER_TOL,
};
use resonances::exec::Exec;
use resonances::funnel::{compute_funnel_resonances, FunnelParams, FunnelRequest, NeckBc};
use resonances::io::{
    emit_svg, fmt_f64, pick, read_table, spectrum_rows, write_table, Cache, PlotData, RunConfig, SpectrumRecord,
    Style, Table, TableKind,
};
use resonances::sds::{compute_qnm, default_window, QnmRequest};
use resonances::spectral::{check_pairing, Spectrum, Window, ZERO_MODE_TOL};
use resonances::symbols::{check_assumptions, find_epsilons, ptilde_margins, EscapeConfig, ModelSymbols, SymbolGrid};
use resonances::{Complex64, Error, Result};

#[derive(Parser)]
#[command(name = "resonances", version, about = "Quasinormal modes and scattering resonances")]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run without the thread pool.
    #[arg(long, global = true)]
    sequential: bool,
    /// Ignore RESONANCES_CACHE_DIR.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Schwarzschild–de Sitter quasinormal modes per angular momentum.
    Sds(SdsArgs),
    /// Funnel resonances per Fourier mode.
    Funnel(FunnelArgs),
    /// Symbol-level checks of the structural hypotheses.
    Symbols(SymbolsArgs),
    /// Counting curve and growth exponent from a spectrum table.
    Count(CountArgs),
    /// Pseudopole lattice table.
    Lattice(LatticeArgs),
    /// Summary and consistency checks of a spectrum table.
    Report(ReportArgs),
}

#[derive(Args)]
struct SdsArgs {
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    lmin: Option<u32>,
    #[arg(long)]
    lmax: Option<u32>,
    /// Low resolution (nodes); the high one defaults to ⌈1.5 n⌉.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n_high: Option<usize>,
    /// Overtone depth of the default trust window.
    #[arg(long)]
    k_max: Option<u32>,
    /// Trust strip depth, overriding the k_max-based default.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    warp: Option<f64>,
    #[arg(long)]
    drift_tol: Option<f64>,
    #[arg(long)]
    residual_tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct FunnelArgs {
    #[arg(long)]
    circumference: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    m_min: Option<i64>,
    #[arg(long)]
    m_max: Option<i64>,
    /// dirichlet, neumann or both.
    #[arg(long)]
    bc: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n_high: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    drift_tol: Option<f64>,
    #[arg(long)]
    residual_tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct SymbolsArgs {
    /// sds or funnel.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    circumference: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    rmax: Option<f64>,
    /// Strip depth; omitted means the full disk.
    #[arg(long)]
    gamma: Option<f64>,
    /// Depth of the strip the table can be trusted in (defaults to gamma).
    #[arg(long)]
    trust_gamma: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Lower end of the fit range (defaults to rmax/8).
    #[arg(long)]
    fit_min: Option<f64>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Sidecar path; defaults to the SVG path with a .json extension.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    ell_max: Option<u32>,
    #[arg(long)]
    k_max: Option<u32>,
    /// Use all four sign combinations ±ℓ ± ½.
    #[arg(long)]
    independent_signs: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Lowest ℓ used in the photon-constant fit.
    #[arg(long, default_value_t = 10)]
    fit_ell_min: u32,
    /// Lattice constant for the overlay; defaults to the fitted one.
    #[arg(long)]
    lattice_c: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pair_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

struct Ctx {
    exec: Exec,
    threads: usize,
    cache: Option<Cache>,
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn scatter_svg(rows: &Table, lattice: Vec<(f64, f64)>, title: &str) -> Result<String> {
    let points = rows.rows.iter().filter(|r| r.accepted).map(|r| (r.lambda.re, r.lambda.im)).collect();
    emit_svg(&PlotData::Scatter { points, lattice }, &Style::spectrum(title))
}

/// Cached computation of (csv, json, warnings).
fn cached(ctx: &Ctx, key: String, compute: impl FnOnce() -> Result<(String, String, Vec<String>)>) -> Result<(String, String)> {
    if let Some(hit) = ctx.cache.as_ref().and_then(|c| c.get(&key)) {
        let get = |name: &str| hit.iter().find(|(n, _)| n == name).map(|(_, v)| v.clone());
        if let (Some(csv), Some(js)) = (get("csv"), get("json")) {
            return Ok((csv, js));
        }
    }
    let (csv, js, warnings) = compute()?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if let Some(c) = &ctx.cache {
        if let Err(e) = c.put(&key, &[("csv".into(), csv.clone()), ("json".into(), js.clone())]) {
            eprintln!("warning: cache write failed: {e}");
        }
    }
    Ok((csv, js))
}

/// Pairing under λ ↦ −λ̄ and Im λ < 0 for accepted nonzero entries.
fn property_check(spec: &Spectrum, pair_tol: f64) -> Result<()> {
    let unpaired = check_pairing(spec, pair_tol);
    if let Some(e) = unpaired.first() {
        return Err(Error::Property(format!(
            "{} accepted eigenvalues without a partner under lambda -> -conj(lambda), first {} (mode {})",
            unpaired.len(),
            e.lambda,
            e.mode_index
        )));
    }
    if let Some(e) = spec.accepted().find(|e| !e.zero_mode && !(e.lambda.im < 0.0)) {
        return Err(Error::Property(format!("accepted eigenvalue {} is not damped (mode {})", e.lambda, e.mode_index)));
    }
    Ok(())
}

fn finish_spectrum(csv: &str, js: &str, out: Option<&Path>, json: Option<&Path>, svg: Option<&Path>, title: &str) -> Result<()> {
    write_out(out, csv)?;
    if let Some(p) = json {
        write_out(Some(p), js)?;
    }
    let table = read_table(csv)?;
    if let Some(p) = svg {
        write_out(Some(p), &scatter_svg(&table, Vec::new(), title)?)?;
    }
    property_check(&table.to_spectrum(), 1e-6)
}

fn run_sds(ctx: &Ctx, cfg: &RunConfig, a: SdsArgs) -> Result<()> {
    let f = &cfg.sds;
    let params = SdSParams::new(pick(a.mass, f.mass, 1.0), pick(a.lambda, f.lambda, 0.04))?;
    let mut req = QnmRequest::new(params, pick(a.lmin, f.lmin, 0), pick(a.lmax, f.lmax, 20));
    req.n_low = pick(a.n, f.n, 64);
    req.n_high = pick(a.n_high, f.n_high, (3 * req.n_low).div_ceil(2));
    let k_max = pick(a.k_max, f.k_max, resonances::sds::DEFAULT_K_MAX);
    req.window = match a.gamma.or(f.gamma) {
        Some(g) => Window::strip(g),
        None => default_window(&params, k_max),
    };
    req.filter.window = req.window;
    req.filter.drift_tol = pick(a.drift_tol, f.drift_tol, req.filter.drift_tol);
    req.filter.residual_tol = pick(a.residual_tol, f.residual_tol, req.filter.residual_tol);
    if let Some(w) = a.warp.or(f.warp) {
        req.rho = RhoProfile::Analytic { warp: w };
    }
    req.validate()?;
    let canon = serde_json::to_string(&req).expect("request serializes");
    let key = format!("sds/{}/{canon}", env!("CARGO_PKG_VERSION"));
    let (csv, js) = cached(ctx, key, || {
        let res = ctx.exec.install(ctx.threads, || compute_qnm(&req, ctx.exec))?;
        let rows = spectrum_rows(&res.spectrum, DEFAULT_CLUSTER_TOL);
        let csv = write_table(&Table { kind: TableKind::Sds, rows: rows.clone() });
        let params = serde_json::to_value(&req).expect("request serializes");
        let rec = SpectrumRecord::new("sds", params, req.window, res.warnings.clone(), &rows);
        Ok((csv, rec.to_json(), res.warnings))
    })?;
    finish_spectrum(
        &csv,
        &js,
        a.out.or(f.out.clone()).as_deref(),
        a.json.or(f.json.clone()).as_deref(),
        a.svg.or(f.svg.clone()).as_deref(),
        "SdS quasinormal modes",
    )
}

fn parse_neck(s: &str) -> Result<NeckBc> {
    match s {
        "dirichlet" => Ok(NeckBc::Dirichlet),
        "neumann" => Ok(NeckBc::Neumann),
        "both" => Ok(NeckBc::Both),
        other => Err(Error::Config(format!("bc must be dirichlet, neumann or both, got {other:?}"))),
    }
}

fn run_funnel(ctx: &Ctx, cfg: &RunConfig, a: FunnelArgs) -> Result<()> {
    let f = &cfg.funnel;
    let params = FunnelParams {
        circumference: pick(a.circumference, f.circumference, 1.0),
        m_min: pick(a.m_min, f.m_min, 0),
        m_max: pick(a.m_max, f.m_max, 4),
        neck_bc: parse_neck(&pick(a.bc, f.bc.clone(), "both".into()))?,
    };
    let mut req = FunnelRequest::new(params);
    req.n_low = pick(a.n, f.n, req.n_low);
    req.n_high = pick(a.n_high, f.n_high, (3 * req.n_low).div_ceil(2));
    if let Some(g) = a.gamma.or(f.gamma) {
        req.window = Window::strip(g);
    }
    req.filter.window = req.window;
    req.filter.drift_tol = pick(a.drift_tol, f.drift_tol, req.filter.drift_tol);
    req.filter.residual_tol = pick(a.residual_tol, f.residual_tol, req.filter.residual_tol);
    req.validate()?;
    let canon = serde_json::to_string(&req).expect("request serializes");
    let key = format!("funnel/{}/{canon}", env!("CARGO_PKG_VERSION"));
    let (csv, js) = cached(ctx, key, || {
        let res = ctx.exec.install(ctx.threads, || compute_funnel_resonances(&req, ctx.exec))?;
        let rows = spectrum_rows(&res.spectrum, DEFAULT_CLUSTER_TOL);
        let csv = write_table(&Table { kind: TableKind::Funnel, rows: rows.clone() });
        let params = serde_json::to_value(req).expect("request serializes");
        let rec = SpectrumRecord::new("funnel", params, req.window, res.warnings.clone(), &rows);
        Ok((csv, rec.to_json(), res.warnings))
    })?;
    finish_spectrum(
        &csv,
        &js,
        a.out.or(f.out.clone()).as_deref(),
        a.json.or(f.json.clone()).as_deref(),
        a.svg.or(f.svg.clone()).as_deref(),
        "Funnel resonances",
    )
}

fn run_symbols(ctx: &Ctx, cfg: &RunConfig, a: SymbolsArgs) -> Result<()> {
    let f = &cfg.symbols;
    let model = match pick(a.model, f.model.clone(), "sds".into()).as_str() {
        "sds" => ModelSymbols::sds(
            SdSParams::new(pick(a.mass, f.mass, 1.0), pick(a.lambda, f.lambda, 0.04))?,
            RhoProfile::default(),
        )?,
        "funnel" => {
            let c = pick(a.circumference, f.circumference, 1.0);
            if !(c > 0.0) {
                return Err(Error::Config(format!("circumference must be positive, got {c}")));
            }
            ModelSymbols::funnel(c)
        }
        other => return Err(Error::Config(format!("model must be sds or funnel, got {other:?}"))),
    };
    let grid = SymbolGrid::default();
    let suite = check_assumptions(&model, &grid)?;
    let eps = find_epsilons(&model, &grid)?;
    let esc = EscapeConfig::new(eps.eps0, eps.eps1_inv, pick(a.tau, f.tau, 0.1));
    let rep = ctx.exec.install(ctx.threads, || ptilde_margins(&model, &esc, Complex64::new(0.0, 0.0), &grid, ctx.exec))?;
    let doc = json!({ "model": model.name, "assumptions": suite, "epsilons": eps, "ptilde": rep });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    write_out(a.out.or(f.out.clone()).as_deref(), &text)?;
    if !suite.pass() {
        return Err(Error::Property("a structural hypothesis failed on the grid".into()));
    }
    if !(rep.kappa > 0.0) {
        return Err(Error::Property("no positive kappa keeps the escape-region signs".into()));
    }
    Ok(())
}

fn read_input(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    read_table(&text)
}

fn run_count(cfg: &RunConfig, a: CountArgs) -> Result<()> {
    let f = &cfg.count;
    let table = read_input(&a.input)?;
    let rmax = pick(a.rmax, f.rmax, 12.0);
    let steps = pick(a.steps, f.steps, 48);
    if !(rmax > 0.0) || steps < 2 {
        return Err(Error::Config("need rmax > 0 and at least 2 steps".into()));
    }
    let gamma = a.gamma.or(f.gamma);
    let region = match gamma {
        Some(g) => Region::Strip { gamma: g },
        None => Region::Disk,
    };
    let trust = Window::strip(pick(a.trust_gamma, f.trust_gamma, gamma.unwrap_or(rmax)));
    let weighting = table.weighting();
    let res = table.resonances(weighting);
    let radii: Vec<f64> = (1..=steps).map(|k| rmax * k as f64 / steps as f64).collect();
    let curve = counting_curve(&res, region, &radii, &trust)?;
    let fit_min = pick(a.fit_min, f.fit_min, rmax / 8.0);
    let (fit, fit_error) = match fit_exponent(&curve, fit_min, rmax) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let note = match region {
        Region::Strip { .. } => "counts in the strip |lambda| <= r, Im lambda >= -gamma, not the full disk",
        Region::Disk => "counts in the full disk |lambda| <= r",
    };
    let doc = json!({
        "note": note,
        "input": a.input.display().to_string(),
        "region": region,
        "weighting": weighting,
        "radii": curve.radii,
        "counts": curve.counts,
        "fit_range": [fit_min, rmax],
        "fit": fit,
        "fit_error": fit_error,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("curve serializes");
    text.push('\n');
    let svg = a.svg.or(f.svg.clone());
    let json_path = a.json.or(f.json.clone()).or_else(|| svg.as_ref().map(|p| p.with_extension("json")));
    if let Some(p) = &svg {
        let plot = PlotData::Curve { radii: curve.radii.clone(), counts: curve.counts.clone() };
        write_out(Some(p), &emit_svg(&plot, &Style::counting("Counting function"))?)?;
    }
    write_out(json_path.as_deref(), &text)
}

fn run_lattice(cfg: &RunConfig, a: LatticeArgs) -> Result<()> {
    let f = &cfg.lattice;
    let signs = if a.independent_signs || f.independent_signs.unwrap_or(false) {
        SignConvention::Independent
    } else {
        SignConvention::Correlated
    };
    let lat = build_lattice(pick(a.c, f.c, 1.0), pick(a.ell_max, f.ell_max, 10), pick(a.k_max, f.k_max, 2), signs)?;
    let mut s = String::from("ell,k,sign,re_lambda,im_lambda,mult\n");
    for p in &lat.points {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.ell,
            p.k,
            p.sign,
            fmt_f64(p.lambda.re),
            fmt_f64(p.lambda.im),
            p.multiplicity
        ));
    }
    write_out(a.out.or(f.out.clone()).as_deref(), &s)?;
    if let Some(p) = a.svg.or(f.svg.clone()) {
        let lattice = lat.points.iter().map(|p| (p.lambda.re, p.lambda.im)).collect();
        let plot = PlotData::Scatter { points: Vec::new(), lattice };
        write_out(Some(&p), &emit_svg(&plot, &Style::spectrum("Pseudopole lattice"))?)?;
    }
    Ok(())
}

fn run_report(a: ReportArgs) -> Result<()> {
    let table = read_input(&a.input)?;
    let spec = table.to_spectrum();
    let weighting = match table.kind {
        TableKind::Sds => Weighting::Sds,
        TableKind::Funnel => Weighting::Unit,
    };
    let clustered = cluster_multiplicities(&spec, DEFAULT_CLUSTER_TOL, weighting);
    let mut per_mode: std::collections::BTreeMap<i64, u64> = Default::default();
    for r in &clustered.resonances {
        *per_mode.entry(r.mode_index).or_default() += r.multiplicity as u64;
    }
    let unpaired = check_pairing(&spec, a.pair_tol);
    let undamped = spec.accepted().filter(|e| !e.zero_mode && !(e.lambda.im < 0.0)).count();
    let mut doc = json!({
        "input": a.input.display().to_string(),
        "rows": table.rows.len(),
        "accepted_per_mode": per_mode,
        "resonances": clustered.resonances.len(),
        "cluster_warnings": clustered.warnings,
        "unpaired": unpaired.len(),
        "undamped": undamped,
    });
    let mut lattice_pts = Vec::new();
    if table.kind == TableKind::Sds {
        let pairs: Vec<(u32, Complex64)> = clustered
            .resonances
            .iter()
            .filter(|r| r.lambda.norm() > ZERO_MODE_TOL)
            .map(|r| (r.mode_index as u32, r.lambda))
            .collect();
        match photon_constant_fit(&pairs, a.fit_ell_min, FitModel::TwoTerm) {
            Ok(fit) => {
                let one = photon_constant_fit(&pairs, a.fit_ell_min, FitModel::OneTerm)?;
                let c = a.lattice_c.unwrap_or(fit.c);
                let ell_max = fit.ells.last().copied().unwrap_or(1);
                let lat = build_lattice(c, ell_max, 0, SignConvention::Correlated)?;
                let high: Vec<_> =
                    clustered.resonances.iter().filter(|r| r.mode_index >= a.fit_ell_min as i64).cloned().collect();
                let m = match_lattice(&high, &lat, &Window::strip(f64::INFINITY));
                lattice_pts = lat.points.iter().map(|p| (p.lambda.re, p.lambda.im)).collect();
                doc["photon_fit"] = json!(fit);
                doc["photon_fit_one_term"] = json!(one);
                doc["lattice_c"] = json!(c);
                doc["lattice_match"] = json!(m);
            }
            Err(e) => doc["photon_fit_error"] = json!(e.to_string()),
        }
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    write_out(a.out.as_deref(), &text)?;
    if let Some(p) = &a.svg {
        write_out(Some(p), &scatter_svg(&table, lattice_pts, "Spectrum")?)?;
    }
    if !unpaired.is_empty() || undamped > 0 {
        return Err(Error::Property(format!("{} unpaired and {undamped} undamped eigenvalues", unpaired.len())));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let cache = if cli.no_cache {
        None
    } else {
        Cache::from_env().or_else(|| cfg.cache_dir.clone().map(Cache::new))
    };
    let ctx = Ctx {
        exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel },
        threads: pick(cli.threads, cfg.threads, 0),
        cache,
    };
    match cli.cmd {
        Cmd::Sds(a) => run_sds(&ctx, &cfg, a),
        Cmd::Funnel(a) => run_funnel(&ctx, &cfg, a),
        Cmd::Symbols(a) => run_symbols(&ctx, &cfg, a),
        Cmd::Count(a) => run_count(&cfg, a),
        Cmd::Lattice(a) => run_lattice(&cfg, a),
        Cmd::Report(a) => run_report(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
