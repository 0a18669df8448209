//! Argument definitions and subcommand handlers.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_core::asymptotics::{centres_from_spectra, compare_asymptotics, phi_map};
use dirac_core::basic_equation::SolveOptions;
use dirac_core::coefficients::{eval_s, Series};
use dirac_core::galerkin::SpectralTriple;
use dirac_core::monodromy::ROOT_TOL;
use dirac_core::riesz::{classify, ClassifyOptions};
use dirac_core::{BoundaryCondition, FourierPotential, C64};
use serde::Serialize;

use crate::error::CliError;
use crate::experiments;
use crate::output::{self, ln_abs, num, opt, re_im, Format, Table};
use crate::pipeline;
use crate::potential_file;

#[derive(Debug, Parser)]
#[command(name = "dirac", version, about = "Spectra, gap asymptotics and Riesz-basis diagnostics for periodic Dirac operators")]
pub struct Cli {
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalue pairs, Dirichlet eigenvalues, gaps and deviations near each n.
    Spectrum(SpectrumArgs),
    /// Coefficient series α_n(z), β_n^±(z) with the per-order breakdown.
    Coeffs(CoeffsArgs),
    /// Roots of the basic equation near each n, compared with Galerkin.
    BasicEq(BasicEqArgs),
    /// Riesz-basis classification with per-n projection and overlap evidence.
    Riesz(RieszArgs),
    /// Computed β_n^±(0) against the closed forms for the two-mode example.
    Asymptotics(AsymptoticsArgs),
    /// The maps Φ_N and A_N built from the centres z_n^*.
    Maps(MapsArgs),
    /// Scripted studies.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExperimentAction {
    /// Runs the study described by a TOML config.
    Run { config: PathBuf },
}

/// Either a file of `P k re im` / `Q k re im` lines or a preset
/// (`preset:zero`, `preset:example-c15 a b A B`, `preset:xt t [amp ratio modes]`).
#[derive(Debug, Args)]
pub struct PotentialArg {
    #[arg(value_name = "POTENTIAL", num_args = 1.., allow_negative_numbers = true, required_unless_present = "potential")]
    pub spec: Vec<String>,
    /// Potential spec as a single string, e.g. "preset:xt 1".
    #[arg(long, conflicts_with = "spec")]
    pub potential: Option<String>,
}

impl PotentialArg {
    pub fn load(&self) -> Result<FourierPotential, CliError> {
        let here = Path::new("");
        Ok(match &self.potential {
            Some(s) => potential_file::resolve_str(s, here)?,
            None => potential_file::resolve(&self.spec, here)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Galerkin,
    Monodromy,
}

fn bc_parser(s: &str) -> Result<BoundaryCondition, String> {
    s.parse().map_err(|e: dirac_core::Error| e.to_string())
}

fn complex_parser(s: &str) -> Result<C64, String> {
    potential_file::parse_complex(s).ok_or_else(|| format!("expected re or re,im, got {s:?}"))
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_parser = bc_parser, default_value = "per+")]
    pub bc: BoundaryCondition,
    /// Galerkin truncation; sized from --nmax and the potential when omitted.
    #[arg(long = "K", value_name = "K")]
    pub k: Option<i64>,
    /// Largest `|n|` reported.
    #[arg(long, default_value_t = 10)]
    pub nmax: i64,
    #[arg(long, value_enum, default_value_t = Method::Galerkin)]
    pub method: Method,
    /// Integrator and root tolerance for the monodromy method.
    #[arg(long, default_value_t = ROOT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub potential: PotentialArg,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    /// Index of the disc around `n`.
    #[arg(long, allow_negative_numbers = true)]
    pub n: i64,
    /// Point in the disc `|z| ≤ 1/2`, as `re` or `re,im`.
    #[arg(long, value_parser = complex_parser, default_value = "0", allow_negative_numbers = true)]
    pub z: C64,
    /// Highest order kept in the series; chosen from `n` when omitted.
    #[arg(long)]
    pub nu_max: Option<usize>,
    /// Intermediate indices run over `|j| ≤ |n| + 2·window_buf`.
    #[arg(long)]
    pub window_buf: Option<i64>,
    #[command(flatten)]
    pub potential: PotentialArg,
}

#[derive(Debug, Args)]
pub struct BasicEqArgs {
    /// Indices `a:b`, inclusive.
    #[arg(long, default_value = "5:15", allow_hyphen_values = true)]
    pub n_range: String,
    /// Fixed-point stopping tolerance.
    #[arg(long, default_value_t = SolveOptions::default().tol)]
    pub tol: f64,
    #[command(flatten)]
    pub potential: PotentialArg,
}

#[derive(Debug, Args)]
pub struct RieszArgs {
    #[arg(long, value_parser = bc_parser, default_value = "per-")]
    pub bc: BoundaryCondition,
    /// `|n|` range `a:b` with `a ≥ 1`; both signs are used.
    #[arg(long, default_value = "5:25")]
    pub n_range: String,
    /// Skip sampling β^± over the disc (faster, drops one piece of evidence).
    #[arg(long)]
    pub skip_grid: bool,
    #[command(flatten)]
    pub potential: PotentialArg,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    /// Odd indices are taken from this range.
    #[arg(long, default_value = "5:25")]
    pub n_range: String,
    #[command(flatten)]
    pub potential: PotentialArg,
}

#[derive(Debug, Args)]
pub struct MapsArgs {
    /// Only centres with `N < |n|` are used.
    #[arg(long)]
    pub n_cut: i64,
    /// Largest `|n|` whose centre enters the maps.
    #[arg(long)]
    pub nmax: i64,
    /// Print `A_N(v)` in the potential file format instead of a table.
    #[arg(long)]
    pub emit_potential: bool,
    #[command(flatten)]
    pub potential: PotentialArg,
}

/// Rendered result plus whether every built-in cross-check passed.
pub struct Rendered {
    pub body: String,
    pub passed: bool,
}

fn ok(body: String) -> Result<Rendered, CliError> {
    Ok(Rendered { body, passed: true })
}

fn range(s: &str) -> Result<(i64, i64), CliError> {
    pipeline::parse_range(s).map_err(CliError::Usage)
}

pub fn run(cli: &Cli) -> Result<Rendered, CliError> {
    let pick = |default| match (cli.json, cli.csv) {
        (true, _) => Format::Json,
        (_, true) => Format::Csv,
        _ => default,
    };
    match &cli.command {
        Command::Spectrum(a) => spectrum(a, pick(Format::Csv)),
        Command::Coeffs(a) => coeffs(a, pick(Format::Json)),
        Command::BasicEq(a) => basic_eq(a, pick(Format::Csv)),
        Command::Riesz(a) => riesz(a, pick(Format::Json)),
        Command::Asymptotics(a) => asymptotics(a, pick(Format::Csv)),
        Command::Maps(a) => maps(a, pick(Format::Csv)),
        Command::Experiment { action: ExperimentAction::Run { config } } => {
            let o = experiments::run(config)?;
            let body = if pick(Format::Json) == Format::Json { o.json } else { o.csv };
            Ok(Rendered { body, passed: o.passed })
        }
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    n: i64,
    lambda_minus: Option<C64>,
    lambda_plus: Option<C64>,
    mu: Option<C64>,
    gamma: Option<f64>,
    delta: Option<f64>,
    z_star: Option<C64>,
}

impl SpectrumRow {
    fn from_triple(t: &SpectralTriple) -> Self {
        Self {
            n: t.n,
            lambda_minus: Some(t.lambda_minus),
            lambda_plus: Some(t.lambda_plus),
            mu: t.mu,
            gamma: Some(t.gamma),
            delta: t.delta,
            z_star: Some(t.z_star),
        }
    }

    fn dirichlet(n: i64, mu: Option<C64>) -> Self {
        Self { n, lambda_minus: None, lambda_plus: None, mu, gamma: None, delta: None, z_star: None }
    }
}

#[derive(Serialize)]
struct SpectrumReport {
    bc: BoundaryCondition,
    method: &'static str,
    truncation: Option<i64>,
    /// Largest `|n|` whose disc is irregular; pairs start above it.
    n_low: Option<i64>,
    rows: Vec<SpectrumRow>,
}

fn spectrum(a: &SpectrumArgs, fmt: Format) -> Result<Rendered, CliError> {
    if a.nmax < 0 {
        return Err(CliError::Usage("--nmax must be nonnegative".into()));
    }
    let v = a.potential.load()?;
    let ns: Vec<i64> = (-a.nmax..=a.nmax).filter(|&n| a.bc.admits(n)).collect();
    let report = match (a.method, a.bc) {
        (Method::Galerkin, BoundaryCondition::Dirichlet) => {
            let k = pipeline::dirichlet_truncation(&v, a.k, a.nmax);
            if k < a.nmax + v.support_bound() {
                return Err(CliError::Usage(format!("--K {k} is too small for --nmax {}", a.nmax)));
            }
            let mu = pipeline::galerkin_dirichlet(&v, k, &ns)?;
            let rows = mu.into_iter().map(|(n, m)| SpectrumRow::dirichlet(n, m)).collect();
            SpectrumReport { bc: a.bc, method: "galerkin", truncation: Some(k), n_low: None, rows }
        }
        (Method::Galerkin, bc) => {
            let loc = pipeline::galerkin_localization(&v, bc, a.k, a.nmax)?;
            let kd = pipeline::dirichlet_truncation(&v, None, a.nmax);
            let paired: Vec<i64> = loc.triples.iter().map(|t| t.n).collect();
            let mu = pipeline::galerkin_dirichlet(&v, kd, &paired)?;
            let rows = loc
                .triples
                .iter()
                .zip(mu)
                .map(|(t, (_, m))| SpectrumRow::from_triple(&m.map_or_else(|| t.clone(), |m| t.clone().with_mu(m))))
                .collect();
            let k = a.k.unwrap_or_else(|| dirac_core::galerkin::truncation_for(&v, a.nmax));
            SpectrumReport { bc, method: "galerkin", truncation: Some(k), n_low: Some(loc.n_low), rows }
        }
        (Method::Monodromy, BoundaryCondition::Dirichlet) => {
            let rows = pipeline::monodromy_dirichlet(&v, &ns, a.tol)?.into_iter().map(|(n, m)| SpectrumRow::dirichlet(n, Some(m))).collect();
            SpectrumReport { bc: a.bc, method: "monodromy", truncation: None, n_low: None, rows }
        }
        (Method::Monodromy, bc) => {
            let rows = pipeline::monodromy_triples(&v, bc, &ns, a.tol)?.iter().map(SpectrumRow::from_triple).collect();
            SpectrumReport { bc, method: "monodromy", truncation: None, n_low: None, rows }
        }
    };
    if fmt == Format::Json {
        return ok(output::json("spectrum/1", &report));
    }
    let mut t = Table::new(
        "spectrum/1",
        &["n", "re_lambda_minus", "im_lambda_minus", "re_lambda_plus", "im_lambda_plus", "re_mu", "im_mu", "gamma", "delta", "re_z_star", "im_z_star"],
    );
    t.note("bc", report.bc);
    t.note("method", report.method);
    for r in &report.rows {
        let mut row = vec![r.n.to_string()];
        row.extend(re_im(r.lambda_minus));
        row.extend(re_im(r.lambda_plus));
        row.extend(re_im(r.mu));
        row.push(opt(r.gamma));
        row.push(opt(r.delta));
        row.extend(re_im(r.z_star));
        t.push(row);
    }
    ok(t.render())
}

fn coeffs(a: &CoeffsArgs, fmt: Format) -> Result<Rendered, CliError> {
    let v = a.potential.load()?;
    let cv = eval_s(&v, a.n, a.z, a.nu_max, a.window_buf)?;
    if fmt == Format::Json {
        return ok(output::json("coeffs/1", &cv));
    }
    let mut t = Table::new(
        "coeffs/1",
        &["nu", "ln_abs_s11", "arg_s11", "ln_abs_s22", "arg_s22", "ln_abs_s21", "arg_s21", "ln_abs_s12", "arg_s12"],
    );
    t.note("n", cv.n);
    t.note("z", format!("{},{}", num(cv.z.re), num(cv.z.im)));
    t.note("converged", cv.converged);
    let mut push = |label: String, s: [&dirac_core::LogComplex; 4]| {
        let mut row = vec![label];
        for x in s {
            row.push(ln_abs(x));
            row.push(num(x.arg()));
        }
        t.push(row);
    };
    for o in &cv.orders {
        push(o.nu.to_string(), [&o.s11, &o.s22, &o.s21, &o.s12]);
    }
    push("total".into(), [&cv.alpha, &cv.s22, &cv.beta_plus, &cv.beta_minus]);
    ok(t.render())
}

#[derive(Serialize)]
struct BasicEqRow {
    roots: dirac_core::basic_equation::BasicRoots,
    gamma_galerkin: Option<f64>,
    set_distance: Option<f64>,
    gap_difference: Option<f64>,
}

fn basic_eq(a: &BasicEqArgs, fmt: Format) -> Result<Rendered, CliError> {
    let (lo, hi) = range(&a.n_range)?;
    let v = a.potential.load()?;
    let ns: Vec<i64> = (lo..=hi).filter(|&n| n != 0).collect();
    let opts = SolveOptions { tol: a.tol, ..SolveOptions::default() };
    let roots = pipeline::basic_roots(&v, &ns, &opts)?;
    let nmax = lo.abs().max(hi.abs());
    let locs = [BoundaryCondition::PerPlus, BoundaryCondition::PerMinus]
        .map(|bc| pipeline::galerkin_localization(&v, bc, None, nmax));
    let mut rows = Vec::with_capacity(ns.len());
    for r in roots {
        let loc = &locs[usize::from(r.n.rem_euclid(2) == 1)];
        let triple = loc.as_ref().ok().and_then(|l| l.triple(r.n).ok());
        rows.push(BasicEqRow {
            gamma_galerkin: triple.map(|t| t.gamma),
            set_distance: triple.map(|t| pipeline::basic_distance(&r, t)),
            gap_difference: triple.and_then(|t| pipeline::gap_difference(&r, t)),
            roots: r,
        });
    }
    if fmt == Format::Json {
        return ok(output::json("basic-eq/1", &rows));
    }
    let mut t = Table::new(
        "basic-eq/1",
        &[
            "n", "re_z1", "im_z1", "re_z2", "im_z2", "residual_1", "residual_2", "method_1", "method_2", "ln_gap", "gamma_galerkin",
            "set_distance", "gap_difference",
        ],
    );
    let label = |m| serde_json::to_value(m).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    for row in &rows {
        let r = &row.roots;
        let mut out = vec![r.n.to_string()];
        out.extend(re_im(Some(r.z1)));
        out.extend(re_im(Some(r.z2)));
        out.push(num(r.residuals[0]));
        out.push(num(r.residuals[1]));
        out.push(label(r.method[0]));
        out.push(label(r.method[1]));
        out.push(ln_abs(&r.gap));
        out.push(opt(row.gamma_galerkin));
        out.push(opt(row.set_distance));
        out.push(opt(row.gap_difference));
        t.push(out);
    }
    ok(t.render())
}

fn riesz(a: &RieszArgs, fmt: Format) -> Result<Rendered, CliError> {
    let n_range = range(&a.n_range)?;
    let v = a.potential.load()?;
    let opts = ClassifyOptions { skip_grid: a.skip_grid, ..ClassifyOptions::default() };
    let report = classify(&v, a.bc, n_range, &opts)?;
    if fmt == Format::Json {
        return ok(output::json("riesz/1", &report));
    }
    let mut t = Table::new("riesz/1", &["n", "gamma", "source", "overlap", "pi_n", "discrepancy", "defective"]);
    t.note("verdict", report.verdict.label());
    t.note("kappa", num(report.kappa));
    t.note("reason", &report.reason);
    for o in &report.overlaps {
        let source = serde_json::to_value(o.source).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        t.push(vec![o.n.to_string(), num(o.gamma), source, num(o.overlap), opt(o.pi_n), opt(o.discrepancy), o.defective.to_string()]);
    }
    ok(t.render())
}

/// `(a, b, A, B)` of a potential supported on the modes `±2` only.
fn two_mode_params(v: &FourierPotential) -> Result<[C64; 4], CliError> {
    let p = [v.p(2), v.p(-2), v.q(2), v.q(-2)];
    let extra = v.p_entries().chain(v.q_entries()).any(|(k, _)| k.abs() != 2);
    if extra {
        return Err(CliError::Usage("asymptotics needs a potential on the modes ±2 only (preset:example-c15)".into()));
    }
    Ok(p)
}

#[allow(non_snake_case)]
fn asymptotics(a: &AsymptoticsArgs, fmt: Format) -> Result<Rendered, CliError> {
    let (lo, hi) = range(&a.n_range)?;
    let v = a.potential.load()?;
    let [pa, pb, qA, qB] = two_mode_params(&v)?;
    let ns: Vec<i64> = (lo..=hi).filter(|n| n.rem_euclid(2) == 1).collect();
    let table = compare_asymptotics(pa, pb, qA, qB, &ns)?;
    if fmt == Format::Json {
        return ok(output::json("asymptotics/1", &table));
    }
    let mut t = Table::new(
        "asymptotics/1",
        &[
            "n",
            "ln_abs_computed_plus",
            "ln_abs_closed_plus",
            "ln_abs_computed_minus",
            "ln_abs_closed_minus",
            "abs_ratio_plus",
            "abs_ratio_minus",
            "deviation",
        ],
    );
    t.note("envelope_exponent", opt(table.envelope_exponent));
    t.note("envelope_decreasing", table.envelope_decreasing);
    for r in &table.rows {
        t.push(vec![
            r.n.to_string(),
            ln_abs(&r.computed_plus),
            ln_abs(&r.closed_plus),
            ln_abs(&r.computed_minus),
            ln_abs(&r.closed_minus),
            num(r.ratio_plus.abs()),
            num(r.ratio_minus.abs()),
            num(r.deviation),
        ]);
    }
    ok(t.render())
}

fn maps(a: &MapsArgs, fmt: Format) -> Result<Rendered, CliError> {
    let v = a.potential.load()?;
    let centres = centres_from_spectra(&v, a.n_cut, a.nmax)?;
    let m = phi_map(&v, a.n_cut, a.nmax, &Series::new(&v), &centres)?;
    if a.emit_potential {
        return ok(potential_file::to_text(&m.a_of_v));
    }
    if fmt == Format::Json {
        return ok(output::json("maps/1", &m));
    }
    let mut t = Table::new("maps/1", &["component", "k", "re_phi", "im_phi", "re_a", "im_a"]);
    t.note("n_cut", m.n_cut);
    t.note("nmax", m.nmax);
    let mut keys: Vec<(&str, i64)> = Vec::new();
    for (tag, it) in [("P", m.phi.p_entries().chain(m.a_of_v.p_entries()).collect::<Vec<_>>()), ("Q", m.phi.q_entries().chain(m.a_of_v.q_entries()).collect())] {
        let mut ks: Vec<i64> = it.into_iter().map(|(k, _)| k).collect();
        ks.sort_unstable();
        ks.dedup();
        keys.extend(ks.into_iter().map(|k| (tag, k)));
    }
    for (tag, k) in keys {
        let (phi, av) = if tag == "P" { (m.phi.p(k), m.a_of_v.p(k)) } else { (m.phi.q(k), m.a_of_v.q(k)) };
        let mut row = vec![tag.to_string(), k.to_string()];
        row.extend(re_im(Some(phi)));
        row.extend(re_im(Some(av)));
        t.push(row);
    }
    ok(t.render())
}
