//! Scripted studies driven by a TOML config.
//!
//! ```toml
//! kind = "gap-decay"           # or "basis-demo"
//! potential = "preset:xt 1"    # any potential spec, or "random"
//! bc = "per-"                  # optional for gap-decay (both by default)
//! K = 48                       # optional Galerkin truncation
//! n_range = [6, 20]
//! weight = "abel 0.5"          # sobolev a | gevrey b gamma | abel A | table 0:1 1:2 ...
//! output_csv = "gaps.csv"      # relative to the config file
//! output_json = "gaps.json"
//!
//! [random]                     # only with potential = "random"
//! seed = 7
//! modes = 4
//! amplitude = 0.1
//! t = -1.0                     # optional: q(k) = t·conj(p(-k))
//! ```
//!
//! Outputs depend only on the config, so re-running reproduces them byte for byte.

use std::path::{Path, PathBuf};

use dirac_core::basic_equation::{BasicRoots, SolveOptions};
use dirac_core::galerkin::{Localization, SpectralTriple};
use dirac_core::monodromy::ROOT_TOL;
use dirac_core::potentials::{classify_symmetry, SymmetryClass, Weight, SYMMETRY_TOL};
use dirac_core::riesz::{classify, ClassificationReport, ClassifyOptions, Verdict};
use dirac_core::{BoundaryCondition, Error, FourierPotential, LogComplex, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::{self, num, opt, Table};
use crate::pipeline::{self, CROSS_TOL, GAP_TOL};
use crate::potential_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    GapDecay,
    BasisDemo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPotential {
    pub seed: u64,
    /// Half-modes `1 ≤ |m| ≤ modes` receive coefficients on `e^{2imx}`.
    pub modes: i64,
    pub amplitude: f64,
    #[serde(default)]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub potential: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomPotential>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc: Option<BoundaryCondition>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    pub n_range: [i64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_json: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
        toml::from_str(&text).map_err(|e| CliError::Config { path: path.display().to_string(), msg: e.to_string() })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is plain data")
    }

    pub fn build_potential(&self, base: &Path) -> Result<FourierPotential, CliError> {
        if self.potential.trim() != "random" {
            return Ok(potential_file::resolve_str(&self.potential, base)?);
        }
        let r = self.random.as_ref().ok_or_else(|| CliError::Usage("potential = \"random\" needs a [random] table".into()))?;
        Ok(random_potential(r)?)
    }

    fn range(&self) -> Result<(i64, i64), CliError> {
        let [lo, hi] = self.n_range;
        if lo < 1 || hi < lo {
            return Err(CliError::Usage(format!("n_range {:?} must satisfy 1 <= lo <= hi", self.n_range)));
        }
        Ok((lo, hi))
    }
}

pub fn random_potential(r: &RandomPotential) -> Result<FourierPotential, Error> {
    if r.modes < 1 || !(r.amplitude > 0.0) {
        return Err(Error::InvalidArgument("random potential needs modes >= 1 and amplitude > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    let draw = |rng: &mut ChaCha8Rng| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * r.amplitude;
    let mut p = Vec::new();
    let mut q = Vec::new();
    for m in (-r.modes..=r.modes).filter(|&m| m != 0) {
        p.push((2 * m, draw(&mut rng)));
        q.push((2 * m, draw(&mut rng)));
    }
    match r.t {
        Some(t) if t != 0.0 => FourierPotential::with_conjugate_partner(&p, t),
        Some(_) => Err(Error::InvalidArgument("t must be nonzero")),
        None => FourierPotential::from_coeffs(&p, &q),
    }
}

/// `sobolev a`, `gevrey b gamma`, `abel A` or `table k:w k:w ...`.
pub fn parse_weight(spec: &str) -> Result<Weight, CliError> {
    let bad = |msg: &str| CliError::Usage(format!("weight {spec:?}: {msg}"));
    let mut it = spec.split_whitespace();
    let kind = it.next().ok_or_else(|| bad("empty"))?;
    let rest: Vec<&str> = it.collect();
    let nums = |n: usize| -> Result<Vec<f64>, CliError> {
        if rest.len() != n {
            return Err(bad(&format!("{kind} takes {n} parameter(s)")));
        }
        rest.iter().map(|t| t.parse::<f64>().map_err(|_| bad("expected a number"))).collect()
    };
    Ok(match kind {
        "sobolev" => Weight::sobolev(nums(1)?[0]),
        "gevrey" => {
            let v = nums(2)?;
            Weight::gevrey(v[0], v[1])?
        }
        "abel" => Weight::abel(nums(1)?[0])?,
        "table" => {
            let mut entries = Vec::new();
            for t in &rest {
                let (k, w) = t.split_once(':').ok_or_else(|| bad("table entries look like k:w"))?;
                let k = k.parse::<u64>().map_err(|_| bad("bad table index"))?;
                let w = w.parse::<f64>().map_err(|_| bad("bad table value"))?;
                entries.push((k, w));
            }
            Weight::table(&entries)?
        }
        _ => return Err(bad("unknown kind (sobolev, gevrey, abel, table)")),
    })
}

/// `ln Ω(k)` without forming `Ω`, which overflows for exponential weights.
fn ln_omega(w: &Weight, k: i64) -> Result<f64, Error> {
    let x = k.unsigned_abs() as f64;
    Ok(match w {
        Weight::Sobolev { a } if k != 0 => a * x.ln(),
        Weight::Gevrey { b, gamma } => b * x.powf(*gamma),
        Weight::Abel { a } => a * x,
        _ => w.omega(k)?.ln(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares line through `(x, y)`.
pub fn fit_line(pts: &[(f64, f64)]) -> Option<Fit> {
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(Fit { slope, intercept: my - slope * mx, r_squared, points: pts.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub n: i64,
    pub bc: BoundaryCondition,
    /// `galerkin`, or `basic-equation` for pairs the eigensolver cannot split.
    pub source: &'static str,
    pub ln_gamma: f64,
    pub gamma_galerkin: f64,
    pub gap_basic: LogComplex,
    pub gap_difference: Option<f64>,
    pub ln_omega: f64,
    /// `Σ γ_m² Ω(m)²` over rows up to and including this one, ordered by `|m|`.
    pub partial_sum: f64,
    pub check_passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapStudy {
    pub config: ExperimentConfig,
    pub symmetry: SymmetryClass,
    /// `ln γ_n` against `ln |n|`; the slope is a power-law exponent.
    pub power_fit: Option<Fit>,
    /// `ln γ_n` against `|n|`; the slope is an exponential rate.
    pub exponential_fit: Option<Fit>,
    /// `exponential` when it explains the data better, i.e. super-polynomial decay.
    pub better_fit: Option<&'static str>,
    pub partial_sum: f64,
    /// Share of the final partial sum contributed by the upper half of the range.
    pub tail_share: f64,
    pub stabilized: bool,
    pub checks_passed: bool,
    pub rows: Vec<GapRow>,
}

/// The upper half of the range may contribute at most this share of the sum.
pub const STABLE_TAIL_SHARE: f64 = 1e-3;

fn bcs(cfg: &ExperimentConfig) -> Result<Vec<BoundaryCondition>, Error> {
    match cfg.bc {
        Some(bc) => Ok(vec![pipeline::periodic_bc(bc)?]),
        None => Ok(vec![BoundaryCondition::PerPlus, BoundaryCondition::PerMinus]),
    }
}

struct PairData {
    triples: Vec<SpectralTriple>,
    roots: Vec<BasicRoots>,
}

fn pairs(v: &FourierPotential, bc: BoundaryCondition, k: Option<i64>, lo: i64, hi: i64) -> Result<PairData, Error> {
    let loc: Localization = pipeline::galerkin_localization(v, bc, k, hi)?;
    let ns = pipeline::signed_range(lo, hi, bc);
    let triples = ns.iter().map(|&n| loc.triple(n).cloned()).collect::<Result<Vec<_>, _>>()?;
    let roots = pipeline::basic_roots(v, &ns, &SolveOptions::default())?;
    Ok(PairData { triples, roots })
}

pub fn gap_decay_study(cfg: &ExperimentConfig, base: &Path) -> Result<GapStudy, CliError> {
    let v = cfg.build_potential(base)?;
    let (lo, hi) = cfg.range()?;
    let weight = parse_weight(cfg.weight.as_deref().unwrap_or("sobolev 0"))?;
    let mut rows = Vec::new();
    for bc in bcs(cfg)? {
        let data = pairs(&v, bc, cfg.k, lo, hi)?;
        for (t, r) in data.triples.iter().zip(&data.roots) {
            let (gap, source) = if t.is_double() { (r.gap, "basic-equation") } else { (LogComplex::from(C64::new(t.gamma, 0.0)), "galerkin") };
            let diff = pipeline::gap_difference(r, t);
            let check_passed = pipeline::basic_distance(r, t) <= CROSS_TOL && diff.is_none_or(|d| d <= GAP_TOL);
            rows.push(GapRow {
                n: t.n,
                bc,
                source,
                ln_gamma: gap.log_magnitude,
                gamma_galerkin: t.gamma,
                gap_basic: r.gap,
                gap_difference: diff,
                ln_omega: ln_omega(&weight, t.n)?,
                partial_sum: 0.0,
                check_passed,
            });
        }
    }
    if rows.len() < 3 {
        return Err(CliError::Usage(format!("n_range {:?} leaves fewer than three gaps", cfg.n_range)));
    }
    rows.sort_by_key(|r| (r.n.abs(), r.n));
    let mut s = 0.0;
    let mut lower_half = 0.0;
    for r in &mut rows {
        s += (2.0 * (r.ln_gamma + r.ln_omega)).exp();
        r.partial_sum = s;
        if 2 * r.n.abs() <= lo + hi {
            lower_half = s;
        }
    }
    let tail_share = if s == 0.0 { 0.0 } else { (s - lower_half) / s };
    let finite: Vec<&GapRow> = rows.iter().filter(|r| r.ln_gamma.is_finite()).collect();
    let power_fit = fit_line(&finite.iter().map(|r| ((r.n.abs() as f64).ln(), r.ln_gamma)).collect::<Vec<_>>());
    let exponential_fit = fit_line(&finite.iter().map(|r| (r.n.abs() as f64, r.ln_gamma)).collect::<Vec<_>>());
    let better_fit = match (&power_fit, &exponential_fit) {
        (Some(p), Some(e)) => Some(if e.r_squared > p.r_squared { "exponential" } else { "power" }),
        _ => None,
    };
    Ok(GapStudy {
        config: cfg.clone(),
        symmetry: classify_symmetry(&v, SYMMETRY_TOL),
        power_fit,
        exponential_fit,
        better_fit,
        partial_sum: s,
        tail_share,
        stabilized: s.is_finite() && tail_share <= STABLE_TAIL_SHARE,
        checks_passed: rows.iter().all(|r| r.check_passed),
        rows,
    })
}

impl GapStudy {
    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "gap-decay/1",
            &["n", "bc", "source", "ln_gamma", "gamma_galerkin", "ln_gap_basic", "gap_difference", "ln_omega", "partial_sum", "check"],
        );
        let fit = |f: &Option<Fit>| f.as_ref().map_or("none".to_string(), |f| format!("slope {} r2 {}", num(f.slope), num(f.r_squared)));
        t.note("power_fit", fit(&self.power_fit));
        t.note("exponential_fit", fit(&self.exponential_fit));
        t.note("stabilized", self.stabilized);
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                r.bc.label().into(),
                r.source.into(),
                num(r.ln_gamma),
                num(r.gamma_galerkin),
                output::ln_abs(&r.gap_basic),
                opt(r.gap_difference),
                num(r.ln_omega),
                num(r.partial_sum),
                if r.check_passed { "pass" } else { "fail" }.into(),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossRow {
    pub n: i64,
    pub galerkin: (C64, C64),
    pub monodromy: (C64, C64),
    pub basic_equation: (C64, C64),
    pub monodromy_distance: f64,
    pub basic_distance: f64,
    pub gap_difference: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisBundle {
    pub config: ExperimentConfig,
    pub symmetry: SymmetryClass,
    pub cross_checks: Vec<CrossRow>,
    pub checks_passed: bool,
    /// Present only when every cross-check passed.
    pub verdict: Option<Verdict>,
    pub report: ClassificationReport,
}

pub fn basis_demo(cfg: &ExperimentConfig, base: &Path) -> Result<BasisBundle, CliError> {
    let v = cfg.build_potential(base)?;
    let (lo, hi) = cfg.range()?;
    let bc = cfg.bc.ok_or_else(|| CliError::Usage("basis-demo needs bc = \"per+\" or \"per-\"".into()))?;
    let bc = pipeline::periodic_bc(bc)?;
    let data = pairs(&v, bc, cfg.k, lo, hi)?;
    let ns: Vec<i64> = data.triples.iter().map(|t| t.n).collect();
    let mono = pipeline::monodromy_triples(&v, bc, &ns, ROOT_TOL)?;
    let mut cross_checks = Vec::with_capacity(ns.len());
    for ((t, r), m) in data.triples.iter().zip(&data.roots).zip(&mono) {
        let monodromy_distance = pipeline::pair_distance((t.lambda_minus, t.lambda_plus), (m.lambda_minus, m.lambda_plus));
        let basic_distance = pipeline::basic_distance(r, t);
        let gap_difference = pipeline::gap_difference(r, t);
        let n = t.n as f64;
        cross_checks.push(CrossRow {
            n: t.n,
            galerkin: (t.lambda_minus, t.lambda_plus),
            monodromy: (m.lambda_minus, m.lambda_plus),
            basic_equation: (r.z1 + n, r.z2 + n),
            monodromy_distance,
            basic_distance,
            gap_difference,
            passed: monodromy_distance <= CROSS_TOL && basic_distance <= CROSS_TOL && gap_difference.is_none_or(|d| d <= GAP_TOL),
        });
    }
    let report = classify(&v, bc, (lo, hi), &ClassifyOptions::default())?;
    let checks_passed = cross_checks.iter().all(|c| c.passed);
    Ok(BasisBundle {
        config: cfg.clone(),
        symmetry: classify_symmetry(&v, SYMMETRY_TOL),
        cross_checks,
        checks_passed,
        verdict: checks_passed.then_some(report.verdict),
        report,
    })
}

impl BasisBundle {
    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "basis-demo/1",
            &[
                "n",
                "re_galerkin_minus",
                "im_galerkin_minus",
                "re_galerkin_plus",
                "im_galerkin_plus",
                "monodromy_distance",
                "basic_distance",
                "gap_difference",
                "check",
            ],
        );
        t.note("verdict", self.verdict.map_or("withheld", |v| v.label()));
        t.note("kappa", num(self.report.kappa));
        for c in &self.cross_checks {
            t.push(vec![
                c.n.to_string(),
                num(c.galerkin.0.re),
                num(c.galerkin.0.im),
                num(c.galerkin.1.re),
                num(c.galerkin.1.im),
                num(c.monodromy_distance),
                num(c.basic_distance),
                opt(c.gap_difference),
                if c.passed { "pass" } else { "fail" }.into(),
            ]);
        }
        t
    }
}

/// Rendered outputs of one run plus the overall cross-check status.
pub struct Outcome {
    pub csv: String,
    pub json: String,
    pub passed: bool,
}

/// Runs the experiment described by the config file and writes its outputs.
pub fn run(config_path: &Path) -> Result<Outcome, CliError> {
    let cfg = ExperimentConfig::load(config_path)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let outcome = match cfg.kind {
        ExperimentKind::GapDecay => {
            let s = gap_decay_study(&cfg, base)?;
            Outcome { csv: s.table().render(), json: output::json("gap-decay/1", &s), passed: s.checks_passed }
        }
        ExperimentKind::BasisDemo => {
            let b = basis_demo(&cfg, base)?;
            Outcome { csv: b.table().render(), json: output::json("basis-demo/1", &b), passed: b.checks_passed }
        }
    };
    for (path, body) in [(&cfg.output_csv, &outcome.csv), (&cfg.output_json, &outcome.json)] {
        if let Some(p) = path {
            let p = base.join(p);
            let write = |p: &Path| {
                if let Some(dir) = p.parent() {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(p, body)
            };
            write(&p).map_err(|source| CliError::Write { path: p.display().to_string(), source })?;
        }
    }
    Ok(outcome)
}
