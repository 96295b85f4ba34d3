//! Registered verification checks and the suite runner.
//!
//! Every check is a pure function of the configuration. Ids have the form
//! `group.name`; a selection entry may name a single id, a whole group, or
//! `all`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::config::{Config, ModeConfig};
use super::norms::{
    l2_norm_squared, l2_norm_squared_4d, l2_norm_squared_radial, lp_divergence_probe, AngularRule, FieldRef,
    LpVerdict,
};
use super::oracle::{dirac_radial_oracle, rs_radial_oracle};
use super::quadrature::{integrate_radial, QuadratureSpec};
use super::report::{ResidualStatistics, SuiteReport, ToleranceKind, VerificationReport};
use super::scan::{residual_scan, Grid};
use crate::clifford::{dirac_apply, dirac_matrix_form, parallel_residual, SpinorField};
use crate::error::{LabError, Result};
use crate::geometry::{
    checks, complex_structure_residual, curvature, q_factor, ricci_from_riemann, scalar_curvature_exact, total_mass, CoordPoint,
    MetricParams, Profile,
};
use crate::jet::C64;
use crate::rs_bundle::{divergence, rs_apply, SpinorOneFormField};
use crate::solutions::{
    assemble_dirac_mode, assemble_rs_mode, dirac_angular, dirac_radial, harmonic_spinor, parallel_spinor, rs_angular,
    rs_field, rs_radial, DiracAngularCase, DiracModeParams, DiracRadialCase, HarmonicKind, RadialProfile,
    RsModeParams, RsRadialCase, RsRadialProfile,
};
use crate::specfun::{branch_sqrt, gauss_2f1, kummer_1f1, kummer_derivative, kummer_second_derivative, BranchInput, KummerParams};

pub const GROUPS: [&str; 6] = ["geometry", "dirac", "rs", "norms", "separation", "specfun"];

const SEED: u64 = 0x5eed_7a0b;

/// Everything a check needs besides its own fixed parameters.
pub struct Context<'a> {
    pub config: &'a Config,
    pub workers: Option<usize>,
    /// Grid spec that replaces both the config grid and the default.
    pub grid_override: Option<&'a str>,
}

impl Context<'_> {
    pub fn grid(&self, metric: &MetricParams) -> Result<Grid> {
        match self.grid_override.or(self.config.grid.as_deref()) {
            Some(spec) => Grid::parse(spec, metric),
            None => Ok(Grid::default_for(metric)),
        }
    }

    fn quad(&self, lower: f64) -> QuadratureSpec {
        QuadratureSpec::to_infinity(lower).with_rel_tol(self.config.tolerances.quadrature)
    }

    fn scan(&self, metric: &MetricParams, f: impl Fn(&CoordPoint) -> Result<f64> + Sync) -> Result<ResidualStatistics> {
        Ok(residual_scan(f, &self.grid(metric)?, self.workers)?.into())
    }
}

/// Result of a check before timing and the pass decision are attached.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub parameters: BTreeMap<String, Value>,
    pub statistics: Option<ResidualStatistics>,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub tolerance_kind: ToleranceKind,
    pub notes: Vec<String>,
}

impl Outcome {
    /// A residual that should vanish: `computed = max`, absolute tolerance.
    fn residual(stats: ResidualStatistics, tolerance: f64) -> Self {
        Outcome {
            parameters: BTreeMap::new(),
            statistics: Some(stats),
            expected: 0.0,
            computed: stats.max,
            tolerance,
            tolerance_kind: ToleranceKind::Absolute,
            notes: vec![],
        }
    }

    fn value(computed: f64, expected: f64, tolerance: f64, kind: ToleranceKind) -> Self {
        Outcome {
            parameters: BTreeMap::new(),
            statistics: None,
            expected,
            computed,
            tolerance,
            tolerance_kind: kind,
            notes: vec![],
        }
    }

    fn param(mut self, key: &str, v: Value) -> Self {
        self.parameters.insert(key.to_string(), v);
        self
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

pub type CheckFn = fn(&Context<'_>) -> Result<Outcome>;

pub struct CheckInfo {
    pub id: &'static str,
    pub description: &'static str,
    /// Whether the check scans the coordinate grid (and so honours `--grid`).
    pub uses_grid: bool,
    pub run: CheckFn,
}

impl CheckInfo {
    pub fn group(&self) -> &'static str {
        self.id.split('.').next().unwrap_or(self.id)
    }
}

macro_rules! check {
    ($id:literal, $grid:literal, $desc:literal, $f:path) => {
        CheckInfo { id: $id, description: $desc, uses_grid: $grid, run: $f }
    };
}

static REGISTRY: &[CheckInfo] = &[
    check!("geometry.scalar_flat", false, "scalar curvature vanishes for 20 random admissible (C1, C2), N = 1", geometry_scalar_flat),
    check!("geometry.ricci_closed_form", false, "contracted closed-form Riemann tensor equals the Ricci pattern", geometry_ricci_closed_form),
    check!("geometry.ricci_fd", false, "Ricci tensor from finite-difference curvature equals the Ricci pattern", geometry_ricci_fd),
    check!("geometry.total_mass", false, "boundary mass integral at r = 1e4 N equals -4 N C1", geometry_total_mass),
    check!("geometry.first_structure", true, "connection forms satisfy the first structure equation", geometry_first_structure),
    check!("geometry.second_structure", true, "closed-form curvature matches the second structure equation", geometry_second_structure),
    check!("geometry.complex_structures", true, "J1, J2, J3 are integrable on both NUT backgrounds", geometry_complex_structures),
    check!("dirac.parallel_taub_nut", true, "parallel spinor on Taub-NUT", dirac_parallel_taub_nut),
    check!("dirac.parallel_negative_nut", true, "parallel spinor on the negative NUT metric", dirac_parallel_negative_nut),
    check!("dirac.harmonic_plus", true, "Harmonic+ spinor is a Dirac zero mode on Taub-NUT", dirac_harmonic_plus),
    check!("dirac.harmonic_minus", true, "Harmonic- spinor is a Dirac zero mode on the negative NUT metric", dirac_harmonic_minus),
    check!("dirac.dmaxwell_minus", true, "Maxwell-built spinor is a Dirac zero mode on the negative NUT metric", dirac_dmaxwell_minus),
    check!("rs.apply_taub_nut", true, "Rarita-Schwinger field on Taub-NUT is annihilated by Q", rs_apply_taub_nut),
    check!("rs.divergence_taub_nut", true, "Rarita-Schwinger field on Taub-NUT is divergence free", rs_divergence_taub_nut),
    check!("rs.apply_negative_nut", true, "Rarita-Schwinger field on the negative NUT metric is annihilated by Q", rs_apply_negative_nut),
    check!("rs.divergence_negative_nut", true, "Rarita-Schwinger field on the negative NUT metric is divergence free", rs_divergence_negative_nut),
    check!("norms.harmonic_minus", false, "L2 norm of Harmonic- equals 16 pi^2", norms_harmonic_minus),
    check!("norms.dmaxwell_minus", false, "L2 norm of the Maxwell-built spinor equals 32 pi^2", norms_dmaxwell_minus),
    check!("norms.harmonic_plus_lower", false, "Harmonic+ L2 truncations blow up at r = N", norms_harmonic_plus_lower),
    check!("norms.harmonic_plus_tail", false, "Harmonic+ L1 truncations grow without bound at infinity", norms_harmonic_plus_tail),
    check!("norms.harmonic_minus_probe", false, "Harmonic- L2 truncations converge to 16 pi^2", norms_harmonic_minus_probe),
    check!("norms.rs_taub_nut", false, "L2 norm of the Taub-NUT Rarita-Schwinger field equals 128 pi^2", norms_rs_taub_nut),
    check!("norms.rs_negative_nut_n1", false, "L2 norm of the negative NUT Rarita-Schwinger field equals 32 pi^2 / N^2, N = 1", norms_rs_negative_nut_n1),
    check!("norms.rs_negative_nut_n2", false, "L2 norm of the negative NUT Rarita-Schwinger field equals 32 pi^2 / N^2, N = 2", norms_rs_negative_nut_n2),
    check!("norms.radial_vs_4d", false, "radial factorization and full 4D quadrature agree on Harmonic-", norms_radial_vs_4d),
    check!("norms.tolerance_halving", false, "halving rel_tol moves the norm values by less than rel_tol", norms_tolerance_halving),
    check!("separation.dirac_massless", true, "assembled massless Dirac modes are harmonic", separation_dirac_massless),
    check!("separation.dirac_massless_l2", false, "radial L2 integrals of massless Dirac modes converge", separation_dirac_massless_l2),
    check!("separation.dirac_angular", false, "angular Dirac profiles solve their system", separation_dirac_angular),
    check!("separation.dirac_kummer", false, "Kummer radial profiles solve the Dirac radial system on r in [1.1, 20]", separation_dirac_kummer),
    check!("separation.dirac_kummer_operator", true, "assembled Kummer modes are Dirac eigenspinors", separation_dirac_kummer_operator),
    check!("separation.matrix_form", true, "matrix form of the Dirac operator agrees with the frame form", separation_matrix_form),
    check!("separation.rs_massless", true, "assembled massless Rarita-Schwinger modes are annihilated by Q", separation_rs_massless),
    check!("separation.rs_massless_l2", false, "radial L2 integrals of massless Rarita-Schwinger modes converge", separation_rs_massless_l2),
    check!("separation.rs_kummer", false, "Kummer profiles solve the second Rarita-Schwinger radial system", separation_rs_kummer),
    check!("separation.rs_kummer_operator", true, "assembled Kummer Rarita-Schwinger modes are Q eigenforms", separation_rs_kummer_operator),
    check!("separation.ode_oracle", false, "numerical integration from closed-form data tracks the closed forms on [2N, 20N]", separation_ode_oracle),
    check!("specfun.kummer_series", false, "1F1 agrees with a 200-term series on 100 random inputs", specfun_kummer_series),
    check!("specfun.kummer_ode", false, "1F1 satisfies Kummer's equation", specfun_kummer_ode),
    check!("specfun.gauss_euler", false, "2F1 satisfies Euler's transformation", specfun_gauss_euler),
    check!("specfun.branch", false, "the fixed square-root branch squares back", specfun_branch),
];

pub fn registry() -> &'static [CheckInfo] {
    REGISTRY
}

pub fn find(id: &str) -> Result<&'static CheckInfo> {
    REGISTRY.iter().find(|c| c.id == id).ok_or_else(|| LabError::UnknownCheck(id.to_string()))
}

/// Resolves ids, group names and `all`, keeping registry order.
pub fn select(names: &[String]) -> Result<Vec<&'static CheckInfo>> {
    if names.is_empty() {
        return Ok(REGISTRY.iter().collect());
    }
    let mut keep = vec![false; REGISTRY.len()];
    for name in names {
        let name = name.trim();
        if name == "all" {
            keep.iter_mut().for_each(|k| *k = true);
            continue;
        }
        let mut hit = false;
        for (i, c) in REGISTRY.iter().enumerate() {
            if c.id == name || c.group() == name {
                keep[i] = true;
                hit = true;
            }
        }
        if !hit {
            return Err(LabError::UnknownCheck(name.to_string()));
        }
    }
    Ok(REGISTRY.iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect())
}

pub fn run_check(info: &CheckInfo, ctx: &Context<'_>) -> VerificationReport {
    let start = Instant::now();
    let outcome = (info.run)(ctx);
    let wall_time_s = start.elapsed().as_secs_f64();
    let mut report = VerificationReport {
        id: info.id.to_string(),
        description: info.description.to_string(),
        parameters: BTreeMap::new(),
        statistics: None,
        expected: f64::NAN,
        computed: f64::NAN,
        tolerance: 0.0,
        tolerance_kind: ToleranceKind::Absolute,
        passed: false,
        wall_time_s,
        notes: vec![],
        error: None,
    };
    match outcome {
        Ok(o) => {
            let expected = ctx.config.expected_overrides.get(info.id).copied().unwrap_or(o.expected);
            if expected.to_bits() != o.expected.to_bits() {
                report.notes.push(format!("expected value overridden from {:e}", o.expected));
            }
            report.passed = o.tolerance_kind.accepts(o.computed, expected, o.tolerance);
            report.parameters = o.parameters;
            report.statistics = o.statistics;
            report.expected = expected;
            report.computed = o.computed;
            report.tolerance = o.tolerance;
            report.tolerance_kind = o.tolerance_kind;
            report.notes.extend(o.notes);
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}

/// Runs `names` (or the config's `checks`, or everything) and collects the
/// reports in registry order.
pub fn run_suite(config: &Config, names: &[String], workers: Option<usize>) -> Result<SuiteReport> {
    run_suite_with_grid(config, names, workers, None)
}

pub fn run_suite_with_grid(
    config: &Config,
    names: &[String],
    workers: Option<usize>,
    grid_override: Option<&str>,
) -> Result<SuiteReport> {
    config.validate()?;
    for id in config.expected_overrides.keys() {
        find(id)?;
    }
    let names: Vec<String> = if names.is_empty() { config.checks.clone().unwrap_or_default() } else { names.to_vec() };
    let selected = select(&names)?;
    let ctx = Context { config, workers, grid_override };
    let start = Instant::now();
    let reports = selected.iter().map(|c| run_check(c, &ctx)).collect();
    Ok(SuiteReport::new(config.clone(), reports, start.elapsed().as_secs_f64()))
}

/// Total mass of the configured metric at `cutoff`, judged against `−4 N C1`
/// to `1e-3` relative (absolute when `C1 = 0`).
pub fn mass_report(config: &Config, cutoff: f64) -> Result<SuiteReport> {
    config.validate()?;
    let m = config.metric()?;
    if !(cutoff.is_finite() && cutoff > m.n()) {
        return Err(LabError::Parameter(format!("cutoff {cutoff} must exceed N = {}", m.n())));
    }
    let start = Instant::now();
    let value = total_mass(&m, cutoff)?;
    let expected = -4.0 * m.n() * m.c1();
    let kind = if expected == 0.0 { ToleranceKind::Absolute } else { ToleranceKind::Relative };
    let mut parameters = BTreeMap::new();
    parameters.insert("metric".to_string(), metric_json(&m));
    parameters.insert("cutoff".to_string(), json!(cutoff));
    let report = VerificationReport {
        id: "geometry.total_mass_at_cutoff".into(),
        description: "boundary mass integral at the requested cutoff".into(),
        parameters,
        statistics: None,
        expected,
        computed: value,
        tolerance: 1e-3,
        tolerance_kind: kind,
        passed: kind.accepts(value, expected, 1e-3),
        wall_time_s: start.elapsed().as_secs_f64(),
        notes: vec![],
        error: None,
    };
    Ok(SuiteReport::new(config.clone(), vec![report], start.elapsed().as_secs_f64()))
}

// ---------------------------------------------------------------- helpers

fn stats_of(values: &[f64]) -> Result<ResidualStatistics> {
    if values.is_empty() {
        return Err(LabError::EmptyGrid);
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(LabError::NonFinite(*bad));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ResidualStatistics { max, mean: values.iter().sum::<f64>() / values.len() as f64, count: values.len() })
}

fn merge(stats: &[ResidualStatistics]) -> ResidualStatistics {
    let count: usize = stats.iter().map(|s| s.count).sum();
    ResidualStatistics {
        max: stats.iter().map(|s| s.max).fold(f64::NEG_INFINITY, f64::max),
        mean: stats.iter().map(|s| s.mean * s.count as f64).sum::<f64>() / count as f64,
        count,
    }
}

fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

fn metric_json(m: &MetricParams) -> Value {
    json!({"N": m.n(), "C1": m.c1(), "C2": m.c2(), "profile": format!("{:?}", m.profile())})
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unit_n_grid_radii() -> Vec<f64> {
    Grid::default_for(&MetricParams::taub_nut(1.0).expect("N = 1")).r
}

/// Admissible scalar-flat parameters `C1 ≥ −2N`, `−N² − N C1 ≤ C2 ≤ C1²/4`.
fn random_scalar_flat(rng: &mut ChaCha8Rng, n: f64) -> Result<MetricParams> {
    let c1 = rng.gen_range(-2.0 * n..4.0 * n);
    let lo = -n * n - n * c1;
    let hi = c1 * c1 / 4.0;
    MetricParams::scalar_flat(n, c1, lo + (hi - lo) * rng.gen::<f64>())
}

fn curvature_metrics(config: &Config) -> Result<Vec<MetricParams>> {
    Ok(vec![
        config.metric()?,
        MetricParams::taub_nut(1.0)?,
        MetricParams::negative_nut(1.5)?,
        MetricParams::scalar_flat(1.0, 3.0, -2.0)?,
        MetricParams::scalar_flat(2.0, 1.0, -1.0)?,
    ])
}

/// Largest deviation between the contracted Riemann tensor and the Ricci
/// pattern `(N² − C2)/(r² − N²)² · diag(1, −1, −1, 1)`, relative to the
/// largest curvature component at the point.
fn ricci_deviation(metric: &MetricParams, point: &CoordPoint, riemann: &[[[[f64; 4]; 4]; 4]; 4]) -> f64 {
    let s = metric.s(point.r);
    let k = (metric.n() * metric.n() - metric.c2()) / (s * s);
    let pattern = [k, -k, -k, k];
    let contracted = ricci_from_riemann(riemann);
    let scale = riemann.iter().flatten().flatten().flatten().fold(k.abs(), |m, v| m.max(v.abs()));
    let dev = (0..4).map(|i| (contracted[i] - pattern[i]).abs()).fold(0.0, f64::max);
    relative(dev, scale)
}

// ---------------------------------------------------------------- geometry

fn geometry_scalar_flat(_: &Context<'_>) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let radii = unit_n_grid_radii();
    let mut values = Vec::new();
    let mut worst = (0.0, 0.0);
    let mut worst_value = -1.0;
    let mut f64_abs: f64 = 0.0;
    let mut f64_rel: f64 = 0.0;
    for _ in 0..20 {
        let m = random_scalar_flat(&mut rng, 1.0)?;
        for &r in &radii {
            let v = scalar_curvature_exact(&m, r)?.abs();
            if v > worst_value {
                worst_value = v;
                worst = (m.c1(), m.c2());
            }
            values.push(v);
            let data = curvature(&m, &CoordPoint::new(r, PI / 2.0, 0.0, 0.0))?;
            let scale = data.riemann.iter().flatten().flatten().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
            f64_abs = f64_abs.max(data.scalar.abs());
            f64_rel = f64_rel.max(relative(data.scalar.abs(), scale));
        }
    }
    Ok(Outcome::residual(stats_of(&values)?, 1e-10)
        .param("N", json!(1.0))
        .param("samples", json!(20))
        .param("worst_C1_C2", json!([worst.0, worst.1]))
        .param("f64_max_abs", json!(f64_abs))
        .param("f64_max_rel_to_curvature", json!(f64_rel))
        .note("evaluated in exact rational arithmetic; f64_* record the double-precision path"))
}

fn geometry_ricci_closed_form(ctx: &Context<'_>) -> Result<Outcome> {
    let mut values = Vec::new();
    for m in curvature_metrics(ctx.config)? {
        for r in Grid::default_for(&m).r {
            let p = CoordPoint::new(r, 1.0, 0.4, 1.1);
            values.push(ricci_deviation(&m, &p, &curvature(&m, &p)?.riemann));
        }
    }
    Ok(Outcome::residual(stats_of(&values)?, 1e-12).note("deviation relative to the largest curvature component"))
}

fn geometry_ricci_fd(ctx: &Context<'_>) -> Result<Outcome> {
    let mut values = Vec::new();
    for m in curvature_metrics(ctx.config)? {
        for r in Grid::default_for(&m).r {
            let p = CoordPoint::new(r, 1.0, 0.4, 1.1);
            values.push(ricci_deviation(&m, &p, &checks::riemann_fd(&m, &p)?));
        }
    }
    Ok(Outcome::residual(stats_of(&values)?, 1e-5).note("deviation relative to the largest curvature component"))
}

fn geometry_total_mass(_: &Context<'_>) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for (n, c1, c2) in [(1.0, 2.0, 0.5), (1.0, -2.0, 1.0), (2.0, 1.0, 0.0)] {
        let m = MetricParams::scalar_flat(n, c1, c2)?;
        let value = total_mass(&m, 1e4 * n)?;
        let exact = -4.0 * n * c1;
        let rel = ((value - exact) / exact).abs();
        worst = worst.max(rel);
        rows.push(json!({"N": n, "C1": c1, "C2": c2, "mass": value, "expected": exact}));
    }
    Ok(Outcome::value(worst, 0.0, 1e-3, ToleranceKind::Absolute)
        .param("cases", Value::Array(rows))
        .note("computed is the largest relative deviation"))
}

fn geometry_first_structure(ctx: &Context<'_>) -> Result<Outcome> {
    let m = ctx.config.metric()?;
    let stats = ctx.scan(&m, |p| checks::first_structure_residual(&m, p))?;
    Ok(Outcome::residual(stats, ctx.config.tolerances.residual).param("metric", metric_json(&m)))
}

fn geometry_second_structure(ctx: &Context<'_>) -> Result<Outcome> {
    let m = ctx.config.metric()?;
    let stats = ctx.scan(&m, |p| checks::second_structure_residual(&m, p))?;
    Ok(Outcome::residual(stats, ctx.config.tolerances.kummer).param("metric", metric_json(&m)))
}

fn geometry_complex_structures(ctx: &Context<'_>) -> Result<Outcome> {
    let mut all = Vec::new();
    for (m, delta) in [(MetricParams::scalar_flat(1.0, -2.0, 1.0)?, 1), (MetricParams::scalar_flat(1.0, 2.0, 1.0)?, -1)] {
        let q = Grid::default_for(&m).r.iter().map(|&r| q_factor(&m, delta, r).abs()).fold(0.0, f64::max);
        if q > 1e-8 {
            return Err(LabError::Domain(format!("Q(r) does not vanish for delta = {delta}: {q:e}")));
        }
        all.push(ctx.scan(&m, |p| {
            let mut worst: f64 = 0.0;
            for j in 1..=3 {
                worst = worst.max(complex_structure_residual(&m, j, delta, p)?);
            }
            Ok(worst)
        })?);
    }
    Ok(Outcome::residual(merge(&all), ctx.config.tolerances.residual))
}

// ---------------------------------------------------------------- dirac

fn parallel_check(ctx: &Context<'_>, family: Profile) -> Result<Outcome> {
    let m = MetricParams::new(1.0, 0.0, 0.0, family)?;
    let u = parallel_spinor(family, c(0.6, 0.0), c(0.0, 0.8))?;
    let stats = ctx.scan(&m, |p| parallel_residual(&u, p, &m))?;
    Ok(Outcome::residual(stats, ctx.config.tolerances.residual).param("metric", metric_json(&m)))
}

fn dirac_parallel_taub_nut(ctx: &Context<'_>) -> Result<Outcome> {
    parallel_check(ctx, Profile::TaubNut)
}

fn dirac_parallel_negative_nut(ctx: &Context<'_>) -> Result<Outcome> {
    parallel_check(ctx, Profile::NegativeNut)
}

fn harmonic_check(ctx: &Context<'_>, kind: HarmonicKind) -> Result<Outcome> {
    let m = MetricParams::new(1.0, 0.0, 0.0, kind.background())?;
    let psi = harmonic_spinor(kind, 1.0, c(0.6, 0.0), c(0.0, 0.8))?;
    let stats = ctx.scan(&m, |p| Ok(dirac_apply(&psi, p, &m)?.norm()))?;
    Ok(Outcome::residual(stats, ctx.config.tolerances.residual).param("metric", metric_json(&m)))
}

fn dirac_harmonic_plus(ctx: &Context<'_>) -> Result<Outcome> {
    harmonic_check(ctx, HarmonicKind::Plus)
}

fn dirac_harmonic_minus(ctx: &Context<'_>) -> Result<Outcome> {
    harmonic_check(ctx, HarmonicKind::Minus)
}

fn dirac_dmaxwell_minus(ctx: &Context<'_>) -> Result<Outcome> {
    harmonic_check(ctx, HarmonicKind::MaxwellMinus)
}

// ---------------------------------------------------------------- rs

fn rs_check(ctx: &Context<'_>, family: Profile, div: bool) -> Result<Outcome> {
    let m = MetricParams::new(1.0, 0.0, 0.0, family)?;
    let sigma = rs_field(family, 1.0, c(0.6, 0.0), c(0.0, 0.8))?;
    let (stats, tol) = if div {
        (ctx.scan(&m, |p| Ok(divergence(&sigma, p, &m)?.norm()))?, ctx.config.tolerances.residual)
    } else {
        (ctx.scan(&m, |p| Ok(rs_apply(&sigma, p, &m)?.norm()))?, ctx.config.tolerances.kummer)
    };
    Ok(Outcome::residual(stats, tol).param("metric", metric_json(&m)))
}

fn rs_apply_taub_nut(ctx: &Context<'_>) -> Result<Outcome> {
    rs_check(ctx, Profile::TaubNut, false)
}

fn rs_divergence_taub_nut(ctx: &Context<'_>) -> Result<Outcome> {
    rs_check(ctx, Profile::TaubNut, true)
}

fn rs_apply_negative_nut(ctx: &Context<'_>) -> Result<Outcome> {
    rs_check(ctx, Profile::NegativeNut, false)
}

fn rs_divergence_negative_nut(ctx: &Context<'_>) -> Result<Outcome> {
    rs_check(ctx, Profile::NegativeNut, true)
}

// ---------------------------------------------------------------- norms

fn unit() -> (C64, C64) {
    (c(1.0, 0.0), c(0.0, 0.0))
}

fn norm_value(ctx: &Context<'_>, field: FieldRef<'_>, m: &MetricParams, expected: f64) -> Result<Outcome> {
    let v = l2_norm_squared(field, m, &ctx.quad(m.n()))?;
    Ok(Outcome::value(v, expected, ctx.config.tolerances.norm_rel, ToleranceKind::Relative)
        .param("metric", metric_json(m))
        .param("rel_tol", json!(ctx.config.tolerances.quadrature)))
}

fn norms_harmonic_minus(ctx: &Context<'_>) -> Result<Outcome> {
    let m = MetricParams::negative_nut(1.0)?;
    let (a, b) = unit();
    let psi = harmonic_spinor(HarmonicKind::Minus, 1.0, a, b)?;
    norm_value(ctx, FieldRef::Spinor(&psi), &m, 16.0 * PI * PI)
}

fn norms_dmaxwell_minus(ctx: &Context<'_>) -> Result<Outcome> {
    let m = MetricParams::negative_nut(1.0)?;
    let (a, b) = unit();
    let psi = harmonic_spinor(HarmonicKind::MaxwellMinus, 1.0, a, b)?;
    norm_value(ctx, FieldRef::Spinor(&psi), &m, 32.0 * PI * PI)
}

fn probe_outcome(kind: HarmonicKind, p: f64, lower: bool) -> Result<Outcome> {
    let m = MetricParams::new(1.0, 0.0, 0.0, kind.background())?;
    let (a, b) = unit();
    let psi = harmonic_spinor(kind, 1.0, a, b)?;
    let probe = lp_divergence_probe(FieldRef::Spinor(&psi), p, &m)?;
    let flag = if lower { probe.lower_diverges } else { probe.tail_diverges };
    Ok(Outcome::value(if flag { 1.0 } else { 0.0 }, 1.0, 0.0, ToleranceKind::Absolute)
        .param("p", json!(p))
        .param("metric", metric_json(&m))
        .param("lower_partial_sums", json!(probe.lower_partial_sums))
        .param("tail_partial_sums", json!(probe.tail_partial_sums))
        .note(format!("verdict {:?}; computed is 1 when the probed regime diverges", probe.verdict)))
}

fn norms_harmonic_plus_lower(_: &Context<'_>) -> Result<Outcome> {
    probe_outcome(HarmonicKind::Plus, 2.0, true)
}

fn norms_harmonic_plus_tail(_: &Context<'_>) -> Result<Outcome> {
    probe_outcome(HarmonicKind::Plus, 1.0, false)
}

fn norms_harmonic_minus_probe(ctx: &Context<'_>) -> Result<Outcome> {
    let m = MetricParams::negative_nut(1.0)?;
    let (a, b) = unit();
    let psi = harmonic_spinor(HarmonicKind::Minus, 1.0, a, b)?;
    let probe = lp_divergence_probe(FieldRef::Spinor(&psi), 2.0, &m)?;
    let value = match (probe.verdict, probe.value) {
        (LpVerdict::Converging, Some(v)) => v,
        _ => f64::INFINITY,
    };
    Ok(Outcome::value(value, 16.0 * PI * PI, ctx.config.tolerances.norm_rel, ToleranceKind::Relative)
        .param("lower_partial_sums", json!(probe.lower_partial_sums))
        .param("tail_partial_sums", json!(probe.tail_partial_sums)))
}

fn norms_rs_taub_nut(ctx: &Context<'_>) -> Result<Outcome> {
    let m = MetricParams::taub_nut(1.0)?;
    let (a, b) = unit();
    let sigma = rs_field(Profile::TaubNut, 1.0, a, b)?;
    norm_value(ctx, FieldRef::OneForm(&sigma), &m, 128.0 * PI * PI)
}

fn rs_negative(ctx: &Context<'_>, n: f64) -> Result<Outcome> {
    let m = MetricParams::negative_nut(n)?;
    let (a, b) = unit();
    let sigma = rs_field(Profile::NegativeNut, n, a, b)?;
    norm_value(ctx, FieldRef::OneForm(&sigma), &m, 32.0 * PI * PI / (n * n))
}

fn norms_rs_negative_nut_n1(ctx: &Context<'_>) -> Result<Outcome> {
    rs_negative(ctx, 1.0)
}

fn norms_rs_negative_nut_n2(ctx: &Context<'_>) -> Result<Outcome> {
    rs_negative(ctx, 2.0)
}

fn norms_radial_vs_4d(ctx: &Context<'_>) -> Result<Outcome> {
    let m = MetricParams::negative_nut(1.0)?;
    let psi = harmonic_spinor(HarmonicKind::Minus, 1.0, c(0.6, 0.0), c(0.0, 0.8))?;
    // the product rule is fixed, so the radial tolerance need not be tighter
    let spec = ctx.quad(1.0).with_rel_tol(ctx.config.tolerances.quadrature.max(1e-8));
    let radial = l2_norm_squared_radial(FieldRef::Spinor(&psi), &m, &spec)?;
    let full = l2_norm_squared_4d(FieldRef::Spinor(&psi), &m, &spec, &AngularRule::default())?;
    Ok(Outcome::value(full, radial, 1e-6, ToleranceKind::Relative)
        .param("angular_rule", json!(AngularRule::default()))
        .note("expected is the radial-factorization value"))
}

fn norms_tolerance_halving(ctx: &Context<'_>) -> Result<Outcome> {
    let tol = ctx.config.tolerances.quadrature;
    let (a, b) = unit();
    let nn = MetricParams::negative_nut(1.0)?;
    let tn = MetricParams::taub_nut(1.0)?;
    let minus = harmonic_spinor(HarmonicKind::Minus, 1.0, a, b)?;
    let maxwell = harmonic_spinor(HarmonicKind::MaxwellMinus, 1.0, a, b)?;
    let rs_tn = rs_field(Profile::TaubNut, 1.0, a, b)?;
    let rs_nn = rs_field(Profile::NegativeNut, 1.0, a, b)?;
    let cases: [(&str, FieldRef<'_>, &MetricParams); 4] = [
        ("harmonic_minus", FieldRef::Spinor(&minus), &nn),
        ("dmaxwell_minus", FieldRef::Spinor(&maxwell), &nn),
        ("rs_taub_nut", FieldRef::OneForm(&rs_tn), &tn),
        ("rs_negative_nut", FieldRef::OneForm(&rs_nn), &nn),
    ];
    let mut worst: f64 = 0.0;
    let mut rows = BTreeMap::new();
    for (name, f, m) in cases {
        let coarse = l2_norm_squared(f, m, &ctx.quad(m.n()))?;
        let fine = l2_norm_squared(f, m, &ctx.quad(m.n()).with_rel_tol(tol / 2.0))?;
        let change = ((coarse - fine) / fine).abs();
        worst = worst.max(change);
        rows.insert(name.to_string(), json!({"coarse": coarse, "fine": fine, "relative_change": change}));
    }
    Ok(Outcome::value(worst, 0.0, tol, ToleranceKind::Absolute).param("cases", json!(rows)))
}

// ---------------------------------------------------------------- separation

fn massless_modes(config: &Config) -> Vec<ModeConfig> {
    let modes: Vec<ModeConfig> =
        config.modes.iter().copied().filter(|m| m.lambda() == c(0.0, 0.0) && m.eta() == c(0.0, 0.0)).collect();
    if modes.is_empty() {
        Config::default().modes
    } else {
        modes
    }
}

fn scalar_flat_metric(config: &Config) -> Result<MetricParams> {
    let m = config.metric()?;
    if m.profile() != Profile::ScalarFlat {
        return Err(LabError::Config("massless separated modes need a ScalarFlat config".into()));
    }
    Ok(m)
}

fn triple_json(m: &ModeConfig) -> Value {
    json!([m.m, m.m1, m.m2])
}

fn separation_dirac_massless(ctx: &Context<'_>) -> Result<Outcome> {
    let metric = scalar_flat_metric(ctx.config)?;
    let mut all = Vec::new();
    let mut triples = Vec::new();
    for mode in massless_modes(ctx.config) {
        let p = mode.dirac();
        let angular = dirac_angular(DiracAngularCase::EtaZero, p)?;
        if !angular.regular {
            return Err(LabError::Parameter(format!("mode {:?} has a singular angular profile", triple_json(&mode))));
        }
        let psi = assemble_dirac_mode(p, angular, dirac_radial(DiracRadialCase::MasslessEtaZero, p, &metric)?)?;
        all.push(ctx.scan(&metric, |pt| Ok(relative(dirac_apply(&psi, pt, &metric)?.norm(), psi.evaluate(pt)?.norm())))?);
        triples.push(triple_json(&mode));
    }
    Ok(Outcome::residual(merge(&all), ctx.config.tolerances.kummer)
        .param("metric", metric_json(&metric))
        .param("modes", Value::Array(triples))
        .note("residual is |D psi| / |psi|"))
}

/// Relative change of `∫ 2N S |Φ|² dr` under halving the tolerance.
fn radial_l2(ctx: &Context<'_>, n: f64, density: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let coarse = integrate_radial(&density, &ctx.quad(n))?;
    let fine = integrate_radial(&density, &ctx.quad(n).with_rel_tol(ctx.config.tolerances.quadrature / 2.0))?;
    Ok((fine, ((coarse - fine) / fine).abs()))
}

fn separation_dirac_massless_l2(ctx: &Context<'_>) -> Result<Outcome> {
    let metric = scalar_flat_metric(ctx.config)?;
    let n = metric.n();
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for mode in massless_modes(ctx.config) {
        let rad = dirac_radial(DiracRadialCase::MasslessEtaZero, mode.dirac(), &metric)?;
        let (value, change) = radial_l2(ctx, n, |r| {
            Ok(2.0 * n * metric.s(r) * rad.eval(r)?.iter().map(|z| z.norm_sqr()).sum::<f64>())
        })?;
        worst = worst.max(change);
        rows.push(json!({"mode": triple_json(&mode), "integral": value, "relative_change": change}));
    }
    Ok(Outcome::value(worst, 0.0, ctx.config.tolerances.quadrature, ToleranceKind::Absolute)
        .param("modes", Value::Array(rows))
        .note("computed is the relative change of the radial integral when rel_tol is halved"))
}

fn separation_dirac_angular(ctx: &Context<'_>) -> Result<Outcome> {
    let thetas: Vec<f64> = (0..=40).map(|i| 0.1 + (PI - 0.2) * i as f64 / 40.0).collect();
    let mut values = Vec::new();
    let hyper = dirac_angular(DiracAngularCase::Hypergeometric, DiracModeParams::new(0, 2, 0, c(0.0, 0.0), c(1.0, 0.0)))?;
    let hyper2 = dirac_angular(DiracAngularCase::Hypergeometric, DiracModeParams::new(1, 1, -1, c(0.0, 0.0), c(0.5, 0.3)))?;
    for th in &thetas {
        values.push(hyper.residual(*th)?);
        values.push(hyper2.residual(*th)?);
    }
    for mode in massless_modes(ctx.config) {
        let a = dirac_angular(DiracAngularCase::EtaZero, mode.dirac())?;
        for th in &thetas {
            values.push(a.residual(*th)?);
        }
    }
    Ok(Outcome::residual(stats_of(&values)?, ctx.config.tolerances.residual))
}

fn kummer_dirac_params() -> Vec<DiracModeParams> {
    let mut out = Vec::new();
    for lam in [c(0.1, 0.0), c(0.1, 0.05)] {
        for (m1, m2) in [(1, 0), (2, 1)] {
            out.push(DiracModeParams::new(0, m1, m2, lam, c(0.0, 0.0)));
        }
    }
    out
}

fn kummer_radii() -> Vec<f64> {
    (0..=95).map(|i| 1.1 + (20.0 - 1.1) * i as f64 / 95.0).collect()
}

/// Per parameter set, the radial residual maxima for `k = 0, 1`.
fn dirac_kummer_branches(metric: &MetricParams) -> Result<Vec<(DiracModeParams, [f64; 2])>> {
    let radii = kummer_radii();
    kummer_dirac_params()
        .into_iter()
        .map(|p| {
            let mut per_k = [0.0; 2];
            for k in 0..2u8 {
                let rad = dirac_radial(DiracRadialCase::KummerNegNut { k }, p, metric)?;
                let vals = radii.iter().map(|&r| rad.residual(r)).collect::<Result<Vec<_>>>()?;
                per_k[k as usize] = stats_of(&vals)?.max;
            }
            Ok((p, per_k))
        })
        .collect()
}

fn best_branch(per_k: [f64; 2]) -> u8 {
    if per_k[1] < per_k[0] {
        1
    } else {
        0
    }
}

fn separation_dirac_kummer(ctx: &Context<'_>) -> Result<Outcome> {
    let metric = MetricParams::negative_nut(1.0)?;
    let tol = ctx.config.tolerances.residual;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for (p, per_k) in dirac_kummer_branches(&metric)? {
        let best = per_k[0].min(per_k[1]);
        worst = worst.max(best);
        let accepted: Vec<u8> = (0..2u8).filter(|&k| per_k[k as usize] <= tol).collect();
        rows.push(json!({
            "lambda": [p.lambda.re, p.lambda.im], "m1": p.m1, "m2": p.m2,
            "residual_k0": per_k[0], "residual_k1": per_k[1], "accepted_k": accepted,
        }));
    }
    Ok(Outcome::value(worst, 0.0, tol, ToleranceKind::Absolute)
        .param("metric", metric_json(&metric))
        .param("r_range", json!([1.1, 20.0]))
        .param("cases", Value::Array(rows))
        .note("computed is the worst case over parameter sets of the better branch"))
}

fn kummer_dirac_profiles(metric: &MetricParams) -> Result<Vec<RadialProfile>> {
    dirac_kummer_branches(metric)?
        .into_iter()
        .map(|(p, per_k)| dirac_radial(DiracRadialCase::KummerNegNut { k: best_branch(per_k) }, p, metric))
        .collect()
}

fn separation_dirac_kummer_operator(ctx: &Context<'_>) -> Result<Outcome> {
    let metric = MetricParams::negative_nut(1.0)?;
    let mut all = Vec::new();
    for rad in kummer_dirac_profiles(&metric)? {
        let p = rad.params;
        let psi = assemble_dirac_mode(p, dirac_angular(DiracAngularCase::EtaZero, p)?, rad)?;
        all.push(ctx.scan(&metric, |pt| {
            let v = psi.evaluate(pt)?;
            Ok(relative((dirac_apply(&psi, pt, &metric)? - p.lambda * v).norm(), v.norm()))
        })?);
    }
    Ok(Outcome::residual(merge(&all), ctx.config.tolerances.kummer).note("residual is |D psi - lambda psi| / |psi|"))
}

fn separation_matrix_form(ctx: &Context<'_>) -> Result<Outcome> {
    let metric = MetricParams::negative_nut(1.0)?;
    let p = DiracModeParams::new(1, 1, 0, c(0.3, 0.1), c(0.0, 0.0));
    let psi = assemble_dirac_mode(
        p,
        dirac_angular(DiracAngularCase::EtaZero, p)?,
        dirac_radial(DiracRadialCase::KummerNegNut { k: 0 }, p, &metric)?,
    )?;
    let stats = ctx.scan(&metric, |pt| {
        let a = dirac_apply(&psi, pt, &metric)?;
        let b = dirac_matrix_form(&psi, pt, &metric)?;
        Ok(relative((a - b).norm(), a.norm().max(psi.evaluate(pt)?.norm())))
    })?;
    Ok(Outcome::residual(stats, ctx.config.tolerances.residual))
}

fn rs_massless_fields(metric: &MetricParams, config: &Config) -> Result<Vec<(ModeConfig, RsRadialProfile)>> {
    massless_modes(config)
        .into_iter()
        .map(|mode| {
            let p = RsModeParams::new(mode.m, mode.m1, mode.m2, c(0.0, 0.0));
            Ok((mode, rs_radial(RsRadialCase::MasslessScalarFlat, p, metric)?))
        })
        .collect()
}

fn separation_rs_massless(ctx: &Context<'_>) -> Result<Outcome> {
    let metric = scalar_flat_metric(ctx.config)?;
    let mut all = Vec::new();
    let mut triples = Vec::new();
    for (mode, rad) in rs_massless_fields(&metric, ctx.config)? {
        let p = rad.params;
        let angular = rs_angular(p);
        if !angular.regular {
            return Err(LabError::Parameter(format!("mode {:?} has a singular angular profile", triple_json(&mode))));
        }
        let field = assemble_rs_mode(p, angular, rad)?;
        all.push(ctx.scan(&metric, |pt| Ok(relative(rs_apply(&field, pt, &metric)?.norm(), field.evaluate(pt)?.norm())))?);
        triples.push(triple_json(&mode));
    }
    Ok(Outcome::residual(merge(&all), ctx.config.tolerances.kummer)
        .param("metric", metric_json(&metric))
        .param("modes", Value::Array(triples))
        .note("residual is |Q psi| / |psi|"))
}

fn separation_rs_massless_l2(ctx: &Context<'_>) -> Result<Outcome> {
    let metric = scalar_flat_metric(ctx.config)?;
    let n = metric.n();
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for (mode, rad) in rs_massless_fields(&metric, ctx.config)? {
        let (value, change) = radial_l2(ctx, n, |r| {
            Ok(2.0 * n * metric.s(r) * rad.eval(r)?.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>())
        })?;
        worst = worst.max(change);
        rows.push(json!({"mode": triple_json(&mode), "integral": value, "relative_change": change}));
    }
    Ok(Outcome::value(worst, 0.0, ctx.config.tolerances.quadrature, ToleranceKind::Absolute)
        .param("modes", Value::Array(rows))
        .note("computed is the relative change of the radial integral when rel_tol is halved"))
}

fn rs_kummer_params() -> RsModeParams {
    RsModeParams::new(0, -1, 0, c(0.1, 0.0))
}

fn rs_kummer_branches(metric: &MetricParams) -> Result<[f64; 2]> {
    let radii = kummer_radii();
    let mut per_k = [0.0; 2];
    for k in 0..2u8 {
        let rad = rs_radial(RsRadialCase::KummerTaubNut { k }, rs_kummer_params(), metric)?;
        let vals = radii.iter().map(|&r| rad.residual(r)).collect::<Result<Vec<_>>>()?;
        per_k[k as usize] = stats_of(&vals)?.max;
    }
    Ok(per_k)
}

fn separation_rs_kummer(ctx: &Context<'_>) -> Result<Outcome> {
    let metric = MetricParams::taub_nut(1.0)?;
    let tol = ctx.config.tolerances.residual;
    let per_k = rs_kummer_branches(&metric)?;
    let accepted: Vec<u8> = (0..2u8).filter(|&k| per_k[k as usize] <= tol).collect();
    Ok(Outcome::value(per_k[0].min(per_k[1]), 0.0, tol, ToleranceKind::Absolute)
        .param("metric", metric_json(&metric))
        .param("mode", json!({"m": 0, "m1": -1, "m2": 0, "lambda": [0.1, 0.0]}))
        .param("residual_k0", json!(per_k[0]))
        .param("residual_k1", json!(per_k[1]))
        .param("accepted_k", json!(accepted)))
}

fn separation_rs_kummer_operator(ctx: &Context<'_>) -> Result<Outcome> {
    let metric = MetricParams::taub_nut(1.0)?;
    let p = rs_kummer_params();
    let k = best_branch(rs_kummer_branches(&metric)?);
    let field = assemble_rs_mode(p, rs_angular(p), rs_radial(RsRadialCase::KummerTaubNut { k }, p, &metric)?)?;
    let stats = ctx.scan(&metric, |pt| {
        let v = field.evaluate(pt)?;
        Ok(relative((rs_apply(&field, pt, &metric)? - v.scale(p.lambda)).norm(), v.norm()))
    })?;
    Ok(Outcome::residual(stats, ctx.config.tolerances.kummer)
        .param("k", json!(k))
        .note("residual is |Q psi - lambda psi| / |psi|"))
}

fn separation_ode_oracle(ctx: &Context<'_>) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let nn = MetricParams::negative_nut(1.0)?;
    for rad in kummer_dirac_profiles(&nn)? {
        let o = dirac_radial_oracle(&rad, 2.0, 20.0, 24)?;
        worst = worst.max(o.deviation);
        let p = rad.params;
        rows.push(json!({"system": "dirac", "lambda": [p.lambda.re, p.lambda.im], "m1": p.m1, "m2": p.m2, "k": rad.branch(), "deviation": o.deviation}));
    }
    let tn = MetricParams::taub_nut(1.0)?;
    let k = best_branch(rs_kummer_branches(&tn)?);
    let rad = rs_radial(RsRadialCase::KummerTaubNut { k }, rs_kummer_params(), &tn)?;
    let o = rs_radial_oracle(&rad, 2.0, 20.0, 24)?;
    worst = worst.max(o.deviation);
    rows.push(json!({"system": "rs", "lambda": [0.1, 0.0], "m1": -1, "m2": 0, "k": k, "deviation": o.deviation}));
    // the massless systems as well, where the closed forms decay
    let sf = scalar_flat_metric(ctx.config).or_else(|_| Config::default().metric())?;
    for mode in massless_modes(ctx.config) {
        let rad = dirac_radial(DiracRadialCase::MasslessEtaZero, mode.dirac(), &sf)?;
        let o = dirac_radial_oracle(&rad, 2.0 * sf.n(), 20.0 * sf.n(), 24)?;
        worst = worst.max(o.deviation);
        rows.push(json!({"system": "dirac_massless", "mode": triple_json(&mode), "deviation": o.deviation}));
    }
    Ok(Outcome::value(worst, 0.0, ctx.config.tolerances.residual, ToleranceKind::Absolute)
        .param("cases", Value::Array(rows))
        .note("deviation is max |numerical - closed| / sup |closed| over 24 log-spaced radii"))
}

// ---------------------------------------------------------------- specfun

fn random_kummer(rng: &mut ChaCha8Rng) -> Result<(KummerParams, C64)> {
    let alpha = c(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0));
    let gamma = c(rng.gen_range(0.5..4.0), rng.gen_range(-1.0..1.0));
    let z = C64::from_polar(5.0 * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI));
    Ok((KummerParams::new(alpha, gamma)?, z))
}

/// The first `terms` Maclaurin terms summed naively, with `Σ |term|`.
fn naive_series(p: &KummerParams, z: C64, terms: usize) -> (C64, f64) {
    let mut s = c(0.0, 0.0);
    let mut abs = 0.0;
    let mut t = c(1.0, 0.0);
    for n in 0..terms {
        s += t;
        abs += t.norm();
        let nf = n as f64;
        t *= (p.alpha + nf) / ((p.gamma + nf) * (nf + 1.0)) * z;
    }
    (s, abs)
}

fn specfun_kummer_series(_: &Context<'_>) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut values = Vec::new();
    for _ in 0..100 {
        let (p, z) = random_kummer(&mut rng)?;
        let (oracle, scale) = naive_series(&p, z, 200);
        values.push((kummer_1f1(&p, z)? - oracle).norm() / scale);
    }
    Ok(Outcome::residual(stats_of(&values)?, 1e-13).note("error relative to the sum of the absolute series terms"))
}

fn specfun_kummer_ode(_: &Context<'_>) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut values = Vec::new();
    for _ in 0..100 {
        let (p, z) = random_kummer(&mut rng)?;
        let w = kummer_1f1(&p, z)?;
        let w1 = kummer_derivative(&p, z)?;
        let w2 = kummer_second_derivative(&p, z)?;
        let terms = [z * w2, (p.gamma - z) * w1, -p.alpha * w];
        let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        values.push(relative(terms.iter().sum::<C64>().norm(), scale));
    }
    Ok(Outcome::residual(stats_of(&values)?, 1e-9).note("residual relative to the largest term"))
}

fn specfun_gauss_euler(_: &Context<'_>) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut values = Vec::new();
    for _ in 0..100 {
        let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
        let b = c(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
        let cc = c(rng.gen_range(0.3..3.0), rng.gen_range(-1.0..1.0));
        let z = rng.gen_range(-0.9..0.9);
        let lhs = gauss_2f1(a, b, cc, z)?;
        let rhs = c(1.0 - z, 0.0).powc(cc - a - b) * gauss_2f1(cc - a, cc - b, cc, z)?;
        values.push(relative((lhs - rhs).norm(), lhs.norm().max(rhs.norm())));
    }
    Ok(Outcome::residual(stats_of(&values)?, 1e-10))
}

fn specfun_branch(_: &Context<'_>) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut values = Vec::new();
    for _ in 0..200 {
        let input = BranchInput {
            x: rng.gen_range(-5.0..5.0),
            y: rng.gen_range(0.1..10.0),
            lambda: c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            k: rng.gen_range(0..2u8),
        };
        let w = input.x * input.x - input.lambda * input.lambda * input.y * input.y;
        let s = branch_sqrt(&input)?;
        values.push(relative((s * s - w).norm(), w.norm()));
    }
    Ok(Outcome::residual(stats_of(&values)?, 1e-12))
}
