use std::process::ExitCode;
use std::time::Instant;

use taubnut_core::harness::config::Config;
use taubnut_core::harness::report::SuiteReport;
use taubnut_core::harness::suite::run_suite;

struct Criterion {
    label: &'static str,
    checks: &'static [&'static str],
    /// Wall-time budget in seconds for the listed checks together.
    budget_s: Option<f64>,
}

const CRITERIA: &[Criterion] = &[
    Criterion { label: "AC1 scalar flatness", checks: &["geometry.scalar_flat"], budget_s: Some(1.0) },
    Criterion {
        label: "AC2 Ricci closed form",
        checks: &["geometry.ricci_closed_form", "geometry.ricci_fd"],
        budget_s: None,
    },
    Criterion { label: "AC3 total mass", checks: &["geometry.total_mass"], budget_s: Some(1.0) },
    Criterion {
        label: "AC4 parallel spinors",
        checks: &["dirac.parallel_taub_nut", "dirac.parallel_negative_nut"],
        budget_s: None,
    },
    Criterion {
        label: "AC5 harmonic spinors",
        checks: &[
            "dirac.harmonic_plus",
            "dirac.harmonic_minus",
            "dirac.dmaxwell_minus",
            "norms.harmonic_minus",
            "norms.dmaxwell_minus",
            "norms.harmonic_plus_lower",
            "norms.harmonic_plus_tail",
        ],
        budget_s: None,
    },
    Criterion {
        label: "AC6 Rarita-Schwinger fields",
        checks: &[
            "rs.apply_taub_nut",
            "rs.divergence_taub_nut",
            "rs.apply_negative_nut",
            "rs.divergence_negative_nut",
            "norms.rs_taub_nut",
            "norms.rs_negative_nut_n1",
            "norms.rs_negative_nut_n2",
        ],
        budget_s: None,
    },
    Criterion {
        label: "AC7 massless Dirac separation",
        checks: &["separation.dirac_massless", "separation.dirac_massless_l2"],
        budget_s: None,
    },
    Criterion { label: "AC8 Kummer Dirac separation", checks: &["separation.dirac_kummer"], budget_s: None },
    Criterion {
        label: "AC9 Rarita-Schwinger separation",
        checks: &["separation.rs_massless", "separation.rs_massless_l2", "separation.rs_kummer"],
        budget_s: None,
    },
    Criterion {
        label: "AC10 special functions",
        checks: &["specfun.kummer_series", "specfun.kummer_ode", "specfun.gauss_euler", "specfun.branch"],
        budget_s: None,
    },
    Criterion { label: "AC11 ODE oracle", checks: &["separation.ode_oracle"], budget_s: None },
];

fn judge(suite: &SuiteReport, c: &Criterion) -> (bool, String) {
    let mut detail = Vec::new();
    let mut ok = true;
    let mut time = 0.0;
    for id in c.checks {
        match suite.get(id) {
            Some(r) => {
                ok &= r.passed;
                time += r.wall_time_s;
                if !r.passed {
                    let why = r.error.clone().unwrap_or_else(|| format!("computed {:e}, expected {:e}", r.computed, r.expected));
                    detail.push(format!("{id}: {why}"));
                }
            }
            None => {
                ok = false;
                detail.push(format!("{id}: not run"));
            }
        }
    }
    if let Some(b) = c.budget_s {
        if time >= b {
            ok = false;
            detail.push(format!("took {time:.3} s (budget {b} s)"));
        }
    }
    (ok, detail.join("; "))
}

fn main() -> ExitCode {
    let config = Config::default();
    let start = Instant::now();
    let suite = match run_suite(&config, &["all".to_string()], None) {
        Ok(s) => s,
        Err(e) => {
            println!("FAIL suite: {e}");
            return ExitCode::FAILURE;
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    let mut all = true;
    for c in CRITERIA {
        let (ok, detail) = judge(&suite, c);
        all &= ok;
        if ok {
            println!("PASS {}", c.label);
        } else {
            println!("FAIL {} ({detail})", c.label);
        }
    }
    let modes = config.modes.len();
    if modes < 3 {
        all = false;
        println!("FAIL AC7/AC9 need at least three mode triples, config has {modes}");
    }
    let fast = elapsed < 120.0;
    all &= fast;
    println!("{} full suite in {elapsed:.2} s (budget 120 s)", if fast { "PASS" } else { "FAIL" });
    let extra: Vec<_> = suite.reports.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    if !extra.is_empty() {
        all = false;
        println!("FAIL other checks: {}", extra.join(", "));
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
