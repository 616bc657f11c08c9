//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use riemann_accel::experiments::{fig2, fig3, Fig2Config, Fig3Config};
use riemann_accel::suites::{run_suite, CheckOutcome, Suite, SuiteOptions, SuiteReport};
use riemann_accel::Execution;

struct Verdict {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn select<'a>(r: &'a SuiteReport, prefixes: &[&str]) -> Vec<&'a CheckOutcome> {
    r.checks.iter().filter(|c| prefixes.iter().any(|p| c.name.starts_with(p))).collect()
}

fn summarize(checks: &[&CheckOutcome], min_samples: usize) -> (bool, String) {
    let ok = !checks.is_empty() && checks.iter().all(|c| c.passed() && c.samples >= min_samples);
    let worst = checks.iter().map(|c| c.worst_margin).fold(f64::INFINITY, f64::min);
    let failing: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
    let mut s = format!("{} checks, worst margin {worst:.3e}", checks.len());
    if !failing.is_empty() {
        s.push_str(&format!(", failing: {}", failing.join(", ")));
    }
    (ok, s)
}

fn timed(limit: Duration, elapsed: Duration, ok: bool, detail: String) -> (bool, String) {
    (ok && elapsed < limit, format!("{detail}, {:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()))
}

fn geometry(opts: &SuiteOptions) -> Vec<Verdict> {
    let r = run_suite(Suite::Geometry, opts).expect("geometry suite");
    let (ok, d) = summarize(&select(&r, &["round_trip[", "exp_log[", "transport_isometry["]), 1000);
    let (ok, d) = timed(Duration::from_secs(30), r.elapsed, ok, d);
    let mut out = vec![Verdict { name: "geometry primitives (3 spaces, 1000 samples)", ok, detail: d }];

    let (ok, d) = summarize(&select(&r, &["lemma_bracket[", "lemma_tightness["]), 200);
    let (ok, d) = timed(Duration::from_secs(60), r.elapsed, ok, d);
    out.push(Verdict { name: "log-pairing bracket and spherical tightness", ok, detail: d });

    let (ok, d) = summarize(&select(&r, &["cosine_law[", "right_triangle_equality["]), 1000);
    out.push(Verdict { name: "comparison cosine law and right-triangle equality", ok, detail: d });
    out
}

fn lyapunov(opts: &SuiteOptions) -> Vec<Verdict> {
    let r = run_suite(Suite::Lyapunov, opts).expect("lyapunov suite");
    let (ok1, d1) = summarize(&select(&r, &["energy_monotone["]), 1);
    let (ok2, d2) = summarize(&select(&r, &["rate_bound[", "gradient_flow_bound["]), 1000);
    vec![
        Verdict { name: "energy monotone (convex, wqc, sc)", ok: ok1 && select(&r, &["energy_monotone["]).len() == 3, detail: d1 },
        Verdict { name: "rate bounds and gradient-flow bounds", ok: ok2, detail: d2 },
    ]
}

fn fig2_slopes() -> Verdict {
    let start = Instant::now();
    let out = fig2(&Fig2Config::default(), Execution::Parallel).expect("fig2");
    let s = out.slope("sirnag", 100, 3000);
    let g = out.slope("rgd", 100, 3000);
    let ok = (-2.4..=-1.7).contains(&s) && (-1.3..=-0.7).contains(&g);
    let (ok, detail) = timed(
        Duration::from_secs(120),
        start.elapsed(),
        ok,
        format!("slopes sirnag {s:.4} in [-2.4, -1.7], rgd {g:.4} in [-1.3, -0.7]"),
    );
    Verdict { name: "rayleigh slopes (m = 500, cond = 1e4)", ok, detail }
}

fn fig3_ratios() -> Verdict {
    let start = Instant::now();
    let out = fig3(&Fig3Config::default(), Execution::Parallel).expect("fig3");
    let ratios = out.ratios();
    let ok = ratios.len() == 3 && ratios.iter().all(|r| (0.35..=0.65).contains(r));
    let txt: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    let (ok, detail) = timed(Duration::from_secs(120), start.elapsed(), ok, format!("peak ratios {}", txt.join(" ")));
    Verdict { name: "discretisation error halves with h", ok, detail }
}

fn reductions(opts: &SuiteOptions) -> Verdict {
    let r = run_suite(Suite::Reduction, opts).expect("reduction suite");
    let (ok, detail) = summarize(&r.checks.iter().collect::<Vec<_>>(), 1);
    Verdict { name: "euclidean reductions (nesterov, rgd)", ok, detail }
}

fn shadowing(opts: &SuiteOptions) -> Verdict {
    let r = run_suite(Suite::Shadowing, opts).expect("shadowing suite");
    let (ok, mut detail) = summarize(&select(&r, &["defect_order", "euclidean_shadowing", "hyperbolic_precondition_reported"]), 1);
    let stated = r.notes.iter().any(|n| n.contains("precondition_holds: false"));
    if let Some(c) = r.check("defect_order") {
        detail.push_str(&format!("; {}", c.detail));
    }
    Verdict { name: "shadowing (defect order, euclidean bound, hyperbolic precondition)", ok: ok && stated, detail }
}

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    let start = Instant::now();
    let mut verdicts = geometry(&opts);
    verdicts.extend(lyapunov(&opts));
    verdicts.push(fig2_slopes());
    verdicts.push(fig3_ratios());
    verdicts.push(reductions(&opts));
    verdicts.push(shadowing(&opts));

    let mut failed = 0;
    for v in &verdicts {
        println!("{} {} -- {}", if v.ok { "PASS" } else { "FAIL" }, v.name, v.detail);
        failed += usize::from(!v.ok);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        verdicts.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
