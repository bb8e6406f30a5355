//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use warpzeta::diffpoly::rat_int;
use warpzeta::geometry::{BaseSpectralData, Geometry, Interval, Jet, WarpKind, WarpingFunction};
use warpzeta::heatkernel::heat_coefficients;
use warpzeta::ode::{solve_log_imaginary, BoundaryKind, OdeOptions};
use warpzeta::oracle::{fit_heat_coefficients, shoot_eigenvalues};
use warpzeta::wkb::{check_parity, compute_f, compute_omega, format_f_table, format_omega_table};
use warpzeta::zeta::{
    asymptotic_sum_limit_at_0, log_u_remainder, subtraction_constants, subtraction_constants_at,
    zero_mode_contribution, zero_mode_prime_by_quadrature, zeta_at_0, zeta_prime_at_0, AsymptoticTerm,
    MassExpansion, WkbTables, ZetaOptions,
};

const FLAT_ZETA_PRIME: f64 = 1.644_934_072_198_802_4;

fn geometry(kind: WarpKind) -> Geometry {
    Geometry::new(
        WarpingFunction::new(kind, Interval::new(0.0, 1.0).unwrap()).unwrap(),
        BaseSpectralData::circle(1.0, 16).unwrap(),
    )
}

fn flat() -> Geometry {
    geometry(WarpKind::Constant { value: 1.0 })
}

fn sine() -> Geometry {
    geometry(WarpKind::Sinusoidal {
        offset: 2.0,
        amplitude: 1.0,
        frequency: 1.0,
        phase: 0.0,
    })
}

fn exponential() -> Geometry {
    geometry(WarpKind::Exponential {
        amplitude: 1.0,
        rate: 0.5,
    })
}

/// Collects the failed sub-checks of one criterion.
#[derive(Default)]
struct Log {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Log {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn close(&mut self, what: &str, value: f64, want: f64, tol: f64) {
        let ok = (value - want).abs() <= tol;
        self.check(ok, format!("{what}: {value:.12e} vs {want:.12e} (tol {tol:e})"));
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

type Outcome = Result<Log, String>;

fn criterion_1() -> Outcome {
    let mut log = Log::default();
    let f = compute_f(3);
    log.check(
        format_f_table(&f) == include_str!("golden/f_table_i3.txt"),
        "F table differs from golden text",
    );
    let om = compute_omega(3);
    log.check(
        format_omega_table(&om) == include_str!("golden/omega_table_i3.txt"),
        "Omega table differs from golden text",
    );
    let entries = f.entries().filter(|(_, i, _)| *i <= 3).count();
    log.note(format!("{entries} F entries, {} Omega entries", om.entries().count()));
    Ok(log)
}

fn criterion_2() -> Outcome {
    let mut log = Log::default();
    let report = check_parity(6);
    log.check(report.s_violations.is_empty(), format!("S parity fails at {:?}", report.s_violations));
    log.check(
        report.even_cumulant_violations.is_empty(),
        format!("nonzero D at {:?}", report.even_cumulant_violations),
    );
    let f = compute_f(6);
    let jet = Jet::new(0.3, {
        let mut v = vec![0.0; 16];
        v[0] = 1.7;
        v
    })
    .map_err(|e| e.to_string())?;
    let mut count = 0;
    for (k, i, p) in f.entries() {
        for d in 1..=4 {
            let v = p.evaluate(&jet, &rat_int(d)).map_err(|e| e.to_string())?;
            log.check(v == 0.0, format!("F[{k},{i}] = {v} at constant f, d = {d}"));
        }
        count += 1;
    }
    log.note(format!("S_i up to i = {}, D_2i for i <= 6, {count} F entries", report.max_order));
    Ok(log)
}

fn criterion_3() -> Outcome {
    let mut log = Log::default();
    let g = flat();
    let h = heat_coefficients(&g, BoundaryKind::Dirichlet, 3).map_err(|e| e.to_string())?;
    let exact = [0.5, -PI.sqrt() / 2.0, 0.0, 0.0];
    let fit = fit_heat_coefficients(&g, BoundaryKind::Dirichlet, 75.0, (0.005, 0.04), 6).map_err(|e| e.to_string())?;
    for (n, want) in exact.into_iter().enumerate() {
        let a = h.entries[n].total;
        log.close(&format!("A_{n}/2 analytic"), a, want, 1e-8);
        let c = fit.coefficients[n];
        log.close(&format!("A_{n}/2 vs heat-trace fit"), a, c, 0.01 * c.abs().max(1.0));
    }
    log.note(format!(
        "fit over {} modes: {:?}",
        fit.modes,
        fit.coefficients[..4].iter().map(|c| format!("{c:.6}")).collect::<Vec<_>>()
    ));
    Ok(log)
}

fn criterion_4() -> Outcome {
    let mut log = Log::default();
    let g = flat();
    let mut opts = ZetaOptions::default();
    let z = zeta_at_0(&g, BoundaryKind::Dirichlet, &opts).map_err(|e| e.to_string())?;
    log.close("zeta(0)", z.value, 0.0, 1e-10);
    log.close("nonzero-mode part", z.nonzero_mode_part, 0.5, 1e-10);
    log.close("zero-mode part", z.zero_mode_part, -0.5, 1e-10);
    opts.finite.nu_cutoff = 1000.0;
    let r = zeta_prime_at_0(&g, BoundaryKind::Dirichlet, &opts).map_err(|e| e.to_string())?;
    log.close("zeta'(0)", r.zeta0_prime, 1.6449337, 1e-5);
    log.note(format!(
        "zeta'(0) = {:.12} (exact {FLAT_ZETA_PRIME:.12}), parts {}",
        r.zeta0_prime,
        r.breakdown
            .iter()
            .map(|t| format!("{}={:.9}", t.term, t.value))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    Ok(log)
}

fn criterion_5() -> Outcome {
    let mut log = Log::default();
    let g = flat();
    let opts = OdeOptions::default();
    let mut worst: f64 = 0.0;
    for nu in 1..=50 {
        for z in [0.0, 0.5, 2.0] {
            let nu = nu as f64;
            let k = nu * (1.0f64 + z * z).sqrt();
            let want = k + (-(-2.0 * k).exp()).ln_1p() - (2.0 * k).ln();
            let sol = solve_log_imaginary(&g, nu, z, BoundaryKind::Dirichlet, &opts).map_err(|e| e.to_string())?;
            let rel = ((sol.log_u() - want) / want).abs();
            worst = worst.max(rel);
            log.check(rel <= 1e-9, format!("nu = {nu}, z = {z}: relative error {rel:e}"));
        }
    }
    log.note(format!("worst relative error {worst:.2e}"));
    Ok(log)
}

/// Least-squares slope of `ln|y|` against `ln x`.
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (x, y) = (x.ln(), y.abs().ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn criterion_6() -> Outcome {
    let mut log = Log::default();
    let g = sine();
    let tables = WkbTables::new(3);
    let consts = subtraction_constants_at(&g, &tables, 3, 1.0).map_err(|e| e.to_string())?;
    let opts = OdeOptions::default();
    let nus: Vec<f64> = (0..=18).map(|k| 20.0 + 10.0 * k as f64).collect();
    let mut slopes = Vec::new();
    for l in 1..=3 {
        let mut pts = Vec::new();
        for &nu in &nus {
            let r = log_u_remainder(&g, &consts, nu, BoundaryKind::Dirichlet, l, &opts).map_err(|e| e.to_string())?;
            pts.push((nu, r));
        }
        let slope = loglog_slope(&pts);
        log.close(&format!("L = {l} decay exponent"), slope, -(l as f64 + 1.0), 0.2);
        slopes.push(format!("L={l}: {slope:.3}"));
    }
    log.note(format!("z = 1, nu in [20, 200]; {}", slopes.join(", ")));
    Ok(log)
}

fn criterion_7() -> Outcome {
    let mut log = Log::default();
    let g = flat();
    let mut worst: f64 = 0.0;
    for nu in 0..10 {
        let nu = nu as f64;
        let l = shoot_eigenvalues(&g, nu, BoundaryKind::Dirichlet, 20).map_err(|e| e.to_string())?;
        log.check(l.certified, format!("tower nu = {nu} not certified"));
        for e in &l.eigenvalues {
            let want = ((e.index + 1) as f64 * PI).powi(2) + nu * nu;
            let rel = (e.value / want - 1.0).abs();
            worst = worst.max(rel);
            log.check(rel <= 1e-8, format!("nu = {nu}, k = {}: relative error {rel:e}", e.index + 1));
        }
    }
    log.note(format!("200 eigenvalues, worst relative error {worst:.2e}"));
    Ok(log)
}

fn criterion_8() -> Outcome {
    let mut log = Log::default();
    let g = sine();
    let h = heat_coefficients(&g, BoundaryKind::Dirichlet, 1).map_err(|e| e.to_string())?;
    let weyl = (4.0 * PI).recip() * 2.0 * PI * (2.0 + 1.0 - 1f64.cos());
    log.close("A_0 vs Weyl", h.entries[0].total, weyl, 1e-8);

    let z = zeta_at_0(&g, BoundaryKind::Dirichlet, &ZetaOptions::default()).map_err(|e| e.to_string())?;
    let limit = asymptotic_sum_limit_at_0(&g, BoundaryKind::Dirichlet, 1, 1e-3).map_err(|e| e.to_string())?;
    log.close("zeta(0) vs Richardson limit", z.value, limit + z.zero_mode_part, 1e-6);

    let tables = WkbTables::new(1);
    for s in [0.75, 1.5] {
        let term = |i: i32, bc: BoundaryKind| {
            AsymptoticTerm::new(&g, &tables, i, bc, MassExpansion::MASSLESS)
                .and_then(|t| t.evaluate(&g, s))
                .map(|v| v.finite_part)
                .map_err(|e| e.to_string())
        };
        let (d1, n1) = (term(-1, BoundaryKind::Dirichlet)?, term(-1, BoundaryKind::Neumann)?);
        let (d0, n0) = (term(0, BoundaryKind::Dirichlet)?, term(0, BoundaryKind::Neumann)?);
        log.close(&format!("A^N_-1({s}) - A_-1({s})"), n1 - d1, 0.0, 1e-12);
        log.close(&format!("A^N_0({s}) + A_0({s})"), n0 + d0, 0.0, 1e-12);
    }
    log.note(format!("A_0 = {:.12}, zeta(0) = {:.12}", h.entries[0].total, z.value));
    Ok(log)
}

fn criterion_9() -> Outcome {
    let mut log = Log::default();
    let tables = WkbTables::new(6);
    let mut diffs = Vec::new();
    for (name, g) in [("constant", flat()), ("exp", exponential()), ("sin", sine())] {
        let consts = subtraction_constants(&g, &tables, 6).map_err(|e| e.to_string())?;
        let zm = zero_mode_contribution(&g, &consts, BoundaryKind::Dirichlet).map_err(|e| e.to_string())?;
        log.check(zm.zeta0 == -0.5, format!("{name}: zeta_0(0) = {}", zm.zeta0));
        let (fa, fb) = (g.warp().value(0.0), g.warp().value(1.0));
        let h0 = g.power_integral(-1.0).map_err(|e| e.to_string())?.value * fa;
        let boundary = -(2.0 * h0 * (fb / fa).sqrt()).ln();
        log.close(&format!("{name}: closed form"), zm.zeta0_prime, boundary, 1e-12);
        let direct = zero_mode_prime_by_quadrature(&g, &consts, &OdeOptions::default()).map_err(|e| e.to_string())?;
        log.close(&format!("{name}: z-quadrature"), direct, boundary, 1e-7);
        diffs.push(format!("{name} {:.1e}", (direct - boundary).abs()));
    }
    log.note(format!("|quadrature - boundary formula|: {}", diffs.join(", ")));
    Ok(log)
}

type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden F and Omega tables", criterion_1, 5),
        ("parity and constant-f structure", criterion_2, 5),
        ("flat cylinder heat coefficients", criterion_3, 30),
        ("flat cylinder zeta(0) and zeta'(0)", criterion_4, 60),
        ("flat ODE vs closed form", criterion_5, 10),
        ("WKB remainder decay", criterion_6, 60),
        ("oracle eigenvalues on flat cylinder", criterion_7, 60),
        ("consistency on 2 + sin r", criterion_8, 60),
        ("zero-mode sector", criterion_9, 60),
    ];
    let mut failed = 0;
    for (n, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(mut log) => {
                if elapsed > Duration::from_secs(*budget) {
                    log.failures.push(format!("runtime {:.2?} over budget {budget} s", elapsed));
                }
                let ok = log.failures.is_empty();
                let detail = if ok { log.notes.join("; ") } else { log.failures.join("; ") };
                (ok, detail)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name} [{:.2?}] {detail}",
            if ok { "PASS" } else { "FAIL" },
            n + 1,
            elapsed
        );
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
