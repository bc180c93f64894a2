//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! status when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use almost_conv::generator::{Atom, Decay};
use almost_conv::tauberian::{
    abel_schedule, chain_report, fatou_check, hardy_littlewood_continuous, hardy_littlewood_discrete,
    laplace_schedule, residue_oac_estimate, ChainConfig,
};
use almost_conv::{
    ac_verdict, cesaro_sweep, convolution_invariance_residual, cyclic::cyclic_suite, render_continuous,
    render_discrete, spectral::default_delta_schedule, spectral_ac_verdict, AcStatus, AcVerdict, AnySignal,
    Complex64, DiscreteSignal, GeneratorSpec, Kernel, Sidedness, WindowSchedule,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), almost_conv::Error>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn limit_of(v: &AcVerdict) -> Option<Complex64> {
    (v.status == AcStatus::AlmostConvergent).then_some(v.limit).flatten()
}

fn alternating() -> Outcome {
    let s = render_discrete(&GeneratorSpec::character(0.5), 0, 1 << 16)?;
    let sched = WindowSchedule::dyadic(1, 10, Sidedness::OneSided)?;
    let v = ac_verdict(&cesaro_sweep(&s, &sched, 1.0)?, 1e-12);
    let ok = limit_of(&v).is_some_and(|l| l.norm() <= 1e-12) && v.uncertainty <= 1e-12;
    Ok((ok, format!("status {:?}, limit {:?}, uncertainty {:.1e}", v.status, v.limit, v.uncertainty)))
}

fn blocks() -> Outcome {
    let s = render_discrete(&GeneratorSpec::block_sequence(), 0, 1 << 20)?;
    let sched = WindowSchedule::dyadic(1, 8, Sidedness::OneSided)?;
    let v = ac_verdict(&cesaro_sweep(&s, &sched, 1.0)?, 1e-2);
    let gap = v.witness.map_or(0.0, |w| w.gap);
    Ok((v.status == AcStatus::NotAlmostConvergent && gap >= 0.98, format!("status {:?}, witness gap {gap:.4}", v.status)))
}

/// Cesàro (two-sided dyadic) and spectral verdicts on the same rendering.
fn both_routes(spec: &GeneratorSpec, target: Complex64, tol: f64) -> Outcome {
    let s = render_discrete(spec, -(1 << 14), 1 << 14)?;
    let sched = WindowSchedule::dyadic(2, 11, Sidedness::TwoSided)?;
    let cv = ac_verdict(&cesaro_sweep(&s, &sched, 1.0)?, tol);
    let sv = spectral_ac_verdict(&s, &default_delta_schedule(&s), tol)?;
    let (lc, ls) = (limit_of(&cv), limit_of(&sv));
    let ok = match (lc, ls) {
        (Some(a), Some(b)) => (a - target).norm() <= tol && (b - target).norm() <= tol && (a - b).norm() <= tol,
        _ => false,
    };
    Ok((ok, format!("cesaro {lc:?}, spectral {ls:?}, target {target}")))
}

fn character_seventh() -> Outcome {
    both_routes(&GeneratorSpec::character(1.0 / 7.0), c(0.0), 1e-2)
}

fn measure() -> Outcome {
    let spec = GeneratorSpec::MeasureTransform {
        atoms: vec![
            Atom { freq: 0.0, weight: c(0.3) },
            Atom { freq: 0.2, weight: c(0.35) },
            Atom { freq: -0.2, weight: c(0.35) },
        ],
        density: None,
    };
    both_routes(&spec, c(0.3), 1e-2)
}

fn dirichlet() -> Outcome {
    let spec = GeneratorSpec::DirichletLine {
        coeffs: vec![c(1.0); 3],
        sigma: 2.0,
        abscissa: 1.0,
    };
    let h = 0.05;
    let s = render_continuous(&spec, 0.0, h, 81_921)?;
    let sched = WindowSchedule::geometric(8.0 * h, 1024.0, 2.0, Sidedness::OneSided, false)?;
    let cv = ac_verdict(&cesaro_sweep(&s, &sched, h)?, 1e-2);
    let sv = spectral_ac_verdict(&s, &default_delta_schedule(&s), 1e-2)?;
    let close = |v: &AcVerdict| limit_of(v).is_some_and(|l| (l - c(1.0)).norm() <= 1e-2);
    Ok((close(&cv) && close(&sv), format!("cesaro {:?}, spectral {:?}", cv.limit, sv.limit)))
}

fn cyclic() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [8, 64, 256, 1024] {
        let r = cyclic_suite(n, 100, 2024, 1e-9)?;
        ok &= r.all_passed && r.fourier_round_trip.max_error <= 1e-12;
        detail.push(format!("N={n}: {} (round trip {:.1e})", if r.all_passed { "ok" } else { "failed" }, r.fourier_round_trip.max_error));
    }
    Ok((ok, detail.join("; ")))
}

fn residue() -> Outcome {
    let coeffs: Vec<Complex64> = (0..1 << 17).map(|n| c(if n % 2 == 0 { 1.0 } else { 0.0 })).collect();
    let r = residue_oac_estimate(&coeffs, 1.0, &abel_schedule(6, 12), 1e-12, 1e-3)?;
    let lc = limit_of(&r.cesaro);
    let ok = (r.alpha_est - c(0.5)).norm() <= 1e-3 && lc.is_some_and(|l| (l - c(0.5)).norm() <= 1e-3);
    Ok((ok, format!("alpha_est {}, cesaro {lc:?}", r.alpha_est)))
}

fn fatou() -> Outcome {
    let coeffs: Vec<Complex64> = (0..1 << 16).map(|n| c((n as f64 + 1.0) * 0.5f64.powi(n))).collect();
    let r = fatou_check(&coeffs, c(4.0), 1e-3)?;
    let s64 = r.sum_errors.iter().find(|e| e.0 == 64).map_or(f64::INFINITY, |e| e.1);
    let ok = s64 <= 1e-6 && r.oac_error.is_some_and(|e| e <= 1e-3) && r.tail_increment <= 1e-3;
    Ok((ok, format!("|s_64 - 4| {s64:.1e}, oac error {:?}, tail increment {:.1e}", r.oac_error, r.tail_increment)))
}

fn random_bounded(rng: &mut ChaCha8Rng, kind: usize, n: usize) -> Vec<Complex64> {
    match kind {
        0 => (0..n).map(|_| c(rng.random_range(-1.0..1.0))).collect(),
        1 => {
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                let len = rng.random_range(1..200);
                let v = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                out.extend(std::iter::repeat_n(c(v), len));
            }
            out.truncate(n);
            out
        }
        _ => {
            let terms: Vec<(f64, f64)> = (0..4).map(|_| (rng.random_range(-0.25..0.25), rng.random_range(-0.5..0.5))).collect();
            (0..n)
                .map(|i| terms.iter().map(|&(a, f)| Complex64::from_polar(a, std::f64::consts::TAU * f * i as f64)).sum())
                .collect()
        }
    }
}

/// Direct convolution, direct differencing and a running window sum at the
/// largest half-width.
fn brute_residual(x: &[Complex64], w: &[f64], first_offset: i64, k: usize) -> f64 {
    let kn = w.len();
    let last_offset = first_offset + kn as i64 - 1;
    let mut diff = Vec::new();
    for i in (kn - 1)..x.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &wj) in w.iter().enumerate() {
            acc += x[i - j] * wj;
        }
        // output i - (kn - 1) sits at position i - (kn - 1) + last_offset
        let pos = (i as i64 - (kn as i64 - 1) + last_offset) as usize;
        diff.push(x[pos] - acc);
    }
    let width = 2 * k + 1;
    let mut sum: Complex64 = diff[..width].iter().sum();
    let (mut hi, mut lo) = (Complex64::new(f64::MIN, f64::MIN), Complex64::new(f64::MAX, f64::MAX));
    for s in 0..=diff.len() - width {
        if s > 0 {
            sum += diff[s + width - 1] - diff[s - 1];
        }
        let m = sum / width as f64;
        hi = Complex64::new(hi.re.max(m.re), hi.im.max(m.im));
        lo = Complex64::new(lo.re.min(m.re), lo.im.min(m.im));
    }
    hi.norm().max(lo.norm())
}

fn lemma_residual() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kernel = Kernel::fejer(64);
    let sched = WindowSchedule::dyadic(4, 12, Sidedness::TwoSided)?;
    let mut res = Vec::new();
    let mut worst_oracle_gap: f64 = 0.0;
    for i in 0..50 {
        let x = random_bounded(&mut rng, i % 3, (1 << 15) + 1);
        let s = DiscreteSignal::new(0, x.clone())?;
        let r = convolution_invariance_residual(&s, &kernel, &sched)?;
        let oracle = brute_residual(&x, &kernel.weights, kernel.first_offset, 1 << 12);
        worst_oracle_gap = worst_oracle_gap.max((r - oracle).abs());
        res.push(r);
    }
    let max = res.iter().cloned().fold(0.0, f64::max);
    res.sort_by(|a, b| a.total_cmp(b));
    let median = 0.5 * (res[24] + res[25]);
    let ok = max <= 0.1 && median <= 0.03 && worst_oracle_gap <= 1e-9;
    Ok((ok, format!("max {max:.2e}, median {median:.2e}, oracle mismatch {worst_oracle_gap:.1e}")))
}

fn hardy_littlewood() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 1 << 17;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..20 {
        let period = rng.random_range(1..=8);
        let pattern: Vec<f64> = (0..period).map(|_| rng.random_range(-1.0..1.0)).collect();
        let amp = rng.random_range(-0.5..0.5);
        let tau = rng.random_range(5.0..100.0);
        let coeffs: Vec<Complex64> = (0..n).map(|i| c(pattern[i % period] + amp * (-(i as f64) / tau).exp())).collect();
        let r = hardy_littlewood_discrete(&coeffs, 1.5, 1.5, &abel_schedule(6, 12), 1e-10, 1e-2)?;
        let d = r.difference.unwrap_or(f64::INFINITY);
        ok &= r.cesaro.is_positive() && d <= 1e-2;
        worst = worst.max(d);
    }
    let gens = [
        GeneratorSpec::Convergent {
            limit: c(0.5),
            decay: Decay::Exponential { amplitude: c(1.0), rate: 0.5 },
        },
        GeneratorSpec::trig_poly(&[(c(1.0), 0.0), (c(0.5), 0.3), (c(0.5), -0.3)]),
        GeneratorSpec::MeasureTransform {
            atoms: vec![
                Atom { freq: 0.0, weight: c(0.7) },
                Atom { freq: 0.25, weight: c(0.2) },
                Atom { freq: -0.25, weight: c(0.2) },
            ],
            density: None,
        },
        GeneratorSpec::Convergent {
            limit: c(2.0),
            decay: Decay::Power { amplitude: c(1.0), exponent: 2.0 },
        },
        GeneratorSpec::DirichletLine {
            coeffs: vec![c(1.0); 3],
            sigma: 2.0,
            abscissa: 1.0,
        },
    ];
    let mut worst_c: f64 = 0.0;
    for g in &gens {
        let s = render_continuous(g, 0.0, 0.05, 81_921)?;
        let r = hardy_littlewood_continuous(&s, 1.0, &laplace_schedule(4, 7), 1e-6, 1e-2)?;
        let d = r.difference.unwrap_or(f64::INFINITY);
        ok &= r.cesaro.is_positive() && d <= 1e-2;
        worst_c = worst_c.max(d);
    }
    Ok((ok, format!("20 streams worst {worst:.1e}; 5 functions worst {worst_c:.1e}")))
}

fn corpus() -> Vec<(String, GeneratorSpec)> {
    let mut v = vec![
        ("character 0".into(), GeneratorSpec::character(0.0)),
        ("character 1/2".into(), GeneratorSpec::character(0.5)),
        ("character 1/7".into(), GeneratorSpec::character(1.0 / 7.0)),
        ("character 0.2".into(), GeneratorSpec::character(0.2)),
        ("trig poly".into(), GeneratorSpec::trig_poly(&[(c(1.0), 0.2), (c(1.0), -0.3), (c(0.5), 0.0)])),
        (
            "measure".into(),
            GeneratorSpec::MeasureTransform {
                atoms: vec![
                    Atom { freq: 0.0, weight: c(0.3) },
                    Atom { freq: 0.2, weight: c(0.35) },
                    Atom { freq: -0.2, weight: c(0.35) },
                ],
                density: None,
            },
        ),
        ("blocks".into(), GeneratorSpec::block_sequence()),
        ("partial sums of (-1)^n".into(), GeneratorSpec::partial_sums(GeneratorSpec::character(0.5))),
        (
            "dirichlet".into(),
            GeneratorSpec::DirichletLine {
                coeffs: vec![c(1.0); 3],
                sigma: 2.0,
                abscissa: 1.0,
            },
        ),
    ];
    for (name, decay) in [
        ("exp decay", Decay::Exponential { amplitude: c(1.0), rate: 0.1 }),
        ("power decay", Decay::Power { amplitude: c(1.0), exponent: 2.0 }),
    ] {
        v.push((name.into(), GeneratorSpec::Convergent { limit: c(0.25), decay }));
    }
    v
}

fn chain() -> Outcome {
    let mut total = 0;
    let mut failures = Vec::new();
    let config = ChainConfig::default();
    for (name, spec) in corpus() {
        let mut signals: Vec<(String, AnySignal)> = Vec::new();
        if let Ok(s) = render_discrete(&spec, 0, 1 << 16) {
            signals.push((format!("{name} on [0, 2^16]"), s.into()));
        }
        if let Ok(s) = render_discrete(&spec, -(1 << 15), 1 << 15) {
            signals.push((format!("{name} on [-2^15, 2^15]"), s.into()));
        }
        if let Ok(s) = render_continuous(&spec, 0.0, 0.25, 1 << 16) {
            signals.push((format!("{name} on 0.25 grid"), s.into()));
        }
        for (label, s) in signals {
            let r = match &s {
                AnySignal::Discrete(d) => chain_report(d, &config)?,
                AnySignal::Continuous(g) => chain_report(g, &config)?,
            };
            total += 1;
            if !r.consistency {
                failures.push(format!("{label}: {}", r.violations.join(", ")));
            }
        }
    }
    let ok = failures.is_empty() && total > 0;
    Ok((ok, format!("{} of {total} consistent{}", total - failures.len(), if ok { String::new() } else { format!(" [{}]", failures.join("; ")) })))
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let checks: [(&str, Check, Option<Duration>); 11] = [
        ("alternating sequence, one-sided dyadic windows", alternating, Some(Duration::from_secs(2))),
        ("doubling blocks are not almost convergent", blocks, Some(Duration::from_secs(10))),
        ("character 1/7, Cesaro and spectral routes agree on 0", character_seventh, None),
        ("measure transform tends to its atom at 0", measure, None),
        ("Dirichlet line tends to its first coefficient", dirichlet, None),
        ("cyclic identities for N in 8, 64, 256, 1024", cyclic, Some(Duration::from_secs(30))),
        ("simple pole residue against one-sided Cesaro limit", residue, None),
        ("partial sums of (n+1) 2^-n approach f(1) = 4", fatou, None),
        ("convolution invariance residual on random signals", lemma_residual, None),
        ("Abel and Laplace limits match Cesaro limits", hardy_littlewood, None),
        ("convergence chain consistency over the corpus", chain, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, d)) => (ok, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = ok && in_time;
        if !pass {
            failed += 1;
        }
        let budget_note = budget.map_or(String::new(), |b| format!(" (budget {:.0} s)", b.as_secs_f64()));
        println!(
            "{} [{:>2}] {name}: {detail}; {:.2} s{budget_note}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
