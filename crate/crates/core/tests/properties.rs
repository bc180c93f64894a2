use almost_conv::cyclic::{
    annihilator, circular_convolve, ideal_for, same_span, spectrum_of, zn_fourier, zn_inverse, CyclicFunction,
};
use almost_conv::spectral::{default_delta_schedule, dft, idft};
use almost_conv::tauberian::{abel_sweep, laplace_sweep};
use almost_conv::{
    ac_verdict, cesaro_sweep, convolve, highpass_project, shift_extremes, spectral_ac_verdict, window_average,
    admissible_shifts, Complex64, ContinuousSignal, DiscreteSignal, Kernel, Sampled, Sidedness, WindowSchedule,
};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn complex_vec(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b)), len)
}

fn side() -> impl Strategy<Value = Sidedness> {
    prop_oneof![Just(Sidedness::OneSided), Just(Sidedness::TwoSided)]
}

fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| v * Complex64::from_polar(1.0, -TAU * (j * k % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

/// Direct extremes of window means over every admissible shift.
fn brute_extremes(s: &DiscreteSignal, len: usize, side: Sidedness) -> Option<(Complex64, Complex64)> {
    let v = s.values();
    let (lo_off, width) = match side {
        Sidedness::TwoSided => (-(len as i64), 2 * len + 1),
        Sidedness::OneSided => (0, len),
    };
    let mut hi = Complex64::new(f64::MIN, f64::MIN);
    let mut lo = Complex64::new(f64::MAX, f64::MAX);
    let mut any = false;
    for start in 0..v.len() {
        let shift = s.n_min() + start as i64 - lo_off;
        if start + width > v.len() || (side == Sidedness::OneSided && shift < 0) {
            continue;
        }
        any = true;
        let m: Complex64 = v[start..start + width].iter().sum::<Complex64>() / width as f64;
        hi = Complex64::new(hi.re.max(m.re), hi.im.max(m.im));
        lo = Complex64::new(lo.re.min(m.re), lo.im.min(m.im));
    }
    any.then_some((hi, lo))
}

fn extremes(s: &DiscreteSignal, len: usize, side: Sidedness) -> (Complex64, Complex64) {
    let grid = admissible_shifts(s, len as f64, side, 1.0).unwrap();
    let e = shift_extremes(s, len as f64, side, &grid).unwrap();
    (e.sup, e.inf)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extremes_match_direct_sweep(v in complex_vec(20..200), n_min in -50i64..50, len in 1usize..9, side in side()) {
        let s = DiscreteSignal::new(n_min, v).unwrap();
        if let Some((hi, lo)) = brute_extremes(&s, len, side) {
            let (sup, inf) = extremes(&s, len, side);
            prop_assert!(close(sup, hi, 1e-12) && close(inf, lo, 1e-12));
        }
    }

    #[test]
    fn upper_dominates_lower(v in complex_vec(40..200), len in 1usize..10, side in side()) {
        let s = DiscreteSignal::new(0, v).unwrap();
        let (sup, inf) = extremes(&s, len, side);
        prop_assert!(inf.re <= sup.re && inf.im <= sup.im);
    }

    #[test]
    fn upper_functional_is_sublinear(a in complex_vec(64..65), b in complex_vec(64..65), t in 0.0..4.0f64, len in 1usize..8) {
        let sig = |v: Vec<Complex64>| DiscreteSignal::new(0, v).unwrap();
        let sum: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let scaled: Vec<Complex64> = a.iter().map(|x| x * t).collect();
        let neg: Vec<Complex64> = a.iter().map(|x| -x).collect();
        let (pa, la) = extremes(&sig(a.clone()), len, Sidedness::TwoSided);
        let (pb, _) = extremes(&sig(b), len, Sidedness::TwoSided);
        let (ps, _) = extremes(&sig(sum), len, Sidedness::TwoSided);
        let (pt, _) = extremes(&sig(scaled), len, Sidedness::TwoSided);
        let (pn, _) = extremes(&sig(neg), len, Sidedness::TwoSided);
        prop_assert!(ps.re <= pa.re + pb.re + 1e-12 && ps.im <= pa.im + pb.im + 1e-12);
        prop_assert!(close(pt, pa * t, 1e-12));
        // lower functional is the reflection of the upper one
        prop_assert!(close(pn, -la, 1e-12));
    }

    #[test]
    fn translation_leaves_sweep_unchanged(v in complex_vec(80..200), n_min in -100i64..100, d in 1i64..40) {
        let sched = WindowSchedule::dyadic(1, 4, Sidedness::TwoSided).unwrap();
        let a = cesaro_sweep(&DiscreteSignal::new(n_min, v.clone()).unwrap(), &sched, 1.0).unwrap();
        let b = cesaro_sweep(&DiscreteSignal::new(n_min + d, v).unwrap(), &sched, 1.0).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            prop_assert!(close(x.extremes.sup, y.extremes.sup, 1e-12));
            prop_assert!(close(x.extremes.inf, y.extremes.inf, 1e-12));
        }
    }

    #[test]
    fn window_average_of_constant(value in -3.0..3.0f64, len in 1usize..20, side in side()) {
        let s = DiscreteSignal::from_real(0, &vec![value; 100]).unwrap();
        let m = window_average(&s, len as f64, 40.0, side).unwrap();
        prop_assert!((m.re - value).abs() <= 1e-12);
    }

    #[test]
    fn fft_round_trip_and_oracle(v in complex_vec(1..130)) {
        let f = dft(&v);
        let oracle = naive_dft(&v);
        let scale = v.len() as f64;
        for (a, b) in f.iter().zip(&oracle) {
            prop_assert!(close(*a, *b, 1e-11 * scale));
        }
        for (a, b) in idft(&f).iter().zip(&v) {
            prop_assert!(close(*a, *b, 1e-12));
        }
    }

    #[test]
    fn convolution_support_and_values(v in complex_vec(30..120), w in prop::collection::vec(0.01..1.0f64, 1..12), first in -6i64..6, n_min in -20i64..20) {
        let total: f64 = w.iter().sum();
        let k = Kernel::new(first, w.iter().map(|x| x / total).collect()).unwrap();
        let s = DiscreteSignal::new(n_min, v.clone()).unwrap();
        let out = convolve(&s, &k).unwrap();
        let last = first + w.len() as i64 - 1;
        prop_assert_eq!(out.n_min(), n_min + last);
        prop_assert_eq!(out.len(), v.len() + 1 - w.len());
        for (i, &y) in out.values().iter().enumerate() {
            let n = out.n_min() + i as i64;
            let direct: Complex64 = k
                .weights
                .iter()
                .enumerate()
                .map(|(j, &wj)| v[(n - (first + j as i64) - n_min) as usize] * wj)
                .sum();
            prop_assert!(close(y, direct, 1e-12));
        }
    }

    #[test]
    fn smoothing_never_widens_the_gap(v in complex_vec(120..240), w in prop::collection::vec(0.01..1.0f64, 1..16), len in 1usize..16) {
        let total: f64 = w.iter().sum();
        let k = Kernel::new(0, w.iter().map(|x| x / total).collect()).unwrap();
        let s = DiscreteSignal::new(0, v).unwrap();
        let smooth = convolve(&s, &k).unwrap();
        let (p, l) = extremes(&s, len, Sidedness::TwoSided);
        let (ps, ls) = extremes(&smooth, len, Sidedness::TwoSided);
        prop_assert!(ps.re <= p.re + 1e-12 && ps.im <= p.im + 1e-12);
        prop_assert!(ls.re >= l.re - 1e-12 && ls.im >= l.im - 1e-12);
    }

    #[test]
    fn nonnegative_data_keeps_nonnegative_means(v in prop::collection::vec(0.0..1.0f64, 4096..4097), len in 1usize..64) {
        let s = DiscreteSignal::from_real(0, &v).unwrap();
        let (_, inf) = extremes(&s, len, Sidedness::OneSided);
        prop_assert!(inf.re >= 0.0);
        let coeffs: Vec<Complex64> = v.iter().map(|&x| c(x)).collect();
        let sweep = abel_sweep(&coeffs, 1.0, &[0.5, 0.9, 0.99], 1e-12).unwrap();
        prop_assert!(sweep.values.iter().all(|m| m.re >= 0.0));
        let g = ContinuousSignal::new(0.0, 0.1, coeffs.iter().map(|x| -x).collect()).unwrap();
        let lap = laplace_sweep(&g, &[1.0, 0.5, 0.25], 1e-9).unwrap();
        prop_assert!(lap.values.iter().all(|m| m.re <= 0.0));
    }

    #[test]
    fn abel_mean_of_geometric_stream(q in -0.9..0.9f64, x in prop_oneof![Just(0.5), Just(0.9), Just(0.99)]) {
        let coeffs: Vec<Complex64> = (0..8192).map(|n| c(q.powi(n))).collect();
        let s = abel_sweep(&coeffs, 1.0, &[x], 1e-13).unwrap();
        let exact = (1.0 - x) / (1.0 - q * x);
        prop_assert!((s.values[0].re - exact).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cyclic_double_annihilator(n in 1usize..40, vecs in prop::collection::vec(complex_vec(40..41), 0..6)) {
        let basis: Vec<CyclicFunction> = vecs.iter().map(|v| CyclicFunction::new(v[..n].to_vec()).unwrap()).collect();
        let perp = annihilator(&basis, n).unwrap();
        prop_assert_eq!(perp.input_rank + perp.dimension(), n);
        let back = annihilator(&perp.basis, n).unwrap();
        prop_assert!(same_span(&basis, &back.basis, n, 1e-9).unwrap());
    }

    #[test]
    fn cyclic_convolution_theorem(v in complex_vec(1..64), w in complex_vec(64..65)) {
        let n = v.len();
        let f = CyclicFunction::new(v).unwrap();
        let g = CyclicFunction::new(w[..n].to_vec()).unwrap();
        let lhs = zn_fourier(&circular_convolve(&f, &g).unwrap());
        let (fh, gh) = (zn_fourier(&f), zn_fourier(&g));
        for l in 0..n {
            prop_assert!(close(lhs.values[l], fh.values[l] * gh.values[l], 1e-10 * n as f64));
        }
        let back = zn_inverse(&fh);
        for (a, b) in back.values.iter().zip(&f.values) {
            prop_assert!(close(*a, *b, 1e-12));
        }
    }

    #[test]
    fn cyclic_ideal_correspondence(n in 1usize..48, picks in prop::collection::vec(0usize..48, 0..10)) {
        let set: Vec<usize> = picks.into_iter().filter(|&l| l < n).collect();
        let ideal = ideal_for(&set, n).unwrap();
        let mut dedup = set.clone();
        dedup.sort_unstable();
        dedup.dedup();
        prop_assert_eq!(ideal.dimension(), n - dedup.len());
        let ann = annihilator(&ideal.basis, n).unwrap();
        let chars: Vec<CyclicFunction> = dedup.iter().map(|&l| CyclicFunction::character(n, l)).collect();
        prop_assert!(same_span(&ann.basis, &chars, n, 1e-9).unwrap());
    }

    #[test]
    fn empty_spectrum_only_for_zero(v in complex_vec(1..50)) {
        let f = CyclicFunction::new(v).unwrap();
        let zero = CyclicFunction::zero(f.n());
        prop_assert!(spectrum_of(&zero, 1e-9).is_empty());
        prop_assert_eq!(spectrum_of(&f, 1e-9).is_empty(), f.sup_norm() == 0.0);
    }
}

fn trig(terms: &[(f64, f64)], n_min: i64, len: usize) -> DiscreteSignal {
    let v: Vec<Complex64> = (0..len)
        .map(|i| {
            let x = (n_min + i as i64) as f64;
            terms.iter().map(|&(a, f)| Complex64::from_polar(a, TAU * f * x)).sum()
        })
        .collect();
    DiscreteSignal::new(n_min, v).unwrap()
}

/// Frequencies kept clear of the transition band `(delta / 2, delta)`.
fn band_freq(delta: f64) -> impl Strategy<Value = f64> {
    prop_oneof![-0.45 * delta..0.45 * delta, 1.05 * delta..0.5, -0.5..-1.05 * delta]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn highpass_is_idempotent(terms in prop::collection::vec((-1.0..1.0f64, band_freq(0.05)), 1..5)) {
        let s = trig(&terms, 0, 4096);
        let once = highpass_project(&s, 0.05).unwrap().filtered;
        let twice = highpass_project(&once, 0.05).unwrap().filtered;
        let off = (twice.n_min() - once.n_min()) as usize;
        let scale: f64 = terms.iter().map(|t| t.0.abs()).sum::<f64>().max(1e-3);
        for (i, &y) in twice.values().iter().enumerate() {
            prop_assert!(close(y, once.values()[i + off], 1e-9 * scale));
        }
    }

    #[test]
    fn cesaro_and_spectral_routes_agree(a0 in -1.0..1.0f64, terms in prop::collection::vec((-0.3..0.3f64, prop_oneof![0.05..0.45f64, -0.45..-0.05f64]), 0..4)) {
        let mut all = terms.clone();
        all.push((a0, 0.0));
        let s = trig(&all, -(1 << 12), (1 << 13) + 1);
        let sched = WindowSchedule::dyadic(2, 9, Sidedness::TwoSided).unwrap();
        let cv = ac_verdict(&cesaro_sweep(&s, &sched, 1.0).unwrap(), 1e-2);
        let sv = spectral_ac_verdict(&s, &default_delta_schedule(&s), 1e-2).unwrap();
        let (lc, ls) = (cv.limit.unwrap(), sv.limit.unwrap());
        prop_assert!(cv.is_positive() && sv.is_positive());
        prop_assert!(close(lc, c(a0), 1e-2) && close(ls, c(a0), 1e-2) && close(lc, ls, 1e-2));
    }
}
