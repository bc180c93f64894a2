//! Abel and Laplace boundary means, Fatou-type partial-sum checks, weak*
//! limits of translates, and the implication chain
//! `convergent => weak* convergent => almost convergent`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cesaro::{ac_verdict, cesaro_sweep, default_schedule, AcStatus, AcVerdict};
use crate::error::{Error, Result};
use crate::signal::{ContinuousSignal, DiscreteSignal, Sampled, Sidedness, WindowSchedule};
use crate::spectral::{convolve, Kernel};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeanMethod {
    /// `(1 - x) sum a_n x^n` as `x -> 1-`.
    Abel,
    /// `x int_0^inf psi(t) e^{-x t} dt` as `x -> 0+`.
    Laplace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSweep {
    pub method: MeanMethod,
    pub abscissas: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Certified bound on the truncated tail at each abscissa.
    pub tail_bounds: Vec<f64>,
    /// Quadratic extrapolation to the boundary through the last three points.
    pub extrapolated_limit: Option<Complex64>,
}

impl MeanSweep {
    /// Distance of each abscissa from the boundary point.
    fn distances(&self) -> Vec<f64> {
        match self.method {
            MeanMethod::Abel => self.abscissas.iter().map(|x| 1.0 - x).collect(),
            MeanMethod::Laplace => self.abscissas.clone(),
        }
    }

    /// `abscissa,re,im,tail_bound`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["abscissa", "re", "im", "tail_bound"])?;
        for ((x, v), t) in self.abscissas.iter().zip(&self.values).zip(&self.tail_bounds) {
            w.write_record([x.to_string(), v.re.to_string(), v.im.to_string(), t.to_string()])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
            .expect("csv writer emits utf-8"))
    }
}

/// Value at `h = 0` of the polynomial through `(h_i, v_i)` (Lagrange form).
pub fn extrapolate_to_zero(h: &[f64], v: &[Complex64]) -> Complex64 {
    let n = h.len();
    (0..n)
        .map(|i| {
            let w: f64 = (0..n).filter(|&j| j != i).map(|j| h[j] / (h[j] - h[i])).product();
            v[i] * w
        })
        .sum()
}

fn finish(mut sweep: MeanSweep) -> MeanSweep {
    let n = sweep.values.len();
    let lo = n.saturating_sub(3);
    let h = sweep.distances();
    sweep.extrapolated_limit = (n > 0).then(|| extrapolate_to_zero(&h[lo..], &sweep.values[lo..]));
    sweep
}

/// `x_j = 1 - 2^{-j}` for `j = lo..=hi`.
pub fn abel_schedule(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect()
}

/// `x_j = 2^{-j}` for `j = lo..=hi`.
pub fn laplace_schedule(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|j| 0.5f64.powi(j as i32)).collect()
}

/// Six radii `1 - 2^{-j}` ending at the largest `j` whose truncation index
/// fits in `len` coefficients.
pub fn default_abel_schedule(len: usize, bound: f64, eps_tail: f64) -> Result<Vec<f64>> {
    let hi = (1..=40u32)
        .take_while(|&j| abel_cutoff(1.0 - 0.5f64.powi(j as i32), bound, eps_tail) < len)
        .last()
        .ok_or(Error::TooShort { len, min: abel_cutoff(0.5, bound, eps_tail) + 1 })?;
    Ok(abel_schedule(hi.saturating_sub(5).max(1), hi))
}

/// Four abscissas `2^{-j}` ending at the smallest `x` whose Laplace tail
/// over the sampled span stays below `tail_tol * x`.
pub fn default_laplace_schedule(signal: &ContinuousSignal, tail_tol: f64) -> Result<Vec<f64>> {
    let (b, t_end) = (signal.bound(), signal.end());
    let hi = (0..=40u32)
        .take_while(|&j| {
            let x = 0.5f64.powi(j as i32);
            b * (-x * t_end).exp() <= tail_tol * x
        })
        .last()
        .ok_or_else(|| {
            let span = (b / tail_tol).ln().max(0.0);
            Error::TooShort { len: signal.len(), min: (span / signal.step()).ceil() as usize + 1 }
        })?;
    Ok(laplace_schedule(hi.saturating_sub(3), hi))
}

/// Last index summed at radius `x` so that `B x^{M+1} <= eps`.
pub fn abel_cutoff(x: f64, bound: f64, eps: f64) -> usize {
    if bound <= eps {
        return 0;
    }
    ((eps / bound).ln() / x.ln()).ceil().max(0.0) as usize
}

/// `(1 - x) sum_{n <= M(x)} a_n x^n` along `x_schedule`, each truncated where
/// the tail `(1 - x) sum_{n > M} B x^n = B x^{M+1}` is at most `eps_tail`.
pub fn abel_sweep(coeffs: &[Complex64], bound: f64, x_schedule: &[f64], eps_tail: f64) -> Result<MeanSweep> {
    if x_schedule.is_empty() || x_schedule.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::InvalidArgument("Abel radii must lie in (0, 1)".into()));
    }
    if x_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("Abel radii must increase toward 1".into()));
    }
    if !(eps_tail > 0.0) || !(bound >= 0.0) {
        return Err(Error::InvalidArgument("need eps_tail > 0 and bound >= 0".into()));
    }
    if let Some(a) = coeffs.iter().find(|a| a.norm() > bound * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!("coefficient {a} exceeds bound {bound}")));
    }
    let rows = x_schedule
        .par_iter()
        .map(|&x| {
            let m = abel_cutoff(x, bound, eps_tail);
            if m >= coeffs.len() {
                return Err(Error::InsufficientCoefficients {
                    x,
                    needed: m + 1,
                    available: coeffs.len(),
                });
            }
            // Horner from the top keeps the rounding error at the level of the
            // terms themselves
            let s = coeffs[..=m].iter().rev().fold(ZERO, |acc, &a| acc * x + a);
            Ok(((1.0 - x) * s, bound * x.powf(m as f64 + 1.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(MeanSweep {
        method: MeanMethod::Abel,
        abscissas: x_schedule.to_vec(),
        values: rows.iter().map(|r| r.0).collect(),
        tail_bounds: rows.iter().map(|r| r.1).collect(),
        extrapolated_limit: None,
    }))
}

/// `x * int_0^T psi(t) e^{-x t} dt` by the trapezoid rule, for a signal
/// sampled from `t = 0`. Requires `B e^{-x T} <= tail_tol * x`.
pub fn laplace_sweep(signal: &ContinuousSignal, x_schedule: &[f64], tail_tol: f64) -> Result<MeanSweep> {
    if signal.x0() != 0.0 {
        return Err(Error::InvalidArgument("Laplace sweeps need samples starting at t = 0".into()));
    }
    if signal.len() < 2 {
        return Err(Error::TooShort { len: signal.len(), min: 2 });
    }
    if x_schedule.is_empty() || x_schedule.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidArgument("Laplace abscissas must be positive".into()));
    }
    if x_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("Laplace abscissas must decrease toward 0".into()));
    }
    let (h, b, t_end) = (signal.step(), signal.bound(), signal.end());
    let rows = x_schedule
        .par_iter()
        .map(|&x| {
            let tail = b * (-x * t_end).exp();
            if tail > tail_tol * x {
                return Err(Error::TailNotControlled {
                    x,
                    bound: tail,
                    allowed: tail_tol * x,
                });
            }
            let s = signal.samples();
            let last = s.len() - 1;
            let integral: Complex64 = s
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let w = if j == 0 || j == last { 0.5 } else { 1.0 };
                    v * (w * (-x * j as f64 * h).exp())
                })
                .sum::<Complex64>()
                * h;
            Ok((x * integral, tail))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(MeanSweep {
        method: MeanMethod::Laplace,
        abscissas: x_schedule.to_vec(),
        values: rows.iter().map(|r| r.0).collect(),
        tail_bounds: rows.iter().map(|r| r.1).collect(),
        extrapolated_limit: None,
    }))
}

/// Dyadic one-sided schedule `2, 4, ...` up to a quarter of `len`.
pub fn stream_schedule(len: usize) -> Result<WindowSchedule> {
    let top = (len / 4).max(2).ilog2();
    if top < 3 {
        return Err(Error::TooShort { len, min: 32 });
    }
    WindowSchedule::dyadic(1, top, Sidedness::OneSided)
}

/// One-sided Cesàro verdict of a stream indexed from 0.
pub fn stream_oac_verdict(values: &[Complex64], tol: f64) -> Result<AcVerdict> {
    let s = DiscreteSignal::new(0, values.to_vec())?;
    let sweep = cesaro_sweep(&s, &stream_schedule(values.len())?, 1.0)?;
    Ok(ac_verdict(&sweep, tol))
}

/// Real and imaginary parts both at least `-c`.
pub fn bounded_below(values: &[Complex64], c: f64) -> bool {
    values.iter().all(|v| v.re >= -c && v.im >= -c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueReport {
    /// Extrapolated `lim (1 - x) f(x)`.
    pub alpha_est: Complex64,
    /// Residue of `f` at `z = 1`, equal to `-alpha_est`.
    pub residue: Complex64,
    pub cesaro: AcVerdict,
    /// `|alpha_est - cesaro limit|` when the one-sided verdict is positive.
    pub agreement: Option<f64>,
    pub sweep: MeanSweep,
}

/// Abel limit of a coefficient stream alongside its one-sided Cesàro limit.
/// A simple pole of `f = sum a_n z^n` at 1 with residue `r` makes the stream
/// one-sided almost convergent to `-r`.
pub fn residue_oac_estimate(
    coeffs: &[Complex64],
    bound: f64,
    x_schedule: &[f64],
    eps_tail: f64,
    cesaro_tol: f64,
) -> Result<ResidueReport> {
    let sweep = abel_sweep(coeffs, bound, x_schedule, eps_tail)?;
    let alpha_est = sweep.extrapolated_limit.expect("schedule is nonempty");
    let cesaro = stream_oac_verdict(coeffs, cesaro_tol)?;
    let agreement = cesaro.limit.map(|l| (alpha_est - l).norm());
    Ok(ResidueReport {
        alpha_est,
        residue: -alpha_est,
        cesaro,
        agreement,
        sweep,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyLittlewoodReport {
    pub cesaro: AcVerdict,
    pub boundary_limit: Complex64,
    /// `|boundary limit - cesaro limit|` when the Cesàro verdict is positive.
    pub difference: Option<f64>,
    pub consistent: bool,
    pub sweep: MeanSweep,
}

/// Abel limit against one-sided Cesàro limit for a stream bounded below by
/// `-lower`.
pub fn hardy_littlewood_discrete(
    coeffs: &[Complex64],
    bound: f64,
    lower: f64,
    x_schedule: &[f64],
    eps_tail: f64,
    tol: f64,
) -> Result<HardyLittlewoodReport> {
    if !bounded_below(coeffs, lower) {
        return Err(Error::HypothesisViolated(format!("stream is not bounded below by {}", -lower + 0.0)));
    }
    let sweep = abel_sweep(coeffs, bound, x_schedule, eps_tail)?;
    let cesaro = stream_oac_verdict(coeffs, tol)?;
    Ok(hl_report(sweep, cesaro, tol))
}

/// Laplace limit against the one-sided Cesàro limit of a function on `R_+`
/// bounded below by `-lower`.
pub fn hardy_littlewood_continuous(
    signal: &ContinuousSignal,
    lower: f64,
    x_schedule: &[f64],
    tail_tol: f64,
    tol: f64,
) -> Result<HardyLittlewoodReport> {
    if !bounded_below(signal.samples(), lower) {
        return Err(Error::HypothesisViolated(format!("function is not bounded below by {}", -lower + 0.0)));
    }
    let sweep = laplace_sweep(signal, x_schedule, tail_tol)?;
    let schedule = continuous_schedule(signal)?;
    let cesaro = ac_verdict(&cesaro_sweep(signal, &schedule, signal.step())?, tol);
    Ok(hl_report(sweep, cesaro, tol))
}

/// Doubling one-sided window lengths from 8 samples up to a quarter of the
/// sampled interval.
pub fn continuous_schedule(signal: &ContinuousSignal) -> Result<WindowSchedule> {
    let span = signal.end() - signal.x0();
    let first = 8.0 * signal.step();
    if span / 4.0 < 4.0 * first {
        return Err(Error::TooShort { len: signal.len(), min: 128 });
    }
    WindowSchedule::geometric(first, span / 4.0, 2.0, Sidedness::OneSided, false)
}

fn hl_report(sweep: MeanSweep, cesaro: AcVerdict, tol: f64) -> HardyLittlewoodReport {
    let boundary_limit = sweep.extrapolated_limit.expect("schedule is nonempty");
    let difference = cesaro.limit.map(|l| (boundary_limit - l).norm());
    HardyLittlewoodReport {
        consistent: difference.is_none_or(|d| d <= tol),
        cesaro,
        boundary_limit,
        difference,
        sweep,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FatouReport {
    pub pass: bool,
    pub partial_sum: Complex64,
    pub sum_error: f64,
    /// `(N, |s_N - f(1)|)` at `N = 1, 2, 4, ...`.
    pub sum_errors: Vec<(usize, f64)>,
    pub oac: AcVerdict,
    pub oac_error: Option<f64>,
    /// Largest `|s_{n+1} - s_n|` over the last quarter of the stream.
    pub tail_increment: f64,
}

/// For a stream with `a_n -> 0` and a declared value `f(1)`: the partial sums
/// approach `f(1)`, are one-sided almost convergent to it, and have
/// vanishing increments.
pub fn fatou_check(coeffs: &[Complex64], f1: Complex64, tol: f64) -> Result<FatouReport> {
    let n = coeffs.len();
    if n < 32 {
        return Err(Error::TooShort { len: n, min: 32 });
    }
    let head = coeffs[..n / 4].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let tail = coeffs[3 * n / 4..].iter().map(|a| a.norm()).fold(0.0, f64::max);
    if tail > tol && tail > 0.01 * head {
        return Err(Error::HypothesisViolated(format!(
            "coefficients do not decay: tail max {tail:.3e} against head max {head:.3e}"
        )));
    }
    let sums: Vec<Complex64> = coeffs
        .iter()
        .scan(ZERO, |s, &a| {
            *s += a;
            Some(*s)
        })
        .collect();
    let partial_sum = sums[n - 1];
    let sum_error = (partial_sum - f1).norm();
    let sum_errors = (0..)
        .map(|j| 1usize << j)
        .take_while(|&k| k < n)
        .map(|k| (k, (sums[k] - f1).norm()))
        .collect();
    let oac = stream_oac_verdict(&sums, tol)?;
    let oac_error = oac.limit.map(|l| (l - f1).norm());
    let tail_increment = tail;
    Ok(FatouReport {
        pass: sum_error <= tol && oac_error.is_some_and(|e| e <= tol) && tail_increment <= tol,
        partial_sum,
        sum_error,
        sum_errors,
        oac,
        oac_error,
        tail_increment,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitStatus {
    Converges,
    DoesNotConverge,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitVerdict {
    pub status: LimitStatus,
    pub limit: Option<Complex64>,
    /// Largest distance from the tail mean over the tail of the schedule.
    pub spread: f64,
    pub tail_points: usize,
}

impl LimitVerdict {
    pub fn is_positive(&self) -> bool {
        self.status == LimitStatus::Converges
    }
}

/// Grid positions at geometrically growing distances from the origin, on
/// both sides when the data extend there, ordered by distance.
pub fn default_shift_schedule<S: Sampled>(signal: &S) -> Vec<f64> {
    let l = signal.lattice();
    let (lo, hi) = (l.origin(), signal.end());
    let step = l.step();
    let reach = lo.abs().max(hi.abs());
    let mut out: Vec<f64> = Vec::new();
    let mut r = step;
    while r <= reach {
        for x in [r, -r] {
            let snapped = lo + ((x - lo) / step).round() * step;
            if snapped >= lo && snapped <= hi && !out.iter().any(|&y| (y - snapped).abs() < 0.5 * step) {
                out.push(snapped);
            }
        }
        r *= 1.25;
    }
    out
}

fn tail_verdict<S: Sampled>(signal: &S, shifts: &[f64], tol: f64) -> Result<LimitVerdict> {
    let l = signal.lattice();
    let step = l.step();
    let inside: Vec<Complex64> = shifts
        .iter()
        .filter_map(|&x| {
            let j = ((x - l.origin()) / step).round();
            (j >= 0.0 && (j as usize) < signal.len()).then(|| signal.values()[j as usize])
        })
        .collect();
    let start = inside.len() * 3 / 4;
    let tail = &inside[start..];
    if tail.len() < 2 {
        return Err(Error::RangeTooShort {
            tail_start: shifts.get(shifts.len() * 3 / 4).copied().unwrap_or(0.0).abs(),
        });
    }
    let mean = tail.iter().sum::<Complex64>() / tail.len() as f64;
    let spread = tail.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
    let status = if spread <= tol {
        LimitStatus::Converges
    } else if spread >= 10.0 * tol {
        LimitStatus::DoesNotConverge
    } else {
        LimitStatus::Inconclusive
    };
    Ok(LimitVerdict {
        status,
        limit: (status == LimitStatus::Converges).then_some(mean),
        spread,
        tail_points: tail.len(),
    })
}

/// Ordinary limit: `psi` itself stabilizes over the last quarter of the
/// shift schedule.
pub fn limit_verdict<S: Sampled>(signal: &S, shifts: &[f64], tol: f64) -> Result<LimitVerdict> {
    tail_verdict(signal, shifts, tol)
}

/// Smallest `|f^|` over a dense frequency grid.
pub fn kernel_min_transform(kernel: &Kernel) -> f64 {
    (0..=1024)
        .map(|i| kernel.transform(i as f64 / 1024.0 - 0.5).norm())
        .fold(f64::INFINITY, f64::min)
}

pub const KERNEL_FLOOR: f64 = 1e-3;

/// `r = 1/2`, 32 taps; its transform stays above `1/3`.
pub fn default_wstar_kernel() -> Kernel {
    Kernel::geometric(0.5, 32).expect("valid parameters")
}

/// Weak* limit of translates through a single kernel with nowhere-vanishing
/// transform: `f * psi` stabilizes along the tail of `shifts`.
pub fn weak_star_verdict<S: Sampled>(signal: &S, kernel: &Kernel, shifts: &[f64], tol: f64) -> Result<LimitVerdict> {
    let mass = kernel.mass();
    if (mass - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("kernel mass is {mass}, not 1")));
    }
    let min_abs = kernel_min_transform(kernel);
    if min_abs < KERNEL_FLOOR {
        return Err(Error::KernelVanishes {
            min_abs,
            floor: KERNEL_FLOOR,
        });
    }
    let smoothed = convolve(signal, kernel)?;
    tail_verdict(&smoothed, shifts, tol)
}

/// `sup {|psi(x) - psi(y)| : |x - y| <= u}` over grid points `x`, `y` with
/// `|x|, |y| >= T`.
pub fn oscillation_modulus<S: Sampled>(signal: &S, u: f64, tail_start: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::InvalidArgument(format!("neighbourhood width {u} must be positive")));
    }
    let l = signal.lattice();
    let v = signal.values();
    let reach = (u / l.step() + 1e-9).floor() as usize;
    let mut any = false;
    let mut sup: f64 = 0.0;
    for i in 0..v.len() {
        if l.position(i).abs() < tail_start {
            continue;
        }
        any = true;
        let (a, b) = (i.saturating_sub(reach), (i + reach).min(v.len() - 1));
        for (j, w) in v.iter().enumerate().take(b + 1).skip(a) {
            if l.position(j).abs() >= tail_start {
                sup = sup.max((v[i] - w).norm());
            }
        }
    }
    if !any {
        return Err(Error::RangeTooShort { tail_start });
    }
    Ok(sup)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub tol: f64,
    /// Cesàro schedule; by default dyadic up to an eighth of the range,
    /// two-sided when the data reach negative positions.
    pub schedule: Option<WindowSchedule>,
    pub kernel: Option<Kernel>,
    pub shifts: Option<Vec<f64>>,
    /// Translates `s` used for the decay of `psi - psi_s`, in units of `x`.
    pub difference_shifts: Vec<f64>,
    /// Neighbourhood width for the oscillation modulus, in units of `x`.
    pub oscillation_width: Option<f64>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            tol: 1e-2,
            schedule: None,
            kernel: None,
            shifts: None,
            difference_shifts: vec![1.0, 2.0, 3.0],
            oscillation_width: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceDecay {
    pub shift: f64,
    pub verdict: LimitVerdict,
    /// Weak* limit of `psi - psi_s` is zero.
    pub decays: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub c_verdict: LimitVerdict,
    pub wstar_verdict: LimitVerdict,
    pub ac_verdict: AcVerdict,
    pub difference_decay: Vec<DifferenceDecay>,
    pub oscillation_modulus: f64,
    /// Almost convergence plus decaying differences predicts a weak* limit.
    pub wstar_expected: bool,
    pub consistency: bool,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

/// Runs the ordinary, weak* and Cesàro tests side by side and checks that
/// their verdicts respect `c => w*c => ac` with a common limit.
pub fn chain_report<S: Sampled>(signal: &S, config: &ChainConfig) -> Result<ChainReport> {
    let tol = config.tol;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let step = signal.lattice().step();
    let shifts = config.shifts.clone().unwrap_or_else(|| default_shift_schedule(signal));
    let kernel = config.kernel.clone().unwrap_or_else(default_wstar_kernel);
    let schedule = match &config.schedule {
        Some(s) => s.clone(),
        None => default_schedule(signal)?,
    };

    let c_verdict = limit_verdict(signal, &shifts, tol)?;
    let wstar_verdict = weak_star_verdict(signal, &kernel, &shifts, tol)?;
    let ac = ac_verdict(&cesaro_sweep(signal, &schedule, step)?, tol);

    let mut difference_decay = Vec::new();
    for &s in &config.difference_shifts {
        let lag = (s / step).round() as usize;
        if lag == 0 || lag >= signal.len() {
            continue;
        }
        let v = signal.values();
        let diff: Vec<Complex64> = (lag..v.len()).map(|i| v[i] - v[i - lag]).collect();
        let d = signal.derive(lag as i64, diff)?;
        let verdict = weak_star_verdict(&d, &kernel, &shifts, tol)?;
        let decays = verdict.limit.is_some_and(|l| l.norm() <= tol);
        difference_decay.push(DifferenceDecay { shift: s, verdict, decays });
    }

    let tail_start = shifts.get(shifts.len() * 3 / 4).map_or(0.0, |x| x.abs());
    let width = config.oscillation_width.unwrap_or(step);
    let osc = oscillation_modulus(signal, width, tail_start)?;

    let mut violations = Vec::new();
    let close = |a: Complex64, b: Complex64| (a - b).norm() <= 2.0 * tol;
    if let Some(lc) = c_verdict.limit {
        match wstar_verdict.limit {
            Some(lw) if close(lc, lw) => {}
            _ => violations.push("convergent but not weak* convergent to the same limit".to_string()),
        }
    }
    if let Some(lw) = wstar_verdict.limit {
        match ac.limit {
            Some(la) if close(lw, la) => {}
            _ => violations.push("weak* convergent but not almost convergent to the same limit".to_string()),
        }
    }
    let wstar_expected =
        ac.status == AcStatus::AlmostConvergent && !difference_decay.is_empty() && difference_decay.iter().all(|d| d.decays);
    if wstar_expected && !wstar_verdict.is_positive() {
        violations.push("almost convergent with decaying differences but no weak* limit".to_string());
    }

    let mut notes = Vec::new();
    if wstar_verdict.is_positive() && osc <= tol && !c_verdict.is_positive() {
        notes.push("weak* convergent and slowly oscillating on the tail, yet no ordinary limit detected".to_string());
    }
    Ok(ChainReport {
        consistency: violations.is_empty(),
        c_verdict,
        wstar_verdict,
        ac_verdict: ac,
        difference_decay,
        oscillation_modulus: osc,
        wstar_expected,
        violations,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveReport {
    pub pass: bool,
    pub oac: AcVerdict,
    pub oac_error: Option<f64>,
    /// `Psi(T)` at the end of the data.
    pub final_value: Complex64,
    /// Set when `psi` vanishes on the tail: `|Psi(T) - L(0)|`.
    pub convergence_error: Option<f64>,
}

/// `Psi(x) = int_0^x psi` is one-sided almost convergent to the declared
/// `L psi(0)`, and converges outright when `psi` itself dies out.
pub fn primitive_oac_check(
    signal: &ContinuousSignal,
    l0: Complex64,
    tol: f64,
    lower: Option<f64>,
) -> Result<PrimitiveReport> {
    if signal.x0() != 0.0 {
        return Err(Error::InvalidArgument("primitive checks need samples starting at t = 0".into()));
    }
    if let Some(c) = lower {
        if !bounded_below(signal.samples(), c) {
            return Err(Error::HypothesisViolated(format!("function is not bounded below by {}", -c + 0.0)));
        }
    }
    let h = signal.step();
    let s = signal.samples();
    let primitive: Vec<Complex64> = std::iter::once(ZERO)
        .chain(s.windows(2).scan(ZERO, |acc, w| {
            *acc += (w[0] + w[1]) * (0.5 * h);
            Some(*acc)
        }))
        .collect();
    let final_value = *primitive.last().expect("nonempty");
    let big = ContinuousSignal::new(0.0, h, primitive)?;
    let oac = ac_verdict(&cesaro_sweep(&big, &continuous_schedule(&big)?, h)?, tol);
    let oac_error = oac.limit.map(|l| (l - l0).norm());
    let n = s.len();
    let tail = s[3 * n / 4..].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let convergence_error = (tail <= tol).then(|| (final_value - l0).norm());
    Ok(PrimitiveReport {
        pass: oac_error.is_some_and(|e| e <= tol) && convergence_error.is_none_or(|e| e <= tol),
        oac,
        oac_error,
        final_value,
        convergence_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{render_continuous, render_discrete, Decay, GeneratorSpec};
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn stream(f: impl Fn(usize) -> f64, n: usize) -> Vec<Complex64> {
        (0..n).map(|i| c(f(i))).collect()
    }

    #[test]
    fn abel_examples() {
        let ones = stream(|_| 1.0, 1000);
        let s = abel_sweep(&ones, 1.0, &[0.9], 1e-14).unwrap();
        assert_abs_diff_eq!(s.values[0].re, 1.0, epsilon = 1e-13);

        let alt = stream(|n| if n % 2 == 0 { 1.0 } else { -1.0 }, 1000);
        let s = abel_sweep(&alt, 1.0, &[0.9], 1e-14).unwrap();
        assert_abs_diff_eq!(s.values[0].re, 0.1 / 1.9, epsilon = 1e-13);

        let two = stream(|n| if n % 2 == 0 { 2.0 } else { 0.0 }, 10_000);
        let s = abel_sweep(&two, 2.0, &[0.99], 1e-14).unwrap();
        assert_abs_diff_eq!(s.values[0].re, 1.0 + 0.01 / 1.99, epsilon = 1e-12);

        assert!(matches!(
            abel_sweep(&ones[..10], 1.0, &[0.99], 1e-12),
            Err(Error::InsufficientCoefficients { .. })
        ));
    }

    #[test]
    fn extrapolation_is_exact_on_quadratics() {
        let h = [0.25, 0.125, 0.0625];
        let v: Vec<Complex64> = h.iter().map(|&x| c(3.0 - 2.0 * x + 5.0 * x * x)).collect();
        assert_abs_diff_eq!(extrapolate_to_zero(&h, &v).re, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn laplace_examples() {
        let one = render_continuous(&GeneratorSpec::trig_poly(&[(c(1.0), 0.0)]), 0.0, 0.01, 100_001).unwrap();
        let s = laplace_sweep(&one, &[0.5, 0.25], 1e-6).unwrap();
        for (x, v) in s.abscissas.iter().zip(&s.values) {
            assert_abs_diff_eq!(v.re, 1.0 - (-x * 1000.0f64).exp(), epsilon = 1e-4);
        }

        let ch = render_continuous(&GeneratorSpec::character(1.0), 0.0, 0.01, 50_001).unwrap();
        let s = laplace_sweep(&ch, &[0.1], 1e-6).unwrap();
        let exact = c(0.1) / Complex64::new(0.1, -std::f64::consts::TAU);
        assert!((s.values[0] - exact).norm() < 1e-4);
        assert_abs_diff_eq!(s.values[0].norm(), 0.0159, epsilon = 1e-4);

        let k = render_continuous(&GeneratorSpec::trig_poly(&[(c(2.5), 0.0)]), 0.0, 0.05, 20_001).unwrap();
        let s = laplace_sweep(&k, &laplace_schedule(2, 5), 1e-6).unwrap();
        assert_abs_diff_eq!(s.extrapolated_limit.unwrap().re, 2.5, epsilon = 1e-3);

        assert!(matches!(laplace_sweep(&k, &[1e-4], 1e-6), Err(Error::TailNotControlled { .. })));
    }

    #[test]
    fn residue_examples() {
        let x = abel_schedule(4, 12);
        let ones = stream(|_| 1.0, 1 << 17);
        let r = residue_oac_estimate(&ones, 1.0, &x, 1e-12, 1e-3).unwrap();
        assert_abs_diff_eq!(r.alpha_est.re, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.residue.re, -1.0, epsilon = 1e-9);

        let half = stream(|n| if n % 2 == 0 { 1.0 } else { 0.0 }, 1 << 17);
        let r = residue_oac_estimate(&half, 1.0, &x, 1e-12, 1e-3).unwrap();
        assert_abs_diff_eq!(r.alpha_est.re, 0.5, epsilon = 1e-6);
        assert!(r.agreement.unwrap() <= 1e-3);

        let two = stream(|n| if n % 2 == 0 { 2.0 } else { 0.0 }, 1 << 17);
        let r = residue_oac_estimate(&two, 2.0, &x, 1e-12, 1e-3).unwrap();
        assert_abs_diff_eq!(r.alpha_est.re, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn fatou_examples() {
        let geo = stream(|n| 0.5f64.powi(n as i32), 1 << 16);
        assert!(fatou_check(&geo, c(2.0), 1e-3).unwrap().pass);

        let lin = stream(|n| (n + 1) as f64 * 0.5f64.powi(n as i32), 1 << 16);
        let r = fatou_check(&lin, c(4.0), 1e-3).unwrap();
        assert!(r.pass, "{r:?}");
        let at64 = r.sum_errors.iter().find(|e| e.0 == 64).unwrap().1;
        assert!(at64 <= 1e-6);

        let mut single = vec![c(0.0); 1 << 16];
        single[0] = c(1.5);
        let r = fatou_check(&single, c(1.5), 1e-3).unwrap();
        assert!(r.pass && r.sum_error == 0.0);

        let flat = stream(|_| 1.0, 1 << 10);
        assert!(matches!(fatou_check(&flat, c(0.0), 1e-3), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn weak_star_examples() {
        let k = default_wstar_kernel();
        let cst = render_discrete(&GeneratorSpec::trig_poly(&[(c(0.7), 0.0)]), 0, 1 << 14).unwrap();
        let v = weak_star_verdict(&cst, &k, &default_shift_schedule(&cst), 1e-6).unwrap();
        assert_eq!(v.status, LimitStatus::Converges);
        assert!((v.limit.unwrap() - c(0.7)).norm() < 1e-12);

        let ch = render_discrete(&GeneratorSpec::character(0.2), 0, 1 << 14).unwrap();
        let v = weak_star_verdict(&ch, &k, &default_shift_schedule(&ch), 1e-2).unwrap();
        assert_eq!(v.status, LimitStatus::DoesNotConverge);

        let conv = GeneratorSpec::Convergent {
            limit: c(2.0),
            decay: Decay::Exponential { amplitude: c(1.0), rate: 1.0 },
        };
        let s = render_continuous(&conv, -200.0, 0.05, 8001).unwrap();
        let v = weak_star_verdict(&s, &k, &default_shift_schedule(&s), 1e-6).unwrap();
        assert!((v.limit.unwrap() - c(2.0)).norm() < 1e-6);

        let bad = Kernel::new(0, vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            weak_star_verdict(&cst, &bad, &default_shift_schedule(&cst), 1e-2),
            Err(Error::KernelVanishes { .. })
        ));
    }

    #[test]
    fn oscillation_examples() {
        let cst = render_discrete(&GeneratorSpec::trig_poly(&[(c(3.0), 0.0)]), -100, 100).unwrap();
        assert_eq!(oscillation_modulus(&cst, 2.0, 50.0).unwrap(), 0.0);

        let lambda = 0.05;
        let ch = render_continuous(&GeneratorSpec::character(lambda), 0.0, 0.1, 2001).unwrap();
        let u = 1.0;
        let expected = (0..=10)
            .map(|d| (c(1.0) - crate::generator::character(lambda, d as f64 * 0.1)).norm())
            .fold(0.0, f64::max);
        assert_abs_diff_eq!(oscillation_modulus(&ch, u, 50.0).unwrap(), expected, epsilon = 1e-9);

        let decay = GeneratorSpec::Convergent {
            limit: c(0.0),
            decay: Decay::Exponential { amplitude: c(1.0), rate: 1.0 },
        };
        let s = render_continuous(&decay, 0.0, 0.01, 3001).unwrap();
        assert!(oscillation_modulus(&s, 1.0, 10.0).unwrap() <= (-10.0f64).exp());
        assert!(matches!(oscillation_modulus(&s, 1.0, 100.0), Err(Error::RangeTooShort { .. })));
    }

    #[test]
    fn chain_examples() {
        let cfg = ChainConfig::default();
        let conv = GeneratorSpec::Convergent {
            limit: c(2.0),
            decay: Decay::Exponential { amplitude: c(1.0), rate: 1.0 },
        };
        let s = render_discrete(&conv, -(1 << 14), 1 << 14).unwrap();
        let r = chain_report(&s, &cfg).unwrap();
        assert!(r.consistency, "{r:#?}");
        for l in [r.c_verdict.limit, r.wstar_verdict.limit, r.ac_verdict.limit] {
            assert!((l.unwrap() - c(2.0)).norm() <= 2e-2);
        }

        let ch = render_discrete(&GeneratorSpec::character(0.2), -(1 << 14), 1 << 14).unwrap();
        let r = chain_report(&ch, &cfg).unwrap();
        assert!(r.consistency);
        assert!(!r.c_verdict.is_positive() && !r.wstar_verdict.is_positive());
        assert!(r.ac_verdict.limit.unwrap().norm() <= 1e-2);
        assert!(!r.wstar_expected);

        let b = render_discrete(&GeneratorSpec::block_sequence(), 0, 1 << 16).unwrap();
        let r = chain_report(&b, &cfg).unwrap();
        assert!(r.consistency, "{r:#?}");
        assert!(!r.c_verdict.is_positive() && !r.wstar_verdict.is_positive());
        assert_eq!(r.ac_verdict.status, AcStatus::NotAlmostConvergent);
    }

    #[test]
    fn primitive_examples() {
        let decay = |a: f64, rate: f64| GeneratorSpec::Convergent {
            limit: c(0.0),
            decay: Decay::Exponential { amplitude: c(a), rate },
        };
        let s = render_continuous(&decay(1.0, 1.0), 0.0, 0.05, 40_001).unwrap();
        let r = primitive_oac_check(&s, c(1.0), 1e-2, Some(0.0)).unwrap();
        assert!(r.pass, "{r:?}");

        let z = render_continuous(&GeneratorSpec::trig_poly(&[(c(0.0), 0.0)]), 0.0, 0.05, 40_001).unwrap();
        let r = primitive_oac_check(&z, c(0.0), 1e-2, None).unwrap();
        assert!(r.pass && r.oac_error == Some(0.0));

        let s = render_continuous(&decay(2.0, 2.0), 0.0, 0.05, 40_001).unwrap();
        assert!(primitive_oac_check(&s, c(1.0), 1e-2, None).unwrap().pass);

        let neg = render_continuous(&decay(-1.0, 1.0), 0.0, 0.05, 4001).unwrap();
        assert!(matches!(
            primitive_oac_check(&neg, c(-1.0), 1e-2, Some(0.5)),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
