//! Uniform sliding Cesàro means.
//!
//! For a window length `k` the sweep records the componentwise sup and inf of
//! the window averages over every admissible shift. As `k` grows these tend to
//! the upper and lower functionals `p_bar` and `p_lower`; a bounded function is
//! almost convergent to `alpha` exactly when both equal `alpha`.
//!
//! Window shapes:
//!
//! | lattice  | two-sided                          | one-sided                      |
//! |----------|------------------------------------|--------------------------------|
//! | integers | `1/(2k+1) sum_{i=n-k}^{n+k} psi(i)` | `1/k sum_{i=0}^{k-1} psi(n+i)` |
//! | reals    | `1/(2t) int_{x-t}^{x+t} psi`        | `1/t int_x^{x+t} psi`          |
//!
//! One-sided shifts range over `n >= 0` (resp. `x >= 0`). Integrals use the
//! trapezoid rule on the piecewise-linear interpolant of the samples.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{Extension, Lattice, Sampled, Sidedness, WindowSchedule};
use crate::spectral::{convolve, Kernel};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Prefix sums (integers) or cumulative trapezoid integrals (reals) of a
/// signal, answering window means in O(1).
pub(crate) struct WindowIntegrator<'a> {
    values: &'a [Complex64],
    prefix: Vec<Complex64>,
    lattice: Lattice,
    extension: Extension,
}

impl<'a> WindowIntegrator<'a> {
    pub(crate) fn new<S: Sampled>(signal: &'a S) -> Result<Self> {
        let values = signal.values();
        let lattice = signal.lattice();
        let mut prefix = Vec::with_capacity(values.len() + 1);
        prefix.push(ZERO);
        match lattice {
            Lattice::Integers { .. } => {
                let mut acc = ZERO;
                for &v in values {
                    acc += v;
                    prefix.push(acc);
                }
            }
            Lattice::Grid { step, .. } => {
                if values.len() < 2 {
                    return Err(Error::TooShort { len: values.len(), min: 2 });
                }
                let mut acc = ZERO;
                for w in values.windows(2) {
                    acc += (w[0] + w[1]) * (0.5 * step);
                    prefix.push(acc);
                }
            }
        }
        Ok(WindowIntegrator {
            values,
            prefix,
            lattice,
            extension: signal.extension(),
        })
    }

    fn first(&self) -> f64 {
        self.lattice.origin()
    }

    fn last(&self) -> f64 {
        self.lattice.position(self.values.len() - 1)
    }

    /// Offsets of the window ends relative to its shift.
    fn extent(&self, len: f64, side: Sidedness) -> (f64, f64) {
        match (side, self.lattice.is_discrete()) {
            (Sidedness::TwoSided, _) => (-len, len),
            (Sidedness::OneSided, true) => (0.0, len - 1.0),
            (Sidedness::OneSided, false) => (0.0, len),
        }
    }

    fn divisor(&self, len: f64, side: Sidedness) -> f64 {
        match (side, self.lattice.is_discrete()) {
            (Sidedness::TwoSided, true) => 2.0 * len + 1.0,
            (Sidedness::TwoSided, false) => 2.0 * len,
            (Sidedness::OneSided, _) => len,
        }
    }

    /// Closed interval of admissible shifts, if any.
    pub(crate) fn admissible(&self, len: f64, side: Sidedness) -> Option<(f64, f64)> {
        let (a, b) = self.extent(len, side);
        let (mut lo, hi) = match self.extension {
            Extension::ValidOnly => (self.first() - a, self.last() - b),
            Extension::ZeroOutside => (self.first() - b, self.last() - b),
        };
        if side == Sidedness::OneSided {
            lo = lo.max(0.0);
        }
        let eps = 1e-9 * self.lattice.step();
        (lo <= hi + eps).then_some((lo, hi))
    }

    fn check_len(&self, len: f64) -> Result<()> {
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::InvalidArgument(format!("window length {len} must be positive")));
        }
        if self.lattice.is_discrete() && len.fract() != 0.0 {
            return Err(Error::InvalidArgument(format!("window length {len} must be an integer on Z")));
        }
        Ok(())
    }

    /// Sum of samples with index in `[a, b]` (integers), zero outside the data.
    fn discrete_sum(&self, a: i64, b: i64, n_min: i64) -> Complex64 {
        let n = self.values.len() as i64;
        let lo = (a - n_min).clamp(0, n);
        let hi = (b - n_min + 1).clamp(0, n);
        if hi <= lo {
            ZERO
        } else {
            self.prefix[hi as usize] - self.prefix[lo as usize]
        }
    }

    /// `int_{x0}^{x}` of the interpolant, with `x` clamped to the data.
    fn cumulative(&self, x: f64, x0: f64, step: f64) -> Complex64 {
        let n = self.values.len();
        let u = ((x - x0) / step).clamp(0.0, (n - 1) as f64);
        let j = (u.floor() as usize).min(n - 2);
        let t = u - j as f64;
        let (v0, v1) = (self.values[j], self.values[j + 1]);
        self.prefix[j] + (v0 * t + (v1 - v0) * (0.5 * t * t)) * step
    }

    /// Window mean without admissibility checks.
    pub(crate) fn mean_unchecked(&self, len: f64, shift: f64, side: Sidedness) -> Complex64 {
        let (a, b) = self.extent(len, side);
        let total = match self.lattice {
            Lattice::Integers { n_min } => {
                self.discrete_sum((shift + a).round() as i64, (shift + b).round() as i64, n_min)
            }
            Lattice::Grid { x0, step } => self.cumulative(shift + b, x0, step) - self.cumulative(shift + a, x0, step),
        };
        total / self.divisor(len, side)
    }

    pub(crate) fn mean(&self, len: f64, shift: f64, side: Sidedness) -> Result<Complex64> {
        self.check_len(len)?;
        if self.lattice.is_discrete() && shift.fract() != 0.0 {
            return Err(Error::InvalidArgument(format!("shift {shift} must be an integer on Z")));
        }
        let eps = 1e-9 * self.lattice.step();
        match self.admissible(len, side) {
            Some((lo, hi)) if shift >= lo - eps && shift <= hi + eps => Ok(self.mean_unchecked(len, shift, side)),
            _ => Err(Error::WindowOutOfRange { len, shift }),
        }
    }

    /// Every admissible shift on the lattice-aligned grid of spacing `stride`.
    pub(crate) fn grid(&self, len: f64, side: Sidedness, stride: f64) -> Result<ShiftGrid> {
        self.check_len(len)?;
        if !(stride > 0.0) || (self.lattice.is_discrete() && stride.fract() != 0.0) {
            return Err(Error::InvalidArgument(format!("shift stride {stride} is invalid")));
        }
        let Some((lo, hi)) = self.admissible(len, side) else {
            return Err(Error::WindowOutOfRange { len, shift: f64::NAN });
        };
        let origin = self.lattice.origin();
        let eps = 1e-9;
        let first = origin + ((lo - origin) / stride - eps).ceil() * stride;
        if first > hi + eps * stride {
            return Err(Error::EmptyGrid);
        }
        let count = ((hi - first) / stride + eps).floor() as usize + 1;
        Ok(ShiftGrid { first, stride, count })
    }
}

/// Shifts `first + i * stride` for `i < count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftGrid {
    pub first: f64,
    pub stride: f64,
    pub count: usize,
}

impl ShiftGrid {
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.first + i as f64 * self.stride)
    }

    pub fn last(&self) -> f64 {
        self.first + (self.count.saturating_sub(1)) as f64 * self.stride
    }
}

/// Average of `signal` over the window of length `len` anchored at `shift`.
pub fn window_average<S: Sampled>(signal: &S, len: f64, shift: f64, side: Sidedness) -> Result<Complex64> {
    WindowIntegrator::new(signal)?.mean(len, shift, side)
}

/// All admissible shifts for windows of length `len`, spaced by `stride`.
pub fn admissible_shifts<S: Sampled>(signal: &S, len: f64, side: Sidedness, stride: f64) -> Result<ShiftGrid> {
    WindowIntegrator::new(signal)?.grid(len, side, stride)
}

/// Componentwise extremes of window averages over a shift grid. Ties go to
/// the smallest shift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftExtremes {
    /// `(max re, max im)` packed as a complex number.
    pub sup: Complex64,
    /// `(min re, min im)` packed as a complex number.
    pub inf: Complex64,
    /// Shifts attaining the real and imaginary maxima.
    pub argmax: [f64; 2],
    pub argmin: [f64; 2],
}

impl ShiftExtremes {
    /// The component (0 = re, 1 = im) with the wider spread.
    pub fn dominant(&self) -> usize {
        if self.sup.re - self.inf.re >= self.sup.im - self.inf.im {
            0
        } else {
            1
        }
    }

    pub fn gap(&self) -> f64 {
        (self.sup - self.inf).norm()
    }
}

fn extremes_over(integ: &WindowIntegrator<'_>, len: f64, side: Sidedness, grid: &ShiftGrid) -> Result<ShiftExtremes> {
    if grid.count == 0 {
        return Err(Error::EmptyGrid);
    }
    let eps = 1e-9 * integ.lattice.step();
    match integ.admissible(len, side) {
        Some((lo, hi)) if grid.first >= lo - eps && grid.last() <= hi + eps => {}
        _ => return Err(Error::WindowOutOfRange { len, shift: grid.first }),
    }
    let mut ext = ShiftExtremes {
        sup: Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        inf: Complex64::new(f64::INFINITY, f64::INFINITY),
        argmax: [grid.first; 2],
        argmin: [grid.first; 2],
    };
    for s in grid.iter() {
        let m = integ.mean_unchecked(len, s, side);
        if m.re > ext.sup.re {
            ext.sup.re = m.re;
            ext.argmax[0] = s;
        }
        if m.im > ext.sup.im {
            ext.sup.im = m.im;
            ext.argmax[1] = s;
        }
        if m.re < ext.inf.re {
            ext.inf.re = m.re;
            ext.argmin[0] = s;
        }
        if m.im < ext.inf.im {
            ext.inf.im = m.im;
            ext.argmin[1] = s;
        }
    }
    Ok(ext)
}

/// Exact extremes of the window averages over `grid`.
pub fn shift_extremes<S: Sampled>(signal: &S, len: f64, side: Sidedness, grid: &ShiftGrid) -> Result<ShiftExtremes> {
    let integ = WindowIntegrator::new(signal)?;
    integ.check_len(len)?;
    extremes_over(&integ, len, side, grid)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: f64,
    pub shifts: usize,
    #[serde(flatten)]
    pub extremes: ShiftExtremes,
}

/// Window-by-window extremes and the resulting estimates of `p_bar` and
/// `p_lower` (taken at the largest window).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CesaroSweep {
    pub sidedness: Sidedness,
    pub shift_stride: f64,
    pub rows: Vec<SweepRow>,
    pub p_bar_est: Complex64,
    pub p_lower_est: Complex64,
    /// `|sup - inf|` per window length.
    pub gaps: Vec<f64>,
    /// Whether the gap never grows along the schedule.
    pub gaps_nonincreasing: bool,
    pub closed_form: bool,
    pub bound: f64,
}

impl CesaroSweep {
    /// `k,sup_re,sup_im,inf_re,inf_im,argmax,argmin`; the arg columns belong to
    /// the component with the wider spread.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "sup_re", "sup_im", "inf_re", "inf_im", "argmax", "argmin"])?;
        for r in &self.rows {
            let e = &r.extremes;
            let d = e.dominant();
            w.write_record([
                r.k.to_string(),
                e.sup.re.to_string(),
                e.sup.im.to_string(),
                e.inf.re.to_string(),
                e.inf.im.to_string(),
                e.argmax[d].to_string(),
                e.argmin[d].to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
            .expect("csv writer emits utf-8"))
    }
}

/// Dyadic window lengths from 4 samples up to an eighth of the range
/// (one-sided), or a sixteenth when the data reach negative positions
/// (two-sided half-widths).
pub fn default_schedule<S: Sampled>(signal: &S) -> Result<WindowSchedule> {
    let two_sided = signal.lattice().origin() < 0.0;
    let step = signal.lattice().step();
    let divisor = if two_sided { 16 } else { 8 };
    let top = (signal.len() / divisor).max(2).ilog2();
    if top < 4 {
        return Err(Error::TooShort { len: signal.len(), min: 16 * divisor });
    }
    let side = if two_sided { Sidedness::TwoSided } else { Sidedness::OneSided };
    let lengths = (2..=top).map(|j| (1u64 << j) as f64 * step).collect();
    WindowSchedule::new(lengths, side)
}

/// Sup/inf of window averages for every length in `schedule`, over all
/// admissible shifts spaced by `shift_stride` (in lattice units; 1 on Z, the
/// sample step is the natural choice on R).
pub fn cesaro_sweep<S: Sampled>(signal: &S, schedule: &WindowSchedule, shift_stride: f64) -> Result<CesaroSweep> {
    let integ = WindowIntegrator::new(signal)?;
    let side = schedule.sidedness();
    let rows = schedule
        .lengths()
        .par_iter()
        .map(|&k| {
            let grid = integ.grid(k, side, shift_stride)?;
            let extremes = extremes_over(&integ, k, side, &grid)?;
            Ok(SweepRow { k, shifts: grid.count, extremes })
        })
        .collect::<Result<Vec<_>>>()?;
    let gaps: Vec<f64> = rows.iter().map(|r| r.extremes.gap()).collect();
    let last = rows.last().expect("schedule is nonempty");
    Ok(CesaroSweep {
        sidedness: side,
        shift_stride,
        p_bar_est: last.extremes.sup,
        p_lower_est: last.extremes.inf,
        gaps_nonincreasing: gaps.windows(2).all(|w| w[1] <= w[0]),
        gaps,
        closed_form: signal.closed_form(),
        bound: signal.bound(),
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AcStatus {
    AlmostConvergent,
    NotAlmostConvergent,
    Inconclusive,
}

/// Evidence against almost convergence: at window length `k` the averages at
/// two shifts differ by `gap`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub k: f64,
    pub shift_max: f64,
    pub shift_min: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcVerdict {
    pub status: AcStatus,
    pub limit: Option<Complex64>,
    pub uncertainty: f64,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl AcVerdict {
    pub fn inconclusive(uncertainty: f64, note: impl Into<String>) -> Self {
        AcVerdict {
            status: AcStatus::Inconclusive,
            limit: None,
            uncertainty,
            witness: None,
            notes: vec![note.into()],
        }
    }

    pub fn is_positive(&self) -> bool {
        self.status == AcStatus::AlmostConvergent
    }
}

/// Gaps may wobble upward by this fraction of `tol` and still count as
/// non-increasing (Dirichlet-kernel ripple along dyadic schedules can exceed
/// a tenth of `tol` when the gap itself is near `tol / 10`).
pub const RIPPLE_FRACTION: f64 = 0.5;

/// Negative verdicts need every one of the last three gaps at or above
/// `NEGATIVE_FACTOR * tol`.
pub const NEGATIVE_FACTOR: f64 = 10.0;

/// Tri-state decision from the last three windows of a sweep.
///
/// * `AlmostConvergent(alpha)` when the gap at the largest window is at most
///   `tol` and the last three gaps do not grow; `alpha` is the midpoint of
///   `[p_lower, p_bar]` and the uncertainty is the final gap.
/// * `NotAlmostConvergent` when all three gaps are at least `10 * tol` and the
///   final one has not shrunk by more than `tol` from the first.
/// * `Inconclusive` otherwise, and for sweeps with fewer than three windows.
pub fn ac_verdict(sweep: &CesaroSweep, tol: f64) -> AcVerdict {
    let mut notes = Vec::new();
    if !sweep.closed_form {
        notes.push("grid-relative: sup taken over the sample grid of explicit data".to_string());
    }
    let n = sweep.rows.len();
    if n < 3 {
        let mut v = AcVerdict::inconclusive(sweep.gaps.last().copied().unwrap_or(f64::INFINITY), "fewer than three windows");
        v.notes.extend(notes);
        return v;
    }
    let g = &sweep.gaps[n - 3..];
    let slack = RIPPLE_FRACTION * tol;
    let last = &sweep.rows[n - 1];
    if g[2] <= tol && g[1] <= g[0] + slack && g[2] <= g[1] + slack {
        return AcVerdict {
            status: AcStatus::AlmostConvergent,
            limit: Some((sweep.p_bar_est + sweep.p_lower_est) * 0.5),
            uncertainty: g[2],
            witness: None,
            notes,
        };
    }
    if g.iter().all(|&x| x >= NEGATIVE_FACTOR * tol) && g[2] >= g[0] - tol {
        let e = &last.extremes;
        let d = e.dominant();
        return AcVerdict {
            status: AcStatus::NotAlmostConvergent,
            limit: None,
            uncertainty: g[2],
            witness: Some(Witness {
                k: last.k,
                shift_max: e.argmax[d],
                shift_min: e.argmin[d],
                gap: g[2],
            }),
            notes,
        };
    }
    notes.push(format!("last three gaps {:.3e}, {:.3e}, {:.3e} at tol {tol:.1e}", g[0], g[1], g[2]));
    AcVerdict {
        status: AcStatus::Inconclusive,
        limit: None,
        uncertainty: g[2],
        witness: None,
        notes,
    }
}

/// `max(|p_bar|, |p_lower|)` of `psi - f * psi` for a probability kernel `f`.
/// Tends to zero as the windows grow, for every bounded `psi`.
pub fn convolution_invariance_residual<S: Sampled>(signal: &S, kernel: &Kernel, schedule: &WindowSchedule) -> Result<f64> {
    kernel.check_probability()?;
    let smoothed = convolve(signal, kernel)?;
    // psi restricted to the range where f * psi is defined
    let offset = ((smoothed.lattice().origin() - signal.lattice().origin()) / signal.lattice().step()).round() as usize;
    let diff: Vec<Complex64> = smoothed
        .values()
        .iter()
        .enumerate()
        .map(|(i, &fv)| signal.values()[offset + i] - fv)
        .collect();
    let diff = smoothed.derive(0, diff)?.with_extension(Extension::ValidOnly);
    let sweep = cesaro_sweep(&diff, schedule, signal.lattice().step())?;
    Ok(sweep.p_bar_est.norm().max(sweep.p_lower_est.norm()))
}
