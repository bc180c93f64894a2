//! Bounded sampled data on the integers and on the real line.
//!
//! A [`DiscreteSignal`] holds `psi(n)` for `n` in `[n_min, n_max]`, a
//! [`ContinuousSignal`] holds samples of `psi(x)` on the grid `x0 + j * step`.
//! Both carry a declared sup bound and an [`Extension`] policy saying what the
//! signal is taken to be outside the rendered range. Analyses that are generic
//! over the two kinds go through the [`Sampled`] trait.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How windows that touch the end of the rendered range are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extension {
    /// Zero-extended on both sides. Windows may reach left past the data into
    /// zeros but must end inside it; the right end of the data is the end of
    /// observation.
    ZeroOutside,
    /// Windows must lie inside the rendered range.
    #[default]
    ValidOnly,
}

/// The sample positions of a signal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lattice", rename_all = "snake_case")]
pub enum Lattice {
    Integers { n_min: i64 },
    Grid { x0: f64, step: f64 },
}

impl Lattice {
    pub fn is_discrete(&self) -> bool {
        matches!(self, Lattice::Integers { .. })
    }

    /// Distance between neighbouring samples.
    pub fn step(&self) -> f64 {
        match *self {
            Lattice::Integers { .. } => 1.0,
            Lattice::Grid { step, .. } => step,
        }
    }

    pub fn origin(&self) -> f64 {
        match *self {
            Lattice::Integers { n_min } => n_min as f64,
            Lattice::Grid { x0, .. } => x0,
        }
    }

    pub fn position(&self, j: usize) -> f64 {
        match *self {
            Lattice::Integers { n_min } => (n_min + j as i64) as f64,
            Lattice::Grid { x0, step } => x0 + j as f64 * step,
        }
    }

    /// The same lattice with its first sample moved by `offset` samples.
    pub fn shifted(&self, offset: i64) -> Lattice {
        match *self {
            Lattice::Integers { n_min } => Lattice::Integers { n_min: n_min + offset },
            Lattice::Grid { x0, step } => Lattice::Grid {
                x0: x0 + offset as f64 * step,
                step,
            },
        }
    }
}

/// Common read access to discrete and continuous signals.
pub trait Sampled: Clone + Send + Sync {
    fn values(&self) -> &[Complex64];
    fn bound(&self) -> f64;
    fn extension(&self) -> Extension;
    fn lattice(&self) -> Lattice;
    /// True when the samples come from a closed-form generator rather than
    /// explicit data.
    fn closed_form(&self) -> bool;

    /// A signal on the same lattice whose first sample sits `offset` samples
    /// after this one's. The bound is recomputed from `values`.
    fn derive(&self, offset: i64, values: Vec<Complex64>) -> Result<Self>;

    fn with_extension(self, extension: Extension) -> Self;

    fn len(&self) -> usize {
        self.values().len()
    }

    fn is_empty(&self) -> bool {
        self.values().is_empty()
    }

    /// Position of the last sample.
    fn end(&self) -> f64 {
        self.lattice().position(self.len() - 1)
    }
}

fn sup_abs(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn check_values(values: &[Complex64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidRange("signal needs at least one sample".into()));
    }
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidArgument("signal values must be finite".into()));
    }
    Ok(())
}

fn check_bound(values: &[Complex64], bound: f64) -> Result<()> {
    if !bound.is_finite() || bound < 0.0 {
        return Err(Error::InvalidArgument(format!("bound {bound} must be finite and nonnegative")));
    }
    // Closed forms evaluated in floating point may overshoot their exact sup by
    // a few ulps.
    let slack = bound * 1e-12 + f64::EPSILON;
    if let Some(v) = values.iter().find(|v| v.norm() > bound + slack) {
        return Err(Error::InvalidArgument(format!(
            "sample magnitude {} exceeds declared bound {bound}",
            v.norm()
        )));
    }
    Ok(())
}

/// `psi(n)` for integer `n` in `[n_min, n_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSignal {
    n_min: i64,
    values: Vec<Complex64>,
    bound: f64,
    extension: Extension,
    closed_form: bool,
}

impl DiscreteSignal {
    /// Explicit data starting at index `n_min`; the bound is the max modulus.
    pub fn new(n_min: i64, values: Vec<Complex64>) -> Result<Self> {
        check_values(&values)?;
        Ok(DiscreteSignal {
            n_min,
            bound: sup_abs(&values),
            values,
            extension: Extension::ValidOnly,
            closed_form: false,
        })
    }

    pub fn from_real(n_min: i64, values: &[f64]) -> Result<Self> {
        Self::new(n_min, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Replace the bound by a declared one; every sample must respect it.
    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        check_bound(&self.values, bound)?;
        self.bound = bound;
        Ok(self)
    }

    pub(crate) fn mark_closed_form(mut self, closed_form: bool) -> Self {
        self.closed_form = closed_form;
        self
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.values.len() as i64 - 1
    }

    /// Value at `n`, honouring the extension policy; `None` outside the range
    /// under `ValidOnly`.
    pub fn get(&self, n: i64) -> Option<Complex64> {
        if n >= self.n_min && n <= self.n_max() {
            Some(self.values[(n - self.n_min) as usize])
        } else {
            match self.extension {
                Extension::ZeroOutside => Some(Complex64::new(0.0, 0.0)),
                Extension::ValidOnly => None,
            }
        }
    }
}

impl Sampled for DiscreteSignal {
    fn values(&self) -> &[Complex64] {
        &self.values
    }
    fn bound(&self) -> f64 {
        self.bound
    }
    fn extension(&self) -> Extension {
        self.extension
    }
    fn lattice(&self) -> Lattice {
        Lattice::Integers { n_min: self.n_min }
    }
    fn closed_form(&self) -> bool {
        self.closed_form
    }
    fn derive(&self, offset: i64, values: Vec<Complex64>) -> Result<Self> {
        Ok(DiscreteSignal::new(self.n_min + offset, values)?
            .with_extension(self.extension)
            .mark_closed_form(self.closed_form))
    }
    fn with_extension(mut self, extension: Extension) -> Self {
        self.extension = extension;
        self
    }
}

/// Samples of `psi` at `x0 + j * step`, `j = 0..count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSignal {
    x0: f64,
    step: f64,
    samples: Vec<Complex64>,
    bound: f64,
    extension: Extension,
    closed_form: bool,
}

impl ContinuousSignal {
    pub fn new(x0: f64, step: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) || !x0.is_finite() {
            return Err(Error::InvalidArgument(format!("grid x0 = {x0}, step = {step} is invalid")));
        }
        check_values(&samples)?;
        Ok(ContinuousSignal {
            x0,
            step,
            bound: sup_abs(&samples),
            samples,
            extension: Extension::ValidOnly,
            closed_form: false,
        })
    }

    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        check_bound(&self.samples, bound)?;
        self.bound = bound;
        Ok(self)
    }

    pub(crate) fn mark_closed_form(mut self, closed_form: bool) -> Self {
        self.closed_form = closed_form;
        self
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }
}

impl Sampled for ContinuousSignal {
    fn values(&self) -> &[Complex64] {
        &self.samples
    }
    fn bound(&self) -> f64 {
        self.bound
    }
    fn extension(&self) -> Extension {
        self.extension
    }
    fn lattice(&self) -> Lattice {
        Lattice::Grid { x0: self.x0, step: self.step }
    }
    fn closed_form(&self) -> bool {
        self.closed_form
    }
    fn derive(&self, offset: i64, values: Vec<Complex64>) -> Result<Self> {
        Ok(
            ContinuousSignal::new(self.x0 + offset as f64 * self.step, self.step, values)?
                .with_extension(self.extension)
                .mark_closed_form(self.closed_form),
        )
    }
    fn with_extension(mut self, extension: Extension) -> Self {
        self.extension = extension;
        self
    }
}

/// Either kind of signal, for code paths (file IO, the CLI) that only learn
/// the kind at run time.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySignal {
    Discrete(DiscreteSignal),
    Continuous(ContinuousSignal),
}

impl From<DiscreteSignal> for AnySignal {
    fn from(s: DiscreteSignal) -> Self {
        AnySignal::Discrete(s)
    }
}

impl From<ContinuousSignal> for AnySignal {
    fn from(s: ContinuousSignal) -> Self {
        AnySignal::Continuous(s)
    }
}

impl AnySignal {
    pub fn values(&self) -> &[Complex64] {
        match self {
            AnySignal::Discrete(s) => s.values(),
            AnySignal::Continuous(s) => s.values(),
        }
    }

    pub fn lattice(&self) -> Lattice {
        match self {
            AnySignal::Discrete(s) => s.lattice(),
            AnySignal::Continuous(s) => s.lattice(),
        }
    }

    pub fn with_extension(self, extension: Extension) -> Self {
        match self {
            AnySignal::Discrete(s) => AnySignal::Discrete(s.with_extension(extension)),
            AnySignal::Continuous(s) => AnySignal::Continuous(s.with_extension(extension)),
        }
    }
}

/// One-sided windows `[x, x + len)` anchored at shifts `x >= 0`, or two-sided
/// windows `[x - len, x + len]` anchored anywhere.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    #[default]
    TwoSided,
    OneSided,
}

/// Window lengths for a Cesàro sweep: half-widths `k` (or `theta`) for
/// two-sided windows, full lengths for one-sided ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSchedule {
    lengths: Vec<f64>,
    sidedness: Sidedness,
}

impl WindowSchedule {
    pub fn new(lengths: Vec<f64>, sidedness: Sidedness) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidArgument("window schedule is empty".into()));
        }
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidArgument("window lengths must be positive".into()));
        }
        if lengths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("window lengths must be strictly increasing".into()));
        }
        Ok(WindowSchedule { lengths, sidedness })
    }

    /// `k_min, k_min * growth, ...` up to and including `k_max` when it is hit
    /// exactly. Integer schedules (`integral = true`) round each length.
    pub fn geometric(k_min: f64, k_max: f64, growth: f64, sidedness: Sidedness, integral: bool) -> Result<Self> {
        if !(k_min > 0.0 && k_max > k_min && growth > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "geometric schedule needs 0 < k_min < k_max and growth > 1 (got {k_min}, {k_max}, {growth})"
            )));
        }
        let mut lengths: Vec<f64> = Vec::new();
        let mut k = k_min;
        while k <= k_max * (1.0 + 1e-12) {
            let v = if integral { k.round() } else { k };
            if lengths.last().is_none_or(|&last| v > last) {
                lengths.push(v);
            }
            k *= growth;
        }
        Self::new(lengths, sidedness)
    }

    /// Powers of two `2^lo ..= 2^hi`.
    pub fn dyadic(lo: u32, hi: u32, sidedness: Sidedness) -> Result<Self> {
        Self::new((lo..=hi).map(|j| (1u64 << j) as f64).collect(), sidedness)
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn sidedness(&self) -> Sidedness {
        self.sidedness
    }

    pub fn largest(&self) -> f64 {
        *self.lengths.last().expect("schedule is nonempty")
    }
}
