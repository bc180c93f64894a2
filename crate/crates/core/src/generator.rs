//! Closed-form test signals whose almost-convergence behaviour is known
//! exactly, and their rendering onto integer or real grids.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{ContinuousSignal, DiscreteSignal};

/// Continuous renderings must satisfy `step * |freq| <= ALIAS_LIMIT` for every
/// declared frequency.
pub const ALIAS_LIMIT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub coeff: Complex64,
    pub freq: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub freq: f64,
    pub weight: Complex64,
}

/// Density of the continuous part of a measure, sampled at
/// `start + j * step` and integrated with the trapezoid rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub start: f64,
    pub step: f64,
    pub values: Vec<Complex64>,
}

impl Density {
    fn weights(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        let last = self.values.len().saturating_sub(1);
        self.values.iter().enumerate().map(move |(j, &d)| {
            let w = if j == 0 || j == last { 0.5 } else { 1.0 };
            (self.start + j as f64 * self.step, d * (w * self.step))
        })
    }

    fn total_variation(&self) -> f64 {
        self.weights().map(|(_, w)| w.norm()).sum()
    }

    fn interval(&self) -> Option<(f64, f64)> {
        if self.values.iter().all(|v| v.norm() == 0.0) {
            None
        } else {
            Some((self.start, self.start + self.step * (self.values.len() as f64 - 1.0)))
        }
    }
}

/// Convergent perturbation `A * e^{-rate |x|}` or `A / (1 + |x|)^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Decay {
    Exponential { amplitude: Complex64, rate: f64 },
    Power { amplitude: Complex64, exponent: f64 },
}

impl Decay {
    fn at(&self, x: f64) -> Complex64 {
        match *self {
            Decay::Exponential { amplitude, rate } => amplitude * (-rate * x.abs()).exp(),
            Decay::Power { amplitude, exponent } => amplitude / (1.0 + x.abs()).powf(exponent),
        }
    }

    fn amplitude(&self) -> Complex64 {
        match *self {
            Decay::Exponential { amplitude, .. } | Decay::Power { amplitude, .. } => amplitude,
        }
    }
}

fn default_pattern() -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
}

fn default_ratio() -> u64 {
    2
}

/// Recipe for a bounded function on Z or R. Serialized as JSON with a `kind`
/// discriminator; complex numbers are `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// `e^{2 pi i freq x}`.
    Character { freq: f64 },
    TrigPoly { terms: Vec<TrigTerm> },
    /// `sum_n a_n n^{-sigma} e^{-i t log n}`, valid only right of `abscissa`.
    DirichletLine { coeffs: Vec<Complex64>, sigma: f64, abscissa: f64 },
    /// `sum_j w_j e^{2 pi i lambda_j x} + int e^{2 pi i lambda x} density(lambda) d lambda`.
    MeasureTransform {
        atoms: Vec<Atom>,
        #[serde(default)]
        density: Option<Density>,
    },
    /// Blocks of lengths `ratio^m` (m = 0, 1, ...) starting at n = 0, block m
    /// holding `pattern[m % pattern.len()]`; zero on the negatives.
    BlockSequence {
        #[serde(default = "default_pattern")]
        pattern: Vec<Complex64>,
        #[serde(default = "default_ratio")]
        ratio: u64,
    },
    /// `s_n = sum_{k=0}^{n} a_k` of the inner stream; zero for n < 0.
    PartialSums { inner: Box<GeneratorSpec> },
    /// `limit + decay(|x|)`.
    Convergent { limit: Complex64, decay: Decay },
    /// Explicit samples; sample `j` sits at index `origin + j`.
    Custom {
        samples: Vec<Complex64>,
        #[serde(default)]
        origin: i64,
    },
}

/// Declared frequency content of a generator.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrequencySet {
    pub points: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
}

impl FrequencySet {
    pub fn max_abs(&self) -> f64 {
        self.points
            .iter()
            .map(|f| f.abs())
            .chain(self.intervals.iter().map(|&(a, b)| a.abs().max(b.abs())))
            .fold(0.0, f64::max)
    }

    /// Distance from `freq` to the set, optionally folding everything into
    /// one period (for signals on the integers, period 1).
    pub fn distance(&self, freq: f64, period: Option<f64>) -> f64 {
        let fold = |d: f64| match period {
            Some(p) => {
                let r = d.rem_euclid(p);
                r.min(p - r)
            }
            None => d.abs(),
        };
        let to_points = self.points.iter().map(|&p| fold(freq - p));
        let to_intervals = self.intervals.iter().map(|&(a, b)| {
            if period.is_none() && freq >= a && freq <= b {
                0.0
            } else if let Some(p) = period {
                // the folded distance to an interval is the distance to its
                // nearest endpoint unless some translate contains freq
                let shifted = freq - a - ((freq - a) / p).floor() * p;
                if shifted <= b - a {
                    0.0
                } else {
                    fold(freq - a).min(fold(freq - b))
                }
            } else {
                (a - freq).max(freq - b)
            }
        });
        to_points.chain(to_intervals).fold(f64::INFINITY, f64::min)
    }
}

/// `e^{2 pi i freq x}`, exact at multiples of a quarter turn.
pub fn character(freq: f64, x: f64) -> Complex64 {
    let turns = (freq * x).rem_euclid(1.0);
    let quarters = turns * 4.0;
    if quarters == quarters.round() {
        return match quarters as i64 % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * turns)
}

fn block_value(pattern: &[Complex64], ratio: u64, n: i64) -> Complex64 {
    if n < 0 || pattern.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let n = n as u64;
    let (mut start, mut len, mut m) = (0u64, 1u64, 0usize);
    while n >= start + len {
        start += len;
        len = len.saturating_mul(ratio);
        m += 1;
    }
    pattern[m % pattern.len()]
}

impl GeneratorSpec {
    pub fn character(freq: f64) -> Self {
        GeneratorSpec::Character { freq }
    }

    pub fn trig_poly(terms: &[(Complex64, f64)]) -> Self {
        GeneratorSpec::TrigPoly {
            terms: terms.iter().map(|&(coeff, freq)| TrigTerm { coeff, freq }).collect(),
        }
    }

    pub fn block_sequence() -> Self {
        GeneratorSpec::BlockSequence {
            pattern: default_pattern(),
            ratio: default_ratio(),
        }
    }

    pub fn partial_sums(inner: GeneratorSpec) -> Self {
        GeneratorSpec::PartialSums { inner: Box::new(inner) }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::DirichletLine { sigma, abscissa, .. } if !(sigma > abscissa) => {
                Err(Error::DivergentSeries { sigma: *sigma, abscissa: *abscissa })
            }
            GeneratorSpec::BlockSequence { pattern, ratio } if pattern.is_empty() || *ratio == 0 => Err(
                Error::InvalidArgument("block sequence needs a nonempty pattern and ratio >= 1".into()),
            ),
            GeneratorSpec::MeasureTransform { density: Some(d), .. } if !(d.step > 0.0) => {
                Err(Error::InvalidArgument("density step must be positive".into()))
            }
            GeneratorSpec::PartialSums { inner } => inner.validate(),
            _ => Ok(()),
        }
    }

    /// Exact closed-form value at `x`. Sequence-type generators (blocks and
    /// partial sums) are step functions of `floor(x)`.
    pub fn evaluate(&self, x: f64) -> Result<Complex64> {
        self.validate()?;
        Ok(match self {
            GeneratorSpec::Character { freq } => character(*freq, x),
            GeneratorSpec::TrigPoly { terms } => terms.iter().map(|t| t.coeff * character(t.freq, x)).sum(),
            GeneratorSpec::DirichletLine { coeffs, sigma, .. } => coeffs
                .iter()
                .enumerate()
                .map(|(i, &a)| {
                    let n = (i + 1) as f64;
                    a * n.powf(-sigma) * Complex64::from_polar(1.0, -x * n.ln())
                })
                .sum(),
            GeneratorSpec::MeasureTransform { atoms, density } => {
                let discrete: Complex64 = atoms.iter().map(|a| a.weight * character(a.freq, x)).sum();
                let continuous: Complex64 = density
                    .iter()
                    .flat_map(|d| d.weights())
                    .map(|(lambda, w)| w * character(lambda, x))
                    .sum();
                discrete + continuous
            }
            GeneratorSpec::BlockSequence { pattern, ratio } => block_value(pattern, *ratio, x.floor() as i64),
            GeneratorSpec::PartialSums { inner } => {
                let n = x.floor() as i64;
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..=n {
                    s += inner.integer_value(k)?;
                }
                s
            }
            GeneratorSpec::Convergent { limit, decay } => limit + decay.at(x),
            GeneratorSpec::Custom { .. } => return Err(Error::UnsupportedPoint),
        })
    }

    /// Value at an integer; also defined for `Custom` inside its sample range.
    fn integer_value(&self, n: i64) -> Result<Complex64> {
        match self {
            GeneratorSpec::Custom { samples, origin } => {
                let j = n - origin;
                if j < 0 || j as usize >= samples.len() {
                    Err(Error::InvalidRange(format!(
                        "custom samples cover [{origin}, {}], index {n} requested",
                        origin + samples.len() as i64 - 1
                    )))
                } else {
                    Ok(samples[j as usize])
                }
            }
            _ => self.evaluate(n as f64),
        }
    }

    /// Declared sup bound for generators with a closed form.
    pub fn declared_bound(&self) -> Option<f64> {
        match self {
            GeneratorSpec::Character { .. } => Some(1.0),
            GeneratorSpec::TrigPoly { terms } => Some(terms.iter().map(|t| t.coeff.norm()).sum()),
            GeneratorSpec::DirichletLine { coeffs, sigma, .. } => Some(
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a.norm() * ((i + 1) as f64).powf(-sigma))
                    .sum(),
            ),
            GeneratorSpec::MeasureTransform { atoms, density } => Some(
                atoms.iter().map(|a| a.weight.norm()).sum::<f64>()
                    + density.as_ref().map_or(0.0, Density::total_variation),
            ),
            GeneratorSpec::BlockSequence { pattern, .. } => Some(pattern.iter().map(|p| p.norm()).fold(0.0, f64::max)),
            GeneratorSpec::Convergent { limit, decay } => Some(limit.norm() + decay.amplitude().norm()),
            GeneratorSpec::PartialSums { .. } | GeneratorSpec::Custom { .. } => None,
        }
    }

    /// Declared frequencies in cycles per unit of `x`, when the generator is a
    /// (generalised) sum of characters.
    pub fn frequencies(&self) -> Option<FrequencySet> {
        match self {
            GeneratorSpec::Character { freq } => Some(FrequencySet {
                points: vec![*freq],
                intervals: vec![],
            }),
            GeneratorSpec::TrigPoly { terms } => Some(FrequencySet {
                points: terms.iter().filter(|t| t.coeff.norm() > 0.0).map(|t| t.freq).collect(),
                intervals: vec![],
            }),
            GeneratorSpec::DirichletLine { coeffs, .. } => Some(FrequencySet {
                points: coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.norm() > 0.0)
                    .map(|(i, _)| -((i + 1) as f64).ln() / TAU)
                    .collect(),
                intervals: vec![],
            }),
            GeneratorSpec::MeasureTransform { atoms, density } => Some(FrequencySet {
                points: atoms.iter().filter(|a| a.weight.norm() > 0.0).map(|a| a.freq).collect(),
                intervals: density.as_ref().and_then(Density::interval).into_iter().collect(),
            }),
            _ => None,
        }
    }

    fn is_closed_form(&self) -> bool {
        match self {
            GeneratorSpec::Custom { .. } => false,
            GeneratorSpec::PartialSums { inner } => inner.is_closed_form(),
            _ => true,
        }
    }

    /// Values at the integers `n_min..=n_max`.
    fn integer_values(&self, n_min: i64, n_max: i64) -> Result<Vec<Complex64>> {
        match self {
            GeneratorSpec::PartialSums { inner } => {
                let zero = Complex64::new(0.0, 0.0);
                let sums: Vec<Complex64> = if n_max >= 0 {
                    inner
                        .integer_values(0, n_max)?
                        .into_iter()
                        .scan(zero, |s, a| {
                            *s += a;
                            Some(*s)
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                Ok((n_min..=n_max)
                    .map(|n| if n < 0 { zero } else { sums[n as usize] })
                    .collect())
            }
            _ => (n_min..=n_max).map(|n| self.integer_value(n)).collect(),
        }
    }
}

/// `psi(n)` for `n` in `[n_min, n_max]`.
pub fn render_discrete(spec: &GeneratorSpec, n_min: i64, n_max: i64) -> Result<DiscreteSignal> {
    if n_min > n_max {
        return Err(Error::InvalidRange(format!("n_min {n_min} > n_max {n_max}")));
    }
    spec.validate()?;
    let values = spec.integer_values(n_min, n_max)?;
    let signal = DiscreteSignal::new(n_min, values)?;
    let signal = match spec.declared_bound() {
        Some(b) => signal.with_bound(b)?,
        None => signal,
    };
    Ok(signal.mark_closed_form(spec.is_closed_form()))
}

/// `psi(x0 + j h)` for `j = 0..count`.
pub fn render_continuous(spec: &GeneratorSpec, x0: f64, h: f64, count: usize) -> Result<ContinuousSignal> {
    if !(h > 0.0) || count == 0 {
        return Err(Error::InvalidArgument(format!("need h > 0 and count >= 1 (got {h}, {count})")));
    }
    spec.validate()?;
    if let Some(freqs) = spec.frequencies() {
        let f = freqs.max_abs();
        if h * f > ALIAS_LIMIT {
            return Err(Error::Aliasing { step: h, freq: f, limit: ALIAS_LIMIT });
        }
    }
    let samples = match spec {
        GeneratorSpec::Custom { samples, .. } => {
            if count > samples.len() {
                return Err(Error::InvalidRange(format!(
                    "custom generator has {} samples, {count} requested",
                    samples.len()
                )));
            }
            samples[..count].to_vec()
        }
        GeneratorSpec::PartialSums { .. } => {
            // step function of floor(x): render the integers once
            let lo = x0.floor() as i64;
            let hi = (x0 + h * (count - 1) as f64).floor() as i64;
            let ints = spec.integer_values(lo, hi)?;
            (0..count)
                .map(|j| ints[((x0 + j as f64 * h).floor() as i64 - lo) as usize])
                .collect()
        }
        _ => (0..count)
            .map(|j| spec.evaluate(x0 + j as f64 * h))
            .collect::<Result<Vec<_>>>()?,
    };
    let signal = ContinuousSignal::new(x0, h, samples)?;
    let signal = match spec.declared_bound() {
        Some(b) => signal.with_bound(b)?,
        None => signal,
    };
    Ok(signal.mark_closed_form(spec.is_closed_form()))
}
