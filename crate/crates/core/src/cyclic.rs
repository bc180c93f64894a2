//! Exact harmonic analysis on the finite cyclic groups `Z_N`.
//!
//! Characters are `chi_l(x) = e^{2 pi i l x / N}` and the Fourier transform
//! is `f^(l) = sum_x f(x) e^{-2 pi i l x / N}`. Functionals pair with
//! functions through the bilinear form `<f, psi> = sum_t f(-t) psi(t)`, which
//! in Fourier coordinates reads `(1/N) sum_l f^(l) psi^(l)` without complex
//! conjugation. All subspace computations happen in those coordinates.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::character;
use crate::linalg::{clean, max_abs, rref, Rref};
use crate::spectral::{dft, idft};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default relative tolerance for zero sets and spectra.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A function on `Z_N`; `values[x]` is the value at `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicFunction {
    pub values: Vec<Complex64>,
}

impl CyclicFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("a function on Z_N needs N >= 1 values".into()));
        }
        Ok(CyclicFunction { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn zero(n: usize) -> Self {
        CyclicFunction { values: vec![ZERO; n] }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        CyclicFunction { values: vec![c; n] }
    }

    /// Unit mass at `x`.
    pub fn delta(n: usize, x: usize) -> Self {
        let mut f = Self::zero(n);
        f.values[x % n] = Complex64::new(1.0, 0.0);
        f
    }

    /// `chi_l(x) = e^{2 pi i l x / N}`.
    pub fn character(n: usize, l: usize) -> Self {
        CyclicFunction {
            values: (0..n).map(|x| character((l * x % n) as f64 / n as f64, 1.0)).collect(),
        }
    }

    /// `(tau_s f)(x) = f(x - s)`.
    pub fn translate(&self, s: usize) -> Self {
        let n = self.n();
        CyclicFunction {
            values: (0..n).map(|x| self.values[(x + n - s % n) % n]).collect(),
        }
    }

    /// `x -> f(-x)`.
    pub fn reflect(&self) -> Self {
        let n = self.n();
        CyclicFunction {
            values: (0..n).map(|x| self.values[(n - x) % n]).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        max_abs(&self.values)
    }

    /// `index,re,im` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["index", "re", "im"])?;
        for (x, v) in self.values.iter().enumerate() {
            w.write_record([x.to_string(), v.re.to_string(), v.im.to_string()])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
            .expect("csv writer emits utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut values = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let field = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::Parse(format!("row {row}: bad field {i}")))
            };
            if field(0)? as usize != row {
                return Err(Error::Parse(format!("row {row}: indices must run 0..N")));
            }
            values.push(Complex64::new(field(1)?, field(2)?));
        }
        Self::new(values)
    }
}

/// `f^(l) = sum_x f(x) e^{-2 pi i l x / N}`.
pub fn zn_fourier(f: &CyclicFunction) -> CyclicFunction {
    CyclicFunction { values: dft(&f.values) }
}

/// `f(x) = (1/N) sum_l f^(l) e^{2 pi i l x / N}`.
pub fn zn_inverse(fhat: &CyclicFunction) -> CyclicFunction {
    CyclicFunction { values: idft(&fhat.values) }
}

/// `(f * g)(x) = sum_t f(t) g(x - t)`, summed directly.
pub fn circular_convolve(f: &CyclicFunction, g: &CyclicFunction) -> Result<CyclicFunction> {
    let n = same_order(f, g)?;
    Ok(CyclicFunction {
        values: (0..n)
            .map(|x| (0..n).map(|t| f.values[t] * g.values[(x + n - t) % n]).sum())
            .collect(),
    })
}

/// `<f, psi> = sum_t f(-t) psi(t) = (f * psi)(0)`.
pub fn pairing(f: &CyclicFunction, psi: &CyclicFunction) -> Result<Complex64> {
    same_order(f, psi)?;
    let (f, psi) = (&f.values, &psi.values);
    Ok(f[0] * psi[0] + f[1..].iter().rev().zip(&psi[1..]).map(|(a, b)| a * b).sum::<Complex64>())
}

fn same_order(f: &CyclicFunction, g: &CyclicFunction) -> Result<usize> {
    if f.n() != g.n() {
        return Err(Error::InvalidArgument(format!("orders differ: {} vs {}", f.n(), g.n())));
    }
    Ok(f.n())
}

fn support_of(values: &[Complex64], tol: f64) -> Vec<usize> {
    let cut = (tol * max_abs(values)).powi(2);
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm_sqr() > cut)
        .map(|(l, _)| l)
        .collect()
}

/// `{l : |f^(l)| <= tol * max |f^|}`; the zero function vanishes everywhere.
pub fn zero_set(f: &CyclicFunction, tol: f64) -> Vec<usize> {
    let fhat = zn_fourier(f).values;
    let scale = max_abs(&fhat);
    if scale == 0.0 {
        return (0..f.n()).collect();
    }
    fhat.iter()
        .enumerate()
        .filter(|(_, v)| v.norm() <= tol * scale)
        .map(|(l, _)| l)
        .collect()
}

fn check_subset(c: &[usize], n: usize) -> Result<Vec<usize>> {
    if let Some(&bad) = c.iter().find(|&&l| l >= n) {
        return Err(Error::InvalidArgument(format!("frequency {bad} is not in Z_{n}")));
    }
    let mut s = c.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// The ideal of functions whose transform vanishes on `zero_set`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicIdealBasis {
    pub n: usize,
    pub basis: Vec<CyclicFunction>,
    pub zero_set: Vec<usize>,
}

impl CyclicIdealBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Whether `f` lies in the ideal: its transform vanishes on the zero set.
    pub fn contains(&self, f: &CyclicFunction, tol: f64) -> bool {
        let fhat = zn_fourier(f).values;
        let cut = tol * max_abs(&f.values).max(f64::MIN_POSITIVE) * self.n as f64;
        self.zero_set.iter().all(|&l| fhat[l].norm() <= cut)
    }
}

/// Basis `{chi_l / N : l not in C}` of `{f : f^ = 0 on C}`.
pub fn ideal_for(c: &[usize], n: usize) -> Result<CyclicIdealBasis> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let zero = check_subset(c, n)?;
    let mut in_c = vec![false; n];
    zero.iter().for_each(|&l| in_c[l] = true);
    let roots: Vec<Complex64> = (0..n).map(|k| character(k as f64 / n as f64, 1.0) / n as f64).collect();
    let basis = (0..n)
        .filter(|&l| !in_c[l])
        .map(|l| CyclicFunction {
            values: (0..n).map(|x| roots[l * x % n]).collect(),
        })
        .collect();
    Ok(CyclicIdealBasis { n, basis, zero_set: zero })
}

fn fourier_rows(basis: &[CyclicFunction], n: usize) -> Result<Vec<Vec<Complex64>>> {
    basis
        .iter()
        .map(|f| {
            if f.n() != n {
                return Err(Error::InvalidArgument(format!("basis vector has length {}, expected {n}", f.n())));
            }
            let mut v = dft(&f.values);
            clean(&mut v);
            Ok(v)
        })
        .collect()
}

fn span_rref(basis: &[CyclicFunction], n: usize) -> Result<Rref> {
    Ok(rref(fourier_rows(basis, n)?, n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annihilator {
    pub basis: Vec<CyclicFunction>,
    /// Rank of the input family.
    pub input_rank: usize,
    /// The input family was linearly dependent (duplicates are dropped).
    pub rank_deficient: bool,
}

impl Annihilator {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Basis of `{psi : <f, psi> = 0 for every f in span(basis)}`.
pub fn annihilator(basis: &[CyclicFunction], n: usize) -> Result<Annihilator> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let r = span_rref(basis, n)?;
    let out = r
        .null_space()
        .into_iter()
        .map(|v| CyclicFunction { values: idft(&v) })
        .collect();
    Ok(Annihilator {
        basis: out,
        input_rank: r.rank(),
        rank_deficient: r.rank() < basis.len(),
    })
}

/// Whether two families span the same subspace of functions on `Z_N`.
pub fn same_span(a: &[CyclicFunction], b: &[CyclicFunction], n: usize, tol: f64) -> Result<bool> {
    let ra = span_rref(a, n)?;
    let rb = span_rref(b, n)?;
    if ra.rank() != rb.rank() {
        return Ok(false);
    }
    let inside = |r: &Rref, rows: Vec<Vec<Complex64>>| rows.iter().all(|v| r.residual(v) <= tol * max_abs(v).max(1.0));
    Ok(inside(&ra, fourier_rows(b, n)?) && inside(&rb, fourier_rows(a, n)?))
}

/// `sp(psi) = supp psi^`, relative to `tol * max |psi^|`.
pub fn spectrum_of(psi: &CyclicFunction, tol: f64) -> Vec<usize> {
    support_of(&dft(&psi.values), tol)
}

/// `sp(psi)` from its definition: the common zeros of every `f` with
/// `f * psi = 0`. Solves the circulant system in the time domain, so it costs
/// `O(N^3)`; meant as an independent check for small `N`.
pub fn spectrum_via_ideal(psi: &CyclicFunction, tol: f64) -> Vec<usize> {
    let n = psi.n();
    // (f * psi)(x) = sum_t psi(x - t) f(t)
    let rows: Vec<Vec<Complex64>> = (0..n)
        .map(|x| (0..n).map(|t| psi.values[(x + n - t) % n]).collect())
        .collect();
    let kernel = rref(rows, n).null_space();
    let mut common = vec![true; n];
    for f in kernel {
        let z = zero_set(&CyclicFunction { values: f }, tol);
        let mut here = vec![false; n];
        z.into_iter().for_each(|l| here[l] = true);
        common.iter_mut().zip(here).for_each(|(c, h)| *c &= h);
    }
    (0..n).filter(|&l| common[l]).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterSpectrumReport {
    /// `Z(J(Phi))`, from the kernel of convolution against `Phi`.
    pub spectrum: Vec<usize>,
    /// `{l : chi_l in Phi}`.
    pub characters: Vec<usize>,
    pub equal: bool,
    pub dimension: usize,
    pub invariance_residual: f64,
}

/// Compares `sp(Phi)` with the set of characters lying in the invariant
/// subspace `Phi = span(basis)`.
pub fn verify_character_spectrum(basis: &[CyclicFunction], n: usize, tol: f64) -> Result<CharacterSpectrumReport> {
    let rows = fourier_rows(basis, n)?;
    let r = rref(rows.clone(), n);
    // translation by 1 multiplies the transform by e^{-2 pi i l / N}
    let mut invariance_residual: f64 = 0.0;
    for v in &rows {
        let shifted: Vec<Complex64> = v
            .iter()
            .enumerate()
            .map(|(l, &x)| x * character(-(l as f64) / n as f64, 1.0))
            .collect();
        let scale = max_abs(v).max(f64::MIN_POSITIVE);
        invariance_residual = invariance_residual.max(r.residual(&shifted) / scale);
    }
    if invariance_residual > tol {
        return Err(Error::NotInvariant { residual: invariance_residual });
    }
    // J(Phi) = {f : f^ phi^ = 0 for all phi in Phi}: a coordinate condition at
    // each frequency some phi^ charges
    let scale = rows.iter().map(|v| max_abs(v)).fold(0.0, f64::max);
    let charged: Vec<bool> = (0..n).map(|l| rows.iter().any(|v| v[l].norm() > tol * scale)).collect();
    let constraint_rows: Vec<Vec<Complex64>> = (0..n)
        .filter(|&l| charged[l])
        .map(|l| {
            let mut e = vec![ZERO; n];
            e[l] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    let touched = rref(constraint_rows, n).null_support();
    let spectrum: Vec<usize> = (0..n).filter(|&l| !touched[l]).collect();
    // chi_l^ = N e_l lies in the row space iff the pivot row at l is e_l
    let characters: Vec<usize> = r
        .rows
        .iter()
        .zip(&r.pivots)
        .filter(|(row, &p)| row.iter().enumerate().all(|(j, x)| j == p || x.norm() <= tol))
        .map(|(_, &p)| p)
        .collect();
    Ok(CharacterSpectrumReport {
        equal: spectrum == characters,
        spectrum,
        characters,
        dimension: r.rank(),
        invariance_residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantMeanReport {
    /// `phi(tau_s psi) = phi(psi)` for every shift.
    pub invariant: bool,
    pub shift_residual: f64,
    pub spectrum: Vec<usize>,
    pub spectrum_is_zero: bool,
    /// `invariant == spectrum_is_zero`.
    pub equivalence_holds: bool,
}

/// `phi(psi) = sum_t w(t) psi(t)` for a weight vector `w`. A mean needs
/// `w >= 0` and `sum w = 1`; it is invariant exactly when its spectrum is
/// `{0}`. The spectrum of the functional is `-supp w^`.
pub fn invariant_mean_check(weights: &CyclicFunction, tol: f64) -> Result<InvariantMeanReport> {
    let n = weights.n();
    let w = &weights.values;
    if w.iter().any(|v| v.im.abs() > tol || v.re < -tol) {
        return Err(Error::NotAMean("weights must be nonnegative".into()));
    }
    let total: Complex64 = w.iter().sum();
    if (total - Complex64::new(1.0, 0.0)).norm() > tol {
        return Err(Error::NotAMean(format!("weights sum to {total}, not 1")));
    }
    let shift_residual = (0..n).map(|t| (w[(t + 1) % n] - w[t]).norm()).fold(0.0, f64::max);
    let invariant = shift_residual <= tol * weights.sup_norm();
    let mut spectrum: Vec<usize> = spectrum_of(weights, tol).into_iter().map(|l| (n - l) % n).collect();
    spectrum.sort_unstable();
    let spectrum_is_zero = spectrum == [0];
    Ok(InvariantMeanReport {
        invariant,
        shift_residual,
        spectrum_is_zero,
        equivalence_holds: invariant == spectrum_is_zero,
        spectrum,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanAnnihilatorReport {
    /// The uniform mean kills `psi`: `sum psi = 0`.
    pub zero_sum: bool,
    pub zero_in_spectrum: bool,
    /// `zero_sum == !zero_in_spectrum`.
    pub equivalence_holds: bool,
}

pub fn mean_annihilator_check(psi: &CyclicFunction, tol: f64) -> MeanAnnihilatorReport {
    let n = psi.n() as f64;
    let sum: Complex64 = psi.values.iter().sum();
    let scale = psi.sup_norm();
    let zero_sum = sum.norm() <= tol * scale * n;
    let zero_in_spectrum = spectrum_of(psi, tol).first() == Some(&0);
    MeanAnnihilatorReport {
        zero_sum,
        zero_in_spectrum,
        equivalence_holds: zero_sum != zero_in_spectrum,
    }
}

/// Pass count and worst error of one family of checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckTally {
    pub passed: usize,
    pub failed: usize,
    pub max_error: f64,
}

impl CheckTally {
    fn record(&mut self, ok: bool, error: f64) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        self.max_error = self.max_error.max(error);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicSuiteReport {
    pub n: usize,
    pub cases: usize,
    pub seed: u64,
    pub tol: f64,
    pub fourier_round_trip: CheckTally,
    pub convolution_theorem: CheckTally,
    pub character_spectrum: CheckTally,
    pub invariant_mean: CheckTally,
    pub mean_annihilator: CheckTally,
    pub double_annihilator: CheckTally,
    pub ideal_annihilator: CheckTally,
    pub empty_spectrum: CheckTally,
    /// Definition-based spectrum agrees with `supp psi^` (run for `N <= 64`).
    pub spectrum_definition: CheckTally,
    pub all_passed: bool,
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_function(rng: &mut ChaCha8Rng, n: usize) -> CyclicFunction {
    CyclicFunction {
        values: (0..n).map(|_| random_complex(rng)).collect(),
    }
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> Vec<usize> {
    let len = rng.random_range(0..=max_len.min(n));
    let mut s: Vec<usize> = (0..len).map(|_| rng.random_range(0..n)).collect();
    s.sort_unstable();
    s.dedup();
    s
}

/// Seeded randomized run of every identity of the finite model.
pub fn cyclic_suite(n: usize, cases: usize, seed: u64, tol: f64) -> Result<CyclicSuiteReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut rep = CyclicSuiteReport {
        n,
        cases,
        seed,
        tol,
        fourier_round_trip: CheckTally::default(),
        convolution_theorem: CheckTally::default(),
        character_spectrum: CheckTally::default(),
        invariant_mean: CheckTally::default(),
        mean_annihilator: CheckTally::default(),
        double_annihilator: CheckTally::default(),
        ideal_annihilator: CheckTally::default(),
        empty_spectrum: CheckTally::default(),
        spectrum_definition: CheckTally::default(),
        all_passed: false,
    };
    let small = (n / 2).clamp(1, 24);
    for case in 0..cases {
        let f = random_function(&mut rng, n);
        let back = zn_inverse(&zn_fourier(&f));
        let err = f.values.iter().zip(&back.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / f.sup_norm();
        rep.fourier_round_trip.record(err <= 1e-12, err);

        let g = random_function(&mut rng, n);
        let conv = zn_fourier(&circular_convolve(&f, &g)?);
        let (fh, gh) = (zn_fourier(&f), zn_fourier(&g));
        let scale = conv.sup_norm().max(1.0);
        let err = (0..n)
            .map(|l| (conv.values[l] - fh.values[l] * gh.values[l]).norm())
            .fold(0.0, f64::max)
            / scale;
        rep.convolution_theorem.record(err <= 1e-10, err);

        // invariant subspace: random mixtures of a random set of characters,
        // with one redundant vector
        let chars = random_subset(&mut rng, n, small);
        let mut basis: Vec<CyclicFunction> = (0..chars.len())
            .map(|_| {
                let mut v = CyclicFunction::zero(n);
                for &l in &chars {
                    let c = random_complex(&mut rng);
                    v.values.iter_mut().zip(&CyclicFunction::character(n, l).values).for_each(|(a, b)| *a += c * b);
                }
                v
            })
            .collect();
        if let (Some(a), Some(b)) = (basis.first().cloned(), basis.last().cloned()) {
            basis.push(CyclicFunction {
                values: a.values.iter().zip(&b.values).map(|(x, y)| x + y * 2.0).collect(),
            });
        }
        let report = verify_character_spectrum(&basis, n, tol)?;
        let ok = report.equal && report.spectrum == chars;
        rep.character_spectrum.record(ok, report.invariance_residual);

        let weights = match case % 3 {
            0 => CyclicFunction::constant(n, Complex64::new(1.0 / n as f64, 0.0)),
            1 => CyclicFunction::delta(n, rng.random_range(0..n)),
            _ => {
                let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
                let total: f64 = raw.iter().sum();
                CyclicFunction::from_real(&raw.iter().map(|x| x / total).collect::<Vec<_>>())?
            }
        };
        let m = invariant_mean_check(&weights, tol)?;
        let expected_invariant = case % 3 == 0 || n == 1;
        rep.invariant_mean
            .record(m.equivalence_holds && m.invariant == expected_invariant, m.shift_residual);

        let mut psi = random_function(&mut rng, n);
        if case % 2 == 0 {
            let mean: Complex64 = psi.values.iter().sum::<Complex64>() / n as f64;
            psi.values.iter_mut().for_each(|v| *v -= mean);
        }
        let a = mean_annihilator_check(&psi, tol);
        rep.mean_annihilator
            .record(a.equivalence_holds && a.zero_sum == (case % 2 == 0), 0.0);

        let dim = rng.random_range(0..=small.min(n));
        let e: Vec<CyclicFunction> = (0..dim).map(|_| random_function(&mut rng, n)).collect();
        let perp = annihilator(&e, n)?;
        let perp2 = annihilator(&perp.basis, n)?;
        // direct pairings against a random sample of the annihilator
        let sample: Vec<&CyclicFunction> = if perp.basis.len() <= 64 {
            perp.basis.iter().collect()
        } else {
            (0..64).map(|_| &perp.basis[rng.random_range(0..perp.basis.len())]).collect()
        };
        let pair_err = e
            .iter()
            .flat_map(|x| sample.iter().map(move |y| (x, *y)))
            .map(|(x, y)| pairing(x, y).map(|p| p.norm() / (x.sup_norm() * y.sup_norm() * n as f64)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let ok = perp.input_rank + perp.dimension() == n && same_span(&e, &perp2.basis, n, tol)? && pair_err <= tol;
        rep.double_annihilator.record(ok, pair_err);

        let c = random_subset(&mut rng, n, small);
        let ideal = ideal_for(&c, n)?;
        let ann = annihilator(&ideal.basis, n)?;
        let chars_c: Vec<CyclicFunction> = c.iter().map(|&l| CyclicFunction::character(n, l)).collect();
        let ok = ideal.dimension() == n - c.len() && same_span(&ann.basis, &chars_c, n, tol)?;
        rep.ideal_annihilator.record(ok, 0.0);

        let zero = CyclicFunction::zero(n);
        let ok = spectrum_of(&zero, 0.0).is_empty() && !spectrum_of(&f, 0.0).is_empty();
        rep.empty_spectrum.record(ok, 0.0);

        if n <= 64 {
            let mut psi = random_function(&mut rng, n);
            let drop = random_subset(&mut rng, n, n / 2);
            let mut hat = dft(&psi.values);
            drop.iter().for_each(|&l| hat[l] = ZERO);
            psi.values = idft(&hat);
            let direct = spectrum_of(&psi, tol);
            let expected: Vec<usize> = (0..n).filter(|l| !drop.contains(l)).collect();
            rep.spectrum_definition
                .record(direct == expected && spectrum_via_ideal(&psi, tol) == expected, 0.0);
        }
    }
    rep.all_passed = [
        &rep.fourier_round_trip,
        &rep.convolution_theorem,
        &rep.character_spectrum,
        &rep.invariant_mean,
        &rep.mean_annihilator,
        &rep.double_annihilator,
        &rep.ideal_annihilator,
        &rep.empty_spectrum,
        &rep.spectrum_definition,
    ]
    .iter()
    .all(|t| t.failed == 0);
    Ok(rep)
}
