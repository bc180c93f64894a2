//! Reduced row echelon form over the complex numbers.
//!
//! Row operations touch only the nonzero entries of the pivot row, so sparse
//! systems (coordinate subspaces in Fourier space, free-variable null-space
//! bases) reduce in time proportional to their fill.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative size below which entries are treated as roundoff and cleared.
pub(crate) const CLEAN_REL: f64 = 1e-13;

/// Relative pivot threshold deciding rank.
pub(crate) const RANK_REL: f64 = 1e-10;

pub(crate) fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).fold(0.0, f64::max).sqrt()
}

/// Zero every entry below `CLEAN_REL` times the largest one.
pub(crate) fn clean(v: &mut [Complex64]) {
    let cut = (CLEAN_REL * max_abs(v)).powi(2);
    for x in v.iter_mut() {
        if x.norm_sqr() <= cut {
            *x = ZERO;
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Rref {
    /// Pivot rows sorted by pivot column, each with a 1 in its pivot column
    /// and zeros in every other row's pivot column.
    pub rows: Vec<Vec<Complex64>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

/// Row-by-row elimination. Each incoming row is reduced against the pivot
/// rows found so far and, if anything above the rank threshold survives,
/// pivots on its largest entry. A column index of the pivot rows keeps the
/// back-elimination proportional to the fill.
pub(crate) fn rref(rows: Vec<Vec<Complex64>>, ncols: usize) -> Rref {
    let scale = rows.iter().map(|r| max_abs(r)).fold(0.0, f64::max);
    // squared thresholds, compared against |x|^2
    let tol = (RANK_REL * scale.max(f64::MIN_POSITIVE)).powi(2);
    let cut = (CLEAN_REL * scale).powi(2);

    let mut prows: Vec<Vec<Complex64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    // support[i]: columns where pivot row i may be nonzero; marked[i][j] iff
    // j is listed; col_rows[j]: pivot rows listing j
    let mut support: Vec<Vec<usize>> = Vec::new();
    let mut marked: Vec<Vec<bool>> = Vec::new();
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];

    for mut v in rows {
        for x in v.iter_mut() {
            if x.norm_sqr() <= cut {
                *x = ZERO;
            }
        }
        for (k, &p) in pivots.iter().enumerate() {
            let f = v[p];
            if f == ZERO {
                continue;
            }
            for &j in &support[k] {
                v[j] -= f * prows[k][j];
            }
            v[p] = ZERO;
        }
        let (q, best) = v
            .iter()
            .enumerate()
            .map(|(j, x)| (j, x.norm_sqr()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            continue;
        }
        let inv = v[q].inv();
        let cut_scaled = cut * inv.norm_sqr().recip();
        for x in v.iter_mut() {
            if *x == ZERO {
                continue;
            }
            if x.norm_sqr() <= cut_scaled {
                *x = ZERO;
            } else {
                *x *= inv;
            }
        }
        v[q] = Complex64::new(1.0, 0.0);
        let nz: Vec<usize> = (0..ncols).filter(|&j| v[j] != ZERO).collect();

        let mut added: Vec<(usize, usize)> = Vec::new();
        for &i in &col_rows[q] {
            let f = prows[i][q];
            if f == ZERO {
                continue;
            }
            for &j in &nz {
                prows[i][j] -= f * v[j];
                if !marked[i][j] {
                    marked[i][j] = true;
                    support[i].push(j);
                    added.push((j, i));
                }
            }
            prows[i][q] = ZERO;
        }
        for (j, i) in added {
            col_rows[j].push(i);
        }

        let k = prows.len();
        let mut mark = vec![false; ncols];
        for &j in &nz {
            mark[j] = true;
            col_rows[j].push(k);
        }
        marked.push(mark);
        support.push(nz);
        prows.push(v);
        pivots.push(q);
    }

    let mut order: Vec<usize> = (0..pivots.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    let mut taken: Vec<Option<Vec<Complex64>>> = prows.into_iter().map(Some).collect();
    let rows = order.iter().map(|&i| taken[i].take().expect("each row taken once")).collect();
    let pivots = order.iter().map(|&i| pivots[i]).collect();
    Rref { rows, pivots, ncols }
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of `{v : sum_j row_j v_j = 0 for every row}`, one vector per free
    /// column.
    pub fn null_space(&self) -> Vec<Vec<Complex64>> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols)
            .filter(|&j| !is_pivot[j])
            .map(|j| {
                let mut v = vec![ZERO; self.ncols];
                v[j] = Complex64::new(1.0, 0.0);
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = -row[j];
                }
                v
            })
            .collect()
    }

    /// Columns where some null-space vector is nonzero: the free columns and
    /// every pivot column whose row touches a free column.
    pub fn null_support(&self) -> Vec<bool> {
        let mut free = vec![true; self.ncols];
        for &p in &self.pivots {
            free[p] = false;
        }
        let mut out = free.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            out[p] = row.iter().zip(&free).any(|(x, &f)| f && *x != ZERO);
        }
        out
    }

    /// Largest entry of `v` minus its projection onto the row space along the
    /// pivot columns; zero exactly when `v` lies in the span.
    pub fn residual(&self, v: &[Complex64]) -> f64 {
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = r[p];
            if f == ZERO {
                continue;
            }
            for (x, y) in r.iter_mut().zip(row) {
                if *y != ZERO {
                    *x -= f * y;
                }
            }
        }
        max_abs(&r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rank_and_null_space() {
        let rows = vec![vec![c(1.0), c(2.0), c(3.0)], vec![c(2.0), c(4.0), c(6.0)], vec![c(0.0), c(1.0), c(1.0)]];
        let r = rref(rows.clone(), 3);
        assert_eq!(r.rank(), 2);
        let ns = r.null_space();
        assert_eq!(ns.len(), 1);
        for row in &rows {
            let dot: Complex64 = row.iter().zip(&ns[0]).map(|(a, b)| a * b).sum();
            assert!(dot.norm() < 1e-12);
        }
        assert!(r.residual(&[c(1.0), c(3.0), c(4.0)]) < 1e-12);
        assert!(r.residual(&[c(0.0), c(0.0), c(1.0)]) > 0.1);
    }

    #[test]
    fn empty_and_zero_inputs() {
        let r = rref(vec![], 4);
        assert_eq!(r.rank(), 0);
        assert_eq!(r.null_space().len(), 4);
        let r = rref(vec![vec![ZERO; 3]], 3);
        assert_eq!(r.rank(), 0);
    }
}
