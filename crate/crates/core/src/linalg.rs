//! Dense complex matrices and the handful of factorizations the schemes need.
//!
//! Everything here is sized for tiny systems (a few tens of rows at most), so
//! the kernels are plain Gaussian elimination with pivoting. Tolerances live in
//! [`Tolerances`] so that callers can tighten or loosen them in one place.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by the whole crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative residual `‖A·X − B‖ / ‖B‖` accepted from a square solve.
    pub solve_rel: f64,
    /// A pivot below `singular_pivot · max|a_ij|` marks the matrix singular.
    pub singular_pivot: f64,
    /// Relative threshold used by [`rank_tol`].
    pub rank: f64,
    /// Relative alignment residual `‖H_now·V − H_target‖ / ‖H_target‖`.
    pub alignment: f64,
    /// Largest accepted `|recovered − truth|` per decoded symbol.
    pub decode_residual: f64,
    /// Interference leakage after cancellation, relative to the signal scale.
    pub leakage: f64,
    /// Agreement between transmitter- and receiver-side side information.
    pub side_info: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        solve_rel: 1e-10,
        singular_pivot: 1e-12,
        rank: 1e-9,
        alignment: 1e-9,
        decode_residual: 1e-8,
        leakage: 1e-9,
        side_info: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl TryFrom<RawMatrix> for CMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        CMatrix::from_vec(raw.rows, raw.cols, raw.data)
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Dimension("non-finite matrix entry".into()));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    /// Column vector.
    pub fn column_vector(v: &[Complex64]) -> Self {
        CMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// The entries of an `n×1` or `1×n` matrix.
    pub fn to_vec(&self) -> Vec<Complex64> {
        self.data.clone()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)])
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    /// The leading `n` rows.
    pub fn top_rows(&self, n: usize) -> Self {
        let idx: Vec<usize> = (0..n.min(self.rows)).collect();
        self.select_rows(&idx)
    }

    /// Stacks matrices vertically. All blocks must share a column count.
    pub fn vstack(blocks: &[CMatrix]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::Dimension("vstack with mismatched column counts".into()));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().copied()).collect();
        Ok(CMatrix { rows, cols, data })
    }

    /// Concatenates matrices horizontally. All blocks must share a row count.
    pub fn hstack(blocks: &[CMatrix]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::Dimension("hstack with mismatched row counts".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, offset + j)] = b[(i, j)];
                }
            }
            offset += b.cols;
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum dimension mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference dimension mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Element-wise difference of two vectors.
pub fn vec_sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Largest entry magnitude of `a − b`.
pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn vec_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Partial-pivoted LU factors of a square matrix, stored packed.
struct Lu {
    n: usize,
    packed: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
    min_pivot: f64,
    max_pivot: f64,
    singular: bool,
}

fn lu_partial(a: &CMatrix, tol: &Tolerances) -> Result<Lu> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let threshold = tol.singular_pivot * a.max_abs();
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let mut min_pivot = f64::INFINITY;
    let mut max_pivot: f64 = 0.0;
    let mut singular = n > 0 && a.max_abs() == 0.0;
    for k in 0..n {
        let (p, mag) = (k..n)
            .map(|i| (i, m[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        min_pivot = min_pivot.min(mag);
        max_pivot = max_pivot.max(mag);
        if mag <= threshold || mag == 0.0 {
            singular = true;
            continue;
        }
        if p != k {
            for j in 0..n {
                m.data.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            swaps += 1;
        }
        let pivot = m[(k, k)];
        for i in (k + 1)..n {
            let factor = m[(i, k)] / pivot;
            m[(i, k)] = factor;
            if factor.re == 0.0 && factor.im == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                let u = m[(k, j)];
                m[(i, j)] -= factor * u;
            }
        }
    }
    Ok(Lu {
        n,
        packed: m,
        perm,
        swaps,
        min_pivot: if n == 0 { 0.0 } else { min_pivot },
        max_pivot,
        singular,
    })
}

impl Lu {
    fn solve_columns(&self, b: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut x = b.select_rows(&self.perm);
        for c in 0..b.cols {
            for i in 0..n {
                let mut acc = x[(i, c)];
                for k in 0..i {
                    acc -= self.packed[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[(i, c)];
                for k in (i + 1)..n {
                    acc -= self.packed[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = acc / self.packed[(i, i)];
            }
        }
        x
    }
}

/// Solves `A·X = B` for square `A` with the default tolerances.
pub fn solve_square(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    solve_square_with(a, b, &Tolerances::DEFAULT)
}

/// Solves `A·X = B` by partial-pivoted elimination.
///
/// Fails with [`Error::Singular`] when a pivot falls below
/// `tol.singular_pivot · max|a_ij|`, and with [`Error::Dimension`] when the
/// solution does not meet the relative residual bound `tol.solve_rel`.
pub fn solve_square_with(a: &CMatrix, b: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    if a.rows != b.rows {
        return Err(Error::Dimension(format!(
            "left side has {} rows, right side {}",
            a.rows, b.rows
        )));
    }
    let lu = lu_partial(a, tol)?;
    if lu.singular {
        return Err(Error::Singular { pivot: lu.min_pivot });
    }
    let x = lu.solve_columns(b);
    let residual = (&(a * &x) - b).frobenius_norm();
    let scale = b.frobenius_norm().max(f64::MIN_POSITIVE);
    if b.frobenius_norm() > 0.0 && residual > tol.solve_rel * scale {
        return Err(Error::Singular { pivot: lu.min_pivot });
    }
    Ok(x)
}

/// Solves a consistent, possibly over-determined system `A·x = b` with
/// `A` of shape `m×n`, `m ≥ n`.
///
/// Row pivoting picks `n` independent equations; the remaining rows are
/// implied when the system is consistent. Fails if `A` has rank below `n`.
pub fn solve_consistent(a: &CMatrix, b: &[Complex64], tol: &Tolerances) -> Result<Vec<Complex64>> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::Dimension(format!("under-determined {m}x{n} system")));
    }
    if b.len() != m {
        return Err(Error::Dimension(format!("right side has {} entries, need {m}", b.len())));
    }
    if m == n {
        return Ok(solve_square_with(a, &CMatrix::column_vector(b), tol)?.to_vec());
    }
    let threshold = tol.singular_pivot * a.max_abs();
    let mut work = a.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let (p, mag) = (k..m)
            .map(|i| (i, work[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag <= threshold || mag == 0.0 {
            return Err(Error::Singular { pivot: mag.max(0.0) });
        }
        if p != k {
            for j in 0..n {
                work.data.swap(k * n + j, p * n + j);
            }
            rhs.swap(k, p);
        }
        let pivot = work[(k, k)];
        for i in (k + 1)..m {
            let factor = work[(i, k)] / pivot;
            if factor.re == 0.0 && factor.im == 0.0 {
                continue;
            }
            for j in k..n {
                let u = work[(k, j)];
                work[(i, j)] -= factor * u;
            }
            let r = rhs[k];
            rhs[i] -= factor * r;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for k in (i + 1)..n {
            acc -= work[(i, k)] * x[k];
        }
        x[i] = acc / work[(i, i)];
    }
    Ok(x)
}

/// Numerical rank with the default relative threshold.
pub fn rank(a: &CMatrix) -> usize {
    rank_tol(a, Tolerances::DEFAULT.rank)
}

/// Numerical rank by complete-pivoting elimination: the number of pivots
/// whose magnitude exceeds `tol · max|a_ij|`.
pub fn rank_tol(a: &CMatrix, tol: f64) -> usize {
    let (m, n) = a.shape();
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0;
    }
    let threshold = tol * scale;
    let mut work = a.clone();
    let mut rank = 0;
    for k in 0..m.min(n) {
        let mut best = (k, k, -1.0);
        for i in k..m {
            for j in k..n {
                let mag = work[(i, j)].norm();
                if mag > best.2 {
                    best = (i, j, mag);
                }
            }
        }
        let (p, q, mag) = best;
        if mag <= threshold {
            break;
        }
        rank += 1;
        if p != k {
            for j in 0..n {
                work.data.swap(k * n + j, p * n + j);
            }
        }
        if q != k {
            for i in 0..m {
                work.data.swap(i * n + k, i * n + q);
            }
        }
        let pivot = work[(k, k)];
        for i in (k + 1)..m {
            let factor = work[(i, k)] / pivot;
            for j in k..n {
                let u = work[(k, j)];
                work[(i, j)] -= factor * u;
            }
        }
    }
    rank
}

/// Determinant through the same partial-pivoted elimination as [`solve_square`].
pub fn det(a: &CMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of a non-square {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let tol = Tolerances {
        singular_pivot: 0.0,
        ..Tolerances::DEFAULT
    };
    let lu = lu_partial(a, &tol)?;
    if lu.singular {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut d: Complex64 = (0..lu.n).map(|i| lu.packed[(i, i)]).product();
    if lu.swaps % 2 == 1 {
        d = -d;
    }
    Ok(d)
}

/// Cheap conditioning estimate: ratio of the largest to the smallest pivot
/// magnitude of the partial-pivoted LU. Not a true 2-norm condition number;
/// it is infinite for singular input.
pub fn cond_estimate(a: &CMatrix) -> f64 {
    let tol = Tolerances {
        singular_pivot: 0.0,
        ..Tolerances::DEFAULT
    };
    match lu_partial(a, &tol) {
        Ok(lu) if !lu.singular && lu.min_pivot > 0.0 => lu.max_pivot / lu.min_pivot,
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_matrix(&mut rng, 4, 3);
        let x = solve_square(&CMatrix::identity(4), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn solve_recovers_known_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = &random_matrix(&mut rng, 5, 5) + &CMatrix::identity(5).scale(c(3.0, 0.0));
        let x0 = random_matrix(&mut rng, 5, 1);
        let b = &a * &x0;
        let x = solve_square(&a, &b).unwrap();
        assert!(max_abs_diff(x.as_slice(), x0.as_slice()) < 1e-10);
    }

    #[test]
    fn duplicated_rows_are_singular() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut a = random_matrix(&mut rng, 4, 4);
        for j in 0..4 {
            a[(3, j)] = a[(1, j)];
        }
        let b = random_matrix(&mut rng, 4, 1);
        assert!(matches!(solve_square(&a, &b), Err(Error::Singular { .. })));
    }

    #[test]
    fn non_square_solve_is_rejected() {
        let a = CMatrix::zeros(2, 3);
        assert!(matches!(
            solve_square(&a, &CMatrix::zeros(2, 1)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn rank_basic_cases() {
        assert_eq!(rank(&CMatrix::zeros(3, 4)), 0);
        assert_eq!(rank(&CMatrix::identity(4)), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_matrix(&mut rng, 5, 1);
        let v = random_matrix(&mut rng, 1, 6);
        assert_eq!(rank(&(&u * &v)), 1);
    }

    #[test]
    fn det_basic_cases() {
        assert_eq!(det(&CMatrix::identity(3)).unwrap(), c(1.0, 0.0));
        let d = det(&CMatrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)])).unwrap();
        assert!((d - c(6.0, 0.0)).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = random_matrix(&mut rng, 4, 4);
        for i in 0..4 {
            a[(i, 2)] = a[(i, 0)];
        }
        assert!(det(&a).unwrap().norm() < 1e-12);
    }

    #[test]
    fn det_sign_tracks_row_swaps() {
        let p = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert_eq!(det(&p).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn cond_estimate_of_identity_and_singular() {
        assert_eq!(cond_estimate(&CMatrix::identity(3)), 1.0);
        assert!(cond_estimate(&CMatrix::zeros(2, 2)).is_infinite());
    }

    #[test]
    fn consistent_overdetermined_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_matrix(&mut rng, 7, 4);
        let x0 = random_matrix(&mut rng, 4, 1);
        let b = a.mul_vec(x0.as_slice());
        let x = solve_consistent(&a, &b, &Tolerances::DEFAULT).unwrap();
        assert!(max_abs_diff(&x, x0.as_slice()) < 1e-10);
    }

    #[test]
    fn matrix_json_shape_is_validated() {
        let good = r#"{"rows":1,"cols":2,"data":[[1.0,0.0],[0.0,1.0]]}"#;
        let m: CMatrix = serde_json::from_str(good).unwrap();
        assert_eq!(m[(0, 1)], c(0.0, 1.0));
        let bad = r#"{"rows":2,"cols":2,"data":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<CMatrix>(bad).is_err());
    }

    #[test]
    fn stacking() {
        let a = CMatrix::identity(2);
        let b = CMatrix::zeros(1, 2);
        let v = CMatrix::vstack(&[a.clone(), b]).unwrap();
        assert_eq!(v.shape(), (3, 2));
        let h = CMatrix::hstack(&[a.clone(), a]).unwrap();
        assert_eq!(h.shape(), (2, 4));
        assert_eq!(h[(1, 3)], c(1.0, 0.0));
    }
}
