//! Precoder construction: Cyclic Zero-padding for wide channels, scalar
//! ratio precoders for SISO retransmissions and inverse-based MISO precoders.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_square, CMatrix};

/// Support of an `A×A` Cyclic Zero-padding precoder: every column holds a
/// band of `B` nonzero rows, and the band of column `j + 1` is the band of
/// column `j` shifted up by one row, wrapping around.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroPattern {
    pub size: usize,
    pub band: usize,
    /// 0-based nonzero rows of each column, ascending.
    pub columns: Vec<Vec<usize>>,
}

impl ZeroPattern {
    pub fn is_nonzero(&self, row: usize, col: usize) -> bool {
        self.columns[col].binary_search(&row).is_ok()
    }

    /// True when every entry of `m` outside the pattern is exactly zero.
    pub fn admits(&self, m: &CMatrix) -> bool {
        m.shape() == (self.size, self.size)
            && (0..self.size).all(|i| {
                (0..self.size).all(|j| {
                    self.is_nonzero(i, j) || (m[(i, j)].re == 0.0 && m[(i, j)].im == 0.0)
                })
            })
    }
}

/// Cyclic Zero-padding pattern for an `A×A` precoder with band `B`.
///
/// Column `j` (0-based) is supported on rows `(r − j) mod A` for `r < B`.
pub fn czp_pattern(size: usize, band: usize) -> Result<ZeroPattern> {
    if band == 0 || size == 0 {
        return Err(Error::Unsupported("pattern sizes must be positive".into()));
    }
    if band > size {
        return Err(Error::Unsupported(format!(
            "band {band} exceeds precoder size {size}; switch off receive antennas first"
        )));
    }
    let columns = (0..size)
        .map(|j| {
            let mut rows: Vec<usize> = (0..band).map(|r| (r + size - j % size) % size).collect();
            rows.sort_unstable();
            rows
        })
        .collect();
    Ok(ZeroPattern {
        size,
        band,
        columns,
    })
}

/// A precoding matrix together with the structure it was built with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Precoder {
    pub matrix: CMatrix,
    pub pattern: Option<ZeroPattern>,
    /// `(target slot, current slot)` the alignment binds, when known.
    pub source_slots: Option<(u64, u64)>,
}

impl Precoder {
    pub fn with_slots(mut self, target: u64, current: u64) -> Self {
        self.source_slots = Some((target, current));
        self
    }

    /// `‖H_now·V − H_target‖ / ‖H_target‖`.
    pub fn alignment_residual(&self, h_now: &CMatrix, h_target: &CMatrix) -> f64 {
        let diff = &(h_now * &self.matrix) - h_target;
        diff.frobenius_norm() / h_target.frobenius_norm().max(f64::MIN_POSITIVE)
    }
}

/// Solves `H_now·V = H_target` for a `B×A` channel with `B ≤ A`, with `V`
/// confined to the Cyclic Zero-padding pattern.
///
/// Each column `j` of `V` comes from the `B×B` system formed by the columns of
/// `H_now` on the pattern rows `R_j`. With `B = A` this is the plain inverse.
pub fn czp_precoder(h_now: &CMatrix, h_target: &CMatrix) -> Result<Precoder> {
    if h_now.shape() != h_target.shape() {
        return Err(Error::Dimension(format!(
            "current channel {:?} and target {:?} differ in shape",
            h_now.shape(),
            h_target.shape()
        )));
    }
    let (band, size) = h_now.shape();
    let pattern = czp_pattern(size, band)?;
    let mut v = CMatrix::zeros(size, size);
    for (j, rows) in pattern.columns.iter().enumerate() {
        let sub = h_now.select_columns(rows);
        let rhs = h_target.select_columns(&[j]);
        let x = solve_square(&sub, &rhs).map_err(|e| {
            Error::DegenerateChannel(format!("column {j} subsystem on rows {rows:?}: {e}"))
        })?;
        for (k, &row) in rows.iter().enumerate() {
            v[(row, j)] = x[(k, 0)];
        }
    }
    Ok(Precoder {
        matrix: v,
        pattern: Some(pattern),
        source_slots: None,
    })
}

/// `h_target / h_now`, refusing coefficients below `floor` in magnitude.
pub fn scalar_ratio_precoder(h_target: Complex64, h_now: Complex64, floor: f64) -> Result<Complex64> {
    let mag = h_now.norm();
    if mag.is_nan() || mag < floor || mag == 0.0 {
        return Err(Error::DegenerateChannel(format!(
            "|h_now| = {:e} is below the magnitude floor {floor:e}",
            h_now.norm()
        )));
    }
    Ok(h_target / h_now)
}

/// `V = Ĥ(n)⁻¹·Ĥ(t₁)` where both stacks hold the rows of every receiver
/// except the intended one, so that each of those rows sees `h(n)·V = h(t₁)`.
pub fn misox_precoder(rows_now: &CMatrix, rows_t1: &CMatrix) -> Result<Precoder> {
    if !rows_now.is_square() || rows_now.shape() != rows_t1.shape() {
        return Err(Error::Dimension(format!(
            "stacked rows must be square and equal in shape, got {:?} and {:?}",
            rows_now.shape(),
            rows_t1.shape()
        )));
    }
    let matrix = solve_square(rows_now, rows_t1)
        .map_err(|e| Error::DegenerateChannel(format!("stacked channel: {e}")))?;
    Ok(Precoder {
        matrix,
        pattern: None,
        source_slots: None,
    })
}
