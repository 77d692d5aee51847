//! Gaussian elimination over a prime field with block-valued right-hand
//! sides.

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Reduced row echelon form of `[coeffs | rhs]`, computed in place.
/// Returns the pivot column of each leading row.
pub(crate) fn row_reduce(
    field: PrimeField,
    coeffs: &mut [Vec<u64>],
    rhs: &mut [Vec<u64>],
) -> Result<Vec<usize>> {
    let rows = coeffs.len();
    let cols = coeffs.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(sel) = (row..rows).find(|&r| coeffs[r][col] != 0) else {
            continue;
        };
        coeffs.swap(row, sel);
        rhs.swap(row, sel);
        let inv = field.inv(coeffs[row][col])?;
        for v in coeffs[row].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for v in rhs[row].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for r in 0..rows {
            if r == row || coeffs[r][col] == 0 {
                continue;
            }
            let factor = coeffs[r][col];
            let (pivot_c, target_c) = pair_mut(coeffs, row, r);
            for (t, &p) in target_c.iter_mut().zip(pivot_c.iter()) {
                *t = field.sub(*t, field.mul(factor, p));
            }
            let (pivot_r, target_r) = pair_mut(rhs, row, r);
            for (t, &p) in target_r.iter_mut().zip(pivot_r.iter()) {
                *t = field.sub(*t, field.mul(factor, p));
            }
        }
        pivots.push(col);
        row += 1;
    }
    Ok(pivots)
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&T, &mut T) {
    debug_assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

/// Solves a system with full column rank. Extra rows are used only to find
/// pivots; their consistency is not checked.
pub(crate) fn solve_unique(
    field: PrimeField,
    mut coeffs: Vec<Vec<u64>>,
    mut rhs: Vec<Vec<u64>>,
) -> Result<Vec<Vec<u64>>> {
    let cols = coeffs.first().map_or(0, Vec::len);
    let pivots = row_reduce(field, &mut coeffs, &mut rhs)?;
    if pivots.len() < cols {
        return Err(Error::SingularDecodeSystem);
    }
    rhs.truncate(cols);
    Ok(rhs)
}

/// Some solution of a consistent system (free variables set to zero), or
/// `None` when the system is inconsistent.
pub(crate) fn solve_any(
    field: PrimeField,
    mut coeffs: Vec<Vec<u64>>,
    mut rhs: Vec<Vec<u64>>,
) -> Result<Option<Vec<Vec<u64>>>> {
    let cols = coeffs.first().map_or(0, Vec::len);
    let width = rhs.first().map_or(0, Vec::len);
    let pivots = row_reduce(field, &mut coeffs, &mut rhs)?;
    if rhs[pivots.len()..]
        .iter()
        .any(|r| r.iter().any(|&v| v != 0))
    {
        return Ok(None);
    }
    let mut solution = vec![vec![0u64; width]; cols];
    for (row, &col) in pivots.iter().enumerate() {
        solution[col] = rhs[row].clone();
    }
    Ok(Some(solution))
}

/// Rank of a coefficient matrix.
pub fn rank(field: PrimeField, coeffs: &[Vec<u64>]) -> Result<usize> {
    let mut coeffs = coeffs.to_vec();
    let mut rhs = vec![Vec::new(); coeffs.len()];
    Ok(row_reduce(field, &mut coeffs, &mut rhs)?.len())
}
