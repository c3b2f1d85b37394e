//! Numerical rank and nullspace of small dense complex matrices.

use nalgebra::{DMatrix, DVector};

use crate::gamma::C64;

#[derive(Debug, Clone)]
pub struct Nullspace {
    /// Descending; always `cols` long (zero-padded when rows < cols).
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// Absolute cut `rel_tol · σ_max` below which a singular value counts as zero.
    pub cut: f64,
    /// Orthonormal basis of the nullspace, one column vector per entry.
    pub basis: Vec<DVector<C64>>,
}

impl Nullspace {
    pub fn nullity(&self) -> usize {
        self.singular_values.len() - self.rank
    }

    /// Ratio of the smallest kept singular value to the largest discarded one.
    /// `None` when there is nothing on one side of the cut.
    pub fn gap(&self) -> Option<f64> {
        if self.rank == 0 || self.rank == self.singular_values.len() {
            return None;
        }
        let kept = self.singular_values[self.rank - 1];
        let dropped = self.singular_values[self.rank];
        Some(if dropped == 0.0 { f64::INFINITY } else { kept / dropped })
    }
}

/// SVD-based nullspace. The matrix is padded with zero rows to at least square
/// so the full right-singular basis is available.
pub fn nullspace(matrix: &DMatrix<C64>, rel_tol: f64) -> Nullspace {
    let cols = matrix.ncols();
    let rows = matrix.nrows().max(cols);
    let mut padded = DMatrix::<C64>::zeros(rows, cols);
    padded.view_mut((0, 0), (matrix.nrows(), cols)).copy_from(matrix);

    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();

    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let cut = rel_tol * sigma_max;
    let rank = if sigma_max == 0.0 {
        0
    } else {
        singular_values.iter().filter(|&&s| s > cut).count()
    };
    let basis = order[rank..]
        .iter()
        .map(|&i| v_t.row(i).transpose().map(|c| c.conj()))
        .collect();
    Nullspace {
        singular_values,
        rank,
        cut,
        basis,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_matrix_gets_full_nullspace() {
        // one equation, three unknowns
        let m = DMatrix::from_row_slice(1, 3, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(2.0, 0.0)]);
        let ns = nullspace(&m, 1e-12);
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.nullity(), 2);
        for v in &ns.basis {
            assert!((&m * v).norm() < 1e-14);
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
        let overlap = ns.basis[0].dotc(&ns.basis[1]).norm();
        assert!(overlap < 1e-14);
    }

    #[test]
    fn zero_matrix_is_all_null() {
        let m = DMatrix::<C64>::zeros(2, 2);
        let ns = nullspace(&m, 1e-10);
        assert_eq!(ns.nullity(), 2);
        assert_eq!(ns.gap(), None);
    }
}
