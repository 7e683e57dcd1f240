//! Isometric embedding of sample states from their real Gram matrix.

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::simulator::{inner, StateVector};

/// Relative cut below which Gram eigenvalues count as zero.
pub const RANK_CUT: f64 = 1e-10;
/// Most negative eigenvalue tolerated before the Gram matrix is rejected.
pub const PSD_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    /// One `rank`-dimensional point per sample.
    pub coordinates: Vec<Vec<f64>>,
    pub gram: Matrix<f64>,
    pub rank: usize,
}

impl Embedding {
    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    pub fn distance(&self, j: usize, k: usize) -> f64 {
        euclid(&self.coordinates[j], &self.coordinates[k])
    }
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `Re⟨ψ_j, ψ_k⟩` for all pairs.
pub fn real_gram(states: &[StateVector<f64>]) -> Result<Matrix<f64>> {
    let n = states.len();
    let mut g = Matrix::zeros(n);
    for j in 0..n {
        for k in j..n {
            let v = inner(&states[j], &states[k])?.re;
            g[(j, k)] = v;
            g[(k, j)] = v;
        }
    }
    Ok(g)
}

/// Points whose pairwise Euclidean distances are `√(g_jj + g_kk − 2 g_jk)`,
/// from the eigen-decomposition `g = V Λ Vᵀ` as rows of `V √Λ`.
pub fn gram_embed(gram: &Matrix<f64>) -> Result<Embedding> {
    let n = gram.dim();
    if n == 0 {
        return Err(Error::EmptySampleSet);
    }
    let eig = symmetric_eigen(gram);
    let lmax = eig.values.last().copied().unwrap_or(0.0);
    if let Some(&lmin) = eig.values.first() {
        if lmin < -PSD_SLACK {
            return Err(Error::NotPsd(lmin));
        }
    }
    let kept: Vec<usize> = (0..n).rev().filter(|&i| eig.values[i] > RANK_CUT * lmax).collect();
    let coordinates =
        (0..n).map(|row| kept.iter().map(|&i| eig.vectors[(row, i)] * eig.values[i].sqrt()).collect()).collect();
    Ok(Embedding { coordinates, gram: gram.clone(), rank: kept.len() })
}

pub fn embed_states(states: &[StateVector<f64>]) -> Result<Embedding> {
    gram_embed(&real_gram(states)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_and_duplicate_states() {
        let s0 = StateVector::<f64>::basis(1, 0).unwrap();
        let s1 = StateVector::<f64>::basis(1, 1).unwrap();
        let e = embed_states(&[s0.clone(), s1]).unwrap();
        assert_eq!(e.rank, 2);
        assert!((e.distance(0, 1) - 2f64.sqrt()).abs() < 1e-14);
        let d = embed_states(&[s0.clone(), s0]).unwrap();
        assert_eq!(d.rank, 1);
        assert!(d.distance(0, 1) < 1e-14);
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let g = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(gram_embed(&g), Err(Error::NotPsd(_))));
        assert!(matches!(gram_embed(&Matrix::zeros(0)), Err(Error::EmptySampleSet)));
    }
}
