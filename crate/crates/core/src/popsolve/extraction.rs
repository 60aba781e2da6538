//! Minimizer extraction from solved moment relaxations.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::relaxation::{MomentRelaxation, RelaxationSolution};
use crate::poly::Monomial;

/// Ratio `sigma_2 / sigma_1` below which the moment matrix counts as rank one.
pub const RANK_ONE_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    /// First-order moments `(y_e1, ..., y_en)`.
    pub point: Vec<f64>,
    /// True when the moment matrix is numerically rank one, so the point is
    /// the exact minimizer of the relaxation; otherwise it is only a guess.
    pub rank_one: bool,
    pub singular_ratio: f64,
    /// Eigenvalues of the moment matrix, largest first.
    pub spectrum: Vec<f64>,
}

pub fn extract_minimizer(rel: &MomentRelaxation, sol: &RelaxationSolution) -> Extraction {
    let m = rel.moment_matrix(&sol.moments);
    let mut spectrum: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    spectrum.sort_by(|a, b| b.total_cmp(a));
    let top = spectrum.first().copied().unwrap_or(0.0);
    let second = spectrum.get(1).copied().unwrap_or(0.0).max(0.0);
    let singular_ratio = if top > 0.0 { second / top } else { f64::INFINITY };
    let point = (0..rel.nvars())
        .map(|k| {
            rel.moment_index(&Monomial::var(k))
                .map(|i| sol.moments[i])
                .unwrap_or(0.0)
        })
        .collect();
    Extraction {
        point,
        rank_one: singular_ratio < RANK_ONE_RATIO,
        singular_ratio,
        spectrum,
    }
}
