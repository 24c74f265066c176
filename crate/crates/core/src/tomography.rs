//! Linear-inversion state tomography from POVM outcome frequencies.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::povm::{DensityMatrix, PovmSet};

/// Minimum determinant of the 4×4 Gram matrix of element coordinates.
pub const INFO_COMPLETE_DET: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyResult {
    pub rho_hat: DensityMatrix,
    /// RMS of `p̂(x) − Tr(E_x·ρ̂)` over the elements.
    pub residual: f64,
}

fn pauli() -> [Mat2; 3] {
    let i = Complex64::new(0.0, 1.0);
    [
        Mat2::NOT,
        Mat2::new([[Complex64::new(0.0, 0.0), -i], [i, Complex64::new(0.0, 0.0)]]),
        Mat2::from_real([[1.0, 0.0], [0.0, -1.0]]),
    ]
}

/// `(Tr E, Tr EX, Tr EY, Tr EZ)`; real for Hermitian `E`.
fn pauli_coordinates(e: &Mat2) -> [f64; 4] {
    let [x, y, z] = pauli();
    [
        e.trace().re,
        (*e * x).trace().re,
        (*e * y).trace().re,
        (*e * z).trace().re,
    ]
}

/// `(I + r·σ) / 2`.
pub fn bloch_to_density(r: [f64; 3]) -> Mat2 {
    let [x, y, z] = pauli();
    let half = Complex64::new(0.5, 0.0);
    (Mat2::IDENTITY + x.scale(r[0].into()) + y.scale(r[1].into()) + z.scale(r[2].into()))
        .scale(half)
}

/// Bloch vector `Tr(ρσ)` of a Hermitian matrix.
pub fn density_to_bloch(rho: &Mat2) -> [f64; 3] {
    let c = pauli_coordinates(rho);
    [c[1], c[2], c[3]]
}

/// Determinant of the Gram matrix of element Pauli coordinates.
pub fn gram_determinant(set: &PovmSet) -> f64 {
    let mut gram = Matrix4::<f64>::zeros();
    for e in &set.elements {
        let v = nalgebra::Vector4::from(pauli_coordinates(&e.matrix));
        gram += v * v.transpose();
    }
    gram.determinant()
}

/// Least-squares unit-trace Hermitian `ρ` matching `empirical`, projected to
/// the PSD cone by clipping the negative eigenvalue and renormalizing.
///
/// Positions of `set` absent from `empirical` count as frequency 0.
pub fn reconstruct_state(set: &PovmSet, empirical: &BTreeMap<i64, f64>) -> Result<TomographyResult> {
    if let Some(x) = empirical.keys().find(|x| set.get(**x).is_none()) {
        return Err(Error::BadDistribution(format!(
            "frequency given for position {x}, which is not an outcome"
        )));
    }
    let det = gram_determinant(set);
    if !(det > INFO_COMPLETE_DET) {
        return Err(Error::NotInformationallyComplete { det });
    }

    // p(x) = Tr(E)/2 + Σ_k r_k Tr(E σ_k)/2, solved for r by normal equations
    let mut normal = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for e in &set.elements {
        let c = pauli_coordinates(&e.matrix);
        let row = Vector3::new(c[1], c[2], c[3]) * 0.5;
        let b = empirical.get(&e.position).copied().unwrap_or(0.0) - 0.5 * c[0];
        normal += row * row.transpose();
        rhs += row * b;
    }
    let r = normal
        .lu()
        .solve(&rhs)
        .ok_or(Error::NotInformationallyComplete { det })?;

    let len = r.norm();
    let r = if len > 1.0 { r / len } else { r };
    let rho_hat = DensityMatrix::new(bloch_to_density([r[0], r[1], r[2]]))?;

    let sq: f64 = set
        .elements
        .iter()
        .map(|e| {
            let predicted = (e.matrix * *rho_hat.matrix()).trace().re;
            let observed = empirical.get(&e.position).copied().unwrap_or(0.0);
            (observed - predicted).powi(2)
        })
        .sum();
    let residual = (sq / set.len() as f64).sqrt();
    Ok(TomographyResult { rho_hat, residual })
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &Mat2, sigma: &Mat2) -> f64 {
    let (a, b) = (*rho - *sigma).herm_eigvals();
    0.5 * (a.abs() + b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CoinState;
    use crate::povm::{outcome_probabilities, PovmElement};
    use crate::synthesis::build_sic;
    use crate::povm::extract_povm;

    fn sic_set() -> PovmSet {
        extract_povm(&build_sic().program).unwrap()
    }

    #[test]
    fn bloch_round_trip() {
        let r = [0.1, -0.4, 0.3];
        let back = density_to_bloch(&bloch_to_density(r));
        for k in 0..3 {
            assert!((back[k] - r[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn recovers_pure_right() {
        let set = sic_set();
        let rho = DensityMatrix::pure(&CoinState::RIGHT).unwrap();
        let p = outcome_probabilities(&set, &rho).unwrap();
        let t = reconstruct_state(&set, &p).unwrap();
        assert!(t.rho_hat.matrix().approx_eq(rho.matrix(), 1e-9));
        assert!(t.residual < 1e-12);
    }

    #[test]
    fn recovers_maximally_mixed() {
        let set = sic_set();
        let p = outcome_probabilities(&set, &DensityMatrix::maximally_mixed()).unwrap();
        let t = reconstruct_state(&set, &p).unwrap();
        assert!(t.rho_hat.matrix().approx_eq(DensityMatrix::maximally_mixed().matrix(), 1e-12));
    }

    #[test]
    fn projective_set_is_incomplete() {
        let set = PovmSet::new(vec![
            PovmElement { position: 1, matrix: CoinState::RIGHT.projector() },
            PovmElement { position: -1, matrix: CoinState::LEFT.projector() },
        ])
        .unwrap();
        let p = BTreeMap::from([(1, 1.0), (-1, 0.0)]);
        assert!(matches!(
            reconstruct_state(&set, &p),
            Err(Error::NotInformationallyComplete { .. })
        ));
    }

    #[test]
    fn out_of_range_frequencies_are_projected() {
        let set = sic_set();
        // all weight on one outcome is outside the Bloch ball
        let x = set.positions()[0];
        let p: BTreeMap<i64, f64> = set.positions().into_iter().map(|y| (y, f64::from(y == x))).collect();
        let t = reconstruct_state(&set, &p).unwrap();
        let (lo, _) = t.rho_hat.matrix().herm_eigvals();
        assert!(lo.abs() < 1e-12);
        assert!(t.residual > 0.0);
    }

    #[test]
    fn trace_distance_examples() {
        let up = CoinState::RIGHT.projector();
        let down = CoinState::LEFT.projector();
        assert!((trace_distance(&up, &down) - 1.0).abs() < 1e-15);
        assert_eq!(trace_distance(&up, &up), 0.0);
    }
}
