//! The POVM realized by a walk program.
//!
//! With the walker starting at `x = 0`, the block `K_x[c′, c] = ⟨x, c′|U|0, c⟩`
//! is the Kraus operator for finding the walker at `x`, and the POVM element
//! is `E_x = K_x†·K_x`. [`extract_povm`] computes it by evolving the two coin
//! basis states forwards; [`extract_povm_reverse`] evolves `|x, c′⟩` backwards
//! under `U†` and reads off the overlap with the origin instead.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Coin, CoinState, Mat2, STRUCTURAL_TOL};
use crate::walk::{run, run_reverse, WalkProgram, WalkState};

/// Squared amplitude below which a position is not an outcome.
pub const SUPPORT_THRESHOLD: f64 = 1e-20;
/// Tolerance on `Σ E_x = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Tolerance for negative probabilities before clamping.
pub const PROBABILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PovmElement {
    pub position: i64,
    pub matrix: Mat2,
}

/// A set of POVM elements keyed by lattice position.
///
/// [`PovmSet::new`] enforces the invariants; [`PovmSet::from_elements_unchecked`]
/// and deserialization do not, so arbitrary sets can be fed to [`validate_povm`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PovmSet {
    pub elements: Vec<PovmElement>,
}

impl PovmSet {
    /// Builds a set, checking distinct positions, per-element Hermiticity and
    /// positivity within [`STRUCTURAL_TOL`] and completeness within
    /// [`COMPLETENESS_TOL`].
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        let set = Self::from_elements_unchecked(elements);
        set.check(STRUCTURAL_TOL, COMPLETENESS_TOL)?;
        Ok(set)
    }

    pub fn from_elements_unchecked(elements: Vec<PovmElement>) -> Self {
        Self { elements }
    }

    pub fn get(&self, position: i64) -> Option<&Mat2> {
        self.elements
            .iter()
            .find(|e| e.position == position)
            .map(|e| &e.matrix)
    }

    pub fn positions(&self) -> Vec<i64> {
        self.elements.iter().map(|e| e.position).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn sum(&self) -> Mat2 {
        self.elements.iter().map(|e| e.matrix).sum()
    }

    /// `max |(Σ E − I)_ij|`.
    pub fn completeness_defect(&self) -> f64 {
        (self.sum() - Mat2::IDENTITY).max_abs()
    }

    fn check(&self, element_tol: f64, completeness_tol: f64) -> Result<()> {
        let mut seen = BTreeSet::new();
        for e in &self.elements {
            if !seen.insert(e.position) {
                return Err(Error::InvalidPovm(format!(
                    "duplicate position {}",
                    e.position
                )));
            }
            if !e.matrix.is_finite() || !e.matrix.is_psd(element_tol) {
                return Err(Error::InvalidPovm(format!(
                    "element at {} is not Hermitian positive semidefinite",
                    e.position
                )));
            }
        }
        let defect = self.completeness_defect();
        if defect > completeness_tol {
            return Err(Error::CompletenessViolation { defect });
        }
        Ok(())
    }
}

/// A qubit density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Mat2", into = "Mat2")]
pub struct DensityMatrix {
    rho: Mat2,
}

impl DensityMatrix {
    pub fn new(rho: Mat2) -> Result<Self> {
        if !rho.is_finite() || !rho.is_hermitian(STRUCTURAL_TOL) {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        if !rho.is_psd(STRUCTURAL_TOL) {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                rho.herm_eigvals().0
            )));
        }
        let tr = rho.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        Ok(Self { rho })
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &CoinState) -> Result<Self> {
        Self::new(psi.normalized()?.projector())
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: Mat2::IDENTITY.scale(Complex64::new(0.5, 0.0)),
        }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.rho
    }
}

impl TryFrom<Mat2> for DensityMatrix {
    type Error = Error;
    fn try_from(m: Mat2) -> Result<Self> {
        Self::new(m)
    }
}

impl From<DensityMatrix> for Mat2 {
    fn from(d: DensityMatrix) -> Mat2 {
        d.rho
    }
}

/// Final states for the two basis coins `|→⟩`, `|←⟩` started at the origin.
fn basis_runs(p: &WalkProgram) -> Result<[WalkState; 2]> {
    Ok([run(p, CoinState::RIGHT, 0)?, run(p, CoinState::LEFT, 0)?])
}

fn kraus_from_runs(runs: &[WalkState; 2], x: i64) -> Mat2 {
    Mat2::from_columns(&runs[0].get(x), &runs[1].get(x))
}

fn support_from_runs(runs: &[WalkState; 2]) -> Vec<i64> {
    let mut support = BTreeSet::new();
    for s in runs {
        for (x, c) in s.iter() {
            if c.norm_sqr() > SUPPORT_THRESHOLD {
                support.insert(x);
            }
        }
    }
    support.into_iter().collect()
}

/// Sorted positions reachable from the origin with squared amplitude above
/// [`SUPPORT_THRESHOLD`] for either basis coin.
pub fn support_positions(p: &WalkProgram) -> Result<Vec<i64>> {
    Ok(support_from_runs(&basis_runs(p)?))
}

/// `K[c′, c]` = amplitude of `|x, c′⟩` in `run(p, |c⟩, 0)`.
pub fn kraus_operator(p: &WalkProgram, x: i64) -> Result<Mat2> {
    Ok(kraus_from_runs(&basis_runs(p)?, x))
}

fn finish(elements: Vec<PovmElement>) -> Result<PovmSet> {
    let set = PovmSet::from_elements_unchecked(elements);
    let defect = set.completeness_defect();
    if !(defect <= COMPLETENESS_TOL) {
        return Err(Error::CompletenessViolation { defect });
    }
    Ok(set)
}

/// `E_x = K_x†·K_x` for every support position.
pub fn extract_povm(p: &WalkProgram) -> Result<PovmSet> {
    let runs = basis_runs(p)?;
    let elements = support_from_runs(&runs)
        .into_iter()
        .map(|x| {
            let k = kraus_from_runs(&runs, x);
            PovmElement {
                position: x,
                matrix: k.adjoint() * k,
            }
        })
        .collect();
    finish(elements)
}

/// Same POVM as [`extract_povm`], computed through `U†`.
///
/// For each candidate `x` in `[−L, L]` (`L` = number of layers) and each coin
/// `c′`, `|x, c′⟩` is evolved backwards; its coin vector `u` at the origin
/// contributes `u·u†` to `E_x`.
pub fn extract_povm_reverse(p: &WalkProgram) -> Result<PovmSet> {
    p.validate()?;
    let reach = p.len() as i64;
    let mut elements = Vec::new();
    for x in -reach..=reach {
        let e: Mat2 = Coin::ALL
            .iter()
            .map(|&c| {
                let back = run_reverse(p, &WalkState::localized(x, CoinState::basis(c)));
                back.get(0).projector()
            })
            .sum();
        let diag_max = e.0[0][0].re.max(e.0[1][1].re);
        if diag_max > SUPPORT_THRESHOLD {
            elements.push(PovmElement {
                position: x,
                matrix: e,
            });
        }
    }
    finish(elements)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementReport {
    pub position: i64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub completeness_defect: f64,
    pub elements: Vec<ElementReport>,
}

/// Per-element Hermiticity and positivity plus completeness, all against `tol`.
pub fn validate_povm(set: &PovmSet, tol: f64) -> ValidationReport {
    let elements: Vec<ElementReport> = set
        .elements
        .iter()
        .map(|e| ElementReport {
            position: e.position,
            hermiticity_defect: e.matrix.hermiticity_defect(),
            min_eigenvalue: e.matrix.herm_eigvals().0,
        })
        .collect();
    let completeness_defect = set.completeness_defect();
    let distinct = set.positions().into_iter().collect::<BTreeSet<_>>().len() == set.len();
    let pass = distinct
        && completeness_defect <= tol
        && elements
            .iter()
            .all(|e| e.hermiticity_defect <= tol && e.min_eigenvalue >= -tol);
    ValidationReport {
        pass,
        completeness_defect,
        elements,
    }
}

/// `Re Tr(E_x·ρ)` for each element, without checks or clamping.
pub fn raw_probabilities(set: &PovmSet, rho: &DensityMatrix) -> BTreeMap<i64, f64> {
    set.elements
        .iter()
        .map(|e| (e.position, (e.matrix * *rho.matrix()).trace().re))
        .collect()
}

/// Born-rule probabilities `Tr(E_x·ρ)`, clamped to `[0, 1]`.
pub fn outcome_probabilities(set: &PovmSet, rho: &DensityMatrix) -> Result<BTreeMap<i64, f64>> {
    set.check(STRUCTURAL_TOL, COMPLETENESS_TOL)?;
    let raw = raw_probabilities(set, rho);
    if let Some((x, p)) = raw.iter().find(|(_, p)| **p < -PROBABILITY_TOL) {
        return Err(Error::InvalidPovm(format!(
            "probability {p:e} at position {x}"
        )));
    }
    let total: f64 = raw.values().sum();
    if (total - 1.0).abs() > COMPLETENESS_TOL {
        return Err(Error::InvalidPovm(format!("probabilities sum to {total}")));
    }
    Ok(raw.into_iter().map(|(x, p)| (x, p.clamp(0.0, 1.0))).collect())
}
