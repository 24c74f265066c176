//! Compiling qubit POVMs into walk programs.
//!
//! [`synthesize`] realizes an arbitrary rank-1 POVM `{a_i|ψ_i⟩⟨ψ_i|}` with
//! `n − 1` two-layer subroutines. Subroutine `i` splits the element currently
//! measured at `x = 0`:
//!
//! * layer A puts `C⁽¹⁾` at `x = 0`. It sends the origin coin that the walk
//!   would hold had it started in `ψ_i⊥` to `|←⟩`, so whatever reaches `x = 1`
//!   is proportional to `|ψ_i⟩⟨ψ_i|`;
//! * layer B puts `C⁽²⁾(θ)` at `x = 1` and `NOT` at `x = −1`. A fraction
//!   `cos²θ` of the `x = 1` weight continues to `x = 2` and the rest returns to
//!   the origin together with the `x = −1` branch.
//!
//! Target `i` (0-based) ends at `x = 2(n − 1 − i)` and the last target is the
//! residual at the origin. Walks never go left of `x = −1`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{orthogonal_complement, Coin, CoinState, Mat2};
use crate::povm::{extract_povm, kraus_operator, COMPLETENESS_TOL, SUPPORT_THRESHOLD};
use crate::walk::{run, CoinLayer, WalkProgram};

/// Slack allowed when a target weight exceeds the measured maximum.
pub const WEIGHT_SLACK: f64 = 1e-9;
/// Below this squared norm the complement branch has left the origin.
pub const DEGENERATE_THRESHOLD: f64 = 1e-18;
/// Tolerance for operators left unchanged by a merge.
pub const MERGE_UNCHANGED_TOL: f64 = 1e-10;

/// One rank-1 target `weight·|state⟩⟨state|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetElement {
    pub weight: f64,
    pub state: CoinState,
}

impl TargetElement {
    pub fn new(weight: f64, state: CoinState) -> Self {
        Self { weight, state }
    }

    pub fn element(&self) -> Mat2 {
        self.state
            .projector()
            .scale(Complex64::new(self.weight, 0.0))
    }
}

/// An ordered rank-1 POVM to be compiled.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TargetPovmSpec {
    pub targets: Vec<TargetElement>,
}

impl TargetPovmSpec {
    pub fn new(targets: Vec<TargetElement>) -> Self {
        Self { targets }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecReport {
    pub pass: bool,
    pub completeness_defect: f64,
    pub issues: Vec<String>,
}

/// Checks `n ≥ 2`, weights in `(0, 1]`, unit states and `Σ E_i = I`.
pub fn validate_spec(spec: &TargetPovmSpec) -> SpecReport {
    let mut issues = Vec::new();
    if spec.len() < 2 {
        issues.push(format!("need at least 2 targets, got {}", spec.len()));
    }
    for (i, t) in spec.targets.iter().enumerate() {
        if !(t.weight > 0.0 && t.weight <= 1.0) {
            issues.push(format!("target {i}: weight {} not in (0, 1]", t.weight));
        }
        let norm = t.state.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
            issues.push(format!("target {i}: state norm {norm}"));
        }
    }
    let sum: Mat2 = spec.targets.iter().map(TargetElement::element).sum();
    let completeness_defect = (sum - Mat2::IDENTITY).max_abs();
    if !(completeness_defect <= COMPLETENESS_TOL) {
        issues.push(format!(
            "elements sum to identity only within {completeness_defect:e}"
        ));
    }
    SpecReport {
        pass: issues.is_empty(),
        completeness_defect,
        issues,
    }
}

/// A compiled program and which target each outcome position measures.
///
/// Serialized as the program's `layers` plus a flat `outcomes` list of
/// `{position, target}` pairs (targets are 0-based indices); optional
/// human-readable `labels` per target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ResultRepr", into = "ResultRepr")]
pub struct SynthesisResult {
    pub program: WalkProgram,
    pub outcomes: BTreeMap<i64, Vec<usize>>,
    pub labels: BTreeMap<usize, String>,
}

impl SynthesisResult {
    /// Position whose element contains `target`.
    pub fn position_of(&self, target: usize) -> Option<i64> {
        self.outcomes
            .iter()
            .find(|(_, ts)| ts.contains(&target))
            .map(|(x, _)| *x)
    }

    pub fn label(&self, target: usize) -> Option<&str> {
        self.labels.get(&target).map(String::as_str)
    }
}

#[derive(Serialize, Deserialize)]
struct ResultRepr {
    #[serde(flatten)]
    program: WalkProgram,
    outcomes: Vec<OutcomeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    labels: Vec<LabelEntry>,
}

#[derive(Serialize, Deserialize)]
struct OutcomeEntry {
    position: i64,
    target: usize,
}

#[derive(Serialize, Deserialize)]
struct LabelEntry {
    target: usize,
    label: String,
}

impl From<ResultRepr> for SynthesisResult {
    fn from(r: ResultRepr) -> Self {
        let mut outcomes: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for o in r.outcomes {
            outcomes.entry(o.position).or_default().push(o.target);
        }
        SynthesisResult {
            program: r.program,
            outcomes,
            labels: r.labels.into_iter().map(|l| (l.target, l.label)).collect(),
        }
    }
}

impl From<SynthesisResult> for ResultRepr {
    fn from(s: SynthesisResult) -> Self {
        ResultRepr {
            program: s.program,
            outcomes: s
                .outcomes
                .into_iter()
                .flat_map(|(position, ts)| {
                    ts.into_iter().map(move |target| OutcomeEntry { position, target })
                })
                .collect(),
            labels: s
                .labels
                .into_iter()
                .map(|(target, label)| LabelEntry { target, label })
                .collect(),
        }
    }
}

/// Normalized origin coin of `partial` run on `psi_perp`, with its squared
/// norm before normalization.
pub fn compute_phi_prime(partial: &WalkProgram, psi_perp: &CoinState) -> Result<(CoinState, f64)> {
    let origin = run(partial, *psi_perp, 0)?.get(0);
    let norm_sqr = origin.norm_sqr();
    if norm_sqr < DEGENERATE_THRESHOLD {
        return Err(Error::DegenerateResidual { norm_sqr });
    }
    Ok((origin.normalized()?, norm_sqr))
}

/// `C⁽¹⁾ = |→⟩⟨φ′⊥| + |←⟩⟨φ′|`.
///
/// `φ′⊥` is the fixed orthogonal complement rephased so its larger component
/// (the `→` one on ties) is real and positive; `|←⟩` then maps to the identity.
pub fn make_c1(phi_prime: &CoinState) -> Result<Mat2> {
    let phi = phi_prime.normalized()?;
    let perp = orthogonal_complement(&phi)?;
    let lead = if perp.right.norm() >= perp.left.norm() {
        perp.right
    } else {
        perp.left
    };
    let perp = perp.scale(lead.conj() / lead.norm());
    Ok(Mat2::from_bras(&perp, &phi))
}

/// The real reflection `[[cos θ, sin θ], [sin θ, −cos θ]]`, `θ ∈ [0, π/2]`.
pub fn make_c2(theta: f64) -> Result<Mat2> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0, pi/2]",
        });
    }
    Ok(reflection(theta))
}

fn reflection(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2::from_real([[c, s], [s, -c]])
}

/// `θ = arccos √(a_target / a_max)`, so `a_max·cos²θ = a_target`.
pub fn choose_theta(a_target: f64, a_max_measured: f64) -> Result<f64> {
    if !(a_target > 0.0) {
        return Err(Error::OutOfRange {
            name: "a_target",
            value: a_target,
            range: "(0, 1]",
        });
    }
    if !(a_max_measured > 0.0) {
        return Err(Error::OutOfRange {
            name: "a_max_measured",
            value: a_max_measured,
            range: "(0, 1]",
        });
    }
    if a_target > a_max_measured + WEIGHT_SLACK {
        return Err(Error::InfeasibleWeight {
            target: a_target,
            available: a_max_measured,
        });
    }
    Ok((a_target / a_max_measured).min(1.0).sqrt().acos())
}

/// Diagnostics of one synthesis subroutine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageReport {
    /// 0-based target index synthesized in this subroutine.
    pub target: usize,
    pub phi_prime: CoinState,
    pub phi_norm_sqr: f64,
    /// Squared `x = 1` amplitude after layer A on input `ψ_i`.
    pub a_max: f64,
    pub theta: f64,
}

/// Compiles a rank-1 POVM into a walk program.
pub fn synthesize(spec: &TargetPovmSpec) -> Result<SynthesisResult> {
    synthesize_traced(spec).map(|(result, _)| result)
}

/// [`synthesize`], also returning one [`StageReport`] per subroutine.
pub fn synthesize_traced(spec: &TargetPovmSpec) -> Result<(SynthesisResult, Vec<StageReport>)> {
    let report = validate_spec(spec);
    if !report.pass {
        return Err(Error::SpecInvalid(report.issues.join("; ")));
    }
    let n = spec.len();
    let mut program = WalkProgram::new();
    let mut stages = Vec::with_capacity(n - 1);

    for (i, target) in spec.targets[..n - 1].iter().enumerate() {
        let psi_perp = orthogonal_complement(&target.state)?;
        let (phi_prime, phi_norm_sqr) = compute_phi_prime(&program, &psi_perp)?;
        program.push(CoinLayer::new().with(0, make_c1(&phi_prime)?));

        let a_max = run(&program, target.state, 0)?.get(1).norm_sqr();
        let theta = choose_theta(target.weight, a_max)?;
        program.push(
            CoinLayer::new()
                .with(1, make_c2(theta)?)
                .with(-1, Mat2::NOT),
        );
        stages.push(StageReport {
            target: i,
            phi_prime,
            phi_norm_sqr,
            a_max,
            theta,
        });
    }

    let residual = extract_povm(&program)?.get(0).copied().unwrap_or(Mat2::ZERO);
    let defect = residual.max_abs_diff(&spec.targets[n - 1].element());
    if defect > COMPLETENESS_TOL {
        return Err(Error::ResidualMismatch { defect });
    }

    let mut outcomes = BTreeMap::new();
    for i in 0..n {
        outcomes.insert(2 * (n - 1 - i) as i64, vec![i]);
    }
    let result = SynthesisResult {
        program,
        outcomes,
        labels: BTreeMap::new(),
    };
    Ok((result, stages))
}

/// Output coin of the Kraus operator at `x`, which must be rank 1 unless its
/// `←` row already vanishes. `None` when the outcome carries only `|→⟩`.
fn outcome_coin(program: &WalkProgram, x: i64) -> Result<Option<CoinState>> {
    let k = kraus_operator(program, x)?;
    let left = k.0[1][0].norm_sqr() + k.0[1][1].norm_sqr();
    if left <= SUPPORT_THRESHOLD {
        return Ok(None);
    }
    let kk = k * k.adjoint();
    let (lo, hi) = kk.herm_eigvals();
    if lo > COMPLETENESS_TOL * hi.max(1.0) {
        return Err(Error::MergeMismatch(format!(
            "outcome at {x} is not carried by a single coin state"
        )));
    }
    // a rank-1 K = |u⟩⟨w| has every non-zero column along u
    let (c0, c1) = (k.column(Coin::Right), k.column(Coin::Left));
    let v = if c0.norm_sqr() >= c1.norm_sqr() { c0 } else { c1 };
    Ok(Some(v.normalized()?))
}

/// Merges the outcomes at `x = 2i` and `x = 2j` into one element at `x = i + j`.
///
/// Flips the coin at `2j` and translates `j − i` times; every other outcome
/// shifts right by `j − i`. Synthesized outcomes at `x ≥ 2` carry `|→⟩`, but the
/// residual at the origin generally does not, so the flip layer also turns the
/// outcome coin at `2i` to `|→⟩` (and at `2j` to `|←⟩`) when needed. The
/// merged POVM is extracted and checked against the original before returning.
pub fn merge_rank2(result: &SynthesisResult, i: i64, j: i64) -> Result<SynthesisResult> {
    if i >= j {
        return Err(Error::OutOfRange {
            name: "j - i",
            value: (j - i) as f64,
            range: "[1, inf)",
        });
    }
    let (xi, xj) = (2 * i, 2 * j);
    for x in [xi, xj] {
        if !result.outcomes.contains_key(&x) {
            return Err(Error::UnknownOutcome { position: x });
        }
    }
    let before = extract_povm(&result.program)?;

    let mut program = result.program.clone();
    let mut flip = CoinLayer::new().with(xj, Mat2::NOT);
    if let Some(u) = outcome_coin(&result.program, xj)? {
        flip.insert(xj, Mat2::from_bras(&orthogonal_complement(&u)?, &u));
    }
    if let Some(u) = outcome_coin(&result.program, xi)? {
        flip.insert(xi, Mat2::from_bras(&u, &orthogonal_complement(&u)?));
    }
    program.push(flip);
    for _ in 0..(j - i - 1) {
        program.push(CoinLayer::new());
    }

    let shift = j - i;
    let merged_at = i + j;
    let mut outcomes: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut expected: BTreeMap<i64, (Mat2, f64)> = BTreeMap::new();
    let element = |x: i64| before.get(x).copied().unwrap_or(Mat2::ZERO);
    for (&x, targets) in &result.outcomes {
        let (dest, tol) = if x == xi || x == xj {
            (merged_at, COMPLETENESS_TOL)
        } else {
            (x + shift, MERGE_UNCHANGED_TOL)
        };
        outcomes.entry(dest).or_default().extend(targets.iter().copied());
        let slot = expected.entry(dest).or_insert((Mat2::ZERO, tol));
        slot.0 = slot.0 + element(x);
    }
    for ts in outcomes.values_mut() {
        ts.sort_unstable();
    }

    let after = extract_povm(&program)?;
    for (&x, (want, tol)) in &expected {
        let got = after.get(x).copied().unwrap_or(Mat2::ZERO);
        let defect = got.max_abs_diff(want);
        if defect > *tol {
            return Err(Error::MergeMismatch(format!(
                "element at {x} off by {defect:e}"
            )));
        }
    }
    // rounding dust may reach new sites; anything heavier is a real leak
    for e in after.elements.iter().filter(|e| !expected.contains_key(&e.position)) {
        if e.matrix.max_abs() > MERGE_UNCHANGED_TOL {
            return Err(Error::MergeMismatch(format!(
                "unexpected outcome at {}",
                e.position
            )));
        }
    }

    Ok(SynthesisResult {
        program,
        outcomes,
        labels: result.labels.clone(),
    })
}

/// Outcome position for "definitely `ψ₊`".
pub const USD_PLUS: i64 = 1;
/// Outcome position for "definitely `ψ₋`".
pub const USD_MINUS: i64 = -1;
/// Outcome position for the inconclusive answer.
pub const USD_INCONCLUSIVE: i64 = 3;

/// `ψ± = cos(θ/2)|→⟩ ± sin(θ/2)|←⟩`.
pub fn usd_states(theta: f64) -> (CoinState, CoinState) {
    let (s, c) = (theta / 2.0).sin_cos();
    (CoinState::from_real(c, s), CoinState::from_real(c, -s))
}

/// Three-step walk discriminating `ψ₊` from `ψ₋` without error.
///
/// Identity first, then `NOT` at `x = −1` and a reflection with entries
/// `tan(θ/2)`, `√(1 − tan²(θ/2))` at `x = 1`, then a Hadamard at the origin.
/// Targets: 0 = definitely `ψ₊` (x = 1), 1 = definitely `ψ₋` (x = −1),
/// 2 = inconclusive (x = 3).
pub fn build_usd(theta: f64) -> Result<SynthesisResult> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0, pi/2]",
        });
    }
    let t = (theta / 2.0).tan();
    let r = (1.0 - t * t).max(0.0).sqrt();
    let program = WalkProgram::from_layers(vec![
        CoinLayer::new(),
        CoinLayer::new()
            .with(USD_MINUS, Mat2::NOT)
            .with(1, Mat2::from_real([[r, t], [t, -r]])),
        CoinLayer::new().with(0, Mat2::hadamard()),
    ]);
    Ok(SynthesisResult {
        program,
        outcomes: BTreeMap::from([
            (USD_PLUS, vec![0]),
            (USD_MINUS, vec![1]),
            (USD_INCONCLUSIVE, vec![2]),
        ]),
        labels: BTreeMap::from([
            (0, "definitely psi_plus".to_string()),
            (1, "definitely psi_minus".to_string()),
            (2, "inconclusive".to_string()),
        ]),
    })
}

/// The tetrahedral qubit SIC states, `|⟨ψ_i|ψ_j⟩|² = 1/3` for `i ≠ j`.
pub fn sic_states() -> [CoinState; 4] {
    let a = (1.0f64 / 3.0).sqrt();
    let b = (2.0f64 / 3.0).sqrt();
    let w = Complex64::from_polar(b, 2.0 * PI / 3.0);
    [
        CoinState::RIGHT,
        CoinState::from_real(a, b),
        CoinState::new(Complex64::new(a, 0.0), w),
        CoinState::new(Complex64::new(a, 0.0), w.conj()),
    ]
}

/// For each SIC state, the orthogonal state with `→` amplitude `√(2/3)`
/// (`|←⟩` for the first).
pub fn sic_complements() -> [CoinState; 4] {
    let a = (1.0f64 / 3.0).sqrt();
    let b = (2.0f64 / 3.0).sqrt();
    let w = Complex64::from_polar(a, 2.0 * PI / 3.0);
    [
        CoinState::LEFT,
        CoinState::from_real(b, -a),
        CoinState::new(Complex64::new(b, 0.0), -w),
        CoinState::new(Complex64::new(b, 0.0), -w.conj()),
    ]
}

/// `{(1/2, ψ_k)}` for the four SIC states.
pub fn sic_spec() -> TargetPovmSpec {
    TargetPovmSpec::new(
        sic_states()
            .into_iter()
            .map(|s| TargetElement::new(0.5, s))
            .collect(),
    )
}

/// The hand-built six-layer SIC walk.
///
/// Subroutine coins: `(I, R(−π/4))`, `((1/√2)[[−1, 1], [1, 1]], R(θ₂))` with
/// `cos θ₂ = √(2/3)`, and `((1/√2)[[e^{−iπ/3}, e^{iπ/6}], [e^{iπ/3}, e^{−iπ/6}]], I)`,
/// where `R(θ) = [[cos θ, sin θ], [sin θ, −cos θ]]`. The third subroutine
/// splits off `ψ_4`, so the outcomes are `ψ_1` at x = 6, `ψ_2` at 4, `ψ_4` at 2
/// and `ψ_3` at 0.
pub fn build_sic() -> SynthesisResult {
    let h = FRAC_1_SQRT_2;
    let r3 = 3f64.sqrt();
    let e = |phase: f64| Complex64::from_polar(h, phase);
    let c3 = Mat2::new([[e(-PI / 3.0), e(PI / 6.0)], [e(PI / 3.0), e(-PI / 6.0)]]);
    let layers = vec![
        CoinLayer::new().with(0, Mat2::IDENTITY),
        CoinLayer::new()
            .with(1, Mat2::from_real([[h, -h], [-h, -h]]))
            .with(-1, Mat2::NOT),
        CoinLayer::new().with(0, Mat2::from_real([[-h, h], [h, h]])),
        CoinLayer::new()
            .with(
                1,
                Mat2::from_real([[2f64.sqrt() / r3, 1.0 / r3], [1.0 / r3, -(2f64.sqrt()) / r3]]),
            )
            .with(-1, Mat2::NOT),
        CoinLayer::new().with(0, c3),
        CoinLayer::new()
            .with(1, Mat2::IDENTITY)
            .with(-1, Mat2::NOT),
    ];
    SynthesisResult {
        program: WalkProgram::from_layers(layers),
        outcomes: BTreeMap::from([(6, vec![0]), (4, vec![1]), (2, vec![3]), (0, vec![2])]),
        labels: BTreeMap::new(),
    }
}
