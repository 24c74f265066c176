//! One-dimensional discrete-time quantum walk on a sparse line.
//!
//! A step is `U = T·C(x,t)`: a position-dependent coin layer followed by the
//! conditional translation `T`, which moves the `→` amplitude at `x` to `x+1`
//! and the `←` amplitude to `x−1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CoinState, Mat2, STRUCTURAL_TOL};

/// Entries whose two amplitudes both have squared modulus below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-30;

/// Sparse map from lattice position to the coin amplitudes there.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "WalkStateRepr", into = "WalkStateRepr")]
pub struct WalkState {
    amplitudes: BTreeMap<i64, CoinState>,
}

impl WalkState {
    pub fn new() -> Self {
        Self::default()
    }

    /// The state `|x, coin⟩`.
    pub fn localized(x: i64, coin: CoinState) -> Self {
        let mut s = Self::new();
        s.add(x, coin);
        s.prune();
        s
    }

    /// Amplitudes at `x`, zero if absent.
    pub fn get(&self, x: i64) -> CoinState {
        self.amplitudes.get(&x).copied().unwrap_or(CoinState::ZERO)
    }

    /// Adds `coin` to the amplitudes already at `x`.
    pub fn add(&mut self, x: i64, coin: CoinState) {
        let slot = self.amplitudes.entry(x).or_default();
        *slot = *slot + coin;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &CoinState)> {
        self.amplitudes.iter().map(|(x, c)| (*x, c))
    }

    pub fn positions(&self) -> impl Iterator<Item = i64> + '_ {
        self.amplitudes.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(CoinState::norm_sqr).sum()
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, c| {
            c.right.norm_sqr() >= PRUNE_THRESHOLD || c.left.norm_sqr() >= PRUNE_THRESHOLD
        });
    }

    /// Largest amplitude difference over the union of supports.
    pub fn max_abs_diff(&self, other: &WalkState) -> f64 {
        self.positions()
            .chain(other.positions())
            .map(|x| self.get(x).max_abs_diff(&other.get(x)))
            .fold(0.0, f64::max)
    }

    fn map_coins(&self, mut f: impl FnMut(i64, &CoinState) -> CoinState) -> WalkState {
        let mut out = WalkState {
            amplitudes: self.iter().map(|(x, c)| (x, f(x, c))).collect(),
        };
        out.prune();
        out
    }
}

#[derive(Serialize, Deserialize)]
struct WalkStateRepr {
    amplitudes: Vec<AmplitudeEntry>,
}

#[derive(Serialize, Deserialize)]
struct AmplitudeEntry {
    x: i64,
    right: num_complex::Complex64,
    left: num_complex::Complex64,
}

impl From<WalkStateRepr> for WalkState {
    fn from(r: WalkStateRepr) -> Self {
        let mut s = WalkState::new();
        for e in r.amplitudes {
            s.add(e.x, CoinState::new(e.right, e.left));
        }
        s.prune();
        s
    }
}

impl From<WalkState> for WalkStateRepr {
    fn from(s: WalkState) -> Self {
        WalkStateRepr {
            amplitudes: s
                .amplitudes
                .into_iter()
                .map(|(x, c)| AmplitudeEntry {
                    x,
                    right: c.right,
                    left: c.left,
                })
                .collect(),
        }
    }
}

/// Coins applied at one time step; unlisted positions get the identity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "CoinLayerRepr", into = "CoinLayerRepr")]
pub struct CoinLayer {
    coins: BTreeMap<i64, Mat2>,
}

impl CoinLayer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder form of [`CoinLayer::insert`].
    pub fn with(mut self, x: i64, coin: Mat2) -> Self {
        self.insert(x, coin);
        self
    }

    /// Sets the coin at `x`, replacing any previous one.
    pub fn insert(&mut self, x: i64, coin: Mat2) {
        self.coins.insert(x, coin);
    }

    pub fn coin_at(&self, x: i64) -> Option<&Mat2> {
        self.coins.get(&x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Mat2)> {
        self.coins.iter().map(|(x, m)| (*x, m))
    }

    pub fn is_identity(&self) -> bool {
        self.coins.is_empty()
    }

    /// Checks every listed coin is unitary within [`STRUCTURAL_TOL`].
    pub fn validate(&self) -> Result<()> {
        for (&position, m) in &self.coins {
            if !m.is_unitary(STRUCTURAL_TOL) {
                return Err(Error::NonUnitaryCoin {
                    position,
                    defect: m.unitarity_defect(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CoinLayerRepr {
    coins: Vec<CoinEntry>,
}

#[derive(Serialize, Deserialize)]
struct CoinEntry {
    x: i64,
    matrix: Mat2,
}

impl From<CoinLayerRepr> for CoinLayer {
    fn from(r: CoinLayerRepr) -> Self {
        CoinLayer {
            coins: r.coins.into_iter().map(|e| (e.x, e.matrix)).collect(),
        }
    }
}

impl From<CoinLayer> for CoinLayerRepr {
    fn from(l: CoinLayer) -> Self {
        CoinLayerRepr {
            coins: l
                .coins
                .into_iter()
                .map(|(x, matrix)| CoinEntry { x, matrix })
                .collect(),
        }
    }
}

/// A sequence of coin layers; each layer is followed by one translation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WalkProgram {
    pub layers: Vec<CoinLayer>,
}

impl WalkProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_layers(layers: Vec<CoinLayer>) -> Self {
        Self { layers }
    }

    pub fn push(&mut self, layer: CoinLayer) {
        self.layers.push(layer);
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// The program made of the first `n` layers.
    pub fn prefix(&self, n: usize) -> WalkProgram {
        WalkProgram::from_layers(self.layers[..n.min(self.len())].to_vec())
    }

    pub fn validate(&self) -> Result<()> {
        self.layers.iter().try_for_each(CoinLayer::validate)
    }
}

fn apply_unchecked(s: &WalkState, layer: &CoinLayer, inverse: bool) -> WalkState {
    if layer.is_identity() {
        return s.clone();
    }
    s.map_coins(|x, c| match layer.coin_at(x) {
        Some(m) if inverse => m.adjoint() * *c,
        Some(m) => *m * *c,
        None => *c,
    })
}

/// Left-multiplies the coin at each position by that position's coin.
pub fn apply_coin_layer(s: &WalkState, layer: &CoinLayer) -> Result<WalkState> {
    layer.validate()?;
    Ok(apply_unchecked(s, layer, false))
}

/// Conditional translation `T`.
pub fn translate(s: &WalkState) -> WalkState {
    shift(s, 1)
}

/// `T†`: `→` amplitudes move left, `←` amplitudes move right.
pub fn translate_inverse(s: &WalkState) -> WalkState {
    shift(s, -1)
}

fn shift(s: &WalkState, dir: i64) -> WalkState {
    let mut out = WalkState::new();
    for (x, c) in s.iter() {
        out.add(x + dir, CoinState::new(c.right, Default::default()));
        out.add(x - dir, CoinState::new(Default::default(), c.left));
    }
    out.prune();
    out
}

/// One walk step `T·C`.
pub fn step(s: &WalkState, layer: &CoinLayer) -> Result<WalkState> {
    Ok(translate(&apply_coin_layer(s, layer)?))
}

fn check_normalized(coin: &CoinState) -> Result<()> {
    let norm = coin.norm();
    if !coin.is_finite() || (norm - 1.0).abs() > STRUCTURAL_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Runs `p` from `|initial_position, initial_coin⟩`.
pub fn run(p: &WalkProgram, initial_coin: CoinState, initial_position: i64) -> Result<WalkState> {
    check_normalized(&initial_coin)?;
    run_from(p, WalkState::localized(initial_position, initial_coin))
}

/// Runs `p` from an arbitrary (not necessarily normalized) state.
pub fn run_from(p: &WalkProgram, initial: WalkState) -> Result<WalkState> {
    p.layers.iter().try_fold(initial, |s, layer| step(&s, layer))
}

/// Like [`run`], but returns the state after every step: element `t` is the
/// state after `t` steps, so the result has `p.len() + 1` entries.
pub fn run_traced(
    p: &WalkProgram,
    initial_coin: CoinState,
    initial_position: i64,
) -> Result<Vec<WalkState>> {
    check_normalized(&initial_coin)?;
    let mut states = Vec::with_capacity(p.len() + 1);
    states.push(WalkState::localized(initial_position, initial_coin));
    for layer in &p.layers {
        let next = step(states.last().expect("non-empty"), layer)?;
        states.push(next);
    }
    Ok(states)
}

/// Applies `U†`: for each layer in reverse, `T†` then the adjoint coins.
pub fn run_reverse(p: &WalkProgram, final_state: &WalkState) -> WalkState {
    p.layers.iter().rev().fold(final_state.clone(), |s, layer| {
        apply_unchecked(&translate_inverse(&s), layer, true)
    })
}

/// `p(x) = |a_→(x)|² + |a_←(x)|²`.
pub fn position_distribution(s: &WalkState) -> BTreeMap<i64, f64> {
    s.iter().map(|(x, c)| (x, c.norm_sqr())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn h_layer() -> CoinLayer {
        CoinLayer::new().with(0, Mat2::hadamard())
    }

    #[test]
    fn hadamard_at_origin() {
        let s = WalkState::localized(0, CoinState::RIGHT);
        let out = apply_coin_layer(&s, &h_layer()).unwrap();
        let want = CoinState::from_real(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        assert!(out.get(0).max_abs_diff(&want) < 1e-15);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn unlisted_positions_are_identity() {
        let s = WalkState::localized(5, CoinState::RIGHT);
        assert_eq!(apply_coin_layer(&s, &h_layer()).unwrap(), s);
    }

    #[test]
    fn not_at_minus_one() {
        let s = WalkState::localized(-1, CoinState::LEFT);
        let out = apply_coin_layer(&s, &CoinLayer::new().with(-1, Mat2::NOT)).unwrap();
        assert_eq!(out, WalkState::localized(-1, CoinState::RIGHT));
    }

    #[test]
    fn non_unitary_coin_rejected() {
        let layer = CoinLayer::new().with(3, Mat2::from_real([[1.0, 1.0], [0.0, 1.0]]));
        let s = WalkState::localized(0, CoinState::RIGHT);
        assert!(matches!(
            apply_coin_layer(&s, &layer),
            Err(Error::NonUnitaryCoin { position: 3, .. })
        ));
    }

    #[test]
    fn translation_examples() {
        let h = FRAC_1_SQRT_2;
        let s = WalkState::localized(0, CoinState::from_real(h, h));
        let t = translate(&s);
        assert_eq!(t.get(1), CoinState::from_real(h, 0.0));
        assert_eq!(t.get(-1), CoinState::from_real(0.0, h));
        assert_eq!(t.len(), 2);
        assert_eq!(translate_inverse(&t), s);

        let r = translate(&WalkState::localized(0, CoinState::RIGHT));
        assert_eq!(r, WalkState::localized(1, CoinState::RIGHT));
    }

    #[test]
    fn step_from_origin() {
        let s = WalkState::localized(0, CoinState::RIGHT);
        let out = step(&s, &CoinLayer::new()).unwrap();
        assert_eq!(out, WalkState::localized(1, CoinState::RIGHT));

        let th = 0.9f64;
        let (c, sn) = ((th / 2.0).cos(), (th / 2.0).sin());
        let out = step(&WalkState::localized(0, CoinState::from_real(c, sn)), &CoinLayer::new()).unwrap();
        assert_eq!(out.get(1), CoinState::from_real(c, 0.0));
        assert_eq!(out.get(-1), CoinState::from_real(0.0, sn));
    }

    #[test]
    fn run_empty_program() {
        let s = run(&WalkProgram::new(), CoinState::RIGHT, 0).unwrap();
        assert_eq!(s, WalkState::localized(0, CoinState::RIGHT));
    }

    #[test]
    fn run_rejects_unnormalized_coin() {
        let err = run(&WalkProgram::new(), CoinState::from_real(1.0, 1.0), 0).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }

    #[test]
    fn trace_has_one_state_per_step() {
        let p = WalkProgram::from_layers(vec![h_layer(), CoinLayer::new()]);
        let states = run_traced(&p, CoinState::RIGHT, 0).unwrap();
        assert_eq!(states.len(), 3);
        assert_eq!(states[2], run(&p, CoinState::RIGHT, 0).unwrap());
    }

    #[test]
    fn distribution_of_localized_state() {
        let d = position_distribution(&WalkState::localized(0, CoinState::RIGHT));
        assert_eq!(d, BTreeMap::from([(0, 1.0)]));
    }

    #[test]
    fn pruning_drops_dust() {
        let mut s = WalkState::new();
        s.add(4, CoinState::new(Complex64::new(1e-16, 0.0), Complex64::new(0.0, 0.0)));
        s.add(0, CoinState::RIGHT);
        s.prune();
        assert_eq!(s.positions().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn program_json_format() {
        let p = WalkProgram::from_layers(vec![CoinLayer::new().with(-1, Mat2::NOT), CoinLayer::new()]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"{"layers":[{"coins":[{"x":-1,"matrix":[[[0.0,0.0],[1.0,0.0]],[[1.0,0.0],[0.0,0.0]]]}]},{"coins":[]}]}"#
        );
        assert_eq!(serde_json::from_str::<WalkProgram>(&json).unwrap(), p);

        let s = WalkState::localized(2, CoinState::LEFT);
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"amplitudes":[{"x":2,"right":[0.0,0.0],"left":[1.0,0.0]}]}"#
        );
    }
}
