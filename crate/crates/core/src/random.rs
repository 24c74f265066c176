//! Random coins, programs and POVM targets for tests and benchmarks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{orthogonal_complement, CoinState, Mat2};
use crate::synthesis::{TargetElement, TargetPovmSpec};
use crate::walk::{CoinLayer, WalkProgram};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Uniformly random unit coin state.
pub fn coin_state<R: Rng + ?Sized>(rng: &mut R) -> CoinState {
    loop {
        let v = CoinState::new(gaussian(rng), gaussian(rng));
        if let Ok(u) = v.normalized() {
            return u;
        }
    }
}

/// Haar-random 2×2 unitary.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let first = coin_state(rng);
    let second = orthogonal_complement(&first)
        .expect("unit vector")
        .scale(phase(rng));
    Mat2::from_columns(&first, &second).scale(phase(rng))
}

/// Random Hermitian matrix with Gaussian entries.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let m = Mat2::new([[gaussian(rng), gaussian(rng)], [gaussian(rng), gaussian(rng)]]);
    m.hermitian_part()
}

/// Random full-rank density matrix `G·G† / Tr(G·G†)` with Gaussian `G`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let g = Mat2::new([[gaussian(rng), gaussian(rng)], [gaussian(rng), gaussian(rng)]]);
    let gg = g * g.adjoint();
    gg.scale(Complex64::new(1.0 / gg.trace().re, 0.0))
}

/// Between 1 and `max_layers` layers; each position in `positions` carries a
/// random unitary with probability 1/2.
pub fn program<R: Rng + ?Sized>(
    rng: &mut R,
    max_layers: usize,
    positions: std::ops::RangeInclusive<i64>,
) -> WalkProgram {
    let n = rng.random_range(1..=max_layers.max(1));
    let layers = (0..n)
        .map(|_| {
            let mut layer = CoinLayer::new();
            for x in positions.clone() {
                if rng.random_bool(0.5) {
                    layer.insert(x, unitary(rng));
                }
            }
            layer
        })
        .collect();
    WalkProgram::from_layers(layers)
}

/// `f(A)` for Hermitian `A` via its spectral projectors.
fn hermitian_function(a: &Mat2, f: impl Fn(f64) -> f64) -> Mat2 {
    let (lo, hi) = a.herm_eigvals();
    if hi - lo < 1e-14 {
        return Mat2::IDENTITY.scale(f(0.5 * (lo + hi)).into());
    }
    let inv_gap = Complex64::new(1.0 / (hi - lo), 0.0);
    let p_hi = (*a - Mat2::IDENTITY.scale(lo.into())).scale(inv_gap);
    let p_lo = Mat2::IDENTITY - p_hi;
    p_hi.scale(f(hi).into()) + p_lo.scale(f(lo).into())
}

/// A random valid rank-1 POVM with `n` elements: random pieces `v_i v_i†`
/// conjugated by `A^{−1/2}` with `A = Σ v_i v_i†`.
pub fn rank1_spec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> TargetPovmSpec {
    loop {
        let pieces: Vec<CoinState> = (0..n)
            .map(|_| CoinState::new(gaussian(rng), gaussian(rng)))
            .collect();
        let a: Mat2 = pieces.iter().map(CoinState::projector).sum();
        let (lo, _) = a.herm_eigvals();
        if lo < 1e-3 {
            continue;
        }
        let inv_sqrt = hermitian_function(&a, |l| 1.0 / l.sqrt());
        let targets = pieces
            .iter()
            .map(|v| {
                let w = inv_sqrt * *v;
                let weight = w.norm_sqr();
                TargetElement::new(weight.min(1.0), w.normalized().expect("non-zero piece"))
            })
            .collect();
        return TargetPovmSpec::new(targets);
    }
}
