#![allow(dead_code)]

use std::collections::BTreeMap;

use qwalk_core::{CoinState, Complex64, Mat2, WalkProgram, WalkState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn polar(r: f64, phase: f64) -> Complex64 {
    Complex64::from_polar(r, phase)
}

/// Dense simulation of a program on the window `-L..=L`, `L = layers`.
///
/// Works on a flat vector indexed by `(x + L) * 2 + coin` and returns, for each
/// site, the 2×2 block `⟨x, c′|U|0, c⟩`.
pub fn dense_kraus(p: &WalkProgram) -> BTreeMap<i64, Mat2> {
    let l = p.len() as i64;
    let sites = (2 * l + 1) as usize;
    let idx = |x: i64, coin: usize| ((x + l) as usize) * 2 + coin;
    let mut columns = Vec::new();
    for start in 0..2 {
        let mut v = vec![Complex64::new(0.0, 0.0); 2 * sites];
        v[idx(0, start)] = Complex64::new(1.0, 0.0);
        for layer in &p.layers {
            for x in -l..=l {
                if let Some(m) = layer.coin_at(x) {
                    let (a, b) = (v[idx(x, 0)], v[idx(x, 1)]);
                    v[idx(x, 0)] = m.0[0][0] * a + m.0[0][1] * b;
                    v[idx(x, 1)] = m.0[1][0] * a + m.0[1][1] * b;
                }
            }
            let mut next = vec![Complex64::new(0.0, 0.0); 2 * sites];
            for x in -l..=l {
                if x < l {
                    next[idx(x + 1, 0)] += v[idx(x, 0)];
                }
                if x > -l {
                    next[idx(x - 1, 1)] += v[idx(x, 1)];
                }
            }
            v = next;
        }
        columns.push(v);
    }
    (-l..=l)
        .map(|x| {
            let k = Mat2::new([
                [columns[0][idx(x, 0)], columns[1][idx(x, 0)]],
                [columns[0][idx(x, 1)], columns[1][idx(x, 1)]],
            ]);
            (x, k)
        })
        .collect()
}

/// `Σ_x |x⟩ ⊗ coin` from a list of `(x, right, left)`.
pub fn state(entries: &[(i64, Complex64, Complex64)]) -> WalkState {
    let mut s = WalkState::new();
    for &(x, r, l) in entries {
        s.add(x, CoinState::new(r, l));
    }
    s
}
