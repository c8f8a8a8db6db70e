// SPDX-License-Identifier: Apache-2.0

//! Bessel functions of the first kind and the positive zeros of `J₀`.
//!
//! `J_n(x) = (1/2π) ∫₀^{2π} cos(nθ - x sin θ) dθ` has a smooth periodic
//! integrand, so the trapezoid rule converges geometrically once the node
//! count exceeds `|x| + n` by a margin.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// First positive zero of `J₀`.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// First twenty positive zeros of `J₀` (Abramowitz & Stegun, table 9.5).
const J0_ZERO_TABLE: [f64; 20] = [
    2.404_825_557_695_773,
    5.520_078_110_286_311,
    8.653_727_912_911_013,
    11.791_534_439_014_281,
    14.930_917_708_487_787,
    18.071_063_967_910_924,
    21.211_636_629_879_26,
    24.352_471_530_749_302,
    27.493_479_132_040_253,
    30.634_606_468_431_976,
    33.775_820_213_573_57,
    36.917_098_353_664_045,
    40.058_425_764_628_24,
    43.199_791_713_176_73,
    46.341_188_371_661_815,
    49.482_609_897_397_815,
    52.624_051_841_115,
    55.765_510_755_019_98,
    58.906_983_926_080_94,
    62.048_469_190_227_166,
];

const CACHED_ZEROS: usize = 400;

pub fn bessel_j(order: u32, x: f64) -> f64 {
    let nodes = 2 * ((x.abs() + order as f64).ceil() as usize) + 48;
    let step = 2.0 * PI / nodes as f64;
    let n = order as f64;
    let sum: f64 = (0..nodes)
        .map(|i| {
            let theta = i as f64 * step;
            (n * theta - x * theta.sin()).cos()
        })
        .sum();
    sum / nodes as f64
}

pub fn j0(x: f64) -> f64 {
    bessel_j(0, x)
}

pub fn j1(x: f64) -> f64 {
    bessel_j(1, x)
}

/// The `k`-th positive zero of `J₀` (1-based).
pub fn j0_zero(k: usize) -> f64 {
    assert!(k >= 1, "zeros are numbered from 1");
    if k <= CACHED_ZEROS {
        zero_cache()[k - 1]
    } else {
        refine_zero(mcmahon(k))
    }
}

fn zero_cache() -> &'static [f64] {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    CACHE.get_or_init(|| {
        (1..=CACHED_ZEROS)
            .map(|k| {
                let guess = J0_ZERO_TABLE
                    .get(k - 1)
                    .copied()
                    .unwrap_or_else(|| mcmahon(k));
                refine_zero(guess)
            })
            .collect()
    })
}

/// McMahon's asymptotic expansion for large zeros.
fn mcmahon(k: usize) -> f64 {
    let beta = (k as f64 - 0.25) * PI;
    beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta.powi(3))
}

/// Newton on `J₀` using `J₀' = -J₁`.
fn refine_zero(mut z: f64) -> f64 {
    for _ in 0..3 {
        let dz = j0(z) / j1(z);
        z += dz;
        if dz.abs() < 1e-15 * z {
            break;
        }
    }
    z
}
