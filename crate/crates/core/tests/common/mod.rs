#![allow(dead_code)]

use ggm_core::graph::{choose_hidden, to_precision, PrecisionParams};
use ggm_core::rng::{derive_seed, seeded, ChaCha8Rng};
use ggm_core::{Graph, MultiLayerFamily, ObservedCovariances, SampleSet, SymMatrix};
use nalgebra::DMatrix;
use rand::Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    seeded(seed)
}

pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
    SymMatrix::new(DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))).unwrap()
}

/// `B Bᵀ / n + shift I` with uniform entries in `B`.
pub fn random_pd(n: usize, shift: f64, rng: &mut ChaCha8Rng) -> SymMatrix {
    let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let m = &b * b.transpose() / n as f64 + DMatrix::identity(n, n) * shift;
    SymMatrix::new(m).unwrap()
}

/// Sample covariances over `o` observed nodes of a `k`-layer family on `o + 1` nodes
/// (one hidden node), `m` samples per layer. Layers share a random base graph; the
/// second and later layers drop one of its edges.
pub fn tiny_instance(o: usize, k: usize, m: usize, seed: u64) -> ObservedCovariances {
    let n = o + 1;
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if r.random_bool(0.5) || j == i + 1 {
                edges.push((i, j, 1.0));
            }
        }
    }
    let layers: Vec<_> = (0..k)
        .map(|l| {
            let e: Vec<_> = if l == 0 {
                edges.clone()
            } else {
                edges[..edges.len() - 1].to_vec()
            };
            let g = Graph::from_edges(n, &e).unwrap();
            to_precision(&g, PrecisionParams::default(), derive_seed(seed, &[1])).unwrap()
        })
        .collect();
    let part = choose_hidden(n, 1, derive_seed(seed, &[2])).unwrap();
    let family = MultiLayerFamily::new(layers, part).unwrap();
    SampleSet::draw(&family, m, derive_seed(seed, &[3]))
        .unwrap()
        .observed_covariances(&family.partition)
        .unwrap()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

/// `½||z - v||² + l1 ||z||_1 + Σ w_ab |z_a - z_b|`, pair weights lexicographic.
pub fn fused_objective(z: &[f64], v: &[f64], l1: f64, w: &[f64]) -> f64 {
    let mut f = 0.0;
    for (a, b) in z.iter().zip(v) {
        f += 0.5 * (a - b) * (a - b) + l1 * a.abs();
    }
    let mut e = 0;
    for a in 0..z.len() {
        for b in (a + 1)..z.len() {
            f += w[e] * (z[a] - z[b]).abs();
            e += 1;
        }
    }
    f
}

/// Exact minimizer over the last coordinate with the others fixed: the optimum is a
/// kink (0 or another coordinate) or a stationary point of one smooth piece.
fn best_last(z: &mut [f64], v: &[f64], l1: f64, w: &[f64]) -> f64 {
    let k = z.len();
    let last = k - 1;
    let wl: Vec<f64> = (0..last).map(|a| w[pair_index(k, a, last)]).collect();
    let mut cands = vec![0.0];
    cands.extend_from_slice(&z[..last]);
    for mask in 0..(1u32 << k) {
        let s = |bit: usize| if mask >> bit & 1 == 1 { 1.0 } else { -1.0 };
        let mut c = v[last] - l1 * s(last);
        for (a, wa) in wl.iter().enumerate() {
            c -= wa * s(a);
        }
        cands.push(c);
    }
    let mut best = f64::INFINITY;
    let mut arg = 0.0;
    for c in cands {
        z[last] = c;
        let f = fused_objective(z, v, l1, w);
        if f < best {
            best = f;
            arg = c;
        }
    }
    z[last] = arg;
    best
}

fn pair_index(k: usize, a: usize, b: usize) -> usize {
    a * k - a * (a + 1) / 2 + (b - a - 1)
}

/// Grid search (final step 1e-3) over all coordinates but the last, which is
/// minimized exactly; K ≤ 3.
pub fn fused_brute_force(v: &[f64], l1: f64, w: &[f64]) -> Vec<f64> {
    let k = v.len();
    assert!((1..=3).contains(&k));
    let lo = v.iter().fold(0.0f64, |m, x| m.min(*x));
    let hi = v.iter().fold(0.0f64, |m, x| m.max(*x));
    let mut z = vec![0.0; k];
    if k == 1 {
        best_last(&mut z, v, l1, w);
        return z;
    }
    let grid = |a: f64, b: f64, h: f64| {
        let n = ((b - a) / h).round() as usize;
        (0..=n).map(move |i| a + i as f64 * h)
    };
    let mut center = vec![0.5 * (lo + hi); k - 1];
    let mut stages = vec![(lo, hi, 0.01)];
    stages.push((0.0, 0.0, 0.001));
    let mut best_z = z.clone();
    for (si, &(a, b, h)) in stages.iter().enumerate() {
        let ranges: Vec<(f64, f64)> = (0..k - 1)
            .map(|d| {
                if si == 0 {
                    (a, b)
                } else {
                    (center[d] - 0.06, center[d] + 0.06)
                }
            })
            .collect();
        let mut best = f64::INFINITY;
        for z0 in grid(ranges[0].0, ranges[0].1, h) {
            z[0] = z0;
            let inner: Vec<f64> = if k == 3 {
                grid(ranges[1].0, ranges[1].1, h).collect()
            } else {
                vec![0.0]
            };
            for &z1 in &inner {
                if k == 3 {
                    z[1] = z1;
                }
                let f = best_last(&mut z, v, l1, w);
                if f < best {
                    best = f;
                    best_z = z.clone();
                }
            }
        }
        center = best_z[..k - 1].to_vec();
    }
    best_z
}
