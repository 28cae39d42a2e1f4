//! Independent reference computations for the integration tests. Nothing
//! here calls the library's numerics; only its data types are used to read
//! inputs.

#![allow(dead_code)]

use ising_robust::graphs::InteractionMatrix;

pub fn dense(j: &InteractionMatrix) -> Vec<Vec<f64>> {
    let n = j.n();
    let mut a = vec![vec![0.0; n]; n];
    for &(i, k, w) in j.edges() {
        a[i][k] = w;
        a[k][i] = w;
    }
    a
}

/// Spin `i` of configuration `index`: bit `i` set means `+1`.
pub fn spin(index: usize, i: usize) -> f64 {
    if index >> i & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

pub fn config(n: usize, index: usize) -> Vec<f64> {
    (0..n).map(|i| spin(index, i)).collect()
}

pub fn field(a: &[Vec<f64>], x: &[f64], i: usize) -> f64 {
    a[i].iter().zip(x).map(|(w, s)| w * s).sum()
}

pub fn energy(a: &[Vec<f64>], x: &[f64]) -> f64 {
    let n = x.len();
    let mut h = 0.0;
    for i in 0..n {
        for k in i + 1..n {
            h += a[i][k] * x[i] * x[k];
        }
    }
    h
}

/// Exact law of the model by brute force, indexed like [`config`].
pub fn exact_law(a: &[Vec<f64>], beta: f64) -> Vec<f64> {
    let n = a.len();
    let logw: Vec<f64> = (0..1usize << n)
        .map(|s| beta * energy(a, &config(n, s)))
        .collect();
    let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|v| v / z).collect()
}

/// One systematic Gibbs sweep applied to a distribution over configurations.
pub fn sweep_distribution(a: &[Vec<f64>], beta: f64, p: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut cur = p.to_vec();
    for i in 0..n {
        let mut next = vec![0.0; cur.len()];
        for (s, &mass) in cur.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let x = config(n, s);
            let plus = 1.0 / (1.0 + (-2.0 * beta * field(a, &x, i)).exp());
            next[s | 1 << i] += mass * plus;
            next[s & !(1 << i)] += mass * (1.0 - plus);
        }
        cur = next;
    }
    cur
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Minimizer of a unimodal function on `[lo, hi]` by golden-section search.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Global minimizer: a grid scan locates the best cell, golden section
/// refines it.
pub fn grid_refined_argmin(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    let grid: Vec<f64> = (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect();
    let best = (0..points)
        .min_by(|&a, &b| f(grid[a]).total_cmp(&f(grid[b])))
        .unwrap();
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(points - 1)];
    golden_section(&f, a, b, 1e-12)
}
