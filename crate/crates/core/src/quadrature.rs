//! Gauss-Legendre rules, cumulative integration matrices and a small
//! vector-valued adaptive Gauss-Kronrod integrator.

use crate::error::{LabError, Result};

/// Legendre polynomials P_0..P_n at `x`.
pub fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
    }
    for k in 1..n {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
    }
    p
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1],
/// nodes in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let p = legendre_all(n, x);
            let pn = p[n];
            let pn1 = p[n - 1];
            let dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let p = legendre_all(n, x);
        let dp = nf * (x * p[n] - p[n - 1]) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Matrix `W[i][j] = ∫_{-1}^{x_i} l_j(t) dt` for the Lagrange basis on the
/// Gauss-Legendre nodes `x`. Row `i` applied to samples gives the partial
/// integral from -1 up to node `i`.
pub fn cumulative_matrix(nodes: &[f64], weights: &[f64]) -> Vec<Vec<f64>> {
    let p = nodes.len();
    // ∫_{-1}^{x} P_n = (P_{n+1}(x) - P_{n-1}(x)) / (2n+1), n >= 1.
    let integrated = |x: f64| -> Vec<f64> {
        let leg = legendre_all(p + 1, x);
        let mut out = vec![0.0; p];
        out[0] = x + 1.0;
        for n in 1..p {
            out[n] = (leg[n + 1] - leg[n - 1]) / (2.0 * n as f64 + 1.0);
        }
        out
    };
    let basis_at_nodes: Vec<Vec<f64>> = nodes.iter().map(|&x| legendre_all(p, x)).collect();
    nodes
        .iter()
        .map(|&xi| {
            let ip = integrated(xi);
            (0..p)
                .map(|j| {
                    (0..p)
                        .map(|n| weights[j] * basis_at_nodes[j][n] * (2.0 * n as f64 + 1.0) / 2.0 * ip[n])
                        .sum()
                })
                .collect()
        })
        .collect()
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F>(f: &F, a: f64, b: f64, dim: usize) -> (Vec<f64>, f64)
where
    F: Fn(f64) -> Vec<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    for (i, &x) in GK_NODES.iter().enumerate() {
        let pts: Vec<f64> = if x == 0.0 { vec![c] } else { vec![c - h * x, c + h * x] };
        for t in pts {
            let v = f(t);
            for d in 0..dim {
                k[d] += GK_WEIGHTS_K[i] * v[d];
                // Gauss nodes are the odd-indexed Kronrod nodes.
                if i % 2 == 1 {
                    g[d] += GK_WEIGHTS_G[i / 2] * v[d];
                }
            }
        }
    }
    let mut err = 0.0f64;
    for d in 0..dim {
        k[d] *= h;
        g[d] *= h;
        err = err.max((k[d] - g[d]).abs());
    }
    (k, err)
}

/// Adaptive Gauss-Kronrod (7/15) integration of a vector-valued function.
/// Converges when the summed error estimate is below `abs_tol + rel_tol*|I|`
/// componentwise in the max norm.
pub fn adaptive_gk<F>(f: F, a: f64, b: f64, dim: usize, abs_tol: f64, rel_tol: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Vec<f64>,
{
    let mut pending = vec![(a, b)];
    let mut total = vec![0.0; dim];
    let mut evaluations = 0usize;
    while let Some((lo, hi)) = pending.pop() {
        let (val, err) = gk15(&f, lo, hi, dim);
        evaluations += 1;
        if evaluations > 20_000 {
            return Err(LabError::Quadrature("interval budget exhausted".into()));
        }
        let scale = (hi - lo) / (b - a);
        let local_tol = (abs_tol * scale).max(rel_tol * val.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        if err > local_tol && (hi - lo) > 1e-12 * (b - a).abs() {
            let mid = 0.5 * (lo + hi);
            pending.push((lo, mid));
            pending.push((mid, hi));
        } else {
            for d in 0..dim {
                total[d] += val[d];
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let approx: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn cumulative_matrix_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let cm = cumulative_matrix(&x, &w);
        // f(t) = t^5 - 2t^2, F(x) = x^6/6 - 2x^3/3 - (1/6 + 2/3)
        let f: Vec<f64> = x.iter().map(|t| t.powi(5) - 2.0 * t * t).collect();
        for (i, xi) in x.iter().enumerate() {
            let approx: f64 = cm[i].iter().zip(&f).map(|(a, b)| a * b).sum();
            let exact = xi.powi(6) / 6.0 - 2.0 * xi.powi(3) / 3.0 - (1.0 / 6.0 + 2.0 / 3.0);
            assert!((approx - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn adaptive_gk_handles_peaked_integrand() {
        let v = adaptive_gk(|x| vec![1.0 / (1e-4 + x * x), x.cos()], -1.0, 1.0, 2, 1e-12, 1e-13).unwrap();
        let exact0 = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!((v[0] - exact0).abs() / exact0 < 1e-11);
        assert!((v[1] - 2.0 * 1f64.sin()).abs() < 1e-12);
    }
}
