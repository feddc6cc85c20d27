//! B-splines on a subset of the radial grid nodes, tabulated with their first
//! derivatives at every quadrature point.
//!
//! The first and last spline are dropped so every basis function vanishes at
//! both ends of the box.

use crate::error::{LabError, Result};
use crate::grid::RadialGrid;

#[derive(Debug, Clone)]
pub struct BSplineBasis {
    order: usize,
    knots: Vec<f64>,
    /// values[i][p]: basis function i at quadrature point p
    values: Vec<Vec<f64>>,
    derivs: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
    /// first and one-past-last quadrature point where function i is nonzero
    support: Vec<(usize, usize)>,
}

/// d/dx of order-`ord` splines expressed through order `ord - 1` data
/// (values or derivatives), on the knot span `mu`.
fn raise_derivative(t: &[f64], k: usize, ord: usize, mu: usize, lower: &[f64]) -> Vec<f64> {
    let f = (ord - 1) as f64;
    (0..k)
        .map(|j| {
            if j < k - ord {
                return 0.0;
            }
            let i = mu + j + 1 - k;
            let mut v = 0.0;
            let left = t[i + ord - 1] - t[i];
            if left > 0.0 {
                v += lower[j] / left;
            }
            if j + 1 < k {
                let right = t[i + ord] - t[i + 1];
                if right > 0.0 {
                    v -= lower[j + 1] / right;
                }
            }
            f * v
        })
        .collect()
}

/// Nonzero B-splines of order `k` at `x` in the knot span `[t[mu], t[mu+1])`
/// with first and second derivatives. Entry `j` belongs to spline
/// `mu - k + 1 + j`.
fn nonzero_splines(t: &[f64], k: usize, mu: usize, x: f64) -> [Vec<f64>; 3] {
    // tables[ord-1][j] = B_{mu+j+1-k, ord}(x)
    let mut tables = vec![vec![0.0; k]; k];
    tables[0][k - 1] = 1.0;
    for ord in 2..=k {
        let b = &tables[ord - 2];
        let mut next = vec![0.0; k];
        for j in (k - ord)..k {
            let i = mu + j + 1 - k;
            let mut v = 0.0;
            let left = t[i + ord - 1] - t[i];
            if left > 0.0 {
                v += (x - t[i]) / left * b[j];
            }
            if j + 1 < k {
                let right = t[i + ord] - t[i + 1];
                if right > 0.0 {
                    v += (t[i + ord] - x) / right * b[j + 1];
                }
            }
            next[j] = v;
        }
        tables[ord - 1] = next;
    }
    let d1 = raise_derivative(t, k, k, mu, &tables[k - 2]);
    let d1_lower = raise_derivative(t, k, k - 1, mu, &tables[k - 3]);
    let d2 = raise_derivative(t, k, k, mu, &d1_lower);
    [tables[k - 1].clone(), d1, d2]
}

impl BSplineBasis {
    /// Splines of `order` with interior knots at every `stride`-th grid node.
    pub fn new(grid: &RadialGrid, order: usize, stride: usize) -> Result<Self> {
        let nodes = grid.nodes();
        if order < 3 || stride == 0 || (nodes.len() - 1) % stride != 0 {
            return Err(LabError::InvalidParameter(format!(
                "spline stride {stride} must divide the {} grid intervals",
                nodes.len() - 1
            )));
        }
        let breaks: Vec<f64> = nodes.iter().step_by(stride).copied().collect();
        let spans = breaks.len() - 1;
        let mut knots = vec![breaks[0]; order - 1];
        knots.extend_from_slice(&breaks);
        knots.extend(std::iter::repeat(breaks[spans]).take(order - 1));
        let full = spans + order - 1;
        let n = full - 2;
        let np = grid.len();
        let mut values = vec![vec![0.0; np]; n];
        let mut derivs = vec![vec![0.0; np]; n];
        let mut second = vec![vec![0.0; np]; n];
        let mut support = vec![(usize::MAX, 0usize); n];
        let per = grid.order();
        for (p, &x) in grid.points().iter().enumerate() {
            let span = (p / per) / stride;
            let mu = span + order - 1;
            let [b, d, d2] = nonzero_splines(&knots, order, mu, x);
            for j in 0..order {
                let full_idx = mu + j + 1 - order;
                if full_idx == 0 || full_idx == full - 1 {
                    continue;
                }
                let i = full_idx - 1;
                values[i][p] = b[j];
                derivs[i][p] = d[j];
                second[i][p] = d2[j];
                support[i].0 = support[i].0.min(p);
                support[i].1 = support[i].1.max(p + 1);
            }
        }
        Ok(Self { order, knots, values, derivs, second, support })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn derivs(&self, i: usize) -> &[f64] {
        &self.derivs[i]
    }

    pub fn second_derivs(&self, i: usize) -> &[f64] {
        &self.second[i]
    }

    pub fn support(&self, i: usize) -> (usize, usize) {
        self.support[i]
    }

    /// Quadrature point range where both `i` and `j` are nonzero.
    pub fn overlap(&self, i: usize, j: usize) -> Option<(usize, usize)> {
        let (a0, a1) = self.support[i];
        let (b0, b1) = self.support[j];
        let lo = a0.max(b0);
        let hi = a1.min(b1);
        (lo < hi).then_some((lo, hi))
    }

    /// Sample `Σ c_i B_i` and its derivative at the quadrature points.
    pub fn expand(&self, coefficients: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let np = self.values.first().map_or(0, |v| v.len());
        let mut f = vec![0.0; np];
        let mut df = vec![0.0; np];
        for (i, &c) in coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let (lo, hi) = self.support[i];
            for p in lo..hi {
                f[p] += c * self.values[i][p];
                df[p] += c * self.derivs[i][p];
            }
        }
        (f, df)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn basis() -> (RadialGrid, BSplineBasis) {
        let g = RadialGrid::new(GridSpec { size: 65, r_box: 20.0, ..GridSpec::default() }, 0.5).unwrap();
        let b = BSplineBasis::new(&g, 7, 2).unwrap();
        (g, b)
    }

    #[test]
    fn count_and_rejects_bad_stride() {
        let (g, b) = basis();
        assert_eq!(b.len(), 32 + 4);
        assert!(BSplineBasis::new(&g, 7, 3).is_err());
    }

    #[test]
    fn partition_of_unity_in_the_interior() {
        // dropped end splines: the sum equals 1 - B_first - B_last, which is 1
        // away from the first and last spans
        let (g, b) = basis();
        let ones = vec![1.0; b.len()];
        let (f, df) = b.expand(&ones);
        let lo = b.knots()[7];
        let hi = b.knots()[b.knots().len() - 8];
        for (p, &r) in g.points().iter().enumerate() {
            if r > lo && r < hi {
                assert!((f[p] - 1.0).abs() < 1e-13);
                assert!(df[p].abs() < 1e-10);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference_of_integral() {
        // ∫ B_i' = B_i(R) - B_i(0) = 0 for the retained splines
        let (g, b) = basis();
        for i in 0..b.len() {
            let s = g.integrate(b.derivs(i));
            assert!(s.abs() < 1e-11, "{i}: {s}");
        }
        // integration by parts: ∫ r B_i' = -∫ B_i
        for i in [0, 5, 20] {
            let lhs: f64 = g.points().iter().zip(b.derivs(i)).zip(g.weights()).map(|((r, d), w)| r * d * w).sum();
            let rhs = -g.integrate(b.values(i));
            assert!((lhs - rhs).abs() < 1e-11);
        }
    }

    #[test]
    fn reproduces_polynomials_vanishing_at_the_ends() {
        // r^2 (R - r)^2 is in the span; least squares must reproduce it exactly
        let (g, b) = basis();
        let n = b.len();
        let f: Vec<f64> = g.points().iter().map(|r| r * r * (20.0 - r) * (20.0 - r)).collect();
        let mut s = nalgebra::DMatrix::zeros(n, n);
        let mut rhs = nalgebra::DVector::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if let Some((lo, hi)) = b.overlap(i, j) {
                    s[(i, j)] = (lo..hi).map(|p| g.weights()[p] * b.values(i)[p] * b.values(j)[p]).sum();
                }
            }
            rhs[i] = (0..g.len()).map(|p| g.weights()[p] * b.values(i)[p] * f[p]).sum();
        }
        let c = s.cholesky().unwrap().solve(&rhs);
        let (fit, _) = b.expand(c.as_slice());
        let err = fit.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-7 * 1e4, "{err}");
    }

    #[test]
    fn second_derivative_by_parts() {
        // ∫ B_i'' B_j = -∫ B_i' B_j' since B_j vanishes at both ends
        let (g, b) = basis();
        for (i, j) in [(0, 0), (3, 5), (17, 18), (30, 33)] {
            let lhs: f64 = (0..g.len()).map(|p| g.weights()[p] * b.second_derivs(i)[p] * b.values(j)[p]).sum();
            let rhs: f64 = -(0..g.len()).map(|p| g.weights()[p] * b.derivs(i)[p] * b.derivs(j)[p]).sum::<f64>();
            assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()), "{i} {j}: {lhs} {rhs}");
        }
    }

    #[test]
    fn nonnegative_and_local() {
        let (_, b) = basis();
        for i in 0..b.len() {
            assert!(b.values(i).iter().all(|v| *v >= -1e-15));
        }
        assert!(b.overlap(0, 20).is_none());
    }
}
