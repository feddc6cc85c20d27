//! Radial grid shared by every radial computation.
//!
//! Breakpoints follow the exponential-linear map `r(t) = a (e^{bt} - 1) + d t`
//! sampled uniformly in `t`; each interval carries a Gauss-Legendre rule, so
//! piecewise polynomials with breaks on the grid are integrated exactly up to
//! degree `2*order - 1`.

use crate::error::{LabError, Result};
use crate::quadrature::{cumulative_matrix, gauss_legendre};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mapping {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl Default for Mapping {
    fn default() -> Self {
        Self { a: 0.5, b: 0.35, d: 0.1 }
    }
}

impl Mapping {
    pub fn r(&self, t: f64) -> f64 {
        self.a * (self.b * t).exp_m1() + self.d * t
    }

    fn validate(&self) -> Result<()> {
        if self.a < 0.0 || self.b < 0.0 || self.d < 0.0 || self.a * self.b + self.d <= 0.0 {
            return Err(LabError::InvalidParameter(format!("grid mapping {self:?} is not increasing")));
        }
        Ok(())
    }

    /// Solve r(t) = r_box for t by bisection.
    fn t_max(&self, r_box: f64) -> f64 {
        let mut hi = 1.0;
        while self.r(hi) < r_box {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.r(mid) < r_box {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub size: usize,
    pub r_box: f64,
    pub mapping: Mapping,
    pub gauss_order: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { size: 113, r_box: 60.0, mapping: Mapping::default(), gauss_order: 10 }
    }
}

#[derive(Debug, Clone)]
pub struct RadialGrid {
    spec: GridSpec,
    nodes: Vec<f64>,
    points: Vec<f64>,
    weights: Vec<f64>,
    /// reference-interval cumulative integration matrix
    cumulative: Vec<Vec<f64>>,
}

impl RadialGrid {
    pub fn new(spec: GridSpec, nucleus_radius: f64) -> Result<Self> {
        if spec.size < 64 {
            return Err(LabError::InvalidParameter(format!("grid size must be >= 64, got {}", spec.size)));
        }
        if !(spec.r_box > nucleus_radius) {
            return Err(LabError::InvalidParameter(format!(
                "box radius {} must exceed the nuclear radius {nucleus_radius}",
                spec.r_box
            )));
        }
        if spec.gauss_order < 2 {
            return Err(LabError::InvalidParameter("gauss order must be >= 2".into()));
        }
        spec.mapping.validate()?;
        let t_max = spec.mapping.t_max(spec.r_box);
        let m = spec.size;
        let mut nodes: Vec<f64> = (0..m).map(|i| spec.mapping.r(t_max * i as f64 / (m - 1) as f64)).collect();
        nodes[0] = 0.0;
        nodes[m - 1] = spec.r_box;
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) {
                return Err(LabError::InvalidParameter("grid is not strictly increasing".into()));
            }
        }
        let (x, w) = gauss_legendre(spec.gauss_order);
        let mut points = Vec::with_capacity((m - 1) * x.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for iv in nodes.windows(2) {
            let half = 0.5 * (iv[1] - iv[0]);
            let mid = 0.5 * (iv[1] + iv[0]);
            for (xi, wi) in x.iter().zip(&w) {
                points.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        let cumulative = cumulative_matrix(&x, &w);
        Ok(Self { spec, nodes, points, weights, cumulative })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature abscissae, increasing.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn r_box(&self) -> f64 {
        self.spec.r_box
    }

    pub fn order(&self) -> usize {
        self.spec.gauss_order
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.points.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&r, w)| w * f(r)).sum()
    }

    /// `out[p] = ∫_0^{r_p} f`, with `f` sampled at the quadrature points.
    pub fn cumulative_from_origin(&self, values: &[f64]) -> Vec<f64> {
        let p = self.spec.gauss_order;
        let mut out = vec![0.0; values.len()];
        let mut offset = 0.0;
        for (iv, chunk) in values.chunks(p).enumerate() {
            let half = 0.5 * (self.nodes[iv + 1] - self.nodes[iv]);
            for i in 0..p {
                let partial: f64 = self.cumulative[i].iter().zip(chunk).map(|(c, v)| c * v).sum();
                out[iv * p + i] = offset + half * partial;
            }
            let full: f64 = chunk.iter().zip(&self.weights[iv * p..(iv + 1) * p]).map(|(v, w)| v * w).sum();
            offset += full;
        }
        out
    }

    /// `out[p] = ∫_{r_p}^{R_box} f`, accumulated from the box edge inwards so
    /// small tails are not lost to cancellation.
    pub fn cumulative_to_box(&self, values: &[f64]) -> Vec<f64> {
        let p = self.spec.gauss_order;
        let mut out = vec![0.0; values.len()];
        let mut offset = 0.0;
        let intervals = values.len() / p;
        for iv in (0..intervals).rev() {
            let chunk = &values[iv * p..(iv + 1) * p];
            let half = 0.5 * (self.nodes[iv + 1] - self.nodes[iv]);
            let full: f64 = chunk.iter().zip(&self.weights[iv * p..(iv + 1) * p]).map(|(v, w)| v * w).sum();
            for i in 0..p {
                let partial: f64 = self.cumulative[i].iter().zip(chunk).map(|(c, v)| c * v).sum();
                out[iv * p + i] = offset + (full - half * partial);
            }
            offset += full;
        }
        out
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.spec == other.spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(m: usize, r_box: f64) -> RadialGrid {
        RadialGrid::new(GridSpec { size: m, r_box, ..GridSpec::default() }, 0.5).unwrap()
    }

    #[test]
    fn rejects_small_box_and_size() {
        assert!(RadialGrid::new(GridSpec { r_box: 0.4, ..GridSpec::default() }, 0.5).is_err());
        assert!(RadialGrid::new(GridSpec { size: 10, ..GridSpec::default() }, 0.5).is_err());
    }

    #[test]
    fn strictly_increasing() {
        let g = grid(64, 40.0);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!(g.points().windows(2).all(|w| w[1] > w[0]));
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(*g.nodes().last().unwrap(), 40.0);
    }

    #[test]
    fn exponential_moment() {
        let g = grid(400, 40.0);
        let r = 40.0f64;
        let exact = 2.0 - (-r).exp() * (r * r + 2.0 * r + 2.0);
        let approx = g.integrate_fn(|x| (-x).exp() * x * x);
        assert!((approx - exact).abs() < 1e-10, "{}", (approx - exact).abs());
    }

    #[test]
    fn polynomial_exactness_per_interval() {
        let g = grid(64, 10.0);
        let approx = g.integrate_fn(|x| x.powi(19));
        let exact = 10f64.powi(20) / 20.0;
        assert!(((approx - exact) / exact).abs() < 1e-13);
    }

    #[test]
    fn refinement_reduces_error() {
        let f = |x: f64| (-x).exp() * x * x * (3.0 * x).sin();
        // ∫_0^∞ x^2 e^{-x} sin 3x dx = Im 2/(1-3i)^3
        let z = num_complex::Complex64::new(1.0, -3.0);
        let exact = (2.0 / (z * z * z)).im;
        let mut last = f64::INFINITY;
        for m in [64, 128, 256] {
            let g = RadialGrid::new(GridSpec { size: m, r_box: 40.0, gauss_order: 3, ..GridSpec::default() }, 0.5)
                .unwrap();
            let err = (g.integrate_fn(f) - exact).abs();
            assert!(err < last);
            last = err;
        }
    }

    #[test]
    fn cumulative_integrals() {
        let g = grid(80, 20.0);
        let vals: Vec<f64> = g.points().iter().map(|r| (-r).exp()).collect();
        let fwd = g.cumulative_from_origin(&vals);
        let bwd = g.cumulative_to_box(&vals);
        for (i, &r) in g.points().iter().enumerate() {
            assert!((fwd[i] - (1.0 - (-r).exp())).abs() < 1e-12);
            assert!((bwd[i] - ((-r).exp() - (-20f64).exp())).abs() < 1e-12);
        }
    }
}
