//! Log-mapped Gauss-Legendre quadrature on a radial momentum axis.

use crate::error::{Error, Result};

/// Quadrature rule approximating `∫_{k_min}^{k_max} g(k) dk` for integrands
/// that vary over many decades.
///
/// Gauss-Legendre panels are laid out uniformly in `ln k`, and the weights
/// carry the Jacobian `k` of the log map, so plain weighted sums over the
/// nodes integrate in `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    k_min: f64,
    k_max: f64,
}

impl RadialGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    /// `∑ w_i g(k_i)`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&k, &w)| w * g(k))
            .sum()
    }
}

/// Builds a log-mapped Gauss-Legendre grid with exactly `n_points` nodes on
/// `(k_min, k_max)`.
pub fn build_log_gauss_grid(n_points: usize, k_min: f64, k_max: f64) -> Result<RadialGrid> {
    if !(k_min.is_finite() && k_max.is_finite()) {
        return Err(Error::NonFinite("grid bounds must be finite".into()));
    }
    if k_min <= 0.0 || k_min >= k_max {
        return Err(Error::BadRange(format!(
            "need 0 < k_min < k_max, got k_min = {k_min}, k_max = {k_max}"
        )));
    }
    if n_points < 8 {
        return Err(Error::BadRange(format!(
            "need n_points >= 8, got {n_points}"
        )));
    }

    // Panels of order <= 16, sized so the node count comes out exact.
    let n_panels = n_points.div_ceil(16);
    let base = n_points / n_panels;
    let extra = n_points % n_panels;

    let u_min = k_min.ln();
    let du = (k_max.ln() - u_min) / n_panels as f64;

    let mut nodes = Vec::with_capacity(n_points);
    let mut weights = Vec::with_capacity(n_points);
    for panel in 0..n_panels {
        let order = if panel < extra { base + 1 } else { base };
        let (x, w) = gauss_legendre(order);
        let a = u_min + panel as f64 * du;
        let mid = a + 0.5 * du;
        let half = 0.5 * du;
        for i in 0..order {
            let k = (mid + half * x[i]).exp();
            nodes.push(k);
            weights.push(w[i] * half * k);
        }
    }

    Ok(RadialGrid { nodes, weights, k_min, k_max })
}

/// Fixed-panel Gauss-Legendre quadrature of `f` on the linear interval
/// `[a, b]` (`panels` panels of the given `order`).
pub(crate) fn gauss_panels(
    a: f64,
    b: f64,
    order: usize,
    panels: usize,
    f: impl Fn(f64) -> f64,
) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for i in 0..order {
            sum += w[i] * f(mid + 0.5 * h * x[i]);
        }
    }
    sum * 0.5 * h
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre polynomial.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence up to degree n.
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let weight = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}
