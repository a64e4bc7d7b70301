//! Pair amplitude, sector norms, one-body momentum distribution and the
//! energy relation for solved trimers.
//!
//! With the pair amplitude `D(k)` of a level at binding wavenumber `q`, the
//! normalized three-body state splits into two sectors:
//!
//! * one molecule + one atom, with reduced norm `6 R* ∫ d^3k/(2 pi)^3 D(k)^2`
//!   (the molecule carries momentum opposite to the spectator atom);
//! * three free atoms, with center-of-mass wavefunction
//!   `phi(p1, p2) = sqrt(8 pi) [D(p1)+D(p2)+D(p3)] / (q^2 + p1^2 + p2^2 + p1.p2)`,
//!   `p3 = -p1-p2`, and reduced norm `∫ d^3p1 d^3p2/(2 pi)^6 phi^2`.
//!
//! The amplitude is scaled so the two weights sum to one; `n_mol` is then the
//! mean molecule number. The atomic momentum distribution is
//! `n_k = 3 ∫ d^3p/(2 pi)^3 phi(k, p)^2 + 6 R* D(k)^2`, which integrates to
//! `3 - 2 n_mol` and carries the `c4 = 8 pi n_mol / R*` tail.

use crate::error::{Error, Result};
use crate::model::{ResonanceParams, TrimerLevel};
use crate::numerics::{gauss_legendre, DenseMatrix, RadialGrid};
use crate::threebody::stm::assemble;
use crate::threebody::{MomentumDistribution, StmSolution};
use crate::twobody::subtraction_low_tail;

use std::f64::consts::PI;

/// Solves for the pair amplitude of a located level by inverse iteration on
/// the Fredholm matrix, then fixes the physical normalization from the
/// sector norms.
pub fn solve_amplitude(
    level: &TrimerLevel,
    p: &ResonanceParams,
    grid: &RadialGrid,
) -> Result<StmSolution> {
    let op = assemble(level.q, p, grid)?;
    let m = op.fredholm_matrix();
    let lu = m.lu();

    let n = grid.n_points();
    let mut d: Vec<f64> = vec![1.0 / (n as f64).sqrt(); n];
    let mut residual = f64::INFINITY;
    for _ in 0..8 {
        let y = lu.solve(&d)?;
        let norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotConverged("inverse iteration blew up".into()));
        }
        d = y.into_iter().map(|x| x / norm).collect();
        let mv = m.mul_vec(&d);
        residual = mv.iter().map(|x| x * x).sum::<f64>().sqrt();
        if residual <= 1e-11 {
            break;
        }
    }
    if residual > 1e-8 {
        return Err(Error::NotConverged(format!(
            "null-vector residual {residual:e} at q = {}",
            level.q
        )));
    }
    if d[0] < 0.0 {
        for x in &mut d {
            *x = -*x;
        }
    }

    // Sector norms of the un-normalized amplitude.
    let n_mol_raw = molecule_norm(grid, &d, p.r_star);
    let n_open_raw = open_channel_norm(grid, &d, level.q);
    let total = n_mol_raw + n_open_raw;
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NotConverged(format!("bad sector norms: {total}")));
    }
    let scale = total.sqrt().recip();
    for x in &mut d {
        *x *= scale;
    }
    let n_mol = n_mol_raw / total;
    let n_open = n_open_raw / total;
    // <K_mol> = ∫ d^3k/(2 pi)^3 (k^2/4) 6 R* D(k)^2 on the normalized state.
    let k_mol = 1.5 * p.r_star / (2.0 * PI * PI)
        * grid
            .nodes()
            .iter()
            .zip(grid.weights())
            .zip(&d)
            .map(|((&k, &w), &dk)| w * k.powi(4) * dk * dk)
            .sum::<f64>();

    Ok(StmSolution {
        params: *p,
        level: *level,
        d_values: d,
        n_mol,
        n_open,
        k_mol,
        residual,
        grid: grid.clone(),
    })
}

/// Reconstructs the one-body momentum distribution of a solved trimer on
/// `out_grid` and fits the momentum tail over `window` (defaults to
/// `(10 q, k_max/10)` when `None`).
pub fn reconstruct_nk(
    sol: &StmSolution,
    out_grid: &RadialGrid,
    window: Option<(f64, f64)>,
) -> Result<MomentumDistribution> {
    let q = sol.level.q;
    let r_star = sol.params.r_star;
    let grid = &sol.grid;
    let interp = AmplitudeInterp::new(grid, &sol.d_values);

    // n(k) = (6/(pi k)) ∫∫ dp2 dp3 p2 p3 [D(k)+D(p2)+D(p3)]^2 / denom^2
    //        + 6 R* D(k)^2,
    // over the triangle |p2 - p3| <= k <= p2 + p3. The square is expanded
    // using the p2 <-> p3 symmetry; every term without D(p3) gets its p3
    // integral in closed form, which keeps the k^-4 tail accurate where the
    // p2 quadrature could not resolve the p2 ~ k ridge.
    let k_samples: Vec<f64> = out_grid.nodes().to_vec();
    let weights: Vec<f64> = out_grid.weights().to_vec();
    let values: Vec<f64> = k_samples
        .iter()
        .map(|&k| {
            let dk = interp.eval(k);
            let open: f64 = grid
                .nodes()
                .iter()
                .zip(grid.weights())
                .zip(&sol.d_values)
                .map(|((&p2, &w2), &d2)| {
                    let square_terms = dk * dk + 2.0 * d2 * d2 + 4.0 * dk * d2;
                    let cross = 2.0 * d2;
                    w2 * p2
                        * (square_terms * propagator_moment(k, p2, q)
                            + cross * amplitude_moment(k, p2, q, &interp))
                })
                .sum();
            (6.0 / (PI * k)) * open + 6.0 * r_star * dk * dk
        })
        .collect();

    let (k_lo, k_hi) = window.unwrap_or((10.0 * q, out_grid.k_max() / 10.0));
    if !(k_lo > 0.0 && k_lo < k_hi) {
        return Err(Error::WindowTooNarrow(format!(
            "bad fit window ({k_lo}, {k_hi})"
        )));
    }
    let (c4_fit, c6_fit) = fit_tail(&k_samples, &values, &weights, k_lo, k_hi)?;

    // Sum rule with the fitted tail appended beyond the sample range.
    let k_top = out_grid.k_max();
    let body: f64 = k_samples
        .iter()
        .zip(&weights)
        .zip(&values)
        .map(|((&k, &w), &nk)| w * k * k * nk)
        .sum();
    let total = (body + c4_fit / k_top + c6_fit / (3.0 * k_top.powi(3))) / (2.0 * PI * PI);
    let sum_rule_residual = (total - (3.0 - 2.0 * sol.n_mol)).abs();

    Ok(MomentumDistribution {
        params: sol.params,
        level_index: sol.level.index,
        k_samples,
        values,
        weights,
        c4_fit,
        c6_fit,
        fit_window: (k_lo, k_hi),
        sum_rule_residual,
    })
}

/// Residual of the trap-free energy relation for a solved trimer:
/// `RHS - (-q^2)` with
/// `RHS = (1/2) ∫ d^3k/(2 pi)^3 [k^2 n_k - c4/(1/a^2 + k^2)] + R* c6/(8 pi) - <K_mol>`,
/// evaluated with the reconstructed `n_k` and the fitted tail coefficients.
pub fn energy_relation_residual_trimer(
    sol: &StmSolution,
    dist: &MomentumDistribution,
) -> Result<f64> {
    let q = sol.level.q;
    let inv_a = sol.params.inv_a;
    let c4 = dist.c4_fit;
    let c6 = dist.c6_fit;
    if dist.k_samples.is_empty() {
        return Err(Error::BadRange("empty distribution".into()));
    }

    let body: f64 = dist
        .k_samples
        .iter()
        .zip(&dist.weights)
        .zip(&dist.values)
        .map(|((&k, &w), &nk)| w * (k.powi(4) * nk - c4 * k * k / (inv_a * inv_a + k * k)))
        .sum();
    let k_lo = dist.k_samples[0];
    let k_top = *dist.k_samples.last().unwrap();
    let low = -c4 * subtraction_low_tail(k_lo, inv_a);
    let high = (c6 + c4 * inv_a * inv_a) / k_top;

    let rhs = (body + low + high) / (4.0 * PI * PI) + sol.params.r_star * c6 / (8.0 * PI)
        - sol.k_mol;
    Ok(rhs + q * q)
}

/// Reduced one-molecule norm `6 R* ∫ d^3k/(2 pi)^3 D(k)^2`.
fn molecule_norm(grid: &RadialGrid, d: &[f64], r_star: f64) -> f64 {
    let sum: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(d)
        .map(|((&k, &w), &dk)| w * k * k * dk * dk)
        .sum();
    6.0 * r_star * sum / (2.0 * PI * PI)
}

/// Reduced open-channel norm. In the fully symmetric form
/// `(1/pi^3) ∫∫∫_T dp1 dp2 dp3 p1 p2 p3 [3 D(p1)^2 + 6 D(p1) D(p2)] / denom^2`
/// the `p3` integral is elementary, leaving a double sum over grid nodes.
fn open_channel_norm(grid: &RadialGrid, d: &[f64], q: f64) -> f64 {
    let nodes = grid.nodes();
    let weights = grid.weights();
    let n = nodes.len();
    let mut sum = 0.0;
    for i in 0..n {
        let pi_ = nodes[i];
        let wi = weights[i] * pi_;
        let di = d[i];
        for j in 0..n {
            let pj = nodes[j];
            let amp = 3.0 * di * di + 6.0 * di * d[j];
            sum += wi * weights[j] * pj * amp * propagator_moment(pi_, pj, q);
        }
    }
    sum / PI.powi(3)
}

/// `∫ p3 dp3 / (q^2 + (a^2 + b^2 + p3^2)/2)^2` over the triangle range
/// `|a - b| <= p3 <= a + b`, in closed form.
fn propagator_moment(a: f64, b: f64, q: f64) -> f64 {
    let base = q * q + 0.5 * (a * a + b * b);
    let lo = a - b;
    let hi = a + b;
    (base + 0.5 * lo * lo).recip() - (base + 0.5 * hi * hi).recip()
}

/// `∫ p3 D(p3) dp3 / (q^2 + (a^2 + b^2 + p3^2)/2)^2` over the triangle range,
/// on log-spaced Gauss panels (the amplitude varies over decades of `p3`
/// when `a ~ b`).
fn amplitude_moment(a: f64, b: f64, q: f64, interp: &AmplitudeInterp) -> f64 {
    let hi = a + b;
    let lo = ((a - b).abs()).max(hi * 1e-9);
    if lo >= hi {
        return 0.0;
    }
    let span = (hi / lo).ln();
    let n_panels = ((span / 1.2).ceil() as usize).clamp(1, 24);
    let (x, w) = cached_gauss_12();
    let base = q * q + 0.5 * (a * a + b * b);
    let du = span / n_panels as f64;
    let mut total = 0.0;
    for panel in 0..n_panels {
        let u_mid = lo.ln() + (panel as f64 + 0.5) * du;
        for i in 0..12 {
            let u = u_mid + 0.5 * du * x[i];
            let p3 = u.exp();
            let denom = base + 0.5 * p3 * p3;
            // dp3 = p3 du.
            total += w[i] * p3 * p3 * interp.eval(p3) / (denom * denom);
        }
    }
    total * 0.5 * du
}

fn cached_gauss_12() -> (&'static [f64], &'static [f64]) {
    use std::sync::OnceLock;
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (x, w) = RULE.get_or_init(|| gauss_legendre(12));
    (x, w)
}

/// Cubic (4-point Lagrange) interpolation of the pair amplitude in `ln k`,
/// with flat extrapolation below the grid and a `1/k^4` tail above it.
pub(crate) struct AmplitudeInterp {
    ln_k: Vec<f64>,
    d: Vec<f64>,
    k_min: f64,
    k_max: f64,
    d_first: f64,
    d_last: f64,
}

impl AmplitudeInterp {
    pub(crate) fn new(grid: &RadialGrid, d: &[f64]) -> Self {
        assert_eq!(grid.n_points(), d.len());
        Self {
            ln_k: grid.nodes().iter().map(|k| k.ln()).collect(),
            d: d.to_vec(),
            k_min: grid.nodes()[0],
            k_max: *grid.nodes().last().unwrap(),
            d_first: d[0],
            d_last: *d.last().unwrap(),
        }
    }

    pub(crate) fn eval(&self, k: f64) -> f64 {
        if k <= self.k_min {
            // D(k) is even and regular at the origin.
            return self.d_first;
        }
        if k >= self.k_max {
            return self.d_last * (self.k_max / k).powi(4);
        }
        let u = k.ln();
        let n = self.ln_k.len();
        let idx = self.ln_k.partition_point(|&v| v < u);
        let start = idx.saturating_sub(2).min(n - 4);
        let xs = &self.ln_k[start..start + 4];
        let ys = &self.d[start..start + 4];
        // Away from nodes of the amplitude, interpolate in log-log space:
        // exact on the power-law tails. Across sign changes fall back to
        // direct interpolation of the value.
        let all_positive = ys.iter().all(|&y| y > 0.0);
        let all_negative = ys.iter().all(|&y| y < 0.0);
        if all_positive || all_negative {
            let logs: [f64; 4] = std::array::from_fn(|i| ys[i].abs().ln());
            let log_value = lagrange4(u, xs, &logs);
            if all_positive {
                log_value.exp()
            } else {
                -log_value.exp()
            }
        } else {
            lagrange4(u, xs, ys)
        }
    }
}

fn lagrange4(u: f64, xs: &[f64], ys: &[f64]) -> f64 {
    let mut value = 0.0;
    for i in 0..4 {
        let mut term = ys[i];
        for j in 0..4 {
            if i != j {
                term *= (u - xs[j]) / (xs[i] - xs[j]);
            }
        }
        value += term;
    }
    value
}

/// Weighted least squares of `k^4 n_k` against `c4 + c6/k^2` over the fit
/// window, weighting samples by their log-measure `w/k`.
///
/// A `1/k^4` nuisance term is carried along in the fit (and discarded) so
/// that higher-order tail curvature inside the window does not bias `c6`.
fn fit_tail(k: &[f64], nk: &[f64], w: &[f64], k_lo: f64, k_hi: f64) -> Result<(f64, f64)> {
    // Basis {1, (k_lo/k)^2, (k_lo/k)^4} keeps the normal equations
    // well-conditioned; the scale is undone at the end.
    let mut a = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    let mut count = 0usize;
    for i in 0..k.len() {
        if k[i] < k_lo || k[i] > k_hi {
            continue;
        }
        count += 1;
        let weight = w[i] / k[i];
        let y = k[i].powi(4) * nk[i];
        let r = (k_lo / k[i]).powi(2);
        let basis = [1.0, r, r * r];
        for m in 0..3 {
            for n in 0..3 {
                a[m][n] += weight * basis[m] * basis[n];
            }
            rhs[m] += weight * basis[m] * y;
        }
    }
    if count < 8 {
        return Err(Error::WindowTooNarrow(format!(
            "only {count} samples inside ({k_lo}, {k_hi}); need at least 8"
        )));
    }
    let matrix = DenseMatrix::from_rows(&[&a[0], &a[1], &a[2]]);
    let lu = matrix.lu();
    let solution = lu
        .solve(&rhs)
        .map_err(|_| Error::WindowTooNarrow("degenerate tail fit".into()))?;
    let c4 = solution[0];
    let c6 = solution[1] * k_lo * k_lo;
    Ok((c4, c6))
}
