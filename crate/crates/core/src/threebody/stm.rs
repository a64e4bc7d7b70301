//! STM operator assembly, Fredholm-determinant sweeps and the trimer
//! spectrum.

use crate::error::{Error, Result};
use crate::model::{validate_params, ResonanceParams, SolverContext, TrimerLevel};
use crate::numerics::{brent_root, largest_eigenvalue, DenseMatrix, RadialGrid};
use crate::threebody::TrimerSpectrum;
use crate::twobody::dimer_kappa;

/// Discretized bound-state STM operator at trial binding wavenumber `q`.
///
/// The diagonal is the inverse two-body amplitude continued below threshold,
/// `d(k) = sqrt(3k^2/4 + q^2) + R* (3k^2/4 + q^2) - 1/a`, evaluated at the
/// pair collision energy `-(q^2 + 3k^2/4)`. The kernel is the s-wave angular
/// average of the one-atom-exchange propagator,
/// `K[i][j] = (2/(pi k_i)) k_j ln[(k_i^2+k_j^2+k_i k_j+q^2)/(k_i^2+k_j^2-k_i k_j+q^2)] w_j`.
#[derive(Debug, Clone)]
pub struct StmOperator {
    q: f64,
    params: ResonanceParams,
    grid: RadialGrid,
    diagonal: Vec<f64>,
    kernel: DenseMatrix,
}

impl StmOperator {
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn params(&self) -> &ResonanceParams {
        &self.params
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn kernel(&self) -> &DenseMatrix {
        &self.kernel
    }

    /// `I - D^{-1} K`, whose kernel vectors are the bound-state amplitudes.
    pub fn fredholm_matrix(&self) -> DenseMatrix {
        let n = self.grid.n_points();
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            let d = self.diagonal[i];
            for j in 0..n {
                m[(i, j)] = -self.kernel[(i, j)] / d;
            }
            m[(i, i)] += 1.0;
        }
        m
    }

    /// `(sign, ln |det|)` of the Fredholm matrix.
    pub fn log_det(&self) -> (i8, f64) {
        self.fredholm_matrix().lu().log_determinant()
    }

    /// Dominant eigenvalue of `D^{-1} K` (a positive matrix for `1/a <= 0`),
    /// by power iteration. Crosses 1 exactly at the ground-state root.
    pub fn dominant_eigenvalue(&self, tol: f64) -> Result<f64> {
        let n = self.grid.n_points();
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            let d = self.diagonal[i];
            for j in 0..n {
                m[(i, j)] = self.kernel[(i, j)] / d;
            }
        }
        largest_eigenvalue(&m, tol).map(|(lambda, _)| lambda)
    }
}

pub(crate) fn stm_diagonal(k: f64, q: f64, p: &ResonanceParams) -> f64 {
    let e = 0.75 * k * k + q * q;
    e.sqrt() + p.r_star * e - p.inv_a
}

/// S-wave angular average `∫_{-1}^{1} dx / (a^2 + b^2 + a b x + q^2)`
/// in closed form.
pub(crate) fn swave_log_kernel(a: f64, b: f64, q: f64) -> f64 {
    let s = a * a + b * b + q * q;
    ((s + a * b) / (s - a * b)).ln() / (a * b)
}

/// Assembles the operator without context validation; the collapse probe
/// uses this to reach the `r_star = 0` limit deliberately.
fn assemble_raw(q: f64, p: &ResonanceParams, grid: &RadialGrid) -> StmOperator {
    let nodes = grid.nodes();
    let weights = grid.weights();
    let n = nodes.len();
    let diagonal: Vec<f64> = nodes.iter().map(|&k| stm_diagonal(k, q, p)).collect();
    let mut kernel = DenseMatrix::zeros(n);
    // (2/(pi k)) k' ln[...] = (2/pi) k'^2 * swave_log_kernel, the 1/(k k')
    // of the angular average being folded into the closed form.
    let pref = 2.0 / std::f64::consts::PI;
    for i in 0..n {
        let ki = nodes[i];
        for j in 0..n {
            let kj = nodes[j];
            kernel[(i, j)] = pref * kj * kj * swave_log_kernel(ki, kj, q) * weights[j];
        }
    }
    StmOperator {
        q,
        params: *p,
        grid: grid.clone(),
        diagonal,
        kernel,
    }
}

/// Assembles the discretized STM operator at trial binding wavenumber `q`.
///
/// For `a > 0` the trial `q` must lie below the atom-dimer threshold
/// (`q > kappa`), where the diagonal stays strictly positive; shallower `q`
/// is refused for root-finding hygiene.
pub fn assemble(q: f64, p: &ResonanceParams, grid: &RadialGrid) -> Result<StmOperator> {
    let p = validate_params(*p, SolverContext::ThreeBody)?;
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::BadRange(format!("q = {q} must be finite and > 0")));
    }
    if p.inv_a > 0.0 {
        let kappa = dimer_kappa(&p)?;
        if q <= kappa {
            return Err(Error::ThresholdViolation { q, kappa });
        }
    }
    Ok(assemble_raw(q, &p, grid))
}

/// One point of a determinant sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetPoint {
    pub q: f64,
    pub sign: i8,
    pub log_abs_det: f64,
}

/// Evaluates `det(I - D^{-1} K)` on an ascending list of trial `q`; sign
/// changes between neighboring points bracket trimer levels.
pub fn det_scan(p: &ResonanceParams, grid: &RadialGrid, q_list: &[f64]) -> Result<Vec<DetPoint>> {
    if q_list.is_empty() {
        return Err(Error::BadRange("empty q list".into()));
    }
    if q_list.windows(2).any(|w| w[0] >= w[1]) || q_list[0] <= 0.0 {
        return Err(Error::BadRange("q list must be positive and ascending".into()));
    }
    q_list
        .iter()
        .map(|&q| {
            let op = assemble(q, p, grid)?;
            let (sign, log_abs_det) = op.log_det();
            Ok(DetPoint { q, sign, log_abs_det })
        })
        .collect()
}

/// Geometric ladder of trial binding wavenumbers for determinant sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QScan {
    pub q_min: f64,
    pub q_max: f64,
    /// Ratio between successive ladder points (> 1).
    pub ratio: f64,
}

impl QScan {
    /// Default ladder for a given grid: from `100 k_min` up to `k_max / 10`
    /// in steps of 1.2.
    pub fn for_grid(grid: &RadialGrid) -> Self {
        Self {
            q_min: 100.0 * grid.k_min(),
            q_max: grid.k_max() / 10.0,
            ratio: 1.2,
        }
    }

    fn ladder(&self) -> Vec<f64> {
        let mut qs = Vec::new();
        let mut q = self.q_min;
        while q < self.q_max {
            qs.push(q);
            q *= self.ratio;
        }
        qs.push(self.q_max);
        qs
    }
}

/// Signed, determinant-monotone objective for root refinement: the sign of
/// the determinant times its geometric-mean magnitude `|det|^{1/n}`, which
/// passes smoothly through zero at a level.
fn det_objective(q: f64, p: &ResonanceParams, grid: &RadialGrid, n: usize) -> Result<f64> {
    let op = assemble(q, p, grid)?;
    let (sign, log_abs) = op.log_det();
    if sign == 0 {
        return Ok(0.0);
    }
    Ok(sign as f64 * (log_abs / n as f64).exp())
}

/// Finds the `n_levels` largest-`q` roots of the Fredholm determinant using
/// an explicit scan window.
pub fn solve_levels_in(
    p: &ResonanceParams,
    grid: &RadialGrid,
    n_levels: usize,
    scan: QScan,
) -> Result<TrimerSpectrum> {
    let p = validate_params(*p, SolverContext::ThreeBody)?;
    let window_ok = scan.ratio.is_finite()
        && scan.ratio > 1.0
        && scan.q_min.is_finite()
        && scan.q_min > 0.0
        && scan.q_max.is_finite();
    if !window_ok {
        return Err(Error::BadRange(format!("bad scan window {scan:?}")));
    }
    let mut scan = scan;
    if p.inv_a > 0.0 {
        // Stay below the atom-dimer threshold.
        let kappa = dimer_kappa(&p)?;
        scan.q_min = scan.q_min.max(kappa * (1.0 + 1e-9));
    }
    if scan.q_min >= scan.q_max {
        return Ok(TrimerSpectrum { params: p, requested: n_levels, levels: Vec::new() });
    }

    let ladder = scan.ladder();
    let points = det_scan(&p, grid, &ladder)?;

    // Bracketed sign changes, deepest (largest q) first.
    let mut brackets: Vec<(f64, f64)> = Vec::new();
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if lo.sign == 0 {
            brackets.push((lo.q, lo.q));
        } else if hi.sign != 0 && lo.sign != hi.sign {
            brackets.push((lo.q, hi.q));
        }
    }
    brackets.reverse();
    brackets.truncate(n_levels);

    let n = grid.n_points();
    let mut levels = Vec::with_capacity(brackets.len());
    for (index, (q_lo, q_hi)) in brackets.into_iter().enumerate() {
        let q = if q_lo == q_hi {
            q_lo
        } else {
            brent_root(
                |q| det_objective(q, &p, grid, n).unwrap_or(f64::NAN),
                q_lo,
                q_hi,
                1e-13 * q_hi,
            )?
        };
        levels.push(TrimerLevel::new(index, q));
    }
    Ok(TrimerSpectrum { params: p, requested: n_levels, levels })
}

/// Finds the `n_levels` largest-`q` roots using the default scan window for
/// the grid. Missing shallow levels are reported through
/// [`TrimerSpectrum::fewer_than_requested`], not as an error.
pub fn solve_levels(p: &ResonanceParams, grid: &RadialGrid, n_levels: usize) -> Result<TrimerSpectrum> {
    solve_levels_in(p, grid, n_levels, QScan::for_grid(grid))
}

/// One row of the Thomas-collapse probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseRow {
    pub k_max: f64,
    /// Ground-state `q0` with the `R* k^2` term removed (`r_star = 0`).
    pub q0_zero_range: f64,
    /// Ground-state `q0` at the requested `r_star > 0`.
    pub q0_finite: f64,
}

/// Grid-refinement probe of spectral boundedness.
///
/// For each grid the ground state is located twice: once with `r_star`
/// forced to zero, once at the given `r_star > 0`. With the `R* k^2` term
/// absent the deepest level tracks the cutoff (`q0` grows without bound as
/// `k_max` grows, one Efimov period per factor `e^{pi/s0}` of cutoff); with
/// `r_star > 0` the ground state converges.
pub fn thomas_collapse_probe(
    p: &ResonanceParams,
    grids: &[RadialGrid],
) -> Result<Vec<CollapseRow>> {
    let p = validate_params(*p, SolverContext::ThreeBody)?;
    let zero_range = ResonanceParams { r_star: 0.0, ..p };
    let mut rows = Vec::with_capacity(grids.len());
    for grid in grids {
        let k_max = grid.k_max();
        let q0_zero_range = ground_state_raw(
            &zero_range,
            grid,
            QScan { q_min: 1e-5 * k_max, q_max: 10.0 * k_max, ratio: 1.2 },
        )?
        .ok_or_else(|| Error::NotConverged(format!("no zero-range root below k_max = {k_max}")))?;
        let q0_finite = ground_state_raw(
            &p,
            grid,
            QScan {
                q_min: (100.0 * grid.k_min()).min(1e-3 / p.r_star),
                q_max: 100.0 / p.r_star,
                ratio: 1.2,
            },
        )?
        .ok_or_else(|| Error::NotConverged(format!("no finite-R* root below k_max = {k_max}")))?;
        rows.push(CollapseRow { k_max, q0_zero_range, q0_finite });
    }
    Ok(rows)
}

/// Largest root of the determinant over the scan window, bypassing the
/// `r_star > 0` validation so the zero-range limit can be probed.
fn ground_state_raw(p: &ResonanceParams, grid: &RadialGrid, scan: QScan) -> Result<Option<f64>> {
    let mut scan = scan;
    if p.inv_a > 0.0 {
        let kappa = dimer_kappa(p)?;
        scan.q_min = scan.q_min.max(kappa * (1.0 + 1e-9));
    }
    if scan.q_min >= scan.q_max {
        return Ok(None);
    }
    let ladder = scan.ladder();
    let n = grid.n_points();
    let objective = |q: f64| {
        let op = assemble_raw(q, p, grid);
        let (sign, log_abs) = op.log_det();
        if sign == 0 {
            0.0
        } else {
            sign as f64 * (log_abs / n as f64).exp()
        }
    };
    let mut bracket = None;
    let mut prev = (ladder[0], objective(ladder[0]));
    for &q in &ladder[1..] {
        let f = objective(q);
        if prev.1 == 0.0 {
            bracket = Some((prev.0, prev.0));
        } else if f != 0.0 && f.signum() != prev.1.signum() {
            bracket = Some((prev.0, q));
        }
        prev = (q, f);
    }
    match bracket {
        None => Ok(None),
        Some((lo, hi)) if lo == hi => Ok(Some(lo)),
        Some((lo, hi)) => Ok(Some(brent_root(objective, lo, hi, 1e-13 * hi)?)),
    }
}
