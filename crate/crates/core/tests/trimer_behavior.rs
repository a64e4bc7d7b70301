//! Solver-level behavior of the three-body machinery: regression baselines
//! cross-checked by independent discretizations, amplitude asymptotics,
//! sector-weight ordering, and stability under grid refinement.

use std::f64::consts::PI;
use std::sync::OnceLock;

use narrowres::model::ResonanceParams;
use narrowres::numerics::build_log_gauss_grid;
use narrowres::threebody::{
    energy_relation_residual_trimer, reconstruct_nk, solve_amplitude, solve_levels_in,
    MomentumDistribution, QScan, StmSolution, TrimerSpectrum,
};

/// Baselines for unitarity at R* = 1, frozen from two independent
/// discretizations that agree to 5e-9 relative.
const Q0_BASELINE: f64 = 1.1770828e-1;
const Q1_BASELINE: f64 = 5.1515800e-3;
const Q2_BASELINE: f64 = 2.2699179e-4;

struct Shared {
    spectrum: TrimerSpectrum,
    ground: StmSolution,
    ground_dist: MomentumDistribution,
}

fn shared() -> &'static Shared {
    static CELL: OnceLock<Shared> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = ResonanceParams::unitarity(1.0);
        let grid = build_log_gauss_grid(440, 1e-8, 1e3).unwrap();
        let spectrum =
            solve_levels_in(&p, &grid, 3, QScan { q_min: 1e-5, q_max: 100.0, ratio: 1.2 })
                .unwrap();
        let ground = solve_amplitude(&spectrum.levels[0], &p, &grid).unwrap();
        let out = build_log_gauss_grid(320, ground.level.q * 1e-2, 1e3).unwrap();
        let ground_dist = reconstruct_nk(&ground, &out, Some((30.0, 300.0))).unwrap();
        Shared { spectrum, ground, ground_dist }
    })
}

#[test]
fn regression_baselines_and_cross_discretization() {
    let s = shared();
    let levels = &s.spectrum.levels;
    assert_eq!(levels.len(), 3);
    assert!((levels[0].q - Q0_BASELINE).abs() <= 1e-6 * Q0_BASELINE);
    assert!((levels[1].q - Q1_BASELINE).abs() <= 1e-6 * Q1_BASELINE);
    assert!((levels[2].q - Q2_BASELINE).abs() <= 1e-6 * Q2_BASELINE);

    // Independent discretization: different k range, density and ladder.
    let p = ResonanceParams::unitarity(1.0);
    let grid = build_log_gauss_grid(560, 3e-8, 2e3).unwrap();
    let other =
        solve_levels_in(&p, &grid, 3, QScan { q_min: 1e-5, q_max: 100.0, ratio: 1.25 }).unwrap();
    for (a, b) in levels.iter().zip(&other.levels) {
        let rel = (a.q - b.q).abs() / a.q;
        assert!(rel <= 1e-6, "discretizations disagree at level {}: {rel:e}", a.index);
    }
}

#[test]
fn levels_are_ordered_and_signed() {
    let s = shared();
    for w in s.spectrum.levels.windows(2) {
        assert!(w[0].q > w[1].q, "q must decrease with level index");
        assert!(w[0].energy < w[1].energy, "energy must increase with level index");
    }
    for l in &s.spectrum.levels {
        assert!(l.q > 0.0 && l.energy == -l.q * l.q);
    }
}

#[test]
fn amplitude_invariants() {
    let s = shared();
    let sol = &s.ground;
    assert!(sol.residual <= 1e-8, "null-vector residual {:e}", sol.residual);
    assert!(sol.d_values[0] > 0.0, "sign convention D(k_min) > 0");
    assert!(sol.n_mol > 0.0 && sol.n_mol < 1.0);
    assert!((sol.n_mol + sol.n_open - 1.0).abs() < 1e-12);
    assert!(sol.k_mol > 0.0);
}

#[test]
fn pair_amplitude_tail_follows_inverse_quartic() {
    // d(k) ~ R* (3/4) k^2 at large k forces D(k) -> (16/(3 pi R* k^4)) ∫ k'^2 D dk'.
    let s = shared();
    let sol = &s.ground;
    let grid = sol.grid();
    let integral: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(&sol.d_values)
        .map(|((&k, &w), &d)| w * k * k * d)
        .sum();
    let predicted = 16.0 / (3.0 * PI * sol.params.r_star) * integral;
    let mut checked = 0;
    for (&k, &d) in grid.nodes().iter().zip(&sol.d_values) {
        if k >= 500.0 {
            let ratio = k.powi(4) * d / predicted;
            assert!(
                (ratio - 1.0).abs() <= 0.01,
                "k^4 D / predicted = {ratio} at k = {k}"
            );
            checked += 1;
        }
    }
    assert!(checked >= 5, "need nodes in the top part of the grid");
}

#[test]
fn molecule_weight_grows_with_binding_depth() {
    // n_mol is an increasing function of q R*, both across levels of one
    // spectrum and across parameter sweeps; the dimer shows the same trend
    // in kappa R*.
    let s = shared();
    let p = ResonanceParams::unitarity(1.0);
    let excited = solve_amplitude(&s.spectrum.levels[1], &p, s.ground.grid()).unwrap();
    assert!(
        s.ground.n_mol > excited.n_mol,
        "deeper level must carry more molecular weight"
    );

    let mut points = Vec::new();
    for r_star in [0.5, 1.0, 2.0] {
        let pp = ResonanceParams::new(-0.02, r_star);
        let g = build_log_gauss_grid(400, 1e-7, 1e3 / r_star).unwrap();
        let spectrum = solve_levels_in(
            &pp,
            &g,
            1,
            QScan { q_min: 1e-4, q_max: 100.0 / r_star, ratio: 1.2 },
        )
        .unwrap();
        assert_eq!(spectrum.levels.len(), 1, "ground state expected at R* = {r_star}");
        let sol = solve_amplitude(&spectrum.levels[0], &pp, &g).unwrap();
        assert!(sol.n_mol > 0.0 && sol.n_mol < 1.0);
        points.push((spectrum.levels[0].q * r_star, sol.n_mol));
    }
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    assert!(
        points.windows(2).all(|w| w[0].1 < w[1].1),
        "n_mol must grow with q R*: {points:?}"
    );
}

#[test]
fn energy_relation_needs_the_c6_term() {
    let s = shared();
    let q_sq = s.ground.level.q * s.ground.level.q;
    let with_c6 = energy_relation_residual_trimer(&s.ground, &s.ground_dist).unwrap();
    // Dropping R* c6 / (8 pi) from the right-hand side shifts the residual
    // by exactly that term.
    let ablated = with_c6 - s.ground.params.r_star * s.ground_dist.c6_fit / (8.0 * PI);
    assert!(
        ablated.abs() >= 10.0 * with_c6.abs().max(1e-4 * q_sq),
        "c6 term inactive: with = {with_c6:e}, without = {ablated:e}"
    );
    assert!(ablated.abs() / q_sq >= 0.05, "c6 term should matter at the percent level");
}

#[test]
fn momentum_distribution_positive_and_monotone_in_window() {
    let s = shared();
    let dist = &s.ground_dist;
    assert!(dist.values.iter().all(|&v| v >= 0.0), "n_k must be nonnegative");
    // Inside the fit window k^4 n_k approaches c4 from below (c6 < 0).
    assert!(dist.c6_fit < 0.0);
    let mut previous = f64::NEG_INFINITY;
    for (&k, &nk) in dist.k_samples.iter().zip(&dist.values) {
        if k >= dist.fit_window.0 && k <= dist.fit_window.1 {
            let tail = k.powi(4) * nk;
            assert!(
                tail >= previous - 1e-6 * dist.c4_fit,
                "k^4 n_k not monotone toward c4 at k = {k}"
            );
            assert!(tail <= dist.c4_fit * (1.0 + 1e-6));
            previous = tail;
        }
    }
}

#[test]
fn spectrum_stable_under_grid_refinement() {
    // Doubling n_points and doubling k_max each move every level by < 1e-4
    // relative.
    let p = ResonanceParams::unitarity(1.0);
    let scan = QScan { q_min: 1e-4, q_max: 10.0, ratio: 1.2 };
    let base = solve_levels_in(&p, &build_log_gauss_grid(240, 1e-6, 1e3).unwrap(), 2, scan)
        .unwrap();
    let denser = solve_levels_in(&p, &build_log_gauss_grid(480, 1e-6, 1e3).unwrap(), 2, scan)
        .unwrap();
    let wider = solve_levels_in(&p, &build_log_gauss_grid(280, 1e-6, 2e3).unwrap(), 2, scan)
        .unwrap();
    assert_eq!(base.levels.len(), 2);
    for (variant, name) in [(&denser, "denser"), (&wider, "wider")] {
        for (a, b) in base.levels.iter().zip(&variant.levels) {
            let rel = (a.q - b.q).abs() / a.q;
            assert!(rel < 1e-4, "{name} grid moved level {} by {rel:e}", a.index);
        }
    }
}
