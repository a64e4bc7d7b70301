//! Closed-form and regularized two-body physics: scattering amplitudes,
//! dimer observables, and the dimer-level checks of the momentum-tail and
//! energy relations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{validate_params, DimerSolution, ResonanceParams, SolverContext};
use crate::numerics::{gauss_panels, RadialGrid};

use std::f64::consts::PI;

/// Bare molecular energy and interchannel coupling amplitude matched to the
/// narrow-resonance amplitude at small cutoff range:
/// `e_mol = (sqrt(2)/(epsilon sqrt(pi)) - 1/a)/R*` and
/// `lambda = sqrt(2 pi / R*)` in natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoChannelDerived {
    pub e_mol: f64,
    pub lambda: f64,
}

impl TwoChannelDerived {
    /// Matches `e_mol` and `lambda` for params with `epsilon > 0`.
    pub fn from_params(p: &ResonanceParams) -> Result<Self> {
        let p = validate_params(*p, SolverContext::RegularizedAmplitude)?;
        let e_mol = (std::f64::consts::SQRT_2 / (p.epsilon * PI.sqrt()) - p.inv_a) / p.r_star;
        let lambda = (2.0 * PI / p.r_star).sqrt();
        Ok(Self { e_mol, lambda })
    }
}

/// Gaussian interchannel cutoff `chi(k) = exp(-k^2 eps^2 / 4)`.
#[inline]
pub fn cutoff_chi(k: f64, epsilon: f64) -> f64 {
    (-0.25 * k * k * epsilon * epsilon).exp()
}

/// Zero-range scattering amplitude `f0(k) = -1/(1/a + R* k^2 + i k)`.
///
/// Satisfies the optical theorem `Im f0 = k |f0|^2` identically for `k > 0`.
/// At `k = 0` and unitarity the amplitude diverges; that case is reported as
/// [`Error::PoleAtZero`] rather than returned as an infinity.
pub fn f0(k: f64, p: &ResonanceParams) -> Result<Complex64> {
    let p = validate_params(*p, SolverContext::TwoBody)?;
    if !k.is_finite() || k < 0.0 {
        return Err(Error::BadRange(format!("k = {k} must be finite and >= 0")));
    }
    let denom = Complex64::new(p.inv_a + p.r_star * k * k, k);
    if denom.norm_sqr() == 0.0 {
        return Err(Error::PoleAtZero);
    }
    Ok(-denom.inv())
}

/// `1/f0` continued to the imaginary axis `k = i kappa`:
/// `1/a - kappa - R* kappa^2`, real. Vanishes exactly at the dimer pole.
pub fn inverse_f0_imag_axis(kappa: f64, p: &ResonanceParams) -> f64 {
    p.inv_a - kappa - p.r_star * kappa * kappa
}

/// Dimer binding wavenumber: the positive root of
/// `1/a - kappa - R* kappa^2 = 0`.
///
/// Written as `kappa = 2 (1/a) / (1 + sqrt(1 + 4 R*/a))`, which covers
/// `R* = 0` (`kappa = 1/a`) without a separate branch and avoids
/// cancellation for small `R*`. A bound state exists only for `a > 0`.
pub fn dimer_kappa(p: &ResonanceParams) -> Result<f64> {
    let p = validate_params(*p, SolverContext::TwoBody)?;
    if p.inv_a <= 0.0 {
        return Err(Error::NoBoundState { inv_a: p.inv_a });
    }
    Ok(2.0 * p.inv_a / (1.0 + (1.0 + 4.0 * p.r_star * p.inv_a).sqrt()))
}

/// Momentum-tail coefficients `(c4, c6)` of the dimer, valid for any
/// `r_star >= 0`: `c4 = 16 pi kappa / (1 + 2 kappa R*)`, `c6 = -2 kappa^2 c4`.
fn dimer_tail_coefficients(kappa: f64, r_star: f64) -> (f64, f64) {
    let c4 = 16.0 * PI * kappa / (1.0 + 2.0 * kappa * r_star);
    (c4, -2.0 * kappa * kappa * c4)
}

/// Closed-form dimer observables.
///
/// The closed-channel molecule number follows from normalizing the
/// two-channel dimer state in the zero-range limit: the open channel
/// (momentum amplitude `∝ 1/(k^2 + kappa^2)`) carries weight
/// `2 Lambda^2 ∫ d^3k/(2 pi)^3 (k^2 + kappa^2)^{-2} = 1/(2 kappa R*)`
/// relative to the bare molecule, so
/// `n_mol = 2 kappa R* / (1 + 2 kappa R*)`. The momentum tail is then
/// `c4 = 8 pi n_mol / R* = 16 pi kappa / (1 + 2 kappa R*)`, and expanding
/// `n_k = c4/(k^2 + kappa^2)^2` at large `k` gives `c6 = -2 kappa^2 c4`.
pub fn dimer_observables(p: &ResonanceParams) -> Result<DimerSolution> {
    let p = validate_params(*p, SolverContext::TwoBody)?;
    let kappa = dimer_kappa(&p)?;
    if p.r_star == 0.0 {
        return Err(Error::RStarRequired(
            "the molecule number needs r_star > 0".into(),
        ));
    }
    let x = 2.0 * kappa * p.r_star;
    let n_mol = x / (1.0 + x);
    let (c4, c6) = dimer_tail_coefficients(kappa, p.r_star);
    Ok(DimerSolution {
        params: p,
        kappa,
        energy: -kappa * kappa,
        n_mol,
        c4,
        c6,
    })
}

/// Atomic momentum distribution of the dimer, `n_k = c4/(k^2 + kappa^2)^2`.
///
/// Normalized so that `∫ d^3k/(2 pi)^3 n_k = 2 - 2 n_mol`; works for
/// `r_star = 0` too, where the molecule fraction vanishes.
pub fn dimer_nk(k: f64, p: &ResonanceParams) -> Result<f64> {
    let p = validate_params(*p, SolverContext::TwoBody)?;
    let kappa = dimer_kappa(&p)?;
    let (c4, _) = dimer_tail_coefficients(kappa, p.r_star);
    let d = k * k + kappa * kappa;
    Ok(c4 / (d * d))
}

/// Regularized two-channel scattering amplitude at relative momentum `k`.
///
/// The defining relation is
/// `chi^{-2}(k) / (4 pi f_eps(k)) = (E_mol - k^2)/(2 Lambda^2) + I(k)` with
/// the loop integral `I(k) = ∫ d^3k'/(2 pi)^3 chi^2(k') / (k^2 - k'^2 + i0)`.
/// The imaginary part of the loop is analytic,
/// `Im I = -k exp(-k^2 eps^2/2) / (4 pi)`. The real part is a principal
/// value: the singular term is subtracted (its principal value over `(0, ∞)`
/// vanishes), the smooth remainder is integrated by panel quadrature, and
/// the `1/k'^2` tail of the subtraction beyond the Gaussian support is added
/// back in closed form.
///
/// Converges to [`f0`] as `epsilon -> 0` at fixed `k`.
pub fn f_eps(k: f64, p: &ResonanceParams) -> Result<Complex64> {
    let p = validate_params(*p, SolverContext::RegularizedAmplitude)?;
    if !k.is_finite() || k < 0.0 {
        return Err(Error::BadRange(format!("k = {k} must be finite and >= 0")));
    }
    let derived = TwoChannelDerived::from_params(&p)?;
    let eps = p.epsilon;
    let chi_sq = |kk: f64| (-0.5 * kk * kk * eps * eps).exp();

    let g_k = chi_sq(k);
    let cut = (10.0 / eps).max(4.0 * k + 1.0);
    let subtracted = |kp: f64| {
        let den = k * k - kp * kp;
        if den == 0.0 {
            // Removable limit of the subtracted integrand.
            g_k * (0.5 * k * k * eps * eps - 1.0)
        } else {
            (kp * kp * chi_sq(kp) - k * k * g_k) / den
        }
    };
    let core = gauss_panels(0.0, cut, 24, 24, subtracted);
    // ∫_cut^∞ k^2 g(k)/(k'^2 - k^2) dk' for the subtraction term; the
    // Gaussian part of the integrand is below e^{-50} out there.
    let tail = if k > 0.0 {
        0.5 * k * g_k * ((cut + k) / (cut - k)).ln()
    } else {
        0.0
    };
    let re_loop = (core + tail) / (2.0 * PI * PI);
    let im_loop = -k * g_k / (4.0 * PI);

    let two_lambda_sq = 2.0 * derived.lambda * derived.lambda;
    let inv_f = 4.0
        * PI
        * chi_sq(k)
        * Complex64::new((derived.e_mol - k * k) / two_lambda_sq + re_loop, im_loop);
    if inv_f.norm_sqr() == 0.0 {
        return Err(Error::PoleAtZero);
    }
    Ok(inv_f.inv())
}

/// Residual of the trap-free energy relation for the dimer at rest:
/// `RHS - (-kappa^2)` with
/// `RHS = (1/2) ∫ d^3k/(2 pi)^3 [k^2 n_k - c4/(1/a^2 + k^2)] + R* c6/(8 pi)`.
///
/// The grid integrates the reduced radial integrand; the analytically known
/// pieces outside `(k_min, k_max)` (the subtraction term below, the `1/k^2`
/// tail above) are added in closed form, so the residual reflects quadrature
/// quality rather than truncation. Vanishes identically in exact arithmetic.
pub fn energy_relation_residual_dimer(p: &ResonanceParams, grid: &RadialGrid) -> Result<f64> {
    let p = validate_params(*p, SolverContext::TwoBody)?;
    let kappa = dimer_kappa(&p)?;
    let inv_a = p.inv_a;
    let (c4, c6) = dimer_tail_coefficients(kappa, p.r_star);

    // (1/2) ∫ d^3k/(2pi)^3 [...] = (1/4 pi^2) ∫ dk [k^4 n_k - c4 k^2/(1/a^2 + k^2)].
    let body = grid.integrate(|k| {
        let d = k * k + kappa * kappa;
        let nk = c4 / (d * d);
        k.powi(4) * nk - c4 * k * k / (inv_a * inv_a + k * k)
    });
    let low = -c4 * subtraction_low_tail(grid.k_min(), inv_a);
    // Above k_max the integrand approaches (c6 + c4/a^2)/k^2.
    let high = (c6 + c4 * inv_a * inv_a) / grid.k_max();

    let rhs = (body + low + high) / (4.0 * PI * PI) + p.r_star * c6 / (8.0 * PI);
    Ok(rhs + kappa * kappa)
}

/// `∫_0^klo k^2/(1/a^2 + k^2) dk`, the subtraction term below the grid.
pub(crate) fn subtraction_low_tail(k_lo: f64, inv_a: f64) -> f64 {
    if inv_a == 0.0 {
        k_lo
    } else {
        let ia = inv_a.abs();
        k_lo - ia * (k_lo / ia).atan()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::build_log_gauss_grid;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn params(inv_a: f64, r_star: f64) -> ResonanceParams {
        ResonanceParams::new(inv_a, r_star)
    }

    #[test]
    fn f0_at_zero_momentum_is_minus_a() {
        let f = f0(0.0, &params(0.5, 1.0)).unwrap();
        assert!((f.re + 2.0).abs() < 1e-15);
        assert_eq!(f.im, 0.0);
    }

    #[test]
    fn f0_unitarity_unit_momentum() {
        // -1/(1 + i) = -0.5 + 0.5 i at 1/a = 0, R* = 1, k = 1.
        let f = f0(1.0, &params(0.0, 1.0)).unwrap();
        assert!((f.re + 0.5).abs() < 1e-15);
        assert!((f.im - 0.5).abs() < 1e-15);
    }

    #[test]
    fn f0_pole_at_zero_reported() {
        assert_eq!(f0(0.0, &params(0.0, 1.0)), Err(Error::PoleAtZero));
    }

    #[test]
    fn optical_theorem_exact() {
        let f = f0(1.0, &params(0.0, 1.0)).unwrap();
        assert!((f.im - 1.0 * f.norm_sqr()).abs() < 1e-15);

        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let k = 10f64.powf(rng.gen_range(-3.0..3.0));
            let p = params(rng.gen_range(-5.0..5.0), rng.gen_range(0.0..5.0));
            let f = f0(k, &p).unwrap();
            let lhs = f.im;
            let rhs = k * f.norm_sqr();
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()),
                "optical theorem broken at k = {k}, p = {p:?}"
            );
        }
    }

    #[test]
    fn dimer_kappa_closed_forms() {
        assert!((dimer_kappa(&params(0.5, 0.0)).unwrap() - 0.5).abs() < 1e-15);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((dimer_kappa(&params(1.0, 1.0)).unwrap() - golden).abs() < 1e-15);
        assert!(matches!(
            dimer_kappa(&params(-1.0, 1.0)),
            Err(Error::NoBoundState { .. })
        ));
        assert!(matches!(
            dimer_kappa(&params(0.0, 1.0)),
            Err(Error::NoBoundState { .. })
        ));
    }

    #[test]
    fn pole_condition_on_imaginary_axis() {
        for (inv_a, r_star) in [(1.0, 1.0), (2.0, 0.25), (0.3, 3.0), (2.0, 0.0)] {
            let p = params(inv_a, r_star);
            let kappa = dimer_kappa(&p).unwrap();
            assert!(
                inverse_f0_imag_axis(kappa, &p).abs() <= 1e-12 * inv_a.max(1.0),
                "pole condition violated for {p:?}"
            );
        }
    }

    #[test]
    fn dimer_observables_reference_point() {
        let sol = dimer_observables(&params(1.0, 1.0)).unwrap();
        let kappa = (5f64.sqrt() - 1.0) / 2.0;
        assert!((sol.kappa - kappa).abs() < 1e-15);
        assert!((sol.energy + kappa * kappa).abs() < 1e-15);
        // n_mol = 2 kappa/(1 + 2 kappa) = 0.5527864...
        assert!((sol.n_mol - 0.5527864045000421).abs() < 1e-12);
        // c4 = 8 pi n_mol = 13.8930...
        assert!((sol.c4 - 8.0 * PI * sol.n_mol).abs() < 1e-12);
        assert!((sol.c4 - 13.893037964).abs() < 1e-6);
        assert!((sol.c6 + 2.0 * kappa * kappa * sol.c4).abs() < 1e-12);
    }

    #[test]
    fn molecule_number_vanishes_with_r_star() {
        // Leading order n_mol -> 2 kappa R* as kappa R* -> 0.
        let p = params(1.0, 1e-6);
        let sol = dimer_observables(&p).unwrap();
        let lead = 2.0 * sol.kappa * p.r_star;
        assert!((sol.n_mol - lead).abs() < 3.0 * lead * lead);
    }

    #[test]
    fn zero_r_star_observables_rejected() {
        assert!(matches!(
            dimer_observables(&params(1.0, 0.0)),
            Err(Error::RStarRequired(_))
        ));
    }

    #[test]
    fn contact_identity_on_parameter_grid() {
        // c4 R* = 8 pi n_mol, algebraic identity guarded against regression.
        for i in 0..10 {
            for j in 0..10 {
                let inv_a = 0.1 + 0.5 * i as f64;
                let r_star = 0.1 + 0.4 * j as f64;
                let sol = dimer_observables(&params(inv_a, r_star)).unwrap();
                let lhs = sol.c4 * r_star;
                let rhs = 8.0 * PI * sol.n_mol;
                assert!((lhs - rhs).abs() <= 1e-12 * rhs);
            }
        }
    }

    /// Independent normalization oracle for the derived molecule number:
    /// quadrature of the open-channel norm against the bare molecule weight.
    #[test]
    fn molecule_number_from_two_channel_normalization() {
        let p = params(1.0, 1.0);
        let kappa = dimer_kappa(&p).unwrap();
        let grid = build_log_gauss_grid(520, 1e-6 * kappa, 1e9 * kappa).unwrap();
        // Open-channel weight 2 Lambda^2 J2 with J2 = ∫ d^3k/(2pi)^3 (k^2+kappa^2)^{-2}.
        let j2 = grid.integrate(|k| {
            let d = k * k + kappa * kappa;
            k * k / (d * d)
        }) / (2.0 * PI * PI);
        let open_weight = 2.0 * (2.0 * PI / p.r_star) * j2;
        let n_mol_oracle = 1.0 / (1.0 + open_weight);
        let sol = dimer_observables(&p).unwrap();
        assert!(
            (sol.n_mol - n_mol_oracle).abs() < 1e-8,
            "normalization oracle disagrees: {} vs {}",
            sol.n_mol,
            n_mol_oracle
        );
        // And the momentum distribution integrates to 2 - 2 n_mol.
        let norm = grid.integrate(|k| k * k * dimer_nk(k, &p).unwrap()) / (2.0 * PI * PI);
        assert!((norm - (2.0 - 2.0 * sol.n_mol)).abs() < 1e-8);
    }

    #[test]
    fn dimer_nk_reference_values() {
        let p = params(1.0, 1.0);
        let sol = dimer_observables(&p).unwrap();
        let kappa = sol.kappa;
        // Normalization: ∫ d^3k/(2pi)^3 n_k = c4/(8 pi kappa) = 2 - 2 n_mol.
        // The integrand tail is c4/k^2, so the cutoff sits at 1e9.
        let grid = build_log_gauss_grid(500, 1e-5, 1e9).unwrap();
        let norm = grid.integrate(|k| k * k * dimer_nk(k, &p).unwrap()) / (2.0 * PI * PI);
        assert!((norm - 0.8944271909999159).abs() < 1e-8);
        // k = 0 value.
        assert!((dimer_nk(0.0, &p).unwrap() - sol.c4 / kappa.powi(4)).abs() < 1e-12);
        // Tail: k^4 n_k -> c4 with deviation 2 kappa^2/k^2 + O(1/k^4).
        let k = 1e3 * kappa;
        let tail = k.powi(4) * dimer_nk(k, &p).unwrap();
        assert!((tail / sol.c4 - 1.0).abs() < 2.5e-6);
        let k = 2e3 * kappa;
        let tail = k.powi(4) * dimer_nk(k, &p).unwrap();
        assert!((tail / sol.c4 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn dimer_nk_works_at_zero_range() {
        // R* = 0: no molecules, ∫ n_k = 2 exactly.
        let p = params(0.7, 0.0);
        let grid = build_log_gauss_grid(500, 1e-5, 1e9).unwrap();
        let norm = grid.integrate(|k| k * k * dimer_nk(k, &p).unwrap()) / (2.0 * PI * PI);
        assert!((norm - 2.0).abs() < 1e-8);
    }

    #[test]
    fn f_eps_monotone_convergence_to_f0() {
        let k = 1.0;
        let f_zero_range = f0(k, &params(0.0, 1.0)).unwrap();
        let mut previous = f64::INFINITY;
        for eps in [0.1, 0.05, 0.025] {
            let p = ResonanceParams::with_cutoff(0.0, 1.0, eps);
            let f = f_eps(k, &p).unwrap();
            let rel = (f - f_zero_range).norm() / f_zero_range.norm();
            assert!(
                rel < previous,
                "|f_eps - f0|/|f0| not decreasing at eps = {eps}: {rel} vs {previous}"
            );
            previous = rel;
        }
        assert!(previous < 0.05);
    }

    #[test]
    fn f_eps_regularized_optical_theorem() {
        // Im f_eps = k e^{-k^2 eps^2} |f_eps|^2 at the regularized level.
        for (k, eps) in [(1.0, 0.1), (0.5, 0.2), (2.0, 0.05)] {
            let p = ResonanceParams::with_cutoff(0.0, 1.0, eps);
            let f = f_eps(k, &p).unwrap();
            let expected = k * (-k * k * eps * eps).exp() * f.norm_sqr();
            assert!(
                (f.im - expected).abs() <= 1e-8 * expected.abs(),
                "regularized optical theorem broken at k = {k}, eps = {eps}"
            );
        }
    }

    /// Oracle for the real part of the loop integral: Dawson-function route,
    /// with the Dawson integral evaluated by direct quadrature.
    ///
    /// Re I = (1/(sqrt(2) pi^{3/2} eps)) (x F(x) - 1/2), x = k eps / sqrt(2),
    /// F(x) = e^{-x^2} ∫_0^x e^{t^2} dt.
    #[test]
    fn f_eps_matches_independent_loop_evaluation() {
        for (k, eps) in [(1.0f64, 0.1f64), (0.3, 0.4), (2.0, 0.05)] {
            let p = ResonanceParams::with_cutoff(0.0, 1.0, eps);
            let derived = TwoChannelDerived::from_params(&p).unwrap();
            let x = k * eps / std::f64::consts::SQRT_2;
            let dawson = (-x * x).exp() * gauss_panels(0.0, x, 24, 8, |t| (t * t).exp());
            let re_loop_oracle =
                (x * dawson - 0.5) / (std::f64::consts::SQRT_2 * PI.powf(1.5) * eps);
            let chi_sq = (-0.5 * k * k * eps * eps).exp();
            let inv_f_re_oracle = 4.0
                * PI
                * chi_sq
                * ((derived.e_mol - k * k) / (2.0 * derived.lambda * derived.lambda)
                    + re_loop_oracle);
            let f = f_eps(k, &p).unwrap();
            let inv_f_re = (f.inv()).re;
            assert!(
                (inv_f_re - inv_f_re_oracle).abs() <= 1e-8 * inv_f_re_oracle.abs(),
                "loop quadrature disagrees with Dawson oracle at k = {k}, eps = {eps}: {inv_f_re} vs {inv_f_re_oracle}"
            );
        }
    }

    #[test]
    fn f_eps_at_zero_momentum_is_minus_a() {
        // The Gaussian cutoff drops out of f_eps(0) entirely.
        for eps in [0.1, 0.05] {
            let p = ResonanceParams::with_cutoff(1.0, 1.0, eps);
            let f = f_eps(0.0, &p).unwrap();
            assert!((f.re + 1.0).abs() < 1e-9, "f_eps(0) = {f} at eps = {eps}");
            assert!(f.im.abs() < 1e-12);
        }
    }

    #[test]
    fn f_eps_requires_positive_epsilon() {
        assert_eq!(f_eps(1.0, &params(1.0, 1.0)), Err(Error::EpsilonZero));
    }

    #[test]
    fn two_channel_matching_values() {
        let p = ResonanceParams::with_cutoff(2.0, 0.5, 0.1);
        let derived = TwoChannelDerived::from_params(&p).unwrap();
        let e_mol = (std::f64::consts::SQRT_2 / (0.1 * PI.sqrt()) - 2.0) / 0.5;
        assert!((derived.e_mol - e_mol).abs() < 1e-12 * e_mol);
        assert!((derived.lambda - (2.0 * PI / 0.5).sqrt()).abs() < 1e-14);
        // The bare molecular energy blows up as the cutoff range shrinks.
        let tighter = ResonanceParams::with_cutoff(2.0, 0.5, 0.05);
        assert!(TwoChannelDerived::from_params(&tighter).unwrap().e_mol > derived.e_mol);
    }

    #[test]
    fn dimer_energy_relation_residual_small() {
        let grid = build_log_gauss_grid(360, 1e-4, 1e3).unwrap();
        for (inv_a, r_star) in [(1.0, 1.0), (0.5, 0.5), (2.0, 0.25)] {
            let resid = energy_relation_residual_dimer(&params(inv_a, r_star), &grid).unwrap();
            assert!(
                resid.abs() <= 1e-6,
                "energy relation residual {resid:e} at 1/a = {inv_a}, R* = {r_star}"
            );
        }
    }

    #[test]
    fn dimer_energy_relation_truncation_diagnostics() {
        // Shrinking the coverage degrades the residual smoothly.
        let p = params(1.0, 1.0);
        let wide = build_log_gauss_grid(360, 1e-4, 1e4).unwrap();
        let mid = build_log_gauss_grid(240, 1e-4, 1e2).unwrap();
        let narrow = build_log_gauss_grid(160, 1e-4, 1e1).unwrap();
        let r_wide = energy_relation_residual_dimer(&p, &wide).unwrap().abs();
        let r_mid = energy_relation_residual_dimer(&p, &mid).unwrap().abs();
        let r_narrow = energy_relation_residual_dimer(&p, &narrow).unwrap().abs();
        assert!(r_wide < r_mid && r_mid < r_narrow, "{r_wide} {r_mid} {r_narrow}");
        assert!(r_wide < 1e-7);
    }
}
