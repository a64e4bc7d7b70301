//! The universal Efimov channel constant `s0`.

/// Root `s0` of the three-boson channel equation
/// `8 sinh(pi s/6) = sqrt(3) s cosh(pi s/2)` together with the discrete
/// scaling factors it generates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfimovChannelRoot {
    /// Channel root, `s0 = 1.00624...`.
    pub s0: f64,
    /// Energy ratio of successive levels, `exp(2 pi / s0) = 515.03...`.
    pub energy_ratio: f64,
    /// Wavenumber ratio of successive levels, `exp(pi / s0) = 22.694...`.
    pub wavenumber_ratio: f64,
}

fn channel_function(s: f64) -> f64 {
    8.0 * (std::f64::consts::PI * s / 6.0).sinh()
        - 3f64.sqrt() * s * (std::f64::consts::PI * s / 2.0).cosh()
}

/// Solves the channel equation on `(0, 2)` by bisection.
///
/// The trivial root at `s = 0` is excluded by starting the bracket at 0.5,
/// where the channel function is still positive.
pub fn efimov_channel_root() -> EfimovChannelRoot {
    let mut lo = 0.5;
    let mut hi = 2.0;
    debug_assert!(channel_function(lo) > 0.0 && channel_function(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if channel_function(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let s0 = 0.5 * (lo + hi);
    EfimovChannelRoot {
        s0,
        energy_ratio: (2.0 * std::f64::consts::PI / s0).exp(),
        wavenumber_ratio: (std::f64::consts::PI / s0).exp(),
    }
}
