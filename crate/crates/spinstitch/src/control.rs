//! The parametrized link control, its exact antiderivative, the beta/gamma
//! integrals, boundary-derivative constraints, and the scalar gamma
//! maximization that predicts optimal amplitudes without any propagation.
//!
//! The control family is a linear ramp dressed with sine harmonics:
//!
//! ```text
//! g(a, t) = t/T + sum_k a_k sin(k pi t / T),        k = 1..K
//! G(a, t) = t^2/(2T) + sum_k a_k (T / k pi) (1 - cos(k pi t / T))
//! ```
//!
//! so g(a,0) = 0 and g(a,T) = 1 hold for every amplitude vector, and the
//! antiderivative G is available in closed form. The two integrals
//!
//! ```text
//! beta_T  = integral_0^T cos(2 G(t)) dt
//! gamma_T = integral_0^T sin(2 G(t)) dt
//! ```
//!
//! drive the whole short-time analysis: maximizing gamma_T over the second
//! harmonic is what singles out the ultrafast working point.

use alloc::{vec, vec::Vec};
use core::f64::consts::PI;
// f64 math methods for no_std builds; with std the inherent methods
// shadow this trait.
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float;

use crate::error::{Error, Result};

/// Harmonic amplitudes a_1..a_K on top of the linear ramp, over a fixed
/// process time (the horizon) T.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlParams {
    amplitudes: Vec<f64>,
    horizon: f64,
}

impl ControlParams {
    pub fn new(amplitudes: Vec<f64>, horizon: f64) -> Result<Self> {
        if amplitudes.is_empty()
            || amplitudes.iter().any(|a| !a.is_finite())
            || !horizon.is_finite()
            || horizon <= 0.0
        {
            return Err(Error::BadControl);
        }
        Ok(ControlParams { amplitudes, horizon })
    }

    /// The common two-harmonic case.
    pub fn two_harmonics(a1: f64, a2: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![a1, a2], horizon)
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// g(a, t). The boundary values g(0) = 0 and g(T) = 1 are returned
    /// exactly rather than through sin(k pi), which is only zero up to
    /// rounding and would be amplified by large amplitudes.
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.value_unchecked(t))
    }

    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        if t == self.horizon {
            return 1.0;
        }
        let u = t / self.horizon;
        let mut g = u;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let k = (i + 1) as f64;
            g += a * (k * PI * u).sin();
        }
        g
    }

    /// G(a, t) = integral of g from 0 to t, in closed form.
    pub fn antiderivative(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.antiderivative_unchecked(t))
    }

    pub(crate) fn antiderivative_unchecked(&self, t: f64) -> f64 {
        let mut total = t * t / (2.0 * self.horizon);
        for (i, a) in self.amplitudes.iter().enumerate() {
            let k = (i + 1) as f64;
            total += a * (self.horizon / (k * PI)) * (1.0 - (k * PI * t / self.horizon).cos());
        }
        total
    }

    /// Upper bound on |g(a, t)| over the horizon: the ramp stays in [0, 1]
    /// and each harmonic is bounded by its amplitude.
    pub fn coupling_bound(&self) -> f64 {
        1.0 + self.amplitudes.iter().map(|a| a.abs()).sum::<f64>()
    }

    /// Node floor keeping >= 20 Simpson nodes per oscillation of
    /// sin(2G) / cos(2G), whose total turn count is at most
    /// (1 + sum|a_k|) T / pi; never below 2001 nodes, always odd.
    pub fn simpson_node_floor(&self) -> usize {
        let turns = self.coupling_bound() * self.horizon / PI;
        let n = 40 * (turns.ceil() as usize) + 1;
        force_odd(n.max(2001))
    }

    /// beta_T and gamma_T for this control, with the oscillation-aware
    /// node floor applied automatically.
    pub fn beta_gamma(&self) -> Result<(f64, f64)> {
        beta_gamma(|t| self.antiderivative_unchecked(t), self.horizon, self.simpson_node_floor())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::TimeOutOfRange { t, horizon: self.horizon });
        }
        Ok(())
    }
}

/// Two-level piecewise-constant control: g1 on [0, T/2), g2 on [T/2, T].
/// Its gamma integral has a closed form, which makes it the quadrature
/// oracle of choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsedControl {
    pub levels: (f64, f64),
    pub horizon: f64,
}

impl PulsedControl {
    pub fn value(&self, t: f64) -> f64 {
        if t < 0.5 * self.horizon {
            self.levels.0
        } else {
            self.levels.1
        }
    }

    pub fn antiderivative(&self, t: f64) -> f64 {
        let half = 0.5 * self.horizon;
        if t < half {
            self.levels.0 * t
        } else {
            self.levels.0 * half + self.levels.1 * (t - half)
        }
    }

    pub fn coupling_bound(&self) -> f64 {
        self.levels.0.abs().max(self.levels.1.abs())
    }
}

fn force_odd(n: usize) -> usize {
    if n % 2 == 0 {
        n + 1
    } else {
        n
    }
}

/// Composite-Simpson estimates of beta and gamma for an arbitrary
/// antiderivative profile G on [0, horizon]. `nodes` must be odd and at
/// least 3; it is raised to the 2001-node floor silently, since fewer nodes
/// than that never helps at these integrand costs.
pub fn beta_gamma<F: Fn(f64) -> f64>(
    g_profile: F,
    horizon: f64,
    nodes: usize,
) -> Result<(f64, f64)> {
    if nodes < 3 || nodes % 2 == 0 {
        return Err(Error::BadNodeCount { nodes });
    }
    let n = force_odd(nodes.max(2001));
    let h = horizon / (n - 1) as f64;
    let mut beta = 0.0f64;
    let mut gamma = 0.0f64;
    for i in 0..n {
        let t = i as f64 * h;
        let phase = 2.0 * g_profile(t);
        if !phase.is_finite() {
            return Err(Error::NonFiniteIntegrand { t });
        }
        let w = if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        beta += w * phase.cos();
        gamma += w * phase.sin();
    }
    Ok((beta * h / 3.0, gamma * h / 3.0))
}

/// Maximizes gamma_T over the second-harmonic amplitude with a1 fixed at
/// -pi/4, the branch on which G(T) = 0 for every T.
pub fn maximize_gamma(horizon: f64) -> (f64, f64) {
    maximize_gamma_with_a1(horizon, -PI / 4.0)
}

/// Coarse scan of a2 over [0, 10/T] followed by golden-section refinement.
/// The optimum empirically sits near 3.24/T, so the window carries a 3x
/// margin. Returns (a2_opt, gamma_max).
pub fn maximize_gamma_with_a1(horizon: f64, a1: f64) -> (f64, f64) {
    debug_assert!(horizon > 0.0 && horizon.is_finite());
    let gamma_of = |a2: f64| -> f64 {
        let p = ControlParams { amplitudes: vec![a1, a2], horizon };
        // Node floor depends on a2, so every probe re-derives it.
        p.beta_gamma().map(|(_, g)| g).unwrap_or(f64::NEG_INFINITY)
    };
    const SCAN: usize = 401;
    let hi = 10.0 / horizon;
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    let step = hi / (SCAN - 1) as f64;
    for i in 0..SCAN {
        let v = gamma_of(i as f64 * step);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut a = best_i.saturating_sub(1) as f64 * step;
    let mut b = (best_i.min(SCAN - 2) + 1) as f64 * step;
    let invphi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = gamma_of(c);
    let mut fd = gamma_of(d);
    while (b - a) > 1e-9 * b.abs().max(1.0) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = gamma_of(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = gamma_of(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, gamma_of(x))
}

/// Signed margins of the boundary-derivative conditions g'(0) > 0 and
/// g'(T) > 0. Up to a positive factor pi/T these derivatives are
///
/// ```text
/// start: 1/pi + sum_k k a_k          end: 1/pi + sum_k (-1)^k k a_k
/// ```
///
/// For K = 2 the pair is exactly the window -(1/pi + 2 a2) < a1 < 1/pi + 2 a2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintReport {
    pub satisfied: bool,
    pub margin_start: f64,
    pub margin_end: f64,
}

pub fn check_derivative_constraints(params: &ControlParams) -> ConstraintReport {
    let mut start = 1.0 / PI;
    let mut end = 1.0 / PI;
    for (i, a) in params.amplitudes().iter().enumerate() {
        let k = (i + 1) as f64;
        start += k * a;
        end += if (i + 1) % 2 == 0 { k * a } else { -k * a };
    }
    ConstraintReport { satisfied: start > 0.0 && end > 0.0, margin_start: start, margin_end: end }
}
