//! Control schedules driven by the mean gap: `du/dt = -eps * gap_sq(u)`,
//! `u(0) = 1`, run until `u` reaches 0.

use super::gap::GapProfile;
use super::interp::MonotoneCubic;
use crate::error::{Error, Result};

/// Step control for the schedule ODE.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest change of `u` allowed in one accepted step; keeps the
    /// tabulated schedule dense.
    pub max_du: f64,
    /// Integration stops once `u` falls to this level.
    pub terminal_u: f64,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-12,
            max_du: 2e-3,
            terminal_u: 1e-12,
        }
    }
}

/// Tabulated control function `u(t)` on `[0, T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    times: Vec<f64>,
    u_values: Vec<f64>,
    epsilon: f64,
    curve: MonotoneCubic,
}

impl Schedule {
    /// Checks `times` start at 0 and increase, and `u` is nonincreasing in [0, 1].
    /// Between samples `u` is interpolated monotonically.
    pub fn from_samples(times: Vec<f64>, u_values: Vec<f64>, epsilon: f64) -> Result<Self> {
        Self::validate(&times, &u_values, epsilon)?;
        let curve = MonotoneCubic::new(&times, &u_values)?;
        Ok(Self {
            times,
            u_values,
            epsilon,
            curve,
        })
    }

    fn with_slopes(times: Vec<f64>, u_values: Vec<f64>, slopes: &[f64], epsilon: f64) -> Result<Self> {
        Self::validate(&times, &u_values, epsilon)?;
        let curve = MonotoneCubic::with_slopes(&times, &u_values, slopes)?;
        Ok(Self {
            times,
            u_values,
            epsilon,
            curve,
        })
    }

    fn validate(times: &[f64], u_values: &[f64], epsilon: f64) -> Result<()> {
        if times.len() < 2 || times.len() != u_values.len() {
            return Err(Error::InvalidDimension(format!(
                "schedule needs >= 2 matching samples (got {} times, {} values)",
                times.len(),
                u_values.len()
            )));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("schedule times must start at 0 and increase".into()));
        }
        if u_values.iter().any(|u| !(0.0..=1.0).contains(u)) || u_values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter("schedule u must be nonincreasing within [0, 1]".into()));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("precision level {epsilon} must be positive")));
        }
        Ok(())
    }

    /// Holds `u` fixed for `duration`.
    pub fn constant(u: f64, duration: f64) -> Result<Self> {
        Self::from_samples(vec![0.0, duration], vec![u, u], 1.0)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn u_values(&self) -> &[f64] {
        &self.u_values
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Annealing time `T`.
    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// `u(t)`, clamped to `[0, 1]`.
    pub fn u_at(&self, t: f64) -> f64 {
        self.curve.eval(t).clamp(0.0, 1.0)
    }
}

fn check_inputs(profile: &GapProfile, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("precision level {epsilon} must be positive")));
    }
    if let Some(g) = profile.gap_sq().iter().find(|g| !(**g > 0.0)) {
        return Err(Error::InvalidProfile(format!("nonpositive squared gap {g}")));
    }
    Ok(())
}

// Dormand–Prince 5(4) tableau; the right-hand side is autonomous, so no nodes
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step of the autonomous scalar ODE; returns the fifth-
/// order value and the embedded error estimate.
fn dopri_step(f: &impl Fn(f64) -> f64, u: f64, h: f64) -> (f64, f64) {
    let mut k = [0.0; 7];
    for s in 0..7 {
        let mut y = u;
        for (a, kj) in A[s].iter().zip(&k).take(s) {
            y += h * a * kj;
        }
        k[s] = f(y);
    }
    let y5 = u + h * B5.iter().zip(&k).map(|(b, k)| b * k).sum::<f64>();
    let y4 = u + h * B4.iter().zip(&k).map(|(b, k)| b * k).sum::<f64>();
    (y5, (y5 - y4).abs())
}

/// Integrates the schedule ODE with adaptive Dormand–Prince steps. The last
/// sample is placed where `u` hits zero.
pub fn solve_schedule(profile: &GapProfile, epsilon: f64, opts: &ScheduleOptions) -> Result<Schedule> {
    check_inputs(profile, epsilon)?;
    let gap = profile.interpolant();
    let rate = |u: f64| -epsilon * gap.eval(u.clamp(0.0, 1.0));

    let (mut t, mut u) = (0.0, 1.0);
    let mut times = vec![t];
    let mut us = vec![u];
    let mut h = opts.max_du / -rate(u);
    for _ in 0..10_000_000 {
        h = h.min(opts.max_du / -rate(u));
        let (u_new, err) = dopri_step(&rate, u, h);
        let scale = opts.atol + opts.rtol * u.abs().max(u_new.abs());
        let ratio = err / scale;
        if ratio > 1.0 {
            h *= (0.9 * ratio.powf(-0.2)).max(0.2);
            continue;
        }
        if u_new <= opts.terminal_u {
            // bisect the step length so the last step lands on u = 0
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let (um, _) = dopri_step(&rate, u, mid);
                if um > opts.terminal_u {
                    lo = mid;
                } else if um < 0.0 {
                    hi = mid;
                } else {
                    hi = mid;
                    break;
                }
                if hi - lo <= f64::EPSILON * (t + hi) {
                    break;
                }
            }
            times.push(t + hi);
            us.push(0.0);
            let slopes: Vec<f64> = us.iter().map(|&v| rate(v)).collect();
            return Schedule::with_slopes(times, us, &slopes, epsilon);
        }
        t += h;
        u = u_new;
        times.push(t);
        us.push(u);
        h *= (0.9 * ratio.max(1e-10).powf(-0.2)).min(5.0);
    }
    Err(Error::Integration("schedule ODE did not reach u = 0".into()))
}

/// `T = (1/eps) * integral_0^1 du / gap_sq(u)` by adaptive Simpson
/// quadrature on each grid interval of the interpolated profile.
pub fn annealing_time(profile: &GapProfile, epsilon: f64) -> Result<f64> {
    check_inputs(profile, epsilon)?;
    let gap = profile.interpolant();
    let f = |u: f64| 1.0 / gap.eval(u);
    let (grid, _) = gap.nodes();
    let total: f64 = grid
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let m = 0.5 * (a + b);
            let (fa, fm, fb) = (f(a), f(m), f(b));
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            adaptive_simpson(&f, a, b, fa, fm, fb, whole, 1e-13 * whole.abs(), 40)
        })
        .sum();
    Ok(total / epsilon)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
