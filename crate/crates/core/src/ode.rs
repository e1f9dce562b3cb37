//! Explicit Runge-Kutta integration of `ẋ = f(t, x)` and of the variational
//! equation `Ẏ = J_f(t, x(t)) Y`, `Y(0) = I`.

use std::fmt;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::system::System;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Classical fourth-order scheme with a fixed step.
    Rk4 { step: f64 },
    /// Dormand-Prince 5(4) with local error control.
    Dopri5,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    /// Cap on accepted plus rejected steps.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Dopri5,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_step: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(step: f64) -> Self {
        Self { method: Method::Rk4 { step }, ..Self::default() }
    }

    pub fn dopri5(abs_tol: f64, rel_tol: f64) -> Self {
        Self { method: Method::Dopri5, abs_tol, rel_tol, ..Self::default() }
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::arg("integrator tolerances must be positive"));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::arg("max_step must be positive"));
        }
        if let Method::Rk4 { step } = self.method {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::arg(format!("fixed step {step} must be positive and finite")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::arg("max_steps must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub config: IntegratorConfig,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn final_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    pub fn final_state(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    /// CSV with header `t,x1,...,xn`, one row per accepted step.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header = String::from("t");
        for i in 1..=self.dim() {
            header.push_str(&format!(",x{i}"));
        }
        writeln!(out, "{header}")?;
        for (t, x) in self.times.iter().zip(&self.states) {
            let mut line = format_sig(*t);
            for v in x {
                line.push(',');
                line.push_str(&format_sig(*v));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Shortest decimal rendering with 15 significant digits, switching to
/// exponent notation outside `[1e-5, 1e15)`.
pub fn format_sig(v: f64) -> String {
    const DIGITS: i32 = 15;
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A failed integration together with the steps accepted before failure.
#[derive(Clone, Debug)]
pub struct IntegrationFailure {
    pub message: String,
    pub partial: Trajectory,
}

impl fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (stopped at t = {})",
            self.message,
            self.partial.final_time().unwrap_or(f64::NAN)
        )
    }
}

impl std::error::Error for IntegrationFailure {}

impl From<IntegrationFailure> for Error {
    fn from(e: IntegrationFailure) -> Self {
        Error::numerical(e.to_string())
    }
}

pub type IntegrationResult<T> = std::result::Result<T, IntegrationFailure>;

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for &(c, k) in terms {
        if c != 0.0 {
            for (o, v) in out.iter_mut().zip(k) {
                *o += h * c * v;
            }
        }
    }
    out
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

// Dormand-Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between the fifth- and fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates a raw right-hand side on `[t0, t1]`, recording every accepted
/// step.
pub fn integrate_rhs<F>(
    rhs: F,
    y0: &[f64],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> IntegrationResult<Trajectory>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let (t0, t1) = t_span;
    let empty = Trajectory { times: Vec::new(), states: Vec::new(), config: *cfg };
    let fail = |message: String, partial: Trajectory| Err(IntegrationFailure { message, partial });
    if let Err(e) = cfg.validate() {
        return fail(e.to_string(), empty);
    }
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return fail(format!("time span [{t0}, {t1}] must be finite and increasing"), empty);
    }
    if !finite(y0) {
        return fail("initial state is not finite".into(), empty);
    }
    let mut traj = Trajectory { times: vec![t0], states: vec![y0.to_vec()], config: *cfg };
    let mut t = t0;
    let mut y = y0.to_vec();
    let span = t1 - t0;

    match cfg.method {
        Method::Rk4 { step } => {
            let h_nominal = step.min(cfg.max_step);
            let steps = ((span / h_nominal) - 1e-9).ceil().max(1.0) as usize;
            if steps > cfg.max_steps {
                return fail(format!("{steps} fixed steps exceed max_steps"), traj);
            }
            for i in 0..steps {
                let t_next = if i + 1 == steps { t1 } else { t0 + (i + 1) as f64 * h_nominal };
                let h = t_next - t;
                let k1 = rhs(t, &y);
                let k2 = rhs(t + 0.5 * h, &axpy(&y, h, &[(0.5, &k1)]));
                let k3 = rhs(t + 0.5 * h, &axpy(&y, h, &[(0.5, &k2)]));
                let k4 = rhs(t + h, &axpy(&y, h, &[(1.0, &k3)]));
                let y_next = axpy(&y, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]);
                if !finite(&y_next) {
                    return fail(format!("non-finite state after step to t = {t_next}"), traj);
                }
                t = t_next;
                y = y_next;
                traj.times.push(t);
                traj.states.push(y.clone());
            }
            Ok(traj)
        }
        Method::Dopri5 => {
            let scale = |a: &[f64], b: &[f64], i: usize| cfg.abs_tol + cfg.rel_tol * a[i].abs().max(b[i].abs());
            let mut k1 = rhs(t, &y);
            if !finite(&k1) {
                return fail("vector field is not finite at the initial state".into(), traj);
            }
            let mut h = {
                let n = y.len().max(1) as f64;
                let d0 = (y.iter().enumerate().map(|(i, v)| (v / scale(&y, &y, i)).powi(2)).sum::<f64>() / n).sqrt();
                let d1 = (k1.iter().enumerate().map(|(i, v)| (v / scale(&y, &y, i)).powi(2)).sum::<f64>() / n).sqrt();
                let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
                h0.min(cfg.max_step).min(span)
            };
            let mut attempts = 0usize;
            while t < t1 {
                attempts += 1;
                if attempts > cfg.max_steps {
                    return fail(format!("exceeded {} steps", cfg.max_steps), traj);
                }
                let last = t + h >= t1;
                if last {
                    h = t1 - t;
                }
                if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                    return fail(format!("step size underflow (h = {h:e})"), traj);
                }
                let k2 = rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
                let k3 = rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
                let k4 = rhs(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
                let k5 = rhs(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
                let k6 = rhs(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
                let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
                let k7 = rhs(t + h, &y_new);
                let err_vec = axpy(
                    &vec![0.0; y.len()],
                    h,
                    &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
                );
                let err = if y.is_empty() {
                    0.0
                } else {
                    (err_vec
                        .iter()
                        .enumerate()
                        .map(|(i, e)| (e / scale(&y, &y_new, i)).powi(2))
                        .sum::<f64>()
                        / y.len() as f64)
                        .sqrt()
                };
                if !err.is_finite() || !finite(&y_new) || !finite(&k7) {
                    // reject and retry with a much smaller step
                    h *= 0.1;
                    continue;
                }
                let factor = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
                if err <= 1.0 {
                    t = if last { t1 } else { t + h };
                    y = y_new;
                    k1 = k7;
                    traj.times.push(t);
                    traj.states.push(y.clone());
                    h = (h * factor).min(cfg.max_step);
                } else {
                    h *= factor.min(1.0);
                }
            }
            Ok(traj)
        }
    }
}

fn check_start(sys: &dyn System, x0: &[f64]) -> Result<()> {
    if x0.len() != sys.dim() {
        return Err(Error::arg(format!(
            "initial state has length {}, system dimension is {}",
            x0.len(),
            sys.dim()
        )));
    }
    Ok(())
}

fn arg_failure(e: Error, cfg: &IntegratorConfig) -> IntegrationFailure {
    IntegrationFailure {
        message: e.to_string(),
        partial: Trajectory { times: Vec::new(), states: Vec::new(), config: *cfg },
    }
}

/// Solves `ẋ = f(t, x)`, `x(t0) = x0`.
pub fn integrate(
    sys: &dyn System,
    x0: &[f64],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> IntegrationResult<Trajectory> {
    check_start(sys, x0).map_err(|e| arg_failure(e, cfg))?;
    integrate_rhs(|t, x| sys.vector_field(t, x), x0, t_span, cfg)
}

/// A trajectory with the fundamental matrix `Y(t)` of the variational
/// equation at every grid time.
#[derive(Clone, Debug)]
pub struct VariationalSolution {
    pub trajectory: Trajectory,
    pub fundamentals: Vec<Matrix>,
}

/// Jointly integrates `ẋ = f(t, x)` and `Ẏ = J_f(t, x) Y` with `Y(t0) = I`.
/// Error control covers the `n + n²` augmented state.
pub fn integrate_variational(
    sys: &dyn System,
    x0: &[f64],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> IntegrationResult<VariationalSolution> {
    check_start(sys, x0).map_err(|e| arg_failure(e, cfg))?;
    let n = sys.dim();
    let mut z0 = x0.to_vec();
    for i in 0..n {
        for j in 0..n {
            z0.push(if i == j { 1.0 } else { 0.0 });
        }
    }
    let rhs = |t: f64, z: &[f64]| {
        let (x, y) = z.split_at(n);
        let mut dz = sys.vector_field(t, x);
        let jac = sys.jacobian(t, x);
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n).map(|l| jac[(i, l)].re * y[l * n + j]).sum();
                dz.push(v);
            }
        }
        dz
    };
    let split = |aug: Trajectory| {
        let fundamentals = aug
            .states
            .iter()
            .map(|z| {
                let data: Vec<f64> = z[n..].to_vec();
                Matrix::from_fn(n, n, |i, j| data[i * n + j].into())
            })
            .collect();
        let trajectory = Trajectory {
            times: aug.times,
            states: aug.states.into_iter().map(|mut z| {
                z.truncate(n);
                z
            }).collect(),
            config: aug.config,
        };
        VariationalSolution { trajectory, fundamentals }
    };
    match integrate_rhs(rhs, &z0, t_span, cfg) {
        Ok(aug) => Ok(split(aug)),
        Err(IntegrationFailure { message, partial }) => {
            Err(IntegrationFailure { message, partial: split(partial).trajectory })
        }
    }
}

/// `max ‖f(t, x(t))‖∞` over the grid points in the final 1% of the horizon.
pub fn terminal_residual(sys: &dyn System, traj: &Trajectory) -> Result<f64> {
    let (Some(&t_start), Some(&t_end)) = (traj.times.first(), traj.times.last()) else {
        return Err(Error::arg("empty trajectory"));
    };
    let cutoff = t_end - 0.01 * (t_end - t_start);
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .filter(|(t, _)| **t >= cutoff)
        .map(|(&t, x)| sys.vector_field(t, x).iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .fold(0.0, f64::max))
}

pub const EQUILIBRIUM_TOL: f64 = 1e-6;

/// Whether the trajectory has settled: `‖f‖∞ <= 1e-6` throughout the final 1%
/// of the horizon.
pub fn reached_equilibrium(sys: &dyn System, traj: &Trajectory) -> Result<bool> {
    Ok(terminal_residual(sys, traj)? <= EQUILIBRIUM_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::FnSystem;

    fn decay() -> FnSystem {
        FnSystem::new("decay", 1, |_, x| vec![-x[0]], |_, _| Matrix::from_rows(&[[-1.0]]))
    }

    fn oscillator() -> FnSystem {
        FnSystem::new(
            "oscillator",
            2,
            |_, x| vec![x[1], -x[0]],
            |_, _| Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]),
        )
    }

    #[test]
    fn exponential_decay_adaptive() {
        let traj = integrate(&decay(), &[1.0], (0.0, 1.0), &IntegratorConfig::default()).unwrap();
        assert_eq!(traj.final_time(), Some(1.0));
        assert!((traj.final_state().unwrap()[0] - (-1.0f64).exp()).abs() < 1e-8);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn exponential_decay_fixed_step() {
        let traj = integrate(&decay(), &[1.0], (0.0, 1.0), &IntegratorConfig::rk4(0.01)).unwrap();
        assert_eq!(traj.len(), 101);
        assert!((traj.final_state().unwrap()[0] - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn oscillator_energy_drift() {
        let cfg = IntegratorConfig::dopri5(1e-10, 1e-10);
        let traj = integrate(&oscillator(), &[1.0, 0.0], (0.0, 100.0), &cfg).unwrap();
        let drift = traj
            .states
            .iter()
            .map(|x| (x[0] * x[0] + x[1] * x[1] - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(drift < 1e-7, "energy drift {drift:e}");
    }

    #[test]
    fn rk4_fourth_order() {
        let sys = oscillator();
        let reference =
            integrate(&sys, &[1.0, 0.0], (0.0, 2.0), &IntegratorConfig::dopri5(1e-13, 1e-13)).unwrap();
        let xr = reference.final_state().unwrap().to_vec();
        let err = |h: f64| {
            let tr = integrate(&sys, &[1.0, 0.0], (0.0, 2.0), &IntegratorConfig::rk4(h)).unwrap();
            let x = tr.final_state().unwrap();
            ((x[0] - xr[0]).powi(2) + (x[1] - xr[1]).powi(2)).sqrt()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }

    #[test]
    fn variational_matches_exponential() {
        let sys = oscillator();
        let sol = integrate_variational(&sys, &[1.0, 0.0], (0.0, 1.5), &IntegratorConfig::default()).unwrap();
        let y = sol.fundamentals.last().unwrap();
        let (c, s) = (1.5f64.cos(), 1.5f64.sin());
        let expect = Matrix::from_rows(&[[c, s], [-s, c]]);
        assert!(y.max_abs_diff(&expect) < 1e-8);
        assert_eq!(sol.fundamentals.len(), sol.trajectory.len());
        assert_eq!(sol.trajectory.dim(), 2);
    }

    #[test]
    fn blow_up_reports_partial_trajectory() {
        let sys = FnSystem::new("blowup", 1, |_, x| vec![x[0] * x[0]], |_, x| Matrix::from_rows(&[[2.0 * x[0]]]));
        let err = integrate(&sys, &[1.0], (0.0, 2.0), &IntegratorConfig::default()).unwrap_err();
        assert!(!err.partial.is_empty());
        assert!(err.partial.final_time().unwrap() < 1.0 + 1e-3);
    }

    #[test]
    fn bad_span_and_config() {
        let cfg = IntegratorConfig::default();
        assert!(integrate(&decay(), &[1.0], (1.0, 1.0), &cfg).is_err());
        assert!(integrate(&decay(), &[1.0, 2.0], (0.0, 1.0), &cfg).is_err());
        let bad = IntegratorConfig { abs_tol: 0.0, ..cfg };
        assert!(integrate(&decay(), &[1.0], (0.0, 1.0), &bad).is_err());
    }

    #[test]
    fn csv_layout() {
        let traj = Trajectory {
            times: vec![0.0, 0.5],
            states: vec![vec![1.0, -2.0], vec![0.1, 1.0 / 3.0]],
            config: IntegratorConfig::default(),
        };
        let csv = traj.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,x1,x2");
        assert_eq!(lines[1], "0,1,-2");
        assert_eq!(lines[2], "0.5,0.1,0.333333333333333");
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(1234.5), "1234.5");
        assert_eq!(format_sig(1e-7), "1e-7");
        assert_eq!(format_sig(-2.5e20), "-2.5e20");
        assert_eq!(format_sig(std::f64::consts::PI), "3.14159265358979");
    }

    #[test]
    fn equilibrium_detection() {
        let cfg = IntegratorConfig::default();
        let traj = integrate(&decay(), &[1.0], (0.0, 30.0), &cfg).unwrap();
        assert!(reached_equilibrium(&decay(), &traj).unwrap());
        let short = integrate(&decay(), &[1.0], (0.0, 1.0), &cfg).unwrap();
        assert!(!reached_equilibrium(&decay(), &short).unwrap());
    }
}
