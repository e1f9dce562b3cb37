//! Sampled α-contraction certificates, the minimal contraction order α*,
//! generalized Jacobians under a metric `Θ(x)`, contraction integrals along
//! trajectories, and singular-value bounds on Hausdorff dimension.

use rayon::prelude::*;

use crate::alpha::{alpha_mult_compound, AlphaIndex};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, singular_values};
use crate::matrix::Matrix;
use crate::measure::{alpha_measure, MeasureNorm};
use crate::ode::Trajectory;
use crate::system::{SampleSet, System};

/// A maximum measure closer to zero than this proves nothing either way.
pub const INCONCLUSIVE_MARGIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

impl Verdict {
    fn from_max(max: f64) -> Self {
        if max.abs() < INCONCLUSIVE_MARGIN {
            Verdict::Inconclusive
        } else if max < 0.0 {
            Verdict::Certified
        } else {
            Verdict::Refuted
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Measure value at one `(t, x)` sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionCertificate {
    pub alpha: AlphaIndex,
    pub p: MeasureNorm,
    /// `-max` over the samples; positive exactly when certified.
    pub eta: f64,
    pub sample_count: usize,
    pub time_count: usize,
    /// Grid spacing per axis when the states came from a uniform grid.
    pub spacing: Option<Vec<f64>>,
    /// Whether the generalized Jacobian under `Θ` was used.
    pub scaled: bool,
    pub worst: SamplePoint,
    pub verdict: Verdict,
}

impl ContractionCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn max_measure(&self) -> f64 {
        self.worst.value
    }
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(", "))
}

/// Directional derivative of `Θ` along `f`, by central differences.
fn scaling_rate_fd(sys: &dyn System, t: f64, x: &[f64]) -> Matrix {
    let f = sys.vector_field(t, x);
    let n = x.len();
    let fmax = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if fmax == 0.0 {
        return Matrix::zeros(n, n);
    }
    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let h = 1e-6 * (1.0 + xmax) / fmax;
    let shift = |sign: f64| -> Vec<f64> { x.iter().zip(&f).map(|(a, b)| a + sign * h * b).collect() };
    match (sys.scaling(&shift(1.0)), sys.scaling(&shift(-1.0))) {
        (Some(plus), Some(minus)) => (&plus - &minus).scale(0.5 / h),
        _ => Matrix::zeros(n, n),
    }
}

/// `J̄ = Θ_f Θ⁻¹ + Θ J_f Θ⁻¹`; just `J_f` when the system has no metric.
pub fn generalized_jacobian(sys: &dyn System, x: &[f64], t: f64) -> Result<Matrix> {
    let n = sys.dim();
    if x.len() != n {
        return Err(Error::arg(format!("state has length {}, system dimension is {n}", x.len())));
    }
    let jac = sys.jacobian(t, x);
    let Some(theta) = sys.scaling(x) else {
        return Ok(jac);
    };
    if theta.shape() != (n, n) {
        return Err(Error::arg(format!("metric is {}x{}, expected {n}x{n}", theta.rows(), theta.cols())));
    }
    let inv = theta
        .inverse()
        .map_err(|_| Error::domain(format!("metric Θ is singular at x = {}", fmt_point(x))))?;
    let rate = sys.scaling_rate(t, x).unwrap_or_else(|| scaling_rate_fd(sys, t, x));
    let lhs = &rate * &inv;
    let rhs = &(&theta * &jac) * &inv;
    Ok(&lhs + &rhs)
}

fn check_samples(sys: &dyn System, samples: &SampleSet, t_grid: &[f64]) -> Result<()> {
    let n = sys.dim();
    if samples.dim() != n {
        return Err(Error::arg(format!("samples have dimension {}, system has {n}", samples.dim())));
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::arg("time grid must be a non-empty list of finite times"));
    }
    if let Some(domain) = sys.domain() {
        if let Some(out) = samples.points().iter().find(|x| !domain.contains(x)) {
            return Err(Error::arg(format!("sample {} lies outside the system domain", fmt_point(out))));
        }
    }
    Ok(())
}

/// `μ_p(J̄^[α])` at every `(t, x)` pair, times outer and states inner.
///
/// Samples are evaluated in parallel; the output order, and hence every
/// reduction over it, is independent of scheduling.
pub fn sample_measures(
    sys: &dyn System,
    alpha: AlphaIndex,
    p: MeasureNorm,
    samples: &SampleSet,
    t_grid: &[f64],
) -> Result<Vec<SamplePoint>> {
    check_samples(sys, samples, t_grid)?;
    alpha.check_dim(sys.dim())?;
    let pts = samples.points();
    let total = pts.len() * t_grid.len();
    let results: Vec<Result<SamplePoint>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let t = t_grid[i / pts.len()];
            let x = &pts[i % pts.len()];
            let jbar = generalized_jacobian(sys, x, t)?;
            let value = alpha_measure(&jbar, alpha, p)?;
            if !value.is_finite() {
                return Err(Error::numerical(format!("non-finite measure at x = {}", fmt_point(x))));
            }
            Ok(SamplePoint { t, x: x.clone(), value })
        })
        .collect();
    results.into_iter().collect()
}

/// Checks `μ_p(J̄^[α](t, x)) <= -η < 0` over the given states and times.
pub fn certify_alpha_contraction(
    sys: &dyn System,
    alpha: AlphaIndex,
    p: MeasureNorm,
    samples: &SampleSet,
    t_grid: &[f64],
) -> Result<ContractionCertificate> {
    let values = sample_measures(sys, alpha, p, samples, t_grid)?;
    let mut worst = &values[0];
    for v in &values[1..] {
        if v.value > worst.value {
            worst = v;
        }
    }
    Ok(ContractionCertificate {
        alpha,
        p,
        eta: -worst.value,
        sample_count: samples.len(),
        time_count: t_grid.len(),
        spacing: samples.spacing().map(<[f64]>::to_vec),
        scaled: samples.points().iter().any(|x| sys.scaling(x).is_some()),
        worst: worst.clone(),
        verdict: Verdict::from_max(worst.value),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaProbe {
    pub alpha: f64,
    pub max_measure: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSearch {
    /// Smallest order found certified; the true threshold lies in
    /// `(alpha_star - tol, alpha_star]`, or equals 1 when order 1 already
    /// certifies.
    pub alpha_star: f64,
    pub tol: f64,
    pub p: MeasureNorm,
    pub trace: Vec<AlphaProbe>,
}

/// Bisection for the least α on `[1, n]` at which the sampled certificate
/// holds. Certification is monotone in α for a fixed norm, so the predicate
/// has a single switch point once order `n` certifies.
pub fn minimal_alpha(
    sys: &dyn System,
    p: MeasureNorm,
    samples: &SampleSet,
    t_grid: &[f64],
    tol: f64,
) -> Result<AlphaSearch> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::arg(format!("bisection tolerance {tol} must be positive")));
    }
    let n = sys.dim();
    let mut trace = Vec::new();
    let probe = |a: f64, trace: &mut Vec<AlphaProbe>| -> Result<bool> {
        let cert = certify_alpha_contraction(sys, AlphaIndex::new(a)?, p, samples, t_grid)?;
        trace.push(AlphaProbe { alpha: a, max_measure: cert.max_measure(), verdict: cert.verdict });
        Ok(cert.is_certified())
    };
    if !probe(n as f64, &mut trace)? {
        let worst = trace[0].max_measure;
        return Err(Error::domain(format!(
            "no bracket: order {n} is not certified (max μ = {worst:e}), so no order in [1, {n}] is"
        )));
    }
    if n == 1 || probe(1.0, &mut trace)? {
        return Ok(AlphaSearch { alpha_star: 1.0, tol, p, trace });
    }
    let (mut lo, mut hi) = (1.0f64, n as f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if probe(mid, &mut trace)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(AlphaSearch { alpha_star: hi, tol, p, trace })
}

/// Singular-value function `σ_1 ⋯ σ_k σ_{k+1}^s`.
pub fn omega_bound(j: &Matrix, alpha: AlphaIndex) -> Result<f64> {
    if !j.is_square() {
        return Err(Error::arg(format!("ω of non-square {}x{} matrix", j.rows(), j.cols())));
    }
    alpha.check_dim(j.rows())?;
    let sv = singular_values(j)?;
    let head: f64 = sv[..alpha.k()].iter().product();
    Ok(if alpha.is_integer() { head } else { head * sv[alpha.k()].powf(alpha.s()) })
}

/// `√λ_1((J* J)^(α))`, the same quantity through the α multiplicative
/// compound of the Gram matrix. Requires non-singular `J` for fractional α.
pub fn omega_bound_via_gram(j: &Matrix, alpha: AlphaIndex) -> Result<f64> {
    if !j.is_square() {
        return Err(Error::arg(format!("ω of non-square {}x{} matrix", j.rows(), j.cols())));
    }
    let gram = &j.adjoint() * j;
    let compound = alpha_mult_compound(&gram, alpha)?;
    let top = hermitian_eigenvalues(&compound)?[0];
    Ok(top.max(0.0).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionBound {
    pub alpha: AlphaIndex,
    pub omega_max: f64,
    /// `omega_max < 1`, which bounds the Hausdorff dimension of the sampled
    /// set below α.
    pub conclusive: bool,
    pub sample_count: usize,
    pub worst_index: usize,
}

/// Douady-Oesterlé test over sampled Jacobians of a map on a negatively
/// invariant compact set. Only as strong as the sampling.
pub fn douady_oesterle_check(jacobians: &[Matrix], alpha: AlphaIndex) -> Result<DimensionBound> {
    if jacobians.is_empty() {
        return Err(Error::arg("no Jacobian samples"));
    }
    let omegas: Vec<f64> = jacobians.iter().map(|j| omega_bound(j, alpha)).collect::<Result<_>>()?;
    let mut worst_index = 0;
    for (i, w) in omegas.iter().enumerate() {
        if *w > omegas[worst_index] {
            worst_index = i;
        }
    }
    let omega_max = omegas[worst_index];
    Ok(DimensionBound {
        alpha,
        omega_max,
        conclusive: omega_max < 1.0,
        sample_count: jacobians.len(),
        worst_index,
    })
}

/// Running trapezoid integral `∫_0^{t_i} μ(J̄^[α](x(τ))) dτ` on the
/// trajectory grid, starting at 0.
pub fn contraction_profile(
    sys: &dyn System,
    traj: &Trajectory,
    alpha: AlphaIndex,
    p: MeasureNorm,
) -> Result<Vec<f64>> {
    if traj.is_empty() {
        return Err(Error::arg("empty trajectory"));
    }
    if traj.dim() != sys.dim() {
        return Err(Error::arg(format!(
            "trajectory dimension {} differs from system dimension {}",
            traj.dim(),
            sys.dim()
        )));
    }
    alpha.check_dim(sys.dim())?;
    let mu: Vec<f64> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, x)| alpha_measure(&generalized_jacobian(sys, x, t)?, alpha, p))
        .collect::<Result<_>>()?;
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(mu.len());
    out.push(0.0);
    for i in 1..mu.len() {
        acc += 0.5 * (mu[i] + mu[i - 1]) * (traj.times[i] - traj.times[i - 1]);
        out.push(acc);
    }
    Ok(out)
}

/// `∫_0^T μ(J̄^[α](x(τ))) dτ` over the whole trajectory.
pub fn contraction_integral(
    sys: &dyn System,
    traj: &Trajectory,
    alpha: AlphaIndex,
    p: MeasureNorm,
) -> Result<f64> {
    Ok(*contraction_profile(sys, traj, alpha, p)?.last().expect("non-empty profile"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowDimensionBound {
    pub alpha: AlphaIndex,
    pub p: MeasureNorm,
    pub horizon: f64,
    /// `γ(τ)`, the largest contraction integral over the trajectories.
    pub gamma: f64,
    pub trajectory_count: usize,
    /// Strong invariance of the sampled set cannot be checked numerically;
    /// the caller states it.
    pub strongly_invariant_asserted: bool,
    /// `γ(τ) < 0` and strong invariance asserted, giving `dim_H K < α`.
    pub conclusive: bool,
}

/// Dimension bound for a strongly invariant set from trajectories started
/// in it, all integrated over the same horizon `τ`.
pub fn flow_dimension_bound(
    sys: &dyn System,
    trajectories: &[Trajectory],
    alpha: AlphaIndex,
    p: MeasureNorm,
    strongly_invariant: bool,
) -> Result<FlowDimensionBound> {
    let Some(first) = trajectories.first() else {
        return Err(Error::arg("no trajectories"));
    };
    let horizon = first.final_time().ok_or_else(|| Error::arg("empty trajectory"))?
        - first.times[0];
    let mut gamma = f64::NEG_INFINITY;
    for traj in trajectories {
        let h = traj.final_time().ok_or_else(|| Error::arg("empty trajectory"))? - traj.times[0];
        if (h - horizon).abs() > 1e-9 * (1.0 + horizon.abs()) {
            return Err(Error::arg(format!("trajectories span {h} and {horizon}; horizons must match")));
        }
        gamma = gamma.max(contraction_integral(sys, traj, alpha, p)?);
    }
    Ok(FlowDimensionBound {
        alpha,
        p,
        horizon,
        gamma,
        trajectory_count: trajectories.len(),
        strongly_invariant_asserted: strongly_invariant,
        conclusive: strongly_invariant && horizon > 0.0 && gamma < 0.0,
    })
}
