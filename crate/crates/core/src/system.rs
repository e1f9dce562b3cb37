//! Nonlinear systems `ẋ = f(t, x)` with analytic Jacobians, their state
//! domains and sample sets.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A system `ẋ = f(t, x)` on `ℝⁿ`.
///
/// Implementations must be re-entrant: sample sweeps call them from several
/// threads at once.
pub trait System: Send + Sync {
    fn dim(&self) -> usize;

    fn vector_field(&self, t: f64, x: &[f64]) -> Vec<f64>;

    /// `∂f/∂x` at `(t, x)`, an `n × n` real matrix.
    fn jacobian(&self, t: f64, x: &[f64]) -> Matrix;

    /// State region the analysis is restricted to, if any.
    fn domain(&self) -> Option<&Domain> {
        None
    }

    /// Contraction metric `Θ(x)`. `None` means `Θ ≡ I`.
    fn scaling(&self, _x: &[f64]) -> Option<Matrix> {
        None
    }

    /// `Θ_f(x)`, each entry of `Θ` differentiated along `f`. Only consulted
    /// when [`System::scaling`] returns a matrix; `None` asks the caller to
    /// approximate it by differencing `Θ` along the flow.
    fn scaling_rate(&self, _t: f64, _x: &[f64]) -> Option<Matrix> {
        None
    }
}

impl<S: System + ?Sized> System for Arc<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn vector_field(&self, t: f64, x: &[f64]) -> Vec<f64> {
        (**self).vector_field(t, x)
    }
    fn jacobian(&self, t: f64, x: &[f64]) -> Matrix {
        (**self).jacobian(t, x)
    }
    fn domain(&self) -> Option<&Domain> {
        (**self).domain()
    }
    fn scaling(&self, x: &[f64]) -> Option<Matrix> {
        (**self).scaling(x)
    }
    fn scaling_rate(&self, t: f64, x: &[f64]) -> Option<Matrix> {
        (**self).scaling_rate(t, x)
    }
}

impl<S: System + ?Sized> System for Box<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn vector_field(&self, t: f64, x: &[f64]) -> Vec<f64> {
        (**self).vector_field(t, x)
    }
    fn jacobian(&self, t: f64, x: &[f64]) -> Matrix {
        (**self).jacobian(t, x)
    }
    fn domain(&self) -> Option<&Domain> {
        (**self).domain()
    }
    fn scaling(&self, x: &[f64]) -> Option<Matrix> {
        (**self).scaling(x)
    }
    fn scaling_rate(&self, t: f64, x: &[f64]) -> Option<Matrix> {
        (**self).scaling_rate(t, x)
    }
}

const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// Axis-aligned box `lower <= x <= upper`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// An explicit finite set of states.
    Samples(Vec<Vec<f64>>),
}

impl Domain {
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::arg(format!(
                "box bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !l.is_finite() || !u.is_finite() || l > u) {
            return Err(Error::arg("box bounds must be finite with lower <= upper"));
        }
        Ok(Domain::Box { lower, upper })
    }

    /// The cube `[-r, r]ⁿ`.
    pub fn cube(n: usize, r: f64) -> Result<Self> {
        Self::boxed(vec![-r; n], vec![r; n])
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lower, .. } => lower.len(),
            Domain::Samples(pts) => pts.first().map_or(0, Vec::len),
        }
    }

    /// Membership with a small relative slack on the box faces.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            Domain::Box { lower, upper } => x.iter().zip(lower.iter().zip(upper)).all(|(&v, (&l, &u))| {
                let slack = MEMBERSHIP_TOL * (1.0 + l.abs().max(u.abs()));
                v >= l - slack && v <= u + slack
            }),
            Domain::Samples(pts) => pts.iter().any(|p| {
                p.iter().zip(x).all(|(a, b)| (a - b).abs() <= MEMBERSHIP_TOL * (1.0 + a.abs()))
            }),
        }
    }

    /// `m` points per axis for a box (corners included); the listed states
    /// for a sample domain.
    pub fn grid(&self, m: usize) -> Result<SampleSet> {
        match self {
            Domain::Box { lower, upper } => SampleSet::grid(lower, upper, m),
            Domain::Samples(pts) => SampleSet::from_points(pts.clone()),
        }
    }

    /// Corner states of a box.
    pub fn corners(&self) -> Result<Vec<Vec<f64>>> {
        match self {
            Domain::Box { lower, upper } => {
                let n = lower.len();
                Ok((0..1usize << n)
                    .map(|mask| {
                        (0..n).map(|i| if mask >> i & 1 == 1 { upper[i] } else { lower[i] }).collect()
                    })
                    .collect())
            }
            Domain::Samples(_) => Err(Error::arg("a sample domain has no corners")),
        }
    }
}

/// Finite set of states at which sampled conditions are checked, with the
/// grid spacing when it came from a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    points: Vec<Vec<f64>>,
    spacing: Option<Vec<f64>>,
}

impl SampleSet {
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::arg("empty sample set"));
        };
        let n = first.len();
        if n == 0 || points.iter().any(|p| p.len() != n) {
            return Err(Error::arg("sample points must share one non-zero dimension"));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::arg("sample points must be finite"));
        }
        Ok(Self { points, spacing: None })
    }

    /// Uniform tensor grid with `m` points per axis, enumerated with the
    /// last coordinate varying fastest.
    pub fn grid(lower: &[f64], upper: &[f64], m: usize) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::arg("grid bounds must have one equal, non-zero length"));
        }
        if m == 0 {
            return Err(Error::arg("grid needs at least one point per axis"));
        }
        let n = lower.len();
        let axis = |i: usize, j: usize| {
            if m == 1 {
                0.5 * (lower[i] + upper[i])
            } else {
                lower[i] + (upper[i] - lower[i]) * j as f64 / (m - 1) as f64
            }
        };
        let total = m.checked_pow(n as u32).ok_or_else(|| Error::arg("grid too large"))?;
        let mut points = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut p = vec![0.0; n];
            for i in (0..n).rev() {
                p[i] = axis(i, rem % m);
                rem /= m;
            }
            points.push(p);
        }
        let spacing = (0..n)
            .map(|i| if m == 1 { 0.0 } else { (upper[i] - lower[i]) / (m - 1) as f64 })
            .collect();
        Ok(Self { points, spacing: Some(spacing) })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn spacing(&self) -> Option<&[f64]> {
        self.spacing.as_deref()
    }
}

type Field = dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync;
type Jac = dyn Fn(f64, &[f64]) -> Matrix + Send + Sync;
type Metric = dyn Fn(&[f64]) -> Matrix + Send + Sync;

/// A system assembled from closures.
#[derive(Clone)]
pub struct FnSystem {
    name: String,
    n: usize,
    field: Arc<Field>,
    jac: Arc<Jac>,
    domain: Option<Domain>,
    theta: Option<Arc<Metric>>,
    theta_rate: Option<Arc<Jac>>,
}

impl FnSystem {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        field: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
        jac: impl Fn(f64, &[f64]) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            n,
            field: Arc::new(field),
            jac: Arc::new(jac),
            domain: None,
            theta: None,
            theta_rate: None,
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn with_scaling(mut self, theta: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static) -> Self {
        self.theta = Some(Arc::new(theta));
        self
    }

    pub fn with_scaling_rate(
        mut self,
        rate: impl Fn(f64, &[f64]) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        self.theta_rate = Some(Arc::new(rate));
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for FnSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSystem")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("domain", &self.domain)
            .field("scaled", &self.theta.is_some())
            .finish()
    }
}

impl System for FnSystem {
    fn dim(&self) -> usize {
        self.n
    }
    fn vector_field(&self, t: f64, x: &[f64]) -> Vec<f64> {
        (self.field)(t, x)
    }
    fn jacobian(&self, t: f64, x: &[f64]) -> Matrix {
        (self.jac)(t, x)
    }
    fn domain(&self) -> Option<&Domain> {
        self.domain.as_ref()
    }
    fn scaling(&self, x: &[f64]) -> Option<Matrix> {
        self.theta.as_ref().map(|th| th(x))
    }
    fn scaling_rate(&self, t: f64, x: &[f64]) -> Option<Matrix> {
        self.theta_rate.as_ref().map(|r| r(t, x))
    }
}
