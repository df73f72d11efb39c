//! Polar-coordinate ODE models on `R^q`: the Chafee–Infante flow and the
//! time-reversible flow on the boundary sphere, with an adaptive
//! Dormand–Prince integrator and a heteroclinic audit.
//!
//! The reversible model lives on `R^q` plus a point at infinity. States carry
//! a chart flag: the outer chart stores `(1/r, R Phi)` and integrates `-F`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::Float;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::connectivity::descendants;
use crate::families::expected_connection_graph_1q;
use crate::model::{Label, Tag};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("radius {radius} left the chart")]
    ChartOverflow { radius: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("audit mismatches: {}", .0.join("; "))]
    Mismatch(Vec<String>),
}

pub type OdeResult<T> = std::result::Result<T, OdeError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Chart {
    /// `(r, Phi)`, used for `r <= 1`.
    Inner,
    /// `(1/r, R Phi)`, used for `r >= 1`.
    Outer,
}

impl Chart {
    pub fn other(self) -> Self {
        match self {
            Chart::Inner => Chart::Outer,
            Chart::Outer => Chart::Inner,
        }
    }
}

fn c<T: Float>(x: f64) -> T {
    T::from(x).expect("constant fits the scalar type")
}

fn norm<T: Float>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

fn dot<T: Float>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `R e_j = e_{q-1-j}`.
pub fn reflect<T: Float>(phi: &[T]) -> Vec<T> {
    phi.iter().rev().copied().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelState<T> {
    pub radius: T,
    pub angle: Vec<T>,
    pub chart: Chart,
}

impl<T: Float> ModelState<T> {
    /// Inner-chart state; `angle` is normalized.
    pub fn new(radius: T, angle: Vec<T>) -> OdeResult<Self> {
        Self::in_chart(radius, angle, Chart::Inner)
    }

    pub fn in_chart(radius: T, mut angle: Vec<T>, chart: Chart) -> OdeResult<Self> {
        if angle.is_empty() {
            return Err(OdeError::InvalidState("empty angle".into()));
        }
        if !(radius >= T::zero()) || !radius.is_finite() {
            return Err(OdeError::InvalidState("radius must be finite and nonnegative".into()));
        }
        let n = norm(&angle);
        if !(n > T::zero()) || !n.is_finite() {
            return Err(OdeError::InvalidState("angle must be a nonzero vector".into()));
        }
        angle.iter_mut().for_each(|x| *x = *x / n);
        Ok(Self {
            radius,
            angle,
            chart,
        })
    }

    pub fn dim(&self) -> usize {
        self.angle.len()
    }

    /// The same point in the other chart.
    pub fn swapped(&self) -> Self {
        Self {
            radius: if self.radius == T::zero() {
                T::infinity()
            } else {
                self.radius.recip()
            },
            angle: reflect(&self.angle),
            chart: self.chart.other(),
        }
    }

    /// The same point expressed in `chart`.
    pub fn to_chart(&self, chart: Chart) -> Self {
        if self.chart == chart {
            self.clone()
        } else {
            self.swapped()
        }
    }

    /// Image under the reversor `(r, Phi) -> (1/r, R Phi)`, kept in the same chart.
    pub fn reversed(&self) -> Self {
        let mut s = self.swapped();
        s.chart = self.chart;
        s
    }

    /// Radius and angle in the inner chart; the radius may be infinite.
    pub fn physical(&self) -> (T, Vec<T>) {
        let s = self.to_chart(Chart::Inner);
        (s.radius, s.angle)
    }

    /// Cartesian point `r Phi` in the state's own chart.
    pub fn cartesian(&self) -> Vec<T> {
        self.angle.iter().map(|&x| x * self.radius).collect()
    }

    fn renormalize(&mut self) {
        let n = norm(&self.angle);
        self.angle.iter_mut().for_each(|x| *x = *x / n);
    }
}

pub trait VectorField<T: Float>: Sync {
    fn dim(&self) -> usize;

    /// Writes `dPhi` and returns `dr` in the inner chart.
    fn eval(&self, radius: T, angle: &[T], dangle: &mut [T]) -> T;

    /// Whether the field is conjugate to minus itself under `(r, Phi) -> (1/r, R Phi)`,
    /// which makes the outer chart available.
    fn reversible(&self) -> bool {
        false
    }

    /// Derivative in the state's chart.
    fn derivative(&self, state: &ModelState<T>) -> (T, Vec<T>) {
        let mut dphi = vec![T::zero(); state.dim()];
        let dr = self.eval(state.radius, &state.angle, &mut dphi);
        match state.chart {
            Chart::Inner => (dr, dphi),
            Chart::Outer => (-dr, dphi.into_iter().map(|x| -x).collect()),
        }
    }
}

fn check_eigenvalues<T: Float>(mu: &[T]) -> OdeResult<()> {
    if mu.is_empty() {
        return Err(OdeError::InvalidParameter("no eigenvalues".into()));
    }
    if mu.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(OdeError::InvalidParameter(
            "eigenvalues must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// `mu_j = -j`.
pub fn default_eigenvalues<T: Float>(q: usize) -> Vec<T> {
    (0..q).map(|j| -c::<T>(j as f64)).collect()
}

/// `P_Phi v = v - <Phi, v> Phi / |Phi|^2`, written into `v`.
fn project<T: Float>(phi: &[T], v: &mut [T]) {
    let k = dot(phi, v) / dot(phi, phi);
    v.iter_mut().zip(phi).for_each(|(x, &p)| *x = *x - k * p);
}

/// `r' = r (1 - r^2)`, `Phi' = P_Phi Q Phi`.
#[derive(Clone, Debug)]
pub struct CiField<T> {
    mu: Vec<T>,
}

impl<T: Float> CiField<T> {
    pub fn new(mu: Vec<T>) -> OdeResult<Self> {
        check_eigenvalues(&mu)?;
        Ok(Self { mu })
    }

    pub fn standard(d: usize) -> OdeResult<Self> {
        Self::new(default_eigenvalues(d))
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.mu
    }
}

impl<T: Float + Send + Sync> VectorField<T> for CiField<T> {
    fn dim(&self) -> usize {
        self.mu.len()
    }

    fn eval(&self, radius: T, angle: &[T], dangle: &mut [T]) -> T {
        for ((d, &m), &p) in dangle.iter_mut().zip(&self.mu).zip(angle) {
            *d = m * p;
        }
        project(angle, dangle);
        radius * (T::one() - radius * radius)
    }
}

/// The reversible boundary-sphere model
/// `r' = s r (r^-2 - 4)(4 - r^2)`,
/// `Phi' = s P_Phi((4 - r^2) Q Phi + (r^-2 - 4) R Q R Phi)`, `s = 1/(r^2 + r^-2)`.
#[derive(Clone, Debug)]
pub struct ReversibleField<T> {
    mu: Vec<T>,
}

impl<T: Float> ReversibleField<T> {
    pub fn new(mu: Vec<T>) -> OdeResult<Self> {
        check_eigenvalues(&mu)?;
        Ok(Self { mu })
    }

    pub fn standard(q: usize) -> OdeResult<Self> {
        Self::new(default_eigenvalues(q))
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.mu
    }

    /// `s(r) = 1/(r^2 + r^-2)`.
    pub fn time_scale(radius: T) -> T {
        let r2 = radius * radius;
        r2 / (T::one() + r2 * r2)
    }
}

impl<T: Float + Send + Sync> VectorField<T> for ReversibleField<T> {
    fn dim(&self) -> usize {
        self.mu.len()
    }

    fn eval(&self, radius: T, angle: &[T], dangle: &mut [T]) -> T {
        let four = c::<T>(4.0);
        // s (4 - r^2), s (r^-2 - 4) and s r^-1 (r^-2 - 4)(4 - r^2), cleared of poles
        let (outer, inner, radial) = if radius <= T::one() {
            let r2 = radius * radius;
            let w = T::one() + r2 * r2;
            let (a, b) = (four - r2, T::one() - four * r2);
            (r2 * a / w, b / w, a * b / w)
        } else {
            let u2 = (radius * radius).recip();
            let w = T::one() + u2 * u2;
            let (a, b) = (four * u2 - T::one(), u2 - four);
            (a / w, u2 * b / w, a * b / w)
        };
        let q = self.mu.len();
        for (k, d) in dangle.iter_mut().enumerate() {
            *d = (outer * self.mu[k] + inner * self.mu[q - 1 - k]) * angle[k];
        }
        project(angle, dangle);
        radius * radial
    }

    fn reversible(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug)]
pub struct StepControl<T> {
    pub rtol: T,
    pub atol: T,
    pub h_init: T,
    pub h_min: T,
    pub h_max: T,
    /// Swap charts whenever the active radius exceeds 1 (reversible fields only).
    pub switch_charts: bool,
    pub max_steps: usize,
}

impl<T: Float> Default for StepControl<T> {
    fn default() -> Self {
        Self {
            rtol: c(1e-10),
            atol: c(1e-12),
            h_init: c(1e-3),
            h_min: c(1e-14),
            h_max: c(0.5),
            switch_charts: true,
            max_steps: 2_000_000,
        }
    }
}

impl<T: Float> StepControl<T> {
    /// Tight tolerances and no chart switching.
    pub fn raw() -> Self {
        Self {
            rtol: c(1e-13),
            atol: c(1e-15),
            switch_charts: false,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub samples: Vec<(T, ModelState<T>)>,
    /// True if the stop predicate fired before the end time.
    pub stopped: bool,
}

impl<T: Float> Trajectory<T> {
    pub fn last(&self) -> &(T, ModelState<T>) {
        self.samples.last().expect("trajectory holds the initial state")
    }
}

// Dormand–Prince 5(4) tableau
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn pack<T: Float>(s: &ModelState<T>) -> Vec<T> {
    std::iter::once(s.radius).chain(s.angle.iter().copied()).collect()
}

fn rhs<T: Float, F: VectorField<T> + ?Sized>(field: &F, chart: Chart, y: &[T], dy: &mut [T]) {
    let (dr, dphi) = dy.split_first_mut().expect("nonempty state");
    *dr = field.eval(y[0], &y[1..], dphi);
    if chart == Chart::Outer {
        dy.iter_mut().for_each(|x| *x = -*x);
    }
}

fn check_radius<T: Float>(r: T) -> OdeResult<()> {
    let eps = T::min_positive_value().sqrt();
    if !r.is_finite() || r < T::zero() || r > eps.recip() || (r > T::zero() && r < eps) {
        return Err(OdeError::ChartOverflow {
            radius: r.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Adaptive Dormand–Prince integration from `start` over `[0, t_end]`,
/// recording every accepted step. Stops early once `stop` returns true.
pub fn integrate_until<T, F, S>(
    field: &F,
    start: &ModelState<T>,
    t_end: T,
    control: &StepControl<T>,
    mut stop: S,
) -> OdeResult<Trajectory<T>>
where
    T: Float,
    F: VectorField<T> + ?Sized,
    S: FnMut(T, &ModelState<T>) -> bool,
{
    if start.dim() != field.dim() {
        return Err(OdeError::InvalidState(format!(
            "state has dimension {}, field {}",
            start.dim(),
            field.dim()
        )));
    }
    if !t_end.is_finite() || t_end < T::zero() {
        return Err(OdeError::InvalidParameter("end time must be finite and nonnegative".into()));
    }
    if start.chart == Chart::Outer && !field.reversible() {
        return Err(OdeError::InvalidState("outer chart needs a reversible field".into()));
    }
    check_radius(start.radius)?;
    let switching = control.switch_charts && field.reversible();

    let mut state = start.clone();
    let mut t = T::zero();
    let mut samples = vec![(t, state.clone())];
    if stop(t, &state) {
        return Ok(Trajectory {
            samples,
            stopped: true,
        });
    }

    let m = state.dim() + 1;
    let mut k = vec![vec![T::zero(); m]; 7];
    let mut y = pack(&state);
    let mut tmp = vec![T::zero(); m];
    let mut y5 = vec![T::zero(); m];
    rhs(field, state.chart, &y, &mut k[0]);
    let mut h = control.h_init.min(control.h_max);
    let mut steps = 0usize;
    let safety = c::<T>(0.9);
    let (shrink, grow) = (c::<T>(0.2), c::<T>(5.0));
    let fifth = c::<T>(0.2);

    while t < t_end {
        steps += 1;
        if steps > control.max_steps {
            return Err(OdeError::TooManySteps(control.max_steps));
        }
        let h_floor = control.h_min * T::one().max(t.abs());
        if h < h_floor {
            return Err(OdeError::StepUnderflow {
                t: t.to_f64().unwrap_or(f64::NAN),
                h: h.to_f64().unwrap_or(f64::NAN),
            });
        }
        h = h.min(t_end - t);

        for s in 0..6 {
            for i in 0..m {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    acc = acc + h * c::<T>(A[s][j]) * kj[i];
                }
                tmp[i] = acc;
            }
            if s == 5 {
                y5.copy_from_slice(&tmp);
            }
            rhs(field, state.chart, &tmp, &mut k[s + 1]);
        }

        let mut err = T::zero();
        for i in 0..m {
            let y4 = (0..7).fold(y[i], |acc, j| acc + h * c::<T>(B4[j]) * k[j][i]);
            let scale = control.atol + control.rtol * y[i].abs().max(y5[i].abs());
            let e = (y5[i] - y4) / scale;
            err = err + e * e;
        }
        err = (err / c::<T>(m as f64)).sqrt();
        if !err.is_finite() {
            h = h * shrink;
            continue;
        }

        if err <= T::one() {
            t = t + h;
            state.radius = y5[0];
            state.angle.copy_from_slice(&y5[1..]);
            state.renormalize();
            if switching && state.radius > T::one() {
                state = state.swapped();
            }
            check_radius(state.radius)?;
            samples.push((t, state.clone()));
            if stop(t, &state) {
                return Ok(Trajectory {
                    samples,
                    stopped: true,
                });
            }
            y = pack(&state);
            rhs(field, state.chart, &y, &mut k[0]);
        }
        let factor = if err == T::zero() {
            grow
        } else {
            (safety * err.powf(-fifth)).max(shrink).min(grow)
        };
        h = (h * factor).min(control.h_max);
    }
    Ok(Trajectory {
        samples,
        stopped: false,
    })
}

pub fn integrate<T, F>(
    field: &F,
    start: &ModelState<T>,
    t_end: T,
    control: &StepControl<T>,
) -> OdeResult<Trajectory<T>>
where
    T: Float,
    F: VectorField<T> + ?Sized,
{
    integrate_until(field, start, t_end, control, |_, _| false)
}

/// `t,chart,r,phi_0,...` with `r` and `Phi` in inner-chart coordinates.
pub fn trajectory_csv<T: Float + std::fmt::Display>(trajectory: &Trajectory<T>) -> String {
    let mut out = String::from("t,chart,r");
    let q = trajectory.samples.first().map_or(0, |(_, s)| s.dim());
    for k in 0..q {
        let _ = write!(out, ",phi_{k}");
    }
    out.push('\n');
    for (t, s) in &trajectory.samples {
        let (r, phi) = s.physical();
        let chart = match s.chart {
            Chart::Inner => "inner",
            Chart::Outer => "outer",
        };
        let _ = write!(out, "{t},{chart},{r}");
        for x in phi {
            let _ = write!(out, ",{x}");
        }
        out.push('\n');
    }
    out
}

// ---- equilibria and audit -------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct Equilibrium {
    pub label: Label,
    /// Chart in which the equilibrium sits at radius 1/2 (or 0 for the poles).
    pub state: ModelState<f64>,
    /// `Some(j)` for `Phi = +-e_j`; `None` at the poles.
    pub axis: Option<usize>,
}

impl Equilibrium {
    pub fn name(&self) -> String {
        self.label.to_string()
    }

    pub fn is_pole(&self) -> bool {
        self.axis.is_none()
    }

    /// Distance from `s`, measured in this equilibrium's chart.
    pub fn distance(&self, s: &ModelState<f64>) -> f64 {
        let s = s.to_chart(self.state.chart);
        if self.is_pole() {
            return s.radius;
        }
        let (x, y) = (s.cartesian(), self.state.cartesian());
        x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

fn unit(q: usize, j: usize, sign: f64) -> Vec<f64> {
    let mut v = vec![0.0; q];
    v[j] = sign;
    v
}

/// `A_j = (1/2, e_j)`, `B_j = (1/2, -e_j)`, `C_{j+1} = (2, -e_j)`, `D_{j+1} = (2, e_j)`,
/// `A_q = 0`, `D_0 = infinity`.
pub fn model_equilibria(q: usize) -> Vec<Equilibrium> {
    let at = |r: f64, angle: Vec<f64>, chart| ModelState::in_chart(r, angle, chart).expect("valid");
    let mut out = Vec::with_capacity(4 * q + 2);
    out.push(Equilibrium {
        label: Label::new(Tag::A, q),
        state: at(0.0, unit(q, 0, 1.0), Chart::Inner),
        axis: None,
    });
    out.push(Equilibrium {
        label: Label::new(Tag::D, 0),
        state: at(0.0, unit(q, 0, 1.0), Chart::Outer),
        axis: None,
    });
    for j in 0..q {
        for (tag, sign) in [(Tag::A, 1.0), (Tag::B, -1.0)] {
            out.push(Equilibrium {
                label: Label::new(tag, j),
                state: at(0.5, unit(q, j, sign), Chart::Inner),
                axis: Some(j),
            });
        }
        for (tag, sign) in [(Tag::C, -1.0), (Tag::D, 1.0)] {
            let physical = at(2.0, unit(q, j, sign), Chart::Inner);
            out.push(Equilibrium {
                label: Label::new(tag, j + 1),
                state: physical.to_chart(Chart::Outer),
                axis: Some(q - 1 - j),
            });
        }
    }
    out
}

fn field_norm<F: VectorField<f64> + ?Sized>(field: &F, s: &ModelState<f64>) -> f64 {
    let (dr, dphi) = field.derivative(s);
    (dr * dr + dphi.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// Field magnitude at `e`, evaluated at its inner-chart coordinates where
/// finite; at the poles only the radial component is defined.
pub fn equilibrium_residual<F: VectorField<f64> + ?Sized>(field: &F, e: &Equilibrium) -> f64 {
    if e.is_pole() {
        return field.derivative(&e.state).0.abs();
    }
    let inner = e.state.to_chart(Chart::Inner);
    field_norm(field, &inner).max(field_norm(field, &e.state))
}

/// Local coordinates at a non-pole equilibrium: `x_0` is the radial offset and
/// `x_i` (i >= 1) the angular components other than the equilibrium axis.
struct LocalFrame<'a> {
    eq: &'a Equilibrium,
    others: Vec<usize>,
}

impl<'a> LocalFrame<'a> {
    fn new(eq: &'a Equilibrium) -> Self {
        let axis = eq.axis.expect("non-pole equilibrium");
        let others = (0..eq.state.dim()).filter(|&k| k != axis).collect();
        Self { eq, others }
    }

    fn dim(&self) -> usize {
        self.others.len() + 1
    }

    fn state(&self, x: &[f64]) -> ModelState<f64> {
        let axis = self.eq.axis.expect("non-pole equilibrium");
        let sign = self.eq.state.angle[axis].signum();
        let mut angle = vec![0.0; self.eq.state.dim()];
        let mut rest = 0.0;
        for (i, &k) in self.others.iter().enumerate() {
            angle[k] = x[i + 1];
            rest += x[i + 1] * x[i + 1];
        }
        angle[axis] = sign * (1.0 - rest).sqrt();
        ModelState {
            radius: self.eq.state.radius + x[0],
            angle,
            chart: self.eq.state.chart,
        }
    }

    fn local_field<F: VectorField<f64> + ?Sized>(&self, field: &F, x: &[f64]) -> Vec<f64> {
        let (dr, dphi) = field.derivative(&self.state(x));
        std::iter::once(dr)
            .chain(self.others.iter().map(|&k| dphi[k]))
            .collect()
    }

    fn jacobian<F: VectorField<f64> + ?Sized>(&self, field: &F, h: f64) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut jac = vec![vec![0.0; n]; n];
        for col in 0..n {
            let mut plus = vec![0.0; n];
            let mut minus = vec![0.0; n];
            plus[col] = h;
            minus[col] = -h;
            let (fp, fm) = (self.local_field(field, &plus), self.local_field(field, &minus));
            for row in 0..n {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        jac
    }

    fn direction_name(&self, i: usize) -> String {
        if i == 0 {
            "radial".into()
        } else {
            format!("e{}", self.others[i - 1])
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumRecord {
    pub label: String,
    /// Inner-chart radius; `None` at infinity.
    pub radius: Option<f64>,
    pub angle: Option<Vec<f64>>,
    pub residual: f64,
    pub expected_morse: usize,
    pub unstable_dimension: usize,
    /// Diagonal of the local Jacobian (absent at the poles).
    pub eigenvalues: Vec<f64>,
    pub jacobian_offdiagonal: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Launch {
    pub from: String,
    pub direction: String,
    pub target: Option<String>,
    pub time: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasinSample {
    pub radius: f64,
    pub angle: Vec<f64>,
    pub sink: Option<String>,
    pub expected: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub q: usize,
    pub equilibria: Vec<EquilibriumRecord>,
    pub launches: Vec<Launch>,
    pub sinks: Vec<String>,
    /// Equilibria whose numerical descendants contain all three sinks.
    pub reach_all_sinks: Vec<String>,
    pub basin_samples: Vec<BasinSample>,
    pub mismatches: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn into_result(self) -> OdeResult<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(OdeError::Mismatch(self.mismatches))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Targets found from `from` along the radial direction(s).
    pub fn radial_targets(&self, from: &str) -> Vec<Option<String>> {
        self.launches
            .iter()
            .filter(|l| l.from == from && l.direction.contains("radial"))
            .map(|l| l.target.clone())
            .collect()
    }
}

pub const PERTURBATION: f64 = 1e-6;
pub const CAPTURE_RADIUS: f64 = 1e-3;
const JACOBIAN_STEP: f64 = 1e-6;
const AUDIT_HORIZON: f64 = 400.0;

fn first_capture(
    field: &ReversibleField<f64>,
    start: &ModelState<f64>,
    candidates: &[&Equilibrium],
) -> OdeResult<(Option<String>, f64)> {
    let mut hit = None;
    let traj = integrate_until(field, start, AUDIT_HORIZON, &StepControl::default(), |_, s| {
        hit = candidates
            .iter()
            .find(|e| e.distance(s) < CAPTURE_RADIUS)
            .map(|e| e.name());
        hit.is_some()
    })?;
    Ok((hit, traj.last().0))
}

/// Launches from every unstable direction of every equilibrium of the reversible
/// model in dimension `q` and compares the captured targets with the graph
/// predicted for `kappa sigma_1q kappa`.
pub fn model_connection_audit(q: usize) -> OdeResult<AuditReport> {
    if !(2..=4).contains(&q) {
        return Err(OdeError::InvalidParameter(format!("audit needs 2 <= q <= 4, got {q}")));
    }
    let field = ReversibleField::<f64>::standard(q)?;
    let eqs = model_equilibria(q);
    let mut mismatches = Vec::new();
    let mut records = Vec::new();
    let mut jobs: Vec<(usize, String, ModelState<f64>)> = Vec::new();

    for (idx, e) in eqs.iter().enumerate() {
        let residual = equilibrium_residual(&field, e);
        if residual >= 1e-12 {
            mismatches.push(format!("{}: residual {residual:e}", e.name()));
        }
        let (radius, angle) = e.state.physical();
        let mut record = EquilibriumRecord {
            label: e.name(),
            radius: radius.is_finite().then_some(radius),
            angle: (!e.is_pole()).then_some(angle),
            residual,
            expected_morse: e.label.index,
            unstable_dimension: 0,
            eigenvalues: Vec::new(),
            jacobian_offdiagonal: 0.0,
        };
        if e.is_pole() {
            let probe = ModelState {
                radius: PERTURBATION,
                ..e.state.clone()
            };
            let rate = field.derivative(&probe).0 / PERTURBATION;
            if rate > 0.0 {
                record.unstable_dimension = q;
                for k in 0..q {
                    for sign in [1.0, -1.0] {
                        let s = ModelState::in_chart(PERTURBATION, unit(q, k, sign), e.state.chart)?;
                        let name = format!("{}e{k}", if sign > 0.0 { '+' } else { '-' });
                        jobs.push((idx, name, s));
                    }
                }
            }
        } else {
            let frame = LocalFrame::new(e);
            let jac = frame.jacobian(&field, JACOBIAN_STEP);
            let n = frame.dim();
            let mut off = 0.0f64;
            for (r, row) in jac.iter().enumerate() {
                for (col, &x) in row.iter().enumerate() {
                    if r != col {
                        off = off.max(x.abs());
                    }
                }
            }
            if off > 1e-6 {
                mismatches.push(format!("{}: Jacobian not diagonal in the local frame ({off:e})", e.name()));
            }
            record.jacobian_offdiagonal = off;
            record.eigenvalues = (0..n).map(|i| jac[i][i]).collect();
            for i in 0..n {
                if jac[i][i] > 0.0 {
                    record.unstable_dimension += 1;
                    for sign in [1.0, -1.0] {
                        let mut x = vec![0.0; n];
                        x[i] = sign * PERTURBATION;
                        let name = format!("{}{}", if sign > 0.0 { '+' } else { '-' }, frame.direction_name(i));
                        jobs.push((idx, name, frame.state(&x)));
                    }
                }
            }
        }
        if record.unstable_dimension != record.expected_morse {
            mismatches.push(format!(
                "{}: unstable dimension {} but Morse index {}",
                e.name(),
                record.unstable_dimension,
                record.expected_morse
            ));
        }
        records.push(record);
    }

    let launches: Vec<Launch> = jobs
        .par_iter()
        .map(|(idx, direction, start)| {
            let others: Vec<&Equilibrium> =
                eqs.iter().enumerate().filter(|(i, _)| i != idx).map(|(_, e)| e).collect();
            let (target, time) = first_capture(&field, start, &others)?;
            Ok(Launch {
                from: eqs[*idx].name(),
                direction: direction.clone(),
                target,
                time,
            })
        })
        .collect::<OdeResult<_>>()?;

    // compare with the predicted graph
    let expected = expected_connection_graph_1q(q).map_err(|e| OdeError::InvalidParameter(e.to_string()))?;
    let id_of = |name: &str| {
        expected
            .vertices()
            .iter()
            .find(|v| v.label.map(|l| l.to_string()).as_deref() == Some(name))
            .map(|v| v.id)
    };
    for l in &launches {
        match &l.target {
            None => mismatches.push(format!("{} {}: no equilibrium reached", l.from, l.direction)),
            Some(t) => {
                let ok = match (id_of(&l.from), id_of(t)) {
                    (Some(a), Some(b)) => descendants(&expected, a).contains(&b),
                    _ => false,
                };
                if !ok {
                    mismatches.push(format!("{} {}: reached {t}, not a predicted descendant", l.from, l.direction));
                }
            }
        }
    }
    for j in 0..q {
        for (from, inward) in [
            (Label::new(Tag::D, j + 1), Label::new(Tag::A, j)),
            (Label::new(Tag::C, j + 1), Label::new(Tag::B, j)),
        ] {
            let from = from.to_string();
            let mut found: BTreeSet<String> = BTreeSet::new();
            for l in launches.iter().filter(|l| l.from == from && l.direction.ends_with("radial")) {
                found.extend(l.target.clone());
            }
            let want: BTreeSet<String> = [inward.to_string(), "D0".to_string()].into();
            if found != want {
                mismatches.push(format!("{from}: radial targets {found:?}, expected {want:?}"));
            }
        }
    }

    let sinks: Vec<String> = records
        .iter()
        .filter(|r| r.unstable_dimension == 0)
        .map(|r| r.label.clone())
        .collect();
    let sink_set: BTreeSet<&str> = sinks.iter().map(String::as_str).collect();
    if sink_set != BTreeSet::from(["A0", "B0", "D0"]) {
        mismatches.push(format!("sinks {sinks:?}, expected A0, B0, D0"));
    }

    // sinks reachable through chains of numerically found targets
    let mut relation: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for l in &launches {
        if let Some(t) = &l.target {
            relation.entry(l.from.as_str()).or_default().insert(t.as_str());
        }
    }
    let reach = |start: &str| -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![start.to_string()];
        while let Some(v) = stack.pop() {
            for &w in relation.get(v.as_str()).into_iter().flatten() {
                if seen.insert(w.to_string()) {
                    stack.push(w.to_string());
                }
            }
        }
        seen
    };
    let mut reach_all_sinks = Vec::new();
    for e in &eqs {
        let name = e.name();
        if sink_set.contains(name.as_str()) {
            continue;
        }
        let r = reach(&name);
        let hits: BTreeSet<&str> = sink_set.iter().copied().filter(|s| r.contains(*s)).collect();
        if hits.len() == 3 {
            reach_all_sinks.push(name.clone());
        }
        let cd = matches!(e.label.tag, Tag::C | Tag::D);
        let checks = [
            ("A0", name != "C1"),
            ("B0", name != "D1"),
            ("D0", cd),
        ];
        for (sink, want) in checks {
            if hits.contains(sink) != want {
                mismatches.push(format!(
                    "{name}: reaches {sink} = {}, expected {want}",
                    hits.contains(sink)
                ));
            }
        }
    }
    // equatorial equilibria: r = 2 and Phi orthogonal to e_0
    let equatorial: BTreeSet<String> = (1..q)
        .flat_map(|j| [Label::new(Tag::C, j + 1).to_string(), Label::new(Tag::D, j + 1).to_string()])
        .collect();
    let found: BTreeSet<String> = reach_all_sinks.iter().cloned().collect();
    if found != equatorial {
        mismatches.push(format!(
            "equilibria reaching all sinks {found:?}, expected the equatorial set {equatorial:?}"
        ));
    }

    let basin_samples = basin_check(&field, &eqs, &sink_set, &mut mismatches)?;

    Ok(AuditReport {
        q,
        equilibria: records,
        launches,
        sinks,
        reach_all_sinks,
        basin_samples,
        mismatches,
    })
}

/// Points just inside and just outside `r = 2` must fall into `{A0, B0}` and
/// `D0` respectively, with `A0` versus `B0` decided by the sign of `Phi_0`.
fn basin_check(
    field: &ReversibleField<f64>,
    eqs: &[Equilibrium],
    sink_set: &BTreeSet<&str>,
    mismatches: &mut Vec<String>,
) -> OdeResult<Vec<BasinSample>> {
    let q = field.dim();
    let sinks: Vec<&Equilibrium> = eqs
        .iter()
        .filter(|e| sink_set.contains(e.name().as_str()))
        .collect();
    let directions: Vec<Vec<f64>> = (0..4)
        .map(|s| {
            (0..q)
                .map(|k| {
                    let x = ((s * 7 + k * 3) % 5) as f64 + 0.5;
                    if (s + k) % 2 == 0 { x } else { -x }
                })
                .collect()
        })
        .collect();
    let mut jobs = Vec::new();
    for dir in &directions {
        for radius in [1.9, 2.1, 1.0, 3.0] {
            jobs.push((radius, dir.clone()));
        }
    }
    let samples: Vec<BasinSample> = jobs
        .par_iter()
        .map(|(radius, dir)| {
            let start = ModelState::new(*radius, dir.clone())?;
            let start = if *radius > 1.0 { start.swapped() } else { start };
            let (sink, _) = first_capture(field, &start, &sinks)?;
            let expected = if *radius > 2.0 {
                "D0"
            } else if dir[0] > 0.0 {
                "A0"
            } else {
                "B0"
            };
            let (_, angle) = start.physical();
            Ok(BasinSample {
                radius: *radius,
                angle,
                sink,
                expected: expected.into(),
            })
        })
        .collect::<OdeResult<_>>()?;
    for s in &samples {
        if s.sink.as_deref() != Some(s.expected.as_str()) {
            mismatches.push(format!(
                "basin sample r = {}: reached {:?}, expected {}",
                s.radius, s.sink, s.expected
            ));
        }
    }
    Ok(samples)
}

/// Integrates `T` forward in a single chart, applies the reversor, integrates `T`
/// again and applies the reversor once more; returns the distance to `start`.
pub fn reversor_round_trip<F: VectorField<f64> + ?Sized>(
    field: &F,
    start: &ModelState<f64>,
    t: f64,
) -> OdeResult<f64> {
    let control = StepControl::raw();
    let forward = integrate(field, start, t, &control)?;
    let back = integrate(field, &forward.last().1.reversed(), t, &control)?;
    let end = back.last().1.reversed();
    let (a, b) = (end.cartesian(), start.cartesian());
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}
