//! QR steps induced by functions of the spectrum, their linear form in
//! bidiagonal coordinates, shifted steps and the Rayleigh quotient iteration.

use serde::{Deserialize, Serialize};

use crate::charts::{conjugate_diag, phi, psi, select_chart, select_chart_ending_at, ChartPoint, Spectrum};
use crate::error::{AtlasError, Result};
use crate::linalg::{householder_qr, sym_tridiag_eigen_with, DenseMatrix, Permutation, SymTridiagonal};
use crate::tolerance::Tolerances;

/// A function evaluated only on eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ShiftFunction {
    Identity,
    /// `x ↦ x − s`.
    Shift(f64),
    /// `x ↦ x²`.
    Square,
    /// `x ↦ exp(t · g(x))`.
    Exponential { t: f64, inner: Box<ShiftFunction> },
    /// Values at `λ_1 < … < λ_n`.
    Tabulated(Vec<f64>),
}

impl ShiftFunction {
    pub fn exponential(t: f64, inner: ShiftFunction) -> Self {
        Self::Exponential { t, inner: Box::new(inner) }
    }

    /// Values at the given ascending eigenvalues.
    pub fn values(&self, lambdas: &[f64]) -> Result<Vec<f64>> {
        Ok(match self {
            Self::Identity => lambdas.to_vec(),
            Self::Shift(s) => lambdas.iter().map(|l| l - s).collect(),
            Self::Square => lambdas.iter().map(|l| l * l).collect(),
            Self::Exponential { t, inner } => inner.values(lambdas)?.iter().map(|g| (t * g).exp()).collect(),
            Self::Tabulated(v) => {
                if v.len() != lambdas.len() {
                    return Err(AtlasError::Dimension(format!(
                        "{} tabulated values for {} eigenvalues",
                        v.len(),
                        lambdas.len()
                    )));
                }
                v.clone()
            }
        })
    }

    /// `log|f(λ_k)|` and `sign f(λ_k)`; exponentials never leave log space.
    pub fn log_abs_values(&self, lambdas: &[f64]) -> Result<Vec<(f64, f64)>> {
        match self {
            Self::Exponential { t, inner } => Ok(inner.values(lambdas)?.iter().map(|g| (t * g, 1.0)).collect()),
            _ => Ok(self.values(lambdas)?.iter().map(|v| (v.abs().ln(), v.signum())).collect()),
        }
    }

    /// Rejects values too close to zero on the spectrum.
    fn checked_logs(&self, lambdas: &[f64], tol: &Tolerances) -> Result<Vec<(f64, f64)>> {
        let logs = self.log_abs_values(lambdas)?;
        let norm = lambdas.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for (k, &(log, _)) in logs.iter().enumerate() {
            let vanishes = match self {
                Self::Exponential { .. } => !log.is_finite(),
                _ => !(log.exp() > tol.shift(norm)),
            };
            if vanishes || log.is_nan() {
                return Err(AtlasError::ShiftOnSpectrum { lambda: lambdas[k] });
            }
        }
        Ok(logs)
    }
}

/// `Q(f(T))ᵀ T Q(f(T))`, with `f(T) = Vᵀ f(Λ) V` formed spectrally.
///
/// With `T = Vᵀ Λ V` one has `Q(f(T)) = Vᵀ Q(f(Λ) V)`, so the step is
/// `Q̂ᵀ Λ Q̂` for `Q̂ = Q(f(Λ) V)`. Rows of `f(Λ) V` are sorted by decreasing
/// `|f|` before the Householder sweep so the graded scaling stays harmless.
/// Off-diagonal entries use `F(T) = R T R⁻¹`, i.e.
/// `F(T)_{j+1,j} = T_{j+1,j} R_{j+1,j+1} / R_{jj}`, which preserves signs.
pub fn qr_step_matrix(t: &SymTridiagonal, f: &ShiftFunction) -> Result<SymTridiagonal> {
    qr_step_matrix_with(t, f, &Tolerances::default())
}

pub fn qr_step_matrix_with(t: &SymTridiagonal, f: &ShiftFunction, tol: &Tolerances) -> Result<SymTridiagonal> {
    let eig = sym_tridiag_eigen_with(t, tol)?;
    let logs = f.checked_logs(&eig.values, tol)?;
    Ok(step_from_eigen(t, &eig.vectors, &eig.values, &logs))
}

pub(crate) fn step_from_eigen(
    t: &SymTridiagonal,
    v: &DenseMatrix,
    lambdas: &[f64],
    logs: &[(f64, f64)],
) -> SymTridiagonal {
    let n = lambdas.len();
    let top = logs.iter().fold(f64::NEG_INFINITY, |m, (l, _)| m.max(*l));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| logs[b].0.total_cmp(&logs[a].0));
    let m = DenseMatrix::from_fn(n, |i, j| {
        let k = order[i];
        logs[k].1 * (logs[k].0 - top).exp() * v[(k, j)]
    });
    let (q_sorted, r) = householder_qr(&m);
    let values: Vec<f64> = order.iter().map(|&k| lambdas[k]).collect();
    let mut out = conjugate_diag(&q_sorted, &values);
    for (j, b) in out.off_mut().iter_mut().enumerate() {
        *b = t.off()[j] * (r[(j + 1, j + 1)] / r[(j, j)]);
    }
    out
}

fn chart_factors(spec: &Spectrum, pi: &Permutation, logs: &[(f64, f64)]) -> Vec<f64> {
    (0..spec.n().saturating_sub(1))
        .map(|i| (logs[pi.apply(i + 1)].0 - logs[pi.apply(i)].0).exp())
        .collect()
}

/// The QR step in bidiagonal coordinates: `β_i ↦ |f(λ_{π(i+1)}) / f(λ_{π(i)})| β_i`.
pub fn qr_step_chart(spec: &Spectrum, p: &ChartPoint, f: &ShiftFunction) -> Result<ChartPoint> {
    check_point(spec, p)?;
    let logs = f.checked_logs(spec.lambdas(), spec.tolerances())?;
    let factors = chart_factors(spec, &p.pi, &logs);
    Ok(ChartPoint {
        pi: p.pi.clone(),
        beta: p.beta.iter().zip(&factors).map(|(b, f)| b * f).collect(),
    })
}

fn check_point(spec: &Spectrum, p: &ChartPoint) -> Result<()> {
    if p.pi.n() != spec.n() || p.beta.len() + 1 != spec.n() {
        return Err(AtlasError::Dimension("chart point does not match the spectrum".into()));
    }
    Ok(())
}

/// The shifted step `F(s, ·)` in bidiagonal coordinates, extended to shifts
/// equal to the last eigenvalue `λ_{π(n)}` of the chart.
pub fn shifted_step(spec: &Spectrum, p: &ChartPoint, s: f64) -> Result<ChartPoint> {
    check_point(spec, p)?;
    let n = spec.n();
    let lp = spec.permuted(&p.pi);
    let v = lp.values();
    let tol = spec.tolerances().shift(spec.norm());
    if let Some(i) = (0..n.saturating_sub(1)).find(|&i| (v[i] - s).abs() <= tol) {
        return Err(AtlasError::OutsideDomain { shift: s, lambda: v[i] });
    }
    let beta = p
        .beta
        .iter()
        .enumerate()
        .map(|(i, b)| b * ((v[i + 1] - s).abs() / (v[i] - s).abs()))
        .collect();
    Ok(ChartPoint { pi: p.pi.clone(), beta })
}

/// A chart containing `t` suited to the shift `s`: one ending at the
/// eigenvalue nearest `s` when possible.
fn chart_for_shift(spec: &Spectrum, t: &SymTridiagonal, s: f64) -> Result<Option<Permutation>> {
    let (k, dist) = spec.nearest(s);
    match select_chart_ending_at(spec, t, k) {
        Ok(pi) => Ok(Some(pi)),
        Err(AtlasError::NotInChart { .. }) if dist > spec.tolerances().shift(spec.norm()) => {
            select_chart(spec, t).map(Some)
        }
        Err(AtlasError::NotInChart { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `F(s, T)` evaluated through a chart, so tiny off-diagonal entries keep
/// their relative accuracy.
pub fn shifted_step_matrix(spec: &Spectrum, t: &SymTridiagonal, s: f64) -> Result<SymTridiagonal> {
    let Some(pi) = chart_for_shift(spec, t, s)? else {
        let (k, _) = spec.nearest(s);
        return Err(AtlasError::OutsideDomain {
            shift: s,
            lambda: spec.lambdas()[k],
        });
    };
    let p = psi(spec, &pi, t)?;
    let q = shifted_step(spec, &p, s)?;
    phi(spec, &pi, &q.beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepStatus {
    Regular,
    /// The bottom off-diagonal entry is at or below the block tolerance.
    Deflated,
    /// `T_{nn}` is an eigenvalue but no chart with that eigenvalue last
    /// contains `T`; the matrix is returned unchanged.
    InstantWin,
}

#[derive(Debug, Clone)]
pub struct RayleighOutcome {
    pub matrix: SymTridiagonal,
    pub status: StepStatus,
}

/// `G(T) = F(T_{nn}, T)`.
pub fn rayleigh_step(spec: &Spectrum, t: &SymTridiagonal) -> Result<RayleighOutcome> {
    let n = t.n();
    if n != spec.n() {
        return Err(AtlasError::Dimension("matrix size differs from spectrum size".into()));
    }
    let block = spec.tolerances().block(t.norm_inf().max(spec.norm()));
    if n < 2 || t.off()[n - 2].abs() <= block {
        return Ok(RayleighOutcome {
            matrix: t.clone(),
            status: StepStatus::Deflated,
        });
    }
    let s = t.diag()[n - 1];
    match shifted_step_matrix(spec, t, s) {
        Ok(matrix) => {
            let status = if matrix.off()[n - 2].abs() <= block {
                StepStatus::Deflated
            } else {
                StepStatus::Regular
            };
            Ok(RayleighOutcome { matrix, status })
        }
        Err(AtlasError::OutsideDomain { .. }) => Ok(RayleighOutcome {
            matrix: t.clone(),
            status: StepStatus::InstantWin,
        }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryStatus {
    Converged,
    InstantWin,
    MaxSteps,
}

/// `T, F(T), F²(T), …` with the bottom deflation measure `|T_{n,n−1}|` per state.
#[derive(Debug, Clone)]
pub struct QRTrajectory {
    pub states: Vec<SymTridiagonal>,
    pub measures: Vec<f64>,
    pub status: TrajectoryStatus,
}

impl QRTrajectory {
    fn new(t0: &SymTridiagonal) -> Self {
        Self {
            states: vec![t0.clone()],
            measures: vec![bottom(t0)],
            status: TrajectoryStatus::MaxSteps,
        }
    }

    fn push(&mut self, t: SymTridiagonal) {
        self.measures.push(bottom(&t));
        self.states.push(t);
    }

    pub fn last(&self) -> &SymTridiagonal {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn bottom(t: &SymTridiagonal) -> f64 {
    t.off().last().map_or(0.0, |b| b.abs())
}

/// Default deflation threshold `1e-13 ‖Λ‖`.
pub fn default_deflate_tol(spec: &Spectrum) -> f64 {
    spec.tolerances().deflate(spec.norm())
}

/// Iterates the QR step of `f` until every off-diagonal entry is below
/// `deflate_tol` or `k_max` steps were taken.
pub fn run_qr(t0: &SymTridiagonal, f: &ShiftFunction, k_max: usize, deflate_tol: f64) -> Result<QRTrajectory> {
    run_qr_with(t0, f, k_max, deflate_tol, &Tolerances::default())
}

pub fn run_qr_with(
    t0: &SymTridiagonal,
    f: &ShiftFunction,
    k_max: usize,
    deflate_tol: f64,
    tol: &Tolerances,
) -> Result<QRTrajectory> {
    let eig = sym_tridiag_eigen_with(t0, tol)?;
    let logs = f.checked_logs(&eig.values, tol)?;
    let converged = |t: &SymTridiagonal| t.off().iter().all(|b| b.abs() < deflate_tol);
    let mut traj = QRTrajectory::new(t0);
    if converged(t0) {
        traj.status = TrajectoryStatus::Converged;
        return Ok(traj);
    }
    for _ in 0..k_max {
        let eig = sym_tridiag_eigen_with(traj.last(), tol)?;
        let next = step_from_eigen(traj.last(), &eig.vectors, &eig.values, &logs);
        let done = converged(&next);
        traj.push(next);
        if done {
            traj.status = TrajectoryStatus::Converged;
            break;
        }
    }
    Ok(traj)
}

/// Rayleigh quotient iteration until the bottom entry deflates.
pub fn run_rayleigh(spec: &Spectrum, t0: &SymTridiagonal, k_max: usize) -> Result<QRTrajectory> {
    let block = spec.tolerances().block(t0.norm_inf().max(spec.norm()));
    let mut traj = QRTrajectory::new(t0);
    for _ in 0..k_max {
        if bottom(traj.last()) <= block {
            traj.status = TrajectoryStatus::Converged;
            break;
        }
        let out = rayleigh_step(spec, traj.last())?;
        if out.status == StepStatus::InstantWin {
            traj.status = TrajectoryStatus::InstantWin;
            break;
        }
        traj.push(out.matrix);
    }
    if traj.status == TrajectoryStatus::MaxSteps && bottom(traj.last()) <= block {
        traj.status = TrajectoryStatus::Converged;
    }
    Ok(traj)
}

/// Permutation ordering eigenvalues by decreasing `|f|`, the limit chart of
/// the QR iteration of `f`.
pub fn limit_permutation(spec: &Spectrum, f: &ShiftFunction) -> Result<Permutation> {
    let logs = f.log_abs_values(spec.lambdas())?;
    let mut order: Vec<usize> = (0..spec.n()).collect();
    order.sort_by(|&a, &b| logs[b].0.total_cmp(&logs[a].0));
    Permutation::new(order)
}

/// Result of the cubic deflation probe.
#[derive(Debug, Clone, Serialize)]
pub struct CubicProbe {
    /// Least-squares slope of `log|G(T)_{n,n−1}|` against `log|T_{n,n−1}|`.
    pub slope: f64,
    pub intercept: f64,
    /// Largest sampled `|T_{n,n−1}|`.
    pub epsilon: f64,
    /// Whether every `G(T)` stays within `epsilon`.
    pub invariant: bool,
    /// `(|T_{n,n−1}|, |G(T)_{n,n−1}|)` per sample.
    pub points: Vec<(f64, f64)>,
}

/// Samples `T = φ_π(b, ε)` for every leading block `b` (of length `n − 2`)
/// and every `ε`, applies one Rayleigh step and fits the deflation rate.
pub fn cubic_rate_probe(spec: &Spectrum, pi: &Permutation, leading: &[Vec<f64>], epsilons: &[f64]) -> Result<CubicProbe> {
    let n = spec.n();
    if n < 2 {
        return Err(AtlasError::Dimension("the probe needs n ≥ 2".into()));
    }
    let mut points = Vec::new();
    let default_lead = [vec![]];
    let leading = if n == 2 { &default_lead[..] } else { leading };
    for lead in leading {
        if lead.len() + 2 != n {
            return Err(AtlasError::Dimension("leading coordinates must have length n − 2".into()));
        }
        for &eps in epsilons {
            let mut beta = lead.clone();
            beta.push(eps);
            let t = phi(spec, pi, &beta)?;
            let g = rayleigh_step(spec, &t)?;
            points.push((bottom(&t), bottom(&g.matrix)));
        }
    }
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let (slope, intercept) = least_squares(&usable);
    let epsilon = points.iter().fold(0.0_f64, |m, p| m.max(p.0));
    let invariant = points.iter().all(|p| p.1 <= epsilon);
    Ok(CubicProbe {
        slope,
        intercept,
        epsilon,
        invariant,
        points,
    })
}

/// Ordinary least-squares line `y = slope · x + intercept`.
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let m = points.len() as f64;
    if points.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
