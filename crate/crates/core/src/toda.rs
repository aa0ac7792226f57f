//! Toda flows: the Lax form, its exact solution by QR factorization, the
//! linear flow in bidiagonal coordinates, Flaschka's particle picture and the
//! asymptotic (wave and scattering) data of the open lattice.

use serde::{Deserialize, Serialize};

use crate::charts::{psi, ChartPoint, NormingVector, Spectrum};
use crate::error::{AtlasError, Result};
use crate::linalg::{sym_tridiag_eigen_with, DenseMatrix, Permutation, SymTridiagonal};
use crate::qr::{qr_step_matrix_with, ShiftFunction};
use crate::tolerance::Tolerances;

/// Largest admissible `x_k − x_{k+1}` before `exp` overflows.
pub const MAX_EXPONENT: f64 = 1400.0;

/// Positions and velocities of the open Toda lattice, centred so both sum to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

impl ParticleState {
    /// Requires centred, finite data of equal length.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(AtlasError::Dimension("positions and velocities differ in length".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(AtlasError::InvalidInput("non-finite particle data".into()));
        }
        for (name, v) in [("positions", &x), ("velocities", &y)] {
            let scale = v.iter().fold(1.0_f64, |m, a| m.max(a.abs()));
            if v.iter().sum::<f64>().abs() > 1e-12 * scale * v.len() as f64 {
                return Err(AtlasError::InvalidInput(format!("{name} must sum to zero")));
            }
        }
        Ok(Self { x, y })
    }

    /// Subtracts the means of `x` and `y`.
    pub fn centred(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(AtlasError::Dimension("positions and velocities differ in length".into()));
        }
        let (mx, my) = (mean(&x), mean(&y));
        Self::new(x.iter().map(|a| a - mx).collect(), y.iter().map(|a| a - my).collect())
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    fn to_vec(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    fn from_slice(v: &[f64]) -> Self {
        let n = v.len() / 2;
        Self {
            x: v[..n].to_vec(),
            y: v[n..].to_vec(),
        }
    }
}

/// `H = Σ y_k²/2 + Σ exp(x_k − x_{k+1})`.
pub fn hamiltonian(p: &ParticleState) -> f64 {
    let kinetic: f64 = p.y.iter().map(|y| 0.5 * y * y).sum();
    let potential: f64 = p.x.windows(2).map(|w| (w[0] - w[1]).exp()).sum();
    kinetic + potential
}

/// `x′ = y`, `y′_k = exp(x_{k−1} − x_k) − exp(x_k − x_{k+1})` with free ends.
pub fn hamiltonian_rhs(p: &ParticleState) -> (Vec<f64>, Vec<f64>) {
    let n = p.n();
    let bonds: Vec<f64> = p.x.windows(2).map(|w| (w[0] - w[1]).exp()).collect();
    let dy = (0..n)
        .map(|k| {
            let left = if k > 0 { bonds[k - 1] } else { 0.0 };
            let right = if k + 1 < n { bonds[k] } else { 0.0 };
            left - right
        })
        .collect();
    (p.y.clone(), dy)
}

/// Largest force magnitude `max_k |y′_k|`.
pub fn max_force(p: &ParticleState) -> f64 {
    hamiltonian_rhs(p).1.iter().fold(0.0_f64, |m, f| m.max(f.abs()))
}

/// Flaschka's variables: `J_kk = −y_k/2`, `J_{k+1,k} = exp((x_k − x_{k+1})/2)/2`.
pub fn flaschka(p: &ParticleState) -> Result<SymTridiagonal> {
    let off = p
        .x
        .windows(2)
        .map(|w| {
            let d = w[0] - w[1];
            if d > MAX_EXPONENT {
                Err(AtlasError::Overflow(format!("particle gap {d:e} overflows")))
            } else {
                Ok(0.5 * (0.5 * d).exp())
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    SymTridiagonal::new(p.y.iter().map(|y| -0.5 * y).collect(), off)
}

/// Inverse of [`flaschka`] on trace-free Jacobi matrices.
pub fn inverse_flaschka(j: &SymTridiagonal) -> Result<ParticleState> {
    j.require_jacobi()?;
    let y: Vec<f64> = j.diag().iter().map(|a| -2.0 * a).collect();
    let mut x = vec![0.0; j.n()];
    for (k, b) in j.off().iter().enumerate() {
        x[k + 1] = x[k] - 2.0 * (2.0 * b).ln();
    }
    let scale = j.norm_inf().max(1.0);
    if j.trace().abs() > 1e-12 * scale * j.n() as f64 {
        return Err(AtlasError::InvalidInput(format!("trace {} is not zero", j.trace())));
    }
    ParticleState::centred(x, y)
}

/// `g(T)` as a dense matrix: polynomials directly, anything else spectrally.
pub fn matrix_function(t: &SymTridiagonal, g: &ShiftFunction) -> Result<DenseMatrix> {
    let dense = t.to_dense();
    match g {
        ShiftFunction::Identity => Ok(dense),
        ShiftFunction::Shift(s) => Ok(DenseMatrix::from_fn(t.n(), |i, j| {
            dense[(i, j)] - if i == j { *s } else { 0.0 }
        })),
        ShiftFunction::Square => Ok(&dense * &dense),
        _ => {
            let eig = sym_tridiag_eigen_with(t, &Tolerances::default())?;
            let values = g.values(&eig.values)?;
            let v = &eig.vectors;
            Ok(DenseMatrix::from_fn(t.n(), |i, j| {
                (0..t.n()).map(|k| v[(k, i)] * values[k] * v[(k, j)]).sum()
            }))
        }
    }
}

/// `Π_a M`: the skew-symmetric matrix sharing the strictly lower triangle of `M`.
pub fn skew_part(m: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(m.n(), |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => m[(i, j)],
        std::cmp::Ordering::Less => -m[(j, i)],
        std::cmp::Ordering::Equal => 0.0,
    })
}

/// The full bracket `[T, Π_a g(T)]`.
pub fn toda_bracket(t: &SymTridiagonal, g: &ShiftFunction) -> Result<DenseMatrix> {
    let td = t.to_dense();
    let k = skew_part(&matrix_function(t, g)?);
    let a = &td * &k;
    let b = &k * &td;
    Ok(DenseMatrix::from_fn(t.n(), |i, j| a[(i, j)] - b[(i, j)]))
}

/// Right-hand side of `T′ = [T, Π_a g(T)]`, read off the tridiagonal band.
pub fn toda_rhs(t: &SymTridiagonal, g: &ShiftFunction) -> Result<SymTridiagonal> {
    let bracket = toda_bracket(t, g)?;
    let n = t.n();
    let scale = bracket.max_abs().max(f64::MIN_POSITIVE);
    let stray = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i.abs_diff(*j) > 1)
        .fold(0.0_f64, |m, (i, j)| m.max(bracket[(i, j)].abs()));
    debug_assert!(stray <= 1e-8 * scale.max(1.0), "bracket leaves the tridiagonal band: {stray:e}");
    Ok(SymTridiagonal::from_dense_band(&bracket))
}

/// `T(t) = Q(exp(t g(T0)))ᵀ T0 Q(exp(t g(T0)))`.
///
/// Off-diagonal entries keep relative accuracy while `t (max g − min g)` stays
/// below about 700; beyond that the smallest ones flush to zero.
/// [`toda_flow_chart`] has no such limit.
pub fn toda_flow_factorized(t0: &SymTridiagonal, g: &ShiftFunction, t: f64) -> Result<SymTridiagonal> {
    toda_flow_factorized_with(t0, g, t, &Tolerances::default())
}

pub fn toda_flow_factorized_with(t0: &SymTridiagonal, g: &ShiftFunction, t: f64, tol: &Tolerances) -> Result<SymTridiagonal> {
    if t == 0.0 {
        return Ok(t0.clone());
    }
    qr_step_matrix_with(t0, &ShiftFunction::exponential(t, g.clone()), tol)
}

/// The flow in bidiagonal coordinates: `β_i(t) = exp((g(λ_{i+1}^π) − g(λ_i^π)) t) β_i(0)`.
pub fn toda_flow_chart(spec: &Spectrum, p: &ChartPoint, g: &ShiftFunction, t: f64) -> Result<ChartPoint> {
    if p.pi.n() != spec.n() || p.beta.len() + 1 != spec.n() {
        return Err(AtlasError::Dimension("chart point does not match the spectrum".into()));
    }
    let gv = p.pi.rearrange(&g.values(spec.lambdas())?);
    let beta = p
        .beta
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let rate = (gv[i + 1] - gv[i]) * t;
            if rate > MAX_EXPONENT {
                return Err(AtlasError::Overflow(format!("flow exponent {rate:e}")));
            }
            Ok(b * rate.exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ChartPoint { pi: p.pi.clone(), beta })
}

/// Norming constants along the standard Toda flow: `w(t) ∝ exp(tΛ) w(0)`.
pub fn norming_flow(spec: &Spectrum, w0: &NormingVector, t: f64) -> Result<NormingVector> {
    if t == 0.0 {
        return Ok(w0.clone());
    }
    let logs: Vec<f64> = w0
        .order()
        .images()
        .iter()
        .zip(w0.weights())
        .map(|(&k, w)| t * spec.lambdas()[k] + w.ln())
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    NormingVector::new(w0.order().clone(), logs.iter().map(|l| (l - top).exp()).collect())
}

/// Classical fourth-order Runge–Kutta with fixed step `h`, reporting the state
/// at each requested time (in order, starting from time 0).
pub fn rk4_integrate<F>(y0: &[f64], times: &[f64], h: f64, mut rhs: F) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let axpy = |y: &[f64], a: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(u, v)| u + a * v).collect() };
    let mut y = y0.to_vec();
    let mut now = 0.0_f64;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - now;
        let steps = (span.abs() / h.abs()).ceil() as usize;
        if steps > 0 {
            let dt = span / steps as f64;
            for _ in 0..steps {
                let k1 = rhs(&y)?;
                let k2 = rhs(&axpy(&y, 0.5 * dt, &k1))?;
                let k3 = rhs(&axpy(&y, 0.5 * dt, &k2))?;
                let k4 = rhs(&axpy(&y, dt, &k3))?;
                for i in 0..y.len() {
                    y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
        now = target;
        out.push(y.clone());
    }
    Ok(out)
}

/// Default fixed step of the ODE oracles.
pub const RK4_STEP: f64 = 1e-3;

/// RK4 solution of the Lax equation at the given times.
pub fn lax_trajectory(t0: &SymTridiagonal, g: &ShiftFunction, times: &[f64], h: f64) -> Result<Vec<SymTridiagonal>> {
    let n = t0.n();
    let pack = |t: &SymTridiagonal| -> Vec<f64> { t.diag().iter().chain(t.off()).copied().collect() };
    let unpack = |v: &[f64]| SymTridiagonal::new(v[..n].to_vec(), v[n..].to_vec());
    let states = rk4_integrate(&pack(t0), times, h, |v| {
        let t = unpack(v)?;
        Ok(pack(&toda_rhs(&t, g)?))
    })?;
    states.iter().map(|v| unpack(v)).collect()
}

/// RK4 solution of Hamilton's equations at the given times.
pub fn particle_trajectory(p0: &ParticleState, times: &[f64], h: f64) -> Result<Vec<ParticleState>> {
    let states = rk4_integrate(&p0.to_vec(), times, h, |v| {
        let (dx, dy) = hamiltonian_rhs(&ParticleState::from_slice(v));
        Ok(dx.into_iter().chain(dy).collect())
    })?;
    Ok(states.iter().map(|v| ParticleState::from_slice(v)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `t → −∞`.
    Minus,
    /// `t → +∞`.
    Plus,
}

impl Side {
    /// The chart in which the lattice is asymptotically diagonal.
    pub fn permutation(self, n: usize) -> Permutation {
        match self {
            Side::Minus => Permutation::identity(n),
            Side::Plus => Permutation::reversal(n),
        }
    }
}

/// Free motion `x_k(t) ≈ c_k t + d_k` on one side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticData {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub side: Side,
}

/// Asymptotic velocities and phases of the lattice started at `p0`.
pub fn wave_map(p0: &ParticleState, side: Side) -> Result<AsymptoticData> {
    let j = flaschka(p0)?;
    j.require_jacobi()?;
    let eig = sym_tridiag_eigen_with(&j, &Tolerances::default())?;
    let spec = Spectrum::new(eig.values)?;
    let n = spec.n();
    let pi = side.permutation(n);
    let beta = psi(&spec, &pi, &j)?.beta;
    let logs: Vec<f64> = beta.iter().map(|b| b.ln()).collect();
    let nf = n as f64;
    let c = pi.rearrange(spec.lambdas()).iter().map(|l| -2.0 * l).collect();
    let d = (1..=n)
        .map(|k| {
            let mut acc = (nf - 2.0 * k as f64 + 1.0) * std::f64::consts::LN_2;
            for jj in 1..n {
                let weight = if jj < k { -2.0 * jj as f64 / nf } else { 2.0 * (nf - jj as f64) / nf };
                acc += weight * logs[jj - 1];
            }
            acc
        })
        .collect();
    Ok(AsymptoticData { c, d, side })
}

/// Maps the data at `t → −∞` to the data at `t → +∞`.
pub fn scattering_map(a: &AsymptoticData) -> Result<AsymptoticData> {
    if a.side != Side::Minus {
        return Err(AtlasError::InvalidInput("scattering starts from the t → −∞ data".into()));
    }
    let n = a.c.len();
    if a.d.len() != n {
        return Err(AtlasError::Dimension("velocities and phases differ in length".into()));
    }
    let scale = a.c.iter().fold(f64::MIN_POSITIVE, |m, c| m.max(c.abs()));
    for j in 0..n {
        for k in j + 1..n {
            if (a.c[j] - a.c[k]).abs() <= 1e-12 * scale {
                return Err(AtlasError::DegenerateVelocities);
            }
        }
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for k in 0..n {
        let gap = |j: usize| (a.c[j] - a.c[k]).abs().ln();
        let before: f64 = (0..k).map(gap).sum();
        let after: f64 = (k + 1..n).map(gap).sum();
        c[n - 1 - k] = a.c[k];
        d[n - 1 - k] = a.d[k] + 2.0 * before - 2.0 * after;
    }
    Ok(AsymptoticData { c, d, side: Side::Plus })
}

/// A least-squares line fit of each particle over a tail window.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoteFit {
    pub data: AsymptoticData,
    /// Largest absolute deviation of a sample from its fitted line.
    pub residual: f64,
    /// Largest force seen on the window.
    pub force: f64,
}

/// Fits `x_k(t) ≈ c_k t + d_k` over the samples `(t, state)`; the window must
/// be free (all forces at most `force_tol`).
pub fn fit_asymptote(samples: &[(f64, ParticleState)], side: Side, force_tol: f64) -> Result<AsymptoteFit> {
    let Some((_, first)) = samples.first() else {
        return Err(AtlasError::InvalidInput("no samples to fit".into()));
    };
    if samples.len() < 2 {
        return Err(AtlasError::InvalidInput("need at least two samples".into()));
    }
    let n = first.n();
    let force = samples.iter().fold(0.0_f64, |m, (_, p)| m.max(max_force(p)));
    if force > force_tol {
        return Err(AtlasError::TailNotFree { force, tol: force_tol });
    }
    let mut c = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    let mut residual = 0.0_f64;
    for k in 0..n {
        let pts: Vec<(f64, f64)> = samples.iter().map(|(t, p)| (*t, p.x[k])).collect();
        let (slope, intercept) = crate::qr::least_squares(&pts);
        for (t, x) in &pts {
            residual = residual.max((x - slope * t - intercept).abs());
        }
        c.push(slope);
        d.push(intercept);
    }
    Ok(AsymptoteFit {
        data: AsymptoticData { c, d, side },
        residual,
        force,
    })
}

/// Integrates to `±t_max` and fits the tail window `[0.8 t_max, t_max]`.
pub fn simulate_asymptote(p0: &ParticleState, side: Side, t_max: f64, h: f64, force_tol: f64) -> Result<AsymptoteFit> {
    let sign = match side {
        Side::Minus => -1.0,
        Side::Plus => 1.0,
    };
    let samples_n = 61;
    let times: Vec<f64> = (0..samples_n)
        .map(|i| sign * (0.8 * t_max + 0.2 * t_max * i as f64 / (samples_n - 1) as f64))
        .collect();
    let states = particle_trajectory(p0, &times, h)?;
    let samples: Vec<(f64, ParticleState)> = times.into_iter().zip(states).collect();
    fit_asymptote(&samples, side, force_tol)
}
