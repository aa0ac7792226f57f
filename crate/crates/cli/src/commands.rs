use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use isoatlas::charts::{norming_constants, phi, psi, select_chart, ChartPoint, Spectrum};
use isoatlas::linalg::{sym_tridiag_eigen_with, Permutation, SymTridiagonal};
use isoatlas::mesh::build_mesh;
use isoatlas::qr::{
    default_deflate_tol, limit_permutation, run_qr_with, run_rayleigh, shifted_step_matrix, QRTrajectory, ShiftFunction,
    TrajectoryStatus,
};
use isoatlas::toda::{
    flaschka, lax_trajectory, scattering_map, simulate_asymptote, toda_flow_chart, toda_flow_factorized_with, wave_map,
    AsymptoteFit, AsymptoticData, ParticleState, Side, RK4_STEP,
};
use isoatlas::{AtlasError, Tolerances};
use serde::Serialize;

use crate::exit::ParseError;
use crate::io::{self, Initial, MatrixDocument, Metadata, ParticleDocument};

fn spectrum_of(t: &SymTridiagonal, tol: Tolerances) -> Result<Spectrum> {
    let eig = sym_tridiag_eigen_with(t, &tol)?;
    Ok(Spectrum::with_tolerances(eig.values, tol)?)
}

#[derive(Serialize)]
struct EigenReport {
    eigenvalues: Vec<f64>,
    /// `|Q_{k1}|` in ascending eigenvalue order; absent for non-Jacobi input.
    norming_constants: Option<Vec<f64>>,
    residual: f64,
}

pub fn eigen(input: &Path, output: &Option<PathBuf>, tol: Tolerances) -> Result<()> {
    let t = io::read_matrix(input)?.to_matrix()?;
    let eig = sym_tridiag_eigen_with(&t, &tol)?;
    let norming = if t.is_jacobi() {
        Some(norming_constants(&t, &Permutation::identity(t.n()))?.weights().to_vec())
    } else {
        None
    };
    let report = EigenReport {
        residual: eig.residual(&t),
        eigenvalues: eig.values,
        norming_constants: norming,
    };
    io::emit_json(output, &report)
}

#[derive(Serialize)]
struct ChartReport {
    pi: Permutation,
    beta: Vec<f64>,
    /// `max |φ(ψ(T)) − T|`.
    residual: f64,
}

pub fn chart_forward(input: &Path, pi: Option<Permutation>, output: &Option<PathBuf>, tol: Tolerances) -> Result<()> {
    let t = io::read_matrix(input)?.to_matrix()?;
    let spec = spectrum_of(&t, tol)?;
    let pi = match pi {
        Some(pi) => pi,
        None => select_chart(&spec, &t)?,
    };
    let p = psi(&spec, &pi, &t)?;
    let back = phi(&spec, &pi, &p.beta)?;
    let report = ChartReport {
        residual: back.max_abs_diff(&t),
        pi: p.pi,
        beta: p.beta,
    };
    io::emit_json(output, &report)
}

pub fn chart_inverse(
    spectrum: &[f64],
    pi: Permutation,
    beta: Vec<f64>,
    output: &Option<PathBuf>,
    tol: Tolerances,
) -> Result<()> {
    let spec = Spectrum::with_tolerances(spectrum.to_vec(), tol)?;
    let p = ChartPoint::new(pi, beta)?;
    let t = phi(&spec, &p.pi, &p.beta)?;
    let meta = Metadata {
        spectrum: Some(spec.lambdas().to_vec()),
        pi: Some(p.pi),
        beta: Some(p.beta),
    };
    io::emit_json(output, &MatrixDocument::from_matrix(&t, Some(meta)))
}

/// Shift strategies accepted by `qr`.
#[derive(Debug, Clone, PartialEq)]
pub enum ShiftSpec {
    Identity,
    Fixed(f64),
    Rayleigh,
}

impl std::str::FromStr for ShiftSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        match s {
            "identity" | "id" => Ok(Self::Identity),
            "rayleigh" => Ok(Self::Rayleigh),
            _ => {
                let value = s
                    .strip_prefix("shift=")
                    .or_else(|| s.strip_prefix("s="))
                    .ok_or_else(|| format!("expected identity, shift=VALUE or rayleigh, got {s:?}"))?;
                value
                    .parse::<f64>()
                    .map(Self::Fixed)
                    .map_err(|e| format!("bad shift value {value:?}: {e}"))
            }
        }
    }
}

fn status_name(s: TrajectoryStatus) -> &'static str {
    match s {
        TrajectoryStatus::Converged => "converged",
        TrajectoryStatus::InstantWin => "instant-win",
        TrajectoryStatus::MaxSteps => "max-steps",
    }
}

/// One shifted step for a shift on the spectrum, followed by the deflation check.
fn on_spectrum_step(spec: &Spectrum, t0: &SymTridiagonal, s: f64) -> Result<QRTrajectory> {
    let next = shifted_step_matrix(spec, t0, s)?;
    let block = spec.tolerances().block(t0.norm_inf().max(spec.norm()));
    let bottom = |t: &SymTridiagonal| t.off().last().map_or(0.0, |b| b.abs());
    let status = if bottom(&next) <= block {
        TrajectoryStatus::Converged
    } else {
        TrajectoryStatus::MaxSteps
    };
    Ok(QRTrajectory {
        measures: vec![bottom(t0), bottom(&next)],
        states: vec![t0.clone(), next],
        status,
    })
}

pub fn qr(input: &Path, shift: &ShiftSpec, steps: usize, output: &Option<PathBuf>, tol: Tolerances) -> Result<()> {
    let t0 = io::read_matrix(input)?.to_matrix()?;
    let spec = spectrum_of(&t0, tol)?;
    let deflate = default_deflate_tol(&spec);
    let traj = match shift {
        ShiftSpec::Identity => run_qr_with(&t0, &ShiftFunction::Identity, steps, deflate, &tol)?,
        ShiftSpec::Fixed(s) => match run_qr_with(&t0, &ShiftFunction::Shift(*s), steps, deflate, &tol) {
            Err(AtlasError::ShiftOnSpectrum { .. }) if steps > 0 => on_spectrum_step(&spec, &t0, *s)?,
            other => other?,
        },
        ShiftSpec::Rayleigh => run_rayleigh(&spec, &t0, steps)?,
    };
    let n = t0.n();
    let mut header = vec!["k".to_string()];
    header.extend((1..n).map(|j| format!("b_{j}")));
    header.push("measure".into());
    let rows = traj.states.iter().zip(&traj.measures).enumerate().map(|(k, (t, &m))| {
        std::iter::once(k.to_string())
            .chain(t.off().iter().map(|&b| io::num(b)))
            .chain(std::iter::once(io::num(m)))
    });
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    io::emit(output, &io::csv_bytes(&header, rows)?)?;
    eprintln!("status: {}", status_name(traj.status));
    Ok(())
}

/// Generators accepted by `toda`.
#[derive(Debug, Clone, PartialEq)]
pub enum GSpec {
    Identity,
    Square,
    Table(Vec<f64>),
}

impl std::str::FromStr for GSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        match s {
            "id" | "identity" => Ok(Self::Identity),
            "square" => Ok(Self::Square),
            _ => {
                let list = s
                    .strip_prefix("table=")
                    .ok_or_else(|| format!("expected id, square or table=V1,V2,..., got {s:?}"))?;
                list.split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad table value {v:?}: {e}")))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map(Self::Table)
            }
        }
    }
}

impl GSpec {
    fn function(&self) -> ShiftFunction {
        match self {
            Self::Identity => ShiftFunction::Identity,
            Self::Square => ShiftFunction::Square,
            Self::Table(v) => ShiftFunction::Tabulated(v.clone()),
        }
    }
}

fn initial_matrix(input: &Path) -> Result<SymTridiagonal> {
    match io::read_initial(input)? {
        Initial::Matrix(doc) => doc.to_matrix(),
        Initial::Particles(doc) => Ok(flaschka(&doc.to_state()?)?),
    }
}

pub fn toda(input: &Path, g: &GSpec, t_max: f64, steps: usize, output: &Option<PathBuf>, tol: Tolerances) -> Result<()> {
    if steps == 0 || !t_max.is_finite() {
        return Err(ParseError("toda needs a finite --tmax and --steps ≥ 1".into()).into());
    }
    let t0 = initial_matrix(input)?;
    let spec = spectrum_of(&t0, tol)?;
    let g = g.function();
    let pi = limit_permutation(&spec, &ShiftFunction::exponential(1.0, g.clone()))?;
    let p0 = match psi(&spec, &pi, &t0) {
        Ok(p) => p,
        Err(AtlasError::NotInChart { .. }) => psi(&spec, &select_chart(&spec, &t0)?, &t0)?,
        Err(e) => return Err(e.into()),
    };
    let times: Vec<f64> = (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect();
    let rk4 = lax_trajectory(&t0, &g, &times, RK4_STEP).context("RK4 integration of the Lax equation")?;
    let n = t0.n();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|j| format!("a_{j}")));
    header.extend((1..n).map(|j| format!("b_{j}")));
    header.push("err_chart".into());
    header.push("err_rk4".into());
    let mut rows = Vec::with_capacity(times.len());
    for (&t, ode) in times.iter().zip(&rk4) {
        let exact = toda_flow_factorized_with(&t0, &g, t, &tol)?;
        let chart = toda_flow_chart(&spec, &p0, &g, t)?;
        let via_chart = phi(&spec, &chart.pi, &chart.beta)?;
        let mut row = vec![t];
        row.extend_from_slice(exact.diag());
        row.extend_from_slice(exact.off());
        row.push(via_chart.max_abs_diff(&exact));
        row.push(ode.max_abs_diff(&exact));
        rows.push(row);
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    io::emit(output, &io::csv_bytes(&header, rows.iter().map(|r| r.iter().map(|&x| io::num(x))))?)
}

/// Default lattice for `scatter`: Flaschka spectrum near `{−1.03, 0, 1.03}`.
pub fn default_particles() -> ParticleDocument {
    ParticleDocument {
        x: vec![0.0, 0.0, 0.0],
        y: vec![1.5, 0.0, -1.5],
    }
}

#[derive(Serialize)]
struct Line {
    c: Vec<f64>,
    d: Vec<f64>,
}

impl From<&AsymptoticData> for Line {
    fn from(a: &AsymptoticData) -> Self {
        Self {
            c: a.c.clone(),
            d: a.d.clone(),
        }
    }
}

#[derive(Serialize)]
struct Fit {
    c: Vec<f64>,
    d: Vec<f64>,
    residual: f64,
    force: f64,
}

impl From<&AsymptoteFit> for Fit {
    fn from(f: &AsymptoteFit) -> Self {
        Self {
            c: f.data.c.clone(),
            d: f.data.d.clone(),
            residual: f.residual,
            force: f.force,
        }
    }
}

#[derive(Serialize)]
struct Deltas {
    /// Closed form `+` data against `S(W⁻)`.
    scattering: f64,
    /// Closed form `−` data against the fit at `t → −∞`.
    fit_minus: f64,
    /// Closed form `+` data against the fit at `t → +∞`.
    fit_plus: f64,
    max: f64,
}

#[derive(Serialize)]
struct ScatterReport {
    x: Vec<f64>,
    y: Vec<f64>,
    spectrum: Vec<f64>,
    t_max: f64,
    minus: Line,
    plus: Line,
    scattered: Line,
    fit_minus: Fit,
    fit_plus: Fit,
    deltas: Deltas,
    sum_d_minus: f64,
    sum_d_plus: f64,
}

fn max_delta(a: &AsymptoticData, b: &AsymptoticData) -> f64 {
    a.c.iter()
        .zip(&b.c)
        .chain(a.d.iter().zip(&b.d))
        .fold(0.0_f64, |m, (u, v)| m.max((u - v).abs()))
}

pub fn scatter(input: &Option<PathBuf>, t_max: f64, force_tol: f64, output: &Option<PathBuf>, tol: Tolerances) -> Result<()> {
    let doc = match input {
        Some(path) => io::read_particles(path)?,
        None => default_particles(),
    };
    let p0: ParticleState = doc.to_state()?;
    let j = flaschka(&p0)?;
    let spec = spectrum_of(&j, tol)?;
    let minus = wave_map(&p0, Side::Minus)?;
    let plus = wave_map(&p0, Side::Plus)?;
    let scattered = scattering_map(&minus)?;
    let fit_minus = simulate_asymptote(&p0, Side::Minus, t_max, RK4_STEP, force_tol)?;
    let fit_plus = simulate_asymptote(&p0, Side::Plus, t_max, RK4_STEP, force_tol)?;
    let scattering = max_delta(&plus, &scattered);
    let dm = max_delta(&minus, &fit_minus.data);
    let dp = max_delta(&plus, &fit_plus.data);
    let report = ScatterReport {
        x: p0.x.clone(),
        y: p0.y.clone(),
        spectrum: spec.lambdas().to_vec(),
        t_max,
        sum_d_minus: minus.d.iter().sum(),
        sum_d_plus: plus.d.iter().sum(),
        minus: (&minus).into(),
        plus: (&plus).into(),
        scattered: (&scattered).into(),
        fit_minus: (&fit_minus).into(),
        fit_plus: (&fit_plus).into(),
        deltas: Deltas {
            scattering,
            fit_minus: dm,
            fit_plus: dp,
            max: scattering.max(dm).max(dp),
        },
    };
    io::emit_json(output, &report)
}

/// Wavefront OBJ text with one group per chart patch.
fn obj_text(doc: &isoatlas::mesh::MeshDocument) -> String {
    use std::fmt::Write;
    let mut s = String::from("# isospectral surface, one quad patch per chart\n");
    for (pi, range) in &doc.patches {
        let tag: String = pi.one_based().iter().map(|k| k.to_string()).collect();
        let _ = writeln!(s, "g chart_{tag}");
        for v in &doc.vertices[range.clone()] {
            let _ = writeln!(s, "v {} {} {}", io::num(v[0]), io::num(v[1]), io::num(v[2]));
        }
        for f in doc.faces.iter().filter(|f| range.contains(&f[0])) {
            let _ = writeln!(s, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
        }
    }
    s
}

fn attributes_csv(doc: &isoatlas::mesh::MeshDocument) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "vertex", "chart", "pi", "beta1", "beta2", "sign1", "sign2", "trace", "trace_sq", "a1", "a2", "a3", "b1", "b2",
    ])?;
    for (i, a) in doc.attributes.iter().enumerate() {
        let (d, o) = (a.matrix.diag(), a.matrix.off());
        let mut rec = vec![
            (i + 1).to_string(),
            a.chart.to_string(),
            a.pi.clone(),
            io::num(a.beta1),
            io::num(a.beta2),
            a.sign1.to_string(),
            a.sign2.to_string(),
            io::num(a.trace),
            io::num(a.trace_sq),
        ];
        rec.extend(d.iter().chain(o).map(|&x| io::num(x)));
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!(e.to_string()))
}

pub fn mesh(
    spectrum: &[f64],
    grid: usize,
    range: f64,
    output: &Option<PathBuf>,
    attributes: &Option<PathBuf>,
    tol: Tolerances,
) -> Result<()> {
    let spec = Spectrum::with_tolerances(spectrum.to_vec(), tol)?;
    let doc = build_mesh(&spec, grid, range)?;
    io::emit(output, obj_text(&doc).as_bytes())?;
    let sidecar = attributes.clone().or_else(|| output.as_ref().map(|p| p.with_extension("csv")));
    if let Some(path) = sidecar {
        io::emit(&Some(path), &attributes_csv(&doc)?)?;
    }
    Ok(())
}
