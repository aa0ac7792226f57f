//! The surface of isospectral 3×3 tridiagonal matrices as six quadrilateral
//! chart patches, embedded in the 3-sphere of the trace inner product and
//! projected stereographically to ℝ³.

use serde::Serialize;

use crate::charts::{phi, sign_sequence, Spectrum};
use crate::error::{AtlasError, Result};
use crate::linalg::{Permutation, SymTridiagonal};

/// Coordinates of the trace-free part of `t` in an orthonormal basis for
/// `⟨A, B⟩ = tr(AB)` on 3×3 symmetric tridiagonal matrices.
pub fn trace_free_coordinates(t: &SymTridiagonal) -> [f64; 4] {
    let (a, b) = (t.diag(), t.off());
    let s2 = std::f64::consts::SQRT_2;
    [
        (a[0] - a[1]) / s2,
        (a[0] + a[1] - 2.0 * a[2]) / 6.0_f64.sqrt(),
        s2 * b[0],
        s2 * b[1],
    ]
}

fn dot(u: &[f64; 4], v: &[f64; 4]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn unit(u: [f64; 4]) -> [f64; 4] {
    let r = dot(&u, &u).sqrt();
    u.map(|x| x / r)
}

/// Stereographic projection of the unit 3-sphere from `pole` onto the
/// hyperplane orthogonal to it.
#[derive(Debug, Clone)]
pub struct Stereographic {
    pole: [f64; 4],
    basis: [[f64; 4]; 3],
}

impl Stereographic {
    pub fn new(pole: [f64; 4]) -> Self {
        let pole = unit(pole);
        let mut basis: Vec<[f64; 4]> = Vec::with_capacity(3);
        for k in 0..4 {
            let mut e = [0.0; 4];
            e[k] = 1.0;
            for q in std::iter::once(&pole).chain(basis.iter()) {
                let c = dot(&e, q);
                for i in 0..4 {
                    e[i] -= c * q[i];
                }
            }
            if dot(&e, &e) > 1e-3 && basis.len() < 3 {
                basis.push(unit(e));
            }
        }
        Self {
            pole,
            basis: [basis[0], basis[1], basis[2]],
        }
    }

    pub fn pole(&self) -> [f64; 4] {
        self.pole
    }

    pub fn project(&self, v: &[f64; 4]) -> [f64; 3] {
        let denom = 1.0 - dot(v, &self.pole);
        self.basis.map(|e| dot(v, &e) / denom)
    }
}

/// Per-vertex data carried alongside the geometry.
#[derive(Debug, Clone, Serialize)]
pub struct VertexAttributes {
    /// Index of the chart patch (lexicographic order of permutations).
    pub chart: usize,
    /// One-based chart permutation, e.g. `(3,1,2)`.
    pub pi: String,
    pub beta1: f64,
    pub beta2: f64,
    pub sign1: i8,
    pub sign2: i8,
    /// `tr T` before projection.
    pub trace: f64,
    /// `tr T²` before projection.
    pub trace_sq: f64,
    pub matrix: SymTridiagonal,
}

#[derive(Debug, Clone)]
pub struct MeshDocument {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices, counter-clockwise in `(β_1, β_2)`.
    pub faces: Vec<[usize; 4]>,
    pub attributes: Vec<VertexAttributes>,
    /// Vertex range of each chart patch.
    pub patches: Vec<(Permutation, std::ops::Range<usize>)>,
}

/// Grid of `φ_π(β_1, β_2)` over `[−range, range]²` for all six charts.
pub fn build_mesh(spec: &Spectrum, grid: usize, range: f64) -> Result<MeshDocument> {
    if spec.n() != 3 {
        return Err(AtlasError::Dimension(format!("the surface needs n = 3, got {}", spec.n())));
    }
    if grid < 2 {
        return Err(AtlasError::InvalidInput("grid needs at least two points per side".into()));
    }
    if !(range > 0.0) || !range.is_finite() {
        return Err(AtlasError::InvalidInput("range must be positive".into()));
    }
    let proj = Stereographic::new(trace_free_coordinates(&SymTridiagonal::diagonal(spec.lambdas())).map(|x| -x));
    let coord = |i: usize| -range + 2.0 * range * i as f64 / (grid - 1) as f64;
    let mut doc = MeshDocument {
        vertices: Vec::new(),
        faces: Vec::new(),
        attributes: Vec::new(),
        patches: Vec::new(),
    };
    for (chart, pi) in Permutation::all(3).into_iter().enumerate() {
        let start = doc.vertices.len();
        for i in 0..grid {
            for j in 0..grid {
                let beta = [coord(i), coord(j)];
                let t = phi(spec, &pi, &beta)?;
                let v = unit(trace_free_coordinates(&t));
                let signs = sign_sequence(&t);
                doc.vertices.push(proj.project(&v));
                doc.attributes.push(VertexAttributes {
                    chart,
                    pi: pi.to_string(),
                    beta1: beta[0],
                    beta2: beta[1],
                    sign1: signs[0],
                    sign2: signs[1],
                    trace: t.trace(),
                    trace_sq: t.trace_sq(),
                    matrix: t,
                });
            }
        }
        for i in 0..grid - 1 {
            for j in 0..grid - 1 {
                let at = |a: usize, b: usize| start + a * grid + b;
                doc.faces.push([at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
        doc.patches.push((pi, start..doc.vertices.len()));
    }
    Ok(doc)
}
