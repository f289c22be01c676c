//! Surface measures at a point: metrics, curvatures, principal data and the
//! stretch and curvature measures taken along the initial principal directions.

use nalgebra::{Matrix2, Vector2, Vector3};

use crate::splines::ElementBasis;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KinematicsError {
    #[error("degenerate surface metric (det = {det:e})")]
    SingularGeometry { det: f64 },
    #[error("element {element:?} is inverted or degenerate (det = {det:e})")]
    ElementInversion { element: Option<usize>, det: f64 },
}

impl KinematicsError {
    /// Attaches an element id to an inversion error.
    pub fn in_element(self, element: usize) -> Self {
        match self {
            KinematicsError::ElementInversion { det, .. } => KinematicsError::ElementInversion { element: Some(element), det },
            other => other,
        }
    }
}

/// Slot of the second derivative `x_{,αβ}` in `[x_{,11}, x_{,22}, x_{,12}]`.
pub const fn second_slot(alpha: usize, beta: usize) -> usize {
    if alpha == beta {
        alpha
    } else {
        2
    }
}

/// Tangent frame of a surface point together with its first and second
/// fundamental forms.
#[derive(Clone, Debug)]
pub struct SurfaceFrame {
    pub position: Vector3<f64>,
    pub tangents: [Vector3<f64>; 2],
    /// `x_{,11}, x_{,22}, x_{,12}`.
    pub second: [Vector3<f64>; 3],
    pub normal: Vector3<f64>,
    /// Dual basis `a^α = a^{αβ} a_β`.
    pub dual: [Vector3<f64>; 2],
    pub metric: Matrix2<f64>,
    pub metric_inv: Matrix2<f64>,
    pub curvature: Matrix2<f64>,
    /// `christoffel[γ][α][β] = x_{,αβ} · a^γ`.
    pub christoffel: [[[f64; 2]; 2]; 2],
    /// `|a_1 × a_2|`.
    pub area_density: f64,
}

impl SurfaceFrame {
    pub fn new(position: Vector3<f64>, tangents: [Vector3<f64>; 2], second: [Vector3<f64>; 3]) -> Result<Self, KinematicsError> {
        let cross = tangents[0].cross(&tangents[1]);
        let area_density = cross.norm();
        let metric = Matrix2::new(
            tangents[0].dot(&tangents[0]),
            tangents[0].dot(&tangents[1]),
            tangents[1].dot(&tangents[0]),
            tangents[1].dot(&tangents[1]),
        );
        let det = metric.determinant();
        let scale = metric[(0, 0)] * metric[(1, 1)];
        if !(det > 1e-24 * scale) || !(area_density > 0.0) {
            return Err(KinematicsError::ElementInversion { element: None, det });
        }
        let normal = cross / area_density;
        let metric_inv = inverse_sym(&metric);
        let dual = [
            tangents[0] * metric_inv[(0, 0)] + tangents[1] * metric_inv[(0, 1)],
            tangents[0] * metric_inv[(1, 0)] + tangents[1] * metric_inv[(1, 1)],
        ];
        let curvature = Matrix2::new(
            second[0].dot(&normal),
            second[2].dot(&normal),
            second[2].dot(&normal),
            second[1].dot(&normal),
        );
        let mut christoffel = [[[0.0; 2]; 2]; 2];
        for (g, row) in christoffel.iter_mut().enumerate() {
            for (a, col) in row.iter_mut().enumerate() {
                for (b, v) in col.iter_mut().enumerate() {
                    *v = second[second_slot(a, b)].dot(&dual[g]);
                }
            }
        }
        Ok(Self { position, tangents, second, normal, dual, metric, metric_inv, curvature, christoffel, area_density })
    }

    /// Frame of the surface interpolated by `basis` over control positions `pts`.
    pub fn from_basis(pts: &[Vector3<f64>], basis: &ElementBasis) -> Result<Self, KinematicsError> {
        let (x, d1, d2) = basis.derivatives(pts);
        Self::new(x, d1, d2)
    }
}

/// Inverse of a symmetric 2×2 matrix, kept exactly symmetric.
pub fn inverse_sym(m: &Matrix2<f64>) -> Matrix2<f64> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let off = -0.5 * (m[(0, 1)] + m[(1, 0)]) / det;
    Matrix2::new(m[(1, 1)] / det, off, off, m[(0, 0)] / det)
}

/// `vᵀ M w` for contravariant components `v, w`.
fn contract(v: &Vector2<f64>, m: &Matrix2<f64>, w: &Vector2<f64>) -> f64 {
    v.dot(&(m * w))
}

/// Reference-configuration data needed by the material laws.
#[derive(Clone, Debug)]
pub struct ReferenceState {
    pub metric: Matrix2<f64>,
    pub metric_inv: Matrix2<f64>,
    pub curvature: Matrix2<f64>,
    /// `B^α_β = A^{αγ} B_{γβ}`.
    pub mixed_curvature: Matrix2<f64>,
    /// `√det A_{αβ}`.
    pub area_density: f64,
    pub mean_curvature: f64,
    /// Initial principal curvatures in ascending order.
    pub principal_curvatures: [f64; 2],
    /// Contravariant components `L^α_i` of the principal directions.
    pub principal_dirs: [Vector2<f64>; 2],
    /// `(L_1 B L_2 + L_2 B L_1)`, zero up to round-off.
    pub twist_curvature: f64,
}

impl ReferenceState {
    /// Builds the state from the covariant metric and curvature components.
    pub fn from_forms(metric: Matrix2<f64>, curvature: Matrix2<f64>) -> Result<Self, KinematicsError> {
        let det = metric.determinant();
        if !(det > 0.0) || !(metric[(0, 0)] > 0.0) {
            return Err(KinematicsError::SingularGeometry { det });
        }
        let metric_inv = inverse_sym(&metric);
        let mixed = metric_inv * curvature;
        let mean = 0.5 * mixed.trace();
        let gauss = curvature.determinant() / det;
        let disc = (mean * mean - gauss).max(0.0).sqrt();
        let kappa = [mean - disc, mean + disc];
        let inv_length = det.powf(-0.25);
        let umbilic = (kappa[1] - kappa[0]).abs() < 1e-9 * kappa[0].abs().max(kappa[1].abs()).max(inv_length);
        let mut dirs = if umbilic {
            [
                Vector2::new(1.0 / metric[(0, 0)].sqrt(), 0.0),
                Vector2::new(metric_inv[(1, 0)], metric_inv[(1, 1)]) / metric_inv[(1, 1)].sqrt(),
            ]
        } else {
            let mut d = [Vector2::zeros(); 2];
            for i in 0..2 {
                let m = curvature - metric * kappa[i];
                let r1 = Vector2::new(-m[(0, 1)], m[(0, 0)]);
                let r2 = Vector2::new(m[(1, 1)], -m[(1, 0)]);
                let v = if r1.norm_squared() >= r2.norm_squared() { r1 } else { r2 };
                d[i] = v / contract(&v, &metric, &v).sqrt();
            }
            // make the pair exactly A-orthogonal
            let p = contract(&d[0], &metric, &d[1]);
            d[1] -= d[0] * p;
            d[1] /= contract(&d[1], &metric, &d[1]).sqrt();
            d
        };
        for (i, d) in dirs.iter_mut().enumerate() {
            if (metric * *d)[i] < 0.0 {
                *d = -*d;
            }
        }
        let twist = 2.0 * contract(&dirs[0], &curvature, &dirs[1]);
        Ok(Self {
            metric,
            metric_inv,
            curvature,
            mixed_curvature: mixed,
            area_density: det.sqrt(),
            mean_curvature: mean,
            principal_curvatures: kappa,
            principal_dirs: dirs,
            twist_curvature: twist,
        })
    }
}

/// Current-configuration measures relative to a reference state.
#[derive(Clone, Debug)]
pub struct CurrentState {
    pub metric: Matrix2<f64>,
    pub metric_inv: Matrix2<f64>,
    pub curvature: Matrix2<f64>,
    /// Area stretch `J = √(det a / det A)`.
    pub stretch: f64,
    pub mean_curvature: f64,
    pub gauss_curvature: f64,
    /// Current principal curvatures `H ∓ √(H² − κ)`.
    pub principal_curvatures: [f64; 2],
    /// Green-Lagrange strain `ε_{αβ} = (a_{αβ} − A_{αβ})/2`.
    pub strain: Matrix2<f64>,
    /// `K_{αβ} = b_{αβ} − B_{αβ}`.
    pub curvature_change: Matrix2<f64>,
    /// `λ_i = √(L_i a L_i)`.
    pub stretches: [f64; 2],
    /// `κ_i = L_i b L_i / λ_i²`.
    pub dir_curvatures: [f64; 2],
    /// `κ_12 = (L_1 b L_2 + L_2 b L_1)/(λ_1 λ_2)`.
    pub twist: f64,
}

impl CurrentState {
    pub fn from_forms(reference: &ReferenceState, metric: Matrix2<f64>, curvature: Matrix2<f64>) -> Result<Self, KinematicsError> {
        let det = metric.determinant();
        let scale = metric[(0, 0)].abs() * metric[(1, 1)].abs();
        if !(det > 1e-24 * scale) || !(metric[(0, 0)] > 0.0) {
            return Err(KinematicsError::ElementInversion { element: None, det });
        }
        let metric_inv = inverse_sym(&metric);
        let stretch = (det / reference.metric.determinant()).sqrt();
        let mean = 0.5 * (metric_inv * curvature).trace();
        let gauss = curvature.determinant() / det;
        let disc = (mean * mean - gauss).max(0.0).sqrt();
        let l = &reference.principal_dirs;
        let stretches = [contract(&l[0], &metric, &l[0]).sqrt(), contract(&l[1], &metric, &l[1]).sqrt()];
        let dir_curvatures = [
            contract(&l[0], &curvature, &l[0]) / (stretches[0] * stretches[0]),
            contract(&l[1], &curvature, &l[1]) / (stretches[1] * stretches[1]),
        ];
        let twist = 2.0 * contract(&l[0], &curvature, &l[1]) / (stretches[0] * stretches[1]);
        Ok(Self {
            metric,
            metric_inv,
            curvature,
            stretch,
            mean_curvature: mean,
            gauss_curvature: gauss,
            principal_curvatures: [mean - disc, mean + disc],
            strain: (metric - reference.metric) * 0.5,
            curvature_change: curvature - reference.curvature,
            stretches,
            dir_curvatures,
            twist,
        })
    }
}

/// Reference frame and state at a point of an element.
pub fn reference_state(pts: &[Vector3<f64>], basis: &ElementBasis) -> Result<(SurfaceFrame, ReferenceState), KinematicsError> {
    let frame = SurfaceFrame::from_basis(pts, basis).map_err(|e| match e {
        KinematicsError::ElementInversion { det, .. } => KinematicsError::SingularGeometry { det },
        other => other,
    })?;
    let state = ReferenceState::from_forms(frame.metric, frame.curvature)?;
    Ok((frame, state))
}

/// Current frame and state at a point of an element.
pub fn current_state(
    pts: &[Vector3<f64>],
    basis: &ElementBasis,
    reference: &ReferenceState,
) -> Result<(SurfaceFrame, CurrentState), KinematicsError> {
    let frame = SurfaceFrame::from_basis(pts, basis)?;
    let state = CurrentState::from_forms(reference, frame.metric, frame.curvature)?;
    Ok((frame, state))
}

/// Largest deviation between the parametrization-independent measures of two
/// states describing the same material point (index pairs compared as sets).
pub fn reparametrization_check(a: &CurrentState, b: &CurrentState) -> f64 {
    let pair = |x: [f64; 2], y: [f64; 2]| {
        let direct = (x[0] - y[0]).abs().max((x[1] - y[1]).abs());
        let swapped = (x[0] - y[1]).abs().max((x[1] - y[0]).abs());
        direct.min(swapped)
    };
    let mut dev: f64 = 0.0;
    dev = dev.max(pair(a.stretches, b.stretches));
    dev = dev.max(pair(a.dir_curvatures, b.dir_curvatures));
    dev = dev.max((a.twist * a.twist - b.twist * b.twist).abs());
    dev = dev.max((a.mean_curvature - b.mean_curvature).abs());
    dev = dev.max((a.gauss_curvature - b.gauss_curvature).abs());
    dev.max((a.stretch - b.stretch).abs())
}
