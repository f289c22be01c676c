use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, Vector3};

use super::bezier::elevate_bezier;
use super::knots::{insert_knot, make_knot_vector};
use super::{NurbsPatch, SplineError};

/// Greville abscissae of a knot vector; control points placed there give an
/// affine parametrization.
pub fn greville(knots: &[f64], degree: usize) -> Vec<f64> {
    let n = knots.len() - degree - 1;
    (0..n).map(|i| knots[i + 1..=i + degree].iter().sum::<f64>() / degree as f64).collect()
}

/// Flat square `[0, L]²` in the `z = 0` plane with `n × n` elements.
///
/// `skew > 0` shears interior control points along `x` by
/// `skew · (y − L/2) · b(x) · b(y)` with the bump `b(t) = 4t(L − t)/L²`,
/// which leaves the boundary untouched and keeps the map one-to-one for `skew < 1`.
pub fn make_plate_patch(length: f64, n: usize, degree: usize, skew: f64) -> Result<NurbsPatch, SplineError> {
    if !(length > 0.0) {
        return Err(SplineError::InvalidGeometry(format!("plate length must be positive, got {length}")));
    }
    if !(0.0..1.0).contains(&skew) {
        return Err(SplineError::InvalidGeometry(format!("skew must lie in [0, 1), got {skew}")));
    }
    let knots = make_knot_vector(n, degree)?;
    let g = greville(&knots, degree);
    let m = g.len();
    let bump = |t: f64| 4.0 * t * (length - t) / (length * length);
    let mut pts = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            let (x, y) = (g[i] * length, g[j] * length);
            let interior = i > 0 && j > 0 && i + 1 < m && j + 1 < m;
            let dx = if interior { skew * (y - 0.5 * length) * bump(x) * bump(y) } else { 0.0 };
            pts.push(Vector3::new(x + dx, y, 0.0));
        }
    }
    NurbsPatch::new(degree, degree, knots.clone(), knots, pts, vec![1.0; m * m])
}

/// Point of the cylinder `X(θ, y) = (R sin θ, y, R cos θ)`; the normal
/// `A₁ × A₂` points outward when `ξ¹ ~ θ` and `ξ² ~ y`.
pub fn cylinder_point(radius: f64, theta: f64, y: f64) -> Vector3<f64> {
    Vector3::new(radius * theta.sin(), y, radius * theta.cos())
}

/// Circular cylinder patch with axis along `y`, circumferential direction `u`
/// over `theta_range = [θ_start, θ_end]` and axial direction `v` over `[0, L]`.
///
/// The section is built exactly from rational quadratic arcs of at most 90°
/// (mid weight `cos(Δθ/2)`), elevated to `degree` and refined uniformly.
/// Joints between arcs keep multiplicity `degree`, so `n_circ` must be a
/// multiple of the arc count.
pub fn make_cylinder_patch(
    radius: f64,
    length: f64,
    theta_range: [f64; 2],
    n_circ: usize,
    n_axial: usize,
    degree: usize,
) -> Result<NurbsPatch, SplineError> {
    if !(radius > 0.0) || !(length > 0.0) {
        return Err(SplineError::InvalidGeometry(format!("radius and length must be positive, got R={radius}, L={length}")));
    }
    let sweep = theta_range[1] - theta_range[0];
    if !(sweep > 0.0) || sweep > 4.0 * FRAC_PI_2 + 1e-12 {
        return Err(SplineError::InvalidGeometry(format!("theta range must lie in (0, 2π], got {sweep}")));
    }
    if degree < 2 {
        return Err(SplineError::DegreeTooLow { degree });
    }
    if n_circ == 0 || n_axial == 0 {
        return Err(SplineError::EmptyMesh);
    }
    let n_arcs = (sweep / FRAC_PI_2 - 1e-9).ceil().max(1.0) as usize;
    if n_circ % n_arcs != 0 {
        return Err(SplineError::InvalidGeometry(format!(
            "{n_circ} circumferential elements cannot be split over {n_arcs} arcs"
        )));
    }
    let (knots_u, section) = circular_section(radius, theta_range[0], sweep, n_arcs, n_circ / n_arcs, degree);
    let knots_v = make_knot_vector(n_axial, degree)?;
    let gv = greville(&knots_v, degree);
    let mut pts = Vec::new();
    let mut weights = Vec::new();
    for &g in &gv {
        for r in 0..section.nrows() {
            let w = section[(r, 2)];
            pts.push(Vector3::new(section[(r, 0)] / w, g * length, section[(r, 1)] / w));
            weights.push(w);
        }
    }
    NurbsPatch::new(degree, degree, knots_u, knots_v, pts, weights)
}

/// Homogeneous control points `(w·x, w·z, w)` and knots of the refined section curve.
fn circular_section(radius: f64, start: f64, sweep: f64, n_arcs: usize, per_arc: usize, degree: usize) -> (Vec<f64>, DMatrix<f64>) {
    let d = sweep / n_arcs as f64;
    let w_mid = (0.5 * d).cos();
    let mut rows: Vec<[f64; 3]> = Vec::new();
    for a in 0..n_arcs {
        let t0 = start + a as f64 * d;
        let p0 = cylinder_point(radius, t0, 0.0);
        let p1 = cylinder_point(radius / w_mid, t0 + 0.5 * d, 0.0);
        let p2 = cylinder_point(radius, t0 + d, 0.0);
        let mut seg = DMatrix::from_row_slice(
            3,
            3,
            &[p0.x, p0.z, 1.0, w_mid * p1.x, w_mid * p1.z, w_mid, p2.x, p2.z, 1.0],
        );
        for _ in 2..degree {
            seg = elevate_bezier(&seg);
        }
        let skip = if a == 0 { 0 } else { 1 };
        for r in skip..seg.nrows() {
            rows.push([seg[(r, 0)], seg[(r, 1)], seg[(r, 2)]]);
        }
    }
    let mut knots = vec![0.0; degree + 1];
    for a in 1..n_arcs {
        knots.extend(std::iter::repeat(a as f64 / n_arcs as f64).take(degree));
    }
    knots.extend(std::iter::repeat(1.0).take(degree + 1));
    let mut ctrl = DMatrix::from_fn(rows.len(), 3, |r, c| rows[r][c]);
    for a in 0..n_arcs {
        for k in 1..per_arc {
            let u = (a as f64 + k as f64 / per_arc as f64) / n_arcs as f64;
            let (k2, c2) = insert_knot(&knots, degree, &ctrl, u);
            knots = k2;
            ctrl = c2;
        }
    }
    (knots, ctrl)
}
