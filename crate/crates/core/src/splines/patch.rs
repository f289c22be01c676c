use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use super::bezier::{bernstein, bezier_extraction};
use super::knots::{spans, validate_clamped, Span};
use super::SplineError;

/// Tensor-product NURBS surface. Control points are stored with `u` running fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PatchData", into = "PatchData")]
pub struct NurbsPatch {
    degree_u: usize,
    degree_v: usize,
    knots_u: Vec<f64>,
    knots_v: Vec<f64>,
    control_points: Vec<Vector3<f64>>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PatchData {
    degree_u: usize,
    degree_v: usize,
    knots_u: Vec<f64>,
    knots_v: Vec<f64>,
    control_points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl TryFrom<PatchData> for NurbsPatch {
    type Error = SplineError;
    fn try_from(d: PatchData) -> Result<Self, SplineError> {
        let pts = d.control_points.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect();
        NurbsPatch::new(d.degree_u, d.degree_v, d.knots_u, d.knots_v, pts, d.weights)
    }
}

impl From<NurbsPatch> for PatchData {
    fn from(p: NurbsPatch) -> Self {
        PatchData {
            degree_u: p.degree_u,
            degree_v: p.degree_v,
            knots_u: p.knots_u,
            knots_v: p.knots_v,
            control_points: p.control_points.iter().map(|c| [c.x, c.y, c.z]).collect(),
            weights: p.weights,
        }
    }
}

impl NurbsPatch {
    pub fn new(
        degree_u: usize,
        degree_v: usize,
        knots_u: Vec<f64>,
        knots_v: Vec<f64>,
        control_points: Vec<Vector3<f64>>,
        weights: Vec<f64>,
    ) -> Result<Self, SplineError> {
        validate_clamped(&knots_u, degree_u)?;
        validate_clamped(&knots_v, degree_v)?;
        let nu = knots_u.len() - degree_u - 1;
        let nv = knots_v.len() - degree_v - 1;
        if control_points.len() != nu * nv {
            return Err(SplineError::GridMismatch { expected: nu * nv, found: control_points.len() });
        }
        if weights.len() != nu * nv {
            return Err(SplineError::GridMismatch { expected: nu * nv, found: weights.len() });
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(SplineError::NonPositiveWeight);
        }
        Ok(Self { degree_u, degree_v, knots_u, knots_v, control_points, weights })
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.degree_u, self.degree_v)
    }
    pub fn knots_u(&self) -> &[f64] {
        &self.knots_u
    }
    pub fn knots_v(&self) -> &[f64] {
        &self.knots_v
    }
    pub fn control_points(&self) -> &[Vector3<f64>] {
        &self.control_points
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    /// Control grid size `(n_u, n_v)`.
    pub fn grid(&self) -> (usize, usize) {
        (self.knots_u.len() - self.degree_u - 1, self.knots_v.len() - self.degree_v - 1)
    }
    pub fn n_control_points(&self) -> usize {
        self.control_points.len()
    }
    /// Global index of control point `(i, j)`.
    pub fn cp_index(&self, i: usize, j: usize) -> usize {
        j * self.grid().0 + i
    }

    /// Copy of the patch with moved control points.
    pub fn with_control_points(&self, pts: Vec<Vector3<f64>>) -> Result<Self, SplineError> {
        Self::new(
            self.degree_u,
            self.degree_v,
            self.knots_u.clone(),
            self.knots_v.clone(),
            pts,
            self.weights.clone(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("patch serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, SplineError> {
        serde_json::from_str(s).map_err(|e| SplineError::Json(e.to_string()))
    }

    /// Bézier-extracted element layout of this patch.
    pub fn elements(&self) -> Result<ElementGrid, SplineError> {
        ElementGrid::new(self)
    }

    /// Surface point at parameters `(u, v)`.
    pub fn point(&self, grid: &ElementGrid, u: f64, v: f64) -> Result<Vector3<f64>, SplineError> {
        let e = grid.locate(u, v);
        let b = grid.eval(self, e, [u, v])?;
        Ok(b.interpolate(&self.control_points))
    }
}

/// Shape functions of one element at one parametric point.
#[derive(Clone, Debug)]
pub struct ElementBasis {
    pub values: Vec<f64>,
    /// ∂N/∂ξ¹, ∂N/∂ξ².
    pub d1: Vec<[f64; 2]>,
    /// ∂²N/∂ξ¹∂ξ¹, ∂²N/∂ξ²∂ξ², ∂²N/∂ξ¹∂ξ².
    pub d2: Vec<[f64; 3]>,
    /// Global control point index of each local function.
    pub indices: Vec<usize>,
}

impl ElementBasis {
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn interpolate(&self, pts: &[Vector3<f64>]) -> Vector3<f64> {
        self.values.iter().zip(&self.indices).map(|(n, &i)| pts[i] * *n).sum()
    }

    /// Position, tangents `x_{,α}` and second derivatives `x_{,11}, x_{,22}, x_{,12}`.
    pub fn derivatives(&self, pts: &[Vector3<f64>]) -> (Vector3<f64>, [Vector3<f64>; 2], [Vector3<f64>; 3]) {
        let mut x = Vector3::zeros();
        let mut d1 = [Vector3::zeros(); 2];
        let mut d2 = [Vector3::zeros(); 3];
        for k in 0..self.len() {
            let p = pts[self.indices[k]];
            x += p * self.values[k];
            for a in 0..2 {
                d1[a] += p * self.d1[k][a];
            }
            for a in 0..3 {
                d2[a] += p * self.d2[k][a];
            }
        }
        (x, d1, d2)
    }
}

/// Element decomposition of a patch with precomputed extraction operators.
#[derive(Clone, Debug)]
pub struct ElementGrid {
    degree_u: usize,
    degree_v: usize,
    spans_u: Vec<Span>,
    spans_v: Vec<Span>,
    extraction_u: Vec<DMatrix<f64>>,
    extraction_v: Vec<DMatrix<f64>>,
    n_u: usize,
}

impl ElementGrid {
    pub fn new(patch: &NurbsPatch) -> Result<Self, SplineError> {
        Ok(Self {
            degree_u: patch.degree_u,
            degree_v: patch.degree_v,
            spans_u: spans(&patch.knots_u, patch.degree_u),
            spans_v: spans(&patch.knots_v, patch.degree_v),
            extraction_u: bezier_extraction(&patch.knots_u, patch.degree_u)?,
            extraction_v: bezier_extraction(&patch.knots_v, patch.degree_v)?,
            n_u: patch.grid().0,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.spans_u.len() * self.spans_v.len()
    }
    /// Element counts `(along u, along v)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.spans_u.len(), self.spans_v.len())
    }
    /// Element id of span pair `(i, j)`.
    pub fn element_id(&self, i: usize, j: usize) -> usize {
        j * self.spans_u.len() + i
    }
    /// Span pair of element `e`.
    pub fn element_spans(&self, e: usize) -> (usize, usize) {
        (e % self.spans_u.len(), e / self.spans_u.len())
    }
    /// Parametric ranges `([u_lo, u_hi], [v_lo, v_hi])` of element `e`.
    pub fn element_range(&self, e: usize) -> ([f64; 2], [f64; 2]) {
        let (i, j) = self.element_spans(e);
        let (su, sv) = (self.spans_u[i], self.spans_v[j]);
        ([su.lo, su.hi], [sv.lo, sv.hi])
    }
    /// Global control point indices of element `e`, `u` local index running fastest.
    pub fn connectivity(&self, e: usize) -> Vec<usize> {
        let (i, j) = self.element_spans(e);
        let fu = self.spans_u[i].first_basis(self.degree_u);
        let fv = self.spans_v[j].first_basis(self.degree_v);
        let mut out = Vec::with_capacity((self.degree_u + 1) * (self.degree_v + 1));
        for b in 0..=self.degree_v {
            for a in 0..=self.degree_u {
                out.push((fv + b) * self.n_u + fu + a);
            }
        }
        out
    }

    /// Element containing `(u, v)`; points on span boundaries go to the upper span
    /// except at the patch end.
    pub fn locate(&self, u: f64, v: f64) -> usize {
        let find = |spans: &[Span], t: f64| {
            spans.iter().position(|s| t >= s.lo && t < s.hi).unwrap_or(if t < spans[0].lo { 0 } else { spans.len() - 1 })
        };
        self.element_id(find(&self.spans_u, u), find(&self.spans_v, v))
    }

    /// Rational basis of element `e` at parameters `xi` (knot coordinates inside the span).
    pub fn eval(&self, patch: &NurbsPatch, e: usize, xi: [f64; 2]) -> Result<ElementBasis, SplineError> {
        if e >= self.n_elements() {
            return Err(SplineError::InvalidElement(e));
        }
        let (i, j) = self.element_spans(e);
        let bu = univariate(&self.spans_u[i], &self.extraction_u[i], self.degree_u, xi[0])?;
        let bv = univariate(&self.spans_v[j], &self.extraction_v[j], self.degree_v, xi[1])?;
        let indices = self.connectivity(e);
        let n = indices.len();
        let nu = self.degree_u + 1;
        // weighted B-spline products and their derivatives
        let mut nw = vec![0.0; n];
        let mut nw1 = vec![[0.0; 2]; n];
        let mut nw2 = vec![[0.0; 3]; n];
        let (mut w, mut w1, mut w2) = (0.0, [0.0; 2], [0.0; 3]);
        for k in 0..n {
            let (a, b) = (k % nu, k / nu);
            let wt = patch.weights[indices[k]];
            nw[k] = wt * bu.0[a] * bv.0[b];
            nw1[k] = [wt * bu.1[a] * bv.0[b], wt * bu.0[a] * bv.1[b]];
            nw2[k] = [wt * bu.2[a] * bv.0[b], wt * bu.0[a] * bv.2[b], wt * bu.1[a] * bv.1[b]];
            w += nw[k];
            for c in 0..2 {
                w1[c] += nw1[k][c];
            }
            for c in 0..3 {
                w2[c] += nw2[k][c];
            }
        }
        let mut values = vec![0.0; n];
        let mut d1 = vec![[0.0; 2]; n];
        let mut d2 = vec![[0.0; 3]; n];
        // second-derivative slots: (0,0), (1,1), (0,1)
        const PAIRS: [(usize, usize); 3] = [(0, 0), (1, 1), (0, 1)];
        for k in 0..n {
            let r = nw[k] / w;
            values[k] = r;
            let r1 = [(nw1[k][0] - r * w1[0]) / w, (nw1[k][1] - r * w1[1]) / w];
            d1[k] = r1;
            for (s, &(a, b)) in PAIRS.iter().enumerate() {
                d2[k][s] = (nw2[k][s] - r1[a] * w1[b] - r1[b] * w1[a] - r * w2[s]) / w;
            }
        }
        Ok(ElementBasis { values, d1, d2, indices })
    }
}

/// B-spline values and derivatives of one span at `t`.
fn univariate(span: &Span, c: &DMatrix<f64>, degree: usize, t: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), SplineError> {
    let h = span.hi - span.lo;
    let tol = 1e-12 * h.max(1.0);
    if t < span.lo - tol || t > span.hi + tol {
        return Err(SplineError::OutsideSpan { xi: t, lo: span.lo, hi: span.hi });
    }
    let s = ((t - span.lo) / h).clamp(0.0, 1.0);
    let (b, db, ddb) = bernstein(degree, s);
    let apply = |v: &[f64], scale: f64| -> Vec<f64> {
        (0..=degree).map(|a| scale * (0..=degree).map(|k| c[(k, a)] * v[k]).sum::<f64>()).collect()
    };
    Ok((apply(&b, 1.0), apply(&db, 1.0 / h), apply(&ddb, 1.0 / (h * h))))
}

/// Evaluates the basis of element `element_id` at `xi`.
pub fn eval_basis(patch: &NurbsPatch, element_id: usize, xi: [f64; 2]) -> Result<ElementBasis, SplineError> {
    patch.elements()?.eval(patch, element_id, xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splines::make_knot_vector;

    fn bilinear_like(nu: usize, nv: usize, p: usize) -> NurbsPatch {
        let ku = make_knot_vector(nu, p).unwrap();
        let kv = make_knot_vector(nv, p).unwrap();
        let (cu, cv) = (ku.len() - p - 1, kv.len() - p - 1);
        let mut pts = Vec::new();
        let mut w = Vec::new();
        for j in 0..cv {
            for i in 0..cu {
                pts.push(Vector3::new(i as f64, j as f64 + 0.1 * i as f64, (i * j) as f64 * 0.05));
                w.push(1.0 + 0.1 * ((i + 2 * j) % 3) as f64);
            }
        }
        NurbsPatch::new(p, p, ku, kv, pts, w).unwrap()
    }

    #[test]
    fn corner_is_interpolatory() {
        let p = bilinear_like(1, 1, 2);
        let b = eval_basis(&p, 0, [0.0, 0.0]).unwrap();
        assert!((b.values[0] - 1.0).abs() < 1e-15);
        assert!(b.values[1..].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn partition_of_unity() {
        let p = bilinear_like(3, 2, 3);
        let g = p.elements().unwrap();
        for e in 0..g.n_elements() {
            let (ru, rv) = g.element_range(e);
            let b = g.eval(&p, e, [0.3 * ru[0] + 0.7 * ru[1], 0.6 * rv[0] + 0.4 * rv[1]]).unwrap();
            assert!((b.values.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for c in 0..2 {
                assert!(b.d1.iter().map(|d| d[c]).sum::<f64>().abs() < 1e-12);
            }
            for c in 0..3 {
                assert!(b.d2.iter().map(|d| d[c]).sum::<f64>().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rational_derivatives_match_differences() {
        let p = bilinear_like(2, 2, 2);
        let g = p.elements().unwrap();
        let (u, v, h) = (0.3, 0.2, 1e-5);
        let e = g.locate(u, v);
        let b = g.eval(&p, e, [u, v]).unwrap();
        let bu = [g.eval(&p, e, [u + h, v]).unwrap(), g.eval(&p, e, [u - h, v]).unwrap()];
        let bv = [g.eval(&p, e, [u, v + h]).unwrap(), g.eval(&p, e, [u, v - h]).unwrap()];
        for k in 0..b.len() {
            assert!(((bu[0].values[k] - bu[1].values[k]) / (2.0 * h) - b.d1[k][0]).abs() < 1e-8);
            assert!(((bv[0].values[k] - bv[1].values[k]) / (2.0 * h) - b.d1[k][1]).abs() < 1e-8);
            assert!(((bu[0].d1[k][0] - bu[1].d1[k][0]) / (2.0 * h) - b.d2[k][0]).abs() < 1e-6);
            assert!(((bv[0].d1[k][1] - bv[1].d1[k][1]) / (2.0 * h) - b.d2[k][1]).abs() < 1e-6);
            assert!(((bv[0].d1[k][0] - bv[1].d1[k][0]) / (2.0 * h) - b.d2[k][2]).abs() < 1e-6);
        }
    }

    #[test]
    fn outside_span_rejected() {
        let p = bilinear_like(2, 2, 2);
        assert!(matches!(eval_basis(&p, 0, [0.9, 0.1]), Err(SplineError::OutsideSpan { .. })));
        assert!(matches!(eval_basis(&p, 99, [0.1, 0.1]), Err(SplineError::InvalidElement(99))));
    }

    #[test]
    fn json_round_trip() {
        let p = bilinear_like(2, 3, 2);
        let back = NurbsPatch::from_json(&p.to_json()).unwrap();
        assert_eq!(p, back);
        let bad = p.to_json().replace("\"degree_u\": 2", "\"degree_u\": 3");
        assert!(NurbsPatch::from_json(&bad).is_err());
    }

    #[test]
    fn validation() {
        let kv = make_knot_vector(1, 2).unwrap();
        let pts = vec![Vector3::zeros(); 9];
        assert!(NurbsPatch::new(2, 2, kv.clone(), kv.clone(), pts.clone(), vec![1.0; 8]).is_err());
        let mut w = vec![1.0; 9];
        w[4] = 0.0;
        assert!(matches!(
            NurbsPatch::new(2, 2, kv.clone(), kv, pts, w),
            Err(SplineError::NonPositiveWeight)
        ));
    }
}
