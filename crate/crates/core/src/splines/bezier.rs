use nalgebra::DMatrix;

use super::knots::{insert_knot, multiplicity, spans, validate_clamped};
use super::SplineError;

/// Extraction operators, one per non-empty span. Operator `E_e` maps the local
/// B-spline control points to the Bézier control points of the span
/// (`P_bez = E_e P`), so rows sum to one and the basis is `N_e(ξ) = E_eᵀ B(ξ)`.
///
/// Computed by inserting every interior knot up to multiplicity `degree` into a
/// spline whose control "points" are the rows of the identity.
pub fn bezier_extraction(knots: &[f64], degree: usize) -> Result<Vec<DMatrix<f64>>, SplineError> {
    validate_clamped(knots, degree)?;
    let p = degree;
    let n = knots.len() - p - 1;
    let mut kv = knots.to_vec();
    let mut ctrl = DMatrix::<f64>::identity(n, n);
    let interior: Vec<f64> = {
        let mut v: Vec<f64> = knots[p + 1..knots.len() - p - 1].to_vec();
        v.dedup();
        v
    };
    for u in interior {
        while multiplicity(&kv, u) < p {
            let (k2, c2) = insert_knot(&kv, p, &ctrl, u);
            kv = k2;
            ctrl = c2;
        }
    }
    // ctrl rows are Bernstein coefficients; ctrl[(e*p + k, i)] is the weight of
    // old function i on the k-th Bernstein polynomial of element e.
    let original = spans(knots, p);
    let mut ops = Vec::with_capacity(original.len());
    for (e, span) in original.iter().enumerate() {
        let first = span.first_basis(p);
        let mut c = DMatrix::zeros(p + 1, p + 1);
        for a in 0..=p {
            for k in 0..=p {
                c[(k, a)] = ctrl[(e * p + k, first + a)];
            }
        }
        ops.push(c);
    }
    Ok(ops)
}

/// Bernstein polynomials of degree `p` on `[0, 1]` and their first two derivatives.
pub fn bernstein(p: usize, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let eval = |deg: usize| -> Vec<f64> {
        let mut b = vec![0.0; deg + 1];
        b[0] = 1.0;
        for j in 1..=deg {
            let mut saved = 0.0;
            for k in 0..j {
                let tmp = b[k];
                b[k] = saved + (1.0 - t) * tmp;
                saved = t * tmp;
            }
            b[j] = saved;
        }
        b
    };
    let vals = eval(p);
    let mut d1 = vec![0.0; p + 1];
    let mut d2 = vec![0.0; p + 1];
    if p >= 1 {
        let lower = eval(p - 1);
        for k in 0..=p {
            let left = if k >= 1 { lower[k - 1] } else { 0.0 };
            let right = if k < p { lower[k] } else { 0.0 };
            d1[k] = p as f64 * (left - right);
        }
    }
    if p >= 2 {
        let lower = eval(p - 2);
        let pp = (p * (p - 1)) as f64;
        for k in 0..=p {
            let at = |i: isize| -> f64 {
                if i < 0 || i as usize > p - 2 {
                    0.0
                } else {
                    lower[i as usize]
                }
            };
            let k = k as isize;
            d2[k as usize] = pp * (at(k - 2) - 2.0 * at(k - 1) + at(k));
        }
    }
    (vals, d1, d2)
}

/// Raises the degree of a Bézier segment by one; rows of `ctrl` are control points.
pub fn elevate_bezier(ctrl: &DMatrix<f64>) -> DMatrix<f64> {
    let p = ctrl.nrows() - 1;
    let mut out = DMatrix::zeros(p + 2, ctrl.ncols());
    for i in 0..=p + 1 {
        let a = i as f64 / (p + 1) as f64;
        let mut row = nalgebra::RowDVector::zeros(ctrl.ncols());
        if i >= 1 {
            row += ctrl.row(i - 1) * a;
        }
        if i <= p {
            row += ctrl.row(i) * (1.0 - a);
        }
        out.set_row(i, &row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_span_is_identity() {
        let ops = bezier_extraction(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(ops.len(), 1);
        assert!((&ops[0] - DMatrix::<f64>::identity(3, 3)).abs().max() < 1e-15);
    }

    #[test]
    fn rows_sum_to_one() {
        let ops = bezier_extraction(&[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(ops.len(), 2);
        for c in &ops {
            for r in 0..3 {
                assert!((c.row(r).sum() - 1.0).abs() < 1e-14);
            }
        }
        // known operator for the first span of this vector
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.5, 0.5]);
        assert!((&ops[0] - expected).abs().max() < 1e-15);
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(bezier_extraction(&[0.0, 0.0, 0.5, 1.0, 1.0, 1.0], 2).is_err());
        assert!(bezier_extraction(&[0.0, 0.0, 0.0, 0.6, 0.4, 1.0, 1.0, 1.0], 2).is_err());
    }

    #[test]
    fn bernstein_partition_and_derivatives() {
        for p in 0..6 {
            for &t in &[0.0, 0.3, 0.77, 1.0] {
                let (v, d1, d2) = bernstein(p, t);
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                assert!(d1.iter().sum::<f64>().abs() < 1e-12);
                assert!(d2.iter().sum::<f64>().abs() < 1e-11);
                let h = 1e-5;
                if t > h && t < 1.0 - h {
                    let (vp, d1p, _) = bernstein(p, t + h);
                    let (vm, d1m, _) = bernstein(p, t - h);
                    for k in 0..=p {
                        assert!(((vp[k] - vm[k]) / (2.0 * h) - d1[k]).abs() < 1e-8);
                        assert!(((d1p[k] - d1m[k]) / (2.0 * h) - d2[k]).abs() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn elevation_preserves_the_curve() {
        let ctrl = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 2.0, 3.0, 0.5]);
        let up = elevate_bezier(&ctrl);
        for &t in &[0.1, 0.5, 0.9] {
            let (b2, _, _) = bernstein(2, t);
            let (b3, _, _) = bernstein(3, t);
            for c in 0..2 {
                let a: f64 = (0..3).map(|k| b2[k] * ctrl[(k, c)]).sum();
                let b: f64 = (0..4).map(|k| b3[k] * up[(k, c)]).sum();
                assert!((a - b).abs() < 1e-14);
            }
        }
    }
}
