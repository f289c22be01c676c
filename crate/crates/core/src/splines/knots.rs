use nalgebra::DMatrix;

use super::SplineError;

/// Clamped uniform knot vector with `n_elements` spans and single interior knots.
pub fn make_knot_vector(n_elements: usize, degree: usize) -> Result<Vec<f64>, SplineError> {
    if degree < 2 {
        return Err(SplineError::DegreeTooLow { degree });
    }
    if n_elements == 0 {
        return Err(SplineError::EmptyMesh);
    }
    let mut knots = vec![0.0; degree + 1];
    for i in 1..n_elements {
        knots.push(i as f64 / n_elements as f64);
    }
    knots.extend(std::iter::repeat(1.0).take(degree + 1));
    Ok(knots)
}

/// Checks that the knot vector is non-decreasing and clamped for `degree`.
pub fn validate_clamped(knots: &[f64], degree: usize) -> Result<(), SplineError> {
    if knots.len() < 2 * (degree + 1) {
        return Err(SplineError::NotClamped);
    }
    if knots.iter().any(|k| !k.is_finite()) || knots.windows(2).any(|w| w[1] < w[0]) {
        return Err(SplineError::DecreasingKnots);
    }
    let first = knots[0];
    let last = knots[knots.len() - 1];
    let head = knots[..=degree].iter().all(|&k| k == first);
    let tail = knots[knots.len() - degree - 1..].iter().all(|&k| k == last);
    if !head || !tail || knots[degree + 1] == first || knots[knots.len() - degree - 2] == last || last <= first {
        return Err(SplineError::NotClamped);
    }
    Ok(())
}

/// A non-empty knot span `[lo, hi)` starting at knot index `index`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Span {
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    /// Index of the first basis function supported on this span.
    pub fn first_basis(&self, degree: usize) -> usize {
        self.index - degree
    }
}

/// Non-empty spans of a clamped knot vector, in increasing order.
pub fn spans(knots: &[f64], degree: usize) -> Vec<Span> {
    (degree..knots.len() - degree - 1)
        .filter(|&i| knots[i + 1] > knots[i])
        .map(|i| Span { index: i, lo: knots[i], hi: knots[i + 1] })
        .collect()
}

/// Number of times `u` appears in the knot vector.
pub fn multiplicity(knots: &[f64], u: f64) -> usize {
    knots.iter().filter(|&&k| k == u).count()
}

/// Inserts `u` once into a B-spline (Boehm). Control points are rows of `ctrl`,
/// in any dimension (homogeneous coordinates for NURBS).
pub fn insert_knot(knots: &[f64], degree: usize, ctrl: &DMatrix<f64>, u: f64) -> (Vec<f64>, DMatrix<f64>) {
    let p = degree;
    let n = ctrl.nrows();
    // last index k with knots[k] <= u, restricted to the valid range
    let mut k = p;
    while k + 1 < n && knots[k + 1] <= u {
        k += 1;
    }
    let s = multiplicity(knots, u);
    let mut out = DMatrix::zeros(n + 1, ctrl.ncols());
    for i in 0..=n {
        let row = if i + p <= k {
            ctrl.row(i).into_owned()
        } else if i + s <= k {
            let alpha = (u - knots[i]) / (knots[i + p] - knots[i]);
            ctrl.row(i) * alpha + ctrl.row(i - 1) * (1.0 - alpha)
        } else {
            ctrl.row(i - 1).into_owned()
        };
        out.set_row(i, &row);
    }
    let mut new_knots = knots.to_vec();
    new_knots.insert(k + 1, u);
    (new_knots, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knot_vectors() {
        assert_eq!(make_knot_vector(1, 2).unwrap(), vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(make_knot_vector(2, 2).unwrap(), vec![0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0]);
        assert_eq!(
            make_knot_vector(4, 3).unwrap(),
            vec![0.0, 0.0, 0.0, 0.0, 0.25, 0.5, 0.75, 1.0, 1.0, 1.0, 1.0]
        );
        assert!(matches!(make_knot_vector(3, 1), Err(SplineError::DegreeTooLow { .. })));
        assert!(matches!(make_knot_vector(0, 2), Err(SplineError::EmptyMesh)));
    }

    #[test]
    fn clamping_checks() {
        assert!(validate_clamped(&[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0], 2).is_ok());
        assert!(validate_clamped(&[0.0, 0.0, 0.5, 1.0, 1.0, 1.0], 2).is_err());
        assert!(validate_clamped(&[0.0, 0.0, 0.0, 0.7, 0.5, 1.0, 1.0, 1.0], 2).is_err());
    }

    #[test]
    fn span_listing_skips_repeated_knots() {
        let s = spans(&[0.0, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0], 2);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].index, 2);
        assert_eq!(s[1].index, 4);
        assert_eq!(s[1].first_basis(2), 2);
    }

    #[test]
    fn knot_insertion_preserves_a_line() {
        // degree-2 curve with collinear control points x = Greville abscissae
        let knots = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let ctrl = DMatrix::from_row_slice(3, 1, &[0.0, 0.5, 1.0]);
        let (k2, c2) = insert_knot(&knots, 2, &ctrl, 0.25);
        assert_eq!(k2, vec![0.0, 0.0, 0.0, 0.25, 1.0, 1.0, 1.0]);
        let greville = [0.0, 0.125, 0.625, 1.0];
        for (i, g) in greville.iter().enumerate() {
            assert!((c2[(i, 0)] - g).abs() < 1e-15);
        }
    }
}
