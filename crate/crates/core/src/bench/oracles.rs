use std::f64::consts::PI;

/// Center deflection of a simply supported square plate of side `length`
/// under `p0 sin(πx/L) sin(πy/L)`.
pub fn navier_center_deflection(p0: f64, length: f64, bending_stiffness: f64) -> f64 {
    p0 * length.powi(4) / (4.0 * PI.powi(4) * bending_stiffness)
}

/// Cylinder with rigid end diaphragms, pinched by two opposite radial forces
/// at mid-length, described by Flügge's linear shell equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PinchedCylinder {
    pub radius: f64,
    pub length: f64,
    pub thickness: f64,
    pub young: f64,
    pub poisson: f64,
    pub force: f64,
}

impl PinchedCylinder {
    /// Nondimensional stiffness of the Fourier mode `u ~ cos nφ cos λs`,
    /// `v ~ sin nφ sin λs`, `w ~ cos nφ sin λs` with `s = x/R`, `w` outward.
    pub fn mode_stiffness(&self, lambda: f64, n: f64) -> [[f64; 3]; 3] {
        let nu = self.poisson;
        let k = self.thickness * self.thickness / (12.0 * self.radius * self.radius);
        let (l2, n2) = (lambda * lambda, n * n);
        let s00 = l2 + 0.5 * (1.0 - nu) * n2 * (1.0 + k);
        let s01 = -0.5 * (1.0 + nu) * n * lambda;
        let s02 = -nu * lambda - k * lambda * l2 + 0.5 * k * (1.0 - nu) * n2 * lambda;
        let s11 = 0.5 * (1.0 - nu) * l2 * (1.0 + 3.0 * k) + n2;
        let s12 = n + 0.5 * k * (3.0 - nu) * l2 * n;
        let s22 = 1.0 + k * (l2 + n2).powi(2) + k * (1.0 - 2.0 * n2);
        [[s00, s01, s02], [s01, s11, s12], [s02, s12, s22]]
    }

    /// Outward radial amplitude of mode `(m, n)` under the pair of inward forces.
    fn radial_amplitude(&self, m: usize, n: usize) -> f64 {
        let (a, len) = (self.radius, self.length);
        let membrane = self.young * self.thickness / (1.0 - self.poisson * self.poisson);
        let lambda = m as f64 * PI * a / len;
        let norm = if n == 0 { 2.0 } else { 1.0 };
        // two loads at φ = 0 and φ = π; only even n survive
        let q = -2.0 * self.force / a * (0.5 * m as f64 * PI).sin() / (0.5 * len * PI * norm);
        let s = self.mode_stiffness(lambda, n as f64);
        let rhs = q * a * a / membrane;
        // third component of S⁻¹ e₃ rhs by cofactors
        let det = s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[1][2]) - s[0][1] * (s[0][1] * s[2][2] - s[1][2] * s[0][2])
            + s[0][2] * (s[0][1] * s[1][2] - s[1][1] * s[0][2]);
        rhs * (s[0][0] * s[1][1] - s[0][1] * s[0][1]) / det
    }

    /// Inward deflection under a load from the series truncated at
    /// `m ≤ max_m`, `n ≤ max_n`.
    pub fn deflection_truncated(&self, max_m: usize, max_n: usize) -> f64 {
        let mut total = 0.0;
        for m in (1..=max_m).step_by(2) {
            let mut row = 0.0;
            for n in (0..=max_n).step_by(2) {
                row += self.radial_amplitude(m, n);
            }
            total += row * (0.5 * m as f64 * PI).sin();
        }
        -total
    }

    /// Inward deflection under a load. The double series is summed on two
    /// square truncations and extrapolated with its observed `1/N²` tail.
    pub fn deflection(&self) -> f64 {
        let a = self.deflection_truncated(2000, 2000);
        let b = self.deflection_truncated(4000, 4000);
        b + (b - a) / 3.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classic() -> PinchedCylinder {
        PinchedCylinder { radius: 300.0, length: 600.0, thickness: 3.0, young: 3e6, poisson: 0.3, force: 1.0 }
    }

    #[test]
    fn mode_stiffness_is_symmetric_positive() {
        let c = classic();
        for (l, n) in [(0.5, 0.0), (1.57, 2.0), (20.0, 14.0)] {
            let s = c.mode_stiffness(l, n);
            let m = nalgebra::Matrix3::from_fn(|i, j| s[i][j]);
            assert!(m.cholesky().is_some(), "{l} {n}");
        }
    }

    #[test]
    fn hoop_limit() {
        // axisymmetric long-wave mode reduces to the restrained ring stiffness 1 + k
        let s = classic().mode_stiffness(0.0, 0.0);
        let k = 1e-4 / 12.0;
        assert!((s[2][2] - (1.0 + k)).abs() < 1e-15);
        assert_eq!(s[0][2], 0.0);
    }

    #[test]
    fn inextensional_ring_mode() {
        // n = 2 ovalization with v = −w/n costs only bending, k (n² − 1)²
        let c = classic();
        let s = c.mode_stiffness(0.0, 2.0);
        let schur = s[2][2] - s[1][2] * s[1][2] / s[1][1];
        let k = 1e-4 / 12.0;
        assert!((schur - k * 9.0).abs() < 1e-12, "{schur}");
    }

    #[test]
    fn classic_pinched_value() {
        let w = classic().deflection();
        assert!((w / 1.8248e-5 - 1.0).abs() < 2e-3, "{w}");
    }

    #[test]
    fn series_tail_is_second_order() {
        let c = classic();
        let (a, b, d) = (c.deflection_truncated(250, 250), c.deflection_truncated(500, 500), c.deflection_truncated(1000, 1000));
        let ratio = (b - a) / (d - b);
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn navier_scales() {
        assert!((navier_center_deflection(1.0, 1.0, 1.0) * 4.0 * PI.powi(4) - 1.0).abs() < 1e-15);
    }
}
