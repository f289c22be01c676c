use klshell_core::splines::{ElementGrid, NurbsPatch};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// k-th derivative of `N_{i,p}` by the Cox-de Boor recursion.
fn cox_de_boor(knots: &[f64], i: usize, p: usize, k: usize, t: f64) -> f64 {
    let last = *knots.last().unwrap();
    if p == 0 {
        if k > 0 {
            return 0.0;
        }
        let (lo, hi) = (knots[i], knots[i + 1]);
        // the closing span owns the right end
        let inside = (t >= lo && t < hi) || (t == last && hi == last && lo < hi);
        return if inside { 1.0 } else { 0.0 };
    }
    let term = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };
    if k == 0 {
        term(t - knots[i], knots[i + p] - knots[i]) * cox_de_boor(knots, i, p - 1, 0, t)
            + term(knots[i + p + 1] - t, knots[i + p + 1] - knots[i + 1]) * cox_de_boor(knots, i + 1, p - 1, 0, t)
    } else {
        p as f64
            * (term(cox_de_boor(knots, i, p - 1, k - 1, t), knots[i + p] - knots[i])
                - term(cox_de_boor(knots, i + 1, p - 1, k - 1, t), knots[i + p + 1] - knots[i + 1]))
    }
}

struct Oracle {
    pu: usize,
    pv: usize,
    ku: Vec<f64>,
    kv: Vec<f64>,
    weights: Vec<f64>,
}

impl Oracle {
    fn grid(&self) -> (usize, usize) {
        (self.ku.len() - self.pu - 1, self.kv.len() - self.pv - 1)
    }

    fn rational(&self, u: f64, v: f64) -> Vec<f64> {
        let (nu, nv) = self.grid();
        let mut r = Vec::with_capacity(nu * nv);
        for j in 0..nv {
            for i in 0..nu {
                r.push(self.weights[j * nu + i] * cox_de_boor(&self.ku, i, self.pu, 0, u) * cox_de_boor(&self.kv, j, self.pv, 0, v));
            }
        }
        let w: f64 = r.iter().sum();
        r.iter().map(|x| x / w).collect()
    }
}

fn setup(seed: u64) -> (Oracle, NurbsPatch) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ku = vec![0.0, 0.0, 0.0, 0.0, 0.3, 0.3, 0.55, 1.0, 1.0, 1.0, 1.0];
    let kv = vec![0.0, 0.0, 0.0, 0.2, 0.7, 0.9, 1.0, 1.0, 1.0];
    let (pu, pv) = (3, 2);
    let (nu, nv) = (ku.len() - pu - 1, kv.len() - pv - 1);
    let weights: Vec<f64> = (0..nu * nv).map(|_| rng.gen_range(0.5..2.0)).collect();
    let pts: Vec<Vector3<f64>> = (0..nu * nv).map(|k| Vector3::new((k % nu) as f64, (k / nu) as f64, rng.gen_range(-0.3..0.3))).collect();
    let patch = NurbsPatch::new(pu, pv, ku.clone(), kv.clone(), pts, weights.clone()).unwrap();
    (Oracle { pu, pv, ku, kv, weights }, patch)
}

#[test]
fn b_spline_derivative_recursion_matches_differences() {
    let knots = [0.0, 0.0, 0.0, 0.0, 0.4, 0.4, 1.0, 1.0, 1.0, 1.0];
    let h = 1e-6;
    for i in 0..6 {
        for &t in &[0.13, 0.37, 0.62, 0.91] {
            let fd = (cox_de_boor(&knots, i, 3, 0, t + h) - cox_de_boor(&knots, i, 3, 0, t - h)) / (2.0 * h);
            assert!((fd - cox_de_boor(&knots, i, 3, 1, t)).abs() < 1e-7);
        }
    }
}

#[test]
fn rational_basis_matches_cox_de_boor() {
    for seed in 0..4 {
        let (oracle, patch) = setup(seed);
        let grid = ElementGrid::new(&patch).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        for _ in 0..40 {
            let (u, v) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let e = grid.locate(u, v);
            let b = grid.eval(&patch, e, [u, v]).unwrap();
            let exact = oracle.rational(u, v);
            let mut seen = 0.0;
            for (k, &idx) in b.indices.iter().enumerate() {
                assert!((b.values[k] - exact[idx]).abs() < 1e-13, "seed {seed} ({u}, {v}) function {idx}");
                seen += exact[idx];
            }
            // the element carries every function that is nonzero there
            assert!((seen - 1.0).abs() < 1e-13);
        }
    }
}

#[test]
fn rational_derivatives_match_differences() {
    let (oracle, patch) = setup(7);
    let grid = ElementGrid::new(&patch).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 1e-5;
    for _ in 0..25 {
        // keep the stencil inside one span
        let (u, v) = (rng.gen_range(0.32..0.53), rng.gen_range(0.22..0.68));
        let b = grid.eval(&patch, grid.locate(u, v), [u, v]).unwrap();
        let f = |du: f64, dv: f64| oracle.rational(u + du, v + dv);
        let (up, um, vp, vm, c) = (f(h, 0.0), f(-h, 0.0), f(0.0, h), f(0.0, -h), f(0.0, 0.0));
        let (pp, pm, mp, mm) = (f(h, h), f(h, -h), f(-h, h), f(-h, -h));
        for (k, &i) in b.indices.iter().enumerate() {
            let d_u = (up[i] - um[i]) / (2.0 * h);
            let d_v = (vp[i] - vm[i]) / (2.0 * h);
            let d_uu = (up[i] - 2.0 * c[i] + um[i]) / (h * h);
            let d_vv = (vp[i] - 2.0 * c[i] + vm[i]) / (h * h);
            let d_uv = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
            assert!((b.d1[k][0] - d_u).abs() < 1e-7 * (1.0 + d_u.abs()));
            assert!((b.d1[k][1] - d_v).abs() < 1e-7 * (1.0 + d_v.abs()));
            assert!((b.d2[k][0] - d_uu).abs() < 1e-5 * (1.0 + d_uu.abs()));
            assert!((b.d2[k][1] - d_vv).abs() < 1e-5 * (1.0 + d_vv.abs()));
            assert!((b.d2[k][2] - d_uv).abs() < 1e-5 * (1.0 + d_uv.abs()));
        }
    }
}
