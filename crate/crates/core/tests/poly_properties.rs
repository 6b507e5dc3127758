use opdiff_core::{Complex64, Polynomial};
use proptest::prelude::*;

fn coeffs(max_deg: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 1..=max_deg + 1)
}

fn disc(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, 0.0..core::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

/// `Σ |c_k| |z|^k`, the rounding scale of a Horner evaluation.
fn abs_eval(p: &Polynomial, z: Complex64) -> f64 {
    p.coeffs().iter().rev().fold(0.0, |acc, c| acc * z.norm() + c.abs())
}

fn abs_eval_c(p: &Polynomial<Complex64>, z: Complex64) -> f64 {
    p.coeffs().iter().rev().fold(0.0, |acc, c| acc * z.norm() + c.norm())
}

/// Keeps points pairwise at least `gap` apart, in order of appearance.
fn separated(pts: Vec<Complex64>, gap: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for p in pts {
        if out.iter().all(|q| (p - q).norm() >= gap) {
            out.push(p);
        }
    }
    out
}

proptest! {
    #[test]
    fn product_evaluates_as_product(
        a in coeffs(12),
        b in coeffs(12),
        zs in prop::collection::vec(disc(2.0), 20),
    ) {
        let (p, q) = (Polynomial::new(a), Polynomial::new(b));
        let pq = &p * &q;
        for z in zs {
            let scale = abs_eval(&p, z) * abs_eval(&q, z);
            let err = (pq.evaluate(z) - p.evaluate(z) * q.evaluate(z)).norm();
            prop_assert!(err <= 1e-12 * scale.max(f64::MIN_POSITIVE), "z={z}: {err:e} vs {scale:e}");
        }
    }

    #[test]
    fn antiderivative_round_trip(a in coeffs(20), c in -5.0..5.0f64) {
        let p = Polynomial::new(a);
        let big = p.antiderivative(c);
        prop_assert_eq!(big.coeff(0), c);
        let back = big.derivative();
        let scale = p.max_abs_coeff();
        for k in 0..p.coeffs().len() {
            prop_assert!((back.coeff(k) - p.coeff(k)).abs() <= 1e-15 * scale);
        }
    }

    #[test]
    fn roots_recover_multiset(raw in prop::collection::vec(disc(3.0), 1..=25)) {
        let want = separated(raw, 0.05);
        let p = Polynomial::from_roots(&want);
        // the |p| / max|c| residual cannot go below the Horner rounding floor at |z| up to 3
        let floor = want.iter().map(|w| abs_eval_c(&p, *w)).fold(0.0, f64::max) / p.max_abs_coeff();
        let rs = p.roots((64.0 * f64::EPSILON * floor).max(1e-12)).unwrap();
        prop_assert_eq!(rs.roots.len(), want.len());
        // separation 0.05 ≫ error, so nearest-neighbour matching is optimal
        let mut free = rs.roots.clone();
        for w in &want {
            let (i, d) = free
                .iter()
                .enumerate()
                .map(|(i, r)| (i, (r - w).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            prop_assert!(d <= 1e-8, "root {w} off by {d:e}; want {:?}", want);
            free.swap_remove(i);
        }
    }

    #[test]
    fn residual_bounded_by_max_coeff(raw in prop::collection::vec(disc(1.0), 1..=25)) {
        // inside the unit disc Horner rounding stays below (deg + 1) max|c| ε
        let want = separated(raw, 0.05);
        let p = Polynomial::from_roots(&want);
        let tol = 1e-10;
        let rs = p.roots(tol).unwrap();
        prop_assert!(rs.residual <= tol);
        for r in &rs.roots {
            prop_assert!(p.evaluate(*r).norm() <= tol * p.max_abs_coeff());
        }
    }

    #[test]
    fn real_evaluation_stays_real(a in coeffs(15), x in -3.0..3.0f64) {
        let p = Polynomial::new(a);
        let v = p.evaluate(Complex64::new(x, 0.0));
        prop_assert_eq!(v.im, 0.0);
    }
}
