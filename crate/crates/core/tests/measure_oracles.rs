mod common;

use common::*;
use opdiff_core::jacobi::{jacobi_recurrence, JacobiParams};
use opdiff_core::measure::{l_norm, stieltjes};
use opdiff_core::{Error, MeasureSpec, MuInnerProduct, Polynomial};
use proptest::prelude::*;

fn ip(m: &Named) -> MuInnerProduct {
    MuInnerProduct::new(m.spec().validate().unwrap()).unwrap()
}

/// Romberg integration of `∫_0^π g(cos t) sin t dt`; the substitution makes the
/// integrand smooth for integer and half-integer exponents.
fn romberg<F: Fn(f64) -> f64>(g: F) -> f64 {
    let h = |t: f64| g(libm::cos(t)) * libm::sin(t);
    let pi = core::f64::consts::PI;
    let mut rows: Vec<Vec<f64>> = vec![vec![0.5 * pi * (h(0.0) + h(pi))]];
    for level in 1..=16 {
        let n = 1usize << level;
        let step = pi / n as f64;
        let mid: f64 = (0..n / 2).map(|i| h((2 * i + 1) as f64 * step)).sum();
        let mut row = vec![0.5 * rows[level - 1][0] + step * mid];
        for j in 1..=level {
            let f = libm::pow(4.0, j as f64);
            row.push((f * row[j - 1] - rows[level - 1][j - 1]) / (f - 1.0));
        }
        let done = (row[level] - rows[level - 1][level - 1]).abs() <= 1e-14 * row[level].abs().max(1e-300);
        rows.push(row);
        if done && level > 4 {
            break;
        }
    }
    *rows.last().unwrap().last().unwrap()
}

#[test]
fn moments_against_cosine_mapped_romberg() {
    for &(a, b) in &[(0.0, 0.0), (0.5, 0.0), (1.0, 0.5), (2.0, 1.0), (0.5, 0.5)] {
        for (lead, roots) in [(-1.0, vec![2.0]), (-1.0, vec![2.0, -2.0]), (1.0, vec![2.0, 2.0, -2.0]), (3.0, vec![])] {
            let m = Named { name: "", alpha: a, beta: b, lead, roots };
            let p = ip(&m);
            let rho = m.spec().validate().unwrap().rho().clone();
            let w = |x: f64| libm::pow(1.0 - x, a) * libm::pow(1.0 + x, b) / rho.eval_real(x);
            for k in 0..10 {
                let got = p.inner(&Polynomial::new(monomial(k)), &Polynomial::one()).unwrap();
                let want = romberg(|x| libm::pow(x, k as f64) * w(x));
                let scale = romberg(|x| libm::pow(x, (k + k % 2) as f64) * w(x));
                assert!((got - want).abs() <= 1e-9 * scale, "a={a} b={b} k={k}: {got} vs {want}");
            }
        }
    }
}

fn monomial(k: usize) -> Vec<f64> {
    let mut v = vec![0.0; k + 1];
    v[k] = 1.0;
    v
}

#[test]
fn inner_product_examples() {
    let one = Polynomial::one();
    let x = Polynomial::new(vec![0.0, 1.0]);
    let p = ip(&Named { name: "", alpha: 0.0, beta: 0.0, lead: 2.0, roots: vec![] });
    assert!((p.inner(&one, &one).unwrap() - 1.0).abs() <= 1e-13);
    let p = ip(&m1());
    assert!((p.inner(&one, &one).unwrap() - libm::log(3.0)).abs() <= 1e-13);
    assert!((p.inner(&x, &one).unwrap() - (2.0 * libm::log(3.0) - 2.0)).abs() <= 1e-13);
}

#[test]
fn stieltjes_examples() {
    let ln3 = libm::log(3.0);
    let basis = stieltjes(&ip(&m1()), 10).unwrap();
    assert!((basis.a()[0] - (2.0 * ln3 - 2.0) / ln3).abs() <= 1e-13);
    assert!((l_norm(0, &basis).unwrap() - ln3).abs() <= 1e-13);
    for n in 1..=10 {
        let r = l_norm(n, &basis).unwrap() / l_norm(n - 1, &basis).unwrap();
        assert!((r - basis.b()[n]).abs() <= 1e-13 * r);
    }
    // even measure
    let basis = stieltjes(&ip(&m2()), 20).unwrap();
    assert!(basis.a().iter().all(|a| a.abs() <= 1e-14));
}

#[test]
fn orthogonality_on_every_test_measure() {
    for m in all_measures() {
        let p = ip(&m);
        let basis = stieltjes(&p, 30).unwrap();
        for i in 0..=30 {
            for j in 0..i {
                let v = p
                    .integrate(i + j, |x| {
                        let z = c(x, 0.0);
                        basis.eval(i, z).unwrap().re * basis.eval(j, z).unwrap().re
                    })
                    .unwrap();
                let s = libm::sqrt(basis.norm(i) * basis.norm(j));
                assert!(v.abs() <= 1e-10 * s, "{} i={i} j={j}: {v:e}", m.name);
            }
        }
    }
}

#[test]
fn reconstructed_polynomials_are_monic() {
    for m in all_measures() {
        let basis = stieltjes(&ip(&m), 30).unwrap();
        for n in 0..=30 {
            let lead = basis.coefficients(n).unwrap().leading();
            assert!((lead - 1.0).abs() <= 1e-12, "{} n={n}", m.name);
        }
    }
}

#[test]
fn m0_reduces_to_jacobi() {
    for &(a, b) in &[(0.0, 0.0), (0.5, -0.25), (-0.5, 2.5)] {
        let m = Named { name: "", alpha: a, beta: b, lead: 1.0, roots: vec![] };
        let s = stieltjes(&ip(&m), 30).unwrap();
        let j = jacobi_recurrence(JacobiParams::new(a, b).unwrap(), 30);
        for n in 0..=30 {
            assert!((s.a()[n] - j.a()[n]).abs() <= 1e-11, "a n={n}");
            if n > 0 {
                assert!((s.b()[n] - j.b()[n]).abs() <= 1e-11 * j.b()[n], "b n={n}");
            }
            assert!((s.norm(n) - j.norm(n)).abs() <= 1e-11 * j.norm(n), "norm n={n}");
        }
    }
}

#[test]
fn gram_schmidt_oracle_for_m1() {
    let nmax = 6;
    let mom = m1_moments(2 * nmax);
    let ls = gram_schmidt(&mom, nmax);
    let leb = jacobi_moments(0.0, 0.0, 2 * nmax);
    let ps = gram_schmidt(&leb, nmax);
    let f = m1().family(nmax);
    let pair = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                s += x * y * leb[i + j];
            }
        }
        s
    };
    for (n, l) in ls.iter().enumerate() {
        assert!(max_rel_diff(f.l_poly(n).unwrap().coeffs(), l) <= 1e-10, "L_{n}");
        for (j, p) in ps.iter().enumerate().take(n + 1) {
            let want = pair(l, p) / pair(p, p);
            let got = f.b_full(n, j).unwrap();
            assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0), "b_{{{n},{j}}}: {got} vs {want}");
        }
    }
}

#[test]
fn validation_errors() {
    let p = JacobiParams::new(0.0, 0.0).unwrap();
    let r = MeasureSpec::new(p, 1.0, vec![c(0.0, 0.0)]).validate();
    assert!(matches!(r, Err(Error::NonPositiveRho { .. })));
    let r = MeasureSpec::new(p, 1.0, vec![c(0.0, 2.0)]).validate();
    assert!(matches!(r, Err(Error::ConjugationBroken { .. })));
    assert!(MeasureSpec::new(p, 1.0, vec![c(0.0, 2.0), c(0.0, -2.0)]).validate().is_ok());
    // endpoint zero
    let r = MeasureSpec::new(p, -1.0, vec![c(1.0, 0.0)]).validate();
    assert!(matches!(r, Err(Error::NonPositiveRho { .. })));
    assert!(JacobiParams::new(-1.0, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_linear_modifications_stay_orthogonal(
        a in -0.9..3.0f64,
        b in -0.9..3.0f64,
        nu in 1.1..6.0f64,
        left in any::<bool>(),
        scale in 0.2..5.0f64,
    ) {
        // ρ = s (ν − x) for ν > 1 or s (x + ν) for the mirrored root
        let (root, lead) = if left { (-nu, scale) } else { (nu, -scale) };
        let m = Named { name: "", alpha: a, beta: b, lead, roots: vec![root] };
        let p = ip(&m);
        let basis = stieltjes(&p, 15).unwrap();
        for i in 0..=15 {
            for j in 0..i {
                let v = p.integrate(i + j, |x| {
                    let z = c(x, 0.0);
                    basis.eval(i, z).unwrap().re * basis.eval(j, z).unwrap().re
                }).unwrap();
                prop_assert!(v.abs() <= 1e-10 * libm::sqrt(basis.norm(i) * basis.norm(j)));
            }
            if i > 0 {
                prop_assert!(basis.b()[i] > 0.0);
            }
        }
    }
}
