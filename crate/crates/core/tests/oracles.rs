//! Cross-checks against independent implementations written only for tests.

use ectwin::arith::{li, li2};
use ectwin::gl2::{count_c, density_c, gl2_order, MatrixModN};
use ectwin::koblitz::{
    koblitz_constant, koblitz_partial_exact, koblitz_tail_bound, twin_constant_classical,
};
use ectwin::sieve_theory::{alpha, alpha_integrand, beta, beta_integrand, j_function};
use ectwin::{GaloisImageSpec, Rational};

fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

fn composite_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn li2_against_midpoint_rule() {
    // Substituting t = e^s flattens the integrand for the fixed-step rule.
    let x: f64 = 1e6;
    let oracle = midpoint(|s| s.exp() / (s * s), 2f64.ln(), x.ln(), 2_000_000);
    assert!((li2(x) - oracle).abs() / oracle < 1e-8, "{} vs {oracle}", li2(x));
    let oracle = midpoint(|s| s.exp() / s, 2f64.ln(), x.ln(), 2_000_000);
    assert!((li(x) - oracle).abs() / oracle < 1e-8);
}

#[test]
fn alpha_beta_against_fixed_step_simpson() {
    for v in [1.0f64 / 6.0, 0.18, 0.20, 0.22, 0.25] {
        let a = ((1.0 - v) / 0.75).ln() - composite_simpson(|u| alpha_integrand(u, v), 4.0, 1.0 / v, 20_000);
        let b = ((1.0 - v) / (3.0 * v)).ln() - composite_simpson(|u| beta_integrand(u, v), 4.0, 1.0 / v, 20_000);
        assert!((alpha(v).unwrap() - a).abs() < 1e-8, "alpha({v})");
        assert!((beta(v).unwrap() - b).abs() < 1e-8, "beta({v})");
    }
}

#[test]
fn j_scales_inversely_with_xi() {
    let j1 = j_function(0.2, 0.625, 0.25).unwrap();
    let j2 = j_function(0.4, 0.625, 0.25).unwrap();
    assert!((j1 - 2.0 * j2).abs() < 1e-12);
    // 1.32304 / (2 * (1 - 1/2)): J at xi = 1/5 is 1.32304 rather than 6.6152.
    assert!((j1 - 1.32304).abs() < 5e-4);
}

#[test]
fn tail_bounds_cover_a_longer_product() {
    let image = GaloisImageSpec::full(1).unwrap();
    let far = koblitz_constant(&image, 3_000_000).unwrap().value;
    for cutoff in [1_000u64, 10_000, 100_000, 1_000_000] {
        let est = koblitz_constant(&image, cutoff).unwrap();
        let (lo, hi) = est.interval();
        assert!(lo <= far && far <= hi, "cutoff {cutoff}: [{lo}, {hi}] misses {far}");
        assert_eq!(est.tail_bound, koblitz_tail_bound(cutoff));
        let twin = twin_constant_classical(cutoff).unwrap();
        let (lo, hi) = twin.interval();
        assert!(lo <= 1.320_323_631_694 && 1.320_323_631_693 <= hi, "twin cutoff {cutoff}");
    }
}

#[test]
fn image_mod_two_matches_trivial_image() {
    let one = GaloisImageSpec::full(1).unwrap();
    let two = GaloisImageSpec::full(2).unwrap();
    assert_eq!(
        koblitz_partial_exact(&one, 19).unwrap(),
        koblitz_partial_exact(&two, 19).unwrap()
    );
    let a = koblitz_constant(&one, 100_000).unwrap().value;
    let b = koblitz_constant(&two, 100_000).unwrap().value;
    assert!((a - b).abs() < 1e-13);
}

#[test]
fn exact_partial_product_matches_float() {
    let image = GaloisImageSpec::full(6).unwrap();
    let exact = koblitz_partial_exact(&image, 19).unwrap();
    let float = koblitz_constant(&image, 19).unwrap().value;
    let exact = *exact.numer() as f64 / *exact.denom() as f64;
    assert!((exact - float).abs() < 1e-14);
}

// Scan of all n^4 matrices, sharing no code with the library counts.
fn scan(n: u64) -> (u64, u64) {
    let (mut order, mut c) = (0, 0);
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for d in 0..n {
                    let det = (a * d + n * n - b * cc % n) % n;
                    if ectwin::arith::gcd(det, n) != 1 {
                        continue;
                    }
                    order += 1;
                    if (det + 1 + 2 * n - (a + d) % n).is_multiple_of(n) {
                        c += 1;
                    }
                }
            }
        }
    }
    (order, c)
}

#[test]
fn gl2_counts_against_full_scan() {
    for n in 2..=16u64 {
        let (order, c) = scan(n);
        assert_eq!(gl2_order(n).unwrap(), order, "order n = {n}");
        assert_eq!(count_c(n).unwrap(), c, "C n = {n}");
        if let Ok(d) = density_c(n) {
            assert_eq!(d, Rational::new(c as i128, order as i128), "density n = {n}");
        }
    }
}

#[test]
fn frobenius_residue_definition() {
    let m = MatrixModN::new(7, 2, 3, 1, 4);
    assert_eq!(m.det(), 5);
    assert_eq!(m.trace(), 6);
    assert_eq!(m.frobenius_residue(), 0);
}
