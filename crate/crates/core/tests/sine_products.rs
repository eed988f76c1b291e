use num_complex::Complex;
use num_integer::Integer;
use num_rational::Rational64;
use partfrac::dilog::clausen;
use partfrac::series::TruncatedSeries;
use partfrac::sine_products::*;
use partfrac::{ComplexExt, Error, Mp, Real};
use proptest::prelude::*;
use std::f64::consts::PI;

fn coprime_pairs(kmax: i64, hmax: i64) -> impl Iterator<Item = (i64, i64)> {
    (2..=kmax).flat_map(move |k| (1..k.min(hmax + 1)).filter(move |h| h.gcd(&k) == 1).map(move |h| (h, k)))
}

#[test]
fn small_products_match_direct_multiplication() {
    for (h, k) in coprime_pairs(30, 29) {
        let mut direct = 1.0f64;
        for m in 0..k {
            if m > 0 {
                direct *= 2.0 * (PI * (m * h) as f64 / k as f64).sin();
            }
            let v = sine_product::<f64>(h, k, m as u64, 53).unwrap().value();
            assert!((v - direct).abs() <= 1e-11 * direct.abs().max(1.0), "{h}/{k} m={m}");
        }
    }
    let one = sine_product::<f64>(1, 6, 1, 53).unwrap().value();
    assert!((one - 1.0).abs() < 1e-15);
    assert_eq!(sine_product::<f64>(3, 7, 0, 53).unwrap().value(), 1.0);
    assert!(matches!(sine_product::<f64>(1, 5, 5, 53), Err(Error::Domain(_))));
    assert!(matches!(sine_product::<f64>(2, 4, 1, 53), Err(Error::Domain(_))));
}

#[test]
fn full_product_of_roots_of_unity() {
    // |∏_{j<k} (1 − ζ^j)| = k and the sign of ∏⁻¹ at m = k − 1
    for (h, k) in coprime_pairs(50, 49) {
        let sp = sine_product::<Mp>(h, k, (k - 1) as u64, 160).unwrap();
        let want = Mp::from_i64_prec(k, 160).ln();
        assert!((sp.log_abs.clone() - want).abs().to_f64() < 1e-40, "{h}/{k}");
        let e = (h - 1) * (k - 1) / 2;
        let sign = if e % 2 == 0 { 1 } else { -1 };
        assert_eq!(sp.sign, sign, "{h}/{k}");
        let r = sp.recip_value().to_f64();
        assert!((r - sign as f64 / k as f64).abs() < 1e-15);
    }
}

#[test]
fn product_phase_identity() {
    let mut rng = 0x2545_f491_4f6c_dd1du64;
    for _ in 0..40 {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        let k = 3 + (rng % 60) as i64;
        let h = 1 + ((rng >> 20) % (k as u64 - 1)) as i64;
        if h.gcd(&k) != 1 {
            continue;
        }
        let m = ((rng >> 40) % k as u64) as i64;
        let mut lhs = Complex::new(1.0, 0.0);
        for j in 1..=m {
            let x = Complex::new(0.0, 2.0 * PI * (j * h) as f64 / k as f64).exp();
            lhs /= Complex::new(1.0, 0.0) - x;
        }
        let phase =
            Complex::new(0.0, PI * m as f64 / 2.0 * (1.0 - h as f64 / k as f64 * (m + 1) as f64)).exp();
        let rhs = phase * sine_product::<f64>(h, k, m as u64, 53).unwrap().recip_value();
        assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0), "{h}/{k} m={m}");
    }
}

#[test]
fn psi_spot_values_and_extremes() {
    for (h, want) in [(1, 0.148849), (2, 0.0697363), (105, 0.0696573), (106, 0.0696573), (210, 0.148849)] {
        let got = psi::<Mp>(h, 211, 128).unwrap().to_f64();
        assert!((got - want).abs() < 5e-7, "h = {h}: {got}");
    }
    assert_eq!(psi::<f64>(37, 211, 53).unwrap(), 0.0);
    let u = 0.0680762;
    let big: Vec<i64> = (1..211).filter(|&h| psi::<f64>(h, 211, 53).unwrap() > u).collect();
    assert_eq!(big, vec![1, 2, 105, 106, 209, 210]);
    let (_, arg) = psi_with_argmax::<f64>(1, 211, 53).unwrap();
    assert_eq!(arg, 35);
}

#[test]
fn minimal_pairs() {
    for k in [5, 17, 211, 400] {
        assert_eq!(minimal_pair(1, k).unwrap().d, 1);
        assert_eq!(minimal_pair(k - 1, k).unwrap().d, 1);
    }
    assert_eq!(minimal_pair(2, 211).unwrap().d, 2);
    assert_eq!(minimal_pair(106, 211).unwrap().d, 2);
    for (h, k) in coprime_pairs(40, 39) {
        let mp = minimal_pair(h, k).unwrap();
        assert_eq!((mp.beta0 * h - mp.gamma0).rem_euclid(k), 0);
        let brute = (1..k)
            .flat_map(|b| [b, -b])
            .filter_map(|b| {
                let g = (b * h).rem_euclid(k);
                (g >= 1).then_some(b.abs() * g)
            })
            .min()
            .unwrap();
        assert_eq!(mp.d, brute, "{h}/{k}");
    }
}

#[test]
fn wave_sum_tracks_log_product() {
    let (h, k, m) = (3, 101, 40);
    let s = s_wave_sum::<f64>(m, h, k, 53).unwrap();
    let lp = sine_product::<f64>(h, k, m as u64, 53).unwrap().log_abs / k as f64;
    let slack = (k as f64).ln().powi(2) / k as f64;
    assert!((lp - s / (2.0 * PI)).abs() < slack, "{lp} vs {}", s / (2.0 * PI));
}

#[test]
fn psi_is_bounded_through_d_with_fitted_constant() {
    let cl = clausen(&(PI / 3.0));
    let primes: Vec<i64> =
        (100..=400).filter(|&n: &i64| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect();
    let excess = |k: i64| {
        (1..k)
            .map(|h| {
                let d = minimal_pair(h, k).unwrap().d as f64;
                let psi = psi::<f64>(h, k, 53).unwrap();
                (psi - cl / (2.0 * PI * d)) * (k as f64).sqrt() / (k as f64).ln()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let fit = primes.iter().filter(|&&k| k < 200).map(|&k| excess(k)).fold(f64::NEG_INFINITY, f64::max);
    let tau = fit.max(0.0) * 1.5 + 0.05;
    for &k in primes.iter().filter(|&&k| k >= 200) {
        assert!(excess(k) <= tau, "k = {k}: {} > {tau}", excess(k));
    }
}

fn cmp(re: f64, im: f64, p: u32) -> Complex<Mp> {
    Complex::new(Mp::from_f64_prec(re, p), Mp::from_f64_prec(im, p))
}

#[test]
fn first_cot_derivative_identity() {
    for (re, im) in [(0.3, 0.2), (2.1, -0.7), (-1.4, 1.9), (0.01, -0.02), (5.5, 0.0)] {
        let z = cmp(re, im, 200);
        let c = z.cot();
        let want = -(Complex::from_re(Mp::from_i64_prec(1, 200)) + c.clone() * c);
        let got = cot_derivative(1, &z).unwrap();
        assert!(
            ComplexExt::abs(&(got - want.clone())).to_f64() < 1e-50 * (1.0 + ComplexExt::abs(&want).to_f64())
        );
    }
    let three_pi = Mp::pi_prec(128) * Mp::from_i64_prec(3, 128);
    assert!(matches!(
        cot_derivative(2, &Complex::new(three_pi, Mp::from_i64_prec(0, 128))),
        Err(Error::Pole(_))
    ));
}

#[test]
fn second_cot_derivative_matches_series_division() {
    let p = 200;
    for (re, im) in [(0.4, 0.3), (1.7, -1.2), (-0.3, 0.05)] {
        let z = cmp(re, im, p);
        let one = Complex::from_re(Mp::from_i64_prec(1, p));
        let zero = Complex::from_re(Mp::from_i64_prec(0, p));
        let half = Complex::from_re(Mp::from_f64_prec(0.5, p));
        let sixth = Complex::from_re(Mp::from_i64_prec(1, p) / Mp::from_i64_prec(6, p));
        // sin t, cos t to order t³
        let sin_t = TruncatedSeries::new(0, vec![zero.clone(), one.clone(), zero.clone(), -sixth]);
        let cos_t = TruncatedSeries::new(0, vec![one.clone(), zero.clone(), -half, zero.clone()]);
        let (s, c) = (z.sin(), z.cos());
        let num = cos_t.scale(&c).sub(&sin_t.scale(&s));
        let den = sin_t.scale(&c).add(&cos_t.scale(&s));
        let cot = num.div(&den).unwrap();
        let two = Complex::from_re(Mp::from_i64_prec(2, p));
        let want = cot.coeff(2).unwrap() * two;
        let got = cot_derivative(2, &z).unwrap();
        assert!(ComplexExt::abs(&(got - want)).to_f64() < 1e-50);
    }
}

#[test]
fn cot_routes_agree_on_the_real_axis() {
    for n in 0..40 {
        for x in [0.05, 0.3, 1.0, 1.5, 2.2, 3.0, -0.7] {
            let xr = Mp::from_f64_prec(x, 256);
            let real = cot_derivative_real(n, &xr).unwrap().to_f64();
            let cx = cot_derivative(n, &Complex::new(xr, Mp::from_i64_prec(0, 256))).unwrap();
            let tol = 1e-60 * real.abs().max(1.0);
            assert!((cx.re.to_f64() - real).abs() < tol, "n = {n}, x = {x}");
            assert!(cx.im.to_f64().abs() < tol);
        }
    }
}

#[test]
fn cot_derivative_decay_bound() {
    let mut fact = 1.0;
    for k in 0..=8usize {
        if k > 0 {
            fact *= k as f64;
        }
        for x in [0.1, 0.35, 0.5, 0.8] {
            for y in [1.0, -1.0, 1.5, -2.5, 4.0] {
                let z = Complex::new(PI * x, PI * y);
                let v = cot_derivative(k, &z).unwrap().norm();
                let delta = if k == 0 { 1.0 } else { 0.0 };
                let bound = delta
                    + fact / PI.powi(k as i32 + 1)
                        * (4.01 / f64::abs(y)).powi(k as i32 + 1)
                        * (-PI * f64::abs(y)).exp();
                assert!(v <= bound, "k = {k}, z = {x}+{y}i: {v} > {bound}");
            }
        }
    }
}

#[test]
fn g1_closed_form() {
    for (re, im) in [(1.2, 0.3), (0.5, 0.7), (1.45, -0.2), (-2.3, 1.1)] {
        let z = Complex::new(re, im);
        let e = (Complex::new(0.0, 2.0 * PI) * z).exp();
        let want = Complex::new(0.0, PI) * z / 6.0 * (-0.5 + 1.0 / (1.0 - e));
        assert!((g_ell(1, &z).unwrap() - want).norm() < 1e-13);
    }
    assert!(matches!(g_ell(1, &Complex::new(2.0, 0.0)), Err(Error::Pole(_))));
}

#[test]
fn g_tail_shrinks_with_n() {
    // N^{2d−1} |Σ_{ℓ=d}^{d+2} g_ℓ(z)/N^{2ℓ−1}| stays bounded as N grows
    for (re, im) in [(1.2, 0.3), (1.1, -0.4), (1.4, 0.05)] {
        let z = Complex::new(re, im);
        let g = g_ell_all(6, &z).unwrap();
        for d in 1..=3usize {
            let scaled: Vec<f64> = [100.0f64, 200.0, 400.0, 800.0]
                .iter()
                .map(|&n| {
                    let tail: Complex<f64> = (d..d + 3).map(|l| g[l - 1] / n.powi(2 * l as i32 - 1)).sum();
                    tail.norm() * n.powi(2 * d as i32 - 1)
                })
                .collect();
            for w in scaled.windows(2) {
                assert!(w[1] <= w[0] * 1.01, "d = {d}: {scaled:?}");
            }
        }
    }
}

#[test]
fn exponential_moment_bound() {
    for k in 0..=6i32 {
        for c in [0.5f64, 1.0, 2.0] {
            let sum: f64 = (1..4000).map(|l| (l as f64).powi(k) * (-c * l as f64).exp()).sum();
            let fact: f64 = (1..=k).map(f64::from).product();
            assert!(sum <= fact * (2.0 / c).powi(k + 1));
        }
    }
}

#[test]
fn reciprocal_products_stay_below_clausen_bound() {
    for h in 1..=5 {
        for k in (h + 1)..=150 {
            if h.gcd(&k) != 1 {
                continue;
            }
            let pre = sine_product_prefixes::<f64>(h, k, 53).unwrap();
            let ch = c_h::<f64>(h, 53);
            for m in 1..k {
                if m * h >= k {
                    break;
                }
                let recip = (-pre[m as usize].0).exp();
                let bound = clausen_bound::<f64>(h, k, m, 53);
                assert!(recip <= bound * (1.0 + 1e-12), "{h}/{k} m={m}: {recip} > {bound}");
                if 2 * h * m >= k {
                    assert!(recip <= ch * (1.0 + 1e-12), "{h}/{k} m={m}: {recip} > c(h)");
                }
            }
        }
    }
}

#[test]
fn r_delta_table() {
    let rows = [
        (0.0079, 0.0382, 0.276, 0.924, 51.9),
        (0.007, 0.0347, 0.282, 0.581, 72.6),
        (0.006, 0.0307, 0.288, 0.427, 130.7),
        (0.005, 0.0265, 0.295, 0.320, 665.2),
        (0.00477, 0.0255, 0.297, 0.298, 11701.6),
    ];
    for (d, dl, r1, r2, rd) in rows {
        let r = r_delta::<f64>(&d).unwrap();
        assert!((d * (1.0 / d).ln() - dl).abs() < 5e-5);
        assert!((r.r1 - r1).abs() < 5e-4 && (r.r2 - r2).abs() < 5e-4, "{d}");
        assert!((r.r_delta - rd).abs() < 0.05, "{d}: {}", r.r_delta);
    }
}

#[test]
fn em_constraints_name_the_failure() {
    let cfg = EmConfig::new(Rational64::new(6, 1000), Rational64::new(31, 1000), 500);
    assert!(cfg.validate(1, 400, 3).is_ok());
    let msg = |r: partfrac::Result<()>| match r {
        Err(Error::Domain(s)) => s,
        other => panic!("expected a domain error, got {other:?}"),
    };
    assert!(msg(cfg.validate(1, 400, 2)).contains("Delta s/h <= m"));
    assert!(msg(cfg.validate(1, 400, 201)).contains("m <= k/(2h)"));
    assert!(msg(cfg.validate(2, 400, 30)).contains("gcd"));
    assert!(msg(cfg.validate(1, 501, 30)).contains("k <= s"));
    let narrow = EmConfig::new(Rational64::new(6, 1000), Rational64::new(2, 100), 500);
    assert!(msg(narrow.validate(1, 400, 30)).contains("W"));
    let wide = EmConfig::new(Rational64::new(9, 1000), Rational64::new(5, 100), 500);
    assert!(msg(wide.validate(1, 400, 30)).contains("0.0048"));
    assert_eq!(cfg.cutoff(1), 25);
    assert_eq!(cfg.cutoff(3), 8);
}

#[test]
fn em_estimate_against_exact_product() {
    let cfg = EmConfig::new(Rational64::new(6, 1000), Rational64::new(31, 1000), 500);
    let (h, k, m) = (1, 400, 150);
    let est = em_product_estimate::<Mp>(h, k, m, &cfg, 160).unwrap();
    let exact = sine_product::<Mp>(h, k, m as u64, 160).unwrap();
    let recip = (-exact.log_abs.clone()).exp();
    let rel = ((est.log_value.clone() + exact.log_abs.clone()).exp() - Mp::from_i64_prec(1, 160)).abs();
    let allowed = (Mp::from_f64_prec(500.0 * 0.031, 160)).exp() / recip;
    assert!(rel < allowed, "{} vs {}", rel.to_f64(), allowed.to_f64());
    assert_eq!(est.l, 25);
}

#[test]
fn t_l_bound_at_one() {
    let v = t_l_bound::<f64>(1, 1, 53);
    let want = PI.powi(3) / 2.0 / (2.0 * PI * std::f64::consts::E);
    assert!((v - want).abs() < 1e-14);
}

proptest! {
    #[test]
    fn sine_product_real_agrees_with_rational(k in 3i64..200, hh in 1i64..200, mm in 0u64..200) {
        let h = 1 + hh % (k - 1);
        prop_assume!(h.gcd(&k) == 1);
        let m = mm % k as u64;
        let a = sine_product::<f64>(h, k, m, 53).unwrap();
        let b = sine_product_real(&(h as f64 / k as f64), m).unwrap();
        prop_assert_eq!(a.sign, b.sign);
        prop_assert!((a.log_abs - b.log_abs).abs() < 1e-9);
    }

    #[test]
    fn psi_is_symmetric(k in 3i64..150, hh in 1i64..150) {
        let h = 1 + hh % (k - 1);
        prop_assume!(h.gcd(&k) == 1);
        let a = psi::<f64>(h, k, 53).unwrap();
        let b = psi::<f64>(k - h, k, 53).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }
}
