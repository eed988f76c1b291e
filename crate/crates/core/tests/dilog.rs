use num_complex::Complex;
use partfrac::dilog::*;
use partfrac::{ComplexExt, Error, Mp, Real};
use proptest::prelude::*;

const PREC: u32 = 256;

fn mp(x: f64) -> Mp {
    Mp::from_f64_prec(x, PREC)
}

fn cmp(re: f64, im: f64) -> Complex<Mp> {
    Complex::new(mp(re), mp(im))
}

fn dist(a: &Complex<Mp>, b: &Complex<Mp>) -> f64 {
    ComplexExt::abs(&(a.clone() - b.clone())).to_f64()
}

/// `−∫₀¹ log(1 − tz)/t dt` by adaptive Simpson; the segment avoids the cut
/// whenever z does.
fn li2_by_quadrature(z: Complex<f64>) -> Complex<f64> {
    let f = |t: f64| {
        if t == 0.0 {
            z
        } else {
            -(Complex::new(1.0, 0.0) - z * t).ln() / t
        }
    };
    fn simpson(
        f: &dyn Fn(f64) -> Complex<f64>,
        a: f64,
        b: f64,
        fa: Complex<f64>,
        fm: Complex<f64>,
        fb: Complex<f64>,
        whole: Complex<f64>,
        tol: f64,
        depth: u32,
    ) -> Complex<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = (f(lm), f(rm));
        let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
        let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(0.0), f(0.5), f(1.0));
    let whole = (fa + fm * 4.0 + fb) / 6.0;
    simpson(&f, 0.0, 1.0, fa, fm, fb, whole, 1e-13, 40)
}

/// Direct partial sums of Σ zⁿ/n².
fn li2_by_series(z: &Complex<Mp>, terms: usize) -> Complex<Mp> {
    let mut pw = z.clone();
    let mut sum = z.clone();
    for n in 2..=terms {
        pw = pw * z.clone();
        let n2 = mp((n * n) as f64);
        sum = sum + Complex::new(pw.re.clone() / n2.clone(), pw.im.clone() / n2);
    }
    sum
}

#[test]
fn li2_matches_quadrature_in_every_region() {
    let pts = [
        (0.3, 0.2),
        (-0.45, 0.1),
        (0.6, 0.7),
        (0.9, -0.3),
        (-0.8, -0.55),
        (0.2, 0.98),
        (1.3, 0.4),
        (2.5, -1.5),
        (-3.0, 0.2),
        (0.7, -2.8),
        (10.0, 5.0),
        (-20.0, -1.0),
        (1.0, 0.3),
        (0.5, 0.5),
    ];
    for (re, im) in pts {
        let want = li2_by_quadrature(Complex::new(re, im));
        let got = li2(&cmp(re, im)).to_c64();
        let got64 = li2(&Complex::new(re, im));
        assert!((got - want).norm() < 1e-10, "{re}+{im}i: {got} vs {want}");
        assert!((got64 - want).norm() < 1e-10, "f64 {re}+{im}i: {got64} vs {want}");
    }
}

#[test]
fn li2_matches_power_series_at_full_precision() {
    // 0.8^1600 < 2^-500, so the partial sums are exact to the working precision
    for (re, im) in [(0.6, 0.5), (-0.7, 0.3), (0.1, -0.79), (0.45, 0.0), (-0.3, -0.4)] {
        let z = cmp(re, im);
        assert!(dist(&li2(&z), &li2_by_series(&z, 1600)) < 1e-72, "{re}+{im}i");
    }
}

#[test]
fn li2_special_values() {
    let pi = Mp::pi_prec(PREC);
    let pi2 = pi.sq();
    let ln2 = mp(2.0).ln();
    // Catalan's constant: (π/8) log(2 + √3) + (3/8) Σ 1/((2n+1)² C(2n,n))
    let mut catalan = pi.clone() / mp(8.0) * (mp(2.0) + mp(3.0).sqrt()).ln();
    let mut central = mp(1.0);
    for n in 0..200u32 {
        if n > 0 {
            central = central * mp((2 * n * (2 * n - 1)) as f64) / mp((n * n) as f64);
        }
        catalan = catalan + mp(3.0) / (mp(8.0) * mp(((2 * n + 1) * (2 * n + 1)) as f64) * central.clone());
    }
    let cases = [
        (cmp(1.0, 0.0), Complex::new(pi2.clone() / mp(6.0), mp(0.0))),
        (cmp(-1.0, 0.0), Complex::new(-pi2.clone() / mp(12.0), mp(0.0))),
        (cmp(0.5, 0.0), Complex::new(pi2.clone() / mp(12.0) - ln2.sq() / mp(2.0), mp(0.0))),
        (cmp(0.0, 1.0), Complex::new(-pi2.clone() / mp(48.0), catalan)),
        // on the cut the value is the limit from above
        (cmp(2.0, 0.0), Complex::new(pi2.clone() / mp(4.0), pi.clone() * ln2)),
    ];
    for (z, want) in cases {
        assert!(dist(&li2(&z), &want) < 1e-70, "Li2({}) = {:?}", z.to_c64(), li2(&z).to_c64());
    }
}

#[test]
fn clausen_reproduces_figure_data() {
    // (3θ/π, 2 Cl₂(θ)) reference points
    let data = [
        (-4.0, 1.35326),
        (-2.5, -0.713817),
        (-1.0, -2.02988),
        (0.05, 0.413607),
        (0.5, 1.72876),
        (1.0, 2.02988),
        (1.35, 1.9278),
        (2.0, 1.35326),
        (2.95, 0.0725742),
        (4.5, -1.83193),
    ];
    let pi = Mp::pi_prec(PREC);
    for (x, y) in data {
        let theta = mp(x) * pi.clone() / mp(3.0);
        let got = 2.0 * clausen(&theta).to_f64();
        assert!((got - y).abs() < 6e-6 * y.abs().max(1.0), "x = {x}: {got} vs {y}");
    }
    let peak = clausen(&(pi / mp(3.0))).to_f64();
    assert!((peak - 1.0149416).abs() < 1e-7);
}

#[test]
fn clausen_quotient_peaks_at_x0() {
    // d/dx [Cl₂(2πx)/(2πx)] ∝ −2πx log(2 sin πx) − Cl₂(2πx), using Cl₂′(θ) = −log|2 sin(θ/2)|
    let g = |x: f64| {
        let t = 2.0 * std::f64::consts::PI * x;
        -t * (2.0 * (std::f64::consts::PI * x).sin()).ln() - clausen(&t)
    };
    let (mut lo, mut hi) = (0.6, 0.95);
    assert!(g(lo) * g(hi) < 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    assert!((lo - 0.791227).abs() < 1e-6, "x0 = {lo}");
}

const PAPER_ZEROS: [((i64, i64), (f64, f64)); 6] = [
    ((0, -1), (0.9161978162, -0.1824588972)),
    ((0, -2), (0.9684820460, -0.1095311065)),
    ((1, -2), (-0.9943069304, -0.0648889318)),
    ((-1, -3), (-0.5459030969, 0.8812307423)),
    ((0, -3), (0.9832603795, -0.0777596389)),
    ((1, -3), (-0.4594734813, -0.8485350380)),
];

#[test]
fn zeros_match_reference_values() {
    for ((a, b), (re, im)) in PAPER_ZEROS {
        let z = find_zero::<Mp>(BranchLabel::new(a, b), PREC).unwrap();
        let w = z.w.to_c64();
        assert!((w.re - re).abs() < 1e-9 && (w.im - im).abs() < 1e-9, "w({a},{b}) = {w}");
        assert!(z.residual.to_f64() < 1e-20);
        // recompute the residual independently of the solver
        let f = li2_continued(&z.w, BranchLabel::new(a, b));
        assert!(ComplexExt::abs(&f).to_f64() < 1e-70);
        let z64 = find_zero::<f64>(BranchLabel::new(a, b), 53).unwrap();
        assert!((z64.w - w).norm() < 1e-13);
    }
}

#[test]
fn zeros_are_conjugate_in_b() {
    for label in BranchLabel::with_zeros(8) {
        if label.b > 0 {
            continue;
        }
        let lo = find_zero::<Mp>(label, 192).unwrap().w;
        let hi = find_zero::<Mp>(BranchLabel::new(label.a, -label.b), 192).unwrap().w;
        let d = dist(&lo, &hi.conj());
        assert!(d < 1e-52, "{label:?}: {d:e}");
    }
}

#[test]
fn inadmissible_labels_are_rejected() {
    for (a, b) in [(0, 0), (-1, -2), (2, -3), (3, 5), (-2, 4)] {
        assert!(!BranchLabel::new(a, b).has_zero());
        assert!(matches!(find_zero::<f64>(BranchLabel::new(a, b), 53), Err(Error::Domain(_))));
    }
    assert_eq!(BranchLabel::with_zeros(3).len(), 12);
}

#[test]
fn growth_and_oscillation_constants() {
    let w0 = find_zero::<Mp>(BranchLabel::new(0, -1), PREC).unwrap().w;
    let u = -ComplexExt::abs(&w0).ln().to_f64();
    let v = ComplexExt::arg(&w0.recip()).to_f64();
    assert!((u - 0.0680762).abs() < 1e-6, "U = {u}");
    assert!((v - 0.196576).abs() < 1e-6, "V = {v}");
    let z0 = find_saddle::<Mp>(1, 0, PREC).unwrap().z;
    let pi = Mp::pi_prec(PREC);
    let e = (-z0.clone().mul_i().scale(pi.clone())).exp();
    let lead = -(z0 * e).mul_i().scale(mp(2.0));
    assert!((ComplexExt::abs(&lead).to_f64() - 5.39532).abs() < 1e-4);
    assert!((ComplexExt::arg(&lead).to_f64() - 1.21367).abs() < 1e-4);
    assert!((2.0 * std::f64::consts::PI / v - 31.9631).abs() < 1e-3);
}

#[test]
fn principal_saddle() {
    let s = find_saddle::<Mp>(1, 0, PREC).unwrap();
    let z = s.z.to_c64();
    assert!((z.re - 1.181).abs() < 1e-3 && (z.im - 0.255).abs() < 1e-3, "z0 = {z}");
    let w0 = find_zero::<Mp>(BranchLabel::new(0, -1), PREC).unwrap().w;
    assert!(dist(&p_d(&s.z, 0).unwrap(), &w0.ln()) < 1e-70);
    assert!(ComplexExt::abs(&p_d_prime(&s.z, 0).unwrap()).to_f64() < 1e-12);
    let u = -p_d(&s.z, 0).unwrap().re.to_f64();
    assert!((u - 0.068076).abs() < 1e-6);
}

#[test]
fn secondary_saddles_follow_the_zero_formula() {
    for (m, d) in [(2, 0), (3, 1), (3, -1), (4, 2), (-1, 0), (-2, 1)] {
        let s = find_saddle::<Mp>(m, d, PREC).unwrap();
        let w = find_zero::<Mp>(BranchLabel::new(d, -m), PREC).unwrap().w;
        let two_pi_i = cmp(0.0, 2.0) * Mp::pi_prec(PREC);
        let want = cmp(m as f64, 0.0) + (cmp(1.0, 0.0) - w.clone()).ln() / two_pi_i;
        assert!(dist(&s.z, &want) < 1e-70, "({m},{d})");
        assert!((s.z.re.to_f64() - m as f64).abs() < 0.5);
        let bound = 10f64.powf(-0.3 * PREC as f64);
        assert!(s.derivative_residual.to_f64() < bound && s.value_residual.to_f64() < bound);
        // after rounding z the residuals are at the level of one ulp
        assert!(ComplexExt::abs(&p_d_prime(&s.z, d).unwrap()).to_f64() < 1e3 * bound);
        assert!(dist(&p_d(&s.z, d).unwrap(), &w.ln()) < 1e3 * bound);
    }
    for (m, d) in [(0, 0), (1, 1), (2, -1), (3, 2)] {
        assert!(matches!(find_saddle::<f64>(m, d, 53), Err(Error::Domain(_))));
    }
}

#[test]
fn p_derivatives_match_central_differences() {
    let h = cmp(1e-25, 0.0);
    for (re, im, d) in [(1.2, 0.3, 0), (0.7, -0.4, 1), (2.3, 0.9, -1), (-0.6, 0.2, 0)] {
        let z = cmp(re, im);
        let [p, p1, p2] = p_d_with_derivatives(&z, d).unwrap();
        let fp = p_d(&(z.clone() + h.clone()), d).unwrap();
        let fm = p_d(&(z.clone() - h.clone()), d).unwrap();
        let two = mp(2.0);
        let d1 = (fp.clone() - fm.clone()) / Complex::from_re(two.clone() * h.re.clone());
        let d2 = (fp + fm - p.scale(two.clone())) / Complex::from_re(h.re.sq());
        assert!(dist(&p1, &d1) < 1e-40, "p' at {re}+{im}i");
        assert!(dist(&p2, &d2) < 1e-20, "p'' at {re}+{im}i");
    }
    assert!(matches!(p_d(&cmp(2.0, -0.5), 0), Err(Error::Domain(_))));
    assert!(p_d(&cmp(2.0, 0.5), 0).is_ok());
}

/// Deterministic points with m < Re z < m + 1, |Im z| ≤ 1, avoiding the real axis.
fn strip_grid(m: i64, count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|i| {
            let x = m as f64 + (i % 10) as f64 / 10.0 + 0.05;
            let y = -1.0 + (i / 10) as f64 * (2.0 / 9.0);
            (x, if y.abs() < 1e-9 { 0.11 } else { y })
        })
        .collect()
}

#[test]
fn functional_equation_under_inversion() {
    let pi = Mp::pi_prec(PREC);
    let tol = 2f64.powi(24 - PREC as i32);
    for m in -1..=1 {
        for (x, y) in strip_grid(m, 100) {
            let z = cmp(x, y);
            let e = z.mul_i().scale(pi.clone() * mp(2.0)).exp();
            let lhs = li2(&e.recip());
            let mm = mp(m as f64);
            let poly = z.clone() * z.clone() - z.scale(mm.clone() * mp(2.0) + mp(1.0))
                + Complex::from_re(mm.sq() + mm + mp(1.0) / mp(6.0));
            let rhs = -li2(&e) + poly.scale(pi.sq() * mp(2.0));
            let scale = 1.0 + ComplexExt::abs(&lhs).to_f64();
            assert!(dist(&lhs, &rhs) < tol * scale, "m = {m}, z = {x}+{y}i");
        }
    }
}

#[test]
fn functional_equation_under_reflection() {
    let pi = Mp::pi_prec(PREC);
    let tol = 2f64.powi(24 - PREC as i32);
    for m in -1..=1 {
        for (x, y) in strip_grid(m, 100) {
            // m − 1/2 < Re z < m + 1/2, off the ray (−i∞, m]
            let x = x - 0.5;
            if (x - m as f64).abs() < 1e-12 && y <= 0.0 {
                continue;
            }
            let z = cmp(x, y);
            let e = z.mul_i().scale(pi.clone() * mp(2.0)).exp();
            let one_minus = Complex::from_re(mp(1.0)) - e.clone();
            let lhs = li2(&e);
            let rhs = -li2(&one_minus) + Complex::from_re(pi.sq() / mp(6.0))
                - (z.clone() - Complex::from_re(mp(m as f64))).mul_i().scale(pi.clone() * mp(2.0))
                    * one_minus.ln();
            let scale = 1.0 + ComplexExt::abs(&lhs).to_f64();
            assert!(dist(&lhs, &rhs) < tol * scale, "m = {m}, z = {x}+{y}i");
        }
    }
}

#[test]
fn imaginary_part_on_circles_decreases_with_height() {
    for i in 1..10 {
        let x = i as f64 / 20.0;
        let mut prev = f64::INFINITY;
        for j in 0..40 {
            let y = -1.0 + j as f64 * 0.05;
            let e = (Complex::new(0.0, 2.0 * std::f64::consts::PI) * Complex::new(x, y)).exp();
            let v = li2(&e).im;
            assert!(v < prev, "x = {x}, y = {y}");
            prev = v;
        }
    }
}

#[test]
fn strip_r_real_form() {
    let pi = Mp::pi_prec(PREC);
    for x in [1.01, 1.1, 1.25, 1.333, 1.49] {
        let r = strip_r(&cmp(x, 0.0));
        let two_pi_x = pi.clone() * mp(2.0 * x);
        let re = clausen(&two_pi_x) / two_pi_x;
        let im = pi.clone() / mp(2.0) * mp(3.0 - x);
        assert!(dist(&r, &Complex::new(re, im)) < 1e-70, "x = {x}");
    }
}

#[test]
fn strip_r_and_p_agree() {
    let pi = Mp::pi_prec(PREC);
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..20 {
        let z = cmp(1.0 + 0.5 * next(), 2.0 * next() - 1.0);
        let p = -(strip_r(&z) - Complex::new(mp(0.0), pi.clone()) / z.clone());
        assert!(dist(&p, &p_d(&z, 0).unwrap()) < 1e-70);
    }
}

#[test]
fn q_at_principal_saddle() {
    let s = find_saddle::<Mp>(1, 0, PREC).unwrap();
    let q = strip_q(&s.z);
    let want = ComplexExt::abs(&(s.z.mul_i() / s.zero.w.clone()));
    assert!((q.norm2() - want).abs().to_f64() < 1e-70);
}

#[test]
fn strip_values_respect_their_domain() {
    let alpha = Mp::from_f64_prec(0.05, PREC);
    assert!(matches!(r_q_v_eval(&cmp(0.9, 0.1), 100, 1, &alpha), Err(Error::Domain(_))));
    assert!(matches!(r_q_v_eval(&cmp(1.2, 0.1), 10, 1, &alpha), Err(Error::Domain(_))));
    let vals = r_q_v_eval(&cmp(1.2, 0.1), 200, 1, &alpha).unwrap();
    assert!(vals.r.re.is_finite() && vals.q.re.is_finite() && vals.v.re.is_finite());
}

proptest! {
    #[test]
    fn clausen_is_odd_and_periodic(theta in -20.0f64..20.0) {
        let two_pi = 2.0 * std::f64::consts::PI;
        prop_assert!((clausen(&theta) + clausen(&-theta)).abs() < 1e-13);
        prop_assert!((clausen(&(theta + two_pi)) - clausen(&theta)).abs() < 1e-12);
    }

    #[test]
    fn li2_conjugate_symmetry(re in -4.0f64..4.0, im in 0.01f64..4.0) {
        let z = Complex::new(re, im);
        prop_assert!((li2(&z.conj()) - li2(&z).conj()).norm() < 1e-13 * (1.0 + li2(&z).norm()));
    }
}
