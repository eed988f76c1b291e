use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use partfrac::residues::*;
use partfrac::{ComplexExt, Error, Mp, Real};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<Mp>;

fn close(a: &C, b: &C, tol: f64) -> bool {
    let d = ComplexExt::abs(&(a.clone() - b.clone())).to_f64();
    d <= tol * (1.0 + ComplexExt::abs(b).to_f64())
}

fn totient(n: i64) -> i64 {
    (1..=n).filter(|i| i.gcd(&n) == 1).count() as i64
}

/// Partitions of `n` into parts at most `max`, by plain recursion.
fn count_partitions(n: i64, max: i64) -> u64 {
    if n == 0 {
        return 1;
    }
    (1..=max.min(n)).map(|p| count_partitions(n - p, p)).sum()
}

#[test]
fn farey_small_orders() {
    assert_eq!(farey(1), vec![FareyFraction { h: 0, k: 1 }]);
    let f3: Vec<(i64, i64)> = farey(3).iter().map(|f| (f.h, f.k)).collect();
    assert_eq!(f3, vec![(0, 1), (1, 3), (1, 2), (2, 3)]);
    assert!(farey(0).is_empty());
}

#[test]
fn farey_matches_brute_force() {
    for n in 1..=40 {
        let mut want: Vec<(i64, i64)> =
            (1..=n).flat_map(|k| (0..k).filter(move |h| h.gcd(&k) == 1).map(move |h| (h, k))).collect();
        want.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
        let got: Vec<(i64, i64)> = farey(n).iter().map(|f| (f.h, f.k)).collect();
        assert_eq!(got, want, "N = {n}");
    }
    // Every fraction in [0, 1) is counted once, so the count is Σ φ(k).
    let phi_sum: i64 = (1..=100).map(totient).sum();
    assert_eq!(farey(100).len() as i64, phi_sum);
    assert_eq!(phi_sum, 3044);
}

#[test]
fn restricted_partitions() {
    for n in 0..6 {
        assert_eq!(p_restricted(n, 0), BigInt::from(1));
    }
    assert_eq!(p_restricted(2, 4), BigInt::from(3));
    assert_eq!(p_restricted(5, 5), BigInt::from(7));
    assert_eq!(p_restricted(6, 4), BigInt::from(5));
    assert_eq!(p_restricted(3, -1), BigInt::zero());
    for parts in 0..=10 {
        for n in 0..=25 {
            assert_eq!(p_restricted(parts, n), BigInt::from(count_partitions(n, parts)), "p_{parts}({n})");
        }
    }
    let full = partition_table(100, 100);
    assert_eq!(full[100], "190569292".parse::<BigInt>().unwrap());
    for n in 1..40 {
        for parts in 1..n {
            assert!(p_restricted(parts, n) <= p_restricted(parts + 1, n));
        }
    }
}

#[test]
fn residue_sum_examples() {
    let r = residue_sum::<Mp>(6, 1, 256).unwrap();
    assert!(ComplexExt::abs(&r).to_f64() < 1e-20);
    let r = residue_sum::<Mp>(6, -4, 256).unwrap();
    assert!((r.re.to_f64() + 5.0).abs() < 1e-20 && r.im.to_f64().abs() < 1e-20);
    let r = residue_sum::<Mp>(5, 15, 256).unwrap();
    assert!((r.re.to_f64() + 1.0).abs() < 1e-20);
}

#[test]
fn residue_sum_trichotomy_small() {
    for n in 1..=12 {
        let top = n * (n + 1) / 2;
        let sigmas: Vec<i64> = (-6..=6).chain([top, top + 3]).collect();
        for sigma in sigmas {
            let r = residue_sum::<Mp>(n, sigma, 192).unwrap();
            let want = residue_sum_expected(n, sigma).to_f64().unwrap();
            let err = ComplexExt::abs(&(r - C::from_re(Mp::from_f64_prec(want, 192)))).to_f64();
            assert!(err < 1e-15 * (1.0 + want.abs()), "N={n} sigma={sigma}: err {err}");
        }
    }
}

#[test]
fn simple_pole_closed_form_matches_expansion() {
    for n in 2..=20 {
        for k in n / 2 + 1..=n {
            for h in (1..k).filter(|h| h.gcd(&k) == 1) {
                for sigma in [-3, 0, 1, 4] {
                    let a = q_simple::<Mp>(h, k, sigma, n, 160).unwrap();
                    let b = q_general::<Mp>(h, k, sigma, n, 160).unwrap();
                    assert!(close(&a, &b, 1e-40), "{h}/{k} N={n} sigma={sigma}");
                }
            }
        }
    }
    let a = q_simple::<Mp>(1, 7, 1, 9, 256).unwrap();
    let b = q_general::<Mp>(1, 7, 1, 9, 256).unwrap();
    assert!(close(&a, &b, 1e-70));
}

#[test]
fn simple_pole_modulus() {
    for n in [5, 17, 40] {
        let q = q_simple::<Mp>(1, n, 3, n, 128).unwrap();
        assert!((ComplexExt::abs(&q).to_f64() * (n * n) as f64 - 1.0).abs() < 1e-30);
    }
    // |Q| does not depend on real σ.
    let base = ComplexExt::abs(&q_simple::<Mp>(3, 11, 0, 15, 128).unwrap());
    for s in [0.3, 1.7, -2.25, 40.5] {
        let sigma = Mp::from_f64_prec(s, 128);
        let q = q_simple_real(3, 11, &sigma, 15).unwrap();
        assert!(((ComplexExt::abs(&q) - base.clone()) / base.clone()).abs().to_f64() < 1e-30);
    }
    // the real-σ form agrees with the integer form at integers
    let a = q_simple::<Mp>(2, 9, 5, 14, 128).unwrap();
    let b = q_simple_real(2, 9, &Mp::from_i64_prec(5, 128), 14).unwrap();
    assert!(close(&a, &b, 1e-30));
    assert!(matches!(q_simple::<Mp>(1, 4, 1, 9, 64), Err(Error::Domain(_))));
    assert!(matches!(q_simple::<Mp>(2, 6, 1, 9, 64), Err(Error::Domain(_))));
    assert!(matches!(q_general::<Mp>(1, 10, 1, 9, 64), Err(Error::Domain(_))));
}

#[test]
fn conjugation_and_reflection() {
    for n in 1..=30 {
        let top = n * (n + 1) / 2;
        for f in farey(n) {
            let (h, k) = (f.h, f.k);
            for sigma in [-2, 1, 5] {
                let q = q_general::<Mp>(h, k, sigma, n, 128).unwrap();
                if h == 0 {
                    assert!(q.im.abs().to_f64() < 1e-30 * (1.0 + q.re.abs().to_f64()), "N={n}");
                    continue;
                }
                if n <= 16 {
                    let other = q_general::<Mp>(k - h, k, sigma, n, 128).unwrap();
                    assert!(close(&other, &q.conj(), 1e-30), "{h}/{k} N={n} sigma={sigma}");
                }
                if n <= 12 {
                    // z ↦ −z swaps σ with N(N+1)/2 − σ
                    let refl = q_general::<Mp>(h, k, top - sigma, n, 128).unwrap();
                    let want = if n % 2 == 0 { -q.conj() } else { q.conj() };
                    assert!(close(&refl, &want, 1e-30), "{h}/{k} N={n} sigma={sigma}");
                }
            }
        }
    }
}

#[test]
fn conversions_between_q_and_c() {
    // ℓ = 1 is the residue itself
    let q = q_general::<Mp>(2, 5, 1, 12, 128).unwrap();
    let c = c_from_q::<Mp>(2, 5, 1, 12, 128).unwrap();
    assert!(close(&q, &c, 1e-35));
    // 1/(1 − q) = −1/(q − 1)
    let c = c_from_q::<Mp>(0, 1, 1, 1, 128).unwrap();
    assert!(close(&c, &C::from_re(Mp::from_i64_prec(-1, 128)), 1e-35));
    let pp = principal_part::<Mp>(0, 1, 1, 128).unwrap();
    assert_eq!(pp.len(), 1);
    assert!(close(&pp[0], &c, 1e-35));
    // the two expansions agree on every coefficient
    for n in 1..=10 {
        for f in farey(n) {
            let pp = principal_part::<Mp>(f.h, f.k, n, 160).unwrap();
            assert_eq!(pp.len() as i64, f.pole_order(n));
            for (l, want) in pp.iter().enumerate() {
                let got = c_from_q::<Mp>(f.h, f.k, l as i64 + 1, n, 160).unwrap();
                assert!(close(&got, want, 1e-35), "{}/{} N={n} l={}", f.h, f.k, l + 1);
            }
            let q3 = q_from_c::<Mp>(f.h, f.k, 3, n, 160).unwrap();
            let direct = q_general::<Mp>(f.h, f.k, 3, n, 160).unwrap();
            assert!(close(&q3, &direct, 1e-35));
        }
    }
    assert!(matches!(c_from_q::<Mp>(1, 3, 0, 5, 64), Err(Error::Domain(_))));
    assert!(matches!(q_from_c::<Mp>(1, 3, 0, 5, 64), Err(Error::Domain(_))));
}

/// `∏_{j≤N} (1 − q^j)^{-1}` directly.
fn euler_product(q: &C, n: i64) -> C {
    let one = C::from_re(Mp::from_i64_prec(1, q.re.prec()));
    let mut acc = one.clone();
    let mut power = one.clone();
    for _ in 1..=n {
        power = power * q.clone();
        acc = acc * (one.clone() - power.clone());
    }
    one / acc
}

#[test]
fn partial_fractions_reconstruct_the_product() {
    let prec = 192;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=12 {
        let poles: Vec<(C, Vec<C>)> = farey(n)
            .into_iter()
            .map(|f| {
                let a = Mp::pi_prec(prec) * Mp::from_i64_prec(2 * f.h, prec) / Mp::from_i64_prec(f.k, prec);
                let zeta = Complex::new(a.cos(), a.sin());
                (zeta, principal_part::<Mp>(f.h, f.k, n, prec).unwrap())
            })
            .collect();
        for _ in 0..20 {
            let r: f64 = 0.5 * rng.gen::<f64>().sqrt();
            let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let q = Complex::new(Mp::from_f64_prec(r * t.cos(), prec), Mp::from_f64_prec(r * t.sin(), prec));
            let mut sum = C::from_re(Mp::from_i64_prec(0, prec));
            for (zeta, cs) in &poles {
                let inv = (q.clone() - zeta.clone()).recip();
                let mut pw = inv.clone();
                for c in cs {
                    sum = sum + c.clone() * pw.clone();
                    pw = pw * inv.clone();
                }
            }
            let want = euler_product(&q, n);
            let rel = ComplexExt::abs(&(sum - want.clone())).to_f64() / ComplexExt::abs(&want).to_f64();
            assert!(rel < 1e-15, "N={n}: rel {rel}");
        }
    }
}

#[test]
fn sylvester_waves_sum_to_partition_counts() {
    for n_parts in [1, 4, 9, 15] {
        for n in 0..=30 {
            let waves = sylvester_waves::<Mp>(n_parts, n, 128).unwrap();
            assert_eq!(waves.len() as i64, n_parts);
            let mut total = C::from_re(Mp::from_i64_prec(0, 128));
            for w in &waves {
                assert!(w.im.abs().to_f64() < 1e-25 * (1.0 + w.re.abs().to_f64()));
                total = total + w.clone();
            }
            let want = p_restricted(n_parts, n).to_f64().unwrap();
            assert!((total.re.to_f64() - want).abs() < 1e-20 * (1.0 + want), "N={n_parts} n={n}");
        }
    }
    // N = 3: W_1 = (6n² + 36n + 47)/72, W_2 = (−1)^n/8, W_3 = 2/9 for 3 | n
    let waves = sylvester_waves::<Mp>(3, 12, 128).unwrap();
    let want = [(6.0 * 144.0 + 36.0 * 12.0 + 47.0) / 72.0, 0.125, 2.0 / 9.0];
    for (w, v) in waves.iter().zip(want) {
        assert!((w.re.to_f64() - v).abs() < 1e-25);
    }
}

#[test]
fn a1_sum_matches_family_a() {
    let v = a1_sum::<Mp>(200, 1, 256).unwrap().to_f64();
    assert!((v + 32.4692).abs() < 5e-4, "{v}");
    for n in [40, 121, 300] {
        for sigma in [1, 2, -3] {
            let a = a1_sum::<Mp>(n, sigma, 256).unwrap();
            let f = family_sum::<Mp>(Family::A, n, sigma, 256).unwrap();
            let rel = ((a.clone() - f) / a.clone()).abs().to_f64();
            assert!(rel < 1e-40, "N={n} sigma={sigma}");
        }
    }
    assert!(matches!(a1_sum::<Mp>(1, 1, 64), Err(Error::Domain(_))));
}

#[test]
fn a1_sum_survives_cancellation() {
    // the largest terms exceed the sum by about 0.13·N bits
    let lo = a1_sum::<Mp>(1000, 1, 128).unwrap();
    let hi = a1_sum::<Mp>(1000, 1, 384).unwrap();
    let rel = ((lo.clone() - hi) / lo).abs().to_f64();
    assert!(rel < 1e-35, "{rel}");
    assert!(
        (a1_sum::<f64>(120, 1, 53).unwrap() / a1_sum::<Mp>(120, 1, 128).unwrap().to_f64() - 1.0).abs() < 1e-6
    );
    assert!(matches!(a1_sum::<f64>(1000, 1, 53), Err(Error::Precision(_))));
}

#[test]
fn family_members() {
    let a: Vec<(i64, i64)> = Family::A.members(7).iter().map(|f| (f.h, f.k)).collect();
    assert_eq!(a, vec![(1, 4), (3, 4), (1, 5), (4, 5), (1, 6), (5, 6), (1, 7), (6, 7)]);
    let c: Vec<(i64, i64)> = Family::C.members(11).iter().map(|f| (f.h, f.k)).collect();
    assert_eq!(c, vec![(2, 7), (5, 7), (2, 9), (7, 9), (2, 11), (9, 11)]);
    let d: Vec<(i64, i64)> = Family::D.members(9).iter().map(|f| (f.h, f.k)).collect();
    assert_eq!(d, vec![(2, 5), (3, 5), (3, 7), (4, 7), (4, 9), (5, 9)]);
    let e: Vec<(i64, i64)> = Family::E.members(12).iter().map(|f| (f.h, f.k)).collect();
    assert_eq!(e, vec![(1, 5), (4, 5), (1, 6), (5, 6)]);
    // the family sums are real: members pair with their conjugates
    for fam in [Family::C, Family::D, Family::E] {
        let n = 37;
        let mut im = Mp::from_i64_prec(0, 128);
        for f in fam.members(n) {
            im = im + q_any::<Mp>(f.h, f.k, 1, n, 128).unwrap().im;
        }
        assert!(im.abs().to_f64() < 1e-30);
        let _ = family_sum::<Mp>(fam, n, 1, 128).unwrap();
    }
}

#[test]
fn c01_routes_agree() {
    for n in [1, 2, 3, 7, 30, 90, 200] {
        let prod = c01_all::<Mp>(&[n], 256).unwrap().pop().unwrap();
        let (logs, lost) = c01l_log_series::<Mp>(n, n.min(4), 256).unwrap();
        assert!(lost < 128);
        for (l, want) in logs.iter().enumerate() {
            let rel = ((prod[l].clone() - want.clone()) / want.clone()).abs().to_f64();
            assert!(rel < 1e-30, "N={n} l={}: rel {rel}", l + 1);
        }
    }
    assert_eq!(c01l_exact::<Mp>(1, 1, 64).unwrap().to_f64(), -1.0);
    // 1/((1 − q)(1 − q²)) = 1/(2(1−q)²) + 1/(4(1−q)) + 1/(4(1+q)) in powers of (q − 1)
    assert!((c01l_exact::<Mp>(2, 1, 64).unwrap().to_f64() + 0.25).abs() < 1e-15);
    assert!((c01l_exact::<Mp>(2, 2, 64).unwrap().to_f64() - 0.5).abs() < 1e-15);
    assert!(matches!(c01l_exact::<Mp>(5, 6, 64), Err(Error::Domain(_))));
    assert!(matches!(c01l_exact::<Mp>(5, 0, 64), Err(Error::Domain(_))));
}

#[test]
fn c011_tracks_minus_a1_at_400() {
    let (c, _) = c01l_log_series::<Mp>(400, 4, 512).unwrap();
    assert!((c[0].to_f64() / 2.16712e7 + 1.0).abs() < 5e-6);
    assert!((c[3].to_f64() / 58.6545 + 1.0).abs() < 5e-6);
    let a = a1_sum::<Mp>(400, 1, 256).unwrap();
    let rel = ((c[0].clone() + a.clone()) / a).abs().to_f64();
    assert!(rel < 1e-3, "{rel}");
}

#[test]
fn c01_log_series_is_stable_in_precision() {
    for n in [400, 1000] {
        let (lo, _) = c01l_log_series::<Mp>(n, 4, 512).unwrap();
        let (hi, _) = c01l_log_series::<Mp>(n, 4, 768).unwrap();
        for (a, b) in lo.iter().zip(&hi) {
            let rel = ((a.clone() - b.clone()) / b.clone()).abs().to_f64();
            assert!(rel < 1e-60, "N={n}: rel {rel}");
        }
    }
}

#[test]
fn residue_records_list_every_pole() {
    let recs = residue_records::<Mp>(6, 2, 128, 12).unwrap();
    assert_eq!(recs.len(), farey(6).len());
    assert_eq!((recs[0].h, recs[0].k, recs[0].order), (0, 1, 6));
    assert!(recs.iter().all(|r| r.order == 6 / r.k));
}

fn random_c(rng: &mut ChaCha8Rng) -> C {
    Complex::new(
        Mp::from_f64_prec(rng.gen_range(-2.0..2.0), 128),
        Mp::from_f64_prec(rng.gen_range(-2.0..2.0), 128),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_c_round_trip(seed in any::<u64>(), k in 1i64..12, hh in 0i64..12, len in 1usize..7) {
        let h = hh % k;
        prop_assume!(h.gcd(&k) == 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qs: Vec<C> = (0..len).map(|_| random_c(&mut rng)).collect();
        let cs = c_from_q_values(h, k, &qs);
        let back = q_from_c_values(h, k, &cs, len);
        for (a, b) in back.iter().zip(&qs) {
            prop_assert!(close(a, b, 1e-30));
        }
    }

    #[test]
    fn farey_neighbours_are_unimodular(n in 2i64..200) {
        let f = farey(n);
        for w in f.windows(2) {
            prop_assert_eq!(w[1].h * w[0].k - w[0].h * w[1].k, 1);
        }
        let last = f.last().unwrap();
        prop_assert_eq!((last.h, last.k), (n - 1, n));
    }
}
