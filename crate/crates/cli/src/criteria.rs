//! The acceptance criteria. Each one recomputes its quantities from scratch and
//! compares with reference values or an independent oracle.

use std::time::Instant;

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use partfrac::asymptotics::{
    a3_quadrature, b_coeffs, c_coeffs, evaluate_expansion, family_leading, path_check,
};
use partfrac::dilog::{find_zero, BranchLabel};
use partfrac::residues::{a1_sum, c01_all, farey, principal_part, residue_sum, residue_sum_expected, Family};
use partfrac::sine_products::{em_check, psi, EmConfig};
use partfrac::{ComplexExt, Error, Mp, Real};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::Status;
use crate::reference::{self, agrees};

/// Inputs shared by the criteria.
#[derive(Clone, Copy, Debug)]
pub struct Context {
    /// Seed for the randomly placed evaluation points.
    pub seed: u64,
}

/// What a check found.
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

/// A finished criterion, with its wall time and the exit status it maps to.
pub struct Verdict {
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub status: Status,
}

pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    /// Wall-time budget in seconds.
    pub budget: f64,
    /// Exit status when the criterion fails on its own terms.
    pub status: Status,
    check: fn(&Context) -> Result<Check, Error>,
}

impl Criterion {
    pub fn run(&self, ctx: &Context) -> Verdict {
        let start = Instant::now();
        let out = (self.check)(ctx);
        let seconds = start.elapsed().as_secs_f64();
        match out {
            Ok(mut c) => {
                if seconds > self.budget {
                    c.passed = false;
                    c.detail += &format!("; took {seconds:.1} s, budget {} s", self.budget);
                }
                Verdict { passed: c.passed, detail: c.detail, seconds, status: self.status }
            }
            Err(e) => Verdict { passed: false, detail: e.to_string(), seconds, status: Status::of_error(&e) },
        }
    }
}

pub const ALL: [Criterion; 11] = [
    Criterion { id: 1, title: "dilogarithm zeros", budget: 1.0, status: Status::Convergence, check: zeros },
    Criterion {
        id: 2,
        title: "growth and phase constants",
        budget: 1.0,
        status: Status::TableMismatch,
        check: constants,
    },
    Criterion {
        id: 3,
        title: "residue sum trichotomy",
        budget: 120.0,
        status: Status::IdentityFailure,
        check: trichotomy,
    },
    Criterion {
        id: 4,
        title: "partial fraction reconstruction",
        budget: 60.0,
        status: Status::IdentityFailure,
        check: reconstruction,
    },
    Criterion { id: 5, title: "A1 table", budget: 300.0, status: Status::TableMismatch, check: a1_table },
    Criterion {
        id: 6,
        title: "C_011 and C_014 tables",
        budget: 1800.0,
        status: Status::TableMismatch,
        check: c01_tables,
    },
    Criterion {
        id: 7,
        title: "C_121 leading term",
        budget: 1.0,
        status: Status::TableMismatch,
        check: c121_leading,
    },
    Criterion {
        id: 8,
        title: "Psi(h/211) data",
        budget: 30.0,
        status: Status::TableMismatch,
        check: psi_figure,
    },
    Criterion {
        id: 9,
        title: "Euler-Maclaurin remainder",
        budget: f64::INFINITY,
        status: Status::TableMismatch,
        check: em_remainder,
    },
    Criterion {
        id: 10,
        title: "error order of the A1 expansion",
        budget: f64::INFINITY,
        status: Status::TableMismatch,
        check: error_order,
    },
    Criterion {
        id: 11,
        title: "saddle-point contour quadrature",
        budget: f64::INFINITY,
        status: Status::Convergence,
        check: quadrature,
    },
];

fn zeros(_: &Context) -> Result<Check, Error> {
    let mut worst = (0f64, 0f64);
    for ((a, b), (re, im)) in reference::ZEROS {
        let z = find_zero::<Mp>(BranchLabel::new(a, b), 256)?;
        let w = z.w.to_c64();
        worst.0 = worst.0.max((w.re - re).abs()).max((w.im - im).abs());
        worst.1 = worst.1.max(z.residual.to_f64());
    }
    Ok(Check {
        passed: worst.0 < 1e-9 && worst.1 < 1e-20,
        detail: format!("max deviation {:.1e}, max residual {:.1e}", worst.0, worst.1),
    })
}

fn constants(_: &Context) -> Result<Check, Error> {
    let w0 = find_zero::<Mp>(BranchLabel::new(0, -1), 256)?.w;
    let u = -ComplexExt::abs(&w0).ln().to_f64();
    let v = ComplexExt::arg(&w0.recip()).to_f64();
    let b0 = b_coeffs::<Mp>(1, 1, 256)?.coeffs[0].to_c64();
    let b_abs = b0.norm();
    let phase = (Complex::new(0.0, -1.0) * b0).arg();
    let passed = (u - reference::U).abs() < 1e-6
        && (v - reference::V).abs() < 1e-6
        && (b_abs - reference::B0_ABS).abs() < 1e-4
        && (phase - reference::B0_PHASE).abs() < 1e-4;
    Ok(Check {
        passed,
        detail: format!("U = {u:.7}, V = {v:.6}, |b0| = {b_abs:.5}, arg(-i b0) = {phase:.5}"),
    })
}

fn trichotomy(_: &Context) -> Result<Check, Error> {
    let prec = 320;
    let mut worst = 0f64;
    let mut cases = 0;
    for n in 1..=25i64 {
        let top = n * (n + 1) / 2;
        for sigma in (-6..=6).chain([top, top + 3]) {
            let got = residue_sum::<Mp>(n, sigma, prec)?;
            let want = residue_sum_expected(n, sigma).to_f64().unwrap_or(f64::INFINITY);
            let diff = Complex::new(got.re - Mp::from_f64_prec(want, prec), got.im);
            worst = worst.max(ComplexExt::abs(&diff).to_f64() / (1.0 + want.abs()));
            cases += 1;
        }
    }
    Ok(Check { passed: worst < 1e-15, detail: format!("{cases} cases, max scaled error {worst:.1e}") })
}

/// `∏_{j≤N} (1 − q^j)^{-1}` by direct multiplication.
fn euler_product(q: &Complex<Mp>, n: i64) -> Complex<Mp> {
    let one = Complex::from_re(Mp::from_i64_prec(1, q.re.prec()));
    let mut acc = one.clone();
    let mut power = one.clone();
    for _ in 1..=n {
        power = power * q.clone();
        acc = acc * (one.clone() - power.clone());
    }
    one / acc
}

fn reconstruction(ctx: &Context) -> Result<Check, Error> {
    let prec = 192;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut worst = 0f64;
    for n in 1..=12 {
        let mut poles = Vec::new();
        for f in farey(n) {
            let a = Mp::pi_prec(prec) * Mp::from_i64_prec(2 * f.h, prec) / Mp::from_i64_prec(f.k, prec);
            poles.push((Complex::new(a.cos(), a.sin()), principal_part::<Mp>(f.h, f.k, n, prec)?));
        }
        for _ in 0..20 {
            // uniform in the disc |q| < 1/2
            let r: f64 = 0.5 * rng.gen::<f64>().sqrt();
            let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let q = Complex::new(Mp::from_f64_prec(r * t.cos(), prec), Mp::from_f64_prec(r * t.sin(), prec));
            let mut sum = Complex::from_re(Mp::from_i64_prec(0, prec));
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
            worst = worst.max(rel);
        }
    }
    Ok(Check { passed: worst < 1e-15, detail: format!("240 points, max relative error {worst:.1e}") })
}

fn a1_table(_: &Context) -> Result<Check, Error> {
    let prec = 192;
    let b = b_coeffs::<Mp>(1, 4, prec)?;
    let mut bad = Vec::new();
    let mut checked = 0;
    for row in reference::A1 {
        let exact = a1_sum::<Mp>(row.n, 1, prec)?.to_f64();
        checked += 1;
        if !agrees(exact, row.exact.unwrap(), 6) {
            bad.push(format!("A1({}) = {exact:.6e}", row.n));
        }
        for (m, want) in row.m.iter().enumerate() {
            let got = evaluate_expansion(&b, row.n, m + 1)?.to_f64();
            checked += 1;
            if !agrees(got, want.unwrap(), 6) {
                bad.push(format!("N = {}, m = {}: {got:.6e}", row.n, m + 1));
            }
        }
    }
    Ok(verdict_list(checked, bad))
}

fn verdict_list(checked: usize, bad: Vec<String>) -> Check {
    if bad.is_empty() {
        Check { passed: true, detail: format!("{checked} values agree to 6 significant digits") }
    } else {
        Check { passed: false, detail: format!("{} of {checked} differ: {}", bad.len(), bad.join("; ")) }
    }
}

fn c01_tables(_: &Context) -> Result<Check, Error> {
    let prec = 192;
    let ns: Vec<i64> = reference::C011.iter().map(|r| r.n).collect();
    let exact = c01_all::<Mp>(&ns, 512)?;
    let mut bad = Vec::new();
    let mut checked = 0;
    for (l, table) in [(1usize, &reference::C011[..]), (4, &reference::C014[..])] {
        let c = c_coeffs::<Mp>(l, 4, prec)?;
        for row in table {
            let i = ns.iter().position(|&n| n == row.n).expect("C_014 rows are a subset");
            let got = exact[i][l - 1].to_f64();
            checked += 1;
            if !agrees(got, row.exact.unwrap(), 6) {
                bad.push(format!("C_01{l}({}) = {got:.6e}", row.n));
            }
            for (m, want) in row.m.iter().enumerate() {
                let got = evaluate_expansion(&c, row.n, m + 1)?.to_f64();
                checked += 1;
                if !agrees(got, want.unwrap(), 6) {
                    bad.push(format!("l = {l}, N = {}, m = {}: {got:.6e}", row.n, m + 1));
                }
            }
        }
    }
    let b = b_coeffs::<Mp>(1, 4, prec)?;
    let c = c_coeffs::<Mp>(1, 4, prec)?;
    let mut worst = 0f64;
    for t in 0..=3 {
        let scale = ComplexExt::abs(&b.coeffs[t]).to_f64().max(1.0);
        worst = worst.max(ComplexExt::abs(&(c.coeffs[t].clone() + b.coeffs[t].clone())).to_f64() / scale);
    }
    if worst >= 1e-20 {
        bad.push(format!("c_1t + b_t(1) reaches {worst:.1e}"));
    }
    let mut out = verdict_list(checked, bad);
    out.detail += &format!("; max |c_1t + b_t(1)| = {worst:.1e}");
    Ok(out)
}

/// `C₁₂₁(N)` is approximated by minus the family-D sum, so its leading term is
/// minus the family-D expansion.
fn c121_leading(_: &Context) -> Result<Check, Error> {
    let mut parts = Vec::new();
    let mut passed = true;
    for row in reference::C121 {
        let e = family_leading::<Mp>(Family::D, row.n, 192)?;
        let got = -evaluate_expansion(&e, row.n, 1)?.to_f64();
        let want = row.m[0].unwrap();
        let ok = agrees(got, want, 6);
        passed &= ok;
        parts.push(format!("N = {}: {got:.6e} vs {want:.5e} {}", row.n, if ok { "ok" } else { "differs" }));
    }
    Ok(Check { passed, detail: parts.join("; ") })
}

fn psi_figure(_: &Context) -> Result<Check, Error> {
    let mut worst = 0f64;
    let mut above = Vec::new();
    for h in 1..=210i64 {
        let v = psi::<Mp>(h, 211, 128)?.to_f64();
        worst = worst.max((v - reference::PSI_211[h as usize - 1]).abs());
        if v > reference::U {
            above.push(h);
        }
    }
    Ok(Check {
        passed: worst < 5e-6 && above == reference::PSI_211_ABOVE_U,
        detail: format!("max deviation {worst:.1e}; h with Psi > U: {above:?}"),
    })
}

fn em_remainder(_: &Context) -> Result<Check, Error> {
    let cfg = EmConfig::new(Rational64::new(6, 1000), Rational64::new(31, 1000), 500);
    let mut passed = true;
    let mut parts = Vec::new();
    for (h, l, scaled, scaled_tol, plain, plain_tol) in reference::EM_EXTREMES {
        let r = em_check::<Mp>(h, &cfg, 128)?;
        passed &=
            r.l == l && (r.max_scaled - scaled).abs() <= scaled_tol && (r.max_t - plain).abs() <= plain_tol;
        parts.push(format!(
            "h = {h}, L = {}: max |T/prod| = {:.4}, max |T| = {:.4} over {} pairs",
            r.l, r.max_scaled, r.max_t, r.pairs
        ));
    }
    Ok(Check { passed, detail: parts.join("; ") })
}

/// Least-squares slope of `y` against `x`.
fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let cov: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    cov / var
}

/// The truncation error behaves like `Re[w₀^{−N} g(N)]` with `g` varying slowly,
/// so it oscillates through zero. Values at `N` and `N + 1` determine
/// `|w₀^{−N} g(N)|` up to a relative `O(1/N)`; the decay exponent is the
/// least-squares slope of `log |g|` against `log N`.
fn error_order(_: &Context) -> Result<Check, Error> {
    let mut passed = true;
    let mut parts = Vec::new();
    for sigma in [1i64, 2] {
        let b = b_coeffs::<Mp>(sigma, 4, 192)?;
        let rho = b.base.w.to_c64().inv();
        let mut pts: [Vec<(f64, f64)>; 3] = Default::default();
        for n in (200..=1000).step_by(100) {
            let here = a1_sum::<Mp>(n, sigma, 256)?;
            let next = a1_sum::<Mp>(n + 1, sigma, 256)?;
            for m in 1..=3 {
                let x0 = (here.clone() - evaluate_expansion(&b, n, m)?).to_f64();
                let x1 = (next.clone() - evaluate_expansion(&b, n + 1, m)?).to_f64();
                let im = (rho.re * x0 - x1) / rho.im;
                let log_g = x0.hypot(im).ln() - n as f64 * rho.norm().ln();
                pts[m - 1].push(((n as f64).ln(), log_g));
            }
        }
        for (i, p) in pts.iter().enumerate() {
            let m = i + 1;
            let exponent = -slope(p);
            passed &= exponent >= m as f64 + 1.7;
            parts.push(format!("sigma = {sigma}, m = {m}: {exponent:.2}"));
        }
    }
    Ok(Check { passed, detail: format!("fitted exponents {}", parts.join(", ")) })
}

fn quadrature(_: &Context) -> Result<Check, Error> {
    let q = a3_quadrature::<Mp>(200, 1, 128)?.to_f64();
    let a = a1_sum::<Mp>(200, 1, 128)?.to_f64();
    let rel = ((q - a) / a).abs();
    let path = path_check::<Mp>(400, 128)?;
    let excess = path.min_excess.to_f64();
    Ok(Check {
        passed: rel < 1e-3 && excess > 0.0,
        detail: format!(
            "quadrature {q:.6e} vs A1 {a:.6e} (relative {rel:.1e}); min Re(p - p(z0)) over {} samples = {excess:.2e}",
            path.samples
        ),
    })
}
