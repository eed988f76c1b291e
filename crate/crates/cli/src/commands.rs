//! The subcommands, as functions from a [`RunConfig`] to a [`Report`] and a status.

use num_complex::Complex;
use num_traits::ToPrimitive;
use partfrac::asymptotics::{b_coeffs, c_coeffs, evaluate_expansion, family_leading, Expansion};
use partfrac::dilog::{find_zero, BranchLabel};
use partfrac::residues::{
    a1_sum, c01_all, family_sum, residue_sum, residue_sum_expected, Family, C01_PRECISION,
};
use partfrac::sine_products::{minimal_pair, psi};
use partfrac::{ComplexExt, Error, Mp, Real};
use rayon::prelude::*;

use crate::criteria::{self, Context};
use crate::reference::{self, agrees, sig, Row};
use crate::report::{Cell, Format, Report};

/// Process exit status, ordered so the worst outcome wins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    /// Bad arguments or an input outside a routine's domain.
    Invalid,
    TableMismatch,
    IdentityFailure,
    Convergence,
    Precision,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Invalid => 1,
            Status::TableMismatch => 2,
            Status::IdentityFailure => 3,
            Status::Convergence => 4,
            Status::Precision => 5,
        }
    }

    pub fn of_error(e: &Error) -> Status {
        match e {
            Error::Convergence(_) => Status::Convergence,
            Error::Precision(_) => Status::Precision,
            Error::Domain(_) | Error::Pole(_) => Status::Invalid,
        }
    }
}

/// Settings shared by every subcommand; `None` selects the command's default.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub precision: Option<u32>,
    pub format: Format,
    pub seed: u64,
    pub rows: Option<Vec<i64>>,
    pub sigma: Option<Vec<i64>>,
    pub ell: Option<usize>,
    pub m: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: None,
            format: Format::Csv,
            seed: 11,
            rows: None,
            sigma: None,
            ell: None,
            m: None,
        }
    }
}

impl RunConfig {
    fn prec(&self, default: u32) -> u32 {
        self.precision.unwrap_or(default)
    }
}

pub struct Outcome {
    pub report: Report,
    pub status: Status,
}

pub type CmdResult = Result<Outcome, Error>;

/// Decimal digits carried by `prec` bits.
fn digits(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

fn real_cell(x: &Mp, shown: usize) -> Cell {
    Cell::number(sig(x.to_f64(), shown), x.to_sci(digits(x.prec())))
}

/// Six significant digits written without an exponent, as in the reference data.
fn plain6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let decimals = (5 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Zeros `w(A, B)` for all admissible labels with `|B| ≤ max_b`.
pub fn zeros(max_b: i64, cfg: &RunConfig) -> CmdResult {
    let prec = cfg.prec(256);
    let mut report = Report::new(
        format!("dilogarithm zeros w(A,B) with |B| <= {max_b}, certified by Newton's method at {prec} bits"),
        "w is dimensionless; residual = |Li2(w) + 4 pi^2 A + 2 pi i B log w|",
        &["A", "B", "re_w", "im_w", "residual", "certified"],
    );
    let labels = BranchLabel::with_zeros(max_b);
    let found: Vec<_> = labels.par_iter().map(|&l| find_zero::<Mp>(l, prec)).collect();
    let tol = Mp::from_i64_prec(1, prec).tol();
    let mut status = Status::Ok;
    for (label, z) in labels.iter().zip(found) {
        let z = z?;
        let ok = z.residual <= tol;
        if !ok {
            status = Status::Convergence;
        }
        report.push(vec![
            Cell::int(label.a),
            Cell::int(label.b),
            Cell::number(format!("{:.10}", z.w.re.to_f64()), z.w.re.to_sci(digits(prec))),
            Cell::number(format!("{:.10}", z.w.im.to_f64()), z.w.im.to_sci(digits(prec))),
            Cell::number(sig(z.residual.to_f64(), 3), z.residual.to_sci(6)),
            Cell::flag(ok),
        ]);
    }
    Ok(Outcome { report, status })
}

/// Named tables of expansions against exact values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TableName {
    /// `A₁(N, σ)` against the expansion in `b_t(σ)`.
    A1,
    /// `C₀₁₁(N)` against the expansion in `c_{1,t}`.
    C011,
    /// `C₀₁₄(N)` against the expansion in `c_{4,t}`.
    C014,
    /// `C₀₁ℓ(N)` for the `ℓ` given by `--ell`.
    C01,
    /// Leading term for `C₁₂₁(N)` against the family-D residue sum.
    C121,
}

struct TableSpec {
    title: String,
    exact_label: String,
    reference: Option<&'static [Row]>,
    default_rows: Vec<i64>,
}

/// One table. Rows that also appear in the reference tables are compared to six
/// significant digits; any disagreement sets [`Status::TableMismatch`].
pub fn table(name: TableName, cfg: &RunConfig) -> CmdResult {
    let prec = cfg.prec(192);
    let m_max = cfg.m.unwrap_or(if name == TableName::C121 { 1 } else { 4 });
    if m_max == 0 {
        return Err(Error::Domain("--m must be at least 1".into()));
    }
    let sigma = match cfg.sigma.as_deref() {
        None => 1,
        Some([s]) => *s,
        Some(_) => return Err(Error::Domain("tables take a single --sigma".into())),
    };
    let ell = match name {
        TableName::C011 => 1,
        TableName::C014 => 4,
        TableName::C01 => cfg.ell.ok_or_else(|| Error::Domain("table c01 needs --ell".into()))?,
        _ => 0,
    };
    let layout = match name {
        TableName::A1 => TableSpec {
            title: format!("A1(N, sigma = {sigma}) and its m-term expansion (reference table a1)"),
            exact_label: "A1".into(),
            reference: (sigma == 1).then_some(&reference::A1[..]),
            default_rows: vec![200, 400, 600, 800, 1000],
        },
        TableName::C011 | TableName::C014 | TableName::C01 => TableSpec {
            title: format!("C_01{ell}(N) and its m-term expansion (reference table c01{ell})"),
            exact_label: format!("C_01{ell}"),
            reference: match ell {
                1 => Some(&reference::C011[..]),
                4 => Some(&reference::C014[..]),
                _ => None,
            },
            default_rows: if ell == 4 { vec![400, 600, 800] } else { vec![400, 600, 800, 1000] },
        },
        TableName::C121 => TableSpec {
            title: "leading term for C_121(N) = -Re[w0^(-N/2) d0(N mod 2)]/N^2 against minus the family-D residue sum \
                    (reference table c121)"
                .into(),
            exact_label: "minus_family_D_sum".into(),
            reference: Some(&reference::C121[..]),
            default_rows: vec![1000, 1001],
        },
    };
    if name == TableName::C121 && m_max > 1 {
        return Err(Error::Domain("only the leading term is available for C_121".into()));
    }
    if name != TableName::A1 && cfg.sigma.is_some() {
        return Err(Error::Domain("--sigma applies to table a1 only".into()));
    }
    let rows = cfg.rows.clone().unwrap_or(layout.default_rows);

    let mut columns: Vec<String> = vec!["N".into()];
    columns.extend((1..=m_max).map(|m| format!("m={m}")));
    columns.push(layout.exact_label.clone());
    columns.push("reference".into());
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut report = Report::new(layout.title, "dimensionless coefficients, 6 significant digits", &cols);

    // (expansion values, exact value) per row
    let computed: Vec<(Vec<Mp>, Mp)> = match name {
        TableName::A1 => {
            let e = b_coeffs::<Mp>(sigma, m_max, prec)?;
            rows.par_iter()
                .map(|&n| Ok((expansion_values(&e, n, m_max)?, a1_sum::<Mp>(n, sigma, prec)?)))
                .collect::<Result<_, Error>>()?
        }
        TableName::C011 | TableName::C014 | TableName::C01 => {
            let e = c_coeffs::<Mp>(ell, m_max, prec)?;
            let exact = c01_all::<Mp>(&rows, cfg.prec(C01_PRECISION))?;
            rows.iter()
                .zip(exact)
                .map(|(&n, all)| {
                    let c = all
                        .get(ell - 1)
                        .cloned()
                        .ok_or_else(|| Error::Domain(format!("need ell <= N, got ell = {ell}, N = {n}")))?;
                    Ok((expansion_values(&e, n, m_max)?, c))
                })
                .collect::<Result<_, Error>>()?
        }
        TableName::C121 => rows
            .par_iter()
            .map(|&n| {
                let e = family_leading::<Mp>(Family::D, n, prec)?;
                let lead = -evaluate_expansion(&e, n, 1)?;
                Ok((vec![lead], -family_sum::<Mp>(Family::D, n, 1, prec)?))
            })
            .collect::<Result<_, Error>>()?,
    };

    let mut status = Status::Ok;
    for (&n, (values, exact)) in rows.iter().zip(&computed) {
        let mut row = vec![Cell::int(n)];
        row.extend(values.iter().map(|v| real_cell(v, 6)));
        row.push(real_cell(exact, 6));
        let known = layout.reference.and_then(|r| r.iter().find(|row| row.n == n));
        let verdict = match known {
            None => Cell::text("-"),
            Some(p) => {
                let mut ok =
                    values.iter().zip(p.m).all(|(v, want)| want.map_or(true, |w| agrees(v.to_f64(), w, 6)));
                if let Some(w) = p.exact {
                    ok &= agrees(exact.to_f64(), w, 6);
                }
                if !ok {
                    status = Status::TableMismatch;
                    report.notes.push(format!("N = {n} differs from the reference row"));
                }
                Cell::flag(ok)
            }
        };
        row.push(verdict);
        report.push(row);
    }
    Ok(Outcome { report, status })
}

fn expansion_values(e: &Expansion<Mp>, n: i64, m_max: usize) -> Result<Vec<Mp>, Error> {
    (1..=m_max).map(|m| evaluate_expansion(e, n, m)).collect()
}

/// Coefficient lists of the asymptotic expansions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ExpansionName {
    /// `b_t(σ)` for `A₁(N, σ)`.
    A1,
    /// `c_{ℓ,t}` for `C₀₁ℓ(N)`.
    C01,
    FamilyC,
    /// Parity-dependent; `N` comes from the first `--rows` entry.
    FamilyD,
    FamilyE,
}

/// Dumps the coefficients of one expansion with its base and power.
pub fn expansion(name: ExpansionName, cfg: &RunConfig) -> CmdResult {
    let prec = cfg.prec(192);
    let n = cfg.rows.as_ref().and_then(|r| r.first().copied()).unwrap_or(1000);
    let m = cfg.m.unwrap_or(4);
    let e = match name {
        ExpansionName::A1 => {
            b_coeffs::<Mp>(cfg.sigma.as_ref().and_then(|s| s.first().copied()).unwrap_or(1), m, prec)?
        }
        ExpansionName::C01 => c_coeffs::<Mp>(cfg.ell.unwrap_or(1), m, prec)?,
        ExpansionName::FamilyC => family_leading::<Mp>(Family::C, n, prec)?,
        ExpansionName::FamilyD => family_leading::<Mp>(Family::D, n, prec)?,
        ExpansionName::FamilyE => family_leading::<Mp>(Family::E, n, prec)?,
    };
    let rec = e.record(digits(prec));
    let exponent = if e.parity.is_some() { "-N/2" } else { "-N" };
    let mut report = Report::new(
        format!(
            "expansion {}: Re[w({},{})^({exponent}) sum_t coeff_t/N^t]/N^{}",
            rec.kind, rec.base.a, rec.base.b, rec.power
        ),
        "dimensionless complex coefficients",
        &["t", "re", "im"],
    );
    let im = &rec.base.w.im;
    let (sign, mag) = im.strip_prefix('-').map_or(("+", im.as_str()), |m| ("-", m));
    report.notes.push(format!("w = {} {sign} {mag} i", rec.base.w.re));
    if let Some(p) = e.parity {
        report.notes.push(format!("coefficients for N mod 2 = {p}"));
    }
    for (t, c) in e.coeffs.iter().enumerate() {
        report.push(vec![
            Cell::int(t as i64),
            Cell::number(sig(c.re.to_f64(), 10), c.re.to_sci(digits(prec))),
            Cell::number(sig(c.im.to_f64(), 10), c.im.to_sci(digits(prec))),
        ]);
    }
    Ok(Outcome { report, status: Status::Ok })
}

/// `Ψ(h/k)` and `D(h, k)` for `1 ≤ h < k`; `k = 211` is checked against the reference data.
pub fn psi_table(k: i64, cfg: &RunConfig) -> CmdResult {
    if k < 2 {
        return Err(Error::Domain(format!("k = {k} must be at least 2")));
    }
    let prec = cfg.prec(128);
    let mut report = Report::new(
        format!(
            "Psi(h/{k}) = max_m log|1/prod_j 2 sin(pi j h/{k})|/{k} and D(h,{k}) (reference data psi211)"
        ),
        "Psi is dimensionless; D is an integer",
        &["h", "psi", "D"],
    );
    let hs: Vec<i64> = (1..k).collect();
    let values: Vec<(Mp, i64)> = hs
        .par_iter()
        .map(|&h| Ok((psi::<Mp>(h, k, prec)?, minimal_pair(h, k)?.d)))
        .collect::<Result<_, Error>>()?;
    let mut status = Status::Ok;
    let mut misses = 0;
    for (&h, (p, d)) in hs.iter().zip(&values) {
        let v = p.to_f64();
        if k == 211 && (v - reference::PSI_211[h as usize - 1]).abs() >= 5e-6 {
            misses += 1;
        }
        report.push(vec![Cell::int(h), Cell::number(plain6(v), p.to_sci(digits(prec))), Cell::int(*d)]);
    }
    if k == 211 {
        let above: Vec<i64> =
            hs.iter().zip(&values).filter(|(_, (p, _))| p.to_f64() > reference::U).map(|(h, _)| *h).collect();
        report.notes.push(format!("{} of 210 values differ from the reference data by 5e-6 or more", misses));
        report.notes.push(format!("h with Psi > U: {above:?}"));
        if misses > 0 || above != reference::PSI_211_ABOVE_U {
            status = Status::TableMismatch;
        }
    }
    Ok(Outcome { report, status })
}

/// The residue sum over all Farey poles against the partition counts it equals.
pub fn identity(n_max: i64, cfg: &RunConfig) -> CmdResult {
    let prec = cfg.prec(320);
    let sigmas = cfg.sigma.clone().unwrap_or_else(|| (-3..=3).collect());
    let mut report = Report::new(
        format!("sum of residues of Q(z; N, sigma) over the Farey fractions of order N, N <= {n_max}, at {prec} bits"),
        "expected is -p_N(-sigma), 0 or (-1)^N p_N(sigma - N(N+1)/2); error is absolute",
        &["N", "sigma", "expected", "computed", "abs_error", "result"],
    );
    let cases: Vec<(i64, i64)> = (1..=n_max).flat_map(|n| sigmas.iter().map(move |&s| (n, s))).collect();
    let results: Vec<(Complex<Mp>, f64)> = cases
        .par_iter()
        .map(|&(n, s)| {
            let got = residue_sum::<Mp>(n, s, prec)?;
            let want = residue_sum_expected(n, s).to_f64().unwrap_or(f64::INFINITY);
            Ok((got, want))
        })
        .collect::<Result<_, Error>>()?;
    let mut status = Status::Ok;
    for (&(n, s), (got, want)) in cases.iter().zip(&results) {
        let target = Complex::new(Mp::from_f64_prec(*want, prec), Mp::from_i64_prec(0, prec));
        let err = ComplexExt::abs(&(got.clone() - target)).to_f64();
        let ok = err < 1e-15 * (1.0 + want.abs());
        if !ok {
            status = Status::IdentityFailure;
        }
        report.push(vec![
            Cell::int(n),
            Cell::int(s),
            Cell::text(residue_sum_expected(n, s).to_string()),
            real_cell(&got.re, 12),
            Cell::text(sig(err, 2)),
            Cell::flag(ok),
        ]);
    }
    Ok(Outcome { report, status })
}

/// Runs the acceptance criteria (all, or those listed) in order.
pub fn verify(only: Option<&[usize]>, cfg: &RunConfig) -> CmdResult {
    let ctx = Context { seed: cfg.seed };
    let mut report = Report::new(
        "acceptance criteria",
        "pass/fail per criterion; details quote the measured quantity",
        &["criterion", "title", "result", "detail"],
    );
    let mut status = Status::Ok;
    for c in criteria::ALL {
        if only.is_some_and(|ids| !ids.contains(&c.id)) {
            continue;
        }
        let r = c.run(&ctx);
        eprintln!("criterion {:>2}: {} ({:.1} s)", c.id, if r.passed { "pass" } else { "FAIL" }, r.seconds);
        if !r.passed {
            status = status.max(r.status);
        }
        report.push(vec![
            Cell::int(c.id as i64),
            Cell::text(c.title),
            Cell::flag(r.passed),
            Cell::text(r.detail),
        ]);
    }
    Ok(Outcome { report, status })
}
