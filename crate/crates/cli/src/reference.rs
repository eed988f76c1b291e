//! Reference values the commands and criteria compare against.

/// Dilogarithm zeros `w(A, B)` to ten decimals.
pub const ZEROS: [((i64, i64), (f64, f64)); 6] = [
    ((0, -1), (0.9161978162, -0.1824588972)),
    ((0, -2), (0.9684820460, -0.1095311065)),
    ((1, -2), (-0.9943069304, -0.0648889318)),
    ((-1, -3), (-0.5459030969, 0.8812307423)),
    ((0, -3), (0.9832603795, -0.0777596389)),
    ((1, -3), (-0.4594734813, -0.8485350380)),
];

/// A reference table row: `N`, the expansion for `m = 1..=4` (missing entries are
/// `None`), and the exact value.
#[derive(Clone, Copy, Debug)]
pub struct Row {
    pub n: i64,
    pub m: [Option<f64>; 4],
    pub exact: Option<f64>,
}

const fn full(n: i64, m: [f64; 4], exact: f64) -> Row {
    Row { n, m: [Some(m[0]), Some(m[1]), Some(m[2]), Some(m[3])], exact: Some(exact) }
}

/// Expansion of `A₁(N, 1)` against the exact sum.
pub const A1: [Row; 5] = [
    full(200, [-33.8689, -32.5734, -32.4829, -32.4681], -32.4692),
    full(400, [2.17937e7, 2.16780e7, 2.16710e7, 2.16712e7], 2.16712e7),
    full(600, [1.80284e12, 1.77324e12, 1.77260e12, 1.77255e12], 1.77255e12),
    full(800, [-3.72536e18, -3.71475e18, -3.71444e18, -3.71444e18], -3.71444e18),
    full(1000, [-2.58000e23, -2.54119e23, -2.54072e23, -2.54070e23], -2.54070e23),
];

/// Expansion of `C₀₁₁(N)` against the exact coefficient.
pub const C011: [Row; 4] = [
    full(400, [-2.17937e7, -2.16780e7, -2.16710e7, -2.16712e7], -2.16712e7),
    full(600, [-1.80284e12, -1.77324e12, -1.77260e12, -1.77255e12], -1.77255e12),
    full(800, [3.72536e18, 3.71475e18, 3.71444e18, 3.71444e18], 3.71444e18),
    full(1000, [2.58000e23, 2.54119e23, 2.54072e23, 2.54070e23], 2.54070e23),
];

/// Expansion of `C₀₁₄(N)` against the exact coefficient.
pub const C014: [Row; 3] = [
    full(400, [-56.2851, -58.7844, -58.6802, -58.6857], -58.6545),
    full(600, [-1.52353e7, -1.52212e7, -1.52136e7, -1.52132e7], -1.52133e7),
    full(800, [1.44649e12, 1.47247e12, 1.47185e12, 1.47186e12], 1.47186e12),
];

/// Leading term for `C₁₂₁(N)`. The higher terms and the exact value are
/// known too, but only the leading coefficient is computable here.
pub const C121: [Row; 2] = [
    Row { n: 1000, m: [Some(1.76776e9), None, None, None], exact: None },
    Row { n: 1001, m: [Some(2.10996e9), None, None, None], exact: None },
];

/// `Ψ(h/211)` for `h = 1..=210`, to six significant digits.
pub const PSI_211: [f64; 210] = [
    0.148849,
    0.0697363,
    0.043772,
    0.0309863,
    0.023397,
    0.0184698,
    0.0156639,
    0.0124713,
    0.0104293,
    0.0112525,
    0.00767528,
    0.00659574,
    0.0058591,
    0.0096738,
    0.00971531,
    0.00396796,
    0.00342261,
    0.00301237,
    0.00470466,
    0.00252641,
    0.01113,
    0.0020895,
    0.00188677,
    0.00169337,
    0.00150855,
    0.00300304,
    0.00116221,
    0.00163458,
    0.000843381,
    0.0156784,
    0.000548606,
    0.000473552,
    0.000554153,
    0.00101775,
    0.0186021,
    0.00106814,
    0.,
    0.,
    0.,
    0.,
    0.000381978,
    0.0229158,
    0.0027325,
    0.00196647,
    0.,
    0.,
    0.0104684,
    0.00208189,
    0.,
    0.,
    0.00066038,
    0.00632593,
    0.0311822,
    0.00265721,
    0.00204909,
    0.,
    0.,
    0.,
    0.,
    0.00504905,
    0.,
    0.0032529,
    0.00070455,
    0.,
    0.00556107,
    0.00345539,
    0.000454217,
    0.00215718,
    0.00643135,
    0.0435319,
    0.01853,
    0.00460294,
    0.0030058,
    0.000302041,
    0.,
    0.00152355,
    0.000412421,
    0.,
    0.0122548,
    0.000515716,
    0.0012993,
    0.00309704,
    0.,
    0.00892564,
    0.00442469,
    0.00144133,
    0.000185497,
    0.00653466,
    0.,
    0.00237935,
    0.00073034,
    0.,
    0.,
    0.00278581,
    0.00237614,
    0.00739771,
    0.0000300997,
    0.00158219,
    0.00126458,
    0.00473862,
    0.00298033,
    0.0051156,
    0.00890871,
    0.0184042,
    0.0696573,
    0.0696573,
    0.0184042,
    0.00890871,
    0.0051156,
    0.00298033,
    0.00473862,
    0.00126458,
    0.00158219,
    0.0000300997,
    0.00739771,
    0.00237614,
    0.00278581,
    0.,
    0.,
    0.00073034,
    0.00237935,
    0.,
    0.00653466,
    0.000185497,
    0.00144133,
    0.00442469,
    0.00892564,
    0.,
    0.00309704,
    0.0012993,
    0.000515716,
    0.0122548,
    0.,
    0.000412421,
    0.00152355,
    0.,
    0.000302041,
    0.0030058,
    0.00460294,
    0.01853,
    0.0435319,
    0.00643135,
    0.00215718,
    0.000454217,
    0.00345539,
    0.00556107,
    0.,
    0.00070455,
    0.0032529,
    0.,
    0.00504905,
    0.,
    0.,
    0.,
    0.,
    0.00204909,
    0.00265721,
    0.0311822,
    0.00632593,
    0.00066038,
    0.,
    0.,
    0.00208189,
    0.0104684,
    0.,
    0.,
    0.00196647,
    0.0027325,
    0.0229158,
    0.000381978,
    0.,
    0.,
    0.,
    0.,
    0.00106814,
    0.0186021,
    0.00101775,
    0.000554153,
    0.000473552,
    0.000548606,
    0.0156784,
    0.000843381,
    0.00163458,
    0.00116221,
    0.00300304,
    0.00150855,
    0.00169337,
    0.00188677,
    0.0020895,
    0.01113,
    0.00252641,
    0.00470466,
    0.00301237,
    0.00342261,
    0.00396796,
    0.00971531,
    0.0096738,
    0.0058591,
    0.00659574,
    0.00767528,
    0.0112525,
    0.0104293,
    0.0124713,
    0.0156639,
    0.0184698,
    0.023397,
    0.0309863,
    0.043772,
    0.0697363,
    0.148849,
];

/// The `h` with `Ψ(h/211) > U`.
pub const PSI_211_ABOVE_U: [i64; 6] = [1, 2, 105, 106, 209, 210];

/// `U = −log|w₀|` and `V = arg(1/w₀)`.
pub const U: f64 = 0.0680762;
pub const V: f64 = 0.196576;
/// `|b₀|` and `arg(−i·b₀)`, the amplitude and phase of the leading oscillation.
pub const B0_ABS: f64 = 5.39532;
pub const B0_PHASE: f64 = 1.21367;

/// Extremes of the Euler–Maclaurin remainder at `Δ = 0.006`, `W = 0.031`, `s = 500`:
/// `(h, L, max |∏⁻¹T_L|, tolerance, max |T_L|, tolerance)`.
pub const EM_EXTREMES: [(i64, usize, f64, f64, f64, f64); 2] =
    [(1, 25, 144.7, 0.5, 0.002, 0.0005), (3, 8, 0.133, 0.005, 0.005, 0.001)];

/// Rounds to `digits` significant digits, the form used in the reference tables.
pub fn sig(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), x)
}

/// Whether `got` shows the same leading `digits` digits as `want`.
///
/// Reference values are themselves rounded, so a tie at the last digit is
/// accepted when `got` lies within half a unit of it.
pub fn agrees(got: f64, want: f64, digits: usize) -> bool {
    if sig(got, digits) == sig(want, digits) {
        return true;
    }
    let unit = 10f64.powi(want.abs().log10().floor() as i32 - digits as i32 + 1);
    (got - want).abs() <= 0.5 * unit * (1.0 + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_data_is_symmetric() {
        for h in 1..=210 {
            assert_eq!(PSI_211[h - 1], PSI_211[210 - h], "h = {h}");
        }
        let above: Vec<i64> = (1..=210).filter(|&h| PSI_211[h as usize - 1] > U).collect();
        assert_eq!(above, PSI_211_ABOVE_U);
    }

    #[test]
    fn agreement_at_displayed_digits() {
        assert!(agrees(-32.46918, -32.4692, 6));
        assert!(agrees(2.167124e7, 2.16712e7, 6));
        assert!(!agrees(1.77130e9, 1.76776e9, 6));
        assert!(!agrees(-32.4698, -32.4692, 6));
        assert_eq!(sig(1772553023669.5, 6), "1.77255e12");
    }
}
