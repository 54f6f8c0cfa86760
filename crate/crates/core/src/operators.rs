//! Operator expression trees, window evaluation, dense truncations and
//! inverse-operator builders.
//!
//! Expressions stay symbolic: the same tree can be evaluated on any window
//! size. Dense matrices exist only for the oracle side. Toeplitz and Hankel
//! nodes act as `P·M(g)·P` and `P·M(g)·Q·J` on two-sided windows, so the
//! trees compose exactly like the operators they denote; results are trusted
//! on the interior half of the window.

use crate::cplx::{cr, ONE, ZERO};
use crate::error::Error;
use crate::factorization::{matching_factorization, wiener_hopf};
use crate::linalg::CMat;
use crate::symbol::{MatchingPairAnalysis, RationalSymbol};
use crate::window::CoeffWindow;
use crate::{Result, MAX_WINDOW, TAU_TAIL};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Composition tree of primitive operator actions on coefficient windows.
///
/// `Compose` children are applied right to left (like operator products).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorExpr {
    Identity,
    Compose { children: Vec<OperatorExpr> },
    Sum { children: Vec<OperatorExpr> },
    Scale {
        #[serde(with = "crate::cplx")]
        factor: Complex64,
    },
    Toeplitz { symbol: RationalSymbol },
    Hankel { symbol: RationalSymbol },
    MulSymbol { symbol: RationalSymbol },
    MulWindow { window: CoeffWindow },
    ProjP,
    ProjQ,
    Flip,
    Power { exponent: i64 },
}

impl OperatorExpr {
    pub fn compose(children: Vec<OperatorExpr>) -> Self {
        OperatorExpr::Compose { children }
    }

    pub fn sum(children: Vec<OperatorExpr>) -> Self {
        OperatorExpr::Sum { children }
    }

    pub fn scale(factor: Complex64) -> Self {
        OperatorExpr::Scale { factor }
    }

    pub fn toeplitz(symbol: &RationalSymbol) -> Self {
        OperatorExpr::Toeplitz { symbol: symbol.clone() }
    }

    pub fn hankel(symbol: &RationalSymbol) -> Self {
        OperatorExpr::Hankel { symbol: symbol.clone() }
    }

    pub fn mul_symbol(symbol: &RationalSymbol) -> Self {
        OperatorExpr::MulSymbol { symbol: symbol.clone() }
    }

    pub fn power(exponent: i64) -> Self {
        OperatorExpr::Power { exponent }
    }

    /// `factor · expr`.
    pub fn scaled(self, factor: Complex64) -> Self {
        OperatorExpr::compose(vec![OperatorExpr::scale(factor), self])
    }

    /// Worst geometric decay ratio among the symbols in the tree.
    pub fn max_decay_ratio(&self) -> f64 {
        match self {
            OperatorExpr::Compose { children } | OperatorExpr::Sum { children } => children
                .iter()
                .map(|c| c.max_decay_ratio())
                .fold(0.0, f64::max),
            OperatorExpr::Toeplitz { symbol }
            | OperatorExpr::Hankel { symbol }
            | OperatorExpr::MulSymbol { symbol } => symbol.decay_ratio(),
            OperatorExpr::MulWindow { window } => window.decay_ratio,
            _ => 0.0,
        }
    }
}

/// The operator `T(a) + H(b)` as an expression.
pub fn th_operator(a: &RationalSymbol, b: &RationalSymbol) -> OperatorExpr {
    OperatorExpr::sum(vec![OperatorExpr::toeplitz(a), OperatorExpr::hankel(b)])
}

/// Evaluate an expression tree over the two-sided range `[-window-1, window]`
/// (a range closed under the flip `n -> -n-1`).
///
/// The result carries a tail-bound estimate and is trusted on the interior
/// sub-window `[-window/2, window/2]`.
pub fn apply(expr: &OperatorExpr, input: &CoeffWindow, window: usize) -> Result<CoeffWindow> {
    let w = window as i64;
    let x = input.resized(-w - 1, w);
    let mut out = eval(expr, &x, w)?;
    let rho = expr.max_decay_ratio().max(input.decay_ratio);
    let tail = if rho > 0.0 {
        let half = (window / 2) as f64;
        input.sup_norm().max(1.0) * rho.powf(half) / (1.0 - rho)
    } else {
        0.0
    };
    out.decay_ratio = rho;
    out.tail_bound = tail;
    Ok(out)
}

/// Evaluate with window auto-doubling until the tail estimate drops below
/// `tol` (default `TAU_TAIL`); fails with `TruncationTooSmall` at the cap.
pub fn apply_auto(
    expr: &OperatorExpr,
    input: &CoeffWindow,
    start_window: usize,
    tol: Option<f64>,
) -> Result<CoeffWindow> {
    let tol = tol.unwrap_or(TAU_TAIL);
    let mut window = start_window.max(8);
    loop {
        let out = apply(expr, input, window)?;
        if out.tail_bound <= tol {
            return Ok(out);
        }
        if window >= MAX_WINDOW {
            return Err(Error::TruncationTooSmall { window, bound: out.tail_bound });
        }
        window *= 2;
    }
}

fn eval(expr: &OperatorExpr, x: &CoeffWindow, w: i64) -> Result<CoeffWindow> {
    let (lo, hi) = (-w - 1, w);
    match expr {
        OperatorExpr::Identity => Ok(x.clone()),
        OperatorExpr::Compose { children } => {
            let mut cur = x.clone();
            for child in children.iter().rev() {
                cur = eval(child, &cur, w)?;
            }
            Ok(cur)
        }
        OperatorExpr::Sum { children } => {
            let mut acc = CoeffWindow::zeros(lo, hi);
            for child in children {
                let term = eval(child, x, w)?;
                acc = acc.add(&term).resized(lo, hi);
            }
            Ok(acc)
        }
        OperatorExpr::Scale { factor } => Ok(x.scale(*factor)),
        OperatorExpr::MulSymbol { symbol } => {
            let kernel = symbol.fourier_coefficients(lo - hi, hi - lo)?;
            Ok(x.convolve(&kernel, lo, hi))
        }
        OperatorExpr::MulWindow { window } => Ok(x.convolve(window, lo, hi)),
        OperatorExpr::ProjP => Ok(x.project_analytic()),
        OperatorExpr::ProjQ => Ok(x.project_coanalytic()),
        OperatorExpr::Flip => Ok(x.flip().resized(lo, hi)),
        OperatorExpr::Power { exponent } => Ok(x.shift(*exponent).resized(lo, hi)),
        OperatorExpr::Toeplitz { symbol } => {
            let kernel = symbol.fourier_coefficients(lo - hi, hi - lo)?;
            let xp = x.project_analytic();
            Ok(xp.convolve(&kernel, lo, hi).project_analytic())
        }
        OperatorExpr::Hankel { symbol } => {
            // H(b) f = P · b · QJ f, and QJ f = flip of the analytic part.
            let kernel = symbol.fourier_coefficients(lo - hi, hi - lo)?;
            let xf = x.project_analytic().flip().resized(lo, hi);
            Ok(xf.convolve(&kernel, lo, hi).project_analytic())
        }
    }
}

/// Dense `N×N` finite section of `T(a) + H(b)` with entries
/// `â_{k-j} + b̂_{k+j+1}`.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub n: usize,
    pub entries: CMat,
    pub symbol_a: Option<RationalSymbol>,
    pub symbol_b: Option<RationalSymbol>,
}

/// Build the dense truncation; either symbol may be absent (treated as zero).
pub fn truncate(
    a: Option<&RationalSymbol>,
    b: Option<&RationalSymbol>,
    n: usize,
) -> Result<DenseOperator> {
    assert!(n >= 1);
    let entries = section(a, b, n, n)?;
    Ok(DenseOperator {
        n,
        entries,
        symbol_a: a.cloned(),
        symbol_b: b.cloned(),
    })
}

/// Rectangular section with rows `0..rows`, columns `0..cols`.
pub fn section(
    a: Option<&RationalSymbol>,
    b: Option<&RationalSymbol>,
    rows: usize,
    cols: usize,
) -> Result<CMat> {
    let ac = match a {
        Some(s) => Some(s.fourier_coefficients(-(cols as i64 - 1), rows as i64 - 1)?),
        None => None,
    };
    let bc = match b {
        Some(s) => Some(s.fourier_coefficients(1, (rows + cols) as i64 - 1)?),
        None => None,
    };
    Ok(CMat::from_fn(rows, cols, |k, j| {
        let mut v = ZERO;
        if let Some(w) = &ac {
            v += w.get(k as i64 - j as i64);
        }
        if let Some(w) = &bc {
            v += w.get((k + j) as i64 + 1);
        }
        v
    }))
}

/// Which inverse of a Toeplitz operator to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseSide {
    TwoSided,
    Right,
    Left,
}

/// Inverse (or one-sided inverse) of `T(g)` as an expression.
///
/// Two-sided (`ind T(g) = 0`): `T(g₊^{-1})·T(g₋^{-1})`. Right
/// (`κ = ind T(g) > 0`): `T((gχ_κ)₊^{-1})·T((gχ_κ)₋^{-1})·T(χ_κ)`. Left
/// (`κ < 0`): `T(g₊^{-1})·T(χ_κ)·T(g₋^{-1})`.
pub fn toeplitz_inverse_expr(g: &RationalSymbol, side: InverseSide) -> Result<OperatorExpr> {
    let kappa = -g.winding_number()?;
    match side {
        InverseSide::TwoSided => {
            if kappa != 0 {
                return Err(Error::WrongIndexForSide { index: kappa, side: "two-sided".into() });
            }
            let wh = wiener_hopf(g)?;
            Ok(OperatorExpr::compose(vec![
                OperatorExpr::toeplitz(&wh.plus.inv()?),
                OperatorExpr::toeplitz(&wh.minus.inv()?),
            ]))
        }
        InverseSide::Right => {
            if kappa < 0 {
                return Err(Error::WrongIndexForSide { index: kappa, side: "right".into() });
            }
            if kappa == 0 {
                return toeplitz_inverse_expr(g, InverseSide::TwoSided);
            }
            let h = g.shifted(kappa);
            let wh = wiener_hopf(&h)?;
            debug_assert_eq!(wh.index_m, 0);
            Ok(OperatorExpr::compose(vec![
                OperatorExpr::toeplitz(&wh.plus.inv()?),
                OperatorExpr::toeplitz(&wh.minus.inv()?),
                OperatorExpr::toeplitz(&RationalSymbol::monomial(kappa)),
            ]))
        }
        InverseSide::Left => {
            if kappa > 0 {
                return Err(Error::WrongIndexForSide { index: kappa, side: "left".into() });
            }
            if kappa == 0 {
                return toeplitz_inverse_expr(g, InverseSide::TwoSided);
            }
            let wh = wiener_hopf(g)?;
            Ok(OperatorExpr::compose(vec![
                OperatorExpr::toeplitz(&wh.plus.inv()?),
                OperatorExpr::toeplitz(&RationalSymbol::monomial(kappa)),
                OperatorExpr::toeplitz(&wh.minus.inv()?),
            ]))
        }
    }
}

/// Right (κ ≥ 0) or left (κ ≤ 0) inverse chosen by the index.
fn toeplitz_one_sided(g: &RationalSymbol) -> Result<OperatorExpr> {
    let kappa = -g.winding_number()?;
    if kappa >= 0 {
        toeplitz_inverse_expr(g, InverseSide::Right)
    } else {
        toeplitz_inverse_expr(g, InverseSide::Left)
    }
}

/// Clause tags accepted by [`build_inverse`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InverseCase {
    /// κ1 = 0, κ2 = 0 (two-sided).
    CaseI,
    /// κ1 = 1, κ2 = 0, σ(c) = 1 (two-sided).
    CaseII,
    /// κ1 = 0, κ2 = 1, σ(d) = -1 (two-sided).
    CaseIII,
    /// κ1 = 1, κ2 = 1, σ(c) = 1, σ(d) = -1 (two-sided).
    CaseIV,
    /// κ1 = 0, κ2 = -1, σ(d) = 1 (two-sided).
    CaseV,
    /// κ1 = -1, κ2 = 0, σ(c) = -1 (two-sided).
    CaseVI,
    /// κ1 = -1, κ2 = -1, σ(c) = -1, σ(d) = 1 (two-sided).
    CaseVII,
    /// κ1 = 1, κ2 = -1, σ(c) = 1, σ(d) = 1 (two-sided).
    CaseVIII,
    /// κ1 = -1, κ2 = 1, σ(c) = -1, σ(d) = -1 (two-sided, shift prefix).
    CaseIX,
    /// κ1 ≥ 0, κ2 ≥ 0: right inverse in the simple product form.
    RightSimple,
    /// κ1 ≤ 0, κ2 ≤ 0: left inverse.
    LeftGeneralized,
    /// κ1 ≥ 0, κ2 ≤ 0: generalized inverse.
    MixedGeneralized,
    /// (κ1, κ2) = (-2, 2): explicit inverse with the rank-one correction.
    RankOneShift,
}

impl InverseCase {
    pub fn tag(&self) -> &'static str {
        match self {
            InverseCase::CaseI => "case-i",
            InverseCase::CaseII => "case-ii",
            InverseCase::CaseIII => "case-iii",
            InverseCase::CaseIV => "case-iv",
            InverseCase::CaseV => "case-v",
            InverseCase::CaseVI => "case-vi",
            InverseCase::CaseVII => "case-vii",
            InverseCase::CaseVIII => "case-viii",
            InverseCase::CaseIX => "case-ix",
            InverseCase::RightSimple => "right-simple",
            InverseCase::LeftGeneralized => "left-generalized",
            InverseCase::MixedGeneralized => "mixed-generalized",
            InverseCase::RankOneShift => "rank-one-shift",
        }
    }
}

/// Window used when materializing the kernel function of the rank-one
/// correction in the (-2, 2) inverse.
const OMEGA_BUILD_WINDOW: usize = 256;

/// Build the inverse (or one-sided/generalized inverse) expression for the
/// given clause.
pub fn build_inverse(analysis: &MatchingPairAnalysis, case: InverseCase) -> Result<OperatorExpr> {
    use InverseCase::*;
    let (k1, k2) = (analysis.kappa1, analysis.kappa2);
    let (sc, sd) = (analysis.sigma_c, analysis.sigma_d);
    let check = |ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(Error::CaseUnsupported(format!(
                "clause {case:?} does not apply to (κ1, κ2, σc, σd) = ({k1}, {k2}, {sc}, {sd})"
            )))
        }
    };
    match case {
        CaseI => check(k1 == 0 && k2 == 0).and_then(|_| right_simple_expr(analysis)),
        CaseII => check(k1 == 1 && k2 == 0 && sc == 1).and_then(|_| right_simple_expr(analysis)),
        CaseIII => check(k1 == 0 && k2 == 1 && sd == -1).and_then(|_| right_simple_expr(analysis)),
        CaseIV => {
            check(k1 == 1 && k2 == 1 && sc == 1 && sd == -1).and_then(|_| right_simple_expr(analysis))
        }
        CaseV => check(k1 == 0 && k2 == -1 && sd == 1).and_then(|_| left_generalized_expr(analysis)),
        CaseVI => {
            check(k1 == -1 && k2 == 0 && sc == -1).and_then(|_| left_generalized_expr(analysis))
        }
        CaseVII => check(k1 == -1 && k2 == -1 && sc == -1 && sd == 1)
            .and_then(|_| left_generalized_expr(analysis)),
        CaseVIII => check(k1 == 1 && k2 == -1 && sc == 1 && sd == 1)
            .and_then(|_| rank_one_mixed_expr(analysis)),
        CaseIX => {
            check(k1 == -1 && k2 == 1 && sc == -1 && sd == -1).and_then(|_| case_ix_expr(analysis))
        }
        RightSimple => check(k1 >= 0 && k2 >= 0).and_then(|_| right_simple_expr(analysis)),
        LeftGeneralized => check(k1 <= 0 && k2 <= 0).and_then(|_| left_generalized_expr(analysis)),
        MixedGeneralized => {
            check(k1 >= 0 && k2 <= 0).and_then(|_| mixed_generalized_expr(analysis))
        }
        RankOneShift => check(k1 == -2 && k2 == 2).and_then(|_| rank_one_shift_expr(analysis)),
    }
}

/// The operator `W = (I - H(c̃))·T_r^{-1}(c)·T(ã^{-1}) + H(a^{-1})`, which
/// satisfies `(T(a)+H(b))·W = T(d)` whenever `ind T(c) ≥ 0` (a product-formula
/// computation using `a·ã = b·b̃`).
fn w_factor_expr(an: &MatchingPairAnalysis) -> Result<OperatorExpr> {
    let c_tilde = an.c.tilde();
    let a_tilde_inv = an.a.tilde().inv()?;
    let a_inv = an.a.inv()?;
    let trc = toeplitz_inverse_expr(&an.c, InverseSide::Right)?;
    let i_minus_hc = OperatorExpr::sum(vec![
        OperatorExpr::Identity,
        OperatorExpr::hankel(&c_tilde).scaled(-ONE),
    ]);
    Ok(OperatorExpr::sum(vec![
        OperatorExpr::compose(vec![i_minus_hc, trc, OperatorExpr::toeplitz(&a_tilde_inv)]),
        OperatorExpr::hankel(&a_inv),
    ]))
}

/// The transposed companion `M = T(ã^{-1})·T_l^{-1}(d)·(I - H(d)) + H(ã^{-1})`,
/// which satisfies `M·(T(a)+H(b)) = T(c)` whenever `ind T(d) ≤ 0` (transpose
/// of the `W`-identity applied to the transposed pair `(ã, b)`).
fn m_factor_expr(an: &MatchingPairAnalysis) -> Result<OperatorExpr> {
    let a_tilde_inv = an.a.tilde().inv()?;
    let tld = toeplitz_inverse_expr(&an.d, InverseSide::Left)?;
    let i_minus_hd = OperatorExpr::sum(vec![
        OperatorExpr::Identity,
        OperatorExpr::hankel(&an.d).scaled(-ONE),
    ]);
    Ok(OperatorExpr::sum(vec![
        OperatorExpr::compose(vec![OperatorExpr::toeplitz(&a_tilde_inv), tld, i_minus_hd]),
        OperatorExpr::hankel(&a_tilde_inv),
    ]))
}

/// Right inverse `W·T_r^{-1}(d) = (I - H(c̃))·T_r^{-1}(c)·T(ã^{-1})·T_r^{-1}(d)
/// + H(a^{-1})·T_r^{-1}(d)`; two-sided whenever the operator is invertible.
fn right_simple_expr(an: &MatchingPairAnalysis) -> Result<OperatorExpr> {
    let trd = toeplitz_inverse_expr(&an.d, InverseSide::Right)?;
    Ok(OperatorExpr::compose(vec![w_factor_expr(an)?, trd]))
}

/// Left inverse `T_l^{-1}(c)·M = T_l^{-1}(c)·(T(ã^{-1})·T_l^{-1}(d)·(I-H(d))
/// + H(ã^{-1}))`; obtained from the right-inverse form by passing to the
/// transposed operator `T(ã) + H(b)`. Two-sided when invertible.
fn left_generalized_expr(an: &MatchingPairAnalysis) -> Result<OperatorExpr> {
    let tlc = toeplitz_inverse_expr(&an.c, InverseSide::Left)?;
    Ok(OperatorExpr::compose(vec![tlc, m_factor_expr(an)?]))
}

/// Product form `G₀ = W·T_l^{-1}(d)` for κ1 ≥ 0 ≥ κ2. It satisfies
/// `(T(a)+H(b))·G₀ = T(d)·T_l^{-1}(d) = I - T(d₋)·P_m·T(d₋^{-1})` — a right
/// inverse up to a rank-`|κ2|` defect. The rank-one repair in
/// [`rank_one_mixed_expr`] upgrades it to a two-sided inverse when
/// `(κ1, κ2) = (1, -1)` and the operator is invertible.
fn mixed_generalized_expr(an: &MatchingPairAnalysis) -> Result<OperatorExpr> {
    let tld = toeplitz_inverse_expr(&an.d, InverseSide::Left)?;
    Ok(OperatorExpr::compose(vec![w_factor_expr(an)?, tld]))
}

/// Rank-one expression `x ↦ ℓ(x)·u` with `ℓ(x) = (T(h)x)_0`.
fn rank_one_expr(u: CoeffWindow, h: &RationalSymbol) -> OperatorExpr {
    let pick_zero = OperatorExpr::sum(vec![
        OperatorExpr::Identity,
        OperatorExpr::compose(vec![
            OperatorExpr::toeplitz(&RationalSymbol::monomial(1)),
            OperatorExpr::toeplitz(&RationalSymbol::monomial(-1)),
        ])
        .scaled(-ONE),
    ]);
    OperatorExpr::compose(vec![
        OperatorExpr::MulWindow { window: u },
        pick_zero,
        OperatorExpr::ProjP,
        OperatorExpr::toeplitz(h),
    ])
}

/// Two-sided inverse for (κ1, κ2) = (1, -1) (any signatures), assembled as
/// `G₀ + u⊗ℓ`: the defective right inverse `G₀ = W·T_l^{-1}(d)` satisfies
/// `A·G₀ = I - e₀⊗ℓ` with `ℓ(x) = (T(d₋^{-1})x)_0`, and `u = A^{-1}e₀` is
/// recovered from `T(c)·u = M·e₀` as `u = T_r^{-1}(c)·M·e₀ + λ·c₊^{-1}` with
/// the scalar fixed by `A·u = e₀`.
pub fn rank_one_mixed_expr(an: &MatchingPairAnalysis) -> Result<OperatorExpr> {
    let window = OMEGA_BUILD_WINDOW;
    let w = window as i64;
    let g0 = mixed_generalized_expr(an)?;
    let d_minus_inv = wiener_hopf(&an.d)?.minus.inv()?;
    // u_p = T_r^{-1}(c)·M·e₀
    let m_expr = m_factor_expr(an)?;
    let trc = toeplitz_inverse_expr(&an.c, InverseSide::Right)?;
    let e0 = CoeffWindow::delta(0, -w - 1, w);
    let up = apply(
        &OperatorExpr::compose(vec![trc, m_expr]),
        &e0,
        window,
    )?;
    // Kernel direction of T(c): c₊^{-1}.
    let c_plus_inv = matching_factorization(&an.c)?.plus.inv()?;
    let cker = c_plus_inv.fourier_coefficients(-w - 1, w)?;
    // Fix λ from A(u_p + λ·c₊^{-1}) = e₀ by interior least squares.
    let a_expr = th_operator(&an.a, &an.b);
    let r0 = e0.add(&apply(&a_expr, &up, window)?.scale(-ONE));
    let r1 = apply(&a_expr, &cker, window)?;
    let mut num = crate::cplx::ZERO;
    let mut den = 0.0f64;
    for idx in 0..=(w / 2) {
        let x = r1.get(idx);
        num += x.conj() * r0.get(idx);
        den += x.norm_sqr();
    }
    if den < 1e-20 {
        return Err(Error::CaseUnsupported(
            "rank-one repair is degenerate; operator is not invertible".into(),
        ));
    }
    let lambda = num / cr(den);
    let resid = (0..=(w / 2))
        .map(|idx| (r0.get(idx) - lambda * r1.get(idx)).norm())
        .fold(0.0, f64::max);
    if resid > 1e-6 {
        return Err(Error::CaseUnsupported(format!(
            "rank-one repair inconsistent (residual {resid:.3e}); operator is not invertible"
        )));
    }
    let u = up.add(&cker.scale(lambda)).resized(-w - 1, w);
    Ok(OperatorExpr::sum(vec![g0, rank_one_expr(u, &d_minus_inv)]))
}

/// Two-sided inverse for κ1 = -1, κ2 = 1, σ(c) = σ(d) = -1:
/// `T(t^{-1})·P₀·[(I - H(t²c̃))·T_r^{-1}(t^{-2}c)·T(ã^{-1}t^{-1})·T_r^{-1}(d)
/// + H(a^{-1}t)·T_r^{-1}(d)]` where `P₀ = I - σ(c)·c₊^{-1}·t·Q·t^{-1}` is the
/// projection onto `im T(t)` along the kernel direction `c₊^{-1}` of the
/// shifted operator (the `σ(c)` factor normalizes `c₊^{-1}(0)` to 1).
fn case_ix_expr(an: &MatchingPairAnalysis) -> Result<OperatorExpr> {
    let fc = matching_factorization(&an.c)?;
    let c_plus_inv = fc.plus.inv()?;
    let prefix = OperatorExpr::sum(vec![
        OperatorExpr::Identity,
        OperatorExpr::compose(vec![
            OperatorExpr::mul_symbol(&c_plus_inv),
            OperatorExpr::power(1),
            OperatorExpr::ProjQ,
            OperatorExpr::power(-1),
        ])
        .scaled(-cr(fc.sigma as f64)),
    ]);
    let tail = shifted_right_tail(an)?;
    Ok(OperatorExpr::compose(vec![
        OperatorExpr::toeplitz(&RationalSymbol::monomial(-1)),
        prefix,
        tail,
    ]))
}

/// `(I - H(t²c̃))·T_r^{-1}(t^{-2}c)·T(ã^{-1}t^{-1})·T_r^{-1}(d) +
/// H(a^{-1}t)·T_r^{-1}(d)` — the right factor shared by the shift-prefixed
/// inverses.
fn shifted_right_tail(an: &MatchingPairAnalysis) -> Result<OperatorExpr> {
    let c_shift = an.c.shifted(-2);
    let trc = toeplitz_one_sided(&c_shift)?;
    let trd = toeplitz_one_sided(&an.d)?;
    let t2_ctilde = an.c.tilde().shifted(2);
    let a_tilde_inv_t = an.a.tilde().inv()?.shifted(-1);
    let a_inv_t = an.a.inv()?.shifted(1);
    let i_minus_h = OperatorExpr::sum(vec![
        OperatorExpr::Identity,
        OperatorExpr::hankel(&t2_ctilde).scaled(-ONE),
    ]);
    Ok(OperatorExpr::sum(vec![
        OperatorExpr::compose(vec![
            i_minus_h,
            trc,
            OperatorExpr::toeplitz(&a_tilde_inv_t),
            trd.clone(),
        ]),
        OperatorExpr::compose(vec![OperatorExpr::hankel(&a_inv_t), trd]),
    ]))
}

/// The kernel functions `ω^{a,b,±} = T^{-1}(ct^{-2})·T(ã^{-1}t^{-1})·
/// (d₊^{-1}(1 ± σ(d)t))` of a (-2, 2) pair, evaluated on a window.
pub fn omega_windows(
    analysis: &MatchingPairAnalysis,
    window: usize,
) -> Result<(CoeffWindow, CoeffWindow)> {
    if (analysis.kappa1, analysis.kappa2) != (-2, 2) {
        return Err(Error::WrongIndices(analysis.kappa1, analysis.kappa2));
    }
    let fd = matching_factorization(&analysis.d)?;
    let d_plus_inv = fd.plus.inv()?;
    let sig = cr(fd.sigma as f64);
    let w = window as i64;
    let base = d_plus_inv.fourier_coefficients(-w, w)?;
    let shifted = base.shift(1).resized(-w, w).scale(sig);
    let s_plus = base.add(&shifted);
    let s_minus = base.add(&shifted.scale(-ONE));
    let c_shift = analysis.c.shifted(-2);
    let tc_inv = toeplitz_inverse_expr(&c_shift, InverseSide::TwoSided)?;
    let a_tilde_inv_t = analysis.a.tilde().inv()?.shifted(-1);
    let expr = OperatorExpr::compose(vec![tc_inv, OperatorExpr::toeplitz(&a_tilde_inv_t)]);
    let omega_plus = apply(&expr, &s_plus, window)?;
    let omega_minus = apply(&expr, &s_minus, window)?;
    Ok((omega_plus, omega_minus))
}

/// Explicit (-2, 2) inverse with the rank-one correction scaled by
/// `1/ω̂₀^{a,b,+}`.
fn rank_one_shift_expr(an: &MatchingPairAnalysis) -> Result<OperatorExpr> {
    let (omega_plus, _) = omega_windows(an, OMEGA_BUILD_WINDOW)?;
    let w0 = omega_plus.get(0);
    if w0.norm() < 1e-12 {
        return Err(Error::CaseUnsupported(
            "zero Fourier coefficient of the kernel function vanishes".into(),
        ));
    }
    let w = OMEGA_BUILD_WINDOW as i64;
    let omega_t = omega_plus.shift(1).resized(-w, w);
    let mid = OperatorExpr::sum(vec![
        OperatorExpr::Identity,
        OperatorExpr::compose(vec![
            OperatorExpr::MulWindow { window: omega_t },
            OperatorExpr::ProjQ,
            OperatorExpr::power(-1),
        ])
        .scaled(-ONE / w0),
    ]);
    let tail = shifted_right_tail(an)?;
    Ok(OperatorExpr::compose(vec![
        OperatorExpr::toeplitz(&RationalSymbol::monomial(-1)),
        mid,
        tail,
    ]))
}
