//! Independent numerical oracles: dense SVD defect counting, residual
//! measurement and convergence sweeps.
//!
//! Defect counting works on rectangular finite sections: a tall
//! `(N+pad)×N` section of the operator catches truncation artifacts (a
//! vector annihilated by every row of the tall section is, up to the
//! geometric coefficient tail, a genuine kernel element), so kernel and
//! cokernel dimensions can be told apart even though the square section and
//! its adjoint share singular values. Estimates demand a 10× spectral gap
//! between the counted cluster and the next singular value; without the gap
//! the report is flagged unstable rather than trusted.

use crate::cplx::ZERO;
use crate::linalg::singular_values;
use crate::operators::{apply, section, th_operator, DenseOperator, OperatorExpr};
use crate::symbol::RationalSymbol;
use crate::window::CoeffWindow;
use crate::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Outcome of an SVD defect count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    /// Smallest singular values of the square section (ascending).
    pub singular_values_tail: Vec<f64>,
    pub est_dim_ker: usize,
    pub est_dim_coker: usize,
    /// Gap-rule verdicts for the two counts.
    pub ker_stable: bool,
    pub coker_stable: bool,
    /// Expected defect count, when the caller supplied one.
    pub expected: Option<usize>,
    pub residuals: BTreeMap<String, f64>,
}

impl OracleReport {
    pub fn is_stable(&self) -> bool {
        self.ker_stable && self.coker_stable
    }
}

/// Count singular values below `tol·σ_max`, demanding a 10× gap between the
/// cluster and the next value. Returns `(count, stable)`.
fn count_small(sv_desc: &[f64], tol: f64) -> (usize, bool) {
    if sv_desc.is_empty() {
        return (0, true);
    }
    let smax = sv_desc[0];
    if smax == 0.0 {
        return (sv_desc.len(), true);
    }
    let threshold = tol * smax;
    let mut asc: Vec<f64> = sv_desc.to_vec();
    asc.reverse();
    let count = asc.iter().filter(|s| **s < threshold).count();
    if count == 0 {
        return (0, true);
    }
    if count == asc.len() {
        return (count, false);
    }
    let top_of_cluster = asc[count - 1].max(f64::MIN_POSITIVE);
    let next = asc[count];
    (count, next / top_of_cluster >= 10.0)
}

/// Extra rows appended to the square section so that the coefficient tail
/// beyond the truncation is negligible.
fn tail_pad(a: Option<&RationalSymbol>, b: Option<&RationalSymbol>, n: usize) -> usize {
    let rho = a
        .map(|s| s.decay_ratio())
        .unwrap_or(0.0)
        .max(b.map(|s| s.decay_ratio()).unwrap_or(0.0));
    let span = a
        .iter()
        .chain(b.iter())
        .map(|s| s.power.unsigned_abs() as usize + s.degree_complexity())
        .max()
        .unwrap_or(1);
    if rho == 0.0 {
        return (span + 2).min(n.max(4));
    }
    let pad = (1e-18f64.ln() / rho.ln()).ceil() as usize;
    pad.clamp(8, n).max(span + 2)
}

/// SVD-based defect counts for a dense finite section.
///
/// The kernel count comes from the tall section of the operator itself, the
/// cokernel count from the tall section of the adjoint symbols
/// `(ā, b̃-bar)`; the singular-value tail is reported from the square
/// section.
pub fn svd_defects(op: &DenseOperator, expected: Option<usize>, tol: f64) -> Result<OracleReport> {
    let n = op.n;
    let a = op.symbol_a.as_ref();
    let b = op.symbol_b.as_ref();
    let pad = tail_pad(a, b, n);
    let sv_square = singular_values(&op.entries);
    let tall = section(a, b, n + pad, n)?;
    let (ker_count, ker_stable) = count_small(&singular_values(&tall), tol);
    let a_star = a.map(|s| s.bar());
    let b_star = b.map(|s| s.tilde().bar());
    let tall_adj = section(a_star.as_ref(), b_star.as_ref(), n + pad, n)?;
    let (coker_count, coker_stable) = count_small(&singular_values(&tall_adj), tol);
    let tail_len = (2 * (ker_count.max(coker_count) + 2)).min(n);
    let mut tail: Vec<f64> = sv_square.iter().rev().take(tail_len).cloned().collect();
    tail.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(OracleReport {
        n,
        singular_values_tail: tail,
        est_dim_ker: ker_count,
        est_dim_coker: coker_count,
        ker_stable,
        coker_stable,
        expected,
        residuals: BTreeMap::new(),
    })
}

/// Deterministic random analytic window with entries in the unit box.
pub fn random_analytic_window(rng: &mut ChaCha8Rng, window: usize) -> CoeffWindow {
    let w = window as i64;
    let mut out = CoeffWindow::zeros(-w - 1, w);
    for n in 0..=w {
        out.set(
            n,
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
    }
    out
}

/// Maximum interior residual of `expr` over seeded random analytic windows.
pub fn expr_residual(
    expr: &OperatorExpr,
    n_vectors: usize,
    window: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_vectors {
        let x = random_analytic_window(&mut rng, window);
        let out = apply(expr, &x, window)?;
        worst = worst.max(out.interior_sup_norm());
    }
    Ok(worst)
}

/// Interior residual of a claimed kernel vector under `T(a) + H(b)`.
pub fn kernel_residual(
    a: &RationalSymbol,
    b: &RationalSymbol,
    v: &CoeffWindow,
    window: usize,
) -> Result<f64> {
    let out = apply(&th_operator(a, b), v, window)?;
    Ok(out.interior_sup_norm() / v.sup_norm().max(1.0))
}

/// Two-sided inverse residuals `(‖A·E·x - x‖, ‖E·A·x - x‖)` over seeded
/// random vectors.
pub fn inverse_residuals(
    a: &RationalSymbol,
    b: &RationalSymbol,
    inverse: &OperatorExpr,
    n_vectors: usize,
    window: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let op = th_operator(a, b);
    let right = OperatorExpr::compose(vec![op.clone(), inverse.clone()]);
    let left = OperatorExpr::compose(vec![inverse.clone(), op]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_r: f64 = 0.0;
    let mut worst_l: f64 = 0.0;
    for _ in 0..n_vectors {
        let x = random_analytic_window(&mut rng, window);
        let xa = x.project_analytic();
        let yr = apply(&right, &x, window)?;
        worst_r = worst_r.max(yr.interior_distance(&xa));
        let yl = apply(&left, &x, window)?;
        worst_l = worst_l.max(yl.interior_distance(&xa));
    }
    Ok((worst_r, worst_l))
}

/// Named residual checks for a pair, as a map.
pub fn residual_report(
    a: &RationalSymbol,
    b: &RationalSymbol,
    inverse: Option<&OperatorExpr>,
    kernel: &[CoeffWindow],
    window: usize,
    seed: u64,
) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    let mut worst_kernel: f64 = 0.0;
    for v in kernel {
        worst_kernel = worst_kernel.max(kernel_residual(a, b, v, window)?);
    }
    if !kernel.is_empty() {
        map.insert("kernel_membership".to_string(), worst_kernel);
    }
    if let Some(expr) = inverse {
        let (r, l) = inverse_residuals(a, b, expr, 10, window, seed)?;
        map.insert("inverse_right".to_string(), r);
        map.insert("inverse_left".to_string(), l);
    }
    Ok(map)
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub est_dim_ker: usize,
    pub est_dim_coker: usize,
    pub stable: bool,
    pub sigma_min: f64,
}

/// Run `svd_defects` across truncation sizes.
pub fn convergence_sweep(
    a: Option<&RationalSymbol>,
    b: Option<&RationalSymbol>,
    sizes: &[usize],
    tol: f64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let op = crate::operators::truncate(a, b, n)?;
        let report = svd_defects(&op, None, tol)?;
        rows.push(SweepRow {
            n,
            est_dim_ker: report.est_dim_ker,
            est_dim_coker: report.est_dim_coker,
            stable: report.is_stable(),
            sigma_min: report.singular_values_tail.first().copied().unwrap_or(0.0),
        });
    }
    Ok(rows)
}

/// Check that the defect counts of a sweep have stabilized (the last two
/// stable rows agree).
pub fn sweep_stabilized(rows: &[SweepRow]) -> bool {
    let stable: Vec<&SweepRow> = rows.iter().filter(|r| r.stable).collect();
    if stable.len() < 2 {
        return false;
    }
    let a = stable[stable.len() - 2];
    let b = stable[stable.len() - 1];
    a.est_dim_ker == b.est_dim_ker && a.est_dim_coker == b.est_dim_coker
}

/// Dense matrix-vector residual used by cross-checks: `‖M·x - y‖∞`.
pub fn dense_residual(m: &crate::linalg::CMat, x: &[Complex64], y: &[Complex64]) -> f64 {
    let mx = m.matvec(x);
    mx.iter()
        .zip(y.iter().chain(std::iter::repeat(&ZERO)))
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx::cr;
    use crate::operators::truncate;

    #[test]
    fn identity_has_no_defects() {
        let one = RationalSymbol::one();
        let op = truncate(Some(&one), None, 24).unwrap();
        let r = svd_defects(&op, None, 1e-8).unwrap();
        assert_eq!((r.est_dim_ker, r.est_dim_coker), (0, 0));
        assert!(r.is_stable());
    }

    #[test]
    fn shift_coker_detected() {
        // T(t^2): est_dim_coker = 2, est_dim_ker = 0.
        let t2 = RationalSymbol::monomial(2);
        let op = truncate(Some(&t2), None, 64).unwrap();
        let r = svd_defects(&op, Some(2), 1e-8).unwrap();
        assert_eq!((r.est_dim_ker, r.est_dim_coker), (0, 2));
        assert!(r.is_stable());
        // The square section cannot tell the sides apart: its two smallest
        // singular values vanish regardless.
        assert!(r.singular_values_tail[0] < 1e-12);
        assert!(r.singular_values_tail[1] < 1e-12);
    }

    #[test]
    fn gamma_operator_invertible_across_sizes() {
        let gamma = 0.5;
        let a = RationalSymbol::new(cr(-1.0 / gamma), -1, vec![cr(gamma)], vec![cr(1.0 / gamma)])
            .unwrap();
        let b = a.shifted(-2);
        let rows = convergence_sweep(Some(&a), Some(&b), &[64, 128, 256], 1e-8).unwrap();
        for r in &rows {
            assert_eq!((r.est_dim_ker, r.est_dim_coker), (0, 0), "n={}", r.n);
            assert!(r.stable);
            assert!(r.sigma_min > 1e-4);
        }
        assert!(sweep_stabilized(&rows));
    }

    #[test]
    fn shifted_pair_defects_stable() {
        // (a, a t^2) with a = ã: defects (1, 1) from small sizes on.
        let s3 = 3.0f64.sqrt();
        let a =
            RationalSymbol::new(cr(0.5), -1, vec![cr(-2.0 + s3), cr(-2.0 - s3)], vec![]).unwrap();
        let b = a.shifted(2);
        let rows = convergence_sweep(Some(&a), Some(&b), &[64, 128], 1e-8).unwrap();
        for r in &rows {
            assert_eq!((r.est_dim_ker, r.est_dim_coker), (1, 1), "n={}", r.n);
            assert!(r.stable);
        }
    }

    #[test]
    fn kernel_vector_residual_small() {
        // 1 - t is killed by T(t^{-2}).
        let g = RationalSymbol::monomial(-2);
        let mut v = CoeffWindow::zeros(-65, 64);
        v.set(0, crate::cplx::ONE);
        v.set(1, -crate::cplx::ONE);
        let expr = OperatorExpr::toeplitz(&g);
        let out = apply(&expr, &v, 64).unwrap();
        assert!(out.interior_sup_norm() < 1e-12);
    }

    #[test]
    fn widom_residual_via_oracle() {
        let a = RationalSymbol::new(cr(-2.0), -1, vec![cr(0.5)], vec![cr(2.0)]).unwrap();
        let bsym = RationalSymbol::new(cr(1.0), 1, vec![cr(-0.4)], vec![cr(-2.5)]).unwrap();
        let ab = a.mul(&bsym).unwrap();
        let expr = OperatorExpr::sum(vec![
            OperatorExpr::toeplitz(&ab),
            OperatorExpr::compose(vec![
                OperatorExpr::toeplitz(&a),
                OperatorExpr::toeplitz(&bsym),
            ])
            .scaled(-crate::cplx::ONE),
            OperatorExpr::compose(vec![
                OperatorExpr::hankel(&a),
                OperatorExpr::hankel(&bsym.tilde()),
            ])
            .scaled(-crate::cplx::ONE),
        ]);
        let r = expr_residual(&expr, 5, 128, crate::HARNESS_SEED).unwrap();
        assert!(r < 1e-8, "{r}");
    }
}
