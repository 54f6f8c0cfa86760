//! Wiener-Hopf, signed matching and antisymmetric factorizations of rational
//! symbols.
//!
//! For an invertible rational symbol the Wiener-Hopf factors are read off the
//! zero/pole pattern: roots inside the disk feed the minus factor and the
//! `t`-power, roots outside feed the plus factor. A matching function
//! (`g·g̃ = 1`) then factors as `g = σ·g₊·t^{-n}·g̃₊^{-1}` with signature
//! `σ = g₊(0) = ±1`, and admits an antisymmetric representation
//! `g = p·t^{2·half}·p̃^{-1}` after attaching `(1±t)` weights determined by
//! the parity of the winding and the signature.

use crate::cplx::cr;
use crate::error::Error;
use crate::symbol::{RationalSymbol, TAU_EQ};
use crate::Result;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tolerance for snapping the factorization signature to ±1.
const TAU_SIGMA: f64 = 1e-6;

/// `g = minus · t^index_m · plus` with `minus(∞) = 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WHFactorization {
    pub minus: RationalSymbol,
    pub index_m: i64,
    pub plus: RationalSymbol,
}

/// `g = sigma · plus · t^{-index_n} · tilde(plus)^{-1}` with
/// `sigma = plus(0) = ±1`; `index_n = ind T(g)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchingFactorization {
    pub sigma: i64,
    pub index_n: i64,
    pub plus: RationalSymbol,
}

/// Antisymmetric factorization `g = plus · t^{2·half_index} · tilde(plus)^{-1}`.
///
/// The weighted factor `plus = plus_num / plus_den` may carry a pole at
/// `t = -1` (through `plus_den = 1 + t`), which a standalone
/// [`RationalSymbol`] cannot represent; both parts are stored separately and
/// every use site cancels the weight before constructing symbols.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AntisymFactorization {
    pub plus_num: RationalSymbol,
    pub plus_den: RationalSymbol,
    pub half_index: i64,
}

impl AntisymFactorization {
    pub fn plus_at(&self, t: Complex64) -> Result<Complex64> {
        Ok(self.plus_num.evaluate(t)? / self.plus_den.evaluate(t)?)
    }
}

/// Wiener-Hopf factorization of an invertible rational symbol.
pub fn wiener_hopf(g: &RationalSymbol) -> Result<WHFactorization> {
    for z in &g.zeros {
        if (z.norm() - 1.0).abs() <= crate::TAU_CIRCLE {
            return Err(Error::ZeroOnCircle(format!("{z}")));
        }
    }
    for p in &g.poles {
        if (p.norm() - 1.0).abs() <= crate::TAU_CIRCLE {
            return Err(Error::PoleOnCircle(format!("{p}")));
        }
    }
    let zin: Vec<Complex64> = g.zeros.iter().filter(|z| z.norm() < 1.0).cloned().collect();
    let pin: Vec<Complex64> = g.poles.iter().filter(|p| p.norm() < 1.0).cloned().collect();
    let index_m = g.power + zin.len() as i64 - pin.len() as i64;
    // minus = Π(1 - z/t) / Π(1 - p/t) over the inside roots; minus(∞) = 1.
    let minus = RationalSymbol::new(
        crate::cplx::ONE,
        pin.len() as i64 - zin.len() as i64,
        zin,
        pin,
    )?;
    let chi = RationalSymbol::monomial(index_m);
    let plus = RationalSymbol::product(&[g], &[&minus, &chi])?;
    debug_assert!(plus.power == 0);
    debug_assert!(plus.zeros.iter().chain(plus.poles.iter()).all(|z| z.norm() > 1.0));
    Ok(WHFactorization { minus, index_m, plus })
}

impl WHFactorization {
    /// Reassemble `minus · t^m · plus`.
    pub fn reconstruct(&self) -> Result<RationalSymbol> {
        let chi = RationalSymbol::monomial(self.index_m);
        RationalSymbol::product(&[&self.minus, &chi, &self.plus], &[])
    }
}

/// Signed factorization of a matching function.
pub fn matching_factorization(g: &RationalSymbol) -> Result<MatchingFactorization> {
    if !g.is_matching_function(TAU_EQ) {
        return Err(Error::NotMatchingFunction(format!("{g}")));
    }
    let wh = wiener_hopf(g)?;
    let index_n = -wh.index_m;
    let s = wh.plus.evaluate(crate::cplx::ZERO)?;
    let sigma = if (s - cr(1.0)).norm() <= TAU_SIGMA {
        1i64
    } else if (s + cr(1.0)).norm() <= TAU_SIGMA {
        -1i64
    } else {
        return Err(Error::SignatureNotUnimodular(format!("{s}")));
    };
    // Exact identity g₋ = σ·g̃₊^{-1}.
    let expect_minus = wh.plus.tilde().inv()?.scale(cr(sigma as f64))?;
    if !wh.minus.approx_eq(&expect_minus, 1e-8) {
        return Err(Error::NotMatchingFunction(format!(
            "minus factor {} does not match σ·g̃₊^-1",
            wh.minus
        )));
    }
    Ok(MatchingFactorization { sigma, index_n, plus: wh.plus })
}

impl MatchingFactorization {
    /// Reassemble `σ · plus · t^{-n} · tilde(plus)^{-1}`.
    pub fn reconstruct(&self) -> Result<RationalSymbol> {
        let chi = RationalSymbol::monomial(-self.index_n);
        let tp = self.plus.tilde();
        RationalSymbol::product(&[&self.plus, &chi], &[&tp])?
            .scale(cr(self.sigma as f64))
    }
}

/// Antisymmetric factorization of a matching function with `(1±t)` weights
/// selected by the signature and winding parity; the returned factorization
/// is re-verified symbolically.
pub fn antisymmetric_factorization(g: &RationalSymbol) -> Result<AntisymFactorization> {
    let mf = matching_factorization(g)?;
    let w = -mf.index_n; // winding of g
    let sigma = mf.sigma;
    let one = RationalSymbol::one();
    // 1 - t = -(t - 1); 1 + t = (t + 1)
    let one_minus_t = RationalSymbol::new(-crate::cplx::ONE, 0, vec![crate::cplx::ONE], vec![])?;
    let one_plus_t = RationalSymbol::new(crate::cplx::ONE, 0, vec![cr(-1.0)], vec![])?;
    let even = w.rem_euclid(2) == 0;
    let (num_weight, den_weight, half_index) = match (sigma, even) {
        (1, true) => (one.clone(), one.clone(), w / 2),
        (1, false) => (one.clone(), one_plus_t.clone(), (w + 1) / 2),
        (-1, true) => (one_minus_t.clone(), one_plus_t.clone(), w / 2),
        (-1, false) => (one_minus_t.clone(), one.clone(), (w - 1) / 2),
        _ => unreachable!(),
    };
    let plus_num = RationalSymbol::product(&[&mf.plus, &num_weight], &[])?;
    let plus_den = den_weight;
    let fac = AntisymFactorization { plus_num, plus_den, half_index };
    verify_antisym(g, &fac)?;
    Ok(fac)
}

/// Check the identity and both weight conditions of an antisymmetric
/// factorization.
fn verify_antisym(g: &RationalSymbol, fac: &AntisymFactorization) -> Result<()> {
    // Cross-multiplied identity:
    // plus_num · tilde(plus_den) · t^{2h}  ==  g · plus_den · tilde(plus_num)
    let chi = RationalSymbol::monomial(2 * fac.half_index);
    let tden = fac.plus_den.tilde();
    let tnum = fac.plus_num.tilde();
    let lhs = RationalSymbol::product(&[&fac.plus_num, &tden, &chi], &[])?;
    let rhs = RationalSymbol::product(&[g, &fac.plus_den, &tnum], &[])?;
    if !lhs.approx_eq(&rhs, 1e-8) {
        return Err(Error::FactorizationUnavailable(format!(
            "antisymmetric identity failed: {lhs} vs {rhs}"
        )));
    }
    let one_minus_t = RationalSymbol::new(-crate::cplx::ONE, 0, vec![crate::cplx::ONE], vec![])?;
    let one_plus_t = RationalSymbol::new(crate::cplx::ONE, 0, vec![cr(-1.0)], vec![])?;
    // (1+t)·plus pole-free on the closed disk.
    let w1 = RationalSymbol::product(&[&one_plus_t, &fac.plus_num], &[&fac.plus_den])?;
    // (1-t)·plus^{-1} pole-free on the closed disk.
    let w2 = RationalSymbol::product(&[&one_minus_t, &fac.plus_den], &[&fac.plus_num])?;
    for (name, s) in [("(1+t)·plus", &w1), ("(1-t)·plus^-1", &w2)] {
        if !s.poles.iter().all(|p| p.norm() > 1.0) {
            return Err(Error::FactorizationUnavailable(format!(
                "weight condition violated for {name}: {s}"
            )));
        }
    }
    // Deterministic normalization: plus(0) is real with argument 0 or π.
    let v = fac.plus_at(crate::cplx::ZERO)?;
    if (v - cr(1.0)).norm() > TAU_SIGMA && (v + cr(1.0)).norm() > TAU_SIGMA {
        return Err(Error::FactorizationUnavailable(format!(
            "plus(0) = {v} is not ±1"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx::{c, ONE};

    fn gamma_symbol(gamma: f64) -> RationalSymbol {
        RationalSymbol::new(cr(-1.0 / gamma), -1, vec![cr(gamma)], vec![cr(1.0 / gamma)]).unwrap()
    }

    #[test]
    fn wiener_hopf_gamma_example() {
        let a = gamma_symbol(0.5);
        let wh = wiener_hopf(&a).unwrap();
        assert_eq!(wh.index_m, 0);
        // minus = 1 - 0.5/t = (t - 0.5)/t
        let minus_expect =
            RationalSymbol::new(ONE, -1, vec![cr(0.5)], vec![]).unwrap();
        assert!(wh.minus.approx_eq(&minus_expect, 1e-12), "{}", wh.minus);
        // plus = (1 - 0.5t)^{-1}
        let plus_expect = RationalSymbol::one_minus_beta_t(cr(0.5)).unwrap().inv().unwrap();
        assert!(wh.plus.approx_eq(&plus_expect, 1e-12), "{}", wh.plus);
        assert!(wh.reconstruct().unwrap().approx_eq(&a, 1e-12));
    }

    #[test]
    fn wiener_hopf_monomial() {
        let wh = wiener_hopf(&RationalSymbol::monomial(-2)).unwrap();
        assert!(wh.minus.is_one(0.0));
        assert_eq!(wh.index_m, -2);
        assert!(wh.plus.is_one(0.0));
    }

    #[test]
    fn wiener_hopf_gamma_d() {
        let a = gamma_symbol(0.5);
        let d = a.mul(&a).unwrap().shifted(-2);
        let wh = wiener_hopf(&d).unwrap();
        assert_eq!(wh.index_m, -2);
        let f = RationalSymbol::one_minus_beta_t(cr(0.5)).unwrap();
        let plus_expect = f.mul(&f).unwrap().inv().unwrap();
        assert!(wh.plus.approx_eq(&plus_expect, 1e-12));
        let minus_expect = {
            let m = RationalSymbol::one_minus_beta_over_t(cr(0.5)).unwrap();
            m.mul(&m).unwrap()
        };
        assert!(wh.minus.approx_eq(&minus_expect, 1e-12));
    }

    #[test]
    fn matching_factorization_constants() {
        let f = matching_factorization(&RationalSymbol::one()).unwrap();
        assert_eq!((f.sigma, f.index_n), (1, 0));
        assert!(f.plus.is_one(0.0));

        let neg = RationalSymbol::constant(cr(-1.0)).unwrap();
        let f = matching_factorization(&neg).unwrap();
        assert_eq!((f.sigma, f.index_n), (-1, 0));
        assert!((f.plus.evaluate(crate::cplx::ZERO).unwrap() + ONE).norm() < 1e-12);
    }

    #[test]
    fn matching_factorization_gamma_d() {
        let a = gamma_symbol(0.5);
        let d = a.mul(&a).unwrap().shifted(-2);
        let f = matching_factorization(&d).unwrap();
        assert_eq!((f.sigma, f.index_n), (1, 2));
        let fbeta = RationalSymbol::one_minus_beta_t(cr(0.5)).unwrap();
        let plus_expect = fbeta.mul(&fbeta).unwrap().inv().unwrap();
        assert!(f.plus.approx_eq(&plus_expect, 1e-12));
        assert!(f.reconstruct().unwrap().approx_eq(&d, 1e-12));
    }

    #[test]
    fn matching_factorization_rejects_non_matching() {
        let s = RationalSymbol::one_minus_beta_t(cr(0.5)).unwrap();
        assert!(matches!(
            matching_factorization(&s),
            Err(Error::NotMatchingFunction(_))
        ));
    }

    #[test]
    fn sigma_flips_under_negation() {
        let a = gamma_symbol(0.7);
        let d = a.div(&a.tilde()).unwrap(); // matching, index 0
        let f1 = matching_factorization(&d).unwrap();
        let f2 = matching_factorization(&d.neg()).unwrap();
        assert_eq!(f1.sigma, -f2.sigma);
    }

    #[test]
    fn sigma_equals_value_at_one_when_invertible() {
        // For matching g continuous at 1 with ind T(g) = 0: σ(g) = g(1).
        let a = gamma_symbol(0.4);
        let g = a.div(&a.tilde()).unwrap();
        let f = matching_factorization(&g).unwrap();
        assert_eq!(f.index_n, 0);
        let v = g.evaluate(ONE).unwrap();
        assert!((v - cr(f.sigma as f64)).norm() < 1e-9);
    }

    #[test]
    fn antisym_t_squared() {
        let fac = antisymmetric_factorization(&RationalSymbol::monomial(2)).unwrap();
        assert_eq!(fac.half_index, 1);
        assert!(fac.plus_num.is_one(0.0));
        assert!(fac.plus_den.is_one(0.0));
    }

    #[test]
    fn antisym_t_inverse() {
        // σ = 1, odd winding -1: plus = 1/(1+t), half = 0.
        let fac = antisymmetric_factorization(&RationalSymbol::monomial(-1)).unwrap();
        assert_eq!(fac.half_index, 0);
        assert!(fac.plus_num.is_one(0.0));
        assert_eq!(fac.plus_den.zeros.len(), 1);
        assert!((fac.plus_den.zeros[0] + ONE).norm() < 1e-12);
    }

    #[test]
    fn antisym_minus_one() {
        // σ = -1, even winding: plus = -(1-t)/(1+t), half = 0.
        let neg = RationalSymbol::constant(cr(-1.0)).unwrap();
        let fac = antisymmetric_factorization(&neg).unwrap();
        assert_eq!(fac.half_index, 0);
        let v = fac.plus_at(crate::cplx::ZERO).unwrap();
        assert!((v + ONE).norm() < 1e-12);
    }

    #[test]
    fn antisym_sigma_minus_one_odd() {
        // g = -t: σ = -1, w = 1 odd → plus = -(1-t), half = 0.
        let g = RationalSymbol::new(cr(-1.0), 1, vec![], vec![]).unwrap();
        let fac = antisymmetric_factorization(&g).unwrap();
        assert_eq!(fac.half_index, 0);
        assert!(fac.plus_den.is_one(0.0));
        assert_eq!(fac.plus_num.zeros.len(), 1);
    }

    #[test]
    fn antisym_gamma_pair_factors() {
        // c = t^2 and d̃ = ã²t² of the γ-example both have half index 1.
        let a = gamma_symbol(0.5);
        let c = RationalSymbol::monomial(2);
        let d = a.mul(&a).unwrap().shifted(-2);
        let fc = antisymmetric_factorization(&c).unwrap();
        let fd = antisymmetric_factorization(&d.tilde()).unwrap();
        assert_eq!(fc.half_index, 1);
        assert_eq!(fd.half_index, 1);
    }

    #[test]
    fn plus_power_is_zero_even_with_origin_pole() {
        // Symbol with a pole at the origin: a = (t-2)/t.
        let s = RationalSymbol::new(ONE, -1, vec![cr(2.0)], vec![]).unwrap();
        let wh = wiener_hopf(&s).unwrap();
        assert!(wh.reconstruct().unwrap().approx_eq(&s, 1e-12));
        assert_eq!(wh.index_m, -1);
    }

    #[test]
    fn complex_roots_roundtrip() {
        let g = RationalSymbol::new(
            c(1.5, 0.5),
            1,
            vec![c(0.3, 0.4), c(-1.8, 0.9)],
            vec![c(0.1, -0.6), c(2.5, 0.0)],
        )
        .unwrap();
        let wh = wiener_hopf(&g).unwrap();
        assert!(wh.reconstruct().unwrap().approx_eq(&g, 1e-12));
        assert!(wh.minus.evaluate(cr(1e9)).unwrap().norm() - 1.0 < 1e-6);
    }
}
