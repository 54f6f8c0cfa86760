//! Dense complex polynomials in one variable.
//!
//! Coefficients are stored lowest degree first. This module is internal
//! support for rational-symbol arithmetic: building polynomials from roots,
//! long division, Taylor shifts and truncated power-series division for
//! partial fractions, and root extraction via companion-matrix eigenvalues.

use crate::cplx::{cr, ONE, ZERO};
use crate::linalg;
use num_complex::Complex64;

/// Dense polynomial, coefficients lowest degree first, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![ZERO] }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![ONE] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    /// Monic product of `(t - r)` over the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![ONE];
        for &r in roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= r * c;
            }
            coeffs = next;
        }
        Poly::new(coeffs)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Self {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Long division: `self = q·div + r` with `deg r < deg div`.
    pub fn divrem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        if self.degree() < div.degree() || self.is_zero() {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dd = div.degree();
        let lead = div.leading();
        let mut quot = vec![ZERO; self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            if q.norm() != 0.0 {
                for (i, &dc) in div.coeffs.iter().enumerate() {
                    rem[k + i] -= q * dc;
                }
            }
        }
        rem.truncate(dd.max(1));
        (Poly::new(quot), Poly::new(rem))
    }

    /// Taylor coefficients of `self` about `t = p`, i.e. coefficients of
    /// `self(p + s)` in powers of `s`, up to order `order` inclusive.
    pub fn taylor_at(&self, p: Complex64, order: usize) -> Vec<Complex64> {
        // Repeated synthetic division by (t - p).
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(order + 1);
        for _ in 0..=order {
            if work.is_empty() {
                out.push(ZERO);
                continue;
            }
            // Horner: divide work by (t - p); remainder is the next Taylor coeff.
            let mut acc = ZERO;
            for c in work.iter_mut().rev() {
                acc = acc * p + *c;
                *c = acc;
            }
            // After the pass, work[0] holds the remainder and work[1..] the quotient.
            out.push(work[0]);
            work.remove(0);
        }
        out
    }

    /// Truncated power-series quotient `num/den` to `order` terms, where the
    /// inputs are Taylor coefficient lists with `den[0] != 0`.
    pub fn series_div(num: &[Complex64], den: &[Complex64], order: usize) -> Vec<Complex64> {
        assert!(den[0].norm() > 0.0, "series division by zero constant term");
        let mut out = vec![ZERO; order + 1];
        for k in 0..=order {
            let mut acc = if k < num.len() { num[k] } else { ZERO };
            for j in 1..=k {
                if j < den.len() {
                    acc -= den[j] * out[k - j];
                }
            }
            out[k] = acc / den[0];
        }
        out
    }

    /// All complex roots, via eigenvalues of the companion matrix, polished
    /// with a few Newton steps.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        // Companion matrix (upper Hessenberg): subdiagonal ones, last column
        // holds the negated monic coefficients.
        let mut h = linalg::CMat::zeros(n, n);
        for i in 1..n {
            *h.at_mut(i, i - 1) = ONE;
        }
        for i in 0..n {
            *h.at_mut(i, n - 1) = -monic[i];
        }
        let mut roots = linalg::hessenberg_eigenvalues(h);
        // Newton polish (guards against QR residue; harmless for exact roots).
        let deriv: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * cr(i as f64))
            .collect();
        let dpoly = Poly::new(deriv);
        for r in roots.iter_mut() {
            for _ in 0..3 {
                let f = self.eval(*r);
                let df = dpoly.eval(*r);
                if df.norm() > 1e-30 {
                    let step = f / df;
                    if step.norm() < 0.5 * (1.0 + r.norm()) {
                        *r -= step;
                    }
                }
            }
        }
        roots
    }
}
