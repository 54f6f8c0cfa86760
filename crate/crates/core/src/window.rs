//! Two-sided coefficient windows.
//!
//! A [`CoeffWindow`] holds Fourier coefficients for indices `lo..=hi`.
//! Operator expressions evaluate over such windows; results are trusted on
//! the interior sub-window (truncated convolutions pollute the edges).

use crate::cplx::ZERO;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense complex coefficients for indices `lo..=hi`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffWindow {
    pub lo: i64,
    pub hi: i64,
    #[serde(with = "crate::cplx::vec")]
    pub coeffs: Vec<Complex64>,
    /// Geometric tail-decay ratio documented by the producer (0 for finitely
    /// supported data).
    pub decay_ratio: f64,
    /// Estimated truncation error on the interior sub-window, filled in by
    /// expression evaluation.
    #[serde(default)]
    pub tail_bound: f64,
}

impl CoeffWindow {
    pub fn new(lo: i64, hi: i64, coeffs: Vec<Complex64>, decay_ratio: f64) -> Self {
        assert!(hi >= lo, "window must satisfy hi >= lo");
        assert_eq!(coeffs.len(), (hi - lo + 1) as usize);
        CoeffWindow { lo, hi, coeffs, decay_ratio, tail_bound: 0.0 }
    }

    pub fn zeros(lo: i64, hi: i64) -> Self {
        CoeffWindow::new(lo, hi, vec![ZERO; (hi - lo + 1) as usize], 0.0)
    }

    /// Window holding a single unit coefficient at index `n`.
    pub fn delta(n: i64, lo: i64, hi: i64) -> Self {
        let mut w = CoeffWindow::zeros(lo, hi);
        w.set(n, crate::cplx::ONE);
        w
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    #[inline]
    pub fn get(&self, n: i64) -> Complex64 {
        if n < self.lo || n > self.hi {
            ZERO
        } else {
            self.coeffs[(n - self.lo) as usize]
        }
    }

    #[inline]
    pub fn set(&mut self, n: i64, v: Complex64) {
        if n >= self.lo && n <= self.hi {
            self.coeffs[(n - self.lo) as usize] = v;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, &v)| (self.lo + i as i64, v))
    }

    /// Copy into a (possibly different) index range.
    pub fn resized(&self, lo: i64, hi: i64) -> CoeffWindow {
        let mut out = CoeffWindow::zeros(lo, hi);
        for n in lo.max(self.lo)..=hi.min(self.hi) {
            out.set(n, self.get(n));
        }
        out.decay_ratio = self.decay_ratio;
        out
    }

    pub fn scale(&self, s: Complex64) -> CoeffWindow {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn add(&self, other: &CoeffWindow) -> CoeffWindow {
        let lo = self.lo.min(other.lo);
        let hi = self.hi.max(other.hi);
        let mut out = CoeffWindow::zeros(lo, hi);
        for n in lo..=hi {
            out.set(n, self.get(n) + other.get(n));
        }
        out.decay_ratio = self.decay_ratio.max(other.decay_ratio);
        out
    }

    /// Keep coefficients with index >= 0 (Riesz projection).
    pub fn project_analytic(&self) -> CoeffWindow {
        let mut out = self.clone();
        for n in out.lo..=out.hi.min(-1) {
            out.set(n, ZERO);
        }
        out
    }

    /// Keep coefficients with index <= -1.
    pub fn project_coanalytic(&self) -> CoeffWindow {
        let mut out = self.clone();
        for n in out.lo.max(0)..=out.hi {
            out.set(n, ZERO);
        }
        out
    }

    /// Flip `n -> -n-1` (the coefficient action of `f(t) -> t^{-1} f(1/t)`).
    pub fn flip(&self) -> CoeffWindow {
        let lo = -self.hi - 1;
        let hi = -self.lo - 1;
        let mut out = CoeffWindow::zeros(lo, hi);
        for (n, v) in self.iter() {
            out.set(-n - 1, v);
        }
        out.decay_ratio = self.decay_ratio;
        out
    }

    /// Shift indices by `m` (multiplication by `t^m`).
    pub fn shift(&self, m: i64) -> CoeffWindow {
        CoeffWindow {
            lo: self.lo + m,
            hi: self.hi + m,
            coeffs: self.coeffs.clone(),
            decay_ratio: self.decay_ratio,
            tail_bound: self.tail_bound,
        }
    }

    /// Sup norm over all held coefficients.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sup norm over the interior sub-window `[lo/2, hi/2]`.
    pub fn interior_sup_norm(&self) -> f64 {
        let lo = self.lo / 2;
        let hi = self.hi / 2;
        (lo..=hi).map(|n| self.get(n).norm()).fold(0.0, f64::max)
    }

    /// Maximum difference with another window on the intersection of their
    /// interiors.
    pub fn interior_distance(&self, other: &CoeffWindow) -> f64 {
        let lo = (self.lo / 2).max(other.lo / 2);
        let hi = (self.hi / 2).min(other.hi / 2);
        (lo..=hi)
            .map(|n| (self.get(n) - other.get(n)).norm())
            .fold(0.0, f64::max)
    }

    /// Truncated convolution with another window, evaluated on `lo..=hi`.
    pub fn convolve(&self, kernel: &CoeffWindow, lo: i64, hi: i64) -> CoeffWindow {
        let mut out = CoeffWindow::zeros(lo, hi);
        for n in lo..=hi {
            let mut acc = ZERO;
            let k_lo = kernel.lo.max(n - self.hi);
            let k_hi = kernel.hi.min(n - self.lo);
            for k in k_lo..=k_hi {
                let kv = kernel.coeffs[(k - kernel.lo) as usize];
                if kv.re == 0.0 && kv.im == 0.0 {
                    continue;
                }
                acc += kv * self.coeffs[(n - k - self.lo) as usize];
            }
            out.set(n, acc);
        }
        out.decay_ratio = self.decay_ratio.max(kernel.decay_ratio);
        out
    }

    /// L2 inner product (conjugate-linear in `self`).
    pub fn dot(&self, other: &CoeffWindow) -> Complex64 {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        let mut acc = ZERO;
        for n in lo..=hi {
            acc += self.get(n).conj() * other.get(n);
        }
        acc
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}
