//! Rational symbols on the unit circle.
//!
//! A symbol is kept in zero-pole-gain form `g(t) = gain · t^power ·
//! Π(t - z_i) / Π(t - p_j)` with canonical normalization: zeros/poles at the
//! origin are absorbed into `power`, cancelling zero/pole pairs are removed,
//! multisets are sorted, and no pole may sit on the unit circle. All algebra
//! (products, quotients, involutions, Fourier coefficients, winding numbers)
//! is exact up to floating point on this form.

use crate::cplx::{self, cr, ONE, ZERO};
use crate::error::Error;
use crate::poly::Poly;
use crate::window::CoeffWindow;
use crate::{Result, TAU_CANCEL, TAU_CIRCLE};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Absolute threshold below which a root is treated as the origin and
/// absorbed into the `t^power` factor.
const TAU_ORIGIN: f64 = 1e-12;

/// Relative tolerance used when grouping nearby poles into a multiple pole
/// for partial fractions.
const TAU_CLUSTER: f64 = 1e-7;

/// Default tolerance for canonical-form equality tests.
pub const TAU_EQ: f64 = 1e-9;

/// A rational function on the unit circle in zero-pole-gain form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalSymbol {
    #[serde(with = "crate::cplx")]
    pub gain: Complex64,
    pub power: i64,
    #[serde(with = "crate::cplx::vec")]
    pub zeros: Vec<Complex64>,
    #[serde(with = "crate::cplx::vec")]
    pub poles: Vec<Complex64>,
}

impl fmt::Display for RationalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.6}·t^{}·z{:?}/p{:?}",
            self.gain,
            self.power,
            self.zeros.iter().map(|z| format!("{z:.4}")).collect::<Vec<_>>(),
            self.poles.iter().map(|z| format!("{z:.4}")).collect::<Vec<_>>()
        )
    }
}

/// External symbol description: zero-pole-gain data or a ratio of Laurent
/// polynomials given as coefficient maps keyed by integer degree.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSpec {
    Zpk {
        gain: (f64, f64),
        #[serde(default)]
        power: i64,
        #[serde(default)]
        zeros: Vec<(f64, f64)>,
        #[serde(default)]
        poles: Vec<(f64, f64)>,
    },
    Ratio {
        #[serde(default)]
        num: BTreeMap<String, (f64, f64)>,
        #[serde(default)]
        den: BTreeMap<String, (f64, f64)>,
    },
}

/// Build a canonical symbol from an external description.
///
/// Laurent-ratio inputs are root-solved numerically (companion-matrix
/// eigenvalues); that conversion is the only inexact step.
pub fn make_symbol(spec: &SymbolSpec) -> Result<RationalSymbol> {
    match spec {
        SymbolSpec::Zpk { gain, power, zeros, poles } => RationalSymbol::new(
            Complex64::new(gain.0, gain.1),
            *power,
            zeros.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
            poles.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
        ),
        SymbolSpec::Ratio { num, den } => {
            let (n_shift, n_poly) = laurent_to_poly(num)?;
            let (d_shift, d_poly) = laurent_to_poly(den)?;
            if n_poly.is_zero() {
                return Err(Error::ZeroGain);
            }
            if d_poly.is_zero() {
                return Err(Error::InvalidInput("denominator is identically zero".into()));
            }
            let zeros = n_poly.roots();
            let poles = d_poly.roots();
            let gain = n_poly.leading() / d_poly.leading();
            RationalSymbol::new(gain, n_shift - d_shift, zeros, poles)
        }
    }
}

/// Convert a Laurent coefficient map into `t^shift · poly(t)`.
fn laurent_to_poly(map: &BTreeMap<String, (f64, f64)>) -> Result<(i64, Poly)> {
    if map.is_empty() {
        // Missing side of the ratio means the constant 1.
        return Ok((0, Poly::one()));
    }
    let mut terms: Vec<(i64, Complex64)> = Vec::with_capacity(map.len());
    for (k, &(re, im)) in map {
        let deg: i64 = k
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad Laurent degree key {k:?}")))?;
        terms.push((deg, Complex64::new(re, im)));
    }
    terms.retain(|(_, c)| c.norm() > 0.0);
    if terms.is_empty() {
        return Ok((0, Poly::zero()));
    }
    let lo = terms.iter().map(|(d, _)| *d).min().unwrap();
    let hi = terms.iter().map(|(d, _)| *d).max().unwrap();
    let mut coeffs = vec![ZERO; (hi - lo + 1) as usize];
    for (d, c) in terms {
        coeffs[(d - lo) as usize] += c;
    }
    Ok((lo, Poly::new(coeffs)))
}

impl RationalSymbol {
    /// Canonicalizing constructor.
    pub fn new(
        gain: Complex64,
        power: i64,
        zeros: Vec<Complex64>,
        poles: Vec<Complex64>,
    ) -> Result<Self> {
        if gain.norm() == 0.0 || !gain.is_finite() {
            return Err(Error::ZeroGain);
        }
        let mut power = power;
        let mut zs: Vec<Complex64> = Vec::with_capacity(zeros.len());
        for z in zeros {
            if z.norm() <= TAU_ORIGIN {
                power += 1;
            } else {
                zs.push(z);
            }
        }
        let mut ps: Vec<Complex64> = Vec::with_capacity(poles.len());
        for p in poles {
            if p.norm() <= TAU_ORIGIN {
                power -= 1;
            } else {
                ps.push(p);
            }
        }
        // Cancel zero/pole pairs within tolerance (closest pairs first).
        loop {
            let mut best: Option<(usize, usize, f64)> = None;
            for (i, z) in zs.iter().enumerate() {
                for (j, p) in ps.iter().enumerate() {
                    let d = cplx::dist(*z, *p);
                    if d <= TAU_CANCEL * z.norm().max(1.0)
                        && best.map_or(true, |(_, _, bd)| d < bd)
                    {
                        best = Some((i, j, d));
                    }
                }
            }
            match best {
                Some((i, j, _)) => {
                    zs.swap_remove(i);
                    ps.swap_remove(j);
                }
                None => break,
            }
        }
        for p in &ps {
            if (p.norm() - 1.0).abs() <= TAU_CIRCLE {
                return Err(Error::PoleOnCircle(format!("{p}")));
            }
        }
        cplx::sort_multiset(&mut zs);
        cplx::sort_multiset(&mut ps);
        Ok(RationalSymbol { gain, power, zeros: zs, poles: ps })
    }

    /// The constant symbol `v`.
    pub fn constant(v: Complex64) -> Result<Self> {
        RationalSymbol::new(v, 0, vec![], vec![])
    }

    pub fn one() -> Self {
        RationalSymbol { gain: ONE, power: 0, zeros: vec![], poles: vec![] }
    }

    /// The monomial `t^k`.
    pub fn monomial(k: i64) -> Self {
        RationalSymbol { gain: ONE, power: k, zeros: vec![], poles: vec![] }
    }

    /// `1 - beta·t` as a symbol (a convenience for plus factors).
    pub fn one_minus_beta_t(beta: Complex64) -> Result<Self> {
        if beta.norm() == 0.0 {
            return Ok(RationalSymbol::one());
        }
        // 1 - βt = -β(t - 1/β)
        RationalSymbol::new(-beta, 0, vec![ONE / beta], vec![])
    }

    /// `1 - beta/t` as a symbol (a convenience for minus factors).
    pub fn one_minus_beta_over_t(beta: Complex64) -> Result<Self> {
        if beta.norm() == 0.0 {
            return Ok(RationalSymbol::one());
        }
        // 1 - β/t = (t - β)/t
        RationalSymbol::new(ONE, -1, vec![beta], vec![])
    }

    pub fn degree_complexity(&self) -> usize {
        self.zeros.len() + self.poles.len()
    }

    pub fn mul(&self, other: &RationalSymbol) -> Result<RationalSymbol> {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&other.poles);
        RationalSymbol::new(self.gain * other.gain, self.power + other.power, zeros, poles)
    }

    pub fn inv(&self) -> Result<RationalSymbol> {
        RationalSymbol::new(ONE / self.gain, -self.power, self.poles.clone(), self.zeros.clone())
    }

    pub fn div(&self, other: &RationalSymbol) -> Result<RationalSymbol> {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.poles);
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&other.zeros);
        RationalSymbol::new(self.gain / other.gain, self.power - other.power, zeros, poles)
    }

    pub fn neg(&self) -> RationalSymbol {
        let mut s = self.clone();
        s.gain = -s.gain;
        s
    }

    /// Product of several symbols divided by several others, canonicalized in
    /// a single pass so that circle zeros and poles of the factors may cancel
    /// before the pole-on-circle check runs.
    pub fn product(nums: &[&RationalSymbol], dens: &[&RationalSymbol]) -> Result<RationalSymbol> {
        let mut gain = ONE;
        let mut power = 0i64;
        let mut zeros = Vec::new();
        let mut poles = Vec::new();
        for s in nums {
            gain *= s.gain;
            power += s.power;
            zeros.extend_from_slice(&s.zeros);
            poles.extend_from_slice(&s.poles);
        }
        for s in dens {
            gain /= s.gain;
            power -= s.power;
            zeros.extend_from_slice(&s.poles);
            poles.extend_from_slice(&s.zeros);
        }
        RationalSymbol::new(gain, power, zeros, poles)
    }

    pub fn scale(&self, v: Complex64) -> Result<RationalSymbol> {
        if v.norm() == 0.0 {
            return Err(Error::ZeroGain);
        }
        let mut s = self.clone();
        s.gain *= v;
        Ok(s)
    }

    /// Multiplication by `t^k`.
    pub fn shifted(&self, k: i64) -> RationalSymbol {
        let mut s = self.clone();
        s.power += k;
        s
    }

    /// Coefficient-wise complex conjugation `g*(t) := conj(g(conj(t)))`.
    pub fn conj_coeffs(&self) -> RationalSymbol {
        RationalSymbol {
            gain: self.gain.conj(),
            power: self.power,
            zeros: {
                let mut v: Vec<_> = self.zeros.iter().map(|z| z.conj()).collect();
                cplx::sort_multiset(&mut v);
                v
            },
            poles: {
                let mut v: Vec<_> = self.poles.iter().map(|z| z.conj()).collect();
                cplx::sort_multiset(&mut v);
                v
            },
        }
    }

    /// The involution `g̃(t) := g(1/t)`.
    pub fn tilde(&self) -> RationalSymbol {
        let nz = self.zeros.len() as i64;
        let np = self.poles.len() as i64;
        let mut gain = self.gain;
        for z in &self.zeros {
            gain *= -z;
        }
        for p in &self.poles {
            gain /= -p;
        }
        let mut zeros: Vec<Complex64> = self.zeros.iter().map(|z| ONE / z).collect();
        let mut poles: Vec<Complex64> = self.poles.iter().map(|p| ONE / p).collect();
        cplx::sort_multiset(&mut zeros);
        cplx::sort_multiset(&mut poles);
        RationalSymbol { gain, power: -self.power - nz + np, zeros, poles }
    }

    /// The symbol whose boundary values are `conj(g)` on the unit circle.
    pub fn bar(&self) -> RationalSymbol {
        self.conj_coeffs().tilde()
    }

    /// Involution entry point mirroring the external interface.
    pub fn involution(&self, kind: InvolutionKind) -> RationalSymbol {
        match kind {
            InvolutionKind::Tilde => self.tilde(),
            InvolutionKind::Bar => self.bar(),
        }
    }

    pub fn evaluate(&self, t: Complex64) -> Result<Complex64> {
        for p in &self.poles {
            if cplx::dist(t, *p) <= 1e-13 * t.norm().max(1.0) {
                return Err(Error::EvalAtPole(format!("{t}")));
            }
        }
        let mut acc = self.gain * t.powi(self.power as i32);
        for z in &self.zeros {
            acc *= t - z;
        }
        for p in &self.poles {
            acc /= t - p;
        }
        Ok(acc)
    }

    /// True when no zero or pole lies within `TAU_CIRCLE` of the circle.
    pub fn is_invertible_on_circle(&self) -> bool {
        self.zeros
            .iter()
            .chain(self.poles.iter())
            .all(|z| (z.norm() - 1.0).abs() > TAU_CIRCLE)
    }

    fn check_invertible(&self) -> Result<()> {
        for z in &self.zeros {
            if (z.norm() - 1.0).abs() <= TAU_CIRCLE {
                return Err(Error::ZeroOnCircle(format!("{z}")));
            }
        }
        for p in &self.poles {
            if (p.norm() - 1.0).abs() <= TAU_CIRCLE {
                return Err(Error::PoleOnCircle(format!("{p}")));
            }
        }
        Ok(())
    }

    /// Winding number of `g` around the origin:
    /// `power + #{zeros inside} - #{poles inside}`.
    pub fn winding_number(&self) -> Result<i64> {
        self.check_invertible()?;
        let zin = self.zeros.iter().filter(|z| z.norm() < 1.0).count() as i64;
        let pin = self.poles.iter().filter(|p| p.norm() < 1.0).count() as i64;
        Ok(self.power + zin - pin)
    }

    /// Geometric decay ratio of the Fourier coefficients.
    pub fn decay_ratio(&self) -> f64 {
        let mut r: f64 = 0.0;
        for p in &self.poles {
            let m = p.norm();
            if m < 1.0 {
                r = r.max(m);
            } else {
                r = r.max(1.0 / m);
            }
        }
        r
    }

    /// Exact Fourier coefficients on `lo..=hi` via partial fractions.
    ///
    /// Poles outside the circle contribute one-sided series in nonnegative
    /// powers, poles inside in negative powers; the polynomial part is
    /// finite; multiplicities are handled by differentiated geometric series.
    pub fn fourier_coefficients(&self, lo: i64, hi: i64) -> Result<CoeffWindow> {
        for p in &self.poles {
            if (p.norm() - 1.0).abs() <= TAU_CIRCLE {
                return Err(Error::PoleOnCircle(format!("{p}")));
            }
        }
        let mut w = CoeffWindow::zeros(lo, hi);
        w.decay_ratio = self.decay_ratio();
        let num = Poly::from_roots(&self.zeros).scale(self.gain);
        let den = Poly::from_roots(&self.poles);
        let (q, r) = num.divrem(&den);
        if !q.is_zero() {
            for (j, &c) in q.coeffs.iter().enumerate() {
                let idx = j as i64 + self.power;
                if idx >= lo && idx <= hi {
                    w.set(idx, w.get(idx) + c);
                }
            }
        }
        if !r.is_zero() && !self.poles.is_empty() {
            for (p, members) in cluster_roots(&self.poles) {
                let mult = members.len();
                let others: Vec<Complex64> = self
                    .poles
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !members.contains(i))
                    .map(|(_, q)| *q)
                    .collect();
                let den_rest = Poly::from_roots(&others);
                let num_taylor = r.taylor_at(p, mult - 1);
                let den_taylor = den_rest.taylor_at(p, mult - 1);
                let series = Poly::series_div(&num_taylor, &den_taylor, mult - 1);
                // r/den = Σ_i series[i]·(t-p)^(i-mult) near this pole group.
                for (i, &a) in series.iter().enumerate() {
                    let k = mult - i; // pole order of this term
                    add_pole_term(&mut w, a, p, k as u32, self.power);
                }
            }
        }
        Ok(w)
    }

    /// Canonical-form equality within a relative tolerance.
    pub fn approx_eq(&self, other: &RationalSymbol, tol: f64) -> bool {
        if self.power != other.power {
            return false;
        }
        let gd = (self.gain - other.gain).norm() / self.gain.norm().max(other.gain.norm());
        if gd > tol {
            return false;
        }
        let zd = match cplx::multiset_distance(&self.zeros, &other.zeros) {
            Some(d) => d,
            None => return false,
        };
        let pd = match cplx::multiset_distance(&self.poles, &other.poles) {
            Some(d) => d,
            None => return false,
        };
        let scale = self
            .zeros
            .iter()
            .chain(self.poles.iter())
            .map(|z| z.norm())
            .fold(1.0f64, f64::max);
        zd <= tol * scale && pd <= tol * scale
    }

    pub fn is_one(&self, tol: f64) -> bool {
        self.approx_eq(&RationalSymbol::one(), tol)
    }

    /// Check the matching-function identity `g·g̃ = 1`.
    pub fn is_matching_function(&self, tol: f64) -> bool {
        match self.mul(&self.tilde()) {
            Ok(prod) => prod.is_one(tol),
            Err(_) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvolutionKind {
    Tilde,
    Bar,
}

/// Group roots into (centroid, member indices) clusters.
fn cluster_roots(roots: &[Complex64]) -> Vec<(Complex64, Vec<usize>)> {
    let mut groups: Vec<(Complex64, Vec<usize>)> = Vec::new();
    'outer: for (i, &r) in roots.iter().enumerate() {
        for (rep, members) in groups.iter_mut() {
            if cplx::dist(*rep, r) <= TAU_CLUSTER * rep.norm().max(1.0) {
                let n = members.len() as f64;
                *rep = (*rep * cr(n) + r) / cr(n + 1.0);
                members.push(i);
                continue 'outer;
            }
        }
        groups.push((r, vec![i]));
    }
    groups
}

/// Accumulate the Fourier series of `a/(t-p)^k · t^shift` into the window.
fn add_pole_term(w: &mut CoeffWindow, a: Complex64, p: Complex64, k: u32, shift: i64) {
    if a.norm() == 0.0 {
        return;
    }
    let k = k as i64;
    if p.norm() > 1.0 {
        // a(-1)^k p^{-k} Σ_{n>=0} C(n+k-1, k-1) (t/p)^n, at index n + shift.
        let sign = if k % 2 == 0 { ONE } else { -ONE };
        let mut term = a * sign / p.powi(k as i32);
        let mut n: i64 = 0;
        loop {
            let idx = n + shift;
            if idx > w.hi {
                break;
            }
            if idx >= w.lo {
                w.set(idx, w.get(idx) + term);
            }
            n += 1;
            term = term * cr((n + k - 1) as f64) / cr(n as f64) / p;
        }
    } else {
        // a Σ_{n>=0} C(n+k-1, k-1) p^n t^{-k-n}, at index -k - n + shift.
        let mut term = a;
        let mut n: i64 = 0;
        loop {
            let idx = -k - n + shift;
            if idx < w.lo {
                break;
            }
            if idx <= w.hi {
                w.set(idx, w.get(idx) + term);
            }
            n += 1;
            term = term * cr((n + k - 1) as f64) / cr(n as f64) * p;
        }
    }
}

/// A matching pair `(a, b)` with its subordinated pair `(c, d)`, Toeplitz
/// indices and factorization signatures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchingPairAnalysis {
    pub a: RationalSymbol,
    pub b: RationalSymbol,
    pub c: RationalSymbol,
    pub d: RationalSymbol,
    /// `ind T(c) = -wind(c)`.
    pub kappa1: i64,
    /// `ind T(d) = -wind(d)`.
    pub kappa2: i64,
    pub sigma_c: i64,
    pub sigma_d: i64,
}

/// Verify the matching condition `a·ã = b·b̃` and build the subordinated
/// pair `c = a/b`, `d = a/b̃` with indices and signatures.
pub fn subordinated_pair(a: &RationalSymbol, b: &RationalSymbol) -> Result<MatchingPairAnalysis> {
    for (name, s) in [("a", a), ("b", b)] {
        if !s.is_invertible_on_circle() {
            return Err(Error::SymbolNotInvertibleOnCircle(format!("{name} = {s}")));
        }
    }
    let lhs = a.mul(&a.tilde())?;
    let rhs = b.mul(&b.tilde())?;
    let quot = lhs.div(&rhs)?;
    if !quot.is_one(TAU_EQ) {
        return Err(Error::NotMatching(format!("a·ã / (b·b̃) = {quot}")));
    }
    let c = a.div(b)?;
    let d = a.div(&b.tilde())?;
    let kappa1 = -c.winding_number()?;
    let kappa2 = -d.winding_number()?;
    let fc = crate::factorization::matching_factorization(&c)?;
    let fd = crate::factorization::matching_factorization(&d)?;
    Ok(MatchingPairAnalysis {
        a: a.clone(),
        b: b.clone(),
        c,
        d,
        kappa1,
        kappa2,
        sigma_c: fc.sigma,
        sigma_d: fd.sigma,
    })
}

impl MatchingPairAnalysis {
    /// The pair `(a, -b)` generating `T(a) - H(b)`.
    pub fn minus_pair(&self) -> Result<MatchingPairAnalysis> {
        subordinated_pair(&self.a, &self.b.neg())
    }

    /// The adjoint pair `(ā, b̃-bar)`; its subordinated pair is `(d̄, c̄)`.
    pub fn adjoint_pair(&self) -> Result<MatchingPairAnalysis> {
        let a_star = self.a.bar();
        let b_star = self.b.tilde().bar();
        let adj = subordinated_pair(&a_star, &b_star)?;
        debug_assert!(adj.c.approx_eq(&self.d.bar(), 1e-7));
        debug_assert!(adj.d.approx_eq(&self.c.bar(), 1e-7));
        debug_assert_eq!(adj.sigma_c, self.sigma_d);
        debug_assert_eq!(adj.sigma_d, self.sigma_c);
        Ok(adj)
    }

    /// The shifted pair `(a·t^{-n}, b·t^{n})` used to reach a right-invertible
    /// subordinated operator; its subordinated pair is `(c·t^{-2n}, d)`.
    pub fn shifted_pair(&self, n: i64) -> Result<MatchingPairAnalysis> {
        subordinated_pair(&self.a.shifted(-n), &self.b.shifted(n))
    }
}
