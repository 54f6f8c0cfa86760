//! Fredholm criterion and index for piecewise continuous matching pairs.
//!
//! The inputs are the subordinated function `c` and the reflected function
//! `d̃` (all conditions are stated for `d̃`). The criterion tests the
//! arguments of the one-sided limits at `±1` and of the jump ratios on the
//! upper half-circle against excluded rays depending on the exponent `p`;
//! the index is the winding difference of two closed curves obtained by
//! tracing each function along the upper half-circle and closing jumps and
//! endpoints with circular arcs.

use crate::cplx::{cr, ONE};
use crate::error::Error;
use crate::symbol::RationalSymbol;
use crate::Result;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance for the mod-1 membership tests of the Fredholm conditions.
pub const TAU_ANGLE: f64 = 1e-9;

/// Exact hits below this distance count as plain violations; between this
/// and `TAU_ANGLE` the verdict is flagged borderline.
const TAU_EXACT: f64 = 1e-12;

/// A jump discontinuity at angle `theta`: `left` is the limit from below
/// (clockwise side), `right` from above.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Jump {
    pub theta: f64,
    #[serde(with = "crate::cplx")]
    pub left: Complex64,
    #[serde(with = "crate::cplx")]
    pub right: Complex64,
}

/// Uniformly sampled values on a closed angular grid `[theta_start,
/// theta_end]`; the endpoint samples represent one-sided limits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Segment {
    pub theta_start: f64,
    pub theta_end: f64,
    #[serde(with = "crate::cplx::vec")]
    pub values: Vec<Complex64>,
}

impl Segment {
    fn value_at(&self, theta: f64) -> Complex64 {
        let len = self.theta_end - self.theta_start;
        let n = self.values.len();
        if n == 1 || len <= 0.0 {
            return self.values[0];
        }
        let s = ((theta - self.theta_start) / len).clamp(0.0, 1.0) * (n - 1) as f64;
        let i = (s.floor() as usize).min(n - 2);
        let frac = s - i as f64;
        self.values[i] * cr(1.0 - frac) + self.values[i + 1] * cr(frac)
    }
}

/// A piecewise continuous symbol on the unit circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PCSymbol {
    /// A rational symbol evaluated exactly; continuous on the circle.
    Rational { symbol: RationalSymbol },
    /// Explicit jumps plus sampled smooth parts between them.
    Sampled { jumps: Vec<Jump>, segments: Vec<Segment> },
}

impl PCSymbol {
    pub fn from_rational(symbol: &RationalSymbol) -> Result<Self> {
        if !symbol.is_invertible_on_circle() {
            return Err(Error::SymbolNotInvertibleOnCircle(format!("{symbol}")));
        }
        Ok(PCSymbol::Rational { symbol: symbol.clone() })
    }

    /// Piecewise constant symbol: `arcs[i] = (theta_i, value)` gives the
    /// value on the arc from `theta_i` (inclusive) to the next breakpoint.
    pub fn piecewise_constant(arcs: &[(f64, Complex64)]) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::InvalidInput("no arcs given".into()));
        }
        let mut arcs: Vec<(f64, Complex64)> = arcs.to_vec();
        arcs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let k = arcs.len();
        let mut jumps = Vec::new();
        let mut segments = Vec::new();
        for i in 0..k {
            let (theta, value) = arcs[i];
            if value.norm() == 0.0 {
                return Err(Error::InvalidInput("piecewise constant symbol vanishes".into()));
            }
            let prev = arcs[(i + k - 1) % k].1;
            if (prev - value).norm() > 0.0 {
                jumps.push(Jump { theta, left: prev, right: value });
            }
            let theta_end = if i + 1 < k { arcs[i + 1].0 } else { arcs[0].0 + 2.0 * PI };
            segments.push(Segment { theta_start: theta, theta_end, values: vec![value, value] });
        }
        Ok(PCSymbol::Sampled { jumps, segments })
    }

    /// The classic construction: one value on the open upper half-circle,
    /// another on the lower.
    pub fn upper_lower(upper: Complex64, lower: Complex64) -> Result<Self> {
        PCSymbol::piecewise_constant(&[(0.0, upper), (PI, lower)])
    }

    /// Limit from above (counterclockwise side) at angle `theta`.
    pub fn plus_limit(&self, theta: f64) -> Complex64 {
        match self {
            PCSymbol::Rational { symbol } => eval_angle(symbol, theta),
            PCSymbol::Sampled { jumps, segments } => {
                if let Some(j) = find_jump(jumps, theta) {
                    return j.right;
                }
                sample_at(segments, theta)
            }
        }
    }

    /// Limit from below (clockwise side) at angle `theta`.
    pub fn minus_limit(&self, theta: f64) -> Complex64 {
        match self {
            PCSymbol::Rational { symbol } => eval_angle(symbol, theta),
            PCSymbol::Sampled { jumps, segments } => {
                if let Some(j) = find_jump(jumps, theta) {
                    return j.left;
                }
                sample_at(segments, theta)
            }
        }
    }

    /// Jump points strictly inside the upper half-circle.
    pub fn upper_jumps(&self) -> Vec<Jump> {
        match self {
            PCSymbol::Rational { .. } => Vec::new(),
            PCSymbol::Sampled { jumps, .. } => jumps
                .iter()
                .filter(|j| j.theta > TAU_ANGLE && j.theta < PI - TAU_ANGLE)
                .cloned()
                .collect(),
        }
    }

    /// Continuous value at an angle known not to be a jump point.
    fn value_at(&self, theta: f64) -> Complex64 {
        match self {
            PCSymbol::Rational { symbol } => eval_angle(symbol, theta),
            PCSymbol::Sampled { jumps, segments } => {
                if let Some(j) = find_jump(jumps, theta) {
                    return j.right;
                }
                sample_at(segments, theta)
            }
        }
    }
}

fn eval_angle(symbol: &RationalSymbol, theta: f64) -> Complex64 {
    symbol
        .evaluate(Complex64::new(theta.cos(), theta.sin()))
        .expect("rational PC symbol has no poles on the circle")
}

fn find_jump(jumps: &[Jump], theta: f64) -> Option<&Jump> {
    let norm = |x: f64| x.rem_euclid(2.0 * PI);
    jumps.iter().find(|j| {
        let d = (norm(j.theta) - norm(theta)).abs();
        d < 1e-12 || (2.0 * PI - d) < 1e-12
    })
}

fn sample_at(segments: &[Segment], theta: f64) -> Complex64 {
    let norm = theta.rem_euclid(2.0 * PI);
    for seg in segments {
        for cand in [norm, norm + 2.0 * PI] {
            if cand >= seg.theta_start - 1e-12 && cand <= seg.theta_end + 1e-12 {
                return seg.value_at(cand);
            }
        }
    }
    segments
        .last()
        .map(|s| *s.values.last().unwrap())
        .unwrap_or(ONE)
}

/// Distance of `x - target` to the nearest integer.
fn mod1_distance(x: f64, target: f64) -> f64 {
    let d = (x - target).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// One tested clause of the Fredholm criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClauseCheck {
    pub clause: String,
    /// Normalized argument `arg(·)/2π` under test.
    pub value: f64,
    /// Excluded ray `θ + Z`.
    pub excluded: f64,
    pub violated: bool,
    pub borderline: bool,
}

/// Verdict of the Fredholm criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FredholmVerdict {
    pub fredholm: bool,
    pub borderline: bool,
    pub checks: Vec<ClauseCheck>,
}

impl FredholmVerdict {
    pub fn violated_clauses(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| c.violated)
            .map(|c| c.clause.clone())
            .collect()
    }
}

fn check_clause(clause: &str, z: Complex64, excluded: f64) -> ClauseCheck {
    let value = (z.arg() / (2.0 * PI)).rem_euclid(1.0);
    let dist = mod1_distance(value, excluded);
    ClauseCheck {
        clause: clause.to_string(),
        value,
        excluded: excluded.rem_euclid(1.0),
        violated: dist <= TAU_ANGLE,
        borderline: dist > TAU_EXACT && dist <= TAU_ANGLE,
    }
}

/// The Fredholm criterion for the pair of auxiliary functions `(c, d̃)` on
/// the space with exponent `p`.
pub fn fredholm_conditions(c: &PCSymbol, d_tilde: &PCSymbol, p: f64) -> Result<FredholmVerdict> {
    if p <= 1.0 {
        return Err(Error::InvalidInput(format!("exponent p = {p} must exceed 1")));
    }
    let q = p / (p - 1.0);
    let mut checks = Vec::new();
    checks.push(check_clause(
        "endpoint+1:first",
        c.minus_limit(0.0),
        0.5 + 1.0 / (2.0 * p),
    ));
    checks.push(check_clause(
        "endpoint+1:second",
        d_tilde.minus_limit(0.0),
        0.5 + 1.0 / (2.0 * q),
    ));
    checks.push(check_clause(
        "endpoint-1:first",
        c.minus_limit(PI),
        1.0 / (2.0 * p),
    ));
    checks.push(check_clause(
        "endpoint-1:second",
        d_tilde.minus_limit(PI),
        1.0 / (2.0 * q),
    ));
    for j in c.upper_jumps() {
        checks.push(check_clause(
            &format!("jump:first:theta={:.6}", j.theta),
            j.left / j.right,
            1.0 / p,
        ));
    }
    for j in d_tilde.upper_jumps() {
        checks.push(check_clause(
            &format!("jump:second:theta={:.6}", j.theta),
            j.left / j.right,
            1.0 / q,
        ));
    }
    let fredholm = checks.iter().all(|c| !c.violated);
    let borderline = checks.iter().any(|c| c.borderline);
    Ok(FredholmVerdict { fredholm, borderline, checks })
}

/// Kind of a curve piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Smooth,
    Arc,
}

/// A sampled closed oriented curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosedCurve {
    pub points: Vec<(f64, f64)>,
    pub kinds: Vec<SegmentKind>,
}

impl ClosedCurve {
    fn push(&mut self, z: Complex64, kind: SegmentKind) {
        self.points.push((z.re, z.im));
        self.kinds.push(kind);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cumulative argument at each point (starting from 0).
    pub fn cumulative_args(&self) -> Result<Vec<f64>> {
        let scale = self
            .points
            .iter()
            .map(|(re, im)| re.hypot(*im))
            .fold(0.0f64, f64::max);
        let tau_origin = 1e-9 * scale.max(1e-30);
        let mut out = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        out.push(0.0);
        for k in 1..self.len() {
            let (re0, im0) = self.points[k - 1];
            let (re1, im1) = self.points[k];
            let z0 = Complex64::new(re0, im0);
            let z1 = Complex64::new(re1, im1);
            if z0.norm() <= tau_origin || z1.norm() <= tau_origin {
                return Err(Error::CurveThroughOrigin);
            }
            let inc = (z1 / z0).arg();
            if inc.abs() >= PI - 1e-9 {
                return Err(Error::CurveThroughOrigin);
            }
            acc += inc;
            out.push(acc);
        }
        Ok(out)
    }

    /// Integer winding of the closed curve around the origin.
    pub fn winding(&self) -> Result<i64> {
        if self.len() < 2 {
            return Ok(0);
        }
        let args = self.cumulative_args()?;
        let total = args.last().unwrap() / (2.0 * PI);
        let rounded = total.round();
        if (total - rounded).abs() > 0.05 {
            return Err(Error::InvalidInput(format!(
                "curve does not close to an integer winding (got {total})"
            )));
        }
        Ok(rounded as i64)
    }

    /// CSV dump: `re, im, segment_kind, cumulative_arg`.
    pub fn to_csv(&self) -> Result<String> {
        let args = self.cumulative_args()?;
        let mut s = String::from("re,im,segment_kind,cumulative_arg\n");
        for (((re, im), kind), arg) in self.points.iter().zip(self.kinds.iter()).zip(args.iter()) {
            let k = match kind {
                SegmentKind::Smooth => "smooth",
                SegmentKind::Arc => "arc",
            };
            s.push_str(&format!("{re},{im},{k},{arg}\n"));
        }
        Ok(s)
    }
}

/// Sampling densities of the curve construction.
#[derive(Debug, Clone, Copy)]
pub struct CurveOptions {
    pub samples_smooth: usize,
    pub samples_arc: usize,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions { samples_smooth: 2048, samples_arc: 256 }
    }
}

/// Points on the open arc `{z : arg((z - z1)/(z - z2)) = 2πθ}` from `z1` to
/// `z2`; empty when the endpoints coincide.
pub fn arc_points(z1: Complex64, z2: Complex64, theta: f64, samples: usize) -> Vec<Complex64> {
    assert!(samples >= 2);
    if (z1 - z2).norm() < 1e-14 * (z1.norm() + z2.norm()).max(1.0) {
        return Vec::new();
    }
    let phase = Complex64::new(0.0, 2.0 * PI * theta).exp();
    let span = 14.0f64;
    (0..samples)
        .map(|k| {
            let u = -span + 2.0 * span * (k as f64 + 0.5) / samples as f64;
            let w = phase * cr(u.exp());
            (w * z2 - z1) / (w - ONE)
        })
        .collect()
}

/// The closed index curve of one auxiliary function: trace over the upper
/// half-circle with jump arcs, closed through the point 1 by endpoint arcs.
pub fn index_curve(f: &PCSymbol, exponent: f64, opts: &CurveOptions) -> ClosedCurve {
    let mut curve = ClosedCurve { points: Vec::new(), kinds: Vec::new() };
    let one = ONE;
    curve.push(one, SegmentKind::Smooth);
    let start = f.plus_limit(0.0);
    if (start - one).norm() > TAU_ANGLE {
        for z in arc_points(one, start, 0.5 + 1.0 / (2.0 * exponent), opts.samples_arc) {
            curve.push(z, SegmentKind::Arc);
        }
    }
    curve.push(start, SegmentKind::Smooth);
    // Smooth pieces between interior jumps.
    let mut breakpoints: Vec<f64> = vec![0.0];
    for j in f.upper_jumps() {
        breakpoints.push(j.theta);
    }
    breakpoints.push(PI);
    for w in breakpoints.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if lo > 0.0 {
            // Entering an interior jump at lo: arc from the left limit to the
            // right limit was inserted at the end of the previous piece.
        }
        let n = opts.samples_smooth;
        for k in 1..n {
            let theta = lo + (hi - lo) * k as f64 / n as f64;
            curve.push(f.value_at(theta), SegmentKind::Smooth);
        }
        if hi < PI {
            // Interior jump at hi.
            let left = f.minus_limit(hi);
            let right = f.plus_limit(hi);
            curve.push(left, SegmentKind::Smooth);
            for z in arc_points(left, right, 1.0 / exponent, opts.samples_arc) {
                curve.push(z, SegmentKind::Arc);
            }
            curve.push(right, SegmentKind::Smooth);
        }
    }
    let end = f.minus_limit(PI);
    curve.push(end, SegmentKind::Smooth);
    if (end - one).norm() > TAU_ANGLE {
        for z in arc_points(end, one, 1.0 / (2.0 * exponent), opts.samples_arc) {
            curve.push(z, SegmentKind::Arc);
        }
    }
    curve.push(one, SegmentKind::Smooth);
    curve
}

/// Fredholm index `wind(d̃-curve(q)) - wind(c-curve(p))`.
pub fn be_index(c: &PCSymbol, d_tilde: &PCSymbol, p: f64, opts: &CurveOptions) -> Result<i64> {
    let verdict = fredholm_conditions(c, d_tilde, p)?;
    if !verdict.fredholm {
        return Err(Error::InvalidInput(format!(
            "pair is not Fredholm at p = {p}: {:?}",
            verdict.violated_clauses()
        )));
    }
    let q = p / (p - 1.0);
    let wc = index_curve(c, p, opts).winding()?;
    let wd = index_curve(d_tilde, q, opts).winding()?;
    Ok(wd - wc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx::c;

    #[test]
    fn arc_degenerate_and_segment() {
        assert!(arc_points(ONE, ONE, 0.25, 16).is_empty());
        // θ = 1/2 is the straight segment between the endpoints.
        let pts = arc_points(c(0.0, 0.0), c(1.0, 0.0), 0.5, 64);
        for z in &pts {
            assert!(z.im.abs() < 1e-12);
            assert!(z.re > 0.0 && z.re < 1.0);
        }
    }

    #[test]
    fn arc_satisfies_defining_identity() {
        let z1 = c(0.0, 0.0);
        let z2 = c(1.0, 0.0);
        let theta = 0.25;
        for z in arc_points(z1, z2, theta, 128) {
            let val = ((z - z1) / (z - z2)).arg() / (2.0 * PI);
            assert!(mod1_distance(val, theta) < 1e-10);
        }
    }

    #[test]
    fn iminus_example_conditions() {
        let s = PCSymbol::upper_lower(c(0.0, 1.0), c(0.0, -1.0)).unwrap();
        // c^-(1) = -i: normalized argument 3/4.
        assert!((s.minus_limit(0.0) - c(0.0, -1.0)).norm() < 1e-14);
        let v2 = fredholm_conditions(&s, &s, 2.0).unwrap();
        assert!(!v2.fredholm);
        assert!(v2.checks[0].violated, "first endpoint clause must fire at p=2");
        let v3 = fredholm_conditions(&s, &s, 3.0).unwrap();
        assert!(!v3.checks[0].violated, "first endpoint clause passes at p=3");
    }

    #[test]
    fn continuous_symbols_always_pass() {
        let g = RationalSymbol::monomial(-2);
        let pc = PCSymbol::from_rational(&g).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let v = fredholm_conditions(&pc, &pc, p).unwrap();
            assert!(v.fredholm, "p={p}");
        }
    }

    #[test]
    fn winding_of_shift_curves() {
        // c = t^{-2}: the trace covers the circle once clockwise.
        let pc = PCSymbol::from_rational(&RationalSymbol::monomial(-2)).unwrap();
        let opts = CurveOptions::default();
        let w = index_curve(&pc, 2.0, &opts).winding().unwrap();
        assert_eq!(w, -1);
        let idx = be_index(&pc, &pc, 2.0, &opts).unwrap();
        assert_eq!(idx, 0);
    }

    #[test]
    fn trivial_pair_has_zero_index() {
        let pc = PCSymbol::from_rational(&RationalSymbol::one()).unwrap();
        let opts = CurveOptions::default();
        assert_eq!(be_index(&pc, &pc, 2.0, &opts).unwrap(), 0);
    }

    #[test]
    fn gamma_pair_index_zero_all_p() {
        let gamma = 0.5;
        let a = RationalSymbol::new(cr(-1.0 / gamma), -1, vec![cr(gamma)], vec![cr(1.0 / gamma)])
            .unwrap();
        // c = t², d̃ = ã² t².
        let csym = RationalSymbol::monomial(2);
        let at = a.tilde();
        let dt = at.mul(&at).unwrap().shifted(2);
        let pc_c = PCSymbol::from_rational(&csym).unwrap();
        let pc_d = PCSymbol::from_rational(&dt).unwrap();
        let opts = CurveOptions::default();
        for p in [1.5, 2.0, 3.0] {
            assert_eq!(be_index(&pc_c, &pc_d, p, &opts).unwrap(), 0, "p={p}");
        }
    }

    #[test]
    fn winding_stable_under_refinement() {
        let pc = PCSymbol::upper_lower(c(0.0, 1.0), c(0.0, -1.0)).unwrap();
        let base = CurveOptions::default();
        let fine = CurveOptions {
            samples_smooth: base.samples_smooth * 2,
            samples_arc: base.samples_arc * 2,
        };
        let w1 = index_curve(&pc, 3.0, &base).winding().unwrap();
        let w2 = index_curve(&pc, 3.0, &fine).winding().unwrap();
        assert_eq!(w1, w2);
    }

    #[test]
    fn clause_flips_when_crossing_excluded_ray() {
        // Jump ratio argument just below/above the excluded ray 1/p.
        let p = 2.0;
        for (eps, expect) in [(1e-3, false), (-1e-3, false), (0.0, true)] {
            let angle = 2.0 * PI * (1.0 / p + eps);
            let upper = Complex64::new(angle.cos(), angle.sin());
            // Build a symbol with an interior jump at θ = π/2 whose ratio
            // left/right has the given argument.
            let pc = PCSymbol::piecewise_constant(&[
                (0.0, upper),
                (PI / 2.0, ONE),
                (PI, upper),
            ])
            .unwrap();
            let v = fredholm_conditions(&pc, &PCSymbol::from_rational(&RationalSymbol::one()).unwrap(), p)
                .unwrap();
            let jump_checks: Vec<&ClauseCheck> = v
                .checks
                .iter()
                .filter(|ch| ch.clause.starts_with("jump:first"))
                .collect();
            assert_eq!(jump_checks.len(), 1);
            assert_eq!(jump_checks[0].violated, expect, "eps={eps}");
        }
    }

    #[test]
    fn curve_csv_has_rows() {
        let pc = PCSymbol::from_rational(&RationalSymbol::monomial(1)).unwrap();
        let curve = index_curve(&pc, 2.0, &CurveOptions { samples_smooth: 64, samples_arc: 16 });
        let csv = curve.to_csv().unwrap();
        assert!(csv.lines().count() > 60);
        assert!(csv.starts_with("re,im,segment_kind,cumulative_arg"));
    }
}
