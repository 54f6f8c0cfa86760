//! Small complex-number helpers and the `[re, im]` JSON representation.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Shorthand constructor.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real constant as a complex number.
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex numbers serialize as `[re, im]` pairs.
pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    (z.re, z.im).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let (re, im) = <(f64, f64)>::deserialize(d)?;
    Ok(Complex64::new(re, im))
}

/// `Vec<Complex64>` as a list of `[re, im]` pairs.
pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(f64, f64)> = v.iter().map(|z| (z.re, z.im)).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<(f64, f64)>::deserialize(d)?;
        Ok(pairs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
    }
}

/// `Option<Complex64>` as `null` or `[re, im]`.
pub mod opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|z| (z.re, z.im)).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
        let pair = Option::<(f64, f64)>::deserialize(d)?;
        Ok(pair.map(|(re, im)| Complex64::new(re, im)))
    }
}

/// Maximum absolute difference between two complex numbers.
pub fn dist(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm()
}

/// Deterministic ordering key: modulus first, then argument, then re/im.
pub fn order_key(z: &Complex64) -> (f64, f64) {
    (z.norm(), z.arg())
}

/// Sort a multiset of complex numbers by (modulus, argument).
pub fn sort_multiset(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        let ka = order_key(a);
        let kb = order_key(b);
        ka.0.partial_cmp(&kb.0)
            .unwrap()
            .then(ka.1.partial_cmp(&kb.1).unwrap())
            .then(a.re.partial_cmp(&b.re).unwrap())
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

/// Greedy nearest-neighbour matching of two complex multisets.
///
/// Returns the largest pairing distance, or `None` when lengths differ.
pub fn multiset_distance(xs: &[Complex64], ys: &[Complex64]) -> Option<f64> {
    if xs.len() != ys.len() {
        return None;
    }
    let mut remaining: Vec<Complex64> = ys.to_vec();
    let mut worst = 0.0f64;
    for &x in xs {
        let (idx, d) = remaining
            .iter()
            .enumerate()
            .map(|(i, y)| (i, dist(x, *y)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
        worst = worst.max(d);
        remaining.swap_remove(idx);
    }
    Some(worst)
}
