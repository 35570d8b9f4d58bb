use rustc_hash::FxHashMap as HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

/// Snaps real numbers onto canonical representatives.
///
/// Two values within `tolerance` of each other resolve to the same stored
/// representative, so node hashing can work on exact bit patterns while
/// equality stays tolerance-based. Anything within `tolerance` of zero
/// becomes `0.0`.
///
/// Representatives are more than `tolerance` apart and buckets are exactly
/// `tolerance` wide, so a bucket never holds more than one of them.
#[derive(Debug, Clone)]
pub(crate) struct ComplexTable {
    tolerance: f64,
    inv_tolerance: f64,
    buckets: HashMap<i64, f64>,
}

impl ComplexTable {
    pub(crate) fn new(tolerance: f64) -> Self {
        let mut table = ComplexTable {
            tolerance,
            inv_tolerance: 1.0 / tolerance,
            buckets: HashMap::default(),
        };
        for v in [1.0, 0.5, FRAC_1_SQRT_2] {
            table.insert_exact(v);
            table.insert_exact(-v);
        }
        table
    }

    pub(crate) fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn key(&self, x: f64) -> i64 {
        let q = x * self.inv_tolerance;
        let k = q as i64;
        if (k as f64) > q {
            k.saturating_sub(1)
        } else {
            k
        }
    }

    pub(crate) fn lookup(&mut self, x: f64) -> f64 {
        if x.abs() <= self.tolerance {
            return 0.0;
        }
        let key = self.key(x);
        let mut best: Option<(f64, f64)> = None;
        for k in [key, key.saturating_sub(1), key.saturating_add(1)] {
            if let Some(&v) = self.buckets.get(&k) {
                let d = (v - x).abs();
                if d == 0.0 {
                    return v;
                }
                if d <= self.tolerance && best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, v));
                }
            }
        }
        match best {
            Some((_, v)) => v,
            None => {
                self.buckets.insert(key, x);
                x
            }
        }
    }

    /// Stores `x` as its own representative without snapping, unless its
    /// bucket is already taken.
    pub(crate) fn insert_exact(&mut self, x: f64) {
        if x != 0.0 {
            let key = self.key(x);
            self.buckets.entry(key).or_insert(x);
        }
    }

    pub(crate) fn snap(&mut self, z: Complex64) -> Complex64 {
        Complex64::new(self.lookup(z.re), self.lookup(z.im))
    }

    pub(crate) fn len(&self) -> usize {
        self.buckets.len()
    }

    pub(crate) fn reset(&mut self) {
        *self = ComplexTable::new(self.tolerance);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearby_values_share_a_representative() {
        let mut t = ComplexTable::new(1e-10);
        let a = t.lookup(0.123456789);
        let b = t.lookup(0.123456789 + 4e-11);
        assert_eq!(a.to_bits(), b.to_bits());
        let c = t.lookup(0.123456789 + 5e-10);
        assert_ne!(a, c);
    }

    #[test]
    fn tiny_values_become_exact_zero() {
        let mut t = ComplexTable::new(1e-10);
        assert_eq!(t.lookup(-3e-11).to_bits(), 0.0f64.to_bits());
        let z = t.snap(Complex64::new(-0.0, 1e-12));
        assert_eq!(z.re.to_bits(), 0.0f64.to_bits());
        assert_eq!(z.im.to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn preloaded_constants_are_exact() {
        let mut t = ComplexTable::new(1e-10);
        let s = (0.5f64).sqrt();
        assert_eq!(t.lookup(s * (1.0 + 1e-15)), FRAC_1_SQRT_2);
        assert_eq!(t.lookup(1.0 - 1e-14), 1.0);
    }

    #[test]
    fn huge_values_do_not_overflow_bucket_keys() {
        let mut t = ComplexTable::new(1e-10);
        for x in [1e30, -1e30, f64::MAX, f64::MIN] {
            assert_eq!(t.lookup(x), x);
            assert_eq!(t.lookup(x), x);
        }
    }
}
