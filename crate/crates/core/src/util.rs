//! Small numeric and hashing helpers shared across modules.

/// Division that returns 0 when the denominator is (near) zero, keeping
/// features and ratios bounded without sentinel values.
pub fn safe_div(num: f64, den: f64) -> f64 {
    if den.abs() < 1e-10 {
        0.0
    } else {
        num / den
    }
}

/// Mean, population standard deviation, min, and max of a slice.
/// Empty slices yield all zeros.
pub fn stats(values: &[f64]) -> (f64, f64, f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0, 0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    (mean, var.max(0.0).sqrt(), min, max)
}

/// FNV-1a 64-bit hash, used for stable schema fingerprints.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Hex-encoded FNV-1a 64-bit hash of a string.
pub fn fnv_hex(text: &str) -> String {
    format!("{:016x}", fnv1a64(text.as_bytes()))
}

/// Total-order wrapper so f64 keys can live in heaps and sorts.
/// Inputs are expected to be non-NaN; NaN sorts last under `total_cmp`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_degrees() {
        let (mean, std, min, max) = stats(&[2.0, 4.0]);
        assert_eq!(mean, 3.0);
        assert_eq!(std, 1.0);
        assert_eq!(min, 2.0);
        assert_eq!(max, 4.0);
    }

    #[test]
    fn stats_empty_is_zero() {
        assert_eq!(stats(&[]), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn safe_div_guards_zero() {
        assert_eq!(safe_div(1.0, 0.0), 0.0);
        assert_eq!(safe_div(1.0, 1e-12), 0.0);
        assert_eq!(safe_div(6.0, 2.0), 3.0);
    }

    #[test]
    fn fnv_is_stable() {
        assert_eq!(fnv_hex("abc"), fnv_hex("abc"));
        assert_ne!(fnv_hex("abc"), fnv_hex("abd"));
    }
}
