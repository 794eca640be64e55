//! Birthday-bound collision estimate.

/// `k` values drawn from a space of `n` equally likely outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionModel {
    pub k: u64,
    pub n: f64,
}

impl CollisionModel {
    /// `n` must be at least 1.
    pub fn new(k: u64, n: f64) -> Self {
        assert!(n >= 1.0, "output space must hold at least one value");
        CollisionModel { k, n }
    }

    /// Output space of a `bits`-bit hash.
    pub fn for_bits(k: u64, bits: u32) -> Self {
        Self::new(k, 2f64.powi(bits as i32))
    }
}

/// `1 - exp(-k(k-1) / 2N)`, clamped to `[0, 1]`.
pub fn collision_probability(model: CollisionModel) -> f64 {
    let k = model.k as f64;
    let x = k * (k - 1.0) / (2.0 * model.n);
    (-(-x).exp_m1()).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `1 - prod_{i<k} (1 - i/N)`.
    fn exact(k: u64, n: u64) -> f64 {
        let mut p_unique = 1.0;
        for i in 0..k {
            p_unique *= 1.0 - i as f64 / n as f64;
        }
        1.0 - p_unique
    }

    #[test]
    fn single_value_never_collides() {
        for n in [1.0, 2.0, 365.0, 2f64.powi(128)] {
            assert_eq!(collision_probability(CollisionModel::new(1, n)), 0.0);
            assert_eq!(collision_probability(CollisionModel::new(0, n)), 0.0);
        }
    }

    #[test]
    fn two_values_two_outputs() {
        let p = collision_probability(CollisionModel::new(2, 2.0));
        assert!((p - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert!((p - 0.39347).abs() < 1e-5);
    }

    #[test]
    fn classic_birthday() {
        let approx = collision_probability(CollisionModel::new(23, 365.0));
        let truth = exact(23, 365);
        assert!((truth - 0.5073).abs() < 1e-4);
        assert!((approx - 0.4999).abs() < 1e-3);
        assert!((approx - truth).abs() < 0.01);
    }

    #[test]
    fn tiny_probabilities_stay_accurate() {
        let p = collision_probability(CollisionModel::for_bits(1 << 20, 128));
        let want = (1u64 << 20) as f64 * ((1u64 << 20) - 1) as f64 / 2f64.powi(129);
        assert!((p / want - 1.0).abs() < 1e-9);
    }

    #[test]
    fn monotone() {
        for bits in [8, 16] {
            let mut prev = 0.0;
            for k in 1..=100 {
                let p = collision_probability(CollisionModel::for_bits(k, bits));
                assert!(p >= prev);
                prev = p;
            }
        }
        for k in [2, 10, 100] {
            let small = collision_probability(CollisionModel::for_bits(k, 8));
            let large = collision_probability(CollisionModel::for_bits(k, 16));
            assert!(small >= large);
        }
    }
}
