use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Adds seeded i.i.d. N(0, stddev²) noise to every entry and clamps the
/// result at zero.
pub fn add_gaussian_noise(x: &Matrix, stddev: f64, seed: u64) -> Result<Matrix> {
    if !(stddev >= 0.0 && stddev.is_finite()) {
        return Err(Error::Config(format!("noise stddev {stddev} must be finite and >= 0")));
    }
    if stddev == 0.0 {
        return Ok(x.clone());
    }
    let normal = Normal::new(0.0, stddev).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = x.clone();
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            let v = x.get(i, j) + normal.sample(&mut rng);
            out.set(i, j, v.max(0.0));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stddev_is_identity() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [0.0, 3.5]]);
        assert_eq!(add_gaussian_noise(&x, 0.0, 9).unwrap(), x);
    }

    #[test]
    fn noise_is_centered() {
        // Far from zero so the clamp never engages.
        let x = Matrix::filled(100, 100, 1000.0);
        let out = add_gaussian_noise(&x, 1.0, 17).unwrap();
        let mean_noise = out.sub(&x).unwrap().mean();
        assert!(mean_noise.abs() < 3.0 / (100.0f64 * 100.0).sqrt(), "{mean_noise}");
    }

    #[test]
    fn output_is_nonnegative_and_seeded() {
        let x = Matrix::filled(20, 20, 0.1);
        let a = add_gaussian_noise(&x, 2.0, 3).unwrap();
        assert!(a.min() >= 0.0);
        assert_eq!(a, add_gaussian_noise(&x, 2.0, 3).unwrap());
        assert_ne!(a, add_gaussian_noise(&x, 2.0, 4).unwrap());
    }

    #[test]
    fn negative_stddev_rejected() {
        assert!(add_gaussian_noise(&Matrix::ones(1, 1), -1.0, 0).is_err());
    }
}
