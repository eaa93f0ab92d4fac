//! Deterministic inputs shared by the benchmarks.

use ndview::{ArrayView, DType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `0, 1, ..., n-1` as float64.
pub fn ramp(n: usize) -> ArrayView {
    ArrayView::arange(0.0, n as f64, 1.0, DType::float64()).expect("ramp")
}

/// `n×3` points with coordinates in `[0.1, 1]`.
pub fn points(n: usize, seed: u64) -> ArrayView {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * 3).map(|_| rng.gen_range(0.1..=1.0)).collect();
    ArrayView::from_vec(data, &[n, 3]).expect("points")
}

/// The pinhole camera matrix used throughout the examples.
pub fn camera() -> ArrayView {
    ArrayView::from_vec(vec![500.0, 0.0, 320.0, 0.0, 500.0, 240.0, 0.0, 0.0, 1.0], &[3, 3]).expect("camera")
}

/// An `m×n` matrix with entries in `[-1, 1]`.
pub fn matrix(m: usize, n: usize, seed: u64) -> ArrayView {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..m * n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    ArrayView::from_vec(data, &[m, n]).expect("matrix")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_have_expected_shapes() {
        assert_eq!(ramp(5).to_vec::<f64>(), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        let p = points(10, 1);
        assert_eq!(p.shape(), &[10, 3]);
        assert!(p.to_vec::<f64>().iter().all(|&v| (0.1..=1.0).contains(&v)));
        assert_eq!(points(4, 3).to_vec::<f64>(), points(4, 3).to_vec::<f64>());
        assert_eq!(camera().shape(), &[3, 3]);
        assert_eq!(matrix(2, 7, 0).shape(), &[2, 7]);
    }
}
