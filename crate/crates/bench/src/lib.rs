//! Inputs shared by the benchmarks.

use encoded_gates::StateVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A normalized state with uniformly random amplitudes, fixed by `seed`.
pub fn random_state(num_qubits: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps: Vec<Complex64> = (0..1usize << num_qubits)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(num_qubits, amps).expect("normalized")
}

#[cfg(test)]
mod tests {
    #[test]
    fn random_state_is_reproducible() {
        let a = super::random_state(4, 3);
        assert_eq!(a.max_abs_diff(&super::random_state(4, 3)), 0.0);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
