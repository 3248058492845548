//! Seeded fixtures shared by the benchmarks.

use qmatmul_core::{BitOrder, IntMatrix, Register, RegisterRole};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Square matrix of `n`-bit unsigned entries, reproducible from `seed`.
pub fn random_matrix(dim: usize, n: u32, seed: u64) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elements = (0..dim * dim).map(|_| rng.gen_range(0..1i64 << n)).collect();
    IntMatrix::new(dim, dim, elements, n).expect("entries fit in n bits")
}

/// LSB-first operand register.
pub fn register(name: &str, offset: usize, width: usize) -> Register {
    Register::new(name, offset, width, BitOrder::LsbFirst, RegisterRole::Operand).expect("valid register")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_reproducible() {
        assert_eq!(random_matrix(4, 3, 7), random_matrix(4, 3, 7));
        assert!(random_matrix(4, 2, 1).elements().iter().all(|&v| (0..4).contains(&v)));
        assert_eq!(register("a", 3, 2).qubit(1), 4);
    }
}
