//! Benchmark-only crate; see `benches/pipeline.rs`.
//!
//! Shared input builders live here so benches stay declarative.

use entb_core::{Complex64, ComplexMatrix, DensityOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded random Hermitian matrix of the given dimension.
pub fn random_hermitian(seed: u64, dim: usize) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        m.set(r, r, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        for c in r + 1..dim {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m.set(r, c, z);
            m.set(c, r, z.conj());
        }
    }
    m
}

/// Seeded random density operator over the given subsystem dims.
pub fn random_density(seed: u64, dims: Vec<usize>) -> DensityOperator {
    let h = random_hermitian(seed, dims.iter().product());
    let psd = h.matmul(&h).hermitized();
    let trace = psd.trace().re;
    let m = psd.scale(Complex64::new(1.0 / trace, 0.0));
    DensityOperator::new(dims, m).expect("normalized PSD matrix is a density operator")
}
