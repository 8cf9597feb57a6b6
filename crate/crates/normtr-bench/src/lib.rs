//! Seeded input builders shared by the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use normtr::problems::{make_matrix_layer, make_quadratic, LossKind};
use normtr::{ParamPoint, Problem, Shape};

/// Uniform random point of the given shape, reproducible from the seed.
pub fn random_point(shape: Shape, seed: u64) -> ParamPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = match shape {
        Shape::Vector(d) => d,
        Shape::Matrix(r, c) => r * c,
    };
    let data = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ParamPoint::new(shape, data).expect("uniform samples are finite")
}

/// Well-conditioned random quadratic.
pub fn quadratic(dim: usize, seed: u64) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    make_quadratic(dim, 10.0, &mut rng).expect("valid quadratic parameters")
}

/// Square matrix-valued regression layer.
pub fn layer(n: usize, samples: usize, seed: u64) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    make_matrix_layer(n, n, samples, LossKind::Quadratic, &mut rng)
        .expect("valid layer parameters")
}
