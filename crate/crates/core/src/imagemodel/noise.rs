use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Image;

/// Additive white Gaussian noise parameters.
///
/// Draws come from `ChaCha8Rng::seed_from_u64(seed)` through the ziggurat
/// sampler of `rand_distr::StandardNormal`, one draw per pixel in row-major
/// order. Both are platform independent, so a `(sigma, seed, rows, cols)`
/// tuple names a unique noise field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> crate::Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(crate::Error::InvalidArgument(format!(
                "noise sigma must be finite and nonnegative, got {sigma}"
            )));
        }
        Ok(Self { sigma, seed })
    }

    /// The `rows × cols` noise field `sigma · z`.
    pub fn field(&self, rows: usize, cols: usize) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Image::from_fn(rows, cols, |_, _| {
            let z: f64 = StandardNormal.sample(&mut rng);
            self.sigma * z
        })
    }
}

/// `out = image + sigma·z`, unclamped.
pub fn add_gaussian_noise(image: &Image, noise: NoiseSpec) -> Image {
    if noise.sigma == 0.0 {
        return image.clone();
    }
    let field = noise.field(image.rows(), image.cols());
    let data = image
        .data()
        .iter()
        .zip(field.data())
        .map(|(a, z)| a + z)
        .collect();
    Image {
        rows: image.rows(),
        cols: image.cols(),
        data,
    }
}
