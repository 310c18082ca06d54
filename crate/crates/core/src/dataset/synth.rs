use rand_distr::{Distribution, StandardNormal};

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Parameters of the isotropic surrogate mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticMixtureSpec {
    pub k: usize,
    pub d: usize,
    pub n: usize,
    /// Mean-separation scale `c`; component means have per-coordinate
    /// standard deviation `c / sqrt(d)`.
    pub overlap: f64,
    pub seed: u64,
}

impl SyntheticMixtureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.d == 0 {
            return Err(Error::invalid("synthetic spec needs k >= 1 and d >= 1"));
        }
        if self.n < self.k {
            return Err(Error::invalid(format!("n = {} < k = {}", self.n, self.k)));
        }
        if !(self.overlap > 0.0 && self.overlap.is_finite()) {
            return Err(Error::invalid(format!("overlap must be positive, got {}", self.overlap)));
        }
        Ok(())
    }
}

/// Draws k means from N(0, c²/d · I), then point i from N(mean[i mod k], I)
/// labelled `i mod k`. The expected squared distance between two means is
/// 2c² for every d.
pub fn generate_synthetic_mixture(spec: &SyntheticMixtureSpec) -> Result<Dataset> {
    spec.validate()?;
    let SyntheticMixtureSpec { k, d, n, overlap, seed } = *spec;
    let mut rng = rng_from_seed(seed);
    let means = draw_means(&mut rng, k, d, overlap);
    let mut points = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % k;
        let mu = &means[c * d..(c + 1) * d];
        points.extend(mu.iter().map(|m| {
            let z: f64 = StandardNormal.sample(&mut rng);
            m + z
        }));
        labels.push(c);
    }
    Dataset::new(format!("synth-d{d}"), points, n, d, Some(labels))
}

/// The component means `generate_synthetic_mixture` would use, row-major k×d.
pub fn component_means(spec: &SyntheticMixtureSpec) -> Vec<f64> {
    let mut rng = rng_from_seed(spec.seed);
    draw_means(&mut rng, spec.k, spec.d, spec.overlap)
}

fn draw_means(rng: &mut crate::rng::Rng, k: usize, d: usize, overlap: f64) -> Vec<f64> {
    let scale = overlap / (d as f64).sqrt();
    (0..k * d)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            scale * z
        })
        .collect()
}
