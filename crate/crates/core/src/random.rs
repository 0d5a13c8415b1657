//! Seeded sampling of elements. Every random stream is a ChaCha8 generator
//! keyed by `(seed, stream)`, so trials can be evaluated in any order.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Algebra, Element};

pub type TrialRng = ChaCha8Rng;

pub fn rng_for(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a label into a seed so independent suites do not share streams.
pub fn salted(seed: u64, salt: &str) -> u64 {
    salt.bytes().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// I.i.d. standard normal canonical coordinates.
pub fn random_element<R: Rng + ?Sized>(algebra: &Algebra, rng: &mut R) -> Element {
    let coords = DVector::from_fn(algebra.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
    Element::from_raw(algebra.clone(), coords)
}

/// A random element scaled to unit trace-norm.
pub fn random_direction<R: Rng + ?Sized>(algebra: &Algebra, rng: &mut R) -> Element {
    loop {
        let x = random_element(algebra, rng);
        let n = x.norm();
        if n > 1e-8 {
            return x.scale(1.0 / n);
        }
    }
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
