use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::discrete::DPoint;
use crate::point::Point;

/// Generator behind every seeded sampling routine in the crate.
pub type SampleRng = ChaCha8Rng;

/// Draws points for randomized axiom and contraction checks.
pub trait PointSampler {
    fn sample(&self, rng: &mut SampleRng) -> Point;
}

impl<F> PointSampler for F
where
    F: Fn(&mut SampleRng) -> Point,
{
    fn sample(&self, rng: &mut SampleRng) -> Point {
        self(rng)
    }
}

/// Uniform scalars on `[lo, hi)`.
#[derive(Debug, Clone, Copy)]
pub struct ScalarBox {
    pub lo: f64,
    pub hi: f64,
}

impl ScalarBox {
    pub fn new(lo: f64, hi: f64) -> Self {
        ScalarBox { lo, hi }
    }
}

impl PointSampler for ScalarBox {
    fn sample(&self, rng: &mut SampleRng) -> Point {
        Point::Scalar(uniform(rng, self.lo, self.hi))
    }
}

/// Vectors of length `dim` with i.i.d. uniform entries on `[lo, hi)`.
#[derive(Debug, Clone, Copy)]
pub struct VectorBox {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
}

impl PointSampler for VectorBox {
    fn sample(&self, rng: &mut SampleRng) -> Point {
        Point::Vector((0..self.dim).map(|_| uniform(rng, self.lo, self.hi)).collect())
    }
}

/// Grid functions with `grid` i.i.d. uniform midpoint values on `[lo, hi)`.
#[derive(Debug, Clone, Copy)]
pub struct GridBox {
    pub grid: usize,
    pub lo: f64,
    pub hi: f64,
}

impl PointSampler for GridBox {
    fn sample(&self, rng: &mut SampleRng) -> Point {
        Point::GridFn((0..self.grid).map(|_| uniform(rng, self.lo, self.hi)).collect())
    }
}

/// Uniform index into `{0, 1, 1/2, ..., 1/max_denominator}`.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteUniform {
    pub max_denominator: u64,
}

impl PointSampler for DiscreteUniform {
    fn sample(&self, rng: &mut SampleRng) -> Point {
        let idx = rng.random_range(0..=self.max_denominator.max(1));
        Point::Discrete(DPoint::from_index(idx))
    }
}

fn uniform(rng: &mut SampleRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}
