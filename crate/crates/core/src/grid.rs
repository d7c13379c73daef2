//! Geometric sample grids used by the property checks.

/// A geometric grid of `n` points spanning `[lo, hi]`, both positive.
#[derive(Clone, Copy, Debug)]
pub struct GeometricGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GeometricGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        assert!(lo > 0.0 && hi > lo && n >= 2);
        GeometricGrid { lo, hi, n }
    }

    /// Natural logs of the grid points, equally spaced.
    pub fn ln_points(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let step = (b - a) / (self.n - 1) as f64;
        (0..self.n).map(|i| a + step * i as f64).collect()
    }

    pub fn points(&self) -> Vec<f64> {
        self.ln_points().into_iter().map(f64::exp).collect()
    }

    /// Same span with twice as many points.
    pub fn refined(&self) -> Self {
        GeometricGrid { lo: self.lo, hi: self.hi, n: self.n * 2 - 1 }
    }
}

/// Grid used to validate that a function is an increasing bijection:
/// 10^3 points spanning [1e-8, 1e8].
pub fn validation_grid() -> GeometricGrid {
    GeometricGrid::new(1e-8, 1e8, 1000)
}

/// Per-axis grid for the almost-semi-multiplicativity product scan over
/// [1e-4, 1e4]^2.
pub fn semimultiplicative_grid() -> GeometricGrid {
    GeometricGrid::new(1e-4, 1e4, 41)
}

/// Per-axis grid for the Lemma-3.5-style pair scan over [1e-3, 1e3]^2.
pub fn pair_grid() -> GeometricGrid {
    GeometricGrid::new(1e-3, 1e3, 41)
}
