use crate::error::{Error, Result};

/// Uniformly spaced samples on `[lo, hi]`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::domain(format!("grid bounds must be finite: [{lo}, {hi}]")));
        }
        if hi <= lo {
            return Err(Error::domain(format!("grid needs hi > lo, got [{lo}, {hi}]")));
        }
        if n < 2 {
            return Err(Error::domain(format!("grid needs at least 2 samples, got {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    /// Smallest uniform grid on `[lo, hi]` whose spacing does not exceed `spacing`.
    pub fn with_spacing(lo: f64, hi: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::domain(format!("grid spacing must be positive, got {spacing}")));
        }
        let intervals = ((hi - lo) / spacing).ceil().max(1.0) as usize;
        Self::new(lo, hi, intervals + 1)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.points().collect()
    }
}

/// Tensor product of an x grid and a q grid. Samples are stored x-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub q: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, q: Grid1D) -> Self {
        Self { x, q }
    }

    /// The phase-space window used for the single-photon phase-space plots:
    /// x in [-25, 25] w, q in [-4, 4] / w, 512 x 257 samples.
    pub fn default_phase_space(w: f64) -> Self {
        Self {
            x: Grid1D {
                lo: -25.0 * w,
                hi: 25.0 * w,
                n: 512,
            },
            q: Grid1D {
                lo: -4.0 / w,
                hi: 4.0 / w,
                n: 257,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, ix: usize, iq: usize) -> usize {
        ix * self.q.len() + iq
    }

    pub fn coords(&self, flat: usize) -> (f64, f64) {
        let nq = self.q.len();
        (self.x.point(flat / nq), self.q.point(flat % nq))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
        assert!(Grid1D::new(1.0, 1.0, 5).is_err());
        assert!(Grid1D::new(2.0, 1.0, 5).is_err());
        assert!(Grid1D::new(f64::NAN, 1.0, 5).is_err());
    }

    #[test]
    fn endpoints_are_exact() {
        let g = Grid1D::new(-0.3, 0.7, 11).unwrap();
        assert_eq!(g.point(0), -0.3);
        assert_eq!(g.point(10), 0.7);
        assert!((g.spacing() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn spacing_bound_is_respected() {
        let g = Grid1D::with_spacing(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert!(g.spacing() <= 0.3);
    }

    #[test]
    fn flat_index_round_trips() {
        let g = Grid2D::new(Grid1D::new(0.0, 1.0, 3).unwrap(), Grid1D::new(0.0, 2.0, 5).unwrap());
        let (x, q) = g.coords(g.index(2, 3));
        assert_eq!((x, q), (1.0, 1.5));
    }
}
