//! Coordinate charts: the arena every field lives on.

use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::scalar::DIM;

/// Loci excluded from evaluation, with a safety margin enforced by the chart.
#[derive(Clone, Debug)]
pub enum SingularLocus {
    /// A coordinate hyperplane `x[axis] = value` (e.g. the Taub-NUT nut r = m).
    CoordValue { axis: usize, value: f64 },
    /// The codimension-2 locus `x[axis0] = x[axis1] = 0` (e.g. a pole of a
    /// stereochart, where distance is measured in the plane of the two axes).
    PairZero { axis0: usize, axis1: usize },
}

/// A named coordinate box in four real variables.
///
/// `ranges` bound admissible points, `periodic` marks compact axes (the upper
/// bound is identified with the lower one), and `sample_ranges` restricts
/// where quasi-random sampling happens, which lets catalogs keep clear of
/// coordinate degeneracies like the Euler-angle axis without shrinking the
/// integration domain.
#[derive(Clone, Debug)]
pub struct Chart {
    pub name: String,
    pub ranges: [[f64; 2]; DIM],
    pub periodic: [bool; DIM],
    pub singular_loci: Vec<SingularLocus>,
    /// Margin kept from singular loci, per unit of coordinate scale.
    pub singular_margin: f64,
    /// Orientation of the coordinate 4-form dx0∧dx1∧dx2∧dx3 (+1 or -1).
    pub orientation: f64,
    pub sample_ranges: [[f64; 2]; DIM],
}

pub type ChartRef = Arc<Chart>;

/// Default margin kept from singular loci, as a fraction of coordinate scale.
pub const DEFAULT_SINGULAR_MARGIN: f64 = 1e-3;

impl Chart {
    pub fn new(name: &str, ranges: [[f64; 2]; DIM], periodic: [bool; DIM]) -> Result<Chart> {
        for (axis, r) in ranges.iter().enumerate() {
            if !(r[0] < r[1]) {
                return Err(GeomError::InvalidConfig(format!(
                    "chart `{name}` axis {axis} has degenerate range [{}, {}]",
                    r[0], r[1]
                )));
            }
        }
        Ok(Chart {
            name: name.to_string(),
            ranges,
            periodic,
            singular_loci: Vec::new(),
            singular_margin: DEFAULT_SINGULAR_MARGIN,
            orientation: 1.0,
            sample_ranges: ranges,
        })
    }

    pub fn with_singular_loci(mut self, loci: Vec<SingularLocus>) -> Chart {
        self.singular_loci = loci;
        self
    }

    pub fn with_orientation(mut self, orientation: f64) -> Chart {
        self.orientation = orientation;
        self
    }

    pub fn with_sample_ranges(mut self, sample_ranges: [[f64; 2]; DIM]) -> Chart {
        self.sample_ranges = sample_ranges;
        self
    }

    pub fn into_ref(self) -> ChartRef {
        Arc::new(self)
    }

    /// Width of the coordinate box along `axis`.
    pub fn scale(&self, axis: usize) -> f64 {
        self.ranges[axis][1] - self.ranges[axis][0]
    }

    /// Absolute margin kept from singular loci along `axis`.
    pub fn margin(&self, axis: usize) -> f64 {
        self.singular_margin * self.scale(axis)
    }

    fn in_range(&self, p: [f64; DIM]) -> bool {
        p.iter().enumerate().all(|(axis, &x)| {
            self.periodic[axis]
                || (x >= self.ranges[axis][0] - 1e-12 && x <= self.ranges[axis][1] + 1e-12)
        })
    }

    fn distance_to_loci(&self, p: [f64; DIM]) -> Option<(f64, f64)> {
        self.singular_loci
            .iter()
            .map(|locus| match locus {
                SingularLocus::CoordValue { axis, value } => {
                    ((p[*axis] - value).abs(), self.margin(*axis))
                }
                SingularLocus::PairZero { axis0, axis1 } => (
                    p[*axis0].hypot(p[*axis1]),
                    self.margin(*axis0).max(self.margin(*axis1)),
                ),
            })
            .min_by(|a, b| (a.0 / a.1).total_cmp(&(b.0 / b.1)))
    }

    /// Checks range membership and the singular-locus margin.
    pub fn check_admissible(&self, p: [f64; DIM]) -> Result<()> {
        if !self.in_range(p) {
            return Err(GeomError::ChartOverflow(format!(
                "point {p:?} outside the ranges of chart `{}`",
                self.name
            )));
        }
        if let Some((dist, margin)) = self.distance_to_loci(p) {
            if dist < margin {
                return Err(GeomError::SingularPoint {
                    chart: self.name.clone(),
                    point: p,
                    margin,
                });
            }
        }
        Ok(())
    }

    /// Deterministic quasi-random admissible points (Halton sequence over the
    /// sampling box, skipping any point inside a singular margin).
    pub fn sample_points(&self, count: usize) -> Vec<[f64; DIM]> {
        let mut out = Vec::with_capacity(count);
        let mut index = 1u64;
        while out.len() < count {
            let u = halton4(index);
            index += 1;
            let mut p = [0.0; DIM];
            for axis in 0..DIM {
                let [lo, hi] = self.sample_ranges[axis];
                p[axis] = lo + u[axis] * (hi - lo);
            }
            if self.check_admissible(p).is_ok() {
                out.push(p);
            }
            if index > 1_000_000 {
                break; // sampling box almost entirely excluded; give up gracefully
            }
        }
        out
    }
}

/// Van der Corput radical inverse in the given base.
fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut x = 0.0;
    while n > 0 {
        x += (n % base) as f64 * inv;
        n /= base;
        inv /= base as f64;
    }
    x
}

/// 4-dimensional Halton point (bases 2, 3, 5, 7).
pub fn halton4(index: u64) -> [f64; 4] {
    [
        radical_inverse(index, 2),
        radical_inverse(index, 3),
        radical_inverse(index, 5),
        radical_inverse(index, 7),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_range() {
        assert!(Chart::new("bad", [[0.0, 0.0], [0.0, 1.0], [0.0, 1.0], [0.0, 1.0]], [false; 4]).is_err());
    }

    #[test]
    fn singular_margin_enforced() {
        let chart = Chart::new(
            "tn",
            [[1.0, 10.0], [0.0, 3.0], [0.0, 6.0], [0.0, 12.0]],
            [false, false, true, true],
        )
        .unwrap()
        .with_singular_loci(vec![SingularLocus::CoordValue { axis: 0, value: 1.0 }]);
        // margin = 1e-3 * 9 = 9e-3
        assert!(chart.check_admissible([1.0005, 1.0, 1.0, 1.0]).is_err());
        assert!(chart.check_admissible([1.05, 1.0, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn sampling_is_deterministic_and_admissible() {
        let chart = Chart::new(
            "box",
            [[0.0, 1.0], [0.0, 1.0], [0.0, 1.0], [0.0, 1.0]],
            [false; 4],
        )
        .unwrap();
        let a = chart.sample_points(64);
        let b = chart.sample_points(64);
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
        for p in &a {
            chart.check_admissible(*p).unwrap();
        }
    }
}
