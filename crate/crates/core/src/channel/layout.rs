use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Planar coordinates on the coverage disc, km.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        Self::new(radius * libm::cos(angle), radius * libm::sin(angle))
    }

    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

pub fn distance(a: Point, b: Point) -> f64 {
    libm::hypot(a.x - b.x, a.y - b.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SatelliteId {
    Primary,
    Secondary,
}

/// Beam centers of one multibeam antenna over the coverage disc.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamLayout {
    pub beam_centers: Vec<Point>,
    /// 3-dB contour radius, km.
    pub beam_radius_3db: f64,
    pub coverage_radius: f64,
    pub satellite_id: SatelliteId,
}

impl BeamLayout {
    pub fn beams_count(&self) -> usize {
        self.beam_centers.len()
    }

    /// Index of the nearest beam center, lowest index on ties.
    pub fn nearest_beam(&self, p: Point) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (k, c) in self.beam_centers.iter().enumerate() {
            let d = distance(p, *c);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        best.map(|(k, _)| k)
    }

    /// Whether `p` lies inside some beam's 3-dB contour.
    pub fn covers(&self, p: Point) -> bool {
        let tol = 1e-9 * self.beam_radius_3db;
        self.beam_centers
            .iter()
            .any(|c| distance(p, *c) <= self.beam_radius_3db + tol)
    }

    /// Beams whose 3-dB contours overlap.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && distance(self.beam_centers[a], self.beam_centers[b]) < 2.0 * self.beam_radius_3db
    }
}

/// Hexagonal grid in spiral order: the origin, then each ring counter-clockwise
/// starting on the positive x axis. Neighbour spacing is `sqrt(3) r`, the densest
/// spacing at which the 3-dB discs still cover the plane.
pub fn build_beam_layout(
    coverage_radius: f64,
    beams_count: usize,
    beam_radius_3db: f64,
    satellite_id: SatelliteId,
) -> Result<BeamLayout> {
    if beams_count == 0 {
        return Err(invalid("beams_count", "must be at least 1"));
    }
    if !(beam_radius_3db > 0.0) || !beam_radius_3db.is_finite() {
        return Err(invalid("beam_radius_3db", "must be positive and finite"));
    }
    if !(coverage_radius > 0.0) || !coverage_radius.is_finite() {
        return Err(invalid("coverage_radius", "must be positive and finite"));
    }
    let spacing = libm::sqrt(3.0) * beam_radius_3db;
    let dirs: Vec<Point> = (0..6).map(|i| Point::polar(spacing, PI / 3.0 * i as f64)).collect();
    let mut centers = Vec::with_capacity(beams_count);
    centers.push(Point::ORIGIN);
    let mut ring = 1usize;
    'fill: while centers.len() < beams_count {
        for side in 0..6 {
            for step in 0..ring {
                if centers.len() == beams_count {
                    break 'fill;
                }
                let p = dirs[side]
                    .scale(ring as f64)
                    .add(dirs[(side + 2) % 6].scale(step as f64));
                centers.push(p);
            }
        }
        ring += 1;
    }
    if centers
        .iter()
        .any(|c| distance(*c, Point::ORIGIN) > coverage_radius * (1.0 + 1e-12))
    {
        return Err(invalid(
            "coverage_radius",
            "beam centers fall outside the coverage disc",
        ));
    }
    Ok(BeamLayout {
        beam_centers: centers,
        beam_radius_3db,
        coverage_radius,
        satellite_id,
    })
}

/// Sub-beam layout nested in `parent`. With four sub-beams per parent the
/// children sit on the index-4 sublattice at half the parent radius, so the
/// children of all parents tile the same hexagonal grid with no gaps.
/// Children of parent `p` occupy indices `4p..4p+4`.
pub fn build_nested_layout(
    parent: &BeamLayout,
    sub_beams_per_parent: usize,
    satellite_id: SatelliteId,
) -> Result<BeamLayout> {
    let r = parent.beam_radius_3db;
    let (offsets, radius) = match sub_beams_per_parent {
        1 => (alloc::vec![Point::ORIGIN], r),
        4 => {
            let s = libm::sqrt(3.0) * r;
            let a1 = Point::new(s, 0.0);
            let a2 = Point::polar(s, PI / 3.0);
            let q = |u: f64, v: f64| Point::new((u * a1.x + v * a2.x) / 4.0, (u * a1.y + v * a2.y) / 4.0);
            (
                alloc::vec![q(-1.0, -1.0), q(1.0, -1.0), q(-1.0, 1.0), q(1.0, 1.0)],
                r / 2.0,
            )
        }
        _ => return Err(invalid("sub_beams_per_parent", "supported values are 1 and 4")),
    };
    let beam_centers = parent
        .beam_centers
        .iter()
        .flat_map(|c| offsets.iter().map(move |o| c.add(*o)))
        .collect();
    Ok(BeamLayout {
        beam_centers,
        beam_radius_3db: radius,
        coverage_radius: parent.coverage_radius,
        satellite_id,
    })
}
