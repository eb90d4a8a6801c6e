use core::f64::consts::{FRAC_PI_2, PI};

/// Argument scale of the tapered-aperture pattern: the main-lobe half-power point.
pub const BESSEL_PATTERN_SCALE: f64 = 2.07123;

/// Multibeam feed radiation pattern
/// `G(theta) = G_max (J1(u) / 2u + 36 J3(u) / u^3)^2`, `u = 2.07123 sin(theta) / sin(theta_3db)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamPattern {
    /// Linear boresight gain.
    pub peak_gain: f64,
    /// Off-axis angle of the 3-dB contour, rad.
    pub theta_3db: f64,
}

impl BeamPattern {
    /// Pattern whose 3-dB contour has radius `beam_radius_m` at `slant_range_m`.
    pub fn from_geometry(peak_gain_dbi: f64, beam_radius_m: f64, slant_range_m: f64) -> Self {
        Self {
            peak_gain: crate::channel::db_to_linear(peak_gain_dbi),
            theta_3db: libm::atan(beam_radius_m / slant_range_m),
        }
    }

    pub fn gain(&self, off_axis: f64) -> f64 {
        antenna_gain(off_axis, self)
    }
}

/// Linear gain at `off_axis` rad; the angle is folded into `[0, pi/2]`.
pub fn antenna_gain(off_axis: f64, beam: &BeamPattern) -> f64 {
    let mut theta = libm::fmod(libm::fabs(off_axis), PI);
    if theta > FRAC_PI_2 {
        theta = PI - theta;
    }
    let u = BESSEL_PATTERN_SCALE * libm::sin(theta) / libm::sin(beam.theta_3db);
    if u < 1e-6 {
        return beam.peak_gain;
    }
    let field = libm::j1(u) / (2.0 * u) + 36.0 * libm::jn(3, u) / (u * u * u);
    beam.peak_gain * field * field
}
