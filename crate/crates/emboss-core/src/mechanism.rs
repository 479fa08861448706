//! Cam lobe geometry and follower kinematics for the three-pin shaft.
//!
//! Each cam is a base circle with one lobe: a rise flank, an optional top
//! dwell at full lift, and a return flank. The three lobes sit 120 degrees
//! apart on the shaft, so keeping every lobe narrower than 120 degrees
//! leaves open parking arcs between them where no pin is lifted.
//!
//! Angles at this layer are in degrees; follower velocity is reported per
//! radian of shaft rotation, which is what the force balance and pressure
//! angle need.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lobes per shaft and degrees of shaft angle reserved for each.
pub const CAM_COUNT: usize = 3;
pub const CAM_SPACING_DEG: f64 = 360.0 / CAM_COUNT as f64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechanismError {
    #[error("invalid cam profile: {0}")]
    InvalidProfile(String),
    #[error("phase {phase} deg outside lobe 0..={lobe_width} deg")]
    InvalidPhase { phase: f64, lobe_width: f64 },
    #[error("degenerate profile: no rise slope")]
    DegenerateProfile,
}

/// Follower motion law used on both flanks of a lobe.
///
/// Cycloidal is the default: velocity and acceleration vanish at segment
/// boundaries, which suits a servo that keeps reversing. Harmonic is kept
/// for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotionLaw {
    Cycloidal,
    Harmonic,
}

impl MotionLaw {
    /// Normalized rise displacement at `u` in [0,1].
    fn rise(self, u: f64) -> f64 {
        match self {
            MotionLaw::Cycloidal => u - (2.0 * PI * u).sin() / (2.0 * PI),
            MotionLaw::Harmonic => 0.5 * (1.0 - (PI * u).cos()),
        }
    }

    /// d(rise)/du at `u` in [0,1].
    fn rise_slope(self, u: f64) -> f64 {
        match self {
            MotionLaw::Cycloidal => 1.0 - (2.0 * PI * u).cos(),
            MotionLaw::Harmonic => 0.5 * PI * (PI * u).sin(),
        }
    }

    /// Maximum of `rise_slope` over [0,1].
    fn peak_slope(self) -> f64 {
        match self {
            MotionLaw::Cycloidal => 2.0,
            MotionLaw::Harmonic => 0.5 * PI,
        }
    }
}

/// One cam lobe on the shaft.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CamProfile {
    base_radius: f64,
    lift: f64,
    rise_deg: f64,
    top_dwell_deg: f64,
    return_deg: f64,
    motion_law: MotionLaw,
}

impl Default for CamProfile {
    /// 5 mm base circle, 0.5 mm lift (standard braille dot height), symmetric
    /// 45 degree flanks, no top dwell: a 90 degree lobe leaving 30 degree
    /// parking gaps between the three lobes.
    fn default() -> Self {
        CamProfile::new(5.0, 0.5, 45.0, 0.0, 45.0, MotionLaw::Cycloidal)
            .expect("default profile is valid")
    }
}

impl CamProfile {
    pub fn new(
        base_radius: f64,
        lift: f64,
        rise_deg: f64,
        top_dwell_deg: f64,
        return_deg: f64,
        motion_law: MotionLaw,
    ) -> Result<Self, MechanismError> {
        let invalid = |m: &str| Err(MechanismError::InvalidProfile(m.to_string()));
        if !(base_radius > 0.0) {
            return invalid("base_radius must be > 0");
        }
        if !(lift > 0.0) {
            return invalid("lift must be > 0");
        }
        if !(rise_deg > 0.0) || !(return_deg > 0.0) {
            return invalid("rise and return angles must be > 0");
        }
        if !(top_dwell_deg >= 0.0) {
            return invalid("top dwell must be >= 0");
        }
        let lobe = rise_deg + top_dwell_deg + return_deg;
        if !(lobe < CAM_SPACING_DEG) {
            return invalid("lobe width must be < 120 deg so lobes stay disjoint");
        }
        Ok(CamProfile {
            base_radius,
            lift,
            rise_deg,
            top_dwell_deg,
            return_deg,
            motion_law,
        })
    }

    pub fn base_radius(&self) -> f64 {
        self.base_radius
    }

    pub fn lift(&self) -> f64 {
        self.lift
    }

    pub fn rise_deg(&self) -> f64 {
        self.rise_deg
    }

    pub fn top_dwell_deg(&self) -> f64 {
        self.top_dwell_deg
    }

    pub fn return_deg(&self) -> f64 {
        self.return_deg
    }

    pub fn motion_law(&self) -> MotionLaw {
        self.motion_law
    }

    /// Total angular width of the lobe in degrees.
    pub fn lobe_width_deg(&self) -> f64 {
        self.rise_deg + self.top_dwell_deg + self.return_deg
    }

    /// Lobe-local angle of full lift: mid top dwell.
    pub fn peak_phase_deg(&self) -> f64 {
        self.rise_deg + 0.5 * self.top_dwell_deg
    }

    /// Follower displacement in mm at a lobe-local phase in degrees.
    ///
    /// Exactly 0 at both lobe ends and exactly `lift` across the top dwell.
    pub fn displacement(&self, phase_deg: f64) -> Result<f64, MechanismError> {
        self.check_phase(phase_deg)?;
        Ok(self.displacement_unchecked(phase_deg))
    }

    fn displacement_unchecked(&self, phase_deg: f64) -> f64 {
        if phase_deg <= 0.0 || phase_deg >= self.lobe_width_deg() {
            return 0.0;
        }
        if phase_deg < self.rise_deg {
            self.lift * self.motion_law.rise(phase_deg / self.rise_deg)
        } else if phase_deg <= self.rise_deg + self.top_dwell_deg {
            self.lift
        } else {
            // Mirrored flank: the same law runs backwards over the return.
            let back = self.lobe_width_deg() - phase_deg;
            self.lift * self.motion_law.rise(back / self.return_deg)
        }
    }

    /// Follower velocity in mm per radian of shaft angle.
    ///
    /// Zero at lobe ends and across the dwell for the cycloidal law.
    pub fn velocity(&self, phase_deg: f64) -> Result<f64, MechanismError> {
        self.check_phase(phase_deg)?;
        Ok(self.velocity_unchecked(phase_deg))
    }

    fn velocity_unchecked(&self, phase_deg: f64) -> f64 {
        let lobe = self.lobe_width_deg();
        if phase_deg < self.rise_deg {
            let beta_rad = self.rise_deg.to_radians();
            self.lift * self.motion_law.rise_slope(phase_deg / self.rise_deg) / beta_rad
        } else if phase_deg <= self.rise_deg + self.top_dwell_deg {
            0.0
        } else {
            let gamma_rad = self.return_deg.to_radians();
            let back = lobe - phase_deg;
            -self.lift * self.motion_law.rise_slope(back / self.return_deg) / gamma_rad
        }
    }

    /// Pressure angle in degrees: atan(|ds/dphi| / (base_radius + s)).
    pub fn pressure_angle(&self, phase_deg: f64) -> Result<f64, MechanismError> {
        let v = self.velocity(phase_deg)?;
        let s = self.displacement_unchecked(phase_deg);
        Ok((v.abs() / (self.base_radius + s)).atan().to_degrees())
    }

    /// Maximum pressure angle over the lobe, scanned on a 0.01 degree grid.
    pub fn max_pressure_angle(&self) -> f64 {
        let lobe = self.lobe_width_deg();
        let steps = (lobe / 0.01).ceil() as usize;
        let mut max = 0.0f64;
        for i in 0..=steps {
            let phase = lobe * i as f64 / steps as f64;
            let v = self.velocity_unchecked(phase);
            let s = self.displacement_unchecked(phase);
            max = max.max((v.abs() / (self.base_radius + s)).atan().to_degrees());
        }
        max
    }

    /// Minimum follower force in newtons available while the pin moves,
    /// from the quasi-static work balance `T dphi = F ds`:
    /// `F_min = shaft_torque / max|ds/dphi|` with the slope in m/rad.
    ///
    /// Friction is ignored, so this is a lower-bound feasibility figure to
    /// compare against the embossing force requirement.
    pub fn strike_force_envelope(&self, shaft_torque_nm: f64) -> Result<f64, MechanismError> {
        debug_assert!(shaft_torque_nm > 0.0, "shaft torque must be positive");
        let beta_rad = self.rise_deg.to_radians();
        let max_slope_m_per_rad = self.lift * 1e-3 * self.motion_law.peak_slope() / beta_rad;
        if !(max_slope_m_per_rad > 0.0) {
            return Err(MechanismError::DegenerateProfile);
        }
        Ok(shaft_torque_nm / max_slope_m_per_rad)
    }

    /// `n` polar surface samples over the full revolution, lobe starting at
    /// theta 0. Samples sit at bin midpoints `(k + 0.5) * 360 / n`, so theta
    /// is strictly monotone and the sequence closes into a ring.
    pub fn points(&self, n: usize) -> Vec<(f64, f64)> {
        assert!(n >= 8, "profile export needs at least 8 samples");
        let lobe = self.lobe_width_deg();
        (0..n)
            .map(|k| {
                let theta = (k as f64 + 0.5) * 360.0 / n as f64;
                let s = if theta <= lobe {
                    self.displacement_unchecked(theta)
                } else {
                    0.0
                };
                (theta, self.base_radius + s)
            })
            .collect()
    }

    /// Lobe-local phase interval `[lo, hi]` where displacement >= `level`.
    ///
    /// Used by the simulator to detect emboss-threshold crossings exactly
    /// instead of numerically integrating the sweep. `level` must be in
    /// (0, lift); flanks are strictly monotone so bisection converges.
    pub fn phase_window_at(&self, level: f64) -> (f64, f64) {
        assert!(
            level > 0.0 && level < self.lift,
            "level must be strictly inside (0, lift)"
        );
        let rise_at = |phase: f64| self.lift * self.motion_law.rise(phase / self.rise_deg);
        let lo = bisect_increasing(rise_at, 0.0, self.rise_deg, level);
        let fall_at = |back: f64| self.lift * self.motion_law.rise(back / self.return_deg);
        let hi_back = bisect_increasing(fall_at, 0.0, self.return_deg, level);
        (lo, self.lobe_width_deg() - hi_back)
    }

    fn check_phase(&self, phase_deg: f64) -> Result<(), MechanismError> {
        let lobe_width = self.lobe_width_deg();
        if !(0.0..=lobe_width).contains(&phase_deg) {
            return Err(MechanismError::InvalidPhase {
                phase: phase_deg,
                lobe_width,
            });
        }
        Ok(())
    }
}

fn bisect_increasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// The three lobes mounted on one shaft, 120 degrees apart.
///
/// Lobe `i` occupies shaft angles `[120 i, 120 i + lobe_width(i)]`; cam 0
/// drives the top pin row, cam 1 the middle, cam 2 the bottom. Lobe widths
/// below 120 degrees keep the lobes pairwise disjoint, so at any shaft angle
/// at most one pin is lifted.
#[derive(Debug, Clone, PartialEq)]
pub struct CamAssembly {
    profiles: [CamProfile; CAM_COUNT],
}

impl Default for CamAssembly {
    fn default() -> Self {
        CamAssembly::uniform(CamProfile::default())
    }
}

impl CamAssembly {
    pub fn new(profiles: [CamProfile; CAM_COUNT]) -> Self {
        // CamProfile construction already guarantees lobe_width < 120.
        CamAssembly { profiles }
    }

    /// Same profile on all three cams.
    pub fn uniform(profile: CamProfile) -> Self {
        CamAssembly::new([profile; CAM_COUNT])
    }

    pub fn profile(&self, cam: usize) -> &CamProfile {
        &self.profiles[cam]
    }

    /// Shaft angle where lobe `cam` begins.
    pub fn lobe_start_deg(&self, cam: usize) -> f64 {
        CAM_SPACING_DEG * cam as f64
    }

    /// Shaft angle of full lift for `cam`: lobe start + rise + half the dwell.
    pub fn peak_angle_deg(&self, cam: usize) -> f64 {
        self.lobe_start_deg(cam) + self.profiles[cam].peak_phase_deg()
    }

    /// Follower displacement of `cam` at an absolute shaft angle; 0 outside
    /// the lobe.
    pub fn displacement_at(&self, cam: usize, shaft_deg: f64) -> f64 {
        let phase = (shaft_deg - self.lobe_start_deg(cam)).rem_euclid(360.0);
        if phase <= self.profiles[cam].lobe_width_deg() {
            self.profiles[cam].displacement_unchecked(phase)
        } else {
            0.0
        }
    }

    /// Open parking gap after lobe `k`: `(lobe k end, lobe k+1 start)`,
    /// as angles in degrees with the end possibly = 360.
    pub fn gap_interval_deg(&self, k: usize) -> (f64, f64) {
        (
            self.lobe_start_deg(k) + self.profiles[k].lobe_width_deg(),
            CAM_SPACING_DEG * (k as f64 + 1.0),
        )
    }

    pub fn min_gap_width_deg(&self) -> f64 {
        (0..CAM_COUNT)
            .map(|k| {
                let (a, b) = self.gap_interval_deg(k);
                b - a
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the inter-peak region containing `shaft_deg`.
    ///
    /// The three peaks split the circle into three regions; region `k` runs
    /// from peak `k` (inclusive) counterclockwise to peak `k+1` (exclusive)
    /// and contains parking gap `k`. No peak can be crossed without leaving
    /// the region, which is what makes the region the planner's notion of
    /// "where the shaft is".
    pub fn region_of(&self, shaft_deg: f64) -> usize {
        let a = shaft_deg.rem_euclid(360.0);
        for k in 0..CAM_COUNT {
            let lo = self.peak_angle_deg(k);
            let hi = self.peak_angle_deg((k + 1) % CAM_COUNT);
            let inside = if lo <= hi {
                (lo..hi).contains(&a)
            } else {
                a >= lo || a < hi
            };
            if inside {
                return k;
            }
        }
        // Unreachable for valid assemblies; the regions tile the circle.
        CAM_COUNT - 1
    }
}
