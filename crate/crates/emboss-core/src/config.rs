//! Machine configuration file: one JSON document with sections `servo`,
//! `axis_x`, `axis_y`, `encoder`, `layout` and `cam`. Every section and
//! field is optional and falls back to the documented default; unknown keys
//! are errors. Loading validates every invariant before producing a
//! [`MachineConfig`], so the rest of the crate can trust its numbers.
//!
//! Parsing goes through a raw all-optional mirror of the document, then
//! resolves defaults (the two axes default differently), so a dumped
//! configuration always spells out every value.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mechanism::{CamAssembly, CamProfile, MotionLaw};
use crate::sim::{AxisSpec, EncoderSpec, LayoutSpec, MachineConfig, ServoSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ServoSection {
    pub sweep_rate_deg_per_s: f64,
    pub torque_nm: f64,
    pub gear_ratio: f64,
}

impl Default for ServoSection {
    fn default() -> Self {
        ServoSection {
            sweep_rate_deg_per_s: 60.0 / 0.11,
            // 3.5 kg cm * 0.0980665 (N m per kg cm), as configured.
            torque_nm: 0.3432,
            gear_ratio: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AxisSection {
    pub speed_mm_per_s: f64,
    pub step_size_mm: f64,
}

impl AxisSection {
    fn default_x() -> Self {
        AxisSection {
            speed_mm_per_s: 20.0,
            step_size_mm: 0.01,
        }
    }

    fn default_y() -> Self {
        AxisSection {
            speed_mm_per_s: 10.0,
            step_size_mm: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EncoderSection {
    pub counts_per_rev: u32,
}

impl Default for EncoderSection {
    fn default() -> Self {
        EncoderSection { counts_per_rev: 512 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LayoutSection {
    pub column_pitch_mm: f64,
    pub row_pitch_mm: f64,
    pub cell_pitch_mm: f64,
    pub line_pitch_mm: f64,
    pub paper_width_mm: f64,
    pub paper_height_mm: f64,
    pub margin_mm: f64,
    pub emboss_threshold_mm: f64,
    pub emboss_force_required_n: f64,
}

impl Default for LayoutSection {
    fn default() -> Self {
        LayoutSection {
            column_pitch_mm: 2.54,
            row_pitch_mm: 2.54,
            cell_pitch_mm: 6.35,
            line_pitch_mm: 10.16,
            paper_width_mm: 210.0,
            paper_height_mm: 297.0,
            margin_mm: 10.0,
            emboss_threshold_mm: 0.4,
            emboss_force_required_n: 15.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CamSection {
    pub base_radius_mm: f64,
    pub lift_mm: f64,
    pub rise_deg: f64,
    pub top_dwell_deg: f64,
    pub return_deg: f64,
    pub motion_law: MotionLaw,
    pub crossing_margin_deg: f64,
}

impl Default for CamSection {
    fn default() -> Self {
        CamSection {
            base_radius_mm: 5.0,
            lift_mm: 0.5,
            rise_deg: 45.0,
            top_dwell_deg: 0.0,
            return_deg: 45.0,
            motion_law: MotionLaw::Cycloidal,
            crossing_margin_deg: 1.0,
        }
    }
}

/// The whole configuration document, fully resolved.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MachineConfigFile {
    pub servo: ServoSection,
    pub axis_x: AxisSection,
    pub axis_y: AxisSection,
    pub encoder: EncoderSection,
    pub layout: LayoutSection,
    pub cam: CamSection,
}

impl Default for MachineConfigFile {
    fn default() -> Self {
        MachineConfigFile {
            servo: ServoSection::default(),
            axis_x: AxisSection::default_x(),
            axis_y: AxisSection::default_y(),
            encoder: EncoderSection::default(),
            layout: LayoutSection::default(),
            cam: CamSection::default(),
        }
    }
}

macro_rules! raw_section {
    ($raw:ident, $resolved:ty, { $($field:ident: $ty:ty),+ $(,)? }) => {
        #[derive(Debug, Default, Deserialize)]
        #[serde(deny_unknown_fields)]
        struct $raw {
            $( $field: Option<$ty>, )+
        }

        impl $raw {
            fn resolve(self, defaults: $resolved) -> $resolved {
                <$resolved>::from_raw(self, defaults)
            }
        }

        impl $resolved {
            fn from_raw(raw: $raw, defaults: $resolved) -> $resolved {
                Self {
                    $( $field: raw.$field.unwrap_or(defaults.$field), )+
                }
            }
        }
    };
}

raw_section!(RawServo, ServoSection, {
    sweep_rate_deg_per_s: f64,
    torque_nm: f64,
    gear_ratio: f64,
});
raw_section!(RawAxis, AxisSection, {
    speed_mm_per_s: f64,
    step_size_mm: f64,
});
raw_section!(RawEncoder, EncoderSection, {
    counts_per_rev: u32,
});
raw_section!(RawLayout, LayoutSection, {
    column_pitch_mm: f64,
    row_pitch_mm: f64,
    cell_pitch_mm: f64,
    line_pitch_mm: f64,
    paper_width_mm: f64,
    paper_height_mm: f64,
    margin_mm: f64,
    emboss_threshold_mm: f64,
    emboss_force_required_n: f64,
});
raw_section!(RawCam, CamSection, {
    base_radius_mm: f64,
    lift_mm: f64,
    rise_deg: f64,
    top_dwell_deg: f64,
    return_deg: f64,
    motion_law: MotionLaw,
    crossing_margin_deg: f64,
});

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfigFile {
    #[serde(default)]
    servo: RawServo,
    #[serde(default)]
    axis_x: RawAxis,
    #[serde(default)]
    axis_y: RawAxis,
    #[serde(default)]
    encoder: RawEncoder,
    #[serde(default)]
    layout: RawLayout,
    #[serde(default)]
    cam: RawCam,
}

impl MachineConfigFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfigFile = serde_json::from_str(text)?;
        Ok(MachineConfigFile {
            servo: raw.servo.resolve(ServoSection::default()),
            axis_x: raw.axis_x.resolve(AxisSection::default_x()),
            axis_y: raw.axis_y.resolve(AxisSection::default_y()),
            encoder: raw.encoder.resolve(EncoderSection::default()),
            layout: raw.layout.resolve(LayoutSection::default()),
            cam: raw.cam.resolve(CamSection::default()),
        })
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("config serializes");
        out.push('\n');
        out
    }

    /// Validates every invariant and produces the runtime configuration.
    pub fn into_machine(self) -> Result<MachineConfig, ConfigError> {
        let invalid = ConfigError::Invalid;

        let s = &self.servo;
        if !(s.sweep_rate_deg_per_s > 0.0 && s.torque_nm > 0.0 && s.gear_ratio > 0.0) {
            return Err(invalid("servo rate, torque and gear ratio must be > 0".into()));
        }
        for (name, a) in [("axis_x", &self.axis_x), ("axis_y", &self.axis_y)] {
            if !(a.speed_mm_per_s > 0.0 && a.step_size_mm > 0.0) {
                return Err(invalid(format!("{name}: speed and step size must be > 0")));
            }
        }

        let l = &self.layout;
        for (name, v) in [
            ("column_pitch_mm", l.column_pitch_mm),
            ("row_pitch_mm", l.row_pitch_mm),
            ("cell_pitch_mm", l.cell_pitch_mm),
            ("line_pitch_mm", l.line_pitch_mm),
            ("paper_width_mm", l.paper_width_mm),
            ("paper_height_mm", l.paper_height_mm),
        ] {
            if !(v > 0.0) {
                return Err(invalid(format!("layout.{name} must be > 0")));
            }
        }
        if !(l.margin_mm >= 0.0) {
            return Err(invalid("layout.margin_mm must be >= 0".into()));
        }
        if !(l.cell_pitch_mm > l.column_pitch_mm) {
            return Err(invalid("layout.cell_pitch_mm must exceed column_pitch_mm".into()));
        }
        if !(l.emboss_force_required_n >= 0.0) {
            return Err(invalid("layout.emboss_force_required_n must be >= 0".into()));
        }

        let c = &self.cam;
        let profile = CamProfile::new(
            c.base_radius_mm,
            c.lift_mm,
            c.rise_deg,
            c.top_dwell_deg,
            c.return_deg,
            c.motion_law,
        )
        .map_err(|e| invalid(e.to_string()))?;
        let cam = CamAssembly::uniform(profile);

        if !(l.emboss_threshold_mm > 0.0 && l.emboss_threshold_mm < c.lift_mm) {
            return Err(invalid(
                "layout.emboss_threshold_mm must be inside (0, cam lift)".into(),
            ));
        }

        let min_gap = cam.min_gap_width_deg();
        if !(c.crossing_margin_deg > 0.0 && c.crossing_margin_deg < min_gap) {
            return Err(invalid(format!(
                "cam.crossing_margin_deg must be inside (0, {min_gap}) deg"
            )));
        }

        // Arcs must stay distinguishable after quantization.
        let min_counts = (3.0 * 360.0 / min_gap).ceil() as u32;
        if self.encoder.counts_per_rev < min_counts {
            return Err(invalid(format!(
                "encoder.counts_per_rev must be >= {min_counts} for {min_gap} deg gaps"
            )));
        }

        // Every planned paper move is built from these pitches, so each must
        // be an integer number of steps.
        let integral = |value: f64, step: f64| {
            let steps = value / step;
            (steps - steps.round()).abs() * step <= 1e-9
        };
        for (name, v, step) in [
            ("column_pitch_mm", l.column_pitch_mm, self.axis_x.step_size_mm),
            ("cell_pitch_mm", l.cell_pitch_mm, self.axis_x.step_size_mm),
            ("line_pitch_mm", l.line_pitch_mm, self.axis_y.step_size_mm),
        ] {
            if !integral(v, step) {
                return Err(invalid(format!(
                    "layout.{name} = {v} is not an integer number of {step} mm steps"
                )));
            }
        }

        Ok(MachineConfig {
            servo: ServoSpec {
                sweep_rate_deg_per_s: s.sweep_rate_deg_per_s,
                torque_nm: s.torque_nm,
                gear_ratio: s.gear_ratio,
            },
            axis_x: AxisSpec {
                speed_mm_per_s: self.axis_x.speed_mm_per_s,
                step_size_mm: self.axis_x.step_size_mm,
            },
            axis_y: AxisSpec {
                speed_mm_per_s: self.axis_y.speed_mm_per_s,
                step_size_mm: self.axis_y.step_size_mm,
            },
            encoder: EncoderSpec {
                counts_per_rev: self.encoder.counts_per_rev,
            },
            layout: LayoutSpec {
                column_pitch_mm: l.column_pitch_mm,
                row_pitch_mm: l.row_pitch_mm,
                cell_pitch_mm: l.cell_pitch_mm,
                line_pitch_mm: l.line_pitch_mm,
                paper_width_mm: l.paper_width_mm,
                paper_height_mm: l.paper_height_mm,
                margin_mm: l.margin_mm,
                emboss_threshold_mm: l.emboss_threshold_mm,
                emboss_force_required_n: l.emboss_force_required_n,
            },
            cam,
            crossing_margin_deg: c.crossing_margin_deg,
        })
    }
}
