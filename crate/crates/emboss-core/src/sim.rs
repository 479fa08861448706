//! Machine parameter models and discrete-event execution of a job plan.
//!
//! The simulator walks the plan's actions on an exact event clock: sweeps
//! advance the shaft at the (geared) servo rate, paper moves advance the
//! carriage at the axis rate, and a dot is recorded whenever a follower's
//! displacement crosses the emboss threshold upward while the paper dwells.
//! Nothing is numerically integrated; threshold crossings are located from
//! the lobe geometry, so runs are deterministic to the bit.
//!
//! Coordinates: the head is fixed and the paper moves, but positions are
//! tracked in the paper frame so dot coordinates read like page coordinates
//! (x to the right, y down the page, millimetres).

use thiserror::Error;

use crate::mechanism::{CamAssembly, MechanismError, CAM_COUNT};
use crate::planner::{verify_plan, Axis, JobPlan, PlanAction, Violation};

/// Throughput of industrial embossers quoted for comparison, chars/second.
pub const INDUSTRIAL_CHARS_PER_SECOND: f64 = 800.0;
/// Below this rate the report flags the machine as home-use only.
pub const HOME_USE_THRESHOLD_CPS: f64 = 10.0;
/// Grid snap tolerance for read-back, in mm.
pub const READ_BACK_TOLERANCE_MM: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("plan fails static verification ({} violations)", .0.len())]
    PlanViolation(Vec<Violation>),
    #[error("axis move of {distance} mm is not an integer number of {step} mm steps")]
    NonIntegralMove { distance: f64, step: f64 },
    #[error("encoder with {counts} counts/rev cannot resolve shaft angle {angle} deg")]
    EncoderAmbiguity { angle: f64, counts: u32 },
    #[error("dot at ({x}, {y}) mm lies on no grid position")]
    OffGridDot { x: f64, y: f64 },
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

/// Servo ratings. The paper's motor does 60 degrees in 0.11 s at 3.5 kg cm;
/// the gear train (ratio 1 by default) trades shaft speed for shaft torque.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServoSpec {
    pub sweep_rate_deg_per_s: f64,
    pub torque_nm: f64,
    pub gear_ratio: f64,
}

impl Default for ServoSpec {
    fn default() -> Self {
        ServoSpec {
            sweep_rate_deg_per_s: 60.0 / 0.11,
            // 3.5 kg cm * 0.0980665 N m / kg cm, rounded as configured.
            torque_nm: 0.3432,
            gear_ratio: 1.0,
        }
    }
}

impl ServoSpec {
    pub fn shaft_rate_deg_per_s(&self) -> f64 {
        self.sweep_rate_deg_per_s / self.gear_ratio
    }

    pub fn shaft_torque_nm(&self) -> f64 {
        self.torque_nm * self.gear_ratio
    }
}

/// One paper axis: X slides the paper sideways along a line, Y feeds it
/// forward between lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub speed_mm_per_s: f64,
    pub step_size_mm: f64,
}

impl AxisSpec {
    pub fn default_x() -> Self {
        AxisSpec {
            speed_mm_per_s: 20.0,
            step_size_mm: 0.01,
        }
    }

    pub fn default_y() -> Self {
        AxisSpec {
            speed_mm_per_s: 10.0,
            step_size_mm: 0.01,
        }
    }
}

/// Shaft angle feedback, modeled as one quadrature pair quantizing the
/// angle to `counts_per_rev` positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncoderSpec {
    pub counts_per_rev: u32,
}

impl Default for EncoderSpec {
    fn default() -> Self {
        EncoderSpec { counts_per_rev: 512 }
    }
}

impl EncoderSpec {
    pub fn quantize_deg(&self, angle_deg: f64) -> f64 {
        let step = 360.0 / self.counts_per_rev as f64;
        ((angle_deg / step).round() * step).rem_euclid(360.0)
    }
}

/// Page geometry and emboss thresholds. Dot and row pitch are the braille
/// standard 2.54 mm pin interspacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutSpec {
    pub column_pitch_mm: f64,
    pub row_pitch_mm: f64,
    pub cell_pitch_mm: f64,
    pub line_pitch_mm: f64,
    pub paper_width_mm: f64,
    pub paper_height_mm: f64,
    pub margin_mm: f64,
    /// Follower displacement at or above this, with paper dwelling, records
    /// a dot. 0.4 mm of the default 0.5 mm lift: strikes must reach 80 % of
    /// full lift to count.
    pub emboss_threshold_mm: f64,
    pub emboss_force_required_n: f64,
}

impl Default for LayoutSpec {
    fn default() -> Self {
        LayoutSpec {
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

impl LayoutSpec {
    /// Cells fitting on one line, or `None` when not even one fits.
    pub fn cells_per_line(&self) -> Option<usize> {
        let usable = self.paper_width_mm - 2.0 * self.margin_mm;
        if usable < self.column_pitch_mm {
            return None;
        }
        let n = ((usable - self.column_pitch_mm) / self.cell_pitch_mm).floor() as usize + 1;
        Some(n)
    }

    /// Whether `lines` braille lines fit the paper height.
    pub fn lines_fit(&self, lines: usize) -> bool {
        if lines == 0 {
            return true;
        }
        let extent = (lines - 1) as f64 * self.line_pitch_mm + 2.0 * self.row_pitch_mm;
        extent <= self.paper_height_mm - 2.0 * self.margin_mm
    }
}

/// Everything the simulator needs: motor specs, feedback, page layout, and
/// the cam assembly, plus the planner's crossing margin.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineConfig {
    pub servo: ServoSpec,
    pub axis_x: AxisSpec,
    pub axis_y: AxisSpec,
    pub encoder: EncoderSpec,
    pub layout: LayoutSpec,
    pub cam: CamAssembly,
    pub crossing_margin_deg: f64,
}

impl Default for MachineConfig {
    fn default() -> Self {
        MachineConfig {
            servo: ServoSpec::default(),
            axis_x: AxisSpec::default_x(),
            axis_y: AxisSpec::default_y(),
            encoder: EncoderSpec::default(),
            layout: LayoutSpec::default(),
            cam: CamAssembly::default(),
            crossing_margin_deg: 1.0,
        }
    }
}

/// Time for the servo to sweep `delta_deg` of shaft angle. Linear, no
/// acceleration model: the paper quotes a single rate. Computed as
/// `delta * (gear / rate)` so the rated 60 degrees maps back to exactly
/// 0.110 s under the default rate of 60/0.11.
pub fn servo_time(delta_deg: f64, spec: &ServoSpec) -> f64 {
    debug_assert!(delta_deg >= 0.0);
    delta_deg * (spec.gear_ratio / spec.sweep_rate_deg_per_s)
}

/// Time for an axis to move `distance_mm` (non-negative). The distance must
/// be an integer number of steps; layout pitches are validated against the
/// step size when a configuration is loaded.
pub fn axis_time(distance_mm: f64, spec: &AxisSpec) -> Result<f64, SimError> {
    debug_assert!(distance_mm >= 0.0);
    let steps = distance_mm / spec.step_size_mm;
    if (steps - steps.round()).abs() * spec.step_size_mm > 1e-9 {
        return Err(SimError::NonIntegralMove {
            distance: distance_mm,
            step: spec.step_size_mm,
        });
    }
    Ok(distance_mm / spec.speed_mm_per_s)
}

/// One embossed dot in paper coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dot {
    pub x_mm: f64,
    pub y_mm: f64,
    /// Highest follower displacement reached at this position.
    pub peak_mm: f64,
}

/// The embossed page: dots in recording order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VirtualPaper {
    dots: Vec<Dot>,
}

impl VirtualPaper {
    pub fn dots(&self) -> &[Dot] {
        &self.dots
    }

    pub fn len(&self) -> usize {
        self.dots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dots.is_empty()
    }

    /// Nearest dot within `tol_mm` of (x, y), if any.
    pub fn query(&self, x_mm: f64, y_mm: f64, tol_mm: f64) -> Option<&Dot> {
        self.dots
            .iter()
            .map(|d| {
                let dist = ((d.x_mm - x_mm).powi(2) + (d.y_mm - y_mm).powi(2)).sqrt();
                (d, dist)
            })
            .filter(|(_, dist)| *dist <= tol_mm)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(d, _)| d)
    }

    fn push(&mut self, dot: Dot) {
        self.dots.push(dot);
    }
}

/// Timeline entry. Times are seconds from job start.
#[derive(Debug, Clone, PartialEq)]
pub enum SimEvent {
    Sweep {
        from_deg: f64,
        to_deg: f64,
        t_start_s: f64,
        t_end_s: f64,
    },
    Strike {
        cam: usize,
        column: usize,
        x_mm: f64,
        y_mm: f64,
        t_s: f64,
    },
    Move {
        axis: Axis,
        mm: f64,
        t_start_s: f64,
        t_end_s: f64,
    },
}

impl SimEvent {
    pub fn start_time(&self) -> f64 {
        match self {
            SimEvent::Sweep { t_start_s, .. } | SimEvent::Move { t_start_s, .. } => *t_start_s,
            SimEvent::Strike { t_s, .. } => *t_s,
        }
    }

    pub fn duration(&self) -> f64 {
        match self {
            SimEvent::Sweep {
                t_start_s, t_end_s, ..
            }
            | SimEvent::Move {
                t_start_s, t_end_s, ..
            } => t_end_s - t_start_s,
            SimEvent::Strike { .. } => 0.0,
        }
    }
}

/// Execution results: the event timeline plus timing, strike and force
/// figures. Throughput fields are filled once the caller supplies the
/// character count (the simulator only sees columns).
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub events: Vec<SimEvent>,
    pub total_time_s: f64,
    pub strike_count: usize,
    pub spurious_dot_count: usize,
    pub min_available_force_n: f64,
    pub emboss_force_required_n: f64,
    pub char_count: Option<usize>,
    pub chars_per_second: Option<f64>,
    pub industrial_ratio: Option<f64>,
    pub home_use: Option<bool>,
}

impl SimReport {
    pub fn force_ok(&self) -> bool {
        self.min_available_force_n >= self.emboss_force_required_n
    }

    /// Fills the throughput fields from a character count.
    pub fn with_throughput(mut self, char_count: usize) -> Self {
        let t = throughput(&self, char_count);
        self.char_count = Some(char_count);
        self.chars_per_second = Some(t.chars_per_second);
        self.industrial_ratio = t.industrial_ratio;
        self.home_use = Some(t.home_use);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Throughput {
    pub chars_per_second: f64,
    /// 800 / cps; `None` when no time elapsed.
    pub industrial_ratio: Option<f64>,
    pub home_use: bool,
}

/// Characters per second and the slowdown factor against an 800 char/s
/// industrial embosser. Rates below [`HOME_USE_THRESHOLD_CPS`] are flagged
/// home-use.
pub fn throughput(report: &SimReport, char_count: usize) -> Throughput {
    let cps = if report.total_time_s > 0.0 {
        char_count as f64 / report.total_time_s
    } else {
        0.0
    };
    Throughput {
        chars_per_second: cps,
        industrial_ratio: (cps > 0.0).then(|| INDUSTRIAL_CHARS_PER_SECOND / cps),
        home_use: cps < HOME_USE_THRESHOLD_CPS,
    }
}

/// Above-threshold window of one cam on the unwrapped shaft angle line.
struct ThresholdZone {
    /// Absolute angle where the rising flank reaches the threshold.
    enter_deg: f64,
    /// Absolute angle where the falling flank drops back below it.
    exit_deg: f64,
}

/// Runs a plan against the machine. Re-checks the plan statically first and
/// refuses to run an inconsistent one.
pub fn execute(plan: &JobPlan, config: &MachineConfig) -> Result<(SimReport, VirtualPaper), SimError> {
    let violations = verify_plan(plan, &config.cam);
    if !violations.is_empty() {
        return Err(SimError::PlanViolation(violations));
    }

    let zones: Vec<ThresholdZone> = (0..CAM_COUNT)
        .map(|cam| {
            let profile = config.cam.profile(cam);
            let (lo, hi) = profile.phase_window_at(config.layout.emboss_threshold_mm);
            let start = config.cam.lobe_start_deg(cam);
            ThresholdZone {
                enter_deg: start + lo,
                exit_deg: start + hi,
            }
        })
        .collect();

    let shaft_rate = config.servo.shaft_rate_deg_per_s();
    let mut t = 0.0f64;
    let mut x = config.layout.margin_mm;
    let mut y = config.layout.margin_mm;
    let mut events: Vec<SimEvent> = Vec::new();
    let mut paper = VirtualPaper::default();
    let mut strike_count = 0usize;
    let mut spurious = 0usize;
    let mut column_index = 0usize;
    // Whether each pin currently rests above the emboss threshold.
    let mut above: [bool; CAM_COUNT] = std::array::from_fn(|cam| {
        config.cam.displacement_at(cam, plan.initial_angle_deg)
            >= config.layout.emboss_threshold_mm
    });

    for action in &plan.actions {
        match action {
            PlanAction::Column(col) => {
                // One dot per (cam, dwell) even if the peak is re-crossed.
                let mut recorded: [bool; CAM_COUNT] = [false; CAM_COUNT];
                let mut endpoints: Vec<f64> = vec![col.entry_deg];
                for sweep in &col.sweeps {
                    let duration = servo_time(sweep.length_deg(), &config.servo);
                    let t_start = t;
                    t += duration;
                    events.push(SimEvent::Sweep {
                        from_deg: sweep.from_deg,
                        to_deg: sweep.to_deg,
                        t_start_s: t_start,
                        t_end_s: t,
                    });
                    endpoints.push(sweep.to_deg);

                    // Threshold boundary crossings along the sweep, in
                    // travel order.
                    let going_up = sweep.to_deg >= sweep.from_deg;
                    let lo = sweep.from_deg.min(sweep.to_deg);
                    let hi = sweep.from_deg.max(sweep.to_deg);
                    let mut boundary: Vec<(f64, usize, bool)> = Vec::new();
                    for (cam, zone) in zones.iter().enumerate() {
                        for m in -3..=3 {
                            let off = 360.0 * m as f64;
                            for (edge, entering_up) in
                                [(zone.enter_deg + off, true), (zone.exit_deg + off, false)]
                            {
                                if edge > lo + 1e-12 && edge < hi - 1e-12 {
                                    // Crossing the rising-flank edge while
                                    // moving up enters the zone, while
                                    // moving down leaves it; the falling-
                                    // flank edge is the mirror image.
                                    let entering = entering_up == going_up;
                                    boundary.push((edge, cam, entering));
                                }
                            }
                        }
                    }
                    boundary.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                    if !going_up {
                        boundary.reverse();
                    }
                    for (edge, cam, entering) in boundary {
                        if entering && !above[cam] {
                            // Upward threshold crossing: a strike.
                            if !recorded[cam] {
                                recorded[cam] = true;
                                strike_count += 1;
                                if !col.pattern.has_row(cam) {
                                    spurious += 1;
                                }
                                let dot_y = y + cam as f64 * config.layout.row_pitch_mm;
                                let peak_mm = peak_displacement(config, col, cam);
                                paper.push(Dot {
                                    x_mm: x,
                                    y_mm: dot_y,
                                    peak_mm,
                                });
                                let t_hit =
                                    t_start + (edge - sweep.from_deg).abs() / shaft_rate;
                                events.push(SimEvent::Strike {
                                    cam,
                                    column: column_index,
                                    x_mm: x,
                                    y_mm: dot_y,
                                    t_s: t_hit,
                                });
                            }
                        }
                        above[cam] = entering;
                    }
                }
                // Feedback check: the controller must be able to tell from
                // the quantized angle which side of each peak the shaft
                // stopped on, and that a parked shaft is really in its gap.
                for &angle in &endpoints {
                    let quantized = config.encoder.quantize_deg(angle);
                    if config.cam.region_of(quantized) != config.cam.region_of(angle) {
                        return Err(SimError::EncoderAmbiguity {
                            angle: angle.rem_euclid(360.0),
                            counts: config.encoder.counts_per_rev,
                        });
                    }
                }
                let exit = col.exit_deg;
                let gap = config.cam.gap_interval_deg(col.exit_arc.index());
                if in_open_interval(exit, gap) && !in_open_interval(config.encoder.quantize_deg(exit), gap)
                {
                    return Err(SimError::EncoderAmbiguity {
                        angle: exit.rem_euclid(360.0),
                        counts: config.encoder.counts_per_rev,
                    });
                }
                column_index += 1;
            }
            PlanAction::Move { axis, mm } => {
                let spec = match axis {
                    Axis::X => &config.axis_x,
                    Axis::Y => &config.axis_y,
                };
                let duration = axis_time(mm.abs(), spec)?;
                let t_start = t;
                t += duration;
                events.push(SimEvent::Move {
                    axis: *axis,
                    mm: *mm,
                    t_start_s: t_start,
                    t_end_s: t,
                });
                match axis {
                    Axis::X => x += mm,
                    Axis::Y => y += mm,
                }
            }
        }
    }

    let mut min_force = f64::INFINITY;
    for cam in 0..CAM_COUNT {
        let f = config
            .cam
            .profile(cam)
            .strike_force_envelope(config.servo.shaft_torque_nm())?;
        min_force = min_force.min(f);
    }

    let report = SimReport {
        events,
        total_time_s: t,
        strike_count,
        spurious_dot_count: spurious,
        min_available_force_n: min_force,
        emboss_force_required_n: config.layout.emboss_force_required_n,
        char_count: None,
        chars_per_second: None,
        industrial_ratio: None,
        home_use: None,
    };
    Ok((report, paper))
}

fn in_open_interval(angle: f64, (a, b): (f64, f64)) -> bool {
    let x = angle.rem_euclid(360.0);
    x > a && x < b
}

/// Highest displacement cam `cam` reaches over all of the column's sweeps.
fn peak_displacement(config: &MachineConfig, col: &crate::planner::ColumnPlan, cam: usize) -> f64 {
    let profile = config.cam.profile(cam);
    let start = config.cam.lobe_start_deg(cam);
    let lobe = profile.lobe_width_deg();
    let peak_phase = profile.peak_phase_deg();
    let mut max = 0.0f64;
    for sweep in &col.sweeps {
        let lo = sweep.from_deg.min(sweep.to_deg);
        let hi = sweep.from_deg.max(sweep.to_deg);
        for m in -3..=3 {
            let base = start + 360.0 * m as f64;
            let a = (lo - base).max(0.0);
            let b = (hi - base).min(lobe);
            if a > b {
                continue;
            }
            // Flanks are monotone: the maximum is at the peak if covered,
            // otherwise at an end of the covered span.
            let candidates = if (a..=b).contains(&peak_phase) {
                [peak_phase, a, b]
            } else {
                [a, b, a]
            };
            for phase in candidates {
                max = max.max(profile.displacement(phase).unwrap_or(0.0));
            }
        }
    }
    max
}

/// Reads cells back off the paper by snapping every dot to the layout grid
/// (within [`READ_BACK_TOLERANCE_MM`]); an off-grid dot is an error, which
/// is how a stray transit strike would surface. Cells are reassembled
/// row-major per line; lines before the last are padded to the full line
/// width (they were full when planned), trailing blanks of the last line
/// are unknowable and therefore dropped.
pub fn read_back(paper: &VirtualPaper, layout: &LayoutSpec) -> Result<Vec<crate::braille::BrailleCell>, SimError> {
    use crate::braille::BrailleCell;
    use std::collections::BTreeMap;

    let mut grid: BTreeMap<(usize, usize), u8> = BTreeMap::new();
    for dot in paper.dots() {
        let (line, cell, col, row) = snap_dot(dot, layout)?;
        let bit = (col * 3 + row) as u8;
        *grid.entry((line, cell)).or_insert(0) |= 1 << bit;
    }
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    let last_line = grid.keys().map(|&(l, _)| l).max().unwrap();
    let last_cell_on_last = grid
        .keys()
        .filter(|&&(l, _)| l == last_line)
        .map(|&(_, c)| c)
        .max()
        .unwrap();
    let full_width = layout.cells_per_line().unwrap_or(last_cell_on_last + 1);
    let mut cells = Vec::new();
    for line in 0..=last_line {
        let width = if line < last_line {
            full_width
        } else {
            last_cell_on_last + 1
        };
        for cell in 0..width {
            let mask = grid.get(&(line, cell)).copied().unwrap_or(0);
            cells.push(BrailleCell::from_mask(mask).expect("6-bit mask"));
        }
    }
    Ok(cells)
}

/// Maps a dot to (line, cell, column, row) grid indices.
fn snap_dot(dot: &Dot, layout: &LayoutSpec) -> Result<(usize, usize, usize, usize), SimError> {
    let off_grid = || SimError::OffGridDot {
        x: dot.x_mm,
        y: dot.y_mm,
    };
    let xr = dot.x_mm - layout.margin_mm;
    let mut best_x: Option<(f64, usize, usize)> = None;
    for col in 0..2usize {
        let rel = xr - col as f64 * layout.column_pitch_mm;
        let cell = (rel / layout.cell_pitch_mm).round();
        if cell < 0.0 {
            continue;
        }
        let err = (rel - cell * layout.cell_pitch_mm).abs();
        if err <= READ_BACK_TOLERANCE_MM
            && best_x.as_ref().is_none_or(|(e, _, _)| err < *e)
        {
            best_x = Some((err, cell as usize, col));
        }
    }
    let (_, cell, col) = best_x.ok_or_else(off_grid)?;

    let yr = dot.y_mm - layout.margin_mm;
    let mut best_y: Option<(f64, usize, usize)> = None;
    for row in 0..3usize {
        let rel = yr - row as f64 * layout.row_pitch_mm;
        let line = (rel / layout.line_pitch_mm).round();
        if line < 0.0 {
            continue;
        }
        let err = (rel - line * layout.line_pitch_mm).abs();
        if err <= READ_BACK_TOLERANCE_MM
            && best_y.as_ref().is_none_or(|(e, _, _)| err < *e)
        {
            best_y = Some((err, line as usize, row));
        }
    }
    let (_, line, row) = best_y.ok_or_else(off_grid)?;
    Ok((line, cell, col, row))
}
