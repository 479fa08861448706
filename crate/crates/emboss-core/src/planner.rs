//! Servo sweep scheduling.
//!
//! The planning model: a cam's dot is embossed exactly when the shaft sweeps
//! across that cam's full-lift peak while the paper dwells. Entering a lobe
//! and reversing before the peak embosses nothing. The three peaks therefore
//! split the circle into three regions, and a column plan is a short walk
//! that crosses exactly the required peaks (overshooting each by a margin
//! before any reversal) and parks inside a gap between lobes, where every
//! pin is fully retracted, before the paper moves.
//!
//! A column plan is at most three monotone sweeps: out to one extreme, back
//! to the other, then a settle into the parking gap. Optimal extremes always
//! bind at a crossing demand (`peak +/- margin`), the entry, or a parking
//! point, so the per-column optimum is found by exhaustive enumeration over
//! that small candidate set, validated geometrically. Job planning is a
//! dynamic program over columns and parking positions on top of it.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::braille::{BrailleCell, ColumnPattern};
use crate::mechanism::{CamAssembly, CAM_COUNT};
use crate::sim::LayoutSpec;

/// Default overshoot past a crossed peak before any reversal, in degrees.
/// Covers encoder quantization at the default 512 counts per revolution.
pub const DEFAULT_CROSSING_MARGIN_DEG: f64 = 1.0;

const EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error(
        "no sweep sequence for pattern {pattern:03b} from region {entry_region} \
         to {exit:?}"
    )]
    Infeasible {
        pattern: u8,
        entry_region: usize,
        exit: Option<ParkingArc>,
    },
    #[error("layout overflow: {0}")]
    LayoutOverflow(String),
    #[error("crossing margin {margin} deg must be in (0, {max}) deg")]
    InvalidMargin { margin: f64, max: f64 },
    #[error("no feasible arc assignment for column {column}")]
    PlannerInfeasible { column: usize },
}

/// One of the three open arcs between consecutive lobes, identified by the
/// index of the lobe it follows. Arc `k` also names the inter-peak region
/// (peak `k` to peak `k+1`) that contains it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParkingArc(usize);

impl ParkingArc {
    pub fn new(index: usize) -> Option<Self> {
        (index < CAM_COUNT).then_some(ParkingArc(index))
    }

    pub fn index(self) -> usize {
        self.0
    }

    /// Arcs adjacent to peak `cam`: crossing that peak moves between them.
    pub fn adjacent_to_peak(cam: usize) -> (ParkingArc, ParkingArc) {
        (ParkingArc((cam + CAM_COUNT - 1) % CAM_COUNT), ParkingArc(cam))
    }
}

impl std::fmt::Display for ParkingArc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Arcs reachable from `current` when only the peaks in `allowed_cams` may be
/// crossed. Peaks partition the circle, so this is reachability on a 3-cycle
/// whose edges are the allowed peaks.
pub fn reachable_arcs(current: ParkingArc, allowed_cams: &[usize]) -> Vec<ParkingArc> {
    let mut seen = [false; CAM_COUNT];
    seen[current.index()] = true;
    let mut frontier = vec![current.index()];
    while let Some(arc) = frontier.pop() {
        for &cam in allowed_cams {
            let (a, b) = ParkingArc::adjacent_to_peak(cam);
            let next = if a.index() == arc {
                Some(b.index())
            } else if b.index() == arc {
                Some(a.index())
            } else {
                None
            };
            if let Some(n) = next {
                if !seen[n] {
                    seen[n] = true;
                    frontier.push(n);
                }
            }
        }
    }
    (0..CAM_COUNT)
        .filter(|&k| seen[k])
        .map(ParkingArc)
        .collect()
}

/// One monotone shaft sweep. Angles are unwrapped: `to - from` is the signed
/// rotation, and `strikes` lists the cams whose peaks the sweep crosses
/// (computed from geometry, never asserted).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSegment {
    pub from_deg: f64,
    pub to_deg: f64,
    pub strikes: Vec<usize>,
}

impl SweepSegment {
    pub fn length_deg(&self) -> f64 {
        (self.to_deg - self.from_deg).abs()
    }
}

/// Sweep schedule for one column dwell.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnPlan {
    pub pattern: ColumnPattern,
    /// Entry shaft angle, normalized to [0, 360).
    pub entry_deg: f64,
    pub sweeps: Vec<SweepSegment>,
    /// Final shaft angle in the sweeps' unwrapped coordinates.
    pub exit_deg: f64,
    /// Region holding the final angle; equals the parking gap index when the
    /// plan parks.
    pub exit_arc: ParkingArc,
    pub travel_deg: f64,
}

impl ColumnPlan {
    /// Final angle normalized to [0, 360), the next column's entry.
    pub fn exit_deg_normalized(&self) -> f64 {
        self.exit_deg.rem_euclid(360.0)
    }

    /// Union of cams struck by any sweep.
    pub fn struck_cams(&self) -> Vec<usize> {
        let mut mask = [false; CAM_COUNT];
        for sweep in &self.sweeps {
            for &cam in &sweep.strikes {
                mask[cam] = true;
            }
        }
        (0..CAM_COUNT).filter(|&c| mask[c]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanAction {
    Column(ColumnPlan),
    /// Paper move; `mm` is signed displacement along the axis.
    Move { axis: Axis, mm: f64 },
}

/// Paper-frame position of one planned cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellPosition {
    pub line: usize,
    pub index: usize,
    pub x_mm: f64,
    pub y_mm: f64,
}

/// Complete strike schedule for a text: column sweeps interleaved with paper
/// moves, shaft-angle continuous from `initial_angle_deg` onwards.
#[derive(Debug, Clone, PartialEq)]
pub struct JobPlan {
    pub initial_angle_deg: f64,
    pub actions: Vec<PlanAction>,
    pub total_travel_deg: f64,
    pub crossing_margin_deg: f64,
    pub cells_per_line: usize,
    pub cell_positions: Vec<CellPosition>,
}

impl JobPlan {
    pub fn column_count(&self) -> usize {
        self.actions
            .iter()
            .filter(|a| matches!(a, PlanAction::Column(_)))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A column's entry does not match the previous exit angle, or its
    /// sweeps do not chain.
    DiscontinuousShaft { action: usize },
    /// A sweep crosses a peak outside the column's pattern.
    SpuriousStrike { action: usize, cam: usize },
    /// A required cam is never struck during its column.
    MissingStrike { action: usize, cam: usize },
    /// A crossing is not overshot by the crossing margin before the sweep
    /// ends.
    InsufficientOvershoot { action: usize, cam: usize },
}

/// Peak instances of `cam` on the unwrapped line near a window.
fn peak_instances(assembly: &CamAssembly, cam: usize) -> impl Iterator<Item = f64> + '_ {
    let peak = assembly.peak_angle_deg(cam);
    (-3..=3).map(move |m| peak + 360.0 * m as f64)
}

/// All peak instances sorted by angle, for fast range scans while a single
/// column plan is optimized.
struct InstanceTable {
    sorted: Vec<(f64, usize)>,
}

impl InstanceTable {
    fn new(assembly: &CamAssembly) -> Self {
        let mut sorted: Vec<(f64, usize)> = (0..CAM_COUNT)
            .flat_map(|cam| peak_instances(assembly, cam).map(move |q| (q, cam)))
            .collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        InstanceTable { sorted }
    }

    /// Instances strictly inside the segment's open interval.
    fn crossings(&self, from: f64, to: f64) -> &[(f64, usize)] {
        let lo = from.min(to) + EPS;
        let hi = from.max(to) - EPS;
        let start = self.sorted.partition_point(|&(q, _)| q <= lo);
        let end = self.sorted.partition_point(|&(q, _)| q < hi);
        &self.sorted[start.min(end)..end]
    }
}

/// Cams crossed by the open interval of a monotone sweep, with the crossing
/// positions. Crossing is strict: touching a peak at an endpoint is not a
/// crossing (and the simulator records no new dot for it either, since the
/// follower never re-crosses the emboss threshold upward).
pub(crate) fn segment_crossings(assembly: &CamAssembly, from: f64, to: f64) -> Vec<(usize, f64)> {
    let lo = from.min(to);
    let hi = from.max(to);
    let mut out = Vec::new();
    for cam in 0..CAM_COUNT {
        for q in peak_instances(assembly, cam) {
            if q > lo + EPS && q < hi - EPS {
                out.push((cam, q));
            }
        }
    }
    out
}

fn park_points(gap: (f64, f64), margin: f64) -> Vec<f64> {
    let (a, b) = gap;
    if b - a > 2.0 * margin + EPS {
        vec![a + margin, b - margin]
    } else {
        vec![0.5 * (a + b)]
    }
}

fn in_gap(angle: f64, gap: (f64, f64)) -> bool {
    let a = angle.rem_euclid(360.0);
    a > gap.0 + EPS && a < gap.1 - EPS
}

fn validate_margin(assembly: &CamAssembly, margin: f64) -> Result<(), PlanError> {
    let max = assembly.min_gap_width_deg();
    if !(margin > 0.0 && margin < max) {
        return Err(PlanError::InvalidMargin { margin, max });
    }
    Ok(())
}

/// Total travel (rounded), sweep count, clockwise-first preference,
/// exit-arc index, exit angle: a total order making plans deterministic.
type CandidateKey = (i64, usize, u8, usize, i64);

struct Candidate {
    travel: f64,
    segments: Vec<(f64, f64)>,
    exit: f64,
}

impl Candidate {
    fn key(&self, assembly: &CamAssembly) -> CandidateKey {
        let cw_first = match self.segments.first() {
            Some(&(a, b)) => u8::from(b >= a),
            None => 0,
        };
        (
            (self.travel * 1e6).round() as i64,
            self.segments.len(),
            cw_first,
            assembly.region_of(self.exit),
            (self.exit.rem_euclid(360.0) * 1e6).round() as i64,
        )
    }
}

/// Plans one column dwell: a minimal-travel sweep sequence from `entry_deg`
/// that crosses exactly the cams in `pattern`, overshoots each crossing by
/// `margin_deg` before reversing, and (when `exit` is given) comes to rest
/// strictly inside that parking gap.
///
/// Entry may be any angle; job planning always enters from a parking point,
/// but the planner itself handles mid-lobe entries (the shaft is wherever a
/// previous sweep left it).
pub fn plan_column(
    pattern: ColumnPattern,
    entry_deg: f64,
    exit: Option<ParkingArc>,
    assembly: &CamAssembly,
    margin_deg: f64,
) -> Result<ColumnPlan, PlanError> {
    validate_margin(assembly, margin_deg)?;
    let e0 = entry_deg.rem_euclid(360.0);
    let required: Vec<usize> = pattern.cams();
    let required_mask: u8 = pattern.mask();
    let table = InstanceTable::new(assembly);

    // Candidate turnaround points: the entry, crossing demands
    // (peak +/- margin per unwrapped instance), and parking instances.
    let mut lefts: Vec<f64> = vec![e0];
    let mut rights: Vec<f64> = vec![e0];
    for &cam in &required {
        for q in peak_instances(assembly, cam) {
            if q - margin_deg <= e0 + EPS {
                lefts.push(q - margin_deg);
            }
            if q + margin_deg >= e0 - EPS {
                rights.push(q + margin_deg);
            }
        }
    }
    let mut exit_candidates: Vec<f64> = Vec::new();
    if let Some(arc) = exit {
        let gap = assembly.gap_interval_deg(arc.index());
        for pt in park_points(gap, margin_deg) {
            for m in -2..=2 {
                let q = pt + 360.0 * m as f64;
                exit_candidates.push(q);
                if q <= e0 + EPS {
                    lefts.push(q);
                }
                if q >= e0 - EPS {
                    rights.push(q);
                }
            }
        }
        if in_gap(e0, gap) {
            exit_candidates.push(e0);
        }
    }
    sort_dedup(&mut lefts);
    sort_dedup(&mut rights);
    sort_dedup(&mut exit_candidates);

    let mut best: Option<(Candidate, CandidateKey)> = None;

    for &l in &lefts {
        if l > e0 + EPS {
            continue;
        }
        for &r in &rights {
            if r < e0 - EPS {
                continue;
            }
            // Every required peak needs an instance inside (l, r), or no
            // walk over this extent can strike it.
            let covered = table
                .crossings(l, r)
                .iter()
                .fold(0u8, |m, &(_, cam)| m | 1 << cam);
            if covered & required_mask != required_mask {
                continue;
            }
            let finals: Vec<f64> = match exit {
                None => {
                    let mut v = vec![l, r];
                    sort_dedup(&mut v);
                    v
                }
                Some(_) => exit_candidates
                    .iter()
                    .copied()
                    .filter(|&e| e >= l - EPS && e <= r + EPS)
                    .collect(),
            };
            for &e in &finals {
                // Touch the far extreme first, then the near one, then
                // settle; both orders.
                for waypoints in [[e0, r, l, e], [e0, l, r, e]] {
                    if let Some(cand) =
                        validate_walk(&waypoints, &table, assembly, required_mask, margin_deg, exit)
                    {
                        let key = cand.key(assembly);
                        match &best {
                            Some((_, best_key)) if *best_key <= key => {}
                            _ => best = Some((cand, key)),
                        }
                    }
                }
            }
        }
    }

    let (cand, _) = best.ok_or(PlanError::Infeasible {
        pattern: pattern.mask(),
        entry_region: assembly.region_of(e0),
        exit,
    })?;
    let sweeps: Vec<SweepSegment> = cand
        .segments
        .iter()
        .map(|&(from, to)| SweepSegment {
            from_deg: from,
            to_deg: to,
            strikes: {
                let mut cams: Vec<usize> = table
                    .crossings(from, to)
                    .iter()
                    .map(|&(_, cam)| cam)
                    .collect();
                cams.sort_unstable();
                cams.dedup();
                cams
            },
        })
        .collect();
    Ok(ColumnPlan {
        pattern,
        entry_deg: e0,
        sweeps,
        exit_deg: cand.exit,
        exit_arc: ParkingArc(assembly.region_of(cand.exit)),
        travel_deg: cand.travel,
    })
}

fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() < EPS);
}

/// Checks one candidate walk. Valid when the union of peaks crossed equals
/// the required set, every crossing is overshot by the margin before its
/// segment ends, and the final angle rests strictly inside the exit gap
/// when one is demanded.
fn validate_walk(
    waypoints: &[f64; 4],
    table: &InstanceTable,
    assembly: &CamAssembly,
    required_mask: u8,
    margin: f64,
    exit: Option<ParkingArc>,
) -> Option<Candidate> {
    let mut segments: Vec<(f64, f64)> = Vec::new();
    let mut pos = waypoints[0];
    for &w in &waypoints[1..] {
        if (w - pos).abs() > EPS {
            segments.push((pos, w));
            pos = w;
        }
    }
    let mut struck = 0u8;
    let mut travel = 0.0;
    for &(a, b) in &segments {
        travel += (b - a).abs();
        for &(q, cam) in table.crossings(a, b) {
            let bit = 1u8 << cam;
            if required_mask & bit == 0 {
                return None;
            }
            if (b - q).abs() + EPS < margin {
                return None;
            }
            struck |= bit;
        }
    }
    if struck != required_mask {
        return None;
    }
    let exit_deg = pos;
    if let Some(arc) = exit {
        if !in_gap(exit_deg, assembly.gap_interval_deg(arc.index())) {
            return None;
        }
    }
    Some(Candidate {
        travel,
        segments,
        exit: exit_deg,
    })
}

/// Splits cells into the column sequence the head embosses, left column
/// first, and the paper moves between them.
fn columns_of(cells: &[BrailleCell]) -> Vec<ColumnPattern> {
    cells
        .iter()
        .flat_map(|cell| {
            let (l, r) = cell.columns();
            [l, r]
        })
        .collect()
}

/// Plans a whole text. Minimizes total shaft rotation with a dynamic program
/// over (column, parking position): each column plan must rest in some gap
/// before the paper moves, and the initial shaft angle is chosen freely
/// (homing happens before the paper is loaded). Paper moves follow the
/// column/cell/line structure of `layout`; blank columns keep their paper
/// move but sweep nothing.
pub fn plan_job(
    cells: &[BrailleCell],
    layout: &LayoutSpec,
    assembly: &CamAssembly,
    margin_deg: f64,
) -> Result<JobPlan, PlanError> {
    validate_margin(assembly, margin_deg)?;
    let cells_per_line = layout
        .cells_per_line()
        .ok_or_else(|| PlanError::LayoutOverflow("a single cell does not fit a line".into()))?;
    let line_count = cells.len().div_ceil(cells_per_line);
    if line_count > 0 && !layout.lines_fit(line_count) {
        return Err(PlanError::LayoutOverflow(format!(
            "{line_count} lines exceed the paper height"
        )));
    }

    let initial_states: Vec<(f64, usize)> = (0..CAM_COUNT)
        .flat_map(|k| {
            park_points(assembly.gap_interval_deg(k), margin_deg)
                .into_iter()
                .map(move |p| (p, k))
        })
        .collect();

    let columns = columns_of(cells);
    if columns.is_empty() {
        return Ok(JobPlan {
            initial_angle_deg: initial_states[0].0,
            actions: Vec::new(),
            total_travel_deg: 0.0,
            crossing_margin_deg: margin_deg,
            cells_per_line,
            cell_positions: Vec::new(),
        });
    }

    // DP state: the exact parked angle (keyed at micro-degree resolution).
    type StateKey = i64;
    let key_of = |angle: f64| -> StateKey { (angle.rem_euclid(360.0) * 1e6).round() as i64 };
    struct Node {
        cost: f64,
        angle: f64,
        prev: Option<StateKey>,
        plan: Option<ColumnPlan>,
    }
    // Parked entries recur constantly (there are only a handful of park
    // points), so column plans are memoized across the whole job.
    let mut memo: BTreeMap<(u8, StateKey, usize), Result<ColumnPlan, PlanError>> =
        BTreeMap::new();
    let mut layers: Vec<BTreeMap<StateKey, Node>> = Vec::with_capacity(columns.len() + 1);
    let mut first: BTreeMap<StateKey, Node> = BTreeMap::new();
    for &(angle, _) in &initial_states {
        first.insert(
            key_of(angle),
            Node {
                cost: 0.0,
                angle,
                prev: None,
                plan: None,
            },
        );
    }
    layers.push(first);

    for (j, &pattern) in columns.iter().enumerate() {
        let mut next: BTreeMap<StateKey, Node> = BTreeMap::new();
        let prev_layer = layers.last().unwrap();
        for (&prev_key, node) in prev_layer {
            for arc in 0..CAM_COUNT {
                let memo_key = (pattern.mask(), prev_key, arc);
                let cached = memo.entry(memo_key).or_insert_with(|| {
                    plan_column(
                        pattern,
                        node.angle,
                        Some(ParkingArc(arc)),
                        assembly,
                        margin_deg,
                    )
                });
                let plan = match cached {
                    Ok(p) => p.clone(),
                    Err(PlanError::Infeasible { .. }) => continue,
                    Err(e) => return Err(e.clone()),
                };
                let cost = node.cost + plan.travel_deg;
                let angle = plan.exit_deg_normalized();
                let key = key_of(angle);
                let better = match next.get(&key) {
                    Some(existing) => cost + EPS < existing.cost,
                    None => true,
                };
                if better {
                    next.insert(
                        key,
                        Node {
                            cost,
                            angle,
                            prev: Some(prev_key),
                            plan: Some(plan),
                        },
                    );
                }
            }
        }
        if next.is_empty() {
            return Err(PlanError::PlannerInfeasible { column: j });
        }
        layers.push(next);
    }

    // Walk back from the cheapest final state.
    let last = layers.last().unwrap();
    let (&best_key, _) = last
        .iter()
        .min_by(|a, b| a.1.cost.partial_cmp(&b.1.cost).unwrap().then(a.0.cmp(b.0)))
        .unwrap();
    let mut column_plans: Vec<ColumnPlan> = Vec::with_capacity(columns.len());
    let mut key = best_key;
    for layer in layers.iter().skip(1).rev() {
        let node = &layer[&key];
        column_plans.push(node.plan.clone().unwrap());
        key = node.prev.unwrap();
    }
    column_plans.reverse();
    let initial_angle_deg = layers[0][&key].angle;
    let total_travel_deg: f64 = column_plans.iter().map(|p| p.travel_deg).sum();

    // Interleave paper moves: X by one column pitch inside a cell, X by the
    // remaining cell pitch between cells, carriage return plus line feed
    // between lines.
    let mut actions: Vec<PlanAction> = Vec::new();
    let mut cell_positions: Vec<CellPosition> = Vec::new();
    let x0 = layout.margin_mm;
    let y0 = layout.margin_mm;
    let mut plans = column_plans.into_iter();
    for (cell_idx, _) in cells.iter().enumerate() {
        let line = cell_idx / cells_per_line;
        let index = cell_idx % cells_per_line;
        let x = x0 + index as f64 * layout.cell_pitch_mm;
        let y = y0 + line as f64 * layout.line_pitch_mm;
        cell_positions.push(CellPosition {
            line,
            index,
            x_mm: x,
            y_mm: y,
        });
        if cell_idx > 0 {
            if index == 0 {
                // New line: return the carriage and feed the paper.
                let prev_x =
                    x0 + (cells_per_line - 1) as f64 * layout.cell_pitch_mm
                        + layout.column_pitch_mm;
                actions.push(PlanAction::Move {
                    axis: Axis::X,
                    mm: x - prev_x,
                });
                actions.push(PlanAction::Move {
                    axis: Axis::Y,
                    mm: layout.line_pitch_mm,
                });
            } else {
                actions.push(PlanAction::Move {
                    axis: Axis::X,
                    mm: layout.cell_pitch_mm - layout.column_pitch_mm,
                });
            }
        }
        actions.push(PlanAction::Column(plans.next().unwrap()));
        actions.push(PlanAction::Move {
            axis: Axis::X,
            mm: layout.column_pitch_mm,
        });
        actions.push(PlanAction::Column(plans.next().unwrap()));
    }

    Ok(JobPlan {
        initial_angle_deg,
        actions,
        total_travel_deg,
        crossing_margin_deg: margin_deg,
        cells_per_line,
        cell_positions,
    })
}

/// Static plan checker, independent of the simulator: shaft-angle
/// continuity, exact strike sets, and crossing overshoot. (Sweeps during
/// paper motion are unrepresentable in a [`JobPlan`]: every sweep belongs
/// to a column action.) Returns all violations found; an empty list means
/// the plan is consistent.
pub fn verify_plan(plan: &JobPlan, assembly: &CamAssembly) -> Vec<Violation> {
    let margin = plan.crossing_margin_deg;
    let mut violations = Vec::new();
    let mut shaft = plan.initial_angle_deg.rem_euclid(360.0);
    for (idx, action) in plan.actions.iter().enumerate() {
        let PlanAction::Column(col) = action else {
            continue;
        };
        if angle_distance(col.entry_deg, shaft) > 1e-6 {
            violations.push(Violation::DiscontinuousShaft { action: idx });
        }
        let mut pos = col.entry_deg;
        let mut struck = 0u8;
        for sweep in &col.sweeps {
            if (sweep.from_deg - pos).abs() > 1e-6 {
                violations.push(Violation::DiscontinuousShaft { action: idx });
            }
            for (cam, q) in segment_crossings(assembly, sweep.from_deg, sweep.to_deg) {
                let bit = 1u8 << cam;
                if col.pattern.mask() & bit == 0 {
                    violations.push(Violation::SpuriousStrike { action: idx, cam });
                } else if (sweep.to_deg - q).abs() + EPS < margin {
                    violations.push(Violation::InsufficientOvershoot { action: idx, cam });
                }
                struck |= bit;
            }
            pos = sweep.to_deg;
        }
        for cam in 0..CAM_COUNT {
            let bit = 1u8 << cam;
            if col.pattern.mask() & bit != 0 && struck & bit == 0 {
                violations.push(Violation::MissingStrike { action: idx, cam });
            }
        }
        shaft = pos.rem_euclid(360.0);
    }
    violations
}

/// Circular distance between two angles in degrees.
fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}
