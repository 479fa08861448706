//! Byte-stable emitters for plans, reports, profile exports and page maps.
//!
//! Everything here is written by hand with fixed float formatting (angles
//! and millimetres with 4 decimals, seconds with 6) so identical inputs
//! produce identical bytes and golden-file diffs stay clean. serde_json is
//! used only for parsing plan files back in.

use thiserror::Error;

use crate::braille::ColumnPattern;
use crate::mechanism::CamProfile;
use crate::planner::{
    segment_crossings, Axis, ColumnPlan, JobPlan, ParkingArc, PlanAction, SweepSegment,
};
use crate::sim::{LayoutSpec, MachineConfig, SimEvent, SimReport, VirtualPaper};

#[derive(Debug, Error)]
pub enum PlanFileError {
    #[error("plan parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed plan file: {0}")]
    Malformed(String),
}

/// Degrees and millimetres: 4 decimals.
fn f4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// Seconds: 6 decimals.
fn f6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Serializes a plan to the interchange JSON document:
/// `{"initial_angle_deg":..,"actions":[..],"total_travel_deg":..}` with
/// column actions `{"type":"column","entry":..,"sweeps":[{"from":..,
/// "to":..}],"exit_arc":..}` and moves `{"type":"move","axis":"X","mm":..}`.
pub fn plan_to_json(plan: &JobPlan) -> String {
    let mut out = String::new();
    out.push_str("{\"initial_angle_deg\":");
    out.push_str(&f4(plan.initial_angle_deg));
    out.push_str(",\"actions\":[");
    for (i, action) in plan.actions.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        match action {
            PlanAction::Column(col) => {
                out.push_str("{\"type\":\"column\",\"entry\":");
                out.push_str(&f4(col.entry_deg));
                out.push_str(",\"sweeps\":[");
                for (j, sweep) in col.sweeps.iter().enumerate() {
                    if j > 0 {
                        out.push(',');
                    }
                    out.push_str("{\"from\":");
                    out.push_str(&f4(sweep.from_deg));
                    out.push_str(",\"to\":");
                    out.push_str(&f4(sweep.to_deg));
                    out.push('}');
                }
                out.push_str("],\"exit_arc\":");
                out.push_str(&col.exit_arc.index().to_string());
                out.push('}');
            }
            PlanAction::Move { axis, mm } => {
                out.push_str("{\"type\":\"move\",\"axis\":\"");
                out.push_str(axis.label());
                out.push_str("\",\"mm\":");
                out.push_str(&f4(*mm));
                out.push('}');
            }
        }
    }
    out.push_str("],\"total_travel_deg\":");
    out.push_str(&f4(plan.total_travel_deg));
    out.push_str("}\n");
    out
}

/// Parses a plan document back into a runnable [`JobPlan`]. Strike sets and
/// travel are recomputed from the geometry in `config`, never trusted from
/// the file; each column's pattern is taken to be exactly what its sweeps
/// strike.
pub fn plan_from_json(text: &str, config: &MachineConfig) -> Result<JobPlan, PlanFileError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let bad = |m: &str| PlanFileError::Malformed(m.to_string());
    let obj = value.as_object().ok_or_else(|| bad("expected an object"))?;
    let initial = obj
        .get("initial_angle_deg")
        .and_then(|v| v.as_f64())
        .ok_or_else(|| bad("missing initial_angle_deg"))?;
    let actions_json = obj
        .get("actions")
        .and_then(|v| v.as_array())
        .ok_or_else(|| bad("missing actions array"))?;

    let mut actions = Vec::with_capacity(actions_json.len());
    let mut total_travel = 0.0;
    for action in actions_json {
        let kind = action
            .get("type")
            .and_then(|v| v.as_str())
            .ok_or_else(|| bad("action without type"))?;
        match kind {
            "column" => {
                let entry = action
                    .get("entry")
                    .and_then(|v| v.as_f64())
                    .ok_or_else(|| bad("column without entry"))?;
                let sweeps_json = action
                    .get("sweeps")
                    .and_then(|v| v.as_array())
                    .ok_or_else(|| bad("column without sweeps"))?;
                let exit_arc = action
                    .get("exit_arc")
                    .and_then(|v| v.as_u64())
                    .and_then(|v| ParkingArc::new(v as usize))
                    .ok_or_else(|| bad("column without a valid exit_arc"))?;
                let mut sweeps = Vec::with_capacity(sweeps_json.len());
                let mut exit = entry;
                let mut travel = 0.0;
                let mut struck = 0u8;
                for sweep in sweeps_json {
                    let from = sweep
                        .get("from")
                        .and_then(|v| v.as_f64())
                        .ok_or_else(|| bad("sweep without from"))?;
                    let to = sweep
                        .get("to")
                        .and_then(|v| v.as_f64())
                        .ok_or_else(|| bad("sweep without to"))?;
                    let mut strikes: Vec<usize> = segment_crossings(&config.cam, from, to)
                        .into_iter()
                        .map(|(cam, _)| cam)
                        .collect();
                    strikes.sort_unstable();
                    strikes.dedup();
                    for &cam in &strikes {
                        struck |= 1 << cam;
                    }
                    travel += (to - from).abs();
                    exit = to;
                    sweeps.push(SweepSegment {
                        from_deg: from,
                        to_deg: to,
                        strikes,
                    });
                }
                total_travel += travel;
                actions.push(PlanAction::Column(ColumnPlan {
                    pattern: ColumnPattern::from_mask(struck)
                        .expect("strike mask uses three bits"),
                    entry_deg: entry,
                    sweeps,
                    exit_deg: exit,
                    exit_arc,
                    travel_deg: travel,
                }));
            }
            "move" => {
                let axis = match action.get("axis").and_then(|v| v.as_str()) {
                    Some("X") => Axis::X,
                    Some("Y") => Axis::Y,
                    _ => return Err(bad("move without a valid axis")),
                };
                let mm = action
                    .get("mm")
                    .and_then(|v| v.as_f64())
                    .ok_or_else(|| bad("move without mm"))?;
                actions.push(PlanAction::Move { axis, mm });
            }
            other => return Err(bad(&format!("unknown action type {other:?}"))),
        }
    }

    Ok(JobPlan {
        initial_angle_deg: initial,
        actions,
        total_travel_deg: total_travel,
        crossing_margin_deg: config.crossing_margin_deg,
        cells_per_line: config.layout.cells_per_line().unwrap_or(0),
        cell_positions: Vec::new(),
    })
}

/// Serializes a simulation report. `roundtrip` is the caller's verdict
/// ("ok", "mismatch", or "n/a" when there was no source text); `stamp`
/// appends a `generated_at` field and is omitted by default so outputs stay
/// byte-identical across runs.
pub fn report_to_json(report: &SimReport, roundtrip: &str, stamp: Option<&str>) -> String {
    fn opt_f6(v: Option<f64>) -> String {
        v.map_or("null".into(), f6)
    }
    let mut out = String::new();
    out.push_str("{\"total_time_s\":");
    out.push_str(&f6(report.total_time_s));
    out.push_str(",\"char_count\":");
    out.push_str(
        &report
            .char_count
            .map_or("null".to_string(), |c| c.to_string()),
    );
    out.push_str(",\"chars_per_second\":");
    out.push_str(&opt_f6(report.chars_per_second));
    out.push_str(",\"industrial_ratio\":");
    out.push_str(&opt_f6(report.industrial_ratio));
    out.push_str(",\"home_use\":");
    out.push_str(&report.home_use.map_or("null".to_string(), |b| b.to_string()));
    out.push_str(",\"strike_count\":");
    out.push_str(&report.strike_count.to_string());
    out.push_str(",\"spurious_dot_count\":");
    out.push_str(&report.spurious_dot_count.to_string());
    out.push_str(",\"min_available_force_n\":");
    out.push_str(&f6(report.min_available_force_n));
    out.push_str(",\"emboss_force_required_n\":");
    out.push_str(&f6(report.emboss_force_required_n));
    out.push_str(",\"force_ok\":");
    out.push_str(&report.force_ok().to_string());
    out.push_str(",\"roundtrip\":\"");
    out.push_str(roundtrip);
    out.push('"');
    if let Some(when) = stamp {
        out.push_str(",\"generated_at\":\"");
        out.push_str(when);
        out.push('"');
    }
    out.push_str(",\"events\":[");
    for (i, event) in report.events.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        match event {
            SimEvent::Sweep {
                from_deg,
                to_deg,
                t_start_s,
                t_end_s,
            } => {
                out.push_str("{\"type\":\"sweep\",\"from_deg\":");
                out.push_str(&f4(*from_deg));
                out.push_str(",\"to_deg\":");
                out.push_str(&f4(*to_deg));
                out.push_str(",\"t_start_s\":");
                out.push_str(&f6(*t_start_s));
                out.push_str(",\"t_end_s\":");
                out.push_str(&f6(*t_end_s));
                out.push('}');
            }
            SimEvent::Strike {
                cam,
                column,
                x_mm,
                y_mm,
                t_s,
            } => {
                out.push_str("{\"type\":\"strike\",\"cam\":");
                out.push_str(&cam.to_string());
                out.push_str(",\"column\":");
                out.push_str(&column.to_string());
                out.push_str(",\"x_mm\":");
                out.push_str(&f4(*x_mm));
                out.push_str(",\"y_mm\":");
                out.push_str(&f4(*y_mm));
                out.push_str(",\"t_s\":");
                out.push_str(&f6(*t_s));
                out.push('}');
            }
            SimEvent::Move {
                axis,
                mm,
                t_start_s,
                t_end_s,
            } => {
                out.push_str("{\"type\":\"move\",\"axis\":\"");
                out.push_str(axis.label());
                out.push_str("\",\"mm\":");
                out.push_str(&f4(*mm));
                out.push_str(",\"t_start_s\":");
                out.push_str(&f6(*t_start_s));
                out.push_str(",\"t_end_s\":");
                out.push_str(&f6(*t_end_s));
                out.push('}');
            }
        }
    }
    out.push_str("]}\n");
    out
}

/// Cam surface as polar samples: header plus one `theta,radius` line per
/// sample, 6 decimals.
pub fn profile_csv(profile: &CamProfile, samples: usize) -> String {
    let mut out = String::from("theta_deg,radius_mm\n");
    for (theta, radius) in profile.points(samples) {
        out.push_str(&f6(theta));
        out.push(',');
        out.push_str(&f6(radius));
        out.push('\n');
    }
    out
}

/// Embossed dots as `x_mm,y_mm,peak_mm` lines.
pub fn paper_csv(paper: &VirtualPaper) -> String {
    let mut out = String::from("x_mm,y_mm,peak_mm\n");
    for dot in paper.dots() {
        out.push_str(&f6(dot.x_mm));
        out.push(',');
        out.push_str(&f6(dot.y_mm));
        out.push(',');
        out.push_str(&f6(dot.peak_mm));
        out.push('\n');
    }
    out
}

fn px(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Polar plot of one cam: base circle dashed, lobe outline solid.
pub fn profile_svg(profile: &CamProfile, samples: usize, stamp: Option<&str>) -> String {
    let scale = 20.0; // px per mm
    let pad = 20.0;
    let rmax = profile.base_radius() + profile.lift();
    let size = 2.0 * (rmax * scale + pad);
    let c = size / 2.0;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{w}\" \
         viewBox=\"0 0 {w} {w}\">\n",
        w = px(size)
    ));
    if let Some(when) = stamp {
        out.push_str(&format!("<!-- generated {when} -->\n"));
    }
    out.push_str(&format!(
        "<circle cx=\"{c}\" cy=\"{c}\" r=\"{r}\" fill=\"none\" stroke=\"#999\" \
         stroke-dasharray=\"4 3\"/>\n",
        c = px(c),
        r = px(profile.base_radius() * scale)
    ));
    out.push_str("<path d=\"");
    for (i, (theta, radius)) in profile.points(samples).iter().enumerate() {
        let t = theta.to_radians();
        let x = c + radius * scale * t.cos();
        let y = c - radius * scale * t.sin();
        out.push_str(if i == 0 { "M" } else { " L" });
        out.push_str(&px(x));
        out.push(' ');
        out.push_str(&px(y));
    }
    out.push_str(" Z\" fill=\"none\" stroke=\"#000\"/>\n</svg>\n");
    out
}

/// Page map of the embossed dots, one circle per dot at 10 px/mm.
pub fn paper_svg(paper: &VirtualPaper, layout: &LayoutSpec, stamp: Option<&str>) -> String {
    let scale = 10.0;
    let w = layout.paper_width_mm * scale;
    let h = layout.paper_height_mm * scale;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n",
        w = px(w),
        h = px(h)
    ));
    if let Some(when) = stamp {
        out.push_str(&format!("<!-- generated {when} -->\n"));
    }
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#fff\" stroke=\"#ccc\"/>\n",
        w = px(w),
        h = px(h)
    ));
    for dot in paper.dots() {
        out.push_str(&format!(
            "<circle cx=\"{x}\" cy=\"{y}\" r=\"6.00\" fill=\"#000\"/>\n",
            x = px(dot.x_mm * scale),
            y = px(dot.y_mm * scale)
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braille::TranslationTable;
    use crate::planner::plan_job;

    fn plan_for(text: &str) -> (JobPlan, MachineConfig) {
        let config = MachineConfig::default();
        let cells = TranslationTable::default().encode(text).unwrap();
        let plan = plan_job(
            &cells,
            &config.layout,
            &config.cam,
            config.crossing_margin_deg,
        )
        .unwrap();
        (plan, config)
    }

    #[test]
    fn plan_json_shape_and_determinism() {
        let (plan, _) = plan_for("a");
        let json = plan_to_json(&plan);
        assert!(json.starts_with("{\"initial_angle_deg\":"));
        assert!(json.contains("\"type\":\"column\""));
        assert!(json.contains("\"mm\":2.5400"));
        assert!(json.contains("\"total_travel_deg\":"));
        assert_eq!(json, plan_to_json(&plan));
        // Valid JSON as far as serde is concerned.
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["actions"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn plan_json_round_trips_byte_identically() {
        let (plan, config) = plan_for("Cat 9");
        let json = plan_to_json(&plan);
        let loaded = plan_from_json(&json, &config).unwrap();
        assert_eq!(plan_to_json(&loaded), json);
        assert!((loaded.total_travel_deg - plan.total_travel_deg).abs() < 1e-3);
        assert_eq!(loaded.column_count(), plan.column_count());
    }

    #[test]
    fn plan_loader_rejects_garbage() {
        let config = MachineConfig::default();
        assert!(plan_from_json("[]", &config).is_err());
        assert!(plan_from_json("{\"actions\":[]}", &config).is_err());
        assert!(plan_from_json(
            "{\"initial_angle_deg\":0,\"actions\":[{\"type\":\"warp\"}],\"total_travel_deg\":0}",
            &config
        )
        .is_err());
    }

    #[test]
    fn report_json_has_fixed_fields() {
        let report = SimReport {
            events: vec![],
            total_time_s: 0.11,
            strike_count: 1,
            spurious_dot_count: 0,
            min_available_force_n: 269.5,
            emboss_force_required_n: 15.0,
            char_count: None,
            chars_per_second: None,
            industrial_ratio: None,
            home_use: None,
        }
        .with_throughput(1);
        let json = report_to_json(&report, "ok", None);
        assert!(json.starts_with("{\"total_time_s\":0.110000"));
        assert!(json.contains("\"roundtrip\":\"ok\""));
        assert!(json.contains("\"force_ok\":true"));
        assert!(json.contains("\"chars_per_second\":9.090909"));
        assert!(!json.contains("generated_at"));
        let stamped = report_to_json(&report, "ok", Some("2026-01-01T00:00:00Z"));
        assert!(stamped.contains("\"generated_at\":\"2026-01-01T00:00:00Z\""));
    }

    #[test]
    fn profile_csv_has_header_plus_samples() {
        let profile = CamProfile::default();
        let csv = profile_csv(&profile, 360);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 361);
        assert_eq!(lines[0], "theta_deg,radius_mm");
        assert!(lines[1].starts_with("0.500000,"));
    }

    #[test]
    fn svg_outputs_are_deterministic() {
        let profile = CamProfile::default();
        assert_eq!(
            profile_svg(&profile, 90, None),
            profile_svg(&profile, 90, None)
        );
        let (plan, config) = plan_for("hi");
        let (_, paper) = crate::sim::execute(&plan, &config).unwrap();
        let svg = paper_svg(&paper, &config.layout, None);
        assert_eq!(svg, paper_svg(&paper, &config.layout, None));
        assert_eq!(svg.matches("<circle").count(), paper.len());
        assert_eq!(paper_csv(&paper).lines().count(), paper.len() + 1);
    }

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(f4(-0.0), "0.0000");
        assert_eq!(f6(-1e-12), "0.000000");
        assert_eq!(f4(-0.00004), "0.0000");
    }
}
