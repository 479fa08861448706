//! `emboss` — plan and simulate braille embossing on the three-cam head.
//!
//! Subcommands: `translate`, `plan`, `simulate`, `cam`, `dump-config`.
//! Exit codes are stable for scripting: 0 success, 2 translation error,
//! 3 layout overflow, 4 verification failure, 5 mechanism error, 1 anything
//! else (I/O, bad configuration, malformed plan files).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use emboss_core::braille::{BrailleCell, TranslationTable};
use emboss_core::config::MachineConfigFile;
use emboss_core::export;
use emboss_core::planner::{plan_job, JobPlan, PlanAction, PlanError};
use emboss_core::sim::{axis_time, execute, read_back, servo_time, MachineConfig, SimError};

const EXIT_TRANSLATION: u8 = 2;
const EXIT_LAYOUT: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;
const EXIT_MECHANISM: u8 = 5;
const EXIT_OTHER: u8 = 1;

/// Configuration path fallback when --config is not given.
const CONFIG_ENV: &str = "EMBOSS_CONFIG";

#[derive(Parser)]
#[command(
    name = "emboss",
    version,
    about = "Planner and simulator for a single-servo three-cam braille embosser head"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Machine configuration JSON (falls back to $EMBOSS_CONFIG, then
    /// built-in defaults)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Translation table overrides, one `<char><TAB><dots>` per line
    #[arg(long, global = true, value_name = "PATH")]
    table: Option<PathBuf>,

    /// Write the main output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Also write an SVG rendering (page map or polar cam plot)
    #[arg(long, global = true, value_name = "PATH")]
    svg: Option<PathBuf>,

    /// Also write a CSV export (dot list or cam surface)
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,

    /// Timestamp generated outputs (off by default so outputs are
    /// byte-reproducible)
    #[arg(long, global = true)]
    stamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Translate text to braille cells and print them
    Translate {
        /// Text to translate (or use --file)
        text: Option<String>,
        /// Read the text from a UTF-8 file
        #[arg(long, value_name = "PATH", conflicts_with = "text")]
        file: Option<PathBuf>,
    },
    /// Compute a strike schedule and emit it as JSON
    Plan {
        /// Text to plan
        text: String,
    },
    /// Plan (or load a plan), run the machine simulation, verify by
    /// read-back, and emit a report
    Simulate {
        /// Text to simulate (or use --plan-file)
        text: Option<String>,
        /// Run a previously emitted plan JSON instead of planning text
        #[arg(long, value_name = "PATH", conflicts_with = "text")]
        plan_file: Option<PathBuf>,
    },
    /// Print cam design figures and export the lobe surface
    Cam {
        /// Polar samples for the CSV/SVG exports
        #[arg(long, default_value_t = 360)]
        samples: usize,
    },
    /// Print the fully resolved machine configuration
    DumpConfig,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn other(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_OTHER,
            message: message.into(),
        }
    }
}

impl From<emboss_core::braille::BrailleError> for Failure {
    fn from(e: emboss_core::braille::BrailleError) -> Self {
        Failure {
            code: EXIT_TRANSLATION,
            message: e.to_string(),
        }
    }
}

impl From<PlanError> for Failure {
    fn from(e: PlanError) -> Self {
        let code = match e {
            PlanError::LayoutOverflow(_) => EXIT_LAYOUT,
            PlanError::Infeasible { .. } | PlanError::PlannerInfeasible { .. } => {
                EXIT_VERIFICATION
            }
            PlanError::InvalidMargin { .. } => EXIT_OTHER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        Failure {
            code: EXIT_VERIFICATION,
            message: e.to_string(),
        }
    }
}

impl From<emboss_core::mechanism::MechanismError> for Failure {
    fn from(e: emboss_core::mechanism::MechanismError) -> Self {
        Failure {
            code: EXIT_MECHANISM,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (config_file, config) = load_config(cli.config.as_deref())?;
    let table = load_table(cli.table.as_deref())?;
    let stamp = cli.stamp.then(timestamp);
    let stamp = stamp.as_deref();

    match &cli.command {
        Command::Translate { text, file } => {
            let text = input_text(text.as_deref(), file.as_deref())?;
            cmd_translate(&text, &table, cli.out.as_deref())
        }
        Command::Plan { text } => cmd_plan(text, &table, &config, cli.out.as_deref()),
        Command::Simulate { text, plan_file } => cmd_simulate(
            text.as_deref(),
            plan_file.as_deref(),
            &table,
            &config,
            &cli,
            stamp,
        ),
        Command::Cam { samples } => cmd_cam(*samples, &config, &cli, stamp),
        Command::DumpConfig => emit(cli.out.as_deref(), &config_file.to_json()),
    }
}

fn load_config(path: Option<&Path>) -> Result<(MachineConfigFile, MachineConfig), Failure> {
    let path = path
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let file = match path {
        Some(p) => {
            let text = fs::read_to_string(&p)
                .map_err(|e| Failure::other(format!("cannot read {}: {e}", p.display())))?;
            MachineConfigFile::from_json(&text)
                .map_err(|e| Failure::other(e.to_string()))?
        }
        None => MachineConfigFile::default(),
    };
    let machine = file
        .clone()
        .into_machine()
        .map_err(|e| Failure::other(e.to_string()))?;
    Ok((file, machine))
}

fn load_table(path: Option<&Path>) -> Result<TranslationTable, Failure> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::other(format!("cannot read {}: {e}", p.display())))?;
            Ok(TranslationTable::with_overrides(&text)?)
        }
        None => Ok(TranslationTable::default()),
    }
}

fn input_text(text: Option<&str>, file: Option<&Path>) -> Result<String, Failure> {
    match (text, file) {
        (Some(t), None) => Ok(t.to_string()),
        (None, Some(p)) => fs::read_to_string(p)
            .map_err(|e| Failure::other(format!("cannot read {}: {e}", p.display()))),
        (None, None) => Err(Failure::other("provide TEXT or --file")),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, content)
            .map_err(|e| Failure::other(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn timestamp() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{secs}")
}

fn cmd_translate(
    text: &str,
    table: &TranslationTable,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let cells = table.encode(text)?;
    let mut output = String::new();
    if !cells.is_empty() {
        for cell in &cells {
            output.push(cell.unicode());
        }
        output.push('\n');
        for (i, cell) in cells.iter().enumerate() {
            if cell.is_blank() {
                output.push_str(&format!("{i}: blank\n"));
            } else {
                let dots: Vec<String> =
                    cell.dots().iter().map(|d| d.to_string()).collect();
                output.push_str(&format!("{i}: dots {}\n", dots.join(",")));
            }
        }
    }
    emit(out, &output)
}

/// Wall time the plan would take: sweeps at the shaft rate plus paper moves.
fn estimate_time(plan: &JobPlan, config: &MachineConfig) -> Result<f64, Failure> {
    let mut total = 0.0;
    for action in &plan.actions {
        match action {
            PlanAction::Column(col) => {
                for sweep in &col.sweeps {
                    total += servo_time(sweep.length_deg(), &config.servo);
                }
            }
            PlanAction::Move { axis, mm } => {
                let spec = match axis {
                    emboss_core::planner::Axis::X => &config.axis_x,
                    emboss_core::planner::Axis::Y => &config.axis_y,
                };
                total += axis_time(mm.abs(), spec)?;
            }
        }
    }
    Ok(total)
}

fn cmd_plan(
    text: &str,
    table: &TranslationTable,
    config: &MachineConfig,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let cells = table.encode(text)?;
    let plan = plan_job(
        &cells,
        &config.layout,
        &config.cam,
        config.crossing_margin_deg,
    )?;
    let json = export::plan_to_json(&plan);
    // Summary on stderr so stdout stays pure JSON.
    eprintln!(
        "columns {}, total travel {:.4} deg, estimated time {:.6} s",
        plan.column_count(),
        plan.total_travel_deg,
        estimate_time(&plan, config)?
    );
    emit(out, &json)
}

/// Intended cells of a loaded plan: consecutive column pairs, with the
/// unreadable trailing blanks of the last line stripped.
fn plan_intended_cells(plan: &JobPlan) -> Vec<BrailleCell> {
    use emboss_core::braille::ColumnPattern;
    let columns: Vec<_> = plan
        .actions
        .iter()
        .filter_map(|a| match a {
            PlanAction::Column(c) => Some(c.pattern),
            _ => None,
        })
        .collect();
    let mut cells: Vec<BrailleCell> = columns
        .chunks(2)
        .map(|pair| {
            let left = pair[0];
            let right = pair.get(1).copied().unwrap_or(ColumnPattern::BLANK);
            BrailleCell::from_columns(left, right)
        })
        .collect();
    while cells.last().is_some_and(|c| c.is_blank()) {
        cells.pop();
    }
    cells
}

fn cmd_simulate(
    text: Option<&str>,
    plan_file: Option<&Path>,
    table: &TranslationTable,
    config: &MachineConfig,
    cli: &Cli,
    stamp: Option<&str>,
) -> Result<(), Failure> {
    let (plan, source_text) = match (text, plan_file) {
        (Some(t), None) => {
            let cells = table.encode(t)?;
            let plan = plan_job(
                &cells,
                &config.layout,
                &config.cam,
                config.crossing_margin_deg,
            )?;
            (plan, Some(t.to_string()))
        }
        (None, Some(p)) => {
            let json = fs::read_to_string(p)
                .map_err(|e| Failure::other(format!("cannot read {}: {e}", p.display())))?;
            let plan = export::plan_from_json(&json, config)
                .map_err(|e| Failure::other(e.to_string()))?;
            (plan, None)
        }
        (None, None) => return Err(Failure::other("provide TEXT or --plan-file")),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };

    let (report, paper) = execute(&plan, config)?;
    let read_cells = read_back(&paper, &config.layout)?;

    let (roundtrip_ok, char_count) = match &source_text {
        Some(text) => {
            let decoded = table.decode(&read_cells).unwrap_or_default();
            (decoded == *text, text.chars().count())
        }
        None => {
            let intended = plan_intended_cells(&plan);
            let chars = table
                .decode(&read_cells)
                .map(|t| t.chars().count())
                .unwrap_or(0);
            (read_cells == intended, chars)
        }
    };
    let verdict = if roundtrip_ok { "ok" } else { "mismatch" };
    let report = report.with_throughput(char_count);
    let json = export::report_to_json(&report, verdict, stamp);

    if let Some(csv_path) = &cli.csv {
        emit(Some(csv_path), &export::paper_csv(&paper))?;
    }
    if let Some(svg_path) = &cli.svg {
        emit(Some(svg_path), &export::paper_svg(&paper, &config.layout, stamp))?;
    }
    emit(cli.out.as_deref(), &json)?;

    if !roundtrip_ok || report.spurious_dot_count > 0 {
        return Err(Failure {
            code: EXIT_VERIFICATION,
            message: format!(
                "verification failed: roundtrip {verdict}, {} spurious dots",
                report.spurious_dot_count
            ),
        });
    }
    Ok(())
}

fn cmd_cam(
    samples: usize,
    config: &MachineConfig,
    cli: &Cli,
    stamp: Option<&str>,
) -> Result<(), Failure> {
    if samples < 8 {
        return Err(Failure::other("--samples must be at least 8"));
    }
    let profile = config.cam.profile(0);
    let force = profile.strike_force_envelope(config.servo.shaft_torque_nm())?;
    let mut output = String::new();
    output.push_str(&format!(
        "max pressure angle: {:.2} deg\n",
        profile.max_pressure_angle()
    ));
    output.push_str(&format!(
        "strike force envelope: {:.1} N (required: {:.1} N)\n",
        force, config.layout.emboss_force_required_n
    ));
    if let Some(csv_path) = &cli.csv {
        emit(Some(csv_path), &export::profile_csv(profile, samples))?;
    }
    if let Some(svg_path) = &cli.svg {
        emit(Some(svg_path), &export::profile_svg(profile, samples, stamp))?;
    }
    emit(cli.out.as_deref(), &output)
}
