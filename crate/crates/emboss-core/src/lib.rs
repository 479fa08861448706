//! Planner and deterministic simulator for a single-servo braille embosser head.
//!
//! The modeled head carries three cam-follower pins spaced 120 degrees around
//! one shaft; which pin strikes the paper is selected purely by how far the
//! servo rotates the shaft. Embossing proceeds column by column: the shaft
//! sweeps across the target cams' lobes while the paper dwells, then a stepper
//! axis shifts the paper and the next column is struck.
//!
//! The crate is organized along that pipeline:
//!
//! * [`braille`] — text to six-dot cells and back, plus the column split the
//!   head actually prints.
//! * [`mechanism`] — cam lobe geometry: follower motion law, pressure angle,
//!   strike-force envelope, and polar profile export.
//! * [`planner`] — per-column sweep schedules that cross exactly the required
//!   cam peaks, and a job-level dynamic program that picks parking arcs to
//!   minimize total shaft rotation.
//! * [`sim`] — machine parameters, discrete-event execution of a plan onto
//!   virtual paper, read-back verification, and timing reports.
//! * [`config`] — the JSON machine-configuration file.
//! * [`export`] — byte-stable JSON/CSV/SVG emitters.
//! * [`batch`] — corpus runners; data-parallel via rayon when the `parallel`
//!   feature (default) is enabled, otherwise sequential.

pub mod batch;
pub mod braille;
pub mod config;
pub mod export;
pub mod mechanism;
pub mod planner;
pub mod sim;

pub use braille::{BrailleCell, ColumnPattern, TranslationTable};
pub use config::MachineConfigFile;
pub use mechanism::{CamAssembly, CamProfile, MotionLaw};
pub use planner::{plan_job, verify_plan, JobPlan, ParkingArc};
pub use sim::{execute, read_back, MachineConfig, SimReport, VirtualPaper};
