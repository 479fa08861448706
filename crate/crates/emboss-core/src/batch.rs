//! Corpus runners: translate, plan, simulate and verify many texts.
//!
//! Each text is an independent job (planning and simulation share no
//! state), so batches are embarrassingly parallel. With the `parallel`
//! feature (on by default) [`run_texts`] fans out over rayon's thread pool;
//! without it the same call falls back to the sequential loop. Benches
//! compare the two paths on identical corpora.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::braille::{BrailleError, TranslationTable};
use crate::planner::{plan_job, verify_plan, PlanError};
use crate::sim::{execute, read_back, MachineConfig, SimError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Braille(#[from] BrailleError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Outcome of one text pushed through the full pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct TextRun {
    pub text: String,
    pub cell_count: usize,
    pub travel_deg: f64,
    pub total_time_s: f64,
    pub strike_count: usize,
    pub spurious_dots: usize,
    pub violations: usize,
    /// Text recovered from the virtual paper.
    pub read_back_text: String,
    pub round_trip_ok: bool,
}

/// Translate, plan, statically verify, simulate and read one text back.
pub fn run_text(
    text: &str,
    config: &MachineConfig,
    table: &TranslationTable,
) -> Result<TextRun, PipelineError> {
    let cells = table.encode(text)?;
    let plan = plan_job(
        &cells,
        &config.layout,
        &config.cam,
        config.crossing_margin_deg,
    )?;
    let violations = verify_plan(&plan, &config.cam).len();
    let (report, paper) = execute(&plan, config)?;
    let read_cells = read_back(&paper, &config.layout)?;
    let read_back_text = table.decode(&read_cells)?;
    Ok(TextRun {
        text: text.to_string(),
        cell_count: cells.len(),
        travel_deg: plan.total_travel_deg,
        total_time_s: report.total_time_s,
        strike_count: report.strike_count,
        spurious_dots: report.spurious_dot_count,
        violations,
        round_trip_ok: read_back_text == text,
        read_back_text,
    })
}

/// Runs a corpus, one [`TextRun`] per input, in input order. Data-parallel
/// when the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn run_texts(
    texts: &[String],
    config: &MachineConfig,
    table: &TranslationTable,
) -> Vec<Result<TextRun, PipelineError>> {
    texts
        .par_iter()
        .map(|t| run_text(t, config, table))
        .collect()
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn run_texts(
    texts: &[String],
    config: &MachineConfig,
    table: &TranslationTable,
) -> Vec<Result<TextRun, PipelineError>> {
    run_texts_sequential(texts, config, table)
}

/// The sequential loop, always available so benches can compare it against
/// the parallel path.
pub fn run_texts_sequential(
    texts: &[String],
    config: &MachineConfig,
    table: &TranslationTable,
) -> Vec<Result<TextRun, PipelineError>> {
    texts
        .iter()
        .map(|t| run_text(t, config, table))
        .collect()
}

/// Deterministic corpus of texts over the supported alphabet, built on a
/// splitmix64 stream so the same seed yields the same corpus on every
/// platform and toolchain (no RNG crate involved: frozen expectations in
/// tests must never drift). Texts never end in a space; a trailing blank
/// cell leaves no dots and cannot be read back.
pub fn sample_texts(count: usize, max_len: usize, seed: u64) -> Vec<String> {
    const WORD_CHARS: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    const PUNCT: &[u8] = b".,?'-";
    let mut state = seed;
    let mut next = move || {
        // splitmix64
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    };
    let mut pick = move |n: usize| (next() % n as u64) as usize;

    (0..count)
        .map(|_| {
            let target = 1 + pick(max_len.max(1));
            let mut text = String::new();
            while text.chars().count() < target {
                if !text.is_empty() {
                    text.push(if pick(6) == 0 {
                        PUNCT[pick(PUNCT.len())] as char
                    } else {
                        ' '
                    });
                }
                let word_len = 1 + pick(7);
                for _ in 0..word_len {
                    text.push(WORD_CHARS[pick(WORD_CHARS.len())] as char);
                }
            }
            text.chars().take(max_len).collect::<String>().trim_end().to_string()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_well_formed() {
        let a = sample_texts(50, 80, 7);
        let b = sample_texts(50, 80, 7);
        assert_eq!(a, b);
        assert_ne!(a, sample_texts(50, 80, 8));
        for text in &a {
            assert!(text.chars().count() <= 80);
            assert!(!text.ends_with(' '));
            assert!(!text.is_empty());
        }
    }

    #[test]
    fn runner_round_trips_a_small_corpus() {
        let config = MachineConfig::default();
        let table = TranslationTable::default();
        let texts = sample_texts(8, 30, 42);
        for run in run_texts(&texts, &config, &table) {
            let run = run.unwrap();
            assert!(run.round_trip_ok, "{:?} -> {:?}", run.text, run.read_back_text);
            assert_eq!(run.spurious_dots, 0);
            assert_eq!(run.violations, 0);
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let config = MachineConfig::default();
        let table = TranslationTable::default();
        let texts = sample_texts(12, 40, 3);
        let par: Vec<_> = run_texts(&texts, &config, &table)
            .into_iter()
            .map(|r| r.unwrap())
            .collect();
        let seq: Vec<_> = run_texts_sequential(&texts, &config, &table)
            .into_iter()
            .map(|r| r.unwrap())
            .collect();
        assert_eq!(par, seq);
    }

    #[test]
    fn unsupported_text_surfaces_the_error() {
        let config = MachineConfig::default();
        let table = TranslationTable::default();
        let result = run_text("naïve", &config, &table);
        assert!(matches!(result, Err(PipelineError::Braille(_))));
    }
}
