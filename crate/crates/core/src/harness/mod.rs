//! Experiment plumbing: seeds, experiment specs, the run matrix, summary
//! statistics, CSV/JSON output and named presets.

mod emit;
mod matrix;
mod presets;
mod seed;
mod spec;
mod stats;

pub use emit::{
    load_csv, read_csv, records_to_csv, save_csv, save_json, summaries_to_json, write_csv,
    RecordRow, CSV_HEADER,
};
pub use matrix::{
    run_matrix, run_matrix_with, run_once, workers_from_env, MatrixOutput, RunFailure,
    SizingOutcome, WORKERS_ENV,
};
pub use presets::{
    niching_lineup, preset, preset_instance, run_distance_study, DistanceRow, DistanceStudy,
    Preset, PresetName, PresetOptions, EVAL_BUDGET, PEAK_COUNTS, STRING_LENGTH,
};
pub use seed::{derive_seed, instance_id, stable_id};
pub use spec::{
    AlgorithmKind, AlgorithmSpec, ExperimentSpec, SizingSettings, IDEALIZED_CROSSOVER_RATE,
    SPEC_FORMAT_VERSION,
};
pub use stats::{
    quantile, round_significant, summarize, summarize_cells, CellKey, Observation, SummaryStats,
};
