//! Task generation, benchmark runs and navigation metrics.

mod benchmark;
mod metrics;
mod tasks;

pub use benchmark::{
    replay_benchmark, run_benchmark, trace_path, write_benchmark, write_boxplot_csv,
    write_distribution_csv, write_metrics_csv, write_table_csv, MethodResult, BOXPLOT_CSV_HEADER,
    DISTRIBUTION_CSV_HEADER, DISTRIBUTION_METRICS, METRICS_CSV_HEADER, TABLE_CSV_HEADER,
};
pub use metrics::{compute_metrics, BoxStats, EpisodeRecord, MetricsReport};
pub use tasks::{
    generate_tasks, read_task_endpoints, write_tasks_csv, TaskDistribution, MAX_ATTEMPTS,
    TASKS_CSV_HEADER,
};
