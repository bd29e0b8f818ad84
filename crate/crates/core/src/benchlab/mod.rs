//! Graph generators, timing harness, scaling fits and result files.

mod emit;
mod fit;
mod gen;
mod harness;

pub use emit::{parse_dat, to_csv, to_dat, to_svg, write_results};
pub use fit::{fit_scaling, Fit, FitError, MIN_ROWS};
pub use gen::{generate, generate_into, GenError, GraphClass, Kind, Weights, RNG_ALGORITHM};
pub use harness::{measure, run_benchmark, BenchConfig, BenchRow, BenchTable, Mode};

impl BenchTable {
    /// `(size, time_ms)` for rows that did not time out.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.rows.iter().filter(|r| !r.timed_out).map(|r| (r.size as f64, r.time_ms)).collect()
    }
}
