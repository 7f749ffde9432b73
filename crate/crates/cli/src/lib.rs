//! Configuration parsing, experiment drivers and CSV output built on
//! `fracab-core`.
//!
//! ```no_run
//! use fracab_cli::{parse_config, run_simulation};
//!
//! let cfg = parse_config("problem=advection\nc=1\nnx=101\nx_min=0\nx_max=1\nt_end=0.5\nnt=400")?;
//! let report = run_simulation(&cfg)?;
//! println!("{report}");
//! # Ok::<(), fracab_cli::CliError>(())
//! ```

pub mod config;
pub mod driver;
pub mod error;
pub mod output;

pub use config::{parse_config, InitialKind, Problem, RightEdge, RunConfig};
pub use driver::{
    check, convergence_study, run_simulation, simulate, stability_sweep, CheckReport,
    ConvergenceRow, RunReport, SweepRow,
};
pub use error::{CliError, ConfigError};
pub use output::{read_csv, write_csv, CsvRow};
