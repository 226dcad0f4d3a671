//! One module per subcommand. Each writes its CSV files into the output
//! directory and returns their paths.

pub mod calibrate;
pub mod chi_sweep;
pub mod dephasing;
pub mod floquet_check;
pub mod fluxmap;
pub mod spectrum;

use std::path::{Path, PathBuf};

use cqed_core::{Flag, SystemSpec};

use crate::config::Config;
use crate::error::CliResult;
use crate::output::ensure_dir;

/// Everything a subcommand needs besides its own config section.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: Config,
    pub system: SystemSpec,
    pub out: PathBuf,
    pub jobs: usize,
    pub seed: u64,
    pub plot: bool,
}

impl RunContext {
    pub fn new(config: Config, out: PathBuf, jobs: usize, seed: u64, plot: bool) -> CliResult<Self> {
        let system = config.system.to_spec()?;
        Ok(Self {
            config,
            system,
            out,
            jobs: jobs.max(1),
            seed,
            plot,
        })
    }

    pub fn with_jobs(&self, jobs: usize) -> Self {
        Self {
            jobs: jobs.max(1),
            ..self.clone()
        }
    }

    pub fn with_out(&self, out: &Path) -> Self {
        Self {
            out: out.to_path_buf(),
            ..self.clone()
        }
    }

    pub(crate) fn file(&self, name: &str) -> CliResult<PathBuf> {
        ensure_dir(&self.out)?;
        Ok(self.out.join(name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    ChiSweep,
    Fluxmap,
    Dephasing,
    Calibrate,
    FloquetCheck,
}

impl CommandKind {
    pub const ALL: [CommandKind; 6] = [
        CommandKind::Spectrum,
        CommandKind::ChiSweep,
        CommandKind::Fluxmap,
        CommandKind::Dephasing,
        CommandKind::Calibrate,
        CommandKind::FloquetCheck,
    ];
}

pub fn run(kind: CommandKind, ctx: &RunContext) -> CliResult<Vec<PathBuf>> {
    match kind {
        CommandKind::Spectrum => spectrum::run(ctx),
        CommandKind::ChiSweep => chi_sweep::run(ctx),
        CommandKind::Fluxmap => fluxmap::run(ctx),
        CommandKind::Dephasing => dephasing::run(ctx),
        CommandKind::Calibrate => calibrate::run(ctx),
        CommandKind::FloquetCheck => floquet_check::run(ctx),
    }
}

pub(crate) fn flag_str(flag: Option<Flag>) -> String {
    flag.map(|f| f.to_string()).unwrap_or_default()
}
