//! `betti`: barcodes, Betti matchings and losses of 3D volumes from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use betti_core::volume::RawDtype;
use betti_core::{DimSet, Options};
use clap::{Args, Parser, Subcommand};

/// Cubical persistence and Betti matching for 3D volumes.
///
/// Volumes are read as superlevel filtrations (bright = foreground) unless
/// --sublevel is given.
#[derive(Parser, Debug)]
#[command(name = "betti", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Persistence barcode of one volume.
    Barcode {
        volume: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Recompute with the dense reference reduction and compare.
        #[arg(long)]
        verify: bool,
    },
    /// Betti matching between two volumes of the same shape.
    Match {
        volume_i: PathBuf,
        volume_j: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Include the loss breakdown and feature-count gaps.
        #[arg(long)]
        loss: bool,
        /// Include critical voxels with their gradient targets.
        #[arg(long)]
        targets: bool,
        /// Recompute with the dense reference reduction and compare.
        #[arg(long)]
        verify: bool,
    },
    /// Repeated timing of a barcode (one volume) or matching (two volumes).
    Bench {
        #[arg(num_args = 1..=2, required = true)]
        volumes: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
        /// Number of repetitions.
        #[arg(long, default_value_t = 10)]
        repeat: usize,
        /// Time the cumulative optimization ladder, shuffled anew in every repetition.
        #[arg(long)]
        ladder: bool,
        /// Seed for the ladder order.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit JSON instead of a text table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Homology dimensions to compute, comma separated.
    #[arg(long, default_value = "0,1,2", value_parser = parse_dims)]
    pub dims: DimSet,
    /// Treat low values as foreground-first (sublevel filtration).
    #[arg(long)]
    pub sublevel: bool,
    /// Match with the strict image barcode only (no reverse image pairs).
    #[arg(long)]
    pub no_reverse_pairs: bool,
    /// Binarize inputs: values above the threshold become 1, others 0.
    #[arg(long, value_name = "THRESHOLD", num_args = 0..=1, default_missing_value = "0.5")]
    pub binarize: Option<f64>,
    /// Shape of headerless raw inputs, e.g. 64,64,64.
    #[arg(long, value_parser = parse_shape, requires = "dtype")]
    pub shape: Option<Extents>,
    /// Element type of headerless raw inputs (u8, u16, i16, i32, f32, f64).
    #[arg(long, value_parser = parse_dtype, requires = "shape")]
    pub dtype: Option<RawDtype>,
    /// Worker threads for the parallel stages.
    #[arg(long, env = "BETTI_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Add per-stage wall times to the output metadata.
    #[arg(long)]
    pub timing: bool,
    /// Write the output here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub opts: OptFlags,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct OptFlags {
    /// Disable emergent pairs in the dimension-1 reduction.
    #[arg(long)]
    pub no_emergent_pairs: bool,
    /// Disable clearing between dimensions.
    #[arg(long)]
    pub no_clearing: bool,
    /// Disable the two-value partition sort.
    #[arg(long)]
    pub no_partition_sort: bool,
    /// Cache reduced columns as heaps instead of lists.
    #[arg(long)]
    pub no_cache_as_list: bool,
    /// Run all stages sequentially.
    #[arg(long)]
    pub no_parallel: bool,
    /// Run image union-finds separately from the comparison's.
    #[arg(long)]
    pub no_joint_union_find: bool,
    /// Do not clear image columns using the comparison's reduction.
    #[arg(long)]
    pub no_image_clearing: bool,
}

impl OptFlags {
    pub fn options(&self) -> Options {
        Options {
            emergent_pairs: !self.no_emergent_pairs,
            clearing: !self.no_clearing,
            partition_sort: !self.no_partition_sort,
            cache_as_list: !self.no_cache_as_list,
            parallel: !self.no_parallel,
            joint_union_find: !self.no_joint_union_find,
            image_clearing: !self.no_image_clearing,
        }
    }
}

fn parse_dims(s: &str) -> Result<DimSet, String> {
    DimSet::parse(s).ok_or_else(|| format!("expected a comma-separated subset of 0,1,2, got {s:?}"))
}

/// Extents of a raw volume, outermost axis first.
#[derive(Clone, Debug)]
pub struct Extents(pub Vec<usize>);

fn parse_shape(s: &str) -> Result<Extents, String> {
    let dims: Result<Vec<usize>, _> = s.split([',', 'x']).map(|p| p.trim().parse::<usize>()).collect();
    match dims {
        Ok(d) if (1..=3).contains(&d.len()) && d.iter().all(|&n| n > 0) => Ok(Extents(d)),
        _ => Err(format!("expected 1 to 3 positive extents like 64,64,64, got {s:?}")),
    }
}

fn parse_dtype(s: &str) -> Result<RawDtype, String> {
    RawDtype::parse(s).ok_or_else(|| format!("unknown dtype {s:?}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("betti: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
