use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use betti_core::bench::{sample, Samples, Summary};
use betti_core::loss::{critical_voxels_of, loss_of};
use betti_core::oracle::{self, oracle_barcode, oracle_betti_matching, ORACLE_CELL_LIMIT};
use betti_core::report::{self, number};
use betti_core::{
    compute_barcode_timed, compute_betti_matching_timed, feature_count_metric, load_volume, Barcode,
    BettiMatchingResult, DimSet, FiltrationMode, Options, Timings, VolumeFormat, VoxelGrid,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde_json::{json, Map, Value};

use crate::{Cli, Command, Common};

pub struct CliError {
    pub code: u8,
    pub message: String,
}

const IO: u8 = 1;
const VALIDATION: u8 = 2;
const MISMATCH: u8 = 3;

fn invalid(message: impl Into<String>) -> CliError {
    CliError {
        code: VALIDATION,
        message: message.into(),
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError {
        code: IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn core_error(path: Option<&Path>, e: betti_core::Error) -> CliError {
    let code = if e.is_io() { IO } else { VALIDATION };
    let message = match path {
        Some(p) => format!("{}: {e}", p.display()),
        None => e.to_string(),
    };
    CliError { code, message }
}

pub fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Barcode { volume, common, verify } => barcode(&volume, &common, verify),
        Command::Match {
            volume_i,
            volume_j,
            common,
            loss,
            targets,
            verify,
        } => matching(&volume_i, &volume_j, &common, loss, targets, verify),
        Command::Bench {
            volumes,
            common,
            repeat,
            ladder,
            seed,
            json,
        } => bench(&volumes, &common, repeat, ladder, seed, json),
    }
}

fn configure_threads(common: &Common) {
    if let Some(n) = common.threads {
        // a second global pool cannot be installed; the first one stays in effect
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global();
    }
}

fn load(path: &Path, common: &Common) -> Result<VoxelGrid, CliError> {
    let format = match (&common.shape, common.dtype) {
        (Some(shape), Some(dtype)) => VolumeFormat::Raw {
            shape: shape.0.clone(),
            dtype,
        },
        _ => VolumeFormat::Npy,
    };
    let mode = if common.sublevel {
        FiltrationMode::Sublevel
    } else {
        FiltrationMode::Superlevel
    };
    let grid = load_volume(path, &format).map_err(|e| core_error(Some(path), e))?;
    let grid = match common.binarize {
        Some(t) if !t.is_finite() => return Err(invalid(format!("binarization threshold {t} is not finite"))),
        Some(t) => grid.binarize(t),
        None => grid,
    };
    Ok(grid.with_mode(mode))
}

fn check_oracle_size(grid: &VoxelGrid) -> Result<(), CliError> {
    let cells = oracle::cell_count(grid.shape());
    if cells > ORACLE_CELL_LIMIT {
        return Err(invalid(format!(
            "--verify needs the dense reduction, which is limited to {ORACLE_CELL_LIMIT} cells; this volume has {cells}"
        )));
    }
    Ok(())
}

fn timing_json(t: &Timings, wall: f64) -> Value {
    let stages: Map<String, Value> = t.iter().map(|(k, v)| (k.to_string(), number(v.as_secs_f64()))).collect();
    json!({ "wall": number(wall), "stages": stages })
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| io_error(Path::new("<stdout>"), e))
        }
    }
}

fn verdict(agree: bool, what: &str) -> ExitCode {
    if agree {
        eprintln!("oracle: match");
        ExitCode::SUCCESS
    } else {
        eprintln!("oracle: MISMATCH ({what})");
        ExitCode::from(MISMATCH)
    }
}

fn barcode(path: &Path, common: &Common, verify: bool) -> Result<ExitCode, CliError> {
    configure_threads(common);
    let grid = load(path, common)?;
    if verify {
        check_oracle_size(&grid)?;
    }
    let start = Instant::now();
    let (b, t) = compute_barcode_timed(&grid, common.dims, &common.opts.options());
    let wall = start.elapsed().as_secs_f64();
    let mut doc = report::barcode(&b);
    if common.timing {
        doc["metadata"]["timing"] = timing_json(&t, wall);
    }
    emit(common.output.as_ref(), &report::render(&doc))?;
    if !verify {
        return Ok(ExitCode::SUCCESS);
    }
    let want = oracle_barcode(&grid).map_err(|e| core_error(None, e))?;
    let bad: Vec<usize> = common
        .dims
        .iter()
        .filter(|&d| b.pairs[d] != want.pairs[d] || b.essential[d] != want.essential[d])
        .collect();
    Ok(verdict(bad.is_empty(), &format!("dims {bad:?}")))
}

fn matching(
    path_i: &Path,
    path_j: &Path,
    common: &Common,
    loss: bool,
    targets: bool,
    verify: bool,
) -> Result<ExitCode, CliError> {
    configure_threads(common);
    let (i, j) = (load(path_i, common)?, load(path_j, common)?);
    if i.shape() != j.shape() {
        return Err(invalid(format!("shape mismatch: {:?} vs {:?}", i.shape(), j.shape())));
    }
    if verify {
        check_oracle_size(&i)?;
    }
    let extended = !common.no_reverse_pairs;
    let start = Instant::now();
    let (r, t) = compute_betti_matching_timed(&i, &j, common.dims, extended, &common.opts.options())
        .map_err(|e| core_error(None, e))?;
    let wall = start.elapsed().as_secs_f64();
    let mut doc = report::matching(&r);
    if loss {
        doc["loss"] = report::loss(&loss_of(&r));
        doc["feature_counts"] = report::feature_counts(&feature_count_metric(&r.barcode_i, &r.barcode_j));
    }
    if targets {
        doc["targets"] = report::targets(&critical_voxels_of(&r, &i, &j));
    }
    if common.timing {
        doc["metadata"]["timing"] = timing_json(&t, wall);
    }
    emit(common.output.as_ref(), &report::render(&doc))?;
    if !verify {
        return Ok(ExitCode::SUCCESS);
    }
    let want = oracle_betti_matching(&i, &j, extended).map_err(|e| core_error(None, e))?;
    let bad: Vec<usize> = r
        .per_dim
        .iter()
        .filter(|d| want.dim(d.dim) != Some(*d))
        .map(|d| d.dim)
        .collect();
    Ok(verdict(bad.is_empty(), &format!("dims {bad:?}")))
}

#[derive(PartialEq)]
enum Outcome {
    Barcode(Barcode),
    Matching(Box<BettiMatchingResult>),
}

struct Config {
    name: String,
    opts: Options,
    samples: Samples,
    first: Option<Outcome>,
    identical: bool,
    matches_default: bool,
}

impl Config {
    fn new(name: impl Into<String>, opts: Options) -> Self {
        Config {
            name: name.into(),
            opts,
            samples: Samples::default(),
            first: None,
            identical: true,
            matches_default: true,
        }
    }
}

/// All optimizations off, then switched on one at a time in a fixed order.
fn ladder() -> Vec<Config> {
    let mut opts = Options::all_off();
    let mut out = vec![Config::new("none", opts)];
    for flag in Options::FLAGS {
        *opts.flag_mut(flag).expect("known flag") = true;
        out.push(Config::new(format!("+{flag}"), opts));
    }
    out
}

fn bench(
    paths: &[PathBuf],
    common: &Common,
    repeat: usize,
    use_ladder: bool,
    seed: u64,
    as_json: bool,
) -> Result<ExitCode, CliError> {
    if repeat == 0 {
        return Err(invalid("--repeat must be at least 1"));
    }
    configure_threads(common);
    let grids = paths.iter().map(|p| load(p, common)).collect::<Result<Vec<_>, _>>()?;
    if grids.len() == 2 && grids[0].shape() != grids[1].shape() {
        return Err(invalid(format!(
            "shape mismatch: {:?} vs {:?}",
            grids[0].shape(),
            grids[1].shape()
        )));
    }
    let dims = common.dims;
    let extended = !common.no_reverse_pairs;
    let compute = |opts: &Options| -> betti_core::Result<(Outcome, Timings)> {
        match grids.as_slice() {
            [g] => {
                let (b, t) = compute_barcode_timed(g, dims, opts);
                Ok((Outcome::Barcode(b), t))
            }
            [i, j] => {
                let (r, t) = compute_betti_matching_timed(i, j, dims, extended, opts)?;
                Ok((Outcome::Matching(Box::new(r)), t))
            }
            _ => unreachable!("clap accepts one or two volumes"),
        }
    };
    let reference = compute(&Options::default()).map_err(|e| core_error(None, e))?.0;
    let mut configs = if use_ladder {
        ladder()
    } else {
        vec![Config::new("selected", common.opts.options())]
    };
    let mut rng = StdRng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..configs.len()).collect();
    for _ in 0..repeat {
        order.shuffle(&mut rng);
        for &k in &order {
            let c = &mut configs[k];
            let out = sample(&mut c.samples, || compute(&c.opts)).map_err(|e| core_error(None, e))?;
            c.matches_default &= out == reference;
            match &c.first {
                None => c.first = Some(out),
                Some(f) => c.identical &= *f == out,
            }
        }
    }
    let ok = configs.iter().all(|c| c.identical && c.matches_default);
    let text = if as_json {
        report::render(&bench_json(&grids[0], paths.len(), dims, extended, repeat, &configs))
    } else {
        bench_text(&grids[0], paths.len(), dims, extended, repeat, &configs)
    };
    emit(common.output.as_ref(), &text)?;
    if ok {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("bench: results differ between runs or from the default configuration");
        Ok(ExitCode::from(MISMATCH))
    }
}

fn summary_json(s: Summary) -> Value {
    json!({ "mean": number(s.mean), "stddev": number(s.stddev) })
}

fn bench_json(g: &VoxelGrid, inputs: usize, dims: DimSet, extended: bool, runs: usize, configs: &[Config]) -> Value {
    let configs: Vec<Value> = configs
        .iter()
        .map(|c| {
            let flags: Map<String, Value> = Options::FLAGS
                .iter()
                .map(|f| {
                    let mut o = c.opts;
                    (f.to_string(), Value::Bool(*o.flag_mut(f).expect("known flag")))
                })
                .collect();
            let stages: Map<String, Value> = c
                .samples
                .stages()
                .into_iter()
                .map(|(k, s)| (k.to_string(), summary_json(s)))
                .collect();
            json!({
                "name": c.name,
                "options": flags,
                "runs": c.samples.len(),
                "identical": c.identical,
                "matches_default": c.matches_default,
                "total": summary_json(c.samples.total()),
                "stages": stages,
            })
        })
        .collect();
    json!({
        "metadata": {
            "task": if inputs == 1 { "barcode" } else { "matching" },
            "shape": g.shape(),
            "mode": g.mode().as_str(),
            "dims": dims.iter().collect::<Vec<_>>(),
            "extended": extended,
            "repeat": runs,
        },
        "configs": configs,
    })
}

fn bench_text(g: &VoxelGrid, inputs: usize, dims: DimSet, extended: bool, runs: usize, configs: &[Config]) -> String {
    let [a, b, c] = g.shape();
    let mut out = format!(
        "{} {a}x{b}x{c} {}, dims {dims}{}, {runs} runs per configuration (seconds, mean ± stddev)\n",
        if inputs == 1 { "barcode" } else { "matching" },
        g.mode().as_str(),
        if inputs == 2 && extended { ", extended" } else { "" },
    );
    for cfg in configs {
        let yes = |b: bool| if b { "yes" } else { "NO" };
        out.push_str(&format!(
            "\n[{}] identical across runs: {}, equal to default: {}\n",
            cfg.name,
            yes(cfg.identical),
            yes(cfg.matches_default)
        ));
        let t = cfg.samples.total();
        out.push_str(&format!("  {:<12} {:>10.6} ± {:.6}\n", "total", t.mean, t.stddev));
        for (k, s) in cfg.samples.stages() {
            out.push_str(&format!("  {:<12} {:>10.6} ± {:.6}\n", k, s.mean, s.stddev));
        }
    }
    out
}
