//! `spineviz` command line.

use std::net::IpAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use spineviz_core::dataset::{validate_dataset, Attribute, SimulationDataset};
use spineviz_core::export::{export_glyph_svg, export_svg, glyph_still, CanvasSize};
use spineviz_core::layout::{layout_charts, StructureGroup, ViewConfig, ViewMode};
use spineviz_core::par::Exec;
use spineviz_core::sim::{degeneration_sweep, run, Scenario, SpineModel};

use crate::api::preset;
use crate::store::{open, persist, simulation_id, Store, StoreError};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NOT_FOUND: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "spineviz", version, about = "Spine simulation visualization workbench")]
pub struct Cli {
    /// Directory holding one sub-directory per dataset.
    #[arg(long, global = true, env = "SPINEVIZ_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum View {
    /// Disc charts beside the spine.
    Charts,
    /// Facet charts, left side mirrored.
    Facets,
    /// Chart planes behind the spine, flattened.
    Stacked,
    /// Color strips for ensembles.
    Simplified,
    /// Force glyphs in posterior projection.
    Glyphs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
    },
    /// Render a view to an SVG document.
    Export {
        #[arg(long)]
        dataset: String,
        #[arg(long, value_enum, default_value = "charts")]
        view: View,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
        /// Comparison datasets, repeated or comma separated.
        #[arg(long, value_delimiter = ',')]
        compare: Vec<String>,
        #[arg(long, default_value_t = 0)]
        bins: usize,
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
        #[arg(long, default_value = "force_magnitude")]
        attr: Attribute,
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 1000)]
        height: u32,
    },
    /// Run the bundled simulator and store the result as a dataset.
    Simulate {
        /// `static`, `lateral_bend` or a scenario TOML file.
        #[arg(long, default_value = "static")]
        scenario: String,
        /// Model TOML file; the bundled cervical model by default.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Uniform disc degeneration degree 1..=5.
        #[arg(long)]
        degeneration: Option<u8>,
        /// Run degrees 1..=5 and store one dataset per degree.
        #[arg(long, conflicts_with = "degeneration")]
        sweep: bool,
        /// Dataset id; derived from the inputs when absent.
        #[arg(long)]
        id: Option<String>,
        /// Run sweeps on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Check a dataset and print the report. Exits 1 when issues are found.
    Validate {
        #[arg(long)]
        dataset: String,
    },
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        let code = match e {
            StoreError::NotFound(_) => EXIT_NOT_FOUND,
            StoreError::Load(_) => EXIT_FAILURE,
        };
        Failure::new(code, e)
    }
}

impl From<spineviz_core::Error> for Failure {
    fn from(e: spineviz_core::Error) -> Self {
        Failure::new(EXIT_FAILURE, e)
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", path.display())))
}

fn scenario_arg(arg: &str) -> Result<Scenario, Failure> {
    match preset(arg) {
        Some(s) => Ok(s),
        None => Ok(Scenario::parse(&read(&PathBuf::from(arg))?)?),
    }
}

fn export(cli: &Cli, args: &Command) -> Result<String, Failure> {
    let Command::Export { dataset, view, t, out, compare, bins, spacing, attr, width, height } = args else {
        unreachable!()
    };
    let ds = open(&cli.data_dir, dataset)?;
    let comparisons: Vec<SimulationDataset> = compare.iter().map(|c| open(&cli.data_dir, c)).collect::<Result<_, _>>()?;
    let refs: Vec<&SimulationDataset> = comparisons.iter().collect();
    let (mode, group) = match view {
        View::Charts | View::Glyphs => (ViewMode::Charts2d, StructureGroup::Discs),
        View::Facets => (ViewMode::Charts2d, StructureGroup::Facets),
        View::Stacked => (ViewMode::Stacked3d, StructureGroup::Discs),
        View::Simplified => (ViewMode::Simplified, StructureGroup::Discs),
    };
    let config = ViewConfig {
        mode,
        group,
        t: *t,
        spacing: *spacing,
        bins: *bins,
        attribute: *attr,
        compare: compare.clone(),
        ..Default::default()
    };
    let size = CanvasSize { width: *width, height: *height };
    let svg = if *view == View::Glyphs {
        export_glyph_svg(&glyph_still(&ds, &config)?, size)?
    } else {
        export_svg(&layout_charts(&ds, &refs, &config)?, size)?
    };
    std::fs::write(out, svg).map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", out.display())))?;
    Ok(format!("wrote {}", out.display()))
}

fn simulate(cli: &Cli, args: &Command) -> Result<String, Failure> {
    let Command::Simulate { scenario, model, degeneration, sweep, id, sequential } = args else {
        unreachable!()
    };
    let model = match model {
        Some(path) => SpineModel::parse(&read(path)?)?,
        None => SpineModel::bundled(),
    };
    let mut scenario = scenario_arg(scenario)?;
    if let Some(d) = degeneration {
        scenario = scenario.with_uniform_degeneration(*d);
    }
    std::fs::create_dir_all(&cli.data_dir).map_err(|e| Failure::new(EXIT_FAILURE, e))?;
    let base = id.clone().unwrap_or_else(|| simulation_id(&model, &scenario));
    let mut lines = Vec::new();
    if *sweep {
        let exec = if *sequential { Exec::Sequential } else { Exec::default() };
        for (i, ds) in degeneration_sweep(&model, &scenario, exec)?.iter().enumerate() {
            let id = format!("{base}-d{}", i + 1);
            persist(&cli.data_dir, &id, ds)?;
            lines.push(id);
        }
    } else {
        persist(&cli.data_dir, &base, &run(&model, &scenario)?)?;
        lines.push(base);
    }
    Ok(lines.join("\n"))
}

fn validate(cli: &Cli, dataset: &str) -> Result<String, Failure> {
    let report = validate_dataset(&open(&cli.data_dir, dataset)?);
    if report.is_clean() {
        Ok(String::new())
    } else {
        Err(Failure::new(EXIT_FAILURE, report.to_string().trim_end()))
    }
}

async fn serve(cli: &Cli, bind: IpAddr, port: u16) -> Result<String, Failure> {
    let store = Arc::new(Store::new(&cli.data_dir));
    let listener = tokio::net::TcpListener::bind((bind, port))
        .await
        .map_err(|e| Failure::new(EXIT_FAILURE, format!("bind {bind}:{port}: {e}")))?;
    log::info!("serving {} on http://{}", cli.data_dir.display(), listener.local_addr().map_err(|e| Failure::new(EXIT_FAILURE, e))?);
    axum::serve(listener, crate::router(store))
        .await
        .map_err(|e| Failure::new(EXIT_FAILURE, e))?;
    Ok(String::new())
}

pub fn execute(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Serve { port, bind } => tokio::runtime::Runtime::new()
            .map_err(|e| Failure::new(EXIT_FAILURE, e))?
            .block_on(serve(cli, *bind, *port)),
        c @ Command::Export { .. } => export(cli, c),
        c @ Command::Simulate { .. } => simulate(cli, c),
        Command::Validate { dataset } => validate(cli, dataset),
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(out) => {
            if !out.is_empty() {
                println!("{out}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            if matches!(cli.command, Command::Validate { .. }) && f.code == EXIT_FAILURE {
                println!("{}", f.message);
            } else {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
