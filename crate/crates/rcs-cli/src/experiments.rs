//! The `simulate` and `compare` subcommands.

use std::path::{Path, PathBuf};

use clap::Args;
use robust_cs::simulate::{run_replications, ExperimentConfig, Method};
use robust_cs::{Error, Result};

use crate::resolve_out_dir;

#[derive(Args)]
pub struct SimulateArgs {
    /// Path to an experiment config JSON document.
    pub config: PathBuf,

    /// Output directory; defaults to $RCS_OUT_DIR, then `.`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,

    /// Override the config's base seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Basename for the output files; defaults to the config file stem.
    #[arg(long)]
    pub name: Option<String>,
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    let report = run_replications(&config)?;

    let out_dir = resolve_out_dir(&args.out_dir);
    std::fs::create_dir_all(&out_dir)?;
    let name = args
        .name
        .clone()
        .unwrap_or_else(|| file_stem(&args.config));
    let csv_path = out_dir.join(format!("{name}.csv"));
    let summary_path = out_dir.join(format!("{name}_summary.json"));
    std::fs::write(&csv_path, report.to_csv())?;
    std::fs::write(&summary_path, report.summary_json())?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", summary_path.display());
    Ok(())
}

#[derive(Args)]
pub struct CompareArgs {
    /// Path to a comparison config: an experiment config with a `methods`
    /// array in place of `method`.
    pub config: PathBuf,

    /// Output directory; defaults to $RCS_OUT_DIR, then `.`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,

    /// Override the config's base seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Basename for the output files; defaults to the config file stem.
    #[arg(long)]
    pub name: Option<String>,
}

pub fn compare(args: &CompareArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    let methods_value = value
        .as_object_mut()
        .and_then(|obj| obj.remove("methods"))
        .ok_or_else(|| Error::Config("compare config needs a `methods` array".to_string()))?;
    let methods: Vec<Method> =
        serde_json::from_value(methods_value).map_err(|e| Error::Config(e.to_string()))?;
    if methods.is_empty() {
        return Err(Error::Config("`methods` must not be empty".to_string()));
    }

    let mut csv = String::from("method,rep,t,lower,upper,width,covered\n");
    let mut summaries = Vec::new();
    for method in methods {
        let mut with_method = value.clone();
        with_method["method"] = serde_json::to_value(method).expect("method serializes");
        let mut config: ExperimentConfig = serde_json::from_value(with_method)
            .map_err(|e| Error::Config(e.to_string()))?;
        if let Some(seed) = args.seed {
            config.base_seed = seed;
        }
        let report = run_replications(&config)?;
        for line in report.to_csv().lines().skip(1) {
            csv.push_str(method.name());
            csv.push(',');
            csv.push_str(line);
            csv.push('\n');
        }
        let summary: serde_json::Value = serde_json::from_str(&report.summary_json())
            .expect("summary round-trips");
        summaries.push(summary);
    }

    let out_dir = resolve_out_dir(&args.out_dir);
    std::fs::create_dir_all(&out_dir)?;
    let name = args
        .name
        .clone()
        .unwrap_or_else(|| file_stem(&args.config));
    let csv_path = out_dir.join(format!("{name}.csv"));
    let summary_path = out_dir.join(format!("{name}_summary.json"));
    std::fs::write(&csv_path, csv)?;
    std::fs::write(
        &summary_path,
        serde_json::to_string_pretty(&summaries).expect("summaries serialize"),
    )?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", summary_path.display());
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".to_string())
}
