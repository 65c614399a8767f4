use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::{load, relative_to_config, ReportFile};
use crate::output::{ensure_dir, Sidecar};
use crate::{Common, Failure};

struct Table {
    input: &'static str,
    output: &'static str,
    keys: &'static [&'static str],
    metrics: &'static [&'static str],
}

const TABLES: [Table; 3] = [
    Table {
        input: "run_qaoa.csv",
        output: "plot_success.csv",
        keys: &["problem", "size", "method", "p"],
        metrics: &["mean_p_suc", "std_p_suc", "mean_p_dis", "mean_sample_std", "penalty"],
    },
    Table {
        input: "noise.csv",
        output: "plot_noise.csv",
        keys: &["problem", "size", "method", "p", "error_rate"],
        metrics: &["coherent_p_suc", "p_suc", "p_dis", "normalized"],
    },
    Table {
        input: "fluctuation.csv",
        output: "plot_fluctuation.csv",
        keys: &["method", "vertices", "p"],
        metrics: &["delta_e", "e_ave", "normalized"],
    },
];

/// Appends the long-format rows of one wide table.
fn melt(path: &Path, source: &str, t: &Table, out: &mut csv::Writer<std::fs::File>) -> Result<()> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Failure::Config(format!("{}: missing column {name}", path.display())))
    };
    let keys: Vec<usize> = t.keys.iter().map(|k| col(k)).collect::<Result<_, _>>()?;
    let metrics: Vec<usize> = t.metrics.iter().map(|k| col(k)).collect::<Result<_, _>>()?;
    for rec in r.records() {
        let rec = rec?;
        for (&m, name) in metrics.iter().zip(t.metrics) {
            let mut row = vec![source.to_string()];
            row.extend(keys.iter().map(|&k| rec[k].to_string()));
            row.push(name.to_string());
            row.push(rec[m].to_string());
            out.write_record(&row)?;
        }
    }
    Ok(())
}

pub fn report(common: &Common) -> Result<()> {
    let cfg: ReportFile = load(common)?;
    let inputs: Vec<PathBuf> = if cfg.inputs.is_empty() {
        vec![common.out.clone()]
    } else {
        cfg.inputs.iter().map(|p| relative_to_config(common, p)).collect()
    };
    ensure_dir(&common.out)?;
    let mut sidecar = Sidecar::new("report", common, 0, &cfg)?;
    for t in &TABLES {
        let present: Vec<&PathBuf> = inputs.iter().filter(|d| d.join(t.input).is_file()).collect();
        if present.is_empty() {
            continue;
        }
        let path = common.out.join(t.output);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut header = vec!["source"];
        header.extend(t.keys);
        header.extend(["metric", "value"]);
        w.write_record(&header)?;
        for dir in present {
            melt(&dir.join(t.input), &dir.display().to_string(), t, &mut w)?;
        }
        w.flush()?;
        sidecar.outputs.push(t.output.to_string());
    }
    if sidecar.outputs.is_empty() {
        return Err(Failure::Config(format!("no result tables found in {inputs:?}")).into());
    }
    sidecar.write(&common.out.join("report.json"))
}
