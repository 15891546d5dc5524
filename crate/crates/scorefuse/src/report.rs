//! Report writers: a flat CSV over grid cells, a nested JSON with per-trial
//! values, and plot-ready CSVs (TMR vs proportion per arm, plus the
//! 50%-missing bar view when that proportion was run).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentReport, NaturalComparison, ReportFormat};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| io_err(path, e))?;
    Ok(())
}

fn arm_name(balanced: bool) -> &'static str {
    if balanced {
        "balanced"
    } else {
        "unbalanced"
    }
}

/// Write the configured artifacts into `dir`, returning the paths written.
pub fn write_report(report: &ExperimentReport, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();

    if format.wants_csv() {
        let mut text = String::from(
            "proportion,variant,imputer,balanced,trials,mean_tmr,std_tmr,trial_tmrs,error\n",
        );
        for cell in &report.cells {
            let trials: Vec<String> = cell
                .trial_tmrs
                .iter()
                .map(|t| t.map_or_else(String::new, |v| v.to_string()))
                .collect();
            text.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                cell.proportion,
                cell.variant,
                cell.imputer,
                cell.balanced,
                cell.trial_tmrs.len(),
                opt(cell.mean_tmr),
                opt(cell.std_tmr),
                trials.join(";"),
                csv_field(cell.error.as_deref().unwrap_or("")),
            ));
        }
        let path = dir.join("report.csv");
        write_text(&path, &text)?;
        written.push(path);

        // Plot-ready views, one file per arm.
        for arm in &report.arms {
            let suffix = arm_name(arm.balanced);
            let mut curves = String::from("proportion,variant,imputer,mean_tmr,std_tmr\n");
            for cell in report.cells.iter().filter(|c| c.balanced == arm.balanced) {
                curves.push_str(&format!(
                    "{},{},{},{},{}\n",
                    cell.proportion,
                    cell.variant,
                    cell.imputer,
                    opt(cell.mean_tmr),
                    opt(cell.std_tmr),
                ));
            }
            let path = dir.join(format!("plot_tmr_vs_proportion_{suffix}.csv"));
            write_text(&path, &curves)?;
            written.push(path);

            if report.config.proportions.contains(&50) {
                let mut bars = String::from("variant,imputer,mean_tmr,std_tmr\n");
                for cell in report
                    .cells
                    .iter()
                    .filter(|c| c.balanced == arm.balanced && c.proportion == 50)
                {
                    bars.push_str(&format!(
                        "{},{},{},{}\n",
                        cell.variant,
                        cell.imputer,
                        opt(cell.mean_tmr),
                        opt(cell.std_tmr),
                    ));
                }
                let path = dir.join(format!("plot_tmr_at_50_{suffix}.csv"));
                write_text(&path, &bars)?;
                written.push(path);
            }
        }
    }

    if format.wants_json() {
        let path = dir.join("report.json");
        write_text(&path, &serde_json::to_string_pretty(report)?)?;
        written.push(path);
    }

    Ok(written)
}

/// Write a natural-vs-simulated comparison into `dir`.
pub fn write_natural_comparison(
    comparison: &NaturalComparison,
    dir: &Path,
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();

    if format.wants_csv() {
        let mut text = String::from(
            "balanced,imputer,natural_missing_pct,natural_tmr,matched_proportion,\
             simulated_mean,simulated_std,error\n",
        );
        for arm in &comparison.arms {
            for row in &arm.rows {
                let error = [
                    arm.natural_setup_error.as_deref(),
                    arm.simulated_setup_error.as_deref(),
                    row.natural_error.as_deref(),
                    row.simulated_error.as_deref(),
                ]
                .into_iter()
                .flatten()
                .collect::<Vec<_>>()
                .join(" | ");
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    arm.balanced,
                    row.imputer,
                    comparison.natural_missing_pct,
                    opt(row.natural_tmr),
                    comparison.matched_proportion,
                    opt(row.simulated_mean),
                    opt(row.simulated_std),
                    csv_field(&error),
                ));
            }
        }
        let path = dir.join("natural_comparison.csv");
        write_text(&path, &text)?;
        written.push(path);
    }

    if format.wants_json() {
        let path = dir.join("natural_comparison.json");
        write_text(&path, &serde_json::to_string_pretty(comparison)?)?;
        written.push(path);
    }

    Ok(written)
}
