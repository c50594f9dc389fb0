use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::dataset_csv::{csv_error, save_dataset};
use super::svg::{bars, lines, scatter, Series};
use crate::error::{Error, Result};
use crate::experiments::KdeComparison;
use crate::gan::TrainingTrace;
use crate::saa::{AlgorithmReport, GapMode, ReportStatus};
use crate::scenarios::{MASK_LOWER, MASK_UPPER};
use crate::supply_chain::{SimulationReport, SolveResult, SupplyChainInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    /// CSV tables only.
    #[default]
    Csv,
    /// CSV tables plus SVG charts drawn from them.
    Svg,
}

fn num(v: f64) -> String {
    v.to_string()
}

fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        w.write_record(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads back a table written by this module as (header, rows).
fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_error)?;
    let header = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        rows.push(rec.map_err(csv_error)?.iter().map(str::to_owned).collect());
    }
    Ok((header, rows))
}

fn column(rows: &[Vec<String>], c: usize) -> Result<Vec<f64>> {
    rows.iter()
        .enumerate()
        .map(|(r, row)| {
            row[c].parse::<f64>().map_err(|_| Error::Parse {
                line: r as u64 + 2,
                column: c + 1,
                message: format!("not a number: {:?}", row[c]),
            })
        })
        .collect()
}

fn xy(rows: &[Vec<String>], cx: usize, cy: usize) -> Result<Vec<(f64, f64)>> {
    Ok(column(rows, cx)?
        .into_iter()
        .zip(column(rows, cy)?)
        .collect())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

pub fn write_simulation_csv(report: &SimulationReport, path: &Path) -> Result<()> {
    let rows: Vec<Vec<String>> = report
        .scenarios
        .iter()
        .enumerate()
        .map(|(k, s)| vec![k.to_string(), num(s.total_cost), num(s.external)])
        .collect();
    write_table(path, &["scenario", "total_cost", "external"], &rows)
}

/// Writes `{stem}simulation.csv` (one row per scenario) and
/// `{stem}simulation_summary.csv` (averages and the external-use count),
/// plus a per-scenario cost scatter for [`ReportFormat::Svg`].
pub fn emit_report(
    report: &SimulationReport,
    dir: &Path,
    stem: &str,
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let main = dir.join(format!("{stem}simulation.csv"));
    write_simulation_csv(report, &main)?;
    let summary = dir.join(format!("{stem}simulation_summary.csv"));
    let summary_rows = if report.scenarios.is_empty() {
        Vec::new()
    } else {
        vec![vec![
            report.scenarios.len().to_string(),
            num(report.average_cost),
            num(report.average_external),
            report.external_count.to_string(),
        ]]
    };
    write_table(
        &summary,
        &[
            "scenarios",
            "average_cost",
            "average_external",
            "external_count",
        ],
        &summary_rows,
    )?;
    let mut out = vec![main.clone(), summary];
    if format == ReportFormat::Svg {
        let (_, rows) = read_table(&main)?;
        let svg_path = dir.join(format!("{stem}simulation.svg"));
        let pts = xy(&rows, 0, 1)?;
        fs::write(
            &svg_path,
            scatter(
                "Per-scenario total cost",
                "scenario",
                "total cost",
                &[Series::new(stem.trim_end_matches('_'), pts)],
                None,
            ),
        )?;
        out.push(svg_path);
    }
    Ok(out)
}

/// One row per cost component followed by a `total` row.
pub fn write_breakdown_csv(result: &SolveResult, path: &Path) -> Result<()> {
    let mut rows: Vec<Vec<String>> = result
        .breakdown
        .entries()
        .iter()
        .map(|(k, v)| vec![k.to_string(), num(*v)])
        .collect();
    rows.push(vec!["total".into(), num(result.total_cost)]);
    write_table(path, &["component", "cost"], &rows)
}

/// Cost breakdown, design and production/inventory profiles of a solve.
pub fn emit_solve_result(
    result: &SolveResult,
    inst: &SupplyChainInstance,
    dir: &Path,
    stem: &str,
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let breakdown = dir.join(format!("{stem}breakdown.csv"));
    write_breakdown_csv(result, &breakdown)?;
    let design = dir.join(format!("{stem}design.csv"));
    let mut rows = Vec::new();
    for i in 0..inst.sites {
        for r in 0..inst.levels {
            rows.push(vec![
                (i + 1).to_string(),
                (r + 1).to_string(),
                u8::from(result.design.y[i][r]).to_string(),
                num(result.design.ca[i][r]),
            ]);
        }
    }
    write_table(&design, &["site", "level", "selected", "capacity"], &rows)?;
    let profile = dir.join(format!("{stem}profile.csv"));
    let mut rows = Vec::new();
    for i in 0..inst.sites {
        for t in 0..inst.periods {
            rows.push(vec![
                (i + 1).to_string(),
                (t + 1).to_string(),
                num(result.production(i, t)),
                num(result.inventory[i][t]),
            ]);
        }
    }
    write_table(
        &profile,
        &["site", "period", "production", "inventory"],
        &rows,
    )?;
    let mut out = vec![breakdown.clone(), design, profile.clone()];
    if format == ReportFormat::Svg {
        let (_, rows) = read_table(&breakdown)?;
        let labels: Vec<String> = rows[..rows.len() - 1]
            .iter()
            .map(|r| r[0].clone())
            .collect();
        let values = column(&rows[..rows.len() - 1], 1)?;
        let p = dir.join(format!("{stem}breakdown.svg"));
        fs::write(&p, bars("Cost breakdown", "cost", &labels, &values))?;
        out.push(p);

        let (_, rows) = read_table(&profile)?;
        let mut prod = Vec::new();
        let mut inv = Vec::new();
        for i in 1..=inst.sites {
            let site: Vec<Vec<String>> = rows
                .iter()
                .filter(|r| r[0] == i.to_string())
                .cloned()
                .collect();
            prod.push(Series::new(format!("site {i}"), xy(&site, 1, 2)?));
            inv.push(Series::new(format!("site {i}"), xy(&site, 1, 3)?));
        }
        let p = dir.join(format!("{stem}production.svg"));
        fs::write(&p, lines("Production by site", "period", "product", &prod))?;
        out.push(p);
        let p = dir.join(format!("{stem}inventory.svg"));
        fs::write(
            &p,
            lines(
                "Raw-material inventory by site",
                "period",
                "inventory",
                &inv,
            ),
        )?;
        out.push(p);
    }
    Ok(out)
}

/// Loss curves and twin-generator centroid distances.
pub fn emit_training_trace(
    trace: &TrainingTrace,
    dir: &Path,
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let losses = dir.join("losses.csv");
    let rows: Vec<Vec<String>> = trace
        .epochs
        .iter()
        .map(|e| vec![e.epoch.to_string(), num(e.d_loss), num(e.g_loss)])
        .collect();
    write_table(&losses, &["epoch", "d_loss", "g_loss"], &rows)?;
    let twin = dir.join("twin.csv");
    let rows: Vec<Vec<String>> = trace
        .twin
        .iter()
        .map(|c| vec![c.epoch.to_string(), num(c.distance), num(c.ratio)])
        .collect();
    write_table(&twin, &["epoch", "distance", "ratio"], &rows)?;
    let mut out = vec![losses.clone(), twin.clone()];
    if format == ReportFormat::Svg {
        let (_, rows) = read_table(&losses)?;
        let p = dir.join("losses.svg");
        fs::write(
            &p,
            lines(
                "Training losses",
                "epoch",
                "loss",
                &[
                    Series::new("discriminator", xy(&rows, 0, 1)?),
                    Series::new("generator", xy(&rows, 0, 2)?),
                ],
            ),
        )?;
        out.push(p);
        let (_, rows) = read_table(&twin)?;
        let p = dir.join("twin.svg");
        fs::write(
            &p,
            lines(
                "Twin generator centroid distance",
                "epoch",
                "distance / initial",
                &[Series::new("ratio", xy(&rows, 0, 2)?)],
            ),
        )?;
        out.push(p);
    }
    Ok(out)
}

/// Point sets and mask fractions of the missing-data experiment.
pub fn emit_kde_comparison(
    cmp: &KdeComparison,
    dir: &Path,
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let sets = [
        ("original", &cmp.original),
        ("masked", &cmp.masked),
        ("kde_samples", &cmp.kde_samples),
        ("gan_samples", &cmp.gan_samples),
    ];
    let mut out = Vec::new();
    for (name, data) in sets {
        let p = dir.join(format!("{name}.csv"));
        save_dataset(data, &p)?;
        out.push(p);
    }
    let summary = dir.join("kde_compare.csv");
    let s = &cmp.summary;
    write_table(
        &summary,
        &[
            "original",
            "kde",
            "gan",
            "gan_stopped_epoch",
            "gan_converged",
        ],
        &[vec![
            num(s.original),
            num(s.kde),
            num(s.gan),
            s.gan_stopped_epoch.to_string(),
            u8::from(s.gan_converged).to_string(),
        ]],
    )?;
    out.push(summary);
    out.extend(emit_training_trace(&cmp.gan.trace, dir, format)?);
    if format == ReportFormat::Svg {
        let mask = Some((
            (MASK_LOWER[0], MASK_LOWER[1]),
            (MASK_UPPER[0], MASK_UPPER[1]),
        ));
        for (name, title) in [
            ("masked", "Training data with the square removed"),
            ("kde_samples", "Samples from KDE"),
            ("gan_samples", "Samples from the GAN"),
        ] {
            let (_, rows) = read_table(&dir.join(format!("{name}.csv")))?;
            let p = dir.join(format!("{name}.svg"));
            fs::write(
                &p,
                scatter(
                    title,
                    "x",
                    "y",
                    &[Series::new(name, xy(&rows, 0, 1)?)],
                    mask,
                ),
            )?;
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct ReportSummary {
    status: ReportStatus,
    upper_bound: f64,
    lower_bound: f64,
    gap: f64,
    gap_mode: GapMode,
    alpha_prime: f64,
    gamma: f64,
    theta_n: f64,
    l: usize,
    outer_iterations: usize,
    master_seed: String,
    batch_lower_bounds: Vec<f64>,
    batch_upper_bounds: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_solution: Option<Vec<f64>>,
    wall_seconds: f64,
}

#[derive(Serialize, Deserialize)]
struct RecordRow {
    outer: usize,
    h: usize,
    m: usize,
    // Seeds span the full u64 range, wider than TOML integers.
    train_seed: String,
    validation_seed: String,
    objective: f64,
    q_hat: f64,
    upper: f64,
    accepted: bool,
}

#[derive(Serialize, Deserialize)]
struct ReportFile {
    summary: ReportSummary,
    records: Vec<RecordRow>,
}

/// Summary block plus one `[[records]]` table per replication.
pub fn algorithm_report_toml(report: &AlgorithmReport) -> Result<String> {
    let file = ReportFile {
        summary: ReportSummary {
            status: report.status,
            upper_bound: report.upper_bound,
            lower_bound: report.lower_bound,
            gap: report.gap,
            gap_mode: report.gap_mode,
            alpha_prime: report.alpha_prime,
            gamma: report.gamma,
            theta_n: report.theta_n,
            l: report.l,
            outer_iterations: report.outer_iterations,
            master_seed: report.master_seed.to_string(),
            batch_lower_bounds: report.batch_lower_bounds.clone(),
            batch_upper_bounds: report.batch_upper_bounds.clone(),
            best_solution: report.best_solution.clone(),
            wall_seconds: report.wall_seconds,
        },
        records: report
            .records
            .iter()
            .map(|r| RecordRow {
                outer: r.outer,
                h: r.h,
                m: r.m,
                train_seed: r.train_seed.to_string(),
                validation_seed: r.validation_seed.to_string(),
                objective: r.objective,
                q_hat: r.q_hat,
                upper: r.upper,
                accepted: r.accepted,
            })
            .collect(),
    };
    toml::to_string(&file).map_err(|e| Error::Serde(e.to_string()))
}

/// Writes `report.toml` and `records.csv`.
pub fn write_algorithm_report(report: &AlgorithmReport, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let toml_path = dir.join("report.toml");
    fs::write(&toml_path, algorithm_report_toml(report)?)?;
    let csv_path = dir.join("records.csv");
    let rows: Vec<Vec<String>> = report
        .records
        .iter()
        .map(|r| {
            vec![
                r.outer.to_string(),
                r.h.to_string(),
                r.m.to_string(),
                r.train_seed.to_string(),
                r.validation_seed.to_string(),
                num(r.objective),
                num(r.q_hat),
                num(r.upper),
                u8::from(r.accepted).to_string(),
            ]
        })
        .collect();
    write_table(
        &csv_path,
        &[
            "outer",
            "h",
            "m",
            "train_seed",
            "validation_seed",
            "objective",
            "q_hat",
            "upper",
            "accepted",
        ],
        &rows,
    )?;
    Ok(vec![toml_path, csv_path])
}

/// Parses and validates a supply-chain instance from TOML.
pub fn parse_instance(text: &str) -> Result<SupplyChainInstance> {
    let inst: SupplyChainInstance =
        toml::from_str(text).map_err(|e| Error::Serde(e.to_string()))?;
    inst.validate()?;
    Ok(inst)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<SupplyChainInstance> {
    parse_instance(&fs::read_to_string(path)?)
}
