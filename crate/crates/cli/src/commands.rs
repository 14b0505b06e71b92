use std::path::{Path, PathBuf};

use clap::Args;
use jcrabi_core::berry::{connection_curve, eig_family_with, generator_phase, wilson_loop};
use jcrabi_core::models::{Frame, ModelKind};
use jcrabi_core::spectra::{convergence_study_with, g_grid, ground_crossing, spectrum_sweep_with};
use jcrabi_core::surfaces::{boa_surface, classify_degeneracy, default_tol_gap, linspace};
use jcrabi_core::verify::{Verifier, CRITERIA};
use jcrabi_core::Exec;
use serde_json::{json, Value};

use crate::config::{ModelChoice, RunConfig, RunFlags};
use crate::error::CliError;
use crate::output::{self, write_file, write_json, write_table, Metadata};
use crate::svg::{self, Series};

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub run: RunFlags,
    #[arg(long, default_value_t = 0.0)]
    pub g_min: f64,
    #[arg(long, default_value_t = 1.5)]
    pub g_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub g_step: f64,
    /// Also write an SVG plot of the levels.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BerryArgs {
    #[command(flatten)]
    pub run: RunFlags,
    /// Also write an SVG plot of the accumulated phase.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SurfacesArgs {
    #[command(flatten)]
    pub run: RunFlags,
    #[arg(long, value_delimiter = ',', num_args = 2, allow_negative_numbers = true, default_values_t = [-3.0, 3.0])]
    pub x_range: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 2, allow_negative_numbers = true, default_values_t = [-3.0, 3.0])]
    pub p_range: Vec<f64>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
    /// Gap tolerance of the degeneracy test; derived from the grid when unset.
    #[arg(long)]
    pub tol_gap: Option<f64>,
    /// Also write an SVG heatmap of the gap.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub run: RunFlags,
    /// Ascending truncations to compare.
    #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 150, 200, 300, 500])]
    pub n_list: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CrossingArgs {
    #[command(flatten)]
    pub run: RunFlags,
    #[arg(long, default_value_t = 0.0)]
    pub g_lo: f64,
    #[arg(long, default_value_t = 1.5)]
    pub g_hi: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Directory for the report files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<u8>,
    /// Evaluate everything on one thread.
    #[arg(long)]
    pub sequential: bool,
}

fn level_header(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("E{i}")).collect()
}

fn report(path: &Path) {
    println!("wrote {}", path.display());
}

pub fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&args.run)?;
    let grid = g_grid(args.g_min, args.g_max, args.g_step)?;
    let trunc = cfg.sweep_truncation()?;
    let base = cfg.params(grid[0])?;
    output::ensure_writable(&cfg.output_dir)?;

    let mut meta = cfg.metadata("spectrum");
    meta.push(("g_range".into(), format!("{},{},{}", args.g_min, args.g_max, args.g_step)));
    meta.push(("n_max_used".into(), trunc.n_max().to_string()));

    let mut series = Vec::new();
    for (m, kind) in cfg.models(ModelChoice::Both, Frame::Lab).into_iter().enumerate() {
        let table = spectrum_sweep_with(Exec::Parallel, kind, &base, &grid, cfg.k_levels, trunc)?;
        let mut header = vec!["g".to_string()];
        header.extend(level_header(table.k()));
        let rows: Vec<Vec<f64>> = table
            .g_values
            .iter()
            .zip(&table.levels)
            .map(|(&g, levels)| std::iter::once(g).chain(levels.iter().copied()).collect())
            .collect();
        let path = write_table(&cfg.output_dir, &format!("spectrum_{}", kind.tag()), cfg.format, &meta, &header, &rows)?;
        report(&path);
        for k in 0..table.k() {
            series.push(Series {
                label: if k == 0 { kind.tag().to_string() } else { String::new() },
                points: table.g_values.iter().zip(&table.levels).map(|(&g, l)| (g, l[k])).collect(),
                dashed: m > 0,
            });
        }
    }
    if args.svg {
        let path = cfg.output_dir.join("spectrum.svg");
        write_file(&path, &svg::line_plot(&meta, "lowest levels", "g", "E", &series))?;
        report(&path);
    }
    Ok(())
}

fn g_tag(g: f64) -> String {
    format!("{g}")
}

pub fn berry(args: &BerryArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&args.run)?;
    let kind = cfg.single_model(ModelChoice::Rabi, Frame::Lab)?;
    let trunc = cfg.berry_truncation()?;
    let params = cfg.g.iter().map(|&g| cfg.params(g)).collect::<Result<Vec<_>, _>>()?;
    output::ensure_writable(&cfg.output_dir)?;

    let mut meta = cfg.metadata("berry");
    meta.push(("model_used".into(), kind.tag().into()));
    meta.push(("n_max_used".into(), trunc.n_max().to_string()));

    let mut summaries = Vec::new();
    let mut series = Vec::new();
    for p in &params {
        let family = eig_family_with(Exec::Parallel, kind, p, cfg.level, cfg.phi_nodes, trunc)?;
        let wilson = wilson_loop(&family)?;
        let connection = connection_curve(&family, cfg.gauge.convention())?;
        let generator = generator_phase(kind, p, cfg.level, trunc)?;

        let stem = if params.len() == 1 {
            "berry_curve".to_string()
        } else {
            format!("berry_curve_g{}", g_tag(p.g()))
        };
        let rows: Vec<Vec<f64>> = connection.curve.iter().map(|&(phi, a)| vec![phi, a]).collect();
        let path = write_table(
            &cfg.output_dir,
            &stem,
            cfg.format,
            &meta,
            &["phi".into(), "partial_phase".into()],
            &rows,
        )?;
        report(&path);
        series.push(Series {
            label: format!("g = {}", p.g()),
            points: connection.curve.clone(),
            dashed: false,
        });

        summaries.push(json!({
            "g": p.g(),
            "wilson_gamma": wilson.gamma,
            "connection_gamma": connection.gamma,
            "generator_gamma": generator,
            "residual": connection.residual,
            "gauge": connection.gauge,
            "connection_unwrapped": connection.unwrapped,
            "wilson_residual": wilson.residual,
            "photon_number": family.photon_number(),
            "energy": family.energy,
            "min_step_overlap": family.min_step_overlap,
        }));
    }

    let body = match summaries.as_slice() {
        [one] => one.clone(),
        _ => json!({ "results": summaries }),
    };
    let path = cfg.output_dir.join("berry_summary.json");
    write_json(&path, &meta, body)?;
    report(&path);
    if args.svg {
        let path = cfg.output_dir.join("berry_curve.svg");
        write_file(&path, &svg::line_plot(&meta, "accumulated phase", "phi", "phase", &series))?;
        report(&path);
    }
    Ok(())
}

fn range(name: &str, r: &[f64]) -> Result<(f64, f64), CliError> {
    match *r {
        [lo, hi] if lo.is_finite() && hi.is_finite() && lo < hi => Ok((lo, hi)),
        _ => Err(CliError::Usage(format!("{name} must be two increasing finite numbers"))),
    }
}

pub fn surfaces(args: &SurfacesArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&args.run)?;
    let (x_lo, x_hi) = range("x-range", &args.x_range)?;
    let (p_lo, p_hi) = range("p-range", &args.p_range)?;
    if args.resolution < 2 {
        return Err(CliError::Usage(format!("resolution must be at least 2, got {}", args.resolution)));
    }
    if let Some(t) = args.tol_gap {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!("tol-gap must be non-negative, got {t}")));
        }
    }
    let params = cfg.params(cfg.g[0])?;
    output::ensure_writable(&cfg.output_dir)?;

    let x_axis = linspace(x_lo, x_hi, args.resolution);
    let p_axis = linspace(p_lo, p_hi, args.resolution);
    let mut meta = cfg.metadata("surfaces");
    meta.push(("x_range".into(), format!("{x_lo},{x_hi}")));
    meta.push(("p_range".into(), format!("{p_lo},{p_hi}")));
    meta.push(("resolution".into(), args.resolution.to_string()));

    for kind in cfg.models(ModelChoice::Jc, Frame::Lab) {
        let grid = boa_surface(kind, &params, &x_axis, &p_axis);
        let tol = args.tol_gap.unwrap_or_else(|| default_tol_gap(&grid));
        let degeneracy = classify_degeneracy(&grid, tol)?;

        let rows: Vec<Vec<f64>> = grid.points().map(|pt| pt.to_vec()).collect();
        let header: Vec<String> = ["x", "p", "E_minus", "E_plus", "gap"].map(String::from).to_vec();
        let path = write_table(&cfg.output_dir, &format!("surface_{}", kind.tag()), cfg.format, &meta, &header, &rows)?;
        report(&path);

        let path = cfg.output_dir.join(format!("degeneracy_{}.json", kind.tag()));
        let mut body = serde_json::to_value(&degeneracy).expect("report serializes");
        if let Value::Object(map) = &mut body {
            map.insert("model".into(), json!(kind.tag()));
            map.insert("locus_kind".into(), json!(degeneracy.locus.name()));
        }
        write_json(&path, &meta, body)?;
        report(&path);
        println!("{}: locus {}, min gap {}", kind.tag(), degeneracy.locus.name(), degeneracy.min_gap);

        if args.svg {
            let path = cfg.output_dir.join(format!("surface_gap_{}.svg", kind.tag()));
            let title = format!("{} gap", kind.tag());
            write_file(&path, &svg::heatmap(&meta, &title, &grid.x_axis, &grid.p_axis, &grid.gap))?;
            report(&path);
        }
    }
    Ok(())
}

pub fn convergence(args: &ConvergenceArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&args.run)?;
    if args.n_list.is_empty() {
        return Err(CliError::Usage("n-list is empty".into()));
    }
    let base = cfg.params(cfg.g[0])?;
    output::ensure_writable(&cfg.output_dir)?;

    let mut meta = cfg.metadata("convergence");
    let n_list: Vec<String> = args.n_list.iter().map(|n| n.to_string()).collect();
    meta.push(("n_list".into(), n_list.join(",")));

    for kind in cfg.models(ModelChoice::Rabi, Frame::Lab) {
        let mut rows = Vec::new();
        for &g in &cfg.g {
            let study = convergence_study_with(Exec::Parallel, kind, &base, g, cfg.k_levels, &args.n_list)?;
            for row in study {
                let mut r = vec![g, row.n_max as f64];
                r.extend(&row.values);
                r.push(row.max_abs_difference().unwrap_or(f64::NAN));
                rows.push(r);
            }
        }
        let mut header = vec!["g".to_string(), "n_max".to_string()];
        header.extend(level_header(cfg.k_levels));
        header.push("max_abs_difference".into());
        let path = write_table(&cfg.output_dir, &format!("convergence_{}", kind.tag()), cfg.format, &meta, &header, &rows)?;
        report(&path);
    }
    Ok(())
}

pub fn crossing(args: &CrossingArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&args.run)?;
    if matches!(cfg.model, Some(ModelChoice::Rabi) | Some(ModelChoice::Both)) {
        return Err(CliError::Usage("crossing is defined for the JC model only".into()));
    }
    let trunc = cfg.sweep_truncation()?;
    let base = cfg.params(cfg.g[0])?;
    output::ensure_writable(&cfg.output_dir)?;

    let r = ground_crossing(&base, trunc, args.g_lo, args.g_hi)?;
    let mut meta = cfg.metadata("crossing");
    meta.push(("bracket".into(), format!("{},{}", args.g_lo, args.g_hi)));
    meta.push(("n_max_used".into(), trunc.n_max().to_string()));
    let body = json!({
        "model": ModelKind::JcLab.tag(),
        "analytic": r.analytic,
        "numerical": r.numerical,
        "quoted_value": r.quoted_value,
        "discrepancy": r.discrepancy(),
        "disagrees_with_quoted": r.disagrees_with_quoted(),
    });
    let path = cfg.output_dir.join("crossing.json");
    write_json(&path, &meta, body)?;
    report(&path);
    println!(
        "analytic g* = {:.10}, numerical g* = {:.10}, quoted {:.10}{}",
        r.analytic,
        r.numerical,
        r.quoted_value,
        if r.disagrees_with_quoted() { " (disagrees)" } else { "" }
    );
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let ids: Vec<u8> = if args.criteria.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        for id in &args.criteria {
            if !CRITERIA.iter().any(|c| c.0 == *id) {
                return Err(CliError::Usage(format!("unknown criterion {id}")));
            }
        }
        args.criteria.clone()
    };
    if let Some(dir) = &args.out {
        output::ensure_writable(dir)?;
    }

    let exec = if args.sequential { Exec::Sequential } else { Exec::Parallel };
    let verifier = Verifier::new(exec);
    let mut text = String::new();
    let mut investigations = Vec::new();
    let mut failed = Vec::new();
    for id in ids {
        let outcome = verifier.run(id);
        println!("{outcome}");
        text.push_str(&format!("{outcome}\n"));
        for line in &outcome.details {
            println!("    {line}");
            text.push_str(&format!("    {line}\n"));
        }
        if let Some(r) = &outcome.report {
            println!("{r}");
            investigations.push(r.clone());
        }
        if !outcome.passed {
            failed.push(id);
        }
    }

    if let Some(dir) = &args.out {
        let meta: Metadata = vec![
            ("tool".into(), format!("jcrabi {}", env!("CARGO_PKG_VERSION"))),
            ("command".into(), "verify".into()),
        ];
        let header: String = meta.iter().map(|(k, v)| format!("# {k}: {v}\n")).collect();
        let path = dir.join("verify_report.txt");
        write_file(&path, &format!("{header}{text}"))?;
        report(&path);
        if !investigations.is_empty() {
            let path = dir.join("rabi_loop_investigation.txt");
            write_file(&path, &format!("{header}{}\n", investigations.join("\n")))?;
            report(&path);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Acceptance(failed))
    }
}
