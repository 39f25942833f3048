use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use eomech::fluct::{build_diffusion, solve_lyapunov, DriftCoefficients, Matrix6};
use eomech::meanfield::{
    integrate_adiabatic, integrate_full, steady_states, MeanFieldState, SteadyBranch,
};
use eomech::params::{
    derive_couplings, load_config, DerivedRates, PhysicalConfig, REFERENCE_CONFIG,
};
use eomech::presets::{preset, Panel, PRESET_IDS};
use eomech::sweep::{
    evaluate_point, run_sweep, Axis, BranchPolicy, ObservableRecord, SweepParam, SweepSpec,
};
use serde_json::{json, Value};
use thiserror::Error;

use crate::manifest::{now_rfc3339, sha256_hex, sidecar_path, RunManifest};
use crate::table::{Cell, Format, Table};
use crate::{Cli, Command, DynamicsArgs, DynamicsMode, SweepArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(eomech::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("integration failed: {0}")]
    Integrator(eomech::Error),
    #[error("{0}")]
    Engine(eomech::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Read { .. } | CliError::Write { .. } => 4,
            CliError::Integrator(_) => 5,
            CliError::Engine(_) => 1,
        }
    }
}

const NO_STABLE_BRANCH: u8 = 3;

/// The config in force and where it came from.
struct Loaded {
    cfg: PhysicalConfig,
    path: Option<PathBuf>,
    sha256: String,
}

fn load(cli: &Cli) -> Result<Loaded, CliError> {
    let (text, path) = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Read {
                path: p.clone(),
                source,
            })?;
            (text, Some(p.clone()))
        }
        None => (REFERENCE_CONFIG.to_string(), None),
    };
    let cfg = load_config(&text).map_err(CliError::Config)?;
    Ok(Loaded {
        cfg,
        path,
        sha256: sha256_hex(text.as_bytes()),
    })
}

pub fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let loaded = load(cli)?;
    match &cli.command {
        Command::Point => point(cli, &loaded),
        Command::Sweep(args) => sweep(cli, &loaded, args),
        Command::Dynamics(args) => dynamics(cli, &loaded, args),
        Command::Stability => stability(cli, &loaded),
    }
}

struct ManifestExtras {
    command: &'static str,
    preset: Option<String>,
    axes: Vec<String>,
    g2_ratio: Option<f64>,
    branch_policy: Option<String>,
    resolved: Value,
}

impl ManifestExtras {
    fn plain(command: &'static str, cfg: &PhysicalConfig) -> Self {
        ManifestExtras {
            command,
            preset: None,
            axes: Vec::new(),
            g2_ratio: None,
            branch_policy: None,
            resolved: cfg.to_json_value(),
        }
    }
}

/// Writes each `(path, bytes)` and a manifest sidecar next to it; with no
/// `--out`, everything goes to stdout and no manifest is written.
fn emit(
    loaded: &Loaded,
    format: &str,
    outputs: Vec<(Option<PathBuf>, Vec<u8>)>,
    extras: ManifestExtras,
) -> Result<(), CliError> {
    let files: Vec<PathBuf> = outputs.iter().filter_map(|(p, _)| p.clone()).collect();
    for (path, bytes) in &outputs {
        match path {
            None => {
                let mut out = io::stdout().lock();
                out.write_all(bytes)
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Write {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })?;
            }
            Some(path) => {
                write_file(path, bytes)?;
                let manifest = RunManifest {
                    command: extras.command.to_string(),
                    config_path: loaded.path.clone(),
                    config_sha256: loaded.sha256.clone(),
                    preset: extras.preset.clone(),
                    axes: extras.axes.clone(),
                    g2_ratio: extras.g2_ratio,
                    branch_policy: extras.branch_policy.clone(),
                    outputs: files.clone(),
                    format: format.to_string(),
                    tool_version: env!("CARGO_PKG_VERSION").to_string(),
                    timestamp: now_rfc3339(),
                    resolved_config: extras.resolved.clone(),
                };
                let text = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
                write_file(&sidecar_path(path), &text)?;
            }
        }
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let err = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(err)?);
    w.write_all(bytes).map_err(err)?;
    w.flush().map_err(err)
}

fn render(table: &Table, format: Format) -> Vec<u8> {
    let mut buf = Vec::new();
    table.write(format, &mut buf).expect("writing to memory");
    buf
}

fn matrix_json(m: &Matrix6) -> Value {
    Value::Array(
        (0..6)
            .map(|i| Value::Array((0..6).map(|j| json!(m[(i, j)])).collect()))
            .collect(),
    )
}

fn rates_json(r: &DerivedRates) -> Value {
    json!({
        "g1": r.g1, "g2": r.g2, "gw": r.gw,
        "e_d": r.e_d, "e_dw": r.e_dw,
        "n_c": r.n_c, "n_w": r.n_w, "n_m": r.n_m,
        "gamma_m": r.gamma_m, "omega_m": r.omega_m,
        "kappa": r.kappa, "kappa_w": r.kappa_w,
        "delta0c": r.delta0c, "delta0w": r.delta0w,
    })
}

/// Drift, diffusion and (for stable branches) covariance at one branch.
fn matrices(rates: &DerivedRates, branch: &SteadyBranch) -> Value {
    let drift = DriftCoefficients::at_branch(rates, branch).drift();
    let diffusion = build_diffusion(rates);
    let covariance = if branch.stable {
        solve_lyapunov(&drift, &diffusion)
            .map(|v| matrix_json(v.matrix()))
            .unwrap_or(Value::Null)
    } else {
        Value::Null
    };
    json!({
        "drift": matrix_json(&drift.matrix),
        "diffusion": matrix_json(&diffusion.matrix()),
        "covariance": covariance,
    })
}

const ROW_COLUMNS: [&str; 38] = [
    "panel",
    "delta0c_rad_s",
    "delta0w_rad_s",
    "kappa_rad_s",
    "g2_over_g1",
    "temperature_k",
    "power_optical_w",
    "power_microwave_w",
    "branch_index",
    "branch_count",
    "stable",
    "eigen_stable",
    "rh_stable",
    "spectral_abscissa",
    "s1",
    "s2",
    "s3",
    "s4",
    "s5",
    "s6",
    "q",
    "intensity",
    "intensity_w",
    "delta_c",
    "delta_w",
    "omega_m_tilde",
    "en_ow",
    "en_om",
    "en_mw",
    "n_eff",
    "var_q",
    "var_p",
    "s_q",
    "s_p",
    "lyapunov_residual",
    "uncertainty_margin",
    "degenerate",
    "error",
];

fn record_row(panel: &str, r: &ObservableRecord) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![panel.into()];
    row.extend(r.coords.iter().map(|&x| Cell::Num(x)));
    row.push(r.branch_index.into());
    row.push(r.branch_count.into());
    row.push(r.stable.into());
    let a = r.analysis.as_ref();
    row.push(a.map_or(Cell::Empty, |a| a.eigen_stable.into()));
    row.push(a.map_or(Cell::Empty, |a| a.rh_stable.into()));
    row.push(a.map(|a| a.abscissa).into());
    for k in 0..6 {
        row.push(a.map(|a| a.rh_terms[k]).into());
    }
    let b = a.map(|a| &a.branch);
    row.push(b.map(|b| b.q).into());
    row.push(b.map(|b| b.intensity).into());
    row.push(b.map(|b| b.intensity_w).into());
    row.push(b.map(|b| b.delta_c).into());
    row.push(b.map(|b| b.delta_w).into());
    row.push(b.map(|b| b.omega_m_tilde).into());
    let o = r.observables();
    let values = o.map(|o| {
        [
            o.en_ow, o.en_om, o.en_mw, o.n_eff, o.var_q, o.var_p, o.s_q, o.s_p,
        ]
    });
    for k in 0..8 {
        row.push(values.map(|v| v[k]).into());
    }
    row.push(a.and_then(|a| a.lyapunov_residual).into());
    row.push(a.and_then(|a| a.uncertainty_margin).into());
    row.push(b.map_or(Cell::Empty, |b| b.degenerate.into()));
    row.push(r.error.clone().into());
    row
}

fn parse_policy(s: &str) -> Result<BranchPolicy, CliError> {
    match s {
        "lowest-stable" => Ok(BranchPolicy::LowestStable),
        "all-stable" => Ok(BranchPolicy::AllStable),
        "all" => Ok(BranchPolicy::All),
        _ => s.parse::<usize>().map(BranchPolicy::Index).map_err(|_| {
            CliError::Usage(format!(
                "unknown branch policy `{s}` (expected lowest-stable, all-stable, all or an index)"
            ))
        }),
    }
}

fn policy_name(p: BranchPolicy) -> String {
    match p {
        BranchPolicy::LowestStable => "lowest-stable".into(),
        BranchPolicy::AllStable => "all-stable".into(),
        BranchPolicy::All => "all".into(),
        BranchPolicy::Index(k) => k.to_string(),
    }
}

fn parse_axis(s: &str) -> Result<Axis, CliError> {
    let bad = |why: &str| {
        CliError::Usage(format!(
            "bad --axis `{s}`: {why} (expected PARAM:START:STOP:COUNT)"
        ))
    };
    let parts: Vec<&str> = s.split(':').collect();
    let [name, start, stop, count] = parts[..] else {
        return Err(bad("need four fields"));
    };
    let param = SweepParam::parse(name).ok_or_else(|| bad("unknown parameter"))?;
    let start: f64 = start.parse().map_err(|_| bad("START is not a number"))?;
    let stop: f64 = stop.parse().map_err(|_| bad("STOP is not a number"))?;
    let count: usize = count
        .parse()
        .map_err(|_| bad("COUNT is not a positive integer"))?;
    if count == 0 {
        return Err(bad("COUNT must be at least 1"));
    }
    Ok(Axis::linspace(param, start, stop, count))
}

fn with_ratio(cfg: &PhysicalConfig, ratio: Option<f64>) -> PhysicalConfig {
    let mut c = cfg.clone();
    if let Some(r) = ratio {
        SweepParam::G2OverG1.set(&mut c, r);
    }
    c
}

fn format_or(cli: &Cli, default: Format) -> Format {
    cli.format.unwrap_or(default)
}

fn sweep(cli: &Cli, loaded: &Loaded, args: &SweepArgs) -> Result<ExitCode, CliError> {
    let policy = args.branches.as_deref().map(parse_policy).transpose()?;
    let panels: Vec<Panel> = match (&args.preset, args.axes.is_empty()) {
        (Some(_), false) => {
            return Err(CliError::Usage(
                "give either --preset or --axis, not both".into(),
            ));
        }
        (None, true) => return Err(CliError::Usage("sweep needs --preset or --axis".into())),
        (Some(id), true) => {
            let p = preset(id, &loaded.cfg).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset `{id}`; known: {}",
                    PRESET_IDS.join(", ")
                ))
            })?;
            let p = match args.g2_ratio {
                Some(r) => p.with_g2_ratio(r),
                None => p,
            };
            p.panels
        }
        (None, false) => {
            let axes = args
                .axes
                .iter()
                .map(|a| parse_axis(a))
                .collect::<Result<_, _>>()?;
            vec![Panel {
                label: "sweep".into(),
                spec: SweepSpec {
                    base: with_ratio(&loaded.cfg, args.g2_ratio),
                    axes,
                    policy: BranchPolicy::LowestStable,
                },
            }]
        }
    };
    let format = format_or(cli, Format::Csv);
    let mut table = Table::new(ROW_COLUMNS.to_vec());
    let mut dumps = Vec::new();
    let mut policies = Vec::new();
    for mut panel in panels {
        if let Some(p) = policy {
            panel.spec.policy = p;
        }
        let name = policy_name(panel.spec.policy);
        if !policies.contains(&name) {
            policies.push(name);
        }
        let rows = run_sweep(&panel.spec, cli.jobs).map_err(CliError::Config)?;
        for r in &rows {
            table.push(record_row(&panel.label, r));
            if cli.dump_matrices {
                dumps.push(dump_for_record(&panel.spec.base, &panel.label, r));
            }
        }
    }

    let axes = if args.axes.is_empty() {
        Vec::new()
    } else {
        args.axes.clone()
    };
    let mut outputs = vec![(cli.out.clone(), render(&table, format))];
    if cli.dump_matrices {
        let path = cli.out.as_ref().map(|p| matrices_path(p));
        let mut bytes = serde_json::to_vec_pretty(&Value::Array(dumps)).expect("serializes");
        bytes.push(b'\n');
        outputs.push((path, bytes));
    }
    emit(
        loaded,
        format.extension(),
        outputs,
        ManifestExtras {
            command: "sweep",
            preset: args.preset.clone(),
            axes,
            g2_ratio: args.g2_ratio,
            branch_policy: Some(policies.join(",")),
            resolved: with_ratio(&loaded.cfg, args.g2_ratio).to_json_value(),
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn matrices_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".matrices.json");
    out.with_file_name(name)
}

fn dump_for_record(base: &PhysicalConfig, panel: &str, r: &ObservableRecord) -> Value {
    let mut cfg = base.clone();
    for (p, v) in SweepParam::ALL.iter().zip(r.coords) {
        p.set(&mut cfg, v);
    }
    let m = match (derive_couplings(&cfg), r.analysis.as_ref()) {
        (Ok(rates), Some(a)) => matrices(&rates, &a.branch),
        _ => Value::Null,
    };
    json!({
        "panel": panel,
        "coords": r.coords,
        "branch_index": r.branch_index,
        "matrices": m,
    })
}

fn point(cli: &Cli, loaded: &Loaded) -> Result<ExitCode, CliError> {
    let rates = derive_couplings(&loaded.cfg).map_err(CliError::Config)?;
    let rows = evaluate_point(&loaded.cfg, BranchPolicy::All);
    if let Some(e) = rows
        .iter()
        .find(|r| r.branch_index.is_none())
        .and_then(|r| r.error.clone())
    {
        return Err(CliError::Engine(eomech::Error::NoSteadyState(e)));
    }
    let any_stable = rows.iter().any(|r| r.stable);
    let format = cli.format;
    let bytes = match format {
        Some(Format::Csv) => {
            let mut table = Table::new(ROW_COLUMNS.to_vec());
            for r in &rows {
                table.push(record_row("point", r));
            }
            render(&table, Format::Csv)
        }
        Some(Format::Json) | None => {
            let branches: Vec<Value> = rows
                .iter()
                .filter_map(|r| {
                    let a = r.analysis.as_ref()?;
                    let b = &a.branch;
                    let o = r.observables();
                    let mut v = json!({
                        "index": r.branch_index,
                        "stable": r.stable,
                        "degenerate": b.degenerate,
                        "q": b.q, "q2": b.q2, "p2": b.p2,
                        "a": [b.a.re, b.a.im], "aw": [b.aw.re, b.aw.im],
                        "intensity": b.intensity, "intensity_w": b.intensity_w,
                        "delta_c": b.delta_c, "delta_w": b.delta_w,
                        "omega_m_tilde": b.omega_m_tilde,
                        "omega_m_prime": b.omega_m_prime,
                        "g_tilde": b.g_tilde,
                        "residual": b.residual,
                        "routh_hurwitz": a.rh_terms,
                        "rh_stable": a.rh_stable,
                        "eigen_stable": a.eigen_stable,
                        "spectral_abscissa": a.abscissa,
                        "observables": o.map(|o| json!({
                            "en_ow": o.en_ow, "en_om": o.en_om, "en_mw": o.en_mw,
                            "n_eff": o.n_eff, "var_q": o.var_q, "var_p": o.var_p,
                            "s_q_db": o.s_q, "s_p_db": o.s_p,
                        })),
                        "lyapunov_residual": a.lyapunov_residual,
                        "uncertainty_margin": a.uncertainty_margin,
                        "error": r.error,
                    });
                    // The covariance is always part of the point report.
                    let m = matrices(&rates, b);
                    v["covariance"] = m["covariance"].clone();
                    if cli.dump_matrices {
                        v["drift"] = m["drift"].clone();
                        v["diffusion"] = m["diffusion"].clone();
                    }
                    Some(v)
                })
                .collect();
            let report = json!({
                "config": loaded.cfg.to_json_value(),
                "rates": rates_json(&rates),
                "branches": branches,
            });
            let mut bytes = serde_json::to_vec_pretty(&report).expect("serializes");
            bytes.push(b'\n');
            bytes
        }
    };
    let ext = format.unwrap_or(Format::Json).extension();
    emit(
        loaded,
        ext,
        vec![(cli.out.clone(), bytes)],
        ManifestExtras::plain("point", &loaded.cfg),
    )?;
    if any_stable {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("no stable steady state");
        Ok(ExitCode::from(NO_STABLE_BRANCH))
    }
}

const STABILITY_COLUMNS: [&str; 20] = [
    "branch_index",
    "branch_count",
    "stable",
    "degenerate",
    "q",
    "intensity",
    "intensity_w",
    "delta_c",
    "delta_w",
    "omega_m_tilde",
    "spectral_abscissa",
    "eigen_stable",
    "rh_stable",
    "s1",
    "s2",
    "s3",
    "s4",
    "s5",
    "s6",
    "verdicts_agree",
];

fn stability(cli: &Cli, loaded: &Loaded) -> Result<ExitCode, CliError> {
    let rates = derive_couplings(&loaded.cfg).map_err(CliError::Config)?;
    let branches = steady_states(&rates).map_err(CliError::Engine)?;
    let format = format_or(cli, Format::Csv);
    let mut table = Table::new(STABILITY_COLUMNS.to_vec());
    let mut dumps = Vec::new();
    for (k, b) in branches.iter().enumerate() {
        let a = eomech::sweep::analyze_branch(&rates, b).map_err(CliError::Engine)?;
        let mut row: Vec<Cell> = vec![
            k.into(),
            branches.len().into(),
            b.stable.into(),
            b.degenerate.into(),
            b.q.into(),
            b.intensity.into(),
            b.intensity_w.into(),
            b.delta_c.into(),
            b.delta_w.into(),
            b.omega_m_tilde.into(),
            a.abscissa.into(),
            a.eigen_stable.into(),
            a.rh_stable.into(),
        ];
        row.extend(a.rh_terms.iter().map(|&s| Cell::Num(s)));
        row.push((a.eigen_stable == a.rh_stable).into());
        table.push(row);
        if cli.dump_matrices {
            dumps.push(json!({"branch_index": k, "matrices": matrices(&rates, b)}));
        }
    }
    let mut outputs = vec![(cli.out.clone(), render(&table, format))];
    if cli.dump_matrices {
        let mut bytes = serde_json::to_vec_pretty(&Value::Array(dumps)).expect("serializes");
        bytes.push(b'\n');
        outputs.push((cli.out.as_ref().map(|p| matrices_path(p)), bytes));
    }
    emit(
        loaded,
        format.extension(),
        outputs,
        ManifestExtras::plain("stability", &loaded.cfg),
    )?;
    if branches.iter().any(|b| b.stable) {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("no stable steady state");
        Ok(ExitCode::from(NO_STABLE_BRANCH))
    }
}

const FULL_COLUMNS: [&str; 11] = [
    "t", "re_a", "im_a", "abs_a_sq", "q", "p", "q2", "p2", "pqqp", "re_aw", "im_aw",
];
const ADIABATIC_COLUMNS: [&str; 5] = ["t", "abs_a_sq", "q", "p", "abs_aw_sq"];

fn trajectory_table(cfg: &PhysicalConfig, args: &DynamicsArgs) -> Result<Table, CliError> {
    let rates = derive_couplings(cfg).map_err(CliError::Config)?;
    let t_end = match (args.t_end, args.t_end_gamma) {
        (Some(t), _) => t,
        (None, g) => g.unwrap_or(5.0) / rates.gamma_m,
    };
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(CliError::Usage(format!(
            "end time must be finite and >= 0, got {t_end}"
        )));
    }
    let samples: Vec<f64> = if t_end == 0.0 || args.samples == 0 {
        vec![0.0]
    } else {
        (0..=args.samples)
            .map(|k| t_end * k as f64 / args.samples as f64)
            .collect()
    };
    let table = match args.mode {
        DynamicsMode::Full => {
            let tr = integrate_full(&rates, &MeanFieldState::vacuum(), &samples, args.tol)
                .map_err(integrator_error)?;
            let mut table = Table::new(FULL_COLUMNS.to_vec());
            for (t, s) in tr.times.iter().zip(&tr.states) {
                table.push(
                    [
                        *t,
                        s.a.re,
                        s.a.im,
                        s.a.norm_sqr(),
                        s.q,
                        s.p,
                        s.q2,
                        s.p2,
                        s.pqqp,
                        s.aw.re,
                        s.aw.im,
                    ]
                    .map(Cell::Num)
                    .to_vec(),
                );
            }
            table
        }
        DynamicsMode::Adiabatic => {
            let tr = integrate_adiabatic(&rates, 0.0, 0.0, &samples, args.tol)
                .map_err(integrator_error)?;
            let mut table = Table::new(ADIABATIC_COLUMNS.to_vec());
            for (t, s) in tr.times.iter().zip(&tr.states) {
                table.push(
                    [*t, s.intensity, s.q, s.p, s.intensity_w]
                        .map(Cell::Num)
                        .to_vec(),
                );
            }
            table
        }
    };
    Ok(table)
}

fn integrator_error(e: eomech::Error) -> CliError {
    match e {
        eomech::Error::Tolerance(_) | eomech::Error::Sweep(_) => CliError::Usage(e.to_string()),
        e => CliError::Integrator(e),
    }
}

/// `runs/fig2.csv` + `0.008` → `runs/fig2-g2_0.008.csv`.
fn per_ratio_path(out: &Path, ratio: f64) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    let name = match out.extension() {
        Some(ext) => format!("{stem}-g2_{ratio}.{}", ext.to_string_lossy()),
        None => format!("{stem}-g2_{ratio}"),
    };
    out.with_file_name(name)
}

fn dynamics(cli: &Cli, loaded: &Loaded, args: &DynamicsArgs) -> Result<ExitCode, CliError> {
    let format = format_or(cli, Format::Csv);
    let mut plan: Option<(Vec<f64>, f64)> = None;
    if let Some(id) = &args.preset {
        let p = preset(id, &loaded.cfg).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown preset `{id}`; known: {}",
                PRESET_IDS.join(", ")
            ))
        })?;
        let d = p
            .dynamics
            .ok_or_else(|| CliError::Usage(format!("preset `{id}` has no dynamics runs")))?;
        let ratios = args.g2_ratio.map_or(d.g2_ratios, |r| vec![r]);
        plan = Some((ratios, d.t_end_gamma));
    }
    let mut outputs = Vec::new();
    match plan {
        Some((ratios, t_end_gamma)) => {
            let out = cli.out.as_ref().ok_or_else(|| {
                CliError::Usage("--out is required when a preset writes several files".into())
            })?;
            let args = DynamicsArgs {
                t_end_gamma: args.t_end_gamma.or(Some(t_end_gamma)),
                preset: None,
                g2_ratio: None,
                ..*args
            };
            for r in ratios {
                let table = trajectory_table(&with_ratio(&loaded.cfg, Some(r)), &args)?;
                outputs.push((Some(per_ratio_path(out, r)), render(&table, format)));
            }
        }
        None => {
            let table = trajectory_table(&with_ratio(&loaded.cfg, args.g2_ratio), args)?;
            outputs.push((cli.out.clone(), render(&table, format)));
        }
    }
    emit(
        loaded,
        format.extension(),
        outputs,
        ManifestExtras {
            command: "dynamics",
            preset: args.preset.clone(),
            axes: Vec::new(),
            g2_ratio: args.g2_ratio,
            branch_policy: None,
            resolved: with_ratio(&loaded.cfg, args.g2_ratio).to_json_value(),
        },
    )?;
    Ok(ExitCode::SUCCESS)
}
