//! Parameter sweeps producing one observable row per grid point and branch,
//! and the critical-temperature search.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fluct::{
    build_diffusion, is_stable_eigen, lyapunov_residual, solve_lyapunov, DriftCoefficients,
};
use crate::gaussian::{log_negativity, reduce_bipartition, ModePair, Observables};
use crate::meanfield::{steady_states, SteadyBranch};
use crate::params::{derive_couplings, PhysicalConfig, QuadraticCoupling};

/// A sweepable parameter; values are SI (rad/s, K, W) or the bare ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    Delta0c,
    Delta0w,
    Kappa,
    G2OverG1,
    Temperature,
    Power,
    PowerW,
}

impl SweepParam {
    pub const ALL: [SweepParam; 7] = [
        SweepParam::Delta0c,
        SweepParam::Delta0w,
        SweepParam::Kappa,
        SweepParam::G2OverG1,
        SweepParam::Temperature,
        SweepParam::Power,
        SweepParam::PowerW,
    ];

    /// Column / CLI name.
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Delta0c => "delta0c_rad_s",
            SweepParam::Delta0w => "delta0w_rad_s",
            SweepParam::Kappa => "kappa_rad_s",
            SweepParam::G2OverG1 => "g2_over_g1",
            SweepParam::Temperature => "temperature_k",
            SweepParam::Power => "power_optical_w",
            SweepParam::PowerW => "power_microwave_w",
        }
    }

    /// Accepts the column name or a short alias (`delta0w`, `kappa`, `g2`, `t`, `p`, `pw`).
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.to_ascii_lowercase();
        SweepParam::ALL.into_iter().find(|p| {
            p.name() == s
                || match p {
                    SweepParam::Delta0c => s == "delta0c",
                    SweepParam::Delta0w => s == "delta0w",
                    SweepParam::Kappa => s == "kappa",
                    SweepParam::G2OverG1 => s == "g2" || s == "g2_ratio",
                    SweepParam::Temperature => s == "t" || s == "temperature",
                    SweepParam::Power => s == "p" || s == "power",
                    SweepParam::PowerW => s == "pw" || s == "power_w",
                }
        })
    }

    pub fn get(self, cfg: &PhysicalConfig) -> f64 {
        match self {
            SweepParam::Delta0c => cfg.delta0c,
            SweepParam::Delta0w => cfg.delta0w,
            SweepParam::Kappa => cfg.kappa,
            SweepParam::G2OverG1 => match cfg.qoc {
                QuadraticCoupling::Ratio(r) => r,
                QuadraticCoupling::Reflectivity { .. } => f64::NAN,
            },
            SweepParam::Temperature => cfg.temperature,
            SweepParam::Power => cfg.power,
            SweepParam::PowerW => cfg.power_w,
        }
    }

    pub fn set(self, cfg: &mut PhysicalConfig, value: f64) {
        match self {
            SweepParam::Delta0c => cfg.delta0c = value,
            SweepParam::Delta0w => cfg.delta0w = value,
            SweepParam::Kappa => cfg.kappa = value,
            SweepParam::G2OverG1 => cfg.qoc = QuadraticCoupling::Ratio(value),
            SweepParam::Temperature => cfg.temperature = value,
            SweepParam::Power => cfg.power = value,
            SweepParam::PowerW => cfg.power_w = value,
        }
    }
}

/// One swept parameter and its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl Axis {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(param: SweepParam, start: f64, stop: f64, count: usize) -> Self {
        let values = match count {
            0 => vec![],
            1 => vec![start],
            n => (0..n)
                .map(|k| {
                    if k + 1 == n {
                        stop
                    } else {
                        start + (stop - start) * k as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        };
        Axis { param, values }
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Sweep(format!("axis {} is empty", self.param.name())));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Sweep(format!(
                "axis {} has a non-finite value",
                self.param.name()
            )));
        }
        let up = self.values.windows(2).all(|w| w[1] > w[0]);
        let down = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::Sweep(format!(
                "axis {} must be strictly monotonic",
                self.param.name()
            )));
        }
        Ok(())
    }
}

/// Which steady branches produce rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchPolicy {
    /// The stable branch with the smallest intracavity intensity.
    #[default]
    LowestStable,
    /// Every stable branch.
    AllStable,
    /// Every branch; unstable ones carry no observables.
    All,
    /// The k-th branch in ascending intensity.
    Index(usize),
}

/// A 1- or 2-axis sweep around a base configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: PhysicalConfig,
    pub axes: Vec<Axis>,
    pub policy: BranchPolicy,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.axes.len()) {
            return Err(Error::Sweep(format!(
                "expected 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::Sweep(
                "the two axes must sweep different parameters".into(),
            ));
        }
        for a in &self.axes {
            a.validate()?;
        }
        self.base.validate()
    }

    /// Grid points in row-major order (first axis outermost).
    pub fn points(&self) -> Vec<PhysicalConfig> {
        let mut out = vec![self.base.clone()];
        for axis in &self.axes {
            out = out
                .into_iter()
                .flat_map(|cfg| {
                    axis.values.iter().map(move |&v| {
                        let mut c = cfg.clone();
                        axis.param.set(&mut c, v);
                        c
                    })
                })
                .collect();
        }
        out
    }
}

/// Stability and observables of one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchAnalysis {
    pub branch: SteadyBranch,
    pub eigen_stable: bool,
    pub abscissa: f64,
    pub rh_stable: bool,
    pub rh_terms: [f64; 6],
    pub observables: Option<Observables>,
    pub lyapunov_residual: Option<f64>,
    pub uncertainty_margin: Option<f64>,
    pub error: Option<String>,
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableRecord {
    /// Values of every [`SweepParam`] at this point, in `SweepParam::ALL` order.
    pub coords: [f64; 7],
    pub branch_index: Option<usize>,
    pub branch_count: usize,
    pub stable: bool,
    pub analysis: Option<BranchAnalysis>,
    pub error: Option<String>,
}

impl ObservableRecord {
    pub fn observables(&self) -> Option<&Observables> {
        self.analysis.as_ref()?.observables.as_ref()
    }

    pub fn coord(&self, p: SweepParam) -> f64 {
        self.coords[SweepParam::ALL.iter().position(|q| *q == p).unwrap()]
    }
}

/// Full fluctuation analysis of one branch.
pub fn analyze_branch(
    rates: &crate::params::DerivedRates,
    branch: &SteadyBranch,
) -> Result<BranchAnalysis> {
    let coeffs = DriftCoefficients::at_branch(rates, branch);
    let drift = coeffs.drift();
    let spectrum = is_stable_eigen(&drift)?;
    let rh = coeffs.routh_hurwitz();
    if rh.stable != spectrum.stable && !spectrum.is_marginal(rates.omega_m) {
        log::warn!(
            "Routh–Hurwitz ({}) and eigenvalue ({}) verdicts differ at abscissa {:e}",
            rh.stable,
            spectrum.stable,
            spectrum.abscissa
        );
    }
    let mut out = BranchAnalysis {
        branch: *branch,
        eigen_stable: spectrum.stable,
        abscissa: spectrum.abscissa,
        rh_stable: rh.stable,
        rh_terms: rh.terms,
        observables: None,
        lyapunov_residual: None,
        uncertainty_margin: None,
        error: None,
    };
    if !branch.stable {
        return Ok(out);
    }
    let diffusion = build_diffusion(rates);
    let result = solve_lyapunov(&drift, &diffusion).and_then(|v| {
        let residual = lyapunov_residual(&drift, &v, &diffusion.matrix());
        let margin = v.uncertainty_margin();
        if margin < -1e-6 {
            log::warn!("covariance violates the uncertainty relation by {margin:e}");
        }
        Ok((residual, margin, Observables::from_covariance(&v)?))
    });
    match result {
        Ok((residual, margin, obs)) => {
            out.lyapunov_residual = Some(residual);
            out.uncertainty_margin = Some(margin);
            out.observables = Some(obs);
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    Ok(out)
}

fn coords_of(cfg: &PhysicalConfig) -> [f64; 7] {
    SweepParam::ALL.map(|p| p.get(cfg))
}

/// Rows for one grid point under `policy`.
pub fn evaluate_point(cfg: &PhysicalConfig, policy: BranchPolicy) -> Vec<ObservableRecord> {
    let coords = coords_of(cfg);
    let failed = |msg: String| ObservableRecord {
        coords,
        branch_index: None,
        branch_count: 0,
        stable: false,
        analysis: None,
        error: Some(msg),
    };
    let rates = match derive_couplings(cfg) {
        Ok(r) => r,
        Err(e) => return vec![failed(e.to_string())],
    };
    let branches = match steady_states(&rates) {
        Ok(b) => b,
        Err(e) => return vec![failed(e.to_string())],
    };
    let count = branches.len();
    let selected: Vec<usize> = match policy {
        BranchPolicy::LowestStable => branches.iter().position(|b| b.stable).into_iter().collect(),
        BranchPolicy::AllStable => (0..count).filter(|&k| branches[k].stable).collect(),
        BranchPolicy::All => (0..count).collect(),
        BranchPolicy::Index(k) => (k < count).then_some(k).into_iter().collect(),
    };
    if selected.is_empty() {
        let note = match policy {
            BranchPolicy::Index(k) if k >= count => {
                Some(format!("branch {k} requested but only {count} found"))
            }
            _ => None,
        };
        return vec![ObservableRecord {
            coords,
            branch_index: None,
            branch_count: count,
            stable: false,
            analysis: None,
            error: note,
        }];
    }
    selected
        .into_iter()
        .map(|k| match analyze_branch(&rates, &branches[k]) {
            Ok(a) => ObservableRecord {
                coords,
                branch_index: Some(k),
                branch_count: count,
                stable: branches[k].stable,
                error: a.error.clone(),
                analysis: Some(a),
            },
            Err(e) => ObservableRecord {
                coords,
                branch_index: Some(k),
                branch_count: count,
                stable: false,
                analysis: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

/// Runs the sweep. `jobs` = None uses the global rayon pool; the output is
/// identical for every worker count.
pub fn run_sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<Vec<ObservableRecord>> {
    spec.validate()?;
    let points = spec.points();
    let work = || -> Vec<ObservableRecord> {
        points
            .par_iter()
            .map(|cfg| evaluate_point(cfg, spec.policy))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    match jobs {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Sweep(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

/// Zero-entanglement threshold for the critical-temperature search.
pub const EN_ZERO: f64 = 1e-6;

/// Logarithmic negativity of `pair` on the lowest stable branch at `cfg`.
pub fn entanglement_at(cfg: &PhysicalConfig, pair: ModePair) -> Result<f64> {
    let rates = derive_couplings(cfg)?;
    let branches = steady_states(&rates)?;
    let branch = branches
        .iter()
        .find(|b| b.stable)
        .ok_or_else(|| Error::NoSteadyState("no stable branch".into()))?;
    let drift = DriftCoefficients::at_branch(&rates, branch).drift();
    let v = solve_lyapunov(&drift, &build_diffusion(&rates))?;
    log_negativity(&reduce_bipartition(&v, pair))
}

/// Smallest temperature at which E_N(pair) drops below [`EN_ZERO`], found by
/// bisection to 10⁻⁴ K. Returns 0 when there is no entanglement at `t_lo`.
pub fn critical_temperature(
    base: &PhysicalConfig,
    pair: ModePair,
    t_lo: f64,
    t_hi: f64,
) -> Result<f64> {
    if !(t_lo >= 0.0 && t_hi > t_lo) {
        return Err(Error::Sweep(format!(
            "need 0 ≤ T_lo < T_hi, got {t_lo}, {t_hi}"
        )));
    }
    let en = |t: f64| {
        let mut cfg = base.clone();
        cfg.temperature = t;
        entanglement_at(&cfg, pair)
    };
    let en_lo = en(t_lo)?;
    if en_lo < EN_ZERO {
        return Ok(0.0);
    }
    let en_hi = en(t_hi)?;
    if en_hi >= EN_ZERO {
        return Err(Error::NotBracketed {
            t_lo,
            en_lo,
            t_hi,
            en_hi,
        });
    }
    let (mut lo, mut hi, mut e_lo) = (t_lo, t_hi, en_lo);
    while hi - lo >= 1e-4 {
        let mid = 0.5 * (lo + hi);
        let e = en(mid)?;
        if e >= EN_ZERO {
            if e > e_lo {
                log::warn!(
                    "E_N({}) not monotonic in T: {e:e} at {mid} K exceeds {e_lo:e} at {lo} K",
                    pair.name()
                );
            }
            lo = mid;
            e_lo = e;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
