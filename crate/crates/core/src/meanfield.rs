//! Classical mean-field dynamics and the self-consistent steady states.
//!
//! Mean-field second moments use the normalization in which the mechanical
//! vacuum has ⟨Q²⟩ = ⟨P²⟩ = 1.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fluct::{is_stable_eigen, DriftCoefficients};
use crate::ode::{integrate, Stats, Tolerance};
use crate::params::DerivedRates;

/// First and second moments of the three modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldState {
    pub a: Complex64,
    pub q: f64,
    pub p: f64,
    pub q2: f64,
    pub p2: f64,
    pub pqqp: f64,
    pub aw: Complex64,
}

impl MeanFieldState {
    /// Empty cavities, mechanical vacuum.
    pub fn vacuum() -> Self {
        MeanFieldState {
            a: Complex64::new(0.0, 0.0),
            q: 0.0,
            p: 0.0,
            q2: 1.0,
            p2: 1.0,
            pqqp: 0.0,
            aw: Complex64::new(0.0, 0.0),
        }
    }

    fn to_array(self) -> [f64; 9] {
        [
            self.a.re, self.a.im, self.q, self.p, self.q2, self.p2, self.pqqp, self.aw.re,
            self.aw.im,
        ]
    }

    fn from_slice(y: &[f64]) -> Self {
        MeanFieldState {
            a: Complex64::new(y[0], y[1]),
            q: y[2],
            p: y[3],
            q2: y[4],
            p2: y[5],
            pqqp: y[6],
            aw: Complex64::new(y[7], y[8]),
        }
    }
}

/// Time derivative of the full mean-field system.
pub fn full_rhs(r: &DerivedRates, s: &MeanFieldState) -> MeanFieldState {
    let i = Complex64::i();
    let n = s.a.norm_sqr();
    let nw = s.aw.norm_sqr();
    let omt = r.omega_m - 2.0 * r.g2 * n;
    let force = r.g1 * n + r.gw * nw;
    let da = -(i * r.delta0c + r.kappa - i * r.g1 * s.q - i * r.g2 * s.q2) * s.a + r.e_d;
    let daw = -(i * r.delta0w + r.kappa_w - i * r.gw * s.q) * s.aw + r.e_dw;
    MeanFieldState {
        a: da,
        q: r.omega_m * s.p,
        p: -omt * s.q + force - r.gamma_m * s.p,
        q2: r.omega_m * s.pqqp,
        p2: -omt * s.pqqp + 2.0 * force * s.p - 2.0 * r.gamma_m * s.p2
            + 2.0 * r.gamma_m * (1.0 + 2.0 * r.n_m),
        pqqp: -2.0 * omt * s.q2 + 2.0 * r.omega_m * s.p2 + 2.0 * force * s.q - r.gamma_m * s.pqqp,
        aw: daw,
    }
}

/// Amplitude scales used to set absolute tolerances, from the drives at
/// their bare detunings.
struct Scales {
    a: f64,
    q: f64,
    aw: f64,
}

impl Scales {
    fn of(r: &DerivedRates) -> Self {
        let i = r.e_d * r.e_d / (r.delta0c * r.delta0c + r.kappa * r.kappa);
        let iw = r.e_dw * r.e_dw / (r.delta0w * r.delta0w + r.kappa_w * r.kappa_w);
        Scales {
            a: i.sqrt().max(1.0),
            q: ((r.g1 * i + r.gw * iw) / r.omega_m).max(1.0),
            aw: iw.sqrt().max(1.0),
        }
    }
}

/// A sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub stats: Stats,
}

fn check_samples(samples: &[f64]) -> Result<()> {
    if samples.is_empty() || samples.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Sweep(
            "sample times must be non-empty and non-decreasing".into(),
        ));
    }
    Ok(())
}

/// Converts raw second moments to variances and covariance and back. The
/// integrator works on the central form: during a large coherent transient
/// ⟨Q²⟩ is dominated by ⟨Q⟩², and its relative error would swamp the O(1)
/// fluctuation part.
fn to_central(s: &MeanFieldState) -> [f64; 9] {
    let mut y = s.to_array();
    y[4] -= s.q * s.q;
    y[5] -= s.p * s.p;
    y[6] -= 2.0 * s.q * s.p;
    y
}

fn from_central(y: &[f64]) -> MeanFieldState {
    let mut s = MeanFieldState::from_slice(y);
    s.q2 += s.q * s.q;
    s.p2 += s.p * s.p;
    s.pqqp += 2.0 * s.q * s.p;
    s
}

/// The mean-field equations in central form. The variance equations do not
/// involve the force, so they stay well conditioned however large ⟨Q⟩ gets.
fn central_rhs(r: &DerivedRates, y: &[f64], dy: &mut [f64]) {
    let s = from_central(y);
    let d = full_rhs(r, &s);
    let omt = r.omega_m - 2.0 * r.g2 * s.a.norm_sqr();
    let (vq, vp, c) = (y[4], y[5], y[6]);
    dy.copy_from_slice(&d.to_array());
    dy[4] = r.omega_m * c;
    dy[5] = -omt * c - 2.0 * r.gamma_m * vp + 2.0 * r.gamma_m * (1.0 + 2.0 * r.n_m);
    dy[6] = 2.0 * r.omega_m * vp - 2.0 * omt * vq - r.gamma_m * c;
}

/// Integrates the nine real mean-field ODEs and reports the state at each
/// sample time (the first sample is the initial time).
pub fn integrate_full(
    rates: &DerivedRates,
    init: &MeanFieldState,
    samples: &[f64],
    tol: f64,
) -> Result<Trajectory<MeanFieldState>> {
    check_samples(samples)?;
    let sc = Scales::of(rates);
    let v = 1.0 + 2.0 * rates.n_m;
    let tolerance = Tolerance::scaled(tol, &[sc.a, sc.a, sc.q, sc.q, v, v, v, sc.aw, sc.aw])?;
    let r = *rates;
    let (ys, stats) = integrate(
        |_, y, dy| central_rhs(&r, y, dy),
        &to_central(init),
        samples,
        &tolerance,
    )?;
    Ok(Trajectory {
        times: samples.to_vec(),
        states: ys.iter().map(|y| from_central(y)).collect(),
        stats,
    })
}

/// One sample of the adiabatic (cavity-eliminated) dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticState {
    pub q: f64,
    pub p: f64,
    pub intensity: f64,
    pub intensity_w: f64,
}

/// Cavity intensities slaved to the instantaneous mechanical position, with
/// ⟨Q²⟩ estimated as Q² + Ωm(1+2n_m)/Ω̃m. Solved by damped fixed-point
/// iteration on I; falls back to the last iterate if it does not settle.
pub fn adiabatic_intensities(r: &DerivedRates, q: f64) -> (f64, f64) {
    let dw = r.delta0w - r.gw * q;
    let iw = r.e_dw * r.e_dw / (dw * dw + r.kappa_w * r.kappa_w);
    let thermal = r.omega_m * (1.0 + 2.0 * r.n_m);
    let intensity_at = |i: f64| {
        let omt = r.omega_m - 2.0 * r.g2 * i;
        let q2 = q * q + if omt > 0.0 { thermal / omt } else { 0.0 };
        let dc = r.delta0c - r.g1 * q - r.g2 * q2;
        r.e_d * r.e_d / (dc * dc + r.kappa * r.kappa)
    };
    let mut i = intensity_at(0.0);
    if r.g2 != 0.0 {
        for _ in 0..200 {
            let next = 0.5 * (i + intensity_at(i));
            let done = (next - i).abs() <= 1e-13 * next.abs();
            i = next;
            if done {
                break;
            }
        }
    }
    (i, iw)
}

/// Integrates Q̈ + γm·Q̇ + Ωm·Ω̃m·Q = Ωm(g1·I + gw·Iw) as the first-order
/// pair Q̇ = Ωm·P, Ṗ = −Ω̃m·Q + g1·I + gw·Iw − γm·P.
pub fn integrate_adiabatic(
    rates: &DerivedRates,
    q0: f64,
    p0: f64,
    samples: &[f64],
    tol: f64,
) -> Result<Trajectory<AdiabaticState>> {
    check_samples(samples)?;
    let ratio = rates.kappa.min(rates.kappa_w) / rates.gamma_m;
    if ratio < 100.0 {
        log::warn!("adiabatic elimination questionable: min(κ, κw)/γm = {ratio:.3e} < 100");
    }
    let sc = Scales::of(rates);
    let tolerance = Tolerance::scaled(tol, &[sc.q, sc.q])?;
    let r = *rates;
    let (ys, stats) = integrate(
        |_, y, dy| {
            let (i, iw) = adiabatic_intensities(&r, y[0]);
            let omt = r.omega_m - 2.0 * r.g2 * i;
            dy[0] = r.omega_m * y[1];
            dy[1] = -omt * y[0] + r.g1 * i + r.gw * iw - r.gamma_m * y[1];
        },
        &[q0, p0],
        samples,
        &tolerance,
    )?;
    let states = ys
        .iter()
        .map(|y| {
            let (intensity, intensity_w) = adiabatic_intensities(&r, y[0]);
            AdiabaticState {
                q: y[0],
                p: y[1],
                intensity,
                intensity_w,
            }
        })
        .collect();
    Ok(Trajectory {
        times: samples.to_vec(),
        states,
        stats,
    })
}

/// A self-consistent mean-field fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyBranch {
    pub q: f64,
    pub q2: f64,
    pub p2: f64,
    pub a: Complex64,
    pub aw: Complex64,
    /// |a_ss|².
    pub intensity: f64,
    /// |aw_ss|².
    pub intensity_w: f64,
    pub delta_c: f64,
    pub delta_w: f64,
    pub omega_m_tilde: f64,
    /// √(Ωm·Ω̃m), or 0 when the spring has inverted.
    pub omega_m_prime: f64,
    pub g_tilde: f64,
    pub stable: bool,
    /// Ω̃m ≤ 0.
    pub degenerate: bool,
    /// Largest normalized residual of the fixed-point equations.
    pub residual: f64,
}

const GRID_UNIFORM: usize = 4000;
const GRID_SINH: usize = 12001;
const MERGE_RTOL: f64 = 1e-9;

/// The closed-form pieces of the fixed-point system at a trial Q.
struct Closure<'a> {
    r: &'a DerivedRates,
}

struct AtQ {
    intensity: f64,
    intensity_w: f64,
    delta_c: f64,
}

impl Closure<'_> {
    fn intensity_w(&self, q: f64) -> f64 {
        let r = self.r;
        let dw = r.delta0w - r.gw * q;
        r.e_dw * r.e_dw / (dw * dw + r.kappa_w * r.kappa_w)
    }

    /// Everything but the optical balance, using the mechanical balance
    /// Q·Ω̃m(I) = g1·I + gw·Iw(Q) to express I through Q.
    fn at(&self, q: f64) -> AtQ {
        let r = self.r;
        let iw = self.intensity_w(q);
        let g_tilde = r.g1 + 2.0 * r.g2 * q;
        let intensity = (q * r.omega_m - r.gw * iw) / g_tilde;
        self.complete(q, intensity, iw)
    }

    fn complete(&self, q: f64, intensity: f64, iw: f64) -> AtQ {
        let r = self.r;
        let omega_m_tilde = r.omega_m - 2.0 * r.g2 * intensity;
        let q2 = r.omega_m * (1.0 + 2.0 * r.n_m) / omega_m_tilde + q * q;
        let delta_c = r.delta0c - r.g1 * q - r.g2 * q2;
        AtQ {
            intensity,
            intensity_w: iw,
            delta_c,
        }
    }

    /// Optical balance I·(Δc² + κ²)/E_d² − 1, or I·(Δc² + κ²) without drive.
    fn residual(&self, x: &AtQ) -> f64 {
        let r = self.r;
        let lhs = x.intensity * (x.delta_c * x.delta_c + r.kappa * r.kappa);
        if r.e_d > 0.0 {
            lhs / (r.e_d * r.e_d) - 1.0
        } else {
            lhs
        }
    }
}

/// Search interval for the mechanical mean Q.
fn q_range(r: &DerivedRates) -> (f64, f64) {
    let i_max = r.e_d * r.e_d / (r.kappa * r.kappa);
    let iw_max = r.e_dw * r.e_dw / (r.kappa_w * r.kappa_w);
    let q_lin = (r.g1 * i_max + r.gw * iw_max) / r.omega_m;
    if r.g2 == 0.0 {
        return (-1.0, 1.01 * q_lin + 10.0);
    }
    let g2 = r.g2.abs();
    let i_star = r.omega_m / (2.0 * g2);
    let quartic = ((r.e_d / i_star.sqrt() + r.delta0c.abs() + r.kappa) / g2).sqrt() + r.g1 / g2;
    let span = 4.0 * q_lin.max(quartic) + 10.0;
    if r.g2 < 0.0 {
        (-1.0, 1.01 * q_lin + 10.0)
    } else {
        (-span, span)
    }
}

fn trial_grid(lo: f64, hi: f64, core_hi: f64) -> Vec<f64> {
    let mut grid = Vec::with_capacity(GRID_UNIFORM + GRID_SINH + 2);
    let c_lo = lo.max(-1.0);
    let c_hi = core_hi.min(hi);
    for k in 0..GRID_UNIFORM {
        grid.push(c_lo + (c_hi - c_lo) * k as f64 / (GRID_UNIFORM - 1) as f64);
    }
    // sinh spacing resolves both small and very large |Q| on the wide range.
    let scale = 1.0;
    let u_lo = (lo / scale).asinh();
    let u_hi = (hi / scale).asinh();
    for k in 0..GRID_SINH {
        let u = u_lo + (u_hi - u_lo) * k as f64 / (GRID_SINH - 1) as f64;
        grid.push(scale * u.sinh());
    }
    grid.push(0.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn bisect(mut lo: f64, mut hi: f64, mut f_lo: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= 1e-15 * mid.abs().max(1e-300) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Sign-change roots of `f` on `grid`, skipping brackets where `admissible`
/// fails at either end or changes value across the bracket (poles).
fn grid_roots(grid: &[f64], f: impl Fn(f64) -> f64, admissible: impl Fn(f64) -> i8) -> Vec<f64> {
    let values: Vec<f64> = grid.iter().map(|&q| f(q)).collect();
    let mut roots = Vec::new();
    for k in 0..grid.len() {
        if values[k] == 0.0 && admissible(grid[k]) != 0 {
            roots.push(grid[k]);
            continue;
        }
        if k + 1 == grid.len() {
            break;
        }
        let (fa, fb) = (values[k], values[k + 1]);
        if !(fa.is_finite() && fb.is_finite()) || fb == 0.0 || (fa < 0.0) == (fb < 0.0) {
            continue;
        }
        let side = admissible(grid[k]);
        if side == 0 || side != admissible(grid[k + 1]) {
            continue;
        }
        roots.push(bisect(grid[k], grid[k + 1], fa, &f));
    }
    roots
}

/// Every real solution of the steady-state system, sorted by ascending
/// intensity, each with its stability verdict from the drift spectrum.
pub fn steady_states(rates: &DerivedRates) -> Result<Vec<SteadyBranch>> {
    let r = rates;
    let closure = Closure { r };
    let (lo, hi) = q_range(r);
    let core_hi = (r.g1 * r.e_d * r.e_d / (r.kappa * r.kappa)
        + r.gw * r.e_dw * r.e_dw / (r.kappa_w * r.kappa_w))
        / r.omega_m
        * 1.01
        + 10.0;
    let grid = trial_grid(lo, hi, core_hi);

    let mut points: Vec<(f64, AtQ)> = Vec::new();
    if r.g1 == 0.0 && r.g2 == 0.0 {
        // No optical force: Q balances the microwave force alone and the
        // cavity sees a fixed detuning.
        let roots = if r.gw == 0.0 || r.e_dw == 0.0 {
            vec![0.0]
        } else {
            grid_roots(
                &grid,
                |q| q * r.omega_m - r.gw * closure.intensity_w(q),
                |_| 1,
            )
        };
        for q in roots {
            let iw = closure.intensity_w(q);
            let mut x = closure.complete(q, 0.0, iw);
            x.intensity = r.e_d * r.e_d / (x.delta_c * x.delta_c + r.kappa * r.kappa);
            points.push((q, x));
        }
    } else {
        let sign = |q: f64| {
            let g = r.g1 + 2.0 * r.g2 * q;
            if g > 0.0 {
                1
            } else if g < 0.0 {
                -1
            } else {
                0
            }
        };
        for q in grid_roots(&grid, |q| closure.residual(&closure.at(q)), sign) {
            points.push((q, closure.at(q)));
        }
    }

    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, AtQ)> = Vec::new();
    for (q, x) in points {
        match merged.last() {
            Some((prev, _)) if (q - prev).abs() < MERGE_RTOL * q.abs().max(1.0) => {}
            _ => merged.push((q, x)),
        }
    }

    let mut branches = Vec::new();
    for (q, x) in merged {
        if !(x.intensity >= 0.0 && x.intensity_w >= 0.0) {
            continue;
        }
        let branch = make_branch(r, q, &x)?;
        if branch.residual > 1e-8 {
            log::warn!(
                "discarding spurious root at Q = {q:e} (residual {:e})",
                branch.residual
            );
            continue;
        }
        branches.push(branch);
    }
    if branches.is_empty() {
        return Err(Error::NoSteadyState(format!(
            "no sign change of the fixed-point residual on Q ∈ [{lo:e}, {hi:e}]"
        )));
    }
    branches.sort_by(|a, b| {
        a.intensity
            .total_cmp(&b.intensity)
            .then(a.q.total_cmp(&b.q))
    });
    Ok(branches)
}

fn make_branch(r: &DerivedRates, q: f64, x: &AtQ) -> Result<SteadyBranch> {
    let i = Complex64::i();
    let delta_w = r.delta0w - r.gw * q;
    let a = r.e_d / (i * x.delta_c + r.kappa);
    let aw = r.e_dw / (i * delta_w + r.kappa_w);
    let intensity = a.norm_sqr();
    let intensity_w = aw.norm_sqr();
    let omega_m_tilde = r.omega_m - 2.0 * r.g2 * intensity;
    let degenerate = omega_m_tilde <= 0.0;
    let q2 = r.omega_m * (1.0 + 2.0 * r.n_m) / omega_m_tilde + q * q;
    let delta_c = r.delta0c - r.g1 * q - r.g2 * q2;

    let force = r.g1 * intensity + r.gw * intensity_w;
    let mech = (q * omega_m_tilde - force).abs()
        / (force.abs() + (q * omega_m_tilde).abs()).max(f64::MIN_POSITIVE);
    let opt = if r.e_d > 0.0 {
        (intensity * (x.delta_c * x.delta_c + r.kappa * r.kappa) / (r.e_d * r.e_d) - 1.0)
            .abs()
            .max((delta_c - x.delta_c).abs() / (r.kappa + x.delta_c.abs()))
    } else {
        0.0
    };
    let residual = mech.max(opt);

    let mut branch = SteadyBranch {
        q,
        q2,
        p2: 1.0 + 2.0 * r.n_m,
        a,
        aw,
        intensity,
        intensity_w,
        delta_c,
        delta_w,
        omega_m_tilde,
        omega_m_prime: if degenerate {
            0.0
        } else {
            (r.omega_m * omega_m_tilde).sqrt()
        },
        g_tilde: r.g1 + 2.0 * r.g2 * q,
        stable: false,
        degenerate,
        residual,
    };
    let spectrum = is_stable_eigen(&DriftCoefficients::at_branch(r, &branch).drift())?;
    branch.stable = spectrum.stable && !degenerate;
    Ok(branch)
}

/// Steady states along a bare-detuning grid; each point is independent.
pub fn multistability_scan(
    rates: &DerivedRates,
    delta0c_grid: &[f64],
) -> Result<Vec<(f64, Result<Vec<SteadyBranch>>)>> {
    if delta0c_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Sweep("Δ0c grid must be strictly increasing".into()));
    }
    Ok(delta0c_grid
        .par_iter()
        .map(|&d| {
            let r = DerivedRates {
                delta0c: d,
                ..*rates
            };
            (d, steady_states(&r))
        })
        .collect())
}
