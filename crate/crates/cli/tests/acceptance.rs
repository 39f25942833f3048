//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use eomech::fluct::{
    build_diffusion, is_stable_eigen, solve_lyapunov, DiffusionMatrix, DriftCoefficients, Matrix6,
};
use eomech::gaussian::{log_negativity, BipartiteCM, ModePair};
use eomech::meanfield::steady_states;
use eomech::params::{
    derive_couplings, load_config, DerivedRates, PhysicalConfig, REFERENCE_CONFIG,
};
use eomech::presets::preset;
use eomech::sweep::{
    critical_temperature, evaluate_point, run_sweep, BranchPolicy, ObservableRecord, SweepParam,
    SweepSpec,
};
use nalgebra::{Complex, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn base() -> PhysicalConfig {
    load_config(REFERENCE_CONFIG).unwrap()
}

fn panel_rows(id: &str, label: &str) -> Vec<ObservableRecord> {
    let p = preset(id, &base()).unwrap();
    let panel = p
        .panels
        .iter()
        .find(|p| p.label == label)
        .unwrap_or_else(|| panic!("{id} has no panel {label}"));
    run_sweep(&panel.spec, None).unwrap()
}

fn run_spec(spec: &SweepSpec) -> Vec<ObservableRecord> {
    run_sweep(spec, None).unwrap()
}

/// (argmin coordinate, min value) of `value` over rows passing `keep`.
fn extremum(
    rows: &[ObservableRecord],
    axis: SweepParam,
    keep: impl Fn(f64) -> bool,
    value: impl Fn(&ObservableRecord) -> Option<f64>,
    maximize: bool,
) -> Option<(f64, f64)> {
    rows.iter()
        .filter(|r| keep(r.coord(axis)))
        .filter_map(|r| value(r).map(|v| (r.coord(axis), v)))
        .filter(|(_, v)| v.is_finite())
        .fold(None, |best: Option<(f64, f64)>, (x, v)| match best {
            Some((_, b)) if (maximize && b >= v) || (!maximize && b <= v) => best,
            _ => Some((x, v)),
        })
}

fn n_eff(r: &ObservableRecord) -> Option<f64> {
    r.observables().map(|o| o.n_eff)
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rows = panel_rows("fig9", "fig9");
    let elapsed = start.elapsed().as_secs_f64();
    let g2 = SweepParam::G2OverG1;
    let (x_min, v_min) = extremum(&rows, g2, |x| x > 0.0 && x <= 0.02, n_eff, false)
        .ok_or("no positive-g2 rows with observables")?;
    let (x_max, v_max) = extremum(&rows, g2, |x| (-6e-3..=0.0).contains(&x), n_eff, true)
        .ok_or("no rows near -2e-3")?;
    let (x_min2, v_min2) = extremum(&rows, g2, |x| (-0.02..=-6e-3).contains(&x), n_eff, false)
        .ok_or("no rows near -0.013")?;
    let ok = within(v_min, 0.8e-3, 3.4e-3)
        && within(x_min, 6e-3, 10e-3)
        && within(v_max, 0.12, 0.48)
        && within(x_max, -4e-3, 0.0)
        && within(v_min2, 0.85e-3, 3.4e-3)
        && within(x_min2, -0.016, -0.010)
        && elapsed < 30.0;
    verdict(
        ok,
        format!(
            "min n_eff {v_min:.3e} at g2/g1 {x_min:.4}; local max {v_max:.3} at {x_max:.4}; \
             second min {v_min2:.3e} at {x_min2:.4}; {elapsed:.1} s"
        ),
    )
}

fn criterion_2() -> Outcome {
    let d0w = SweepParam::Delta0w;
    let min_at = |rows: &[ObservableRecord], t: f64| {
        let rows: Vec<_> = rows
            .iter()
            .filter(|r| r.coord(SweepParam::Temperature) == t)
            .cloned()
            .collect();
        extremum(&rows, d0w, |_| true, n_eff, false)
    };
    let lin = panel_rows("fig10", "g2/g1=0");
    let quad = panel_rows("fig10", "g2/g1=0.008");
    let (_, n0) = min_at(&lin, 1e-3).ok_or("no g2=0 rows at 1 mK")?;
    let (_, n8) = min_at(&quad, 1e-3).ok_or("no g2=8e-3 rows at 1 mK")?;
    let (_, n_hot) = min_at(&quad, 0.3).ok_or("no g2=8e-3 rows at 0.3 K")?;
    let ratio = n0 / n8;
    verdict(
        within(ratio, 5.0, 20.0) && n_hot < 1.0,
        format!(
            "1 mK: min n_eff {n0:.3e} (g2=0) vs {n8:.3e} (g2=8e-3), ratio {ratio:.2}; \
             0.3 K with QOC: {n_hot:.3}"
        ),
    )
}

/// Peak of an observable over a density panel, with its Δ0w coordinate.
fn density_peak(
    id: &str,
    label: &str,
    pick: fn(&eomech::gaussian::Observables) -> f64,
) -> (f64, f64) {
    let rows = panel_rows(id, label);
    extremum(
        &rows,
        SweepParam::Delta0w,
        |_| true,
        |r| r.observables().map(pick),
        true,
    )
    .unwrap_or((f64::NAN, f64::NAN))
}

fn criterion_3() -> Outcome {
    let om = base().omega_m;
    let (x_pos, en_pos) = density_peak("fig5", "g2/g1=0.004", |o| o.en_ow);
    let (_, en_zero) = density_peak("fig5", "g2/g1=0", |o| o.en_ow);
    let ratio = en_pos / en_zero;
    verdict(
        within(en_pos, 0.02, 0.08) && (x_pos / om + 1.0).abs() <= 0.2 && within(ratio, 1.5, 2.5),
        format!(
            "peak EN_ow {en_pos:.4} at Δ0w/Ωm {:.3} (g2/g1=4e-3); g2=0 peak {en_zero:.4}; ratio {ratio:.2}",
            x_pos / om
        ),
    )
}

fn criterion_4() -> Outcome {
    let (_, pos) = density_peak("fig6", "g2/g1=0.004", |o| o.en_om);
    let (_, neg) = density_peak("fig6", "g2/g1=-0.004", |o| o.en_om);
    let (_, zero) = density_peak("fig6", "g2/g1=0", |o| o.en_om);
    verdict(
        within(pos, 0.25, 0.75) && within(neg, 0.25, 0.75) && zero <= 0.01,
        format!("peak EN_om {pos:.4} (+4e-3), {neg:.4} (-4e-3), {zero:.4} (g2=0)"),
    )
}

fn criterion_5() -> Outcome {
    let om = base().omega_m;
    let tc = |ratio: f64, d0w: f64, pair: ModePair| {
        let mut cfg = base();
        SweepParam::G2OverG1.set(&mut cfg, ratio);
        cfg.delta0w = d0w;
        critical_temperature(&cfg, pair, 1e-3, 0.5)
    };
    let ow = tc(0.0, -om, ModePair::OW).map_err(|e| e.to_string())?;
    let om_pos = tc(4e-3, -0.4 * om, ModePair::OM).map_err(|e| e.to_string())?;
    let om_neg = tc(-4e-3, -0.4 * om, ModePair::OM).map_err(|e| e.to_string())?;
    verdict(
        within(ow, 0.06, 0.11)
            && within(om_pos, 0.08, 0.14)
            && within(om_neg, 0.08, 0.14)
            && om_pos > om_neg,
        format!("Tc(ow, g2=0) {ow:.4} K; Tc(om, +4e-3) {om_pos:.4} K; Tc(om, -4e-3) {om_neg:.4} K"),
    )
}

fn max_squeezing(rows: &[ObservableRecord], keep: impl Fn(&ObservableRecord) -> bool) -> f64 {
    rows.iter()
        .filter(|r| keep(r))
        .filter_map(|r| r.observables().map(|o| o.s_q))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_6() -> Outcome {
    let g2 = |r: &ObservableRecord| r.coord(SweepParam::G2OverG1);
    let density = panel_rows("fig11", "density");
    let line = panel_rows("fig11", "delta0w=0");
    let peak_on_resonance = max_squeezing(&line, |r| g2(r) > 0.0);
    let worst_non_positive = max_squeezing(&density, |r| g2(r) <= 0.0);
    let strong = max_squeezing(&line, |r| g2(r) > 0.0015 && g2(r) < 0.04)
        .max(max_squeezing(&density, |r| g2(r) > 0.0015 && g2(r) < 0.04));

    // Highest temperature with S_Q > 0 somewhere on the fig12b Δ0w grid.
    let spec = preset("fig12b", &base()).unwrap().panels[0].spec.clone();
    let squeezed_at = |t: f64| {
        let mut s = spec.clone();
        s.base.temperature = t;
        max_squeezing(&run_spec(&s), |_| true) > 0.0
    };
    let survival = if !squeezed_at(1e-3) {
        0.0
    } else {
        let (mut lo, mut hi) = (1e-3, 1.0);
        if squeezed_at(hi) {
            hi = f64::INFINITY;
        } else {
            while hi - lo > 1e-3 {
                let mid = 0.5 * (lo + hi);
                if squeezed_at(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        hi
    };
    verdict(
        within(peak_on_resonance, 10.0, 18.0)
            && worst_non_positive <= 0.0
            && strong > 3.0
            && within(survival, 0.115 / 1.5, 0.115 * 1.5),
        format!(
            "max S_Q at Δ0w=0 {peak_on_resonance:.2} dB; max S_Q for g2≤0 {worst_non_positive:.3} dB; \
             max S_Q in 0.0015<g2/g1<0.04 {strong:.2} dB; squeezing lost at T ≈ {survival:.3} K"
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let fig3 = preset("fig3", &base()).unwrap();
    let kappa = base().kappa;
    let rows_for = |ratio: f64| {
        let p = fig3.clone().with_g2_ratio(ratio);
        run_spec(&p.panels[0].spec)
    };
    let group = |rows: &[ObservableRecord]| {
        let mut points: Vec<Vec<ObservableRecord>> = Vec::new();
        for r in rows {
            match points.last_mut() {
                Some(last) if last[0].coords == r.coords => last.push(r.clone()),
                _ => points.push(vec![r.clone()]),
            }
        }
        points
    };

    let linear = group(&rows_for(0.0));
    let three: Vec<_> = linear.iter().filter(|p| p[0].branch_count == 3).collect();
    let middle_unstable = three.iter().all(|p| p.len() == 3 && !p[1].stable);
    let above_2kappa = three
        .iter()
        .all(|p| p[0].coord(SweepParam::Delta0c) > 2.0 * kappa);
    let three_ok = !three.is_empty() && middle_unstable && above_2kappa;
    let window = three
        .iter()
        .map(|p| p[0].coord(SweepParam::Delta0c) / kappa)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(x), b.max(x))
        });

    let quad = group(&rows_for(4e-3));
    let five = quad
        .iter()
        .filter(|p| p[0].branch_count >= 5 && p.iter().filter(|r| r.stable).count() == 2)
        .count();
    let max_branches = quad.iter().map(|p| p[0].branch_count).max().unwrap_or(0);

    let negative_ok = [-1e-3, -4e-3]
        .iter()
        .all(|&r| group(&rows_for(r)).iter().all(|p| p[0].branch_count == 1));
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        three_ok && five > 0 && negative_ok && elapsed < 60.0,
        format!(
            "g2=0: {} points with 3 branches, Δ0c/κ ∈ [{:.2}, {:.2}], middle unstable {middle_unstable}; \
             g2=4e-3: {five} points with ≥5 branches and 2 stable (max {max_branches}); \
             g2<0 single branch {negative_ok}; {elapsed:.1} s",
            three.len(),
            window.0,
            window.1
        ),
    )
}

fn random_coefficients(rng: &mut ChaCha8Rng) -> DriftCoefficients {
    DriftCoefficients {
        kappa: 10f64.powf(rng.random_range(-3.0..0.5)),
        kappa_w: 10f64.powf(rng.random_range(-3.0..0.5)),
        gamma_m: 10f64.powf(rng.random_range(-5.0..-1.0)),
        omega_m: 1.0,
        omega_m_tilde: rng.random_range(-0.5..1.5),
        delta_c: rng.random_range(-2.0..2.0),
        delta_w: rng.random_range(-2.0..2.0),
        g: rng.random_range(-0.6..0.6),
        g_w: rng.random_range(-0.6..0.6),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut agree, mut stable, mut unstable, mut marginal, mut total) = (0, 0, 0, 0, 0);
    let mut check = |c: DriftCoefficients| -> Result<(), String> {
        let drift = c.drift();
        let spectrum = is_stable_eigen(&drift).map_err(|e| e.to_string())?;
        if spectrum.is_marginal(c.omega_m) {
            marginal += 1;
            return Ok(());
        }
        total += 1;
        if spectrum.stable {
            stable += 1;
        } else {
            unstable += 1;
        }
        if c.routh_hurwitz().stable == spectrum.stable {
            agree += 1;
        }
        Ok(())
    };
    for _ in 0..10_000 {
        check(random_coefficients(&mut rng))?;
    }
    // Physical draws around the reference device, every branch.
    let om = base().omega_m;
    for _ in 0..2_000 {
        let mut cfg = base();
        cfg.delta0c = rng.random_range(-1.0..3.0) * om;
        cfg.delta0w = rng.random_range(-2.0..2.0) * om;
        cfg.kappa = 10f64.powf(rng.random_range(-2.5..0.5)) * om;
        cfg.power = 10f64.powf(rng.random_range(-6.0..-3.0));
        cfg.power_w = 10f64.powf(rng.random_range(-6.0..-3.0));
        SweepParam::G2OverG1.set(&mut cfg, rng.random_range(-0.02..0.05));
        let Ok(rates) = derive_couplings(&cfg) else {
            continue;
        };
        let Ok(branches) = steady_states(&rates) else {
            continue;
        };
        for b in &branches {
            check(DriftCoefficients::at_branch(&rates, b))?;
        }
    }
    verdict(
        agree == total && total >= 10_000 && stable > total / 10 && unstable > total / 10,
        format!(
            "{agree}/{total} verdicts agree ({stable} stable, {unstable} unstable, {marginal} marginal excluded)"
        ),
    )
}

/// V = ∫₀^∞ e^{At} D e^{Aᵀt} dt by Gauss–Legendre on a short interval
/// followed by repeated doubling V(2t) = V(t) + e^{At} V(t) e^{Aᵀt}.
fn lyapunov_integral(a: &Matrix6, d: &Matrix6) -> Matrix6 {
    let norm = a.amax() * 6.0;
    let h = 1e-2 / norm;
    let nodes = [
        (0.5 - 0.5 * (0.6f64).sqrt(), 5.0 / 18.0),
        (0.5, 8.0 / 18.0),
        (0.5 + 0.5 * (0.6f64).sqrt(), 5.0 / 18.0),
    ];
    let mut v = Matrix6::zeros();
    for (x, w) in nodes {
        let e = (a * (x * h)).exp();
        v += e * d * e.transpose() * (w * h);
    }
    let mut e = (a * h).exp();
    for _ in 0..200 {
        let next = v + e * v * e.transpose();
        e = e * e;
        let done = (next - v).amax() <= 1e-17 * next.amax();
        v = next;
        if done && e.amax() < 1e-20 {
            break;
        }
    }
    v
}

fn criterion_9() -> Outcome {
    // Residuals on every solved point of a representative sweep set.
    let mut worst_residual: f64 = 0.0;
    let mut solved = 0;
    for (id, label) in [
        ("fig9", "fig9"),
        ("fig4", "fig4"),
        ("fig12a", "g2/g1=0.004"),
    ] {
        for r in panel_rows(id, label) {
            let Some(a) = &r.analysis else { continue };
            let Some(res) = a.lyapunov_residual else {
                continue;
            };
            let mut cfg = base();
            for (p, v) in SweepParam::ALL.iter().zip(r.coords) {
                p.set(&mut cfg, v);
            }
            let d = build_diffusion(&derive_couplings(&cfg).unwrap()).matrix();
            worst_residual = worst_residual.max(res / d.amax());
            solved += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_rel: f64 = 0.0;
    let mut systems = 0;
    while systems < 100 {
        let c = random_coefficients(&mut rng);
        let drift = c.drift();
        let spectrum = is_stable_eigen(&drift).map_err(|e| e.to_string())?;
        if !spectrum.stable || spectrum.abscissa > -1e-3 {
            continue;
        }
        let rates = DerivedRates {
            g1: 0.0,
            g2: 0.0,
            gw: 0.0,
            e_d: 0.0,
            e_dw: 0.0,
            n_c: rng.random_range(0.0..0.5),
            n_w: rng.random_range(0.0..5.0),
            n_m: rng.random_range(0.0..50.0),
            gamma_m: c.gamma_m,
            omega_m: 1.0,
            kappa: c.kappa,
            kappa_w: c.kappa_w,
            delta0c: 0.0,
            delta0w: 0.0,
        };
        let d: DiffusionMatrix = build_diffusion(&rates);
        let v = solve_lyapunov(&drift, &d).map_err(|e| e.to_string())?;
        let oracle = lyapunov_integral(&drift.matrix, &d.matrix());
        worst_rel = worst_rel.max((v.matrix() - oracle).amax() / oracle.amax());
        systems += 1;
    }
    verdict(
        solved > 0 && worst_residual < 1e-9 && worst_rel < 1e-8,
        format!(
            "worst residual/‖D‖ {worst_residual:.2e} over {solved} points; \
             worst deviation from integral form {worst_rel:.2e} over {systems} systems"
        ),
    )
}

fn symplectic_rotation(t: f64) -> Matrix4<f64> {
    let (c, s) = (t.cos(), t.sin());
    Matrix4::new(
        c, s, 0.0, 0.0, -s, c, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0,
    )
}

fn random_two_mode_cm(rng: &mut ChaCha8Rng) -> Matrix4<f64> {
    let (n1, n2) = (rng.random_range(0.5..4.0), rng.random_range(0.5..4.0));
    let r: f64 = rng.random_range(-1.2..1.2);
    let (ch, sh) = (r.cosh(), r.sinh());
    let tms = Matrix4::new(
        ch, 0.0, sh, 0.0, 0.0, ch, 0.0, -sh, sh, 0.0, ch, 0.0, 0.0, -sh, 0.0, ch,
    );
    let th: f64 = rng.random_range(-3.2..3.2);
    let (c, s) = (th.cos(), th.sin());
    let bs = Matrix4::new(
        c, 0.0, s, 0.0, 0.0, c, 0.0, s, -s, 0.0, c, 0.0, 0.0, -s, 0.0, c,
    );
    let squeeze = |a: f64, b: f64| {
        Matrix4::from_diagonal(&nalgebra::Vector4::new(
            a.exp(),
            (-a).exp(),
            b.exp(),
            (-b).exp(),
        ))
    };
    let swap = Matrix4::new(
        0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0,
    );
    let local = symplectic_rotation(rng.random_range(-3.2..3.2))
        * swap
        * symplectic_rotation(rng.random_range(-3.2..3.2))
        * swap
        * squeeze(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let s = local * bs * tms;
    let thermal = Matrix4::from_diagonal(&nalgebra::Vector4::new(n1, n1, n2, n2)) * 0.5;
    let v = s * thermal * s.transpose();
    (v + v.transpose()) * 0.5
}

/// Smallest |eigenvalue| of iΩṼ with Ṽ the partial transpose (P → −P on the
/// second mode).
fn brute_force_eta(v: &Matrix4<f64>) -> f64 {
    let p = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    let vt = p * v * p;
    let mut omega = Matrix4::zeros();
    omega[(0, 1)] = 1.0;
    omega[(1, 0)] = -1.0;
    omega[(2, 3)] = 1.0;
    omega[(3, 2)] = -1.0;
    let eig = (omega * vt).complex_eigenvalues();
    eig.iter()
        .map(|l: &Complex<f64>| l.norm())
        .fold(f64::INFINITY, f64::min)
}

fn bipartite(m: Matrix4<f64>) -> BipartiteCM {
    BipartiteCM {
        matrix: m,
        pair: ModePair::OW,
    }
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let m = random_two_mode_cm(&mut rng);
        let eta = eomech::gaussian::eta_minus(&bipartite(m)).map_err(|e| e.to_string())?;
        worst = worst.max((eta - brute_force_eta(&m)).abs());
    }
    let vacuum =
        log_negativity(&bipartite(Matrix4::identity() * 0.5)).map_err(|e| e.to_string())?;
    let mut worst_tmsv: f64 = 0.0;
    for k in 0..=40 {
        let r = k as f64 * 0.05;
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        let m = Matrix4::new(
            c, 0.0, s, 0.0, 0.0, c, 0.0, -s, s, 0.0, c, 0.0, 0.0, -s, 0.0, c,
        );
        let en = log_negativity(&bipartite(m)).map_err(|e| e.to_string())?;
        worst_tmsv = worst_tmsv.max((en - 2.0 * r).abs());
    }
    verdict(
        worst < 1e-10 && vacuum == 0.0 && worst_tmsv < 1e-9,
        format!("max |Δη⁻| {worst:.2e}; EN(vacuum) {vacuum}; max |EN − 2r| {worst_tmsv:.2e}"),
    )
}

fn criterion_11() -> Outcome {
    let at = |t: f64| -> Result<eomech::gaussian::Observables, String> {
        let mut cfg = base();
        SweepParam::G2OverG1.set(&mut cfg, 8e-3);
        cfg.delta0w = cfg.omega_m;
        cfg.temperature = t;
        let rows = evaluate_point(&cfg, BranchPolicy::LowestStable);
        rows[0]
            .observables()
            .copied()
            .ok_or_else(|| format!("no observables at T = {t}: {:?}", rows[0].error))
    };
    let cold = at(0.1)?;
    let hot = at(0.3)?;
    let ok = cold.n_eff < 1.0
        && (cold.var_q - 0.5).abs() < 0.15
        && (cold.var_p - 0.5).abs() < 0.15
        && hot.n_eff < 1.0
        && hot.var_q.max(hot.var_p) > 0.65;
    verdict(
        ok,
        format!(
            "T=0.1 K: n_eff {:.3}, var Q {:.3}, var P {:.3}; T=0.3 K: n_eff {:.3}, var Q {:.3}, var P {:.3}",
            cold.n_eff, cold.var_q, cold.var_p, hot.n_eff, hot.var_q, hot.var_p
        ),
    )
}

fn run_cli(dir: &Path, preset_id: &str, jobs: usize) -> Result<Vec<u8>, String> {
    let out = dir.join(format!("{preset_id}-{jobs}.csv"));
    let status = Command::new(env!("CARGO_BIN_EXE_eomech"))
        .args(["--jobs", &jobs.to_string(), "--out"])
        .arg(&out)
        .args(["sweep", "--preset", preset_id])
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!(
            "eomech sweep --preset {preset_id} exited with {status}"
        ));
    }
    std::fs::read(&out).map_err(|e| e.to_string())
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut report = Vec::new();
    let mut ok = true;
    for id in ["fig3", "fig9", "fig12b"] {
        let one = run_cli(dir.path(), id, 1)?;
        let eight = run_cli(dir.path(), id, 8)?;
        let same = one == eight;
        ok &= same && !one.is_empty();
        report.push(format!("{id}: {} bytes, identical {same}", one.len()));
    }
    verdict(ok, report.join("; "))
}

fn main() {
    let _ = env_logger::builder().is_test(true).try_init();
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("cooling optimum", criterion_1),
        ("cooling window", criterion_2),
        ("optical-microwave entanglement", criterion_3),
        ("optomechanical entanglement", criterion_4),
        ("critical temperatures", criterion_5),
        ("squeezing", criterion_6),
        ("multistability", criterion_7),
        ("stability equivalence", criterion_8),
        ("Lyapunov", criterion_9),
        ("Gaussian observables", criterion_10),
        ("equipartition", criterion_11),
        ("determinism", criterion_12),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let n = k + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {n:>2} {name}: {detail} [{secs:.1} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {n:>2} {name}: {detail} [{secs:.1} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
