//! Dormand–Prince 5(4) explicit Runge–Kutta with PI step-size control and
//! the standard 4th-order continuous extension for sampling on a caller grid.

use crate::error::{Error, Result};

/// Step-control settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerance {
    /// Relative tolerance, also the factor applied to the per-component scales.
    pub rtol: f64,
    /// Absolute tolerance per component.
    pub atol: Vec<f64>,
    /// Hard cap on attempted steps.
    pub max_steps: usize,
}

impl Tolerance {
    /// `tol` relative, `tol · scale[i]` absolute.
    pub fn scaled(tol: f64, scales: &[f64]) -> Result<Self> {
        if !(tol > 0.0 && tol <= 1e-3) {
            return Err(Error::Tolerance(tol));
        }
        Ok(Tolerance {
            rtol: tol,
            atol: scales
                .iter()
                .map(|s| tol * s.abs().max(f64::MIN_POSITIVE))
                .collect(),
            max_steps: 500_000_000,
        })
    }
}

/// Statistics of a completed integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Fifth minus fourth order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

/// Integrates `y' = f(t, y)` from `samples[0]` and returns the state at every
/// sample time. `samples` must be non-decreasing; the first entry is the
/// initial time and maps to `y0` unchanged.
pub fn integrate<F>(
    mut f: F,
    y0: &[f64],
    samples: &[f64],
    tol: &Tolerance,
) -> Result<(Vec<Vec<f64>>, Stats)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    assert_eq!(tol.atol.len(), n, "one absolute tolerance per component");
    let mut out = Vec::with_capacity(samples.len());
    let mut stats = Stats::default();
    let Some((&t0, rest)) = samples.split_first() else {
        return Ok((out, stats));
    };
    out.push(y0.to_vec());
    let t_end = rest.last().copied().unwrap_or(t0);
    if t_end <= t0 {
        out.extend(rest.iter().map(|_| y0.to_vec()));
        return Ok((out, stats));
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut err_vec = vec![0.0; n];
    let mut cont = vec![vec![0.0; n]; 5];
    let mut next_sample = 1;

    f(t, &y, &mut k[0]);
    stats.evaluations += 1;
    let mut h = initial_step(&mut f, t, &y, &k[0], t_end - t0, tol, &mut stats);
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    while t < t_end {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err(Error::MaxSteps {
                t,
                steps: stats.accepted + stats.rejected,
            });
        }
        if h < 1e-14 * t.abs().max(t_end - t0) {
            return Err(Error::StepUnderflow { t });
        }
        if t + h > t_end {
            h = t_end - t;
        }

        let (k1, rest) = k.split_first_mut().unwrap();
        let [k2, k3, k4, k5, k6, k7] = rest else {
            unreachable!()
        };
        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, &ytmp, k2);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, &ytmp, k3);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, &ytmp, k4);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, &ytmp, k5);
        for i in 0..n {
            ytmp[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, &ytmp, k6);
        for i in 0..n {
            ynew[i] =
                y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t + h, &ynew, k7);
        stats.evaluations += 6;

        for i in 0..n {
            err_vec[i] =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let mut sum = 0.0;
        for i in 0..n {
            let sc = tol.atol[i] + tol.rtol * y[i].abs().max(ynew[i].abs());
            sum += (err_vec[i] / sc).powi(2);
        }
        let err = (sum / n as f64).sqrt();

        if !err.is_finite() || ynew.iter().any(|v| !v.is_finite()) {
            if h < 1e-12 * (t_end - t0) {
                return Err(Error::NonFinite {
                    t,
                    state: ynew.clone(),
                });
            }
            stats.rejected += 1;
            h *= FAC_MIN;
            last_rejected = true;
            continue;
        }

        if err <= 1.0 {
            for i in 0..n {
                let dy = ynew[i] - y[i];
                let bspl = h * k1[i] - dy;
                cont[0][i] = y[i];
                cont[1][i] = dy;
                cont[2][i] = bspl;
                cont[3][i] = dy - h * k7[i] - bspl;
                cont[4][i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let t_new = if t + h >= t_end { t_end } else { t + h };
            while next_sample < samples.len() && samples[next_sample] <= t_new {
                let ts = samples[next_sample];
                let theta = ((ts - t) / h).clamp(0.0, 1.0);
                let theta1 = 1.0 - theta;
                let ys: Vec<f64> = (0..n)
                    .map(|i| {
                        cont[0][i]
                            + theta
                                * (cont[1][i]
                                    + theta1
                                        * (cont[2][i] + theta * (cont[3][i] + theta1 * cont[4][i])))
                    })
                    .collect();
                out.push(ys);
                next_sample += 1;
            }
            stats.accepted += 1;
            t = t_new;
            std::mem::swap(&mut y, &mut ynew);
            k.swap(0, 6);

            let mut fac = err.max(1e-10).powf(0.2 - 0.75 * BETA) / fac_old.powf(BETA) / SAFETY;
            fac = fac.clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            if last_rejected {
                fac = fac.max(1.0);
            }
            fac_old = err.max(1e-4);
            h /= fac;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = (err.powf(0.2 - 0.75 * BETA) / SAFETY).min(1.0 / FAC_MIN);
            h /= fac;
            last_rejected = true;
        }
    }
    // Samples that coincide with t_end after rounding.
    while out.len() < samples.len() {
        out.push(y.clone());
    }
    Ok((out, stats))
}

fn initial_step<F>(
    f: &mut F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    span: f64,
    tol: &Tolerance,
    stats: &mut Stats,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let sc: Vec<f64> = (0..n)
        .map(|i| tol.atol[i] + tol.rtol * y[i].abs())
        .collect();
    let rms = |v: &dyn Fn(usize) -> f64| {
        ((0..n).map(|i| (v(i) / sc[i]).powi(2)).sum::<f64>() / n as f64).sqrt()
    };
    let d0 = rms(&|i| y[i]);
    let d1 = rms(&|i| f0[i]);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(span);
    let y1: Vec<f64> = (0..n).map(|i| y[i] + h0 * f0[i]).collect();
    let mut f1 = vec![0.0; n];
    f(t + h0, &y1, &mut f1);
    stats.evaluations += 1;
    let d2 = rms(&|i| f1[i] - f0[i]) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}
