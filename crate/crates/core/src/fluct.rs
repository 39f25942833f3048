//! Linearized fluctuations around a steady branch: drift and diffusion
//! matrices, stability (eigenvalues and Routh–Hurwitz), and the stationary
//! covariance from the Lyapunov equation.
//!
//! Quadrature order is (δQo, δPo, δQ, δP, δQw, δPw) with δQ = (δa+δa†)/√2 and
//! δP = (δa−δa†)/(i√2), so every vacuum variance is 1/2.

use nalgebra::{DMatrix, DVector, SMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::meanfield::SteadyBranch;
use crate::params::DerivedRates;

pub type Matrix6 = SMatrix<f64, 6, 6>;

/// Spectral abscissa below `MARGINAL_FRACTION · Ωm` in magnitude counts as marginal.
pub const MARGINAL_FRACTION: f64 = 1e-9;

/// The scalar entries that fully determine the drift matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftCoefficients {
    pub kappa: f64,
    pub kappa_w: f64,
    pub gamma_m: f64,
    pub omega_m: f64,
    pub omega_m_tilde: f64,
    pub delta_c: f64,
    pub delta_w: f64,
    /// Optomechanical entry G̃·⟨Qo⟩ss = G̃·√2·|a_ss|.
    pub g: f64,
    /// Electromechanical entry gw·⟨Qw⟩ss = gw·√2·|aw_ss|.
    pub g_w: f64,
}

impl DriftCoefficients {
    /// Entries at a steady branch, with the drive phases chosen so that the
    /// mean fields are real and positive.
    pub fn at_branch(rates: &DerivedRates, branch: &SteadyBranch) -> Self {
        DriftCoefficients {
            kappa: rates.kappa,
            kappa_w: rates.kappa_w,
            gamma_m: rates.gamma_m,
            omega_m: rates.omega_m,
            omega_m_tilde: branch.omega_m_tilde,
            delta_c: branch.delta_c,
            delta_w: branch.delta_w,
            g: branch.g_tilde * (2.0 * branch.intensity).sqrt(),
            g_w: rates.gw * (2.0 * branch.intensity_w).sqrt(),
        }
    }

    pub fn drift(&self) -> DriftMatrix {
        let mut a = Matrix6::zeros();
        a[(0, 0)] = -self.kappa;
        a[(0, 1)] = self.delta_c;
        a[(1, 0)] = -self.delta_c;
        a[(1, 1)] = -self.kappa;
        a[(1, 2)] = self.g;
        a[(2, 3)] = self.omega_m;
        a[(3, 0)] = self.g;
        a[(3, 2)] = -self.omega_m_tilde;
        a[(3, 3)] = -self.gamma_m;
        a[(3, 4)] = self.g_w;
        a[(4, 4)] = -self.kappa_w;
        a[(4, 5)] = self.delta_w;
        a[(5, 2)] = self.g_w;
        a[(5, 4)] = -self.delta_w;
        a[(5, 5)] = -self.kappa_w;
        DriftMatrix {
            matrix: a,
            frequency_scale: self.omega_m.abs(),
        }
    }

    /// The six Routh–Hurwitz expressions s1..s6, in the closed form derived
    /// for this drift structure. The system is stable iff all are positive.
    pub fn routh_hurwitz(&self) -> RouthHurwitz {
        let DriftCoefficients {
            kappa: k,
            kappa_w: kw,
            gamma_m: gm,
            omega_m: om,
            omega_m_tilde: omt,
            delta_c: dc,
            delta_w: dw,
            g,
            g_w: gw,
        } = *self;
        let s1 = gm + 2.0 * k + 2.0 * kw;
        let s2 = 2.0 * gm.powi(2) * (k + kw)
            + 4.0 * gm * (k + kw).powi(2)
            + 2.0
                * (dc.powi(2) * k
                    + dw.powi(2) * kw
                    + (k + kw) * (k.powi(2) + 3.0 * k * kw + kw.powi(2)))
            + gm * om * omt;
        let s3 = 4.0
            * k
            * kw
            * ((dc - dw).powi(2) + (k + kw).powi(2))
            * ((dc + dw).powi(2) + (k + kw).powi(2))
            + 2.0
                * gm.powi(3)
                * (dc.powi(2) * k
                    + dw.powi(2) * kw
                    + (k + kw) * (k.powi(2) + 3.0 * k * kw + kw.powi(2)))
            + 4.0 * (k + kw) * (g.powi(2) * dc * k + gw.powi(2) * dw * kw) * om
            + gm.powi(2)
                * (4.0 * k.powi(4)
                    + 4.0 * dw.powi(2) * k * kw
                    + 20.0 * k.powi(3) * kw
                    + 4.0 * dw.powi(2) * kw.powi(2)
                    + 32.0 * k.powi(2) * kw.powi(2)
                    + 20.0 * k * kw.powi(3)
                    + 4.0 * kw.powi(4)
                    + 4.0 * dc.powi(2) * k * (k + kw)
                    + g.powi(2) * dc * om
                    + gw.powi(2) * dw * om
                    + 4.0 * (k + kw).powi(2) * om * omt)
            + 2.0
                * gm
                * (dc.powi(4) * k
                    + k.powi(5)
                    + dw.powi(4) * kw
                    + 4.0 * dw.powi(2) * k.powi(2) * kw
                    + 8.0 * k.powi(4) * kw
                    + 8.0 * dw.powi(2) * k * kw.powi(2)
                    + 20.0 * k.powi(3) * kw.powi(2)
                    + 2.0 * dw.powi(2) * kw.powi(3)
                    + 20.0 * k.powi(2) * kw.powi(3)
                    + 8.0 * k * kw.powi(4)
                    + kw.powi(5)
                    + gw.powi(2) * dw * k * om
                    + 2.0 * gw.powi(2) * dw * kw * om
                    + g.powi(2) * dc * (2.0 * k + kw) * om
                    + 2.0
                        * (-dw.powi(2) * kw + (k + kw) * (k.powi(2) + k * kw + kw.powi(2)))
                        * om
                        * omt
                    + (k + kw) * om.powi(2) * omt.powi(2)
                    + 2.0
                        * dc.powi(2)
                        * k
                        * (k.powi(2) + 4.0 * k * kw + 2.0 * kw.powi(2) - om * omt));
        let s4 = (gm * (dc.powi(2) + k.powi(2)) * (dw.powi(2) + kw.powi(2))
            - 2.0 * (gw.powi(2) * dw * k + g.powi(2) * dc * kw) * om
            + 2.0 * (dw.powi(2) * k + kw * (dc.powi(2) + k * (k + kw))) * om * omt)
            * (-gm * dc.powi(2) * dw.powi(2)
                - gm * dw.powi(2) * k.powi(2)
                - gm * dc.powi(2) * kw.powi(2)
                - gm * k.powi(2) * kw.powi(2)
                + 2.0 * gw.powi(2) * dw * k * om
                + 2.0 * g.powi(2) * dc * kw * om
                - 2.0 * dw.powi(2) * k * om * omt
                - 2.0 * dc.powi(2) * kw * om * omt
                - 2.0 * k.powi(2) * kw * om * omt
                - 2.0 * k * kw.powi(2) * om * omt
                + (dc.powi(2)
                    + dw.powi(2)
                    + k.powi(2)
                    + 4.0 * k * kw
                    + kw.powi(2)
                    + 2.0 * gm * (k + kw)
                    + om * omt)
                    * (gm * (dc.powi(2) + dw.powi(2) + k.powi(2) + 4.0 * k * kw + kw.powi(2))
                        + 2.0
                            * (dw.powi(2) * k + dc.powi(2) * kw + (k + kw) * (k * kw + om * omt))))
            - (dw.powi(2) * k.powi(2)
                + k.powi(2) * kw.powi(2)
                + 2.0 * gm * k * (dw.powi(2) + kw * (k + kw))
                - g.powi(2) * dc * om
                - gw.powi(2) * dw * om
                + (dw.powi(2) + k.powi(2) + 4.0 * k * kw + kw.powi(2)) * om * omt
                + dc.powi(2) * (dw.powi(2) + 2.0 * gm * kw + kw.powi(2) + om * omt))
                * (-(gm + 2.0 * (k + kw))
                    * (gm * (dc.powi(2) + k.powi(2)) * (dw.powi(2) + kw.powi(2))
                        - 2.0 * (gw.powi(2) * dw * k + g.powi(2) * dc * kw) * om
                        + 2.0 * (dw.powi(2) * k + kw * (dc.powi(2) + k * (k + kw))) * om * omt)
                    + (gm * (dc.powi(2) + dw.powi(2) + k.powi(2) + 4.0 * k * kw + kw.powi(2))
                        + 2.0
                            * (dw.powi(2) * k + dc.powi(2) * kw + (k + kw) * (k * kw + om * omt)))
                        .powi(2))
            + (gm + 2.0 * (k + kw))
                * (om
                    * (2.0 * gm.powi(2) * (k + kw)
                        + 4.0 * gm * (k + kw).powi(2)
                        + 2.0
                            * (dc.powi(2) * k
                                + dw.powi(2) * kw
                                + (k + kw) * (k.powi(2) + 3.0 * k * kw + kw.powi(2)))
                        + gm * om * omt)
                    * (-gw.powi(2) * dw * (dc.powi(2) + k.powi(2))
                        - (dw.powi(2) + kw.powi(2))
                            * (g.powi(2) * dc - (dc.powi(2) + k.powi(2)) * omt))
                    - (gm * (dc.powi(2) + k.powi(2)) * (dw.powi(2) + kw.powi(2))
                        - 2.0 * (gw.powi(2) * dw * k + g.powi(2) * dc * kw) * om
                        + 2.0 * (dw.powi(2) * k + kw * (dc.powi(2) + k * (k + kw))) * om * omt)
                        * (-dc.powi(2) * dw.powi(2)
                            - 2.0 * gm * dw.powi(2) * k
                            - dw.powi(2) * k.powi(2)
                            - 2.0 * gm * dc.powi(2) * kw
                            - 2.0 * gm * k.powi(2) * kw
                            - dc.powi(2) * kw.powi(2)
                            - 2.0 * gm * k * kw.powi(2)
                            - k.powi(2) * kw.powi(2)
                            + g.powi(2) * dc * om
                            + gw.powi(2) * dw * om
                            - dc.powi(2) * om * omt
                            - dw.powi(2) * om * omt
                            - k.powi(2) * om * omt
                            - 4.0 * k * kw * om * omt
                            - kw.powi(2) * om * omt
                            + (dc.powi(2)
                                + dw.powi(2)
                                + k.powi(2)
                                + 4.0 * k * kw
                                + kw.powi(2)
                                + 2.0 * gm * (k + kw)
                                + om * omt)
                                .powi(2))
                    + (dw.powi(2) * k.powi(2)
                        + k.powi(2) * kw.powi(2)
                        + 2.0 * gm * k * (dw.powi(2) + kw * (k + kw))
                        - g.powi(2) * dc * om
                        - gw.powi(2) * dw * om
                        + (dw.powi(2) + k.powi(2) + 4.0 * k * kw + kw.powi(2)) * om * omt
                        + dc.powi(2) * (dw.powi(2) + 2.0 * gm * kw + kw.powi(2) + om * omt))
                        * (-(gm + 2.0 * (k + kw))
                            * (dw.powi(2) * k.powi(2)
                                + k.powi(2) * kw.powi(2)
                                + 2.0 * gm * k * (dw.powi(2) + kw * (k + kw))
                                - g.powi(2) * dc * om
                                - gw.powi(2) * dw * om
                                + (dw.powi(2) + k.powi(2) + 4.0 * k * kw + kw.powi(2))
                                    * om
                                    * omt
                                + dc.powi(2)
                                    * (dw.powi(2) + 2.0 * gm * kw + kw.powi(2) + om * omt))
                            + (dc.powi(2)
                                + dw.powi(2)
                                + k.powi(2)
                                + 4.0 * k * kw
                                + kw.powi(2)
                                + 2.0 * gm * (k + kw)
                                + om * omt)
                                * (gm
                                    * (dc.powi(2)
                                        + dw.powi(2)
                                        + k.powi(2)
                                        + 4.0 * k * kw
                                        + kw.powi(2))
                                    + 2.0
                                        * (dw.powi(2) * k
                                            + dc.powi(2) * kw
                                            + (k + kw) * (k * kw + om * omt)))));
        let s5 = om
            * (gw.powi(2) * dw * (dc.powi(2) + k.powi(2))
                + (dw.powi(2) + kw.powi(2)) * (g.powi(2) * dc - (dc.powi(2) + k.powi(2)) * omt))
            * (-(gm + 2.0 * (k + kw))
                * ((2.0 * gm.powi(2) * (k + kw)
                    + 4.0 * gm * (k + kw).powi(2)
                    + 2.0
                        * (dc.powi(2) * k
                            + dw.powi(2) * kw
                            + (k + kw) * (k.powi(2) + 3.0 * k * kw + kw.powi(2)))
                    + gm * om * omt)
                    * (gm * (dc.powi(2) + k.powi(2)) * (dw.powi(2) + kw.powi(2))
                        - 2.0 * (gw.powi(2) * dw * k + g.powi(2) * dc * kw) * om
                        + 2.0 * (dw.powi(2) * k + kw * (dc.powi(2) + k * (k + kw))) * om * omt)
                    - (gm + 2.0 * (k + kw)).powi(2)
                        * om
                        * (-gw.powi(2) * dw * (dc.powi(2) + k.powi(2))
                            - (dw.powi(2) + kw.powi(2))
                                * (g.powi(2) * dc - (dc.powi(2) + k.powi(2)) * omt)))
                + (4.0
                    * k
                    * kw
                    * ((dc - dw).powi(2) + (k + kw).powi(2))
                    * ((dc + dw).powi(2) + (k + kw).powi(2))
                    + 2.0
                        * gm.powi(3)
                        * (dc.powi(2) * k
                            + dw.powi(2) * kw
                            + (k + kw) * (k.powi(2) + 3.0 * k * kw + kw.powi(2)))
                    + 4.0 * (k + kw) * (g.powi(2) * dc * k + gw.powi(2) * dw * kw) * om
                    + gm.powi(2)
                        * (4.0 * k.powi(4)
                            + 4.0 * dw.powi(2) * k * kw
                            + 20.0 * k.powi(3) * kw
                            + 4.0 * dw.powi(2) * kw.powi(2)
                            + 32.0 * k.powi(2) * kw.powi(2)
                            + 20.0 * k * kw.powi(3)
                            + 4.0 * kw.powi(4)
                            + 4.0 * dc.powi(2) * k * (k + kw)
                            + g.powi(2) * dc * om
                            + gw.powi(2) * dw * om
                            + 4.0 * (k + kw).powi(2) * om * omt)
                    + 2.0
                        * gm
                        * (dc.powi(4) * k
                            + k.powi(5)
                            + dw.powi(4) * kw
                            + 4.0 * dw.powi(2) * k.powi(2) * kw
                            + 8.0 * k.powi(4) * kw
                            + 8.0 * dw.powi(2) * k * kw.powi(2)
                            + 20.0 * k.powi(3) * kw.powi(2)
                            + 2.0 * dw.powi(2) * kw.powi(3)
                            + 20.0 * k.powi(2) * kw.powi(3)
                            + 8.0 * k * kw.powi(4)
                            + kw.powi(5)
                            + gw.powi(2) * dw * k * om
                            + 2.0 * gw.powi(2) * dw * kw * om
                            + g.powi(2) * dc * (2.0 * k + kw) * om
                            + 2.0
                                * (-dw.powi(2) * kw
                                    + (k + kw) * (k.powi(2) + k * kw + kw.powi(2)))
                                * om
                                * omt
                            + (k + kw) * om.powi(2) * omt.powi(2)
                            + 2.0
                                * dc.powi(2)
                                * k
                                * (k.powi(2) + 4.0 * k * kw + 2.0 * kw.powi(2) - om * omt)))
                    * (gm * (dc.powi(2) + dw.powi(2) + k.powi(2) + 4.0 * k * kw + kw.powi(2))
                        + 2.0
                            * (dw.powi(2) * k + dc.powi(2) * kw + (k + kw) * (k * kw + om * omt))))
            + (gm * (dc.powi(2) + k.powi(2)) * (dw.powi(2) + kw.powi(2))
                - 2.0 * (gw.powi(2) * dw * k + g.powi(2) * dc * kw) * om
                + 2.0 * (dw.powi(2) * k + kw * (dc.powi(2) + k * (k + kw))) * om * omt)
                * ((gm * (dc.powi(2) + k.powi(2)) * (dw.powi(2) + kw.powi(2))
                    - 2.0 * (gw.powi(2) * dw * k + g.powi(2) * dc * kw) * om
                    + 2.0 * (dw.powi(2) * k + kw * (dc.powi(2) + k * (k + kw))) * om * omt)
                    * (-gm * dc.powi(2) * dw.powi(2)
                        - gm * dw.powi(2) * k.powi(2)
                        - gm * dc.powi(2) * kw.powi(2)
                        - gm * k.powi(2) * kw.powi(2)
                        + 2.0 * gw.powi(2) * dw * k * om
                        + 2.0 * g.powi(2) * dc * kw * om
                        - 2.0 * dw.powi(2) * k * om * omt
                        - 2.0 * dc.powi(2) * kw * om * omt
                        - 2.0 * k.powi(2) * kw * om * omt
                        - 2.0 * k * kw.powi(2) * om * omt
                        + (dc.powi(2)
                            + dw.powi(2)
                            + k.powi(2)
                            + 4.0 * k * kw
                            + kw.powi(2)
                            + 2.0 * gm * (k + kw)
                            + om * omt)
                            * (gm
                                * (dc.powi(2)
                                    + dw.powi(2)
                                    + k.powi(2)
                                    + 4.0 * k * kw
                                    + kw.powi(2))
                                + 2.0
                                    * (dw.powi(2) * k
                                        + dc.powi(2) * kw
                                        + (k + kw) * (k * kw + om * omt))))
                    - (dw.powi(2) * k.powi(2)
                        + k.powi(2) * kw.powi(2)
                        + 2.0 * gm * k * (dw.powi(2) + kw * (k + kw))
                        - g.powi(2) * dc * om
                        - gw.powi(2) * dw * om
                        + (dw.powi(2) + k.powi(2) + 4.0 * k * kw + kw.powi(2)) * om * omt
                        + dc.powi(2) * (dw.powi(2) + 2.0 * gm * kw + kw.powi(2) + om * omt))
                        * (-(gm + 2.0 * (k + kw))
                            * (gm * (dc.powi(2) + k.powi(2)) * (dw.powi(2) + kw.powi(2))
                                - 2.0 * (gw.powi(2) * dw * k + g.powi(2) * dc * kw) * om
                                + 2.0
                                    * (dw.powi(2) * k + kw * (dc.powi(2) + k * (k + kw)))
                                    * om
                                    * omt)
                            + (gm
                                * (dc.powi(2)
                                    + dw.powi(2)
                                    + k.powi(2)
                                    + 4.0 * k * kw
                                    + kw.powi(2))
                                + 2.0
                                    * (dw.powi(2) * k
                                        + dc.powi(2) * kw
                                        + (k + kw) * (k * kw + om * omt)))
                                .powi(2))
                    + (gm + 2.0 * (k + kw))
                        * (om
                            * (2.0 * gm.powi(2) * (k + kw)
                                + 4.0 * gm * (k + kw).powi(2)
                                + 2.0
                                    * (dc.powi(2) * k
                                        + dw.powi(2) * kw
                                        + (k + kw) * (k.powi(2) + 3.0 * k * kw + kw.powi(2)))
                                + gm * om * omt)
                            * (-gw.powi(2) * dw * (dc.powi(2) + k.powi(2))
                                - (dw.powi(2) + kw.powi(2))
                                    * (g.powi(2) * dc - (dc.powi(2) + k.powi(2)) * omt))
                            - (gm * (dc.powi(2) + k.powi(2)) * (dw.powi(2) + kw.powi(2))
                                - 2.0 * (gw.powi(2) * dw * k + g.powi(2) * dc * kw) * om
                                + 2.0
                                    * (dw.powi(2) * k + kw * (dc.powi(2) + k * (k + kw)))
                                    * om
                                    * omt)
                                * (-dc.powi(2) * dw.powi(2)
                                    - 2.0 * gm * dw.powi(2) * k
                                    - dw.powi(2) * k.powi(2)
                                    - 2.0 * gm * dc.powi(2) * kw
                                    - 2.0 * gm * k.powi(2) * kw
                                    - dc.powi(2) * kw.powi(2)
                                    - 2.0 * gm * k * kw.powi(2)
                                    - k.powi(2) * kw.powi(2)
                                    + g.powi(2) * dc * om
                                    + gw.powi(2) * dw * om
                                    - dc.powi(2) * om * omt
                                    - dw.powi(2) * om * omt
                                    - k.powi(2) * om * omt
                                    - 4.0 * k * kw * om * omt
                                    - kw.powi(2) * om * omt
                                    + (dc.powi(2)
                                        + dw.powi(2)
                                        + k.powi(2)
                                        + 4.0 * k * kw
                                        + kw.powi(2)
                                        + 2.0 * gm * (k + kw)
                                        + om * omt)
                                        .powi(2))
                            + (dw.powi(2) * k.powi(2)
                                + k.powi(2) * kw.powi(2)
                                + 2.0 * gm * k * (dw.powi(2) + kw * (k + kw))
                                - g.powi(2) * dc * om
                                - gw.powi(2) * dw * om
                                + (dw.powi(2) + k.powi(2) + 4.0 * k * kw + kw.powi(2))
                                    * om
                                    * omt
                                + dc.powi(2)
                                    * (dw.powi(2) + 2.0 * gm * kw + kw.powi(2) + om * omt))
                                * (-(gm + 2.0 * (k + kw))
                                    * (dw.powi(2) * k.powi(2)
                                        + k.powi(2) * kw.powi(2)
                                        + 2.0 * gm * k * (dw.powi(2) + kw * (k + kw))
                                        - g.powi(2) * dc * om
                                        - gw.powi(2) * dw * om
                                        + (dw.powi(2) + k.powi(2) + 4.0 * k * kw + kw.powi(2))
                                            * om
                                            * omt
                                        + dc.powi(2)
                                            * (dw.powi(2)
                                                + 2.0 * gm * kw
                                                + kw.powi(2)
                                                + om * omt))
                                    + (dc.powi(2)
                                        + dw.powi(2)
                                        + k.powi(2)
                                        + 4.0 * k * kw
                                        + kw.powi(2)
                                        + 2.0 * gm * (k + kw)
                                        + om * omt)
                                        * (gm
                                            * (dc.powi(2)
                                                + dw.powi(2)
                                                + k.powi(2)
                                                + 4.0 * k * kw
                                                + kw.powi(2))
                                            + 2.0
                                                * (dw.powi(2) * k
                                                    + dc.powi(2) * kw
                                                    + (k + kw) * (k * kw + om * omt))))));
        let s6 = -gw.powi(2) * dc.powi(2) * dw * om
            - g.powi(2) * dc * dw.powi(2) * om
            - gw.powi(2) * dw * k.powi(2) * om
            - g.powi(2) * dc * kw.powi(2) * om
            + dc.powi(2) * dw.powi(2) * om * omt
            + dw.powi(2) * k.powi(2) * om * omt
            + dc.powi(2) * kw.powi(2) * om * omt
            + k.powi(2) * kw.powi(2) * om * omt;
        let terms = [s1, s2, s3, s4, s5, s6];
        RouthHurwitz {
            stable: terms.iter().all(|s| *s > 0.0),
            terms,
        }
    }
}

/// Routh–Hurwitz verdict with the individual expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouthHurwitz {
    pub stable: bool,
    pub terms: [f64; 6],
}

/// Drift matrix A of δu̇ = A·δu + noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix {
    pub matrix: Matrix6,
    /// Reference frequency (Ωm) for the marginal-stability band.
    pub frequency_scale: f64,
}

/// Diagonal diffusion matrix D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix(pub [f64; 6]);

impl DiffusionMatrix {
    pub fn matrix(&self) -> Matrix6 {
        Matrix6::from_diagonal(&self.0.into())
    }
}

/// Stationary covariance V, symmetric, vacuum variance 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(Matrix6);

impl CovarianceMatrix {
    /// Wraps a matrix after checking symmetry and finiteness.
    pub fn new(v: Matrix6) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let scale = v.amax().max(f64::MIN_POSITIVE);
        if (v - v.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidCovariance("not symmetric".into()));
        }
        Ok(CovarianceMatrix(v))
    }

    pub fn matrix(&self) -> &Matrix6 {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Smallest eigenvalue of V + (i/2)Ω; negative values mean V violates the
    /// uncertainty principle.
    pub fn uncertainty_margin(&self) -> f64 {
        // Real 12×12 embedding of the Hermitian matrix X + iY.
        let x = self.0;
        let y = symplectic_form() * 0.5;
        let mut m = DMatrix::zeros(12, 12);
        for i in 0..6 {
            for j in 0..6 {
                m[(i, j)] = x[(i, j)];
                m[(i + 6, j + 6)] = x[(i, j)];
                m[(i, j + 6)] = -y[(i, j)];
                m[(i + 6, j)] = y[(i, j)];
            }
        }
        m.symmetric_eigenvalues().min()
    }
}

/// Block-diagonal symplectic form with [[0, 1], [−1, 0]] per mode.
pub fn symplectic_form() -> Matrix6 {
    let mut w = Matrix6::zeros();
    for m in 0..3 {
        w[(2 * m, 2 * m + 1)] = 1.0;
        w[(2 * m + 1, 2 * m)] = -1.0;
    }
    w
}

/// Drift matrix at a steady branch.
pub fn build_drift(rates: &DerivedRates, branch: &SteadyBranch) -> DriftMatrix {
    DriftCoefficients::at_branch(rates, branch).drift()
}

/// D = diag[κ, κ, 0, γm(2n_m+1), κw(2n_w+1), κw(2n_w+1)].
pub fn build_diffusion(rates: &DerivedRates) -> DiffusionMatrix {
    let mech = rates.gamma_m * (2.0 * rates.n_m + 1.0);
    let micro = rates.kappa_w * (2.0 * rates.n_w + 1.0);
    DiffusionMatrix([rates.kappa, rates.kappa, 0.0, mech, micro, micro])
}

/// Stability verdict from the spectrum of A.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub stable: bool,
    /// max Re λ, rad/s.
    pub abscissa: f64,
    pub eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn is_marginal(&self, frequency_scale: f64) -> bool {
        self.abscissa.abs() < MARGINAL_FRACTION * frequency_scale
    }
}

/// Stable iff every eigenvalue of A has negative real part.
pub fn is_stable_eigen(a: &DriftMatrix) -> Result<Spectrum> {
    let m = a.matrix;
    let failure = || Error::EigenFailure(m.iter().copied().collect());
    if m.iter().any(|x| !x.is_finite()) {
        return Err(failure());
    }
    let schur = m.try_schur(f64::EPSILON, 10_000).ok_or_else(failure)?;
    let eigenvalues: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    let abscissa = eigenvalues
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Spectrum {
        stable: abscissa < 0.0,
        abscissa,
        eigenvalues,
    })
}

/// Routh–Hurwitz verdict at a steady branch.
pub fn routh_hurwitz(rates: &DerivedRates, branch: &SteadyBranch) -> RouthHurwitz {
    DriftCoefficients::at_branch(rates, branch).routh_hurwitz()
}

/// Solves A·V + V·Aᵀ = −D by a dense LU solve of the vectorized 36×36 system.
pub fn solve_lyapunov(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    solve_lyapunov_dense(a, &d.matrix())
}

/// As [`solve_lyapunov`] with an arbitrary symmetric right-hand side.
pub fn solve_lyapunov_dense(a: &DriftMatrix, d: &Matrix6) -> Result<CovarianceMatrix> {
    let spectrum = is_stable_eigen(a)?;
    if spectrum.is_marginal(a.frequency_scale) {
        return Err(Error::Marginal {
            abscissa: spectrum.abscissa,
        });
    }
    let am = &a.matrix;
    // vec is column-major: vec(AV) = (I⊗A)vec V, vec(VAᵀ) = (A⊗I)vec V.
    let mut k = DMatrix::<f64>::zeros(36, 36);
    for j in 0..6 {
        for i in 0..6 {
            let row = i + 6 * j;
            for p in 0..6 {
                k[(row, p + 6 * j)] += am[(i, p)];
                k[(row, i + 6 * p)] += am[(j, p)];
            }
        }
    }
    let rhs = DVector::from_iterator(36, d.iter().map(|x| -x));
    let lu = k.clone().lu();
    let mut x = lu.solve(&rhs).ok_or(Error::Singular)?;
    // One round of iterative refinement.
    let r = &rhs - &k * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let v = Matrix6::from_iterator(x.iter().copied());
    let v = (v + v.transpose()) * 0.5;
    CovarianceMatrix::new(v)
}

/// ‖AV + VAᵀ + D‖∞ (max-abs entry).
pub fn lyapunov_residual(a: &DriftMatrix, v: &CovarianceMatrix, d: &Matrix6) -> f64 {
    (a.matrix * v.0 + v.0 * a.matrix.transpose() + d).amax()
}
