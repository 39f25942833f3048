//! Observables of the Gaussian steady state: bipartite logarithmic
//! negativity, effective phonon number, mechanical squeezing.

use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};
use crate::fluct::CovarianceMatrix;

/// One of the three bosonic modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Optical,
    Mechanical,
    Microwave,
}

impl Mode {
    /// Index of the Q quadrature; P follows it.
    pub fn offset(self) -> usize {
        match self {
            Mode::Optical => 0,
            Mode::Mechanical => 2,
            Mode::Microwave => 4,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Mode::Optical => 'o',
            Mode::Mechanical => 'm',
            Mode::Microwave => 'w',
        }
    }
}

/// An ordered pair of distinct modes; the first one fills block B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModePair {
    pub first: Mode,
    pub second: Mode,
}

impl ModePair {
    pub const OW: ModePair = ModePair {
        first: Mode::Optical,
        second: Mode::Microwave,
    };
    pub const OM: ModePair = ModePair {
        first: Mode::Optical,
        second: Mode::Mechanical,
    };
    pub const MW: ModePair = ModePair {
        first: Mode::Mechanical,
        second: Mode::Microwave,
    };

    pub fn swapped(self) -> Self {
        ModePair {
            first: self.second,
            second: self.first,
        }
    }

    pub fn name(self) -> String {
        format!("{}{}", self.first.letter(), self.second.letter())
    }

    /// Parses `ow`, `om`, `mw` and their reversals.
    pub fn parse(s: &str) -> Option<Self> {
        let mode = |c| match c {
            'o' => Some(Mode::Optical),
            'm' => Some(Mode::Mechanical),
            'w' => Some(Mode::Microwave),
            _ => None,
        };
        let mut chars = s.chars();
        let (a, b) = (mode(chars.next()?)?, mode(chars.next()?)?);
        (chars.next().is_none() && a != b).then_some(ModePair {
            first: a,
            second: b,
        })
    }

    fn indices(self) -> [usize; 4] {
        let (i, j) = (self.first.offset(), self.second.offset());
        [i, i + 1, j, j + 1]
    }
}

/// 4×4 covariance of two modes, [[B, C], [Cᵀ, B′]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteCM {
    pub matrix: Matrix4<f64>,
    pub pair: ModePair,
}

impl BipartiteCM {
    pub fn b(&self) -> Matrix2<f64> {
        self.matrix.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn b_prime(&self) -> Matrix2<f64> {
        self.matrix.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn c(&self) -> Matrix2<f64> {
        self.matrix.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Σ = det B + det B′ − 2 det C.
    pub fn sigma(&self) -> f64 {
        self.b().determinant() + self.b_prime().determinant() - 2.0 * self.c().determinant()
    }
}

/// Keeps the rows and columns of the two selected modes.
pub fn reduce_bipartition(v: &CovarianceMatrix, pair: ModePair) -> BipartiteCM {
    let idx = pair.indices();
    BipartiteCM {
        matrix: Matrix4::from_fn(|i, j| v.get(idx[i], idx[j])),
        pair,
    }
}

/// Smallest symplectic eigenvalue η⁻ of the partially transposed state.
pub fn eta_minus(vbp: &BipartiteCM) -> Result<f64> {
    if vbp.matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidCovariance(
            "non-finite bipartite entry".into(),
        ));
    }
    let sigma = vbp.sigma();
    let det = vbp.matrix.determinant();
    let mut disc = sigma * sigma - 4.0 * det;
    if disc < 0.0 {
        if disc >= -1e-12 * (sigma * sigma).max(1.0) {
            disc = 0.0;
        } else {
            return Err(Error::InvalidCovariance(format!(
                "Σ² − 4 det V = {disc:e} is negative"
            )));
        }
    }
    let eta_sq = (sigma - disc.sqrt()) / 2.0;
    if eta_sq <= 0.0 {
        log::warn!(
            "{} bipartition: η⁻² = {eta_sq:e} ≤ 0 (unphysical covariance), clamped to 0⁺",
            vbp.pair.name()
        );
        return Ok(f64::MIN_POSITIVE);
    }
    Ok(eta_sq.sqrt())
}

/// E_N = max(0, −ln 2η⁻).
pub fn log_negativity(vbp: &BipartiteCM) -> Result<f64> {
    let eta = eta_minus(vbp)?;
    Ok((-(2.0 * eta).ln()).max(0.0))
}

/// n_eff = (V[2][2] + V[3][3] − 1)/2.
pub fn effective_phonon(v: &CovarianceMatrix) -> f64 {
    (v.get(2, 2) + v.get(3, 3) - 1.0) / 2.0
}

/// A mechanical quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Q,
    P,
}

/// S = −10·log₁₀(2σ), positive when the variance is below the vacuum's 1/2.
pub fn squeezing_db(v: &CovarianceMatrix, quad: Quadrature) -> Result<f64> {
    let sigma = match quad {
        Quadrature::Q => v.get(2, 2),
        Quadrature::P => v.get(3, 3),
    };
    if !(sigma > 0.0) {
        return Err(Error::InvalidCovariance(format!(
            "mechanical variance {sigma:e} is not positive"
        )));
    }
    Ok(-10.0 * (2.0 * sigma).log10())
}

/// Mechanical variances (⟨δQ²⟩, ⟨δP²⟩).
pub fn equipartition_gap(v: &CovarianceMatrix) -> (f64, f64) {
    (v.get(2, 2), v.get(3, 3))
}

/// Everything derived from one covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub en_ow: f64,
    pub en_om: f64,
    pub en_mw: f64,
    pub n_eff: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub s_q: f64,
    pub s_p: f64,
}

impl Observables {
    pub fn from_covariance(v: &CovarianceMatrix) -> Result<Self> {
        let en = |pair| log_negativity(&reduce_bipartition(v, pair));
        let (var_q, var_p) = equipartition_gap(v);
        Ok(Observables {
            en_ow: en(ModePair::OW)?,
            en_om: en(ModePair::OM)?,
            en_mw: en(ModePair::MW)?,
            n_eff: effective_phonon(v),
            var_q,
            var_p,
            s_q: squeezing_db(v, Quadrature::Q)?,
            s_p: squeezing_db(v, Quadrature::P)?,
        })
    }
}
