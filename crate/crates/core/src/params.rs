//! Device configuration and the rotating-frame rates derived from it.
//!
//! Everything downstream works in SI angular frequencies (rad/s). The config
//! document may give any frequency either as `<name>_rad_s` or `<name>_hz`;
//! the latter is multiplied by 2π on load.

use std::f64::consts::PI;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s (exact).
pub const C_LIGHT: f64 = 299_792_458.0;

/// Mechanical damping, given either as a quality factor or directly as a rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MechanicalDamping {
    Quality(f64),
    Rate(f64),
}

/// How the quadratic optomechanical coupling is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadraticCoupling {
    /// g2 = ratio · g1.
    Ratio(f64),
    /// g2 from the membrane reflectivity, with an explicit sign (+1 or -1).
    Reflectivity { reflectivity: f64, sign: f64 },
}

/// Raw device, drive and bath parameters in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConfig {
    pub cavity_length: f64,
    pub omega_c: f64,
    pub lambda_drive: f64,
    pub mass: f64,
    pub omega_m: f64,
    pub damping: MechanicalDamping,
    pub kappa: f64,
    pub omega_w: f64,
    pub kappa_w: f64,
    pub gap: f64,
    pub mu: f64,
    pub power: f64,
    pub power_w: f64,
    pub delta0c: f64,
    pub delta0w: f64,
    pub temperature: f64,
    pub qoc: QuadraticCoupling,
    pub description: String,
}

/// Rates of the rotating-frame model, all in rad/s (drive amplitudes in s⁻¹,
/// occupations dimensionless).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    pub g1: f64,
    pub g2: f64,
    pub gw: f64,
    pub e_d: f64,
    pub e_dw: f64,
    pub n_c: f64,
    pub n_w: f64,
    pub n_m: f64,
    pub gamma_m: f64,
    pub omega_m: f64,
    pub kappa: f64,
    pub kappa_w: f64,
    pub delta0c: f64,
    pub delta0w: f64,
}

/// The reference device parameter set shipped with the crate.
pub const REFERENCE_CONFIG: &str = include_str!("../presets/reference.json");

/// Mean thermal occupation 1/(exp(ħω/k_B T) − 1). Exactly zero at T = 0.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * temperature);
    // exp_m1 overflows to +inf for large x, which gives the correct 0.
    1.0 / x.exp_m1()
}

/// Coherent drive amplitude √(2·P·κ/(ħ·ω_drive)).
pub fn drive_amplitude(power: f64, decay: f64, omega_drive: f64) -> f64 {
    (2.0 * power * decay / (HBAR * omega_drive)).sqrt()
}

/// Zero-point displacement √(ħ/(m·Ωm)) in metres.
pub fn zero_point_length(mass: f64, omega_m: f64) -> f64 {
    (HBAR / (mass * omega_m)).sqrt()
}

impl PhysicalConfig {
    /// Parses and validates a JSON config document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        load_config(text)
    }

    pub fn gamma_m(&self) -> f64 {
        match self.damping {
            MechanicalDamping::Quality(q) => self.omega_m / q,
            MechanicalDamping::Rate(g) => g,
        }
    }

    /// Optical drive angular frequency 2πc/λd.
    pub fn omega_drive(&self) -> f64 {
        2.0 * PI * C_LIGHT / self.lambda_drive
    }

    /// Microwave drive angular frequency ωw − Δ0w.
    pub fn omega_drive_w(&self) -> f64 {
        self.omega_w - self.delta0w
    }

    /// Checks every field invariant; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cavity_length_m", self.cavity_length),
            ("omega_c_rad_s", self.omega_c),
            ("lambda_drive_m", self.lambda_drive),
            ("mass_kg", self.mass),
            ("omega_m_rad_s", self.omega_m),
            ("kappa_rad_s", self.kappa),
            ("omega_w_rad_s", self.omega_w),
            ("kappa_w_rad_s", self.kappa_w),
            ("gap_m", self.gap),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(key, format!("must be finite and > 0, got {v}")));
            }
        }
        let non_negative = [
            ("power_optical_w", self.power),
            ("power_microwave_w", self.power_w),
            ("temperature_k", self.temperature),
        ];
        for (key, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(key, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !(self.mu.is_finite() && (0.0..1.0).contains(&self.mu)) {
            return Err(invalid(
                "mu",
                format!("must lie in [0, 1), got {}", self.mu),
            ));
        }
        for (key, v) in [
            ("delta0c_rad_s", self.delta0c),
            ("delta0w_rad_s", self.delta0w),
        ] {
            if !v.is_finite() {
                return Err(invalid(key, format!("must be finite, got {v}")));
            }
        }
        if self.omega_drive_w() <= 0.0 {
            return Err(invalid(
                "delta0w_rad_s",
                "microwave drive frequency ωw − Δ0w must be positive".to_string(),
            ));
        }
        match self.damping {
            MechanicalDamping::Quality(q) if !(q.is_finite() && q > 0.0) => {
                return Err(invalid("q_mechanical", format!("must be > 0, got {q}")));
            }
            MechanicalDamping::Rate(g) if !(g.is_finite() && g > 0.0) => {
                return Err(invalid("gamma_m_rad_s", format!("must be > 0, got {g}")));
            }
            _ => {}
        }
        match self.qoc {
            QuadraticCoupling::Ratio(r) if !r.is_finite() => {
                return Err(invalid("g2_over_g1", format!("must be finite, got {r}")));
            }
            QuadraticCoupling::Reflectivity { reflectivity, sign } => {
                if !(reflectivity.is_finite() && (0.0..1.0).contains(&reflectivity)) {
                    return Err(invalid(
                        "reflectivity",
                        format!("must lie in [0, 1), got {reflectivity}"),
                    ));
                }
                if sign != 1.0 && sign != -1.0 {
                    return Err(invalid("g2_sign", format!("must be +1 or -1, got {sign}")));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Serializes to a config document that [`load_config`] reads back exactly.
    pub fn to_json_value(&self) -> Value {
        let mut m = Map::new();
        let mut put = |k: &str, v: f64| {
            m.insert(k.to_string(), Value::from(v));
        };
        put("cavity_length_m", self.cavity_length);
        put("omega_c_rad_s", self.omega_c);
        put("lambda_drive_m", self.lambda_drive);
        put("mass_kg", self.mass);
        put("omega_m_rad_s", self.omega_m);
        match self.damping {
            MechanicalDamping::Quality(q) => put("q_mechanical", q),
            MechanicalDamping::Rate(g) => put("gamma_m_rad_s", g),
        }
        put("kappa_rad_s", self.kappa);
        put("omega_w_rad_s", self.omega_w);
        put("kappa_w_rad_s", self.kappa_w);
        put("gap_m", self.gap);
        put("mu", self.mu);
        put("power_optical_w", self.power);
        put("power_microwave_w", self.power_w);
        put("delta0c_rad_s", self.delta0c);
        put("delta0w_rad_s", self.delta0w);
        put("temperature_k", self.temperature);
        match self.qoc {
            QuadraticCoupling::Ratio(r) => put("g2_over_g1", r),
            QuadraticCoupling::Reflectivity { reflectivity, sign } => {
                put("reflectivity", reflectivity);
                put("g2_sign", sign);
            }
        }
        if !self.description.is_empty() {
            m.insert("description".into(), Value::from(self.description.clone()));
        }
        Value::Object(m)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("config serializes")
    }
}

fn invalid(key: &str, message: String) -> Error {
    Error::InvalidField {
        key: key.to_string(),
        message,
    }
}

const FREQUENCY_KEYS: [&str; 8] = [
    "omega_c", "omega_m", "gamma_m", "kappa", "omega_w", "kappa_w", "delta0c", "delta0w",
];

const PLAIN_KEYS: [&str; 13] = [
    "cavity_length_m",
    "lambda_drive_m",
    "mass_kg",
    "gap_m",
    "mu",
    "power_optical_w",
    "power_microwave_w",
    "temperature_k",
    "q_mechanical",
    "g2_over_g1",
    "reflectivity",
    "g2_sign",
    "description",
];

struct Fields {
    map: Map<String, Value>,
}

impl Fields {
    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => n
                .as_f64()
                .map(Some)
                .ok_or_else(|| invalid(key, "not representable as f64".into())),
            Some(other) => Err(invalid(key, format!("expected a number, got {other}"))),
        }
    }

    fn required(&self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| Error::MissingField(key.to_string()))
    }

    /// Reads `<base>_rad_s` or `<base>_hz` (×2π); at most one may be present.
    fn frequency(&self, base: &str) -> Result<Option<f64>> {
        let rad = format!("{base}_rad_s");
        let hz = format!("{base}_hz");
        match (self.number(&rad)?, self.number(&hz)?) {
            (Some(_), Some(_)) => Err(Error::Exclusive(format!("{rad}, {hz}"))),
            (Some(v), None) => Ok(Some(v)),
            (None, Some(v)) => Ok(Some(2.0 * PI * v)),
            (None, None) => Ok(None),
        }
    }

    fn required_frequency(&self, base: &str) -> Result<f64> {
        self.frequency(base)?
            .ok_or_else(|| Error::MissingField(format!("{base}_rad_s")))
    }
}

fn is_known_key(key: &str) -> bool {
    if PLAIN_KEYS.contains(&key) {
        return true;
    }
    FREQUENCY_KEYS.iter().any(|base| {
        key.strip_prefix(base)
            .is_some_and(|rest| rest == "_rad_s" || rest == "_hz")
    })
}

/// Parses a flat JSON config document into a validated [`PhysicalConfig`].
///
/// Optional keys: `g2_sign` (defaults to +1, only with `reflectivity`) and
/// `description` (free text). Everything else listed in the README is
/// required, and unknown keys are rejected.
pub fn load_config(text: &str) -> Result<PhysicalConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(map) = value else {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "top-level value must be a JSON object".into(),
        });
    };
    if let Some(key) = map.keys().find(|k| !is_known_key(k)) {
        return Err(Error::UnknownField(key.clone()));
    }
    let f = Fields { map };

    let damping = match (f.number("q_mechanical")?, f.frequency("gamma_m")?) {
        (Some(q), None) => MechanicalDamping::Quality(q),
        (None, Some(g)) => MechanicalDamping::Rate(g),
        _ => {
            return Err(Error::Exclusive(
                "Qm, γm (`q_mechanical`, `gamma_m_rad_s`)".into(),
            ))
        }
    };

    let sign = f.number("g2_sign")?;
    let qoc = match (f.number("g2_over_g1")?, f.number("reflectivity")?) {
        (Some(r), None) => {
            if sign.is_some() {
                return Err(invalid(
                    "g2_sign",
                    "only valid together with `reflectivity`".into(),
                ));
            }
            QuadraticCoupling::Ratio(r)
        }
        (None, Some(reflectivity)) => QuadraticCoupling::Reflectivity {
            reflectivity,
            sign: sign.unwrap_or(1.0),
        },
        _ => {
            return Err(Error::Exclusive(
                "`g2_over_g1`, `reflectivity` (with optional `g2_sign`)".into(),
            ))
        }
    };

    let description = match f.map.get("description") {
        None => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => {
            return Err(invalid(
                "description",
                format!("expected a string, got {other}"),
            ))
        }
    };

    let cfg = PhysicalConfig {
        cavity_length: f.required("cavity_length_m")?,
        omega_c: f.required_frequency("omega_c")?,
        lambda_drive: f.required("lambda_drive_m")?,
        mass: f.required("mass_kg")?,
        omega_m: f.required_frequency("omega_m")?,
        damping,
        kappa: f.required_frequency("kappa")?,
        omega_w: f.required_frequency("omega_w")?,
        kappa_w: f.required_frequency("kappa_w")?,
        gap: f.required("gap_m")?,
        mu: f.required("mu")?,
        power: f.required("power_optical_w")?,
        power_w: f.required("power_microwave_w")?,
        delta0c: f.required_frequency("delta0c")?,
        delta0w: f.required_frequency("delta0w")?,
        temperature: f.required("temperature_k")?,
        qoc,
        description,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Derives every rotating-frame rate from a validated config.
pub fn derive_couplings(cfg: &PhysicalConfig) -> Result<DerivedRates> {
    cfg.validate()?;
    let x_zpf = zero_point_length(cfg.mass, cfg.omega_m);
    let g1 = cfg.omega_c / cfg.cavity_length * x_zpf;
    let gw = cfg.mu * cfg.omega_w / (2.0 * cfg.gap) * x_zpf;
    let g2 = match cfg.qoc {
        QuadraticCoupling::Ratio(r) => g1 * r,
        QuadraticCoupling::Reflectivity { reflectivity, sign } => {
            let magnitude = 8.0 * PI * PI * C_LIGHT
                / (cfg.lambda_drive * cfg.lambda_drive * cfg.cavity_length)
                * (reflectivity / (1.0 - reflectivity)).sqrt()
                * x_zpf
                * x_zpf;
            sign * magnitude
        }
    };
    Ok(DerivedRates {
        g1,
        g2,
        gw,
        e_d: drive_amplitude(cfg.power, cfg.kappa, cfg.omega_drive()),
        e_dw: drive_amplitude(cfg.power_w, cfg.kappa_w, cfg.omega_drive_w()),
        n_c: thermal_occupation(cfg.omega_c, cfg.temperature),
        n_w: thermal_occupation(cfg.omega_w, cfg.temperature),
        n_m: thermal_occupation(cfg.omega_m, cfg.temperature),
        gamma_m: cfg.gamma_m(),
        omega_m: cfg.omega_m,
        kappa: cfg.kappa,
        kappa_w: cfg.kappa_w,
        delta0c: cfg.delta0c,
        delta0w: cfg.delta0w,
    })
}
