//! Named presets: the parameter changes each one applies to the reference
//! configuration, and the grids it is evaluated on.

use crate::params::PhysicalConfig;
use crate::sweep::{Axis, BranchPolicy, SweepParam, SweepSpec};

pub const PRESET_IDS: [&str; 15] = [
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8a", "fig8b", "fig8c", "fig9", "fig10",
    "fig11", "fig12a", "fig12b", "fig13",
];

/// Resolution of the density-plot presets along each axis.
pub const DENSITY_POINTS: usize = 101;

/// What a preset produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetKind {
    /// Observable rows on the lowest stable branch.
    Observables,
    /// Every steady branch with its stability, for branch diagrams.
    Branches,
}

/// One sweep of a preset, e.g. one curve or one density panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub label: String,
    pub spec: SweepSpec,
}

/// Time-domain runs attached to a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsPlan {
    pub g2_ratios: Vec<f64>,
    /// End time in units of 1/γm.
    pub t_end_gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub id: &'static str,
    pub kind: PresetKind,
    pub panels: Vec<Panel>,
    pub dynamics: Option<DynamicsPlan>,
}

impl Preset {
    /// Replaces g2/g1 in every panel (dropping duplicates and any g2 axis).
    pub fn with_g2_ratio(mut self, ratio: f64) -> Self {
        let mut seen: Vec<SweepSpec> = Vec::new();
        let mut panels = Vec::new();
        for mut p in self.panels {
            p.spec.axes.retain(|a| a.param != SweepParam::G2OverG1);
            if p.spec.axes.is_empty() {
                p.spec.axes.push(Axis {
                    param: SweepParam::G2OverG1,
                    values: vec![ratio],
                });
            }
            SweepParam::G2OverG1.set(&mut p.spec.base, ratio);
            if !seen.contains(&p.spec) {
                seen.push(p.spec.clone());
                p.label = format!("g2/g1={ratio}");
                panels.push(p);
            }
        }
        self.panels = panels;
        if let Some(d) = self.dynamics.as_mut() {
            d.g2_ratios = vec![ratio];
        }
        self
    }
}

fn with(base: &PhysicalConfig, changes: &[(SweepParam, f64)]) -> PhysicalConfig {
    let mut c = base.clone();
    for &(p, v) in changes {
        p.set(&mut c, v);
    }
    c
}

fn panel(label: String, base: PhysicalConfig, axes: Vec<Axis>, policy: BranchPolicy) -> Panel {
    Panel {
        label,
        spec: SweepSpec { base, axes, policy },
    }
}

fn g2_panels(
    base: &PhysicalConfig,
    ratios: &[f64],
    fixed: &[(SweepParam, f64)],
    axes: &[Axis],
    policy: BranchPolicy,
) -> Vec<Panel> {
    ratios
        .iter()
        .map(|&r| {
            let mut changes = fixed.to_vec();
            changes.push((SweepParam::G2OverG1, r));
            panel(
                format!("g2/g1={r}"),
                with(base, &changes),
                axes.to_vec(),
                policy,
            )
        })
        .collect()
}

/// Builds preset `id` on top of `base` (normally the reference config).
pub fn preset(id: &str, base: &PhysicalConfig) -> Option<Preset> {
    use SweepParam::*;
    let om = base.omega_m;
    let low = BranchPolicy::LowestStable;
    let id = *PRESET_IDS.iter().find(|p| **p == id)?;
    let observables = |panels| Preset {
        id,
        kind: PresetKind::Observables,
        panels,
        dynamics: None,
    };
    let g2_signs = [0.0, 4e-3, -4e-3];
    let density = [
        Axis::linspace(Delta0w, -2.0 * om, 2.0 * om, DENSITY_POINTS),
        Axis::linspace(Kappa, 0.01 * om, 2.0 * om, DENSITY_POINTS),
    ];
    let temperature = [Axis::linspace(Temperature, 1e-3, 0.2, 200)];
    let milliwatt = [(Power, 1e-3), (PowerW, 1e-3)];
    let preset = match id {
        "fig2" => Preset {
            id,
            kind: PresetKind::Observables,
            panels: vec![panel(
                "fig2".into(),
                base.clone(),
                vec![Axis {
                    param: G2OverG1,
                    values: vec![-8e-3, 0.0, 8e-3],
                }],
                low,
            )],
            dynamics: Some(DynamicsPlan {
                g2_ratios: vec![8e-3, 0.0, -8e-3],
                t_end_gamma: 5.0,
            }),
        },
        "fig3" => Preset {
            id,
            kind: PresetKind::Branches,
            panels: g2_panels(
                base,
                &[0.0, 1e-3, 4e-3],
                &[(Power, 3e-6), (PowerW, 3e-6), (Delta0w, om)],
                &[Axis::linspace(Delta0c, 0.0, 20.0 * base.kappa, 401)],
                BranchPolicy::All,
            ),
            dynamics: None,
        },
        "fig4" => observables(vec![panel(
            "fig4".into(),
            base.clone(),
            vec![Axis::linspace(G2OverG1, -8e-3, 8e-3, 161)],
            low,
        )]),
        "fig5" | "fig6" | "fig7" => observables(g2_panels(base, &g2_signs, &[], &density, low)),
        "fig8a" | "fig8c" => observables(g2_panels(
            base,
            &g2_signs,
            &[(Delta0w, -om)],
            &temperature,
            low,
        )),
        "fig8b" => observables(g2_panels(
            base,
            &g2_signs,
            &[(Delta0w, -0.4 * om)],
            &temperature,
            low,
        )),
        "fig9" => observables(vec![panel(
            "fig9".into(),
            with(base, &[(Delta0w, om)]),
            vec![Axis::linspace(G2OverG1, -0.02, 0.02, 801)],
            low,
        )]),
        "fig10" => {
            let mut panels = Vec::new();
            for r in [0.0, 8e-3] {
                panels.push(panel(
                    format!("g2/g1={r}"),
                    with(base, &[(G2OverG1, r)]),
                    vec![
                        Axis {
                            param: Temperature,
                            values: vec![1e-3, 0.01, 0.1, 0.3],
                        },
                        Axis::linspace(Delta0w, -om, 3.0 * om, 401),
                    ],
                    low,
                ));
            }
            observables(panels)
        }
        "fig11" => observables(vec![
            panel(
                "density".into(),
                with(base, &milliwatt),
                vec![
                    Axis::linspace(G2OverG1, -0.01, 0.05, 121),
                    Axis::linspace(Delta0w, -om, om, DENSITY_POINTS),
                ],
                low,
            ),
            panel(
                "delta0w=0".into(),
                with(base, &[(Power, 1e-3), (PowerW, 1e-3), (Delta0w, 0.0)]),
                vec![Axis::linspace(G2OverG1, 0.0, 0.05, 501)],
                low,
            ),
        ]),
        "fig12a" => observables(g2_panels(
            base,
            &[0.0, 1e-3, 4e-3],
            &[(Power, 1e-3), (PowerW, 1e-3), (Temperature, 1e-3)],
            &[Axis::linspace(Delta0w, -om, om, 201)],
            low,
        )),
        "fig12b" => observables(
            [1e-3, 0.05, 0.115]
                .iter()
                .map(|&t| {
                    panel(
                        format!("T={t}"),
                        with(
                            base,
                            &[
                                (Power, 1e-3),
                                (PowerW, 1e-3),
                                (G2OverG1, 8e-3),
                                (Temperature, t),
                            ],
                        ),
                        vec![Axis::linspace(Delta0w, -om, om, 201)],
                        low,
                    )
                })
                .collect(),
        ),
        "fig13" => {
            let mut panels = Vec::new();
            for r in [0.0, 8e-3] {
                panels.push(panel(
                    format!("g2/g1={r}"),
                    with(base, &[(G2OverG1, r)]),
                    vec![
                        Axis {
                            param: Temperature,
                            values: vec![0.1, 0.3],
                        },
                        Axis::linspace(Delta0w, 0.0, 2.0 * om, 201),
                    ],
                    low,
                ));
            }
            observables(panels)
        }
        _ => unreachable!("id checked against PRESET_IDS"),
    };
    Some(preset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{load_config, REFERENCE_CONFIG};

    #[test]
    fn every_preset_is_valid() {
        let base = load_config(REFERENCE_CONFIG).unwrap();
        for id in PRESET_IDS {
            let p = preset(id, &base).unwrap();
            assert!(!p.panels.is_empty(), "{id}");
            for panel in &p.panels {
                panel
                    .spec
                    .validate()
                    .unwrap_or_else(|e| panic!("{id}/{}: {e}", panel.label));
            }
        }
        assert!(preset("fig1", &base).is_none());
    }

    #[test]
    fn fig3_encodes_caption() {
        let base = load_config(REFERENCE_CONFIG).unwrap();
        let p = preset("fig3", &base).unwrap();
        for panel in &p.panels {
            assert_eq!(panel.spec.base.power, 3e-6);
            assert_eq!(panel.spec.base.power_w, 3e-6);
            assert_eq!(panel.spec.base.delta0w, base.omega_m);
        }
        let single = p.with_g2_ratio(0.0);
        assert_eq!(single.panels.len(), 1);
    }
}
