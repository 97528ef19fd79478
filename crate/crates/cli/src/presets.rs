//! Shipped experiment configurations.

use crate::config::*;

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> ExperimentConfig,
}

impl Preset {
    pub fn config(&self) -> ExperimentConfig {
        (self.build)()
    }
}

const SEED: u64 = 20240611;

fn base(name: &str, experiment: Experiment, group: GroupSpec, dim: usize) -> ExperimentConfig {
    let metric = match group {
        GroupSpec::Torus { .. } => None,
        _ => Some(MetricSpec::Averaging),
    };
    ExperimentConfig {
        name: name.into(),
        experiment,
        seed: SEED,
        group,
        feature_space: FeatureSpaceSpec { dim, metric },
        activation: ActivationSpec::Gaussian,
        mother: None,
        x_grid: None,
        ab_grid: None,
        target: None,
        n_list: vec![],
        sweep_mode: None,
        test_set: TestSetSpec {
            samples: 50,
            radius: 1.0,
            plateau: None,
        },
        network: None,
        a3: None,
        output: OutputSpec::default(),
    }
}

fn gaussian_target(scale: f64, center: Option<Vec<f64>>) -> Option<TargetSpec> {
    Some(TargetSpec {
        kind: TargetType::GaussianOrbit,
        params: TargetParams {
            scale: Some(scale),
            center,
            t: None,
        },
        cutoff: None,
    })
}

fn cyclic2(name: &str, experiment: Experiment) -> ExperimentConfig {
    ExperimentConfig {
        mother: Some(MotherSpec::HermiteGaussian {
            order: 6,
            width: 3.5,
        }),
        x_grid: Some(XGridSpec::Midpoint {
            radius: 6.0,
            points: 64,
        }),
        ab_grid: Some(AbGridSpec {
            a_radius: 4.0,
            b_radius: 8.0,
            points: 32,
        }),
        target: gaussian_target(1.0, None),
        ..base(name, experiment, GroupSpec::Cyclic { m: 2 }, 2)
    }
}

fn cyclic2_gaussian_reconstruct() -> ExperimentConfig {
    cyclic2("cyclic2_gaussian_reconstruct", Experiment::Reconstruct)
}

fn cyclic2_relu_reconstruct() -> ExperimentConfig {
    ExperimentConfig {
        activation: ActivationSpec::Relu,
        mother: Some(MotherSpec::HermiteGaussian {
            order: 4,
            width: 1.0,
        }),
        ..cyclic2("cyclic2_relu_reconstruct", Experiment::Reconstruct)
    }
}

fn cyclic2_gaussian_sweep() -> ExperimentConfig {
    ExperimentConfig {
        n_list: vec![2, 4, 8, 16],
        sweep_mode: Some(SweepModeSpec::Sample),
        ..cyclic2("cyclic2_gaussian_sweep", Experiment::Sweep)
    }
}

fn cyclic3_gaussian_reconstruct() -> ExperimentConfig {
    ExperimentConfig {
        mother: Some(MotherSpec::HermiteGaussian {
            order: 4,
            width: 2.0,
        }),
        x_grid: Some(XGridSpec::Midpoint {
            radius: 6.0,
            points: 16,
        }),
        ab_grid: Some(AbGridSpec {
            a_radius: 4.0,
            b_radius: 8.0,
            points: 16,
        }),
        target: gaussian_target(1.0, Some(vec![0.3, -0.2, 0.0])),
        test_set: TestSetSpec {
            samples: 30,
            radius: 1.0,
            plateau: None,
        },
        ..base(
            "cyclic3_gaussian_reconstruct",
            Experiment::Reconstruct,
            GroupSpec::Cyclic { m: 3 },
            3,
        )
    }
}

fn image2x3_export() -> ExperimentConfig {
    ExperimentConfig {
        mother: Some(MotherSpec::HermiteGaussian {
            order: 2,
            width: 1.0,
        }),
        x_grid: Some(XGridSpec::MonteCarlo {
            radius: 6.0,
            samples: 4096,
        }),
        ab_grid: Some(AbGridSpec {
            a_radius: 2.0,
            b_radius: 4.0,
            points: 4,
        }),
        target: gaussian_target(1.0, None),
        test_set: TestSetSpec {
            samples: 20,
            radius: 1.0,
            plateau: None,
        },
        ..base(
            "image2x3_export",
            Experiment::Export,
            GroupSpec::ProductCyclic {
                m1: 2,
                m2: 3,
                channels: 1,
            },
            6,
        )
    }
}

fn cyclic3_difference_reconstruct() -> ExperimentConfig {
    ExperimentConfig {
        mother: Some(MotherSpec::HermiteGaussian {
            order: 4,
            width: 1.5,
        }),
        x_grid: Some(XGridSpec::Midpoint {
            radius: 2.5,
            points: 20,
        }),
        ab_grid: Some(AbGridSpec {
            a_radius: 6.0,
            b_radius: 8.0,
            points: 16,
        }),
        target: Some(TargetSpec {
            kind: TargetType::Difference,
            params: TargetParams::default(),
            cutoff: Some(CutoffSpec::SmoothBump {
                radius: 1.5,
                width: 1.0,
            }),
        }),
        test_set: TestSetSpec {
            samples: 30,
            radius: 1.5,
            plateau: Some(1.5),
        },
        ..base(
            "cyclic3_difference_reconstruct",
            Experiment::Reconstruct,
            GroupSpec::Cyclic { m: 3 },
            3,
        )
    }
}

fn s3_deepsets_equivariance() -> ExperimentConfig {
    let mut cfg = base(
        "s3_deepsets_equivariance",
        Experiment::Equivariance,
        GroupSpec::Symmetric {
            n: 3,
            generators: None,
        },
        3,
    );
    cfg.feature_space.metric = Some(MetricSpec::Euclidean);
    ExperimentConfig {
        target: Some(TargetSpec {
            kind: TargetType::Deepsets,
            params: TargetParams::default(),
            cutoff: None,
        }),
        network: Some(NetworkSpec {
            units: 16,
            filter_scale: 1.0,
        }),
        test_set: TestSetSpec {
            samples: 20,
            radius: 1.0,
            plateau: None,
        },
        ..cfg
    }
}

fn torus3_gaussian_reconstruct() -> ExperimentConfig {
    ExperimentConfig {
        mother: Some(MotherSpec::HermiteGaussian {
            order: 4,
            width: 2.0,
        }),
        x_grid: Some(XGridSpec::Midpoint {
            radius: 6.0,
            points: 16,
        }),
        ab_grid: Some(AbGridSpec {
            a_radius: 4.0,
            b_radius: 8.0,
            points: 16,
        }),
        target: gaussian_target(1.0, None),
        test_set: TestSetSpec {
            samples: 20,
            radius: 0.5,
            plateau: None,
        },
        ..base(
            "torus3_gaussian_reconstruct",
            Experiment::Reconstruct,
            GroupSpec::Torus {
                band: 3,
                angles: 16,
            },
            5,
        )
    }
}

fn torus3_differential_equivariance() -> ExperimentConfig {
    ExperimentConfig {
        target: Some(TargetSpec {
            kind: TargetType::TorusDiff,
            params: TargetParams {
                t: Some(2.0),
                ..TargetParams::default()
            },
            cutoff: None,
        }),
        network: Some(NetworkSpec {
            units: 16,
            filter_scale: 1.0,
        }),
        test_set: TestSetSpec {
            samples: 20,
            radius: 1.0,
            plateau: None,
        },
        ..base(
            "torus3_differential_equivariance",
            Experiment::Equivariance,
            GroupSpec::Torus {
                band: 3,
                angles: 16,
            },
            5,
        )
    }
}

fn a3(name: &str, activation: ActivationSpec) -> ExperimentConfig {
    ExperimentConfig {
        activation,
        a3: Some(A3Spec {
            order: 1,
            theta: 1.0,
            radius: 100.0,
            points: 20_001,
        }),
        test_set: TestSetSpec {
            samples: 1,
            radius: 1.0,
            plateau: None,
        },
        ..base(name, Experiment::A3check, GroupSpec::Cyclic { m: 1 }, 1)
    }
}

fn relu_a3check() -> ExperimentConfig {
    a3("relu_a3check", ActivationSpec::Relu)
}

fn step_a3check() -> ExperimentConfig {
    a3("step_a3check", ActivationSpec::Step)
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "cyclic2_gaussian_reconstruct",
        description: "Z_2 acting on length-2 signals: Gaussian target and activation, S[R f] vs <<sigma, rho>> f",
        build: cyclic2_gaussian_reconstruct,
    },
    Preset {
        name: "cyclic2_relu_reconstruct",
        description: "Z_2 acting on length-2 signals with a ReLU activation",
        build: cyclic2_relu_reconstruct,
    },
    Preset {
        name: "cyclic2_gaussian_sweep",
        description: "Finite networks of width n^3, n in {2, 4, 8, 16}, for the m = 2 Gaussian target",
        build: cyclic2_gaussian_sweep,
    },
    Preset {
        name: "cyclic3_gaussian_reconstruct",
        description: "Z_3 acting on length-3 signals: shifted Gaussian target",
        build: cyclic3_gaussian_reconstruct,
    },
    Preset {
        name: "image2x3_export",
        description: "Z_2 x Z_3 acting on 2x3 single-channel images: exported network and its equivariance",
        build: image2x3_export,
    },
    Preset {
        name: "cyclic3_difference_reconstruct",
        description: "Z_3 difference filter x_{i+1} - x_i with a smooth bump cutoff",
        build: cyclic3_difference_reconstruct,
    },
    Preset {
        name: "s3_deepsets_equivariance",
        description: "S_3 acting on sets of three: Deep Sets target and a random network",
        build: s3_deepsets_equivariance,
    },
    Preset {
        name: "torus3_gaussian_reconstruct",
        description: "Circle rotations of band-3 signals: Gaussian target",
        build: torus3_gaussian_reconstruct,
    },
    Preset {
        name: "torus3_differential_equivariance",
        description: "Circle rotations of band-3 signals: derivative target with a Gaussian factor",
        build: torus3_differential_equivariance,
    },
    Preset {
        name: "relu_a3check",
        description: "Condition (A3) for ReLU, first difference with step 1",
        build: relu_a3check,
    },
    Preset {
        name: "step_a3check",
        description: "Condition (A3) for the unit step, first difference with step 1",
        build: step_a3check,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
