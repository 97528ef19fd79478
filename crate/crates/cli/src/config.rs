//! Experiment configuration: the JSON schema, its validation, and the
//! translation into library objects.

use std::sync::Arc;

use gcnn_ridgelet::calculus::{Activation, MotherRidgelet, RidgeletPair};
use gcnn_ridgelet::group::{Group, Metric, Representation};
use gcnn_ridgelet::quadrature::{BoxGrid, PointCloud, Quadrature};
use gcnn_ridgelet::ridgelet::{SweepMode, TargetFunction};
use gcnn_ridgelet::targets::{self, Cutoff};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Reconstruct,
    Sweep,
    Equivariance,
    A3check,
    Export,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic {
        m: usize,
    },
    ProductCyclic {
        m1: usize,
        m2: usize,
        channels: usize,
    },
    /// Subgroup of `S_n` generated by `generators`; all of `S_n` if absent.
    Symmetric {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<Vec<usize>>>,
    },
    Torus {
        band: usize,
        angles: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricSpec {
    Averaging,
    Euclidean,
}

impl From<MetricSpec> for Metric {
    fn from(m: MetricSpec) -> Self {
        match m {
            MetricSpec::Averaging => Metric::Averaging,
            MetricSpec::Euclidean => Metric::Euclidean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSpaceSpec {
    pub dim: usize,
    /// Required for permutation groups, absent for the torus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActivationSpec {
    Relu,
    Tanh,
    Gaussian,
    Step,
    TruncatedPower { k: u32 },
}

impl From<ActivationSpec> for Activation {
    fn from(a: ActivationSpec) -> Self {
        match a {
            ActivationSpec::Relu => Activation::Relu,
            ActivationSpec::Tanh => Activation::Tanh,
            ActivationSpec::Gaussian => Activation::Gaussian,
            ActivationSpec::Step => Activation::Step,
            ActivationSpec::TruncatedPower { k } => Activation::TruncatedPower(k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotherSpec {
    Gaussian { width: f64 },
    HermiteGaussian { order: usize, width: f64 },
}

impl From<MotherSpec> for MotherRidgelet {
    fn from(m: MotherSpec) -> Self {
        match m {
            MotherSpec::Gaussian { width } => MotherRidgelet::Gaussian { width },
            MotherSpec::HermiteGaussian { order, width } => {
                MotherRidgelet::HermiteGaussian { order, width }
            }
        }
    }
}

/// The x-integration rule, a cube in orthonormal coordinates of the
/// integration subspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum XGridSpec {
    Midpoint { radius: f64, points: usize },
    MonteCarlo { radius: f64, samples: usize },
}

/// `(a, b)` grid: a cube of radius `a_radius` for the filter, `b_radius`
/// for the bias, `points` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbGridSpec {
    pub a_radius: f64,
    pub b_radius: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetType {
    GaussianOrbit,
    Difference,
    TorusDiff,
    Deepsets,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CutoffSpec {
    GaussianFactor { t: f64 },
    BoxIndicator { radius: f64 },
    SmoothBump { radius: f64, width: f64 },
}

impl From<CutoffSpec> for Cutoff {
    fn from(c: CutoffSpec) -> Self {
        match c {
            CutoffSpec::GaussianFactor { t } => Cutoff::GaussianFactor { t },
            CutoffSpec::BoxIndicator { radius } => Cutoff::BoxIndicator { radius },
            CutoffSpec::SmoothBump { radius, width } => Cutoff::SmoothBump { radius, width },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    #[serde(rename = "type")]
    pub kind: TargetType,
    #[serde(default)]
    pub params: TargetParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<CutoffSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepModeSpec {
    Sample,
    CellMass,
}

/// Inputs drawn uniformly from the raw-coordinate cube `[-radius, radius]^d`,
/// keeping only those with `|x| <= plateau` when a plateau is given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSetSpec {
    pub samples: usize,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau: Option<f64>,
}

/// A random network for equivariance checks: filters uniform in
/// `[-filter_scale, filter_scale]`, biases and coefficients uniform in
/// `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub units: usize,
    pub filter_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct A3Spec {
    pub order: usize,
    pub theta: f64,
    pub radius: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_results")]
    pub results: String,
    #[serde(default = "default_summary")]
    pub summary: String,
    #[serde(default = "default_weights")]
    pub weights: String,
}

fn default_results() -> String {
    "results.csv".into()
}

fn default_summary() -> String {
    "summary.json".into()
}

fn default_weights() -> String {
    "weights.json".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            results: default_results(),
            summary: default_summary(),
            weights: default_weights(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub experiment: Experiment,
    /// Seeds the test set, Monte Carlo nodes and random networks.
    pub seed: u64,
    pub group: GroupSpec,
    pub feature_space: FeatureSpaceSpec,
    pub activation: ActivationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mother: Option<MotherSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<XGridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ab_grid: Option<AbGridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_list: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_mode: Option<SweepModeSpec>,
    pub test_set: TestSetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a3: Option<A3Spec>,
    #[serde(default)]
    pub output: OutputSpec,
}

/// The representation named by a group and feature-space spec.
pub fn build_representation(
    group: &GroupSpec,
    fs: &FeatureSpaceSpec,
) -> Result<Arc<Representation>, CliError> {
    let metric: Metric = fs.metric.map(Into::into).unwrap_or_default();
    let rep = match group {
        GroupSpec::Cyclic { m } => Representation::regular_cyclic(*m, metric)?,
        GroupSpec::ProductCyclic { m1, m2, channels } => {
            Representation::image(*m1, *m2, *channels, metric)?
        }
        GroupSpec::Symmetric { n, generators } => {
            let g = match generators {
                Some(gens) => Group::symmetric(*n, gens)?,
                None => Group::full_symmetric(*n)?,
            };
            Representation::permutation(g, metric)?
        }
        GroupSpec::Torus { band, angles } => Representation::torus(*band, *angles)?,
    };
    if rep.dim() != fs.dim {
        return bad(format!(
            "feature_space.dim is {}, the group acts on dimension {}",
            fs.dim,
            rep.dim()
        ));
    }
    Ok(Arc::new(rep))
}

fn bad<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Validation(msg.into()))
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        bad(format!("{name} must be positive and finite, got {v}"))
    }
}

fn require<'a, T>(field: &'a Option<T>, name: &str, exp: Experiment) -> Result<&'a T, CliError> {
    field
        .as_ref()
        .ok_or_else(|| CliError::Validation(format!("experiment {exp:?} needs '{name}'")))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Schema checks that do not need any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let exp = self.experiment;
        if self.name.trim().is_empty() {
            return bad("name must not be empty");
        }
        match (&self.group, self.feature_space.metric) {
            (GroupSpec::Torus { .. }, Some(_)) => {
                return bad("the torus carries its own Fourier metric; omit feature_space.metric")
            }
            (GroupSpec::Torus { .. }, None) => {}
            (_, None) => return bad("feature_space.metric is required for permutation groups"),
            _ => {}
        }
        if self.test_set.samples == 0 {
            return bad("test_set.samples must be at least 1");
        }
        positive("test_set.radius", self.test_set.radius)?;
        if let Some(p) = self.test_set.plateau {
            positive("test_set.plateau", p)?;
        }
        if let Some(x) = &self.x_grid {
            let (r, n) = match *x {
                XGridSpec::Midpoint { radius, points } => (radius, points),
                XGridSpec::MonteCarlo { radius, samples } => (radius, samples),
            };
            positive("x_grid.radius", r)?;
            if n == 0 {
                return bad("x_grid needs at least one node");
            }
        }
        if let Some(ab) = &self.ab_grid {
            positive("ab_grid.a_radius", ab.a_radius)?;
            positive("ab_grid.b_radius", ab.b_radius)?;
            if ab.points == 0 {
                return bad("ab_grid.points must be at least 1");
            }
        }
        if let Some(t) = &self.target {
            self.validate_target(t)?;
        }
        match exp {
            Experiment::Reconstruct | Experiment::Export | Experiment::Sweep => {
                require(&self.mother, "mother", exp)?;
                require(&self.x_grid, "x_grid", exp)?;
                require(&self.ab_grid, "ab_grid", exp)?;
                require(&self.target, "target", exp)?;
            }
            Experiment::Equivariance => {
                if self.network.is_none() && self.target.is_none() {
                    return bad("equivariance needs a 'network', a 'target' or both");
                }
            }
            Experiment::A3check => {
                require(&self.a3, "a3", exp)?;
            }
        }
        if exp == Experiment::Sweep {
            require(&self.sweep_mode, "sweep_mode", exp)?;
            if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
                return bad("n_list must be non-empty and strictly increasing");
            }
            if self.n_list[0] == 0 {
                return bad("n_list entries must be positive");
            }
        } else if !self.n_list.is_empty() || self.sweep_mode.is_some() {
            return bad("n_list and sweep_mode are only used by the sweep experiment");
        }
        if let Some(n) = &self.network {
            if n.units == 0 {
                return bad("network.units must be at least 1");
            }
            positive("network.filter_scale", n.filter_scale)?;
        }
        if let Some(a3) = &self.a3 {
            positive("a3.theta", a3.theta)?;
            positive("a3.radius", a3.radius)?;
        }
        Ok(())
    }

    fn validate_target(&self, t: &TargetSpec) -> Result<(), CliError> {
        let p = &t.params;
        let unused = |name: &str, present: bool| {
            if present {
                bad(format!("target type {:?} does not take '{name}'", t.kind))
            } else {
                Ok(())
            }
        };
        match t.kind {
            TargetType::GaussianOrbit => {
                positive("target.params.scale", p.scale.unwrap_or(f64::NAN))?;
                unused("t", p.t.is_some())?;
            }
            TargetType::Difference => {
                unused("scale", p.scale.is_some())?;
                unused("center", p.center.is_some())?;
                unused("t", p.t.is_some())?;
                if t.cutoff.is_none() {
                    return bad("the difference target needs a cutoff");
                }
            }
            TargetType::TorusDiff => {
                positive("target.params.t", p.t.unwrap_or(f64::NAN))?;
                unused("scale", p.scale.is_some())?;
                unused("center", p.center.is_some())?;
                unused("cutoff", t.cutoff.is_some())?;
            }
            TargetType::Deepsets => {
                unused("scale", p.scale.is_some())?;
                unused("center", p.center.is_some())?;
                unused("t", p.t.is_some())?;
            }
        }
        Ok(())
    }

    pub fn representation(&self) -> Result<Arc<Representation>, CliError> {
        build_representation(&self.group, &self.feature_space)
    }

    pub fn pair(&self, m: usize) -> Result<RidgeletPair, CliError> {
        let mother = require(&self.mother, "mother", self.experiment)?;
        Ok(RidgeletPair::new(
            self.activation.into(),
            (*mother).into(),
            m,
        )?)
    }

    pub fn x_quadrature(&self, m: usize) -> Result<Quadrature, CliError> {
        Ok(match *require(&self.x_grid, "x_grid", self.experiment)? {
            XGridSpec::Midpoint { radius, points } => {
                Quadrature::Midpoint(BoxGrid::cube(m, radius, points)?)
            }
            XGridSpec::MonteCarlo { radius, samples } => {
                Quadrature::MonteCarlo(PointCloud::new(vec![radius; m], samples, self.seed)?)
            }
        })
    }

    pub fn ab_radii(&self, m: usize) -> Result<Vec<f64>, CliError> {
        let ab = require(&self.ab_grid, "ab_grid", self.experiment)?;
        let mut radii = vec![ab.a_radius; m];
        radii.push(ab.b_radius);
        Ok(radii)
    }

    pub fn ab_grid(&self, m: usize) -> Result<BoxGrid, CliError> {
        let ab = require(&self.ab_grid, "ab_grid", self.experiment)?;
        Ok(BoxGrid::new(self.ab_radii(m)?, ab.points)?)
    }

    pub fn sweep_mode(&self) -> Result<SweepMode, CliError> {
        Ok(
            match require(&self.sweep_mode, "sweep_mode", self.experiment)? {
                SweepModeSpec::Sample => SweepMode::Sample,
                SweepModeSpec::CellMass => SweepMode::CellMass {
                    base_points: require(&self.ab_grid, "ab_grid", self.experiment)?.points,
                },
            },
        )
    }

    pub fn target_function(
        &self,
        rep: &Arc<Representation>,
    ) -> Result<Option<TargetFunction>, CliError> {
        let Some(spec) = &self.target else {
            return Ok(None);
        };
        let p = &spec.params;
        let base = match spec.kind {
            TargetType::GaussianOrbit => targets::gaussian_orbit(
                Arc::clone(rep),
                p.scale.unwrap_or(f64::NAN),
                p.center.clone(),
            )?,
            TargetType::Difference => {
                let cutoff = spec.cutoff.map(Into::into).ok_or_else(|| {
                    CliError::Validation("the difference target needs a cutoff".into())
                })?;
                return Ok(Some(targets::difference_filter(Arc::clone(rep), cutoff)?));
            }
            TargetType::TorusDiff => {
                return Ok(Some(targets::torus_differential(
                    Arc::clone(rep),
                    p.t.unwrap_or(f64::NAN),
                )?))
            }
            TargetType::Deepsets => targets::deepsets_target(Arc::clone(rep))?,
        };
        Ok(Some(match spec.cutoff {
            None => base,
            Some(c) => {
                let cutoff: Cutoff = c.into();
                cutoff.validate()?;
                let space = Arc::clone(rep.space());
                let inner = base.clone();
                targets::orbit_target(
                    base.name(),
                    move |x| inner.eval_e(x) * cutoff.eval(&space, x),
                    Arc::clone(rep),
                )
            }
        }))
    }
}
