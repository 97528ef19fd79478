//! Runs a validated configuration and collects its outputs in memory.

use std::sync::Arc;
use std::time::Instant;

use gcnn_ridgelet::calculus::{a3_check, Activation};
use gcnn_ridgelet::feature_space::FeatureVec;
use gcnn_ridgelet::group::{GroupElement, Representation};
use gcnn_ridgelet::ridgelet::{
    discretize, reconstruct, ridgelet_transform, universality_sweep, FiniteNetwork, Unit,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Experiment, ExperimentConfig};
use crate::weights::Weights;
use crate::CliError;

const TEST_STREAM: u64 = 1;
const NETWORK_STREAM: u64 = 2;
/// Rejection sampling gives up after this many draws per requested input.
const MAX_DRAWS_PER_SAMPLE: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub n: usize,
    pub units: usize,
    pub sup_error: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A3Entry {
    pub bounded: bool,
    pub sup: f64,
    pub lipschitz_est: f64,
    pub lipschitz_refined: f64,
    pub lipschitz: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub config_hash: String,
    pub name: String,
    pub experiment: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_integral: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_rel_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network_defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strictly_decreasing: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometric_mean_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a3: Option<A3Entry>,
}

/// Everything a run writes, before it touches the file system.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: Summary,
    pub csv: Vec<u8>,
    pub weights: Option<Weights>,
}

struct Csv {
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    fn new(header: &[&str]) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    fn finish(self) -> Result<Vec<u8>, CliError> {
        self.writer
            .into_inner()
            .map_err(|e| CliError::Io(e.into_error().to_string()))
    }
}

/// Inputs uniform in the raw-coordinate cube, filtered by the plateau.
pub fn test_inputs(
    cfg: &ExperimentConfig,
    rep: &Representation,
) -> Result<Vec<FeatureVec>, CliError> {
    let ts = &cfg.test_set;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(TEST_STREAM);
    let mut out = Vec::with_capacity(ts.samples);
    let mut draws = 0;
    while out.len() < ts.samples {
        draws += 1;
        if draws > MAX_DRAWS_PER_SAMPLE * ts.samples {
            return Err(CliError::Validation(format!(
                "test set plateau {:?} is too small for radius {}",
                ts.plateau, ts.radius
            )));
        }
        let c: Vec<f64> = (0..rep.dim())
            .map(|_| rng.random_range(-ts.radius..=ts.radius))
            .collect();
        let x = rep.space().vector(c)?;
        if ts.plateau.is_none_or(|p| x.norm_sq().sqrt() <= p) {
            out.push(x);
        }
    }
    Ok(out)
}

pub fn random_network(
    cfg: &ExperimentConfig,
    rep: &Arc<Representation>,
) -> Result<Option<FiniteNetwork>, CliError> {
    let Some(spec) = cfg.network else {
        return Ok(None);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(NETWORK_STREAM);
    let s = spec.filter_scale;
    let units = (0..spec.units)
        .map(|_| Unit {
            a: (0..rep.dim()).map(|_| rng.random_range(-s..=s)).collect(),
            b: rng.random_range(-1.0..=1.0),
            c: rng.random_range(-1.0..=1.0),
        })
        .collect();
    Ok(Some(FiniteNetwork::new(
        units,
        cfg.activation.into(),
        Arc::clone(rep),
    )?))
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

fn pairs(
    inputs: &[FeatureVec],
    elements: &[GroupElement],
) -> Vec<(usize, FeatureVec, GroupElement)> {
    inputs
        .iter()
        .enumerate()
        .flat_map(|(i, x)| elements.iter().map(move |g| (i, x.clone(), g.clone())))
        .collect()
}

/// Writes `approx` vs `target` rows and returns `(sup |approx - target|,
/// sup |target|)`.
fn comparison_rows(
    csv: &mut Csv,
    hash: &str,
    points: &[(usize, FeatureVec, GroupElement)],
    approx: &[f64],
    target: &[f64],
) -> Result<(f64, f64), CliError> {
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for ((i, _, g), (a, t)) in points.iter().zip(approx.iter().zip(target)) {
        let err = (a - t).abs();
        worst = worst.max(err);
        scale = scale.max(t.abs());
        csv.row(&[
            hash.to_string(),
            i.to_string(),
            g.to_string(),
            fmt(*a),
            fmt(*t),
            fmt(err),
        ])?;
    }
    Ok((worst, scale))
}

const COMPARISON_HEADER: &[&str] = &[
    "config_hash",
    "sample",
    "element",
    "approx",
    "target",
    "abs_error",
];

/// Computes every output of `cfg` on the current rayon pool.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let hash = cfg.hash();
    let rep = cfg.representation()?;
    let m = rep.subspace_dim();
    let mut summary = Summary {
        config_hash: hash.clone(),
        name: cfg.name.clone(),
        experiment: serde_json::to_value(cfg.experiment)?
            .as_str()
            .unwrap_or_default()
            .to_string(),
        seed: cfg.seed,
        threads: rayon::current_num_threads(),
        ..Summary::default()
    };
    let mut weights = None;
    let csv = match cfg.experiment {
        Experiment::Reconstruct => {
            let target = cfg.target_function(&rep)?.expect("validated");
            let pair = cfg.pair(m)?;
            let inputs = test_inputs(cfg, &rep)?;
            let points = pairs(&inputs, &rep.group().elements());
            let tests: Vec<_> = points
                .iter()
                .map(|(_, x, g)| (x.clone(), g.clone()))
                .collect();
            let rec = reconstruct(
                &target,
                &pair,
                &cfg.x_quadrature(m)?,
                &cfg.ab_grid(m)?,
                &tests,
            )?;
            let c = pair.product();
            let approx: Vec<f64> = rec.values.iter().map(|v| v / c).collect();
            let exact: Vec<f64> = rec.reference.iter().map(|v| v / c).collect();
            let mut csv = Csv::new(COMPARISON_HEADER)?;
            comparison_rows(&mut csv, &hash, &points, &approx, &exact)?;
            summary.product = Some(c);
            summary.c_norm = Some(pair.c_norm());
            summary.time_integral = Some(pair.time_integral());
            summary.sup_error = Some(rec.sup_error());
            summary.sup_rel_error = Some(rec.sup_rel_error());
            summary.rel_error = Some(rec.rel_error());
            csv.finish()?
        }
        Experiment::Export => {
            let target = cfg.target_function(&rep)?.expect("validated");
            let pair = cfg.pair(m)?;
            let grid = cfg.ab_grid(m)?;
            let gamma = ridgelet_transform(&target, &pair, &cfg.x_quadrature(m)?, &grid)?;
            let net = discretize(&gamma, &pair, &rep, grid.points())?;
            let inputs = test_inputs(cfg, &rep)?;
            let points = pairs(&inputs, &rep.group().elements());
            let approx = points
                .iter()
                .map(|(_, x, g)| Ok(net.eval(x, g)?))
                .collect::<Result<Vec<_>, CliError>>()?;
            let exact = points
                .iter()
                .map(|(_, x, g)| Ok(target.eval(x, g)?))
                .collect::<Result<Vec<_>, CliError>>()?;
            let mut csv = Csv::new(COMPARISON_HEADER)?;
            let (worst, scale) = comparison_rows(&mut csv, &hash, &points, &approx, &exact)?;
            let samples = gcnn_ridgelet::group::exhaustive_samples(&rep, &inputs);
            summary.network_defect = Some(gcnn_ridgelet::group::equivariance_defect(
                |x, g| net.eval(x, g),
                &rep,
                &samples,
            )?);
            summary.product = Some(pair.product());
            summary.c_norm = Some(pair.c_norm());
            summary.time_integral = Some(pair.time_integral());
            summary.sup_error = Some(worst);
            summary.sup_rel_error = Some(if scale > 0.0 { worst / scale } else { worst });
            summary.units = Some(net.len());
            weights = Some(Weights::from_network(cfg, &hash, &net, summary.c_norm));
            csv.finish()?
        }
        Experiment::Sweep => {
            let target = cfg.target_function(&rep)?.expect("validated");
            let pair = cfg.pair(m)?;
            let inputs = test_inputs(cfg, &rep)?;
            let sweep = universality_sweep(
                &target,
                &pair,
                &cfg.x_quadrature(m)?,
                &cfg.ab_radii(m)?,
                &cfg.n_list,
                cfg.sweep_mode()?,
                &inputs,
                &rep.group().elements(),
            )?;
            let mut csv = Csv::new(&["config_hash", "n", "units", "sup_error", "rel_error"])?;
            for r in &sweep.rows {
                csv.row(&[
                    hash.clone(),
                    r.n.to_string(),
                    r.units.to_string(),
                    fmt(r.sup_error),
                    fmt(r.rel_error),
                ])?;
            }
            let errs: Vec<f64> = sweep.rows.iter().map(|r| r.sup_error).collect();
            summary.strictly_decreasing = Some(errs.windows(2).all(|w| w[1] < w[0]));
            if errs.len() > 1 {
                let log_sum: f64 = errs.windows(2).map(|w| (w[1] / w[0]).ln()).sum();
                summary.geometric_mean_ratio = Some((log_sum / (errs.len() - 1) as f64).exp());
            }
            let last = sweep.rows.last().expect("n_list is non-empty");
            summary.sup_error = Some(last.sup_error);
            summary.sup_rel_error = Some(last.rel_error);
            summary.units = Some(last.units);
            summary.product = Some(pair.product());
            summary.c_norm = Some(pair.c_norm());
            summary.time_integral = Some(pair.time_integral());
            summary.sweep = Some(
                sweep
                    .rows
                    .iter()
                    .map(|r| SweepEntry {
                        n: r.n,
                        units: r.units,
                        sup_error: r.sup_error,
                        rel_error: r.rel_error,
                    })
                    .collect(),
            );
            weights = Some(Weights::from_network(
                cfg,
                &hash,
                &sweep.finest,
                summary.c_norm,
            ));
            csv.finish()?
        }
        Experiment::Equivariance => {
            let inputs = test_inputs(cfg, &rep)?;
            let net = random_network(cfg, &rep)?;
            let target = cfg.target_function(&rep)?;
            let mut csv = Csv::new(&[
                "config_hash",
                "subject",
                "sample",
                "g",
                "h",
                "lhs",
                "rhs",
                "abs_diff",
            ])?;
            let group = rep.group();
            let elements = group.elements();
            let mut check = |subject: &str,
                             f: &dyn Fn(&FeatureVec, &GroupElement) -> Result<f64, CliError>|
             -> Result<f64, CliError> {
                let mut worst = 0.0f64;
                for (i, x) in inputs.iter().enumerate() {
                    for g in &elements {
                        let tx = rep.act(g, x)?;
                        let gi = group.inverse(g)?;
                        for h in &elements {
                            let lhs = f(&tx, h)?;
                            let rhs = f(x, &group.compose(&gi, h)?)?;
                            let d = (lhs - rhs).abs();
                            worst = worst.max(d);
                            csv.row(&[
                                hash.clone(),
                                subject.to_string(),
                                i.to_string(),
                                g.to_string(),
                                h.to_string(),
                                fmt(lhs),
                                fmt(rhs),
                                fmt(d),
                            ])?;
                        }
                    }
                }
                Ok(worst)
            };
            if let Some(net) = &net {
                summary.network_defect = Some(check("network", &|x, g| Ok(net.eval(x, g)?))?);
            }
            if let Some(t) = &target {
                summary.target_defect = Some(check("target", &|x, g| Ok(t.eval(x, g)?))?);
            }
            if let Some(net) = &net {
                summary.units = Some(net.len());
                weights = Some(Weights::from_network(cfg, &hash, net, None));
            }
            csv.finish()?
        }
        Experiment::A3check => {
            let spec = cfg.a3.expect("validated");
            let sigma: Activation = cfg.activation.into();
            let r = a3_check(sigma, spec.order, spec.theta, spec.radius, spec.points)?;
            let mut csv = Csv::new(&[
                "config_hash",
                "activation",
                "order",
                "theta",
                "bounded",
                "sup",
                "lipschitz_est",
                "lipschitz_refined",
                "lipschitz",
            ])?;
            csv.row(&[
                hash.clone(),
                sigma.name(),
                spec.order.to_string(),
                fmt(spec.theta),
                r.bounded.to_string(),
                fmt(r.sup),
                fmt(r.lipschitz_est),
                fmt(r.lipschitz_refined),
                r.lipschitz.to_string(),
            ])?;
            summary.a3 = Some(A3Entry {
                bounded: r.bounded,
                sup: r.sup,
                lipschitz_est: r.lipschitz_est,
                lipschitz_refined: r.lipschitz_refined,
                lipschitz: r.lipschitz,
            });
            csv.finish()?
        }
    };
    summary.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(RunOutput {
        summary,
        csv,
        weights,
    })
}
