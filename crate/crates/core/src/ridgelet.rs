//! The ridgelet transform `R[f; rho]`, the network operator `S[gamma]`, their
//! composition, and the discretization into finite group-convolutional
//! networks.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::calculus::{Activation, ForwardDifference, RidgeletPair};
use crate::error::{invalid, Error, Result};
use crate::feature_space::FeatureVec;
use crate::group::{GroupElement, Representation};
use crate::quadrature::{BoxGrid, NodeSet, Quadrature};

/// Largest unit count `discretize` will produce.
pub const MAX_UNITS: usize = 10_000_000;

/// `|f_e|` on the faces of the x-box must stay below this fraction of its
/// maximum.
pub const BOUNDARY_DECAY: f64 = 1e-6;

type Evaluable = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// An equivariant target, fixed by its value `f_e(x) = f(x)(e)` and
/// extended by `f(x)(g) = f_e(T_{g^-1} x)`.
#[derive(Clone)]
pub struct TargetFunction {
    name: String,
    rep: Arc<Representation>,
    f_e: Arc<Evaluable>,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("name", &self.name)
            .field("dim", &self.rep.dim())
            .finish()
    }
}

impl TargetFunction {
    /// `f_e` receives raw coordinates of the full representation space.
    pub fn new<F>(name: impl Into<String>, rep: Arc<Representation>, f_e: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            rep,
            f_e: Arc::new(f_e),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn representation(&self) -> &Arc<Representation> {
        &self.rep
    }

    #[inline]
    pub fn eval_e(&self, x: &[f64]) -> f64 {
        (self.f_e)(x)
    }

    pub fn eval(&self, x: &FeatureVec, g: &GroupElement) -> Result<f64> {
        let gi = self.rep.group().inverse(g)?;
        let mut y = vec![0.0; self.rep.dim()];
        self.rep.act_into(&gi, x.coords(), &mut y)?;
        Ok(self.eval_e(&y))
    }

    /// `alpha f + beta g` for targets on the same representation.
    pub fn combine(&self, alpha: f64, other: &TargetFunction, beta: f64) -> TargetFunction {
        let (f, g) = (Arc::clone(&self.f_e), Arc::clone(&other.f_e));
        TargetFunction {
            name: format!("{alpha}*{}+{beta}*{}", self.name, other.name),
            rep: Arc::clone(&self.rep),
            f_e: Arc::new(move |x| alpha * f(x) + beta * g(x)),
        }
    }
}

/// A parameter distribution `gamma(a, b)` tabulated on the nodes of an
/// `(a, b)` grid; `a` in orthonormal coordinates of the integration
/// subspace, `b` on the last axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamDistribution {
    grid: BoxGrid,
    values: Vec<Complex64>,
}

impl ParamDistribution {
    pub fn new(grid: BoxGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!(
                "distribution has {} values for {} nodes",
                values.len(),
                grid.len()
            ));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::Numeric(format!(
                "distribution is not finite at node {:?}",
                grid.node(i)
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: BoxGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(
            grid,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    fn check_real(&self) -> Result<()> {
        if self.is_real() {
            Ok(())
        } else {
            invalid("distribution is complex; use the complex synthesis")
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * alpha).collect(),
        }
    }
}

/// One hidden unit `c * sigma((a * x)(g) - b)`, `a` in raw coordinates of the
/// full representation space.
#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub a: Vec<f64>,
    pub b: f64,
    pub c: f64,
}

/// Raw filter coordinates of an `(a, b)` node.
fn node_filter(rep: &Representation, node: &[f64]) -> Vec<f64> {
    let sub = rep.subspace();
    let mut raw = vec![0.0; sub.dim()];
    sub.orthonormal_to_raw_into(&node[..sub.dim()], &mut raw);
    rep.embed(&raw)
}

/// `sum_i c_i sigma(<y, a_i> - b_i)` where `y = T_{g^-1} x`. The single
/// synthesis path behind both `apply_s` and `eval_network`.
#[inline]
fn synthesize(units: &[Unit], sigma: &Activation, rep: &Representation, y: &[f64]) -> f64 {
    let space = rep.space();
    let mut acc = 0.0;
    for u in units {
        acc += u.c * sigma.eval(space.inner_raw(y, &u.a) - u.b);
    }
    acc
}

fn inverse_translate(rep: &Representation, x: &FeatureVec, g: &GroupElement) -> Result<Vec<f64>> {
    if x.dim() != rep.dim() {
        return invalid(format!(
            "input has dimension {}, representation acts on {}",
            x.dim(),
            rep.dim()
        ));
    }
    let gi = rep.group().inverse(g)?;
    let mut y = vec![0.0; rep.dim()];
    rep.act_into(&gi, x.coords(), &mut y)?;
    Ok(y)
}

/// A finite network `f_n(x)(g) = sum_i c_i sigma((a_i * x)(g) - b_i)`.
#[derive(Debug, Clone)]
pub struct FiniteNetwork {
    units: Vec<Unit>,
    sigma: Activation,
    rep: Arc<Representation>,
}

impl FiniteNetwork {
    pub fn new(units: Vec<Unit>, sigma: Activation, rep: Arc<Representation>) -> Result<Self> {
        if units.is_empty() {
            return invalid("a network needs at least one unit");
        }
        if let Some(u) = units.iter().find(|u| u.a.len() != rep.dim()) {
            return invalid(format!(
                "filter of length {} does not match dimension {}",
                u.a.len(),
                rep.dim()
            ));
        }
        Ok(Self { units, sigma, rep })
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn sigma(&self) -> &Activation {
        &self.sigma
    }

    pub fn representation(&self) -> &Arc<Representation> {
        &self.rep
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn eval(&self, x: &FeatureVec, g: &GroupElement) -> Result<f64> {
        let y = inverse_translate(&self.rep, x, g)?;
        Ok(synthesize(&self.units, &self.sigma, &self.rep, &y))
    }
}

pub fn eval_network(net: &FiniteNetwork, x: &FeatureVec, g: &GroupElement) -> Result<f64> {
    net.eval(x, g)
}

/// Checks that `f_e` has decayed on the faces of the x-box.
fn check_boundary_decay(target: &TargetFunction, x_quad: &Quadrature) -> Result<()> {
    let rep = target.representation();
    let sub = rep.subspace();
    let radii = x_quad.radii();
    let d = radii.len();
    const FACE: usize = 5;
    let ticks = |r: f64| (0..FACE).map(move |i| -r + 2.0 * r * i as f64 / (FACE - 1) as f64);
    let eval = |c: &[f64]| {
        let mut raw = vec![0.0; d];
        sub.orthonormal_to_raw_into(c, &mut raw);
        target.eval_e(&rep.embed(&raw)).abs()
    };
    let mut edge = 0.0f64;
    let face_points = FACE.pow(d.saturating_sub(1) as u32);
    let mut c = vec![0.0; d];
    for axis in 0..d {
        for side in [-1.0, 1.0] {
            for k in 0..face_points {
                let mut rest = k;
                for (j, cj) in c.iter_mut().enumerate() {
                    if j == axis {
                        *cj = side * radii[j];
                    } else {
                        *cj = ticks(radii[j]).nth(rest % FACE).unwrap_or(0.0);
                        rest /= FACE;
                    }
                }
                edge = edge.max(eval(&c));
            }
        }
    }
    let nodes = x_quad.as_nodes();
    let mut peak = eval(&vec![0.0; d]);
    let mut buf = vec![0.0; d];
    for i in 0..nodes.len() {
        nodes.node_into(i, &mut buf);
        peak = peak.max(eval(&buf));
    }
    if peak > 0.0 && edge > BOUNDARY_DECAY * peak {
        return Err(Error::Precondition(format!(
            "target '{}' has not decayed on the x-box boundary (|f_e| = {edge:e} vs max {peak:e}); \
             widen the box or multiply the target by a cutoff",
            target.name()
        )));
    }
    Ok(())
}

/// `R[f; rho](a, b) = int f_e(x) rho(<x, a> - b) dx` on every node of
/// `ab_grid`, with the x-integral over `x_quad`. Both grids live in
/// orthonormal coordinates of the integration subspace, where `<x, a>` is
/// the Euclidean dot product.
pub fn ridgelet_transform(
    target: &TargetFunction,
    pair: &RidgeletPair,
    x_quad: &Quadrature,
    ab_grid: &BoxGrid,
) -> Result<ParamDistribution> {
    let rep = target.representation();
    let m = rep.subspace_dim();
    if pair.m() != m {
        return invalid(format!(
            "ridgelet pair built for dimension {}, subspace has dimension {m}",
            pair.m()
        ));
    }
    if x_quad.radii().len() != m || ab_grid.radii().len() != m + 1 {
        return invalid(format!(
            "grids must have dimensions {m} (x) and {} (a, b)",
            m + 1
        ));
    }
    check_boundary_decay(target, x_quad)?;

    let nodes = x_quad.as_nodes();
    let sub = rep.subspace();
    let mut xs: Vec<f64> = Vec::with_capacity(nodes.len() * m);
    let mut fs: Vec<f64> = Vec::with_capacity(nodes.len());
    let mut c = vec![0.0; m];
    let mut raw = vec![0.0; m];
    for i in 0..nodes.len() {
        nodes.node_into(i, &mut c);
        sub.orthonormal_to_raw_into(&c, &mut raw);
        let v = target.eval_e(&rep.embed(&raw));
        if !v.is_finite() {
            return Err(Error::Numeric(format!("target is {v} at x = {raw:?}")));
        }
        if v != 0.0 {
            xs.extend_from_slice(&c);
            fs.push(v);
        }
    }
    let wx = nodes.weight();
    let rho = pair.rho();
    let p = ab_grid.points();
    let bs: Vec<f64> = (0..p).map(|k| ab_grid.axis_node(m, k)).collect();
    let a_count = p.pow(m as u32);

    let values: Vec<f64> = (0..a_count)
        .into_par_iter()
        .flat_map_iter(|ai| {
            let mut node = vec![0.0; m + 1];
            ab_grid.node_into(ai * p, &mut node);
            let a = &node[..m];
            let t: Vec<f64> = xs
                .chunks_exact(m)
                .map(|x| x.iter().zip(a).map(|(u, v)| u * v).sum())
                .collect();
            let out: Vec<f64> = bs
                .iter()
                .map(|&b| {
                    let mut acc = 0.0;
                    for (tj, fj) in t.iter().zip(&fs) {
                        acc += fj * rho.eval(tj - b);
                    }
                    acc * wx
                })
                .collect();
            out.into_iter()
        })
        .collect();
    ParamDistribution::from_real(ab_grid.clone(), values)
}

/// Units `(a, b, gamma(a, b) * w)` for every node, so that the midpoint
/// rule for `S[gamma]` is a finite network.
fn atoms(gamma: &ParamDistribution, rep: &Representation, scale: f64) -> Result<Vec<Unit>> {
    gamma.check_real()?;
    let grid = gamma.grid();
    let m = rep.subspace_dim();
    if grid.radii().len() != m + 1 {
        return invalid(format!(
            "distribution grid has dimension {}, expected {}",
            grid.radii().len(),
            m + 1
        ));
    }
    let w = grid.weight() * scale;
    let mut node = vec![0.0; m + 1];
    Ok(gamma
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            grid.node_into(i, &mut node);
            Unit {
                a: node_filter(rep, &node),
                b: node[m],
                c: v.re * w,
            }
        })
        .collect())
}

/// `S[gamma](x)(g) = int gamma(a, b) sigma((a * x)(g) - b) da db` by the
/// midpoint rule on the distribution's grid. Requires a real `gamma`.
pub fn apply_s(
    gamma: &ParamDistribution,
    sigma: &Activation,
    rep: &Representation,
    x: &FeatureVec,
    g: &GroupElement,
) -> Result<f64> {
    let units = atoms(gamma, rep, 1.0)?;
    let y = inverse_translate(rep, x, g)?;
    Ok(synthesize(&units, sigma, rep, &y))
}

/// `S[gamma]` for a possibly complex distribution.
pub fn apply_s_complex(
    gamma: &ParamDistribution,
    sigma: &Activation,
    rep: &Representation,
    x: &FeatureVec,
    g: &GroupElement,
) -> Result<Complex64> {
    let grid = gamma.grid();
    let m = rep.subspace_dim();
    let y = inverse_translate(rep, x, g)?;
    let space = rep.space();
    let mut node = vec![0.0; m + 1];
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, v) in gamma.values().iter().enumerate() {
        grid.node_into(i, &mut node);
        let a = node_filter(rep, &node);
        acc += v * sigma.eval(space.inner_raw(&y, &a) - node[m]);
    }
    Ok(acc * grid.weight())
}

/// `S[gamma]` evaluated at many `(x, g)` pairs, sharing the atom table.
pub fn apply_s_batch(
    gamma: &ParamDistribution,
    sigma: &Activation,
    rep: &Representation,
    points: &[(FeatureVec, GroupElement)],
) -> Result<Vec<f64>> {
    let units = atoms(gamma, rep, 1.0)?;
    points
        .par_iter()
        .map(|(x, g)| {
            let y = inverse_translate(rep, x, g)?;
            Ok(synthesize(&units, sigma, rep, &y))
        })
        .collect()
}

/// Output of `reconstruct`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    /// `S[R[f; rho]](x)(g)`.
    pub values: Vec<f64>,
    /// `<<sigma, rho>> f(x)(g)`.
    pub reference: Vec<f64>,
    pub product: f64,
}

impl Reconstruction {
    pub fn sup_abs_error(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.reference)
            .map(|(v, r)| (v - r).abs())
            .fold(0.0, f64::max)
    }

    /// `sup |S R f - C f| / |C|`, the error in units of `f`.
    pub fn sup_error(&self) -> f64 {
        self.sup_abs_error() / self.product.abs()
    }

    /// `max |S R f / (C f) - 1|`; `None` if some reference value vanishes.
    pub fn pointwise_rel_error(&self) -> Option<f64> {
        if self.reference.contains(&0.0) {
            return None;
        }
        Some(
            self.values
                .iter()
                .zip(&self.reference)
                .map(|(v, r)| (v / r - 1.0).abs())
                .fold(0.0, f64::max),
        )
    }

    /// `sup |S R f - C f| / sup |C f|`.
    pub fn sup_rel_error(&self) -> f64 {
        let scale = self.reference.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        if scale == 0.0 {
            self.sup_abs_error()
        } else {
            self.sup_abs_error() / scale
        }
    }

    /// Pointwise relative error for sign-definite references, sup-norm
    /// relative error otherwise; the absolute error for a zero reference.
    pub fn rel_error(&self) -> f64 {
        let positive = self.reference.iter().all(|r| *r > 0.0);
        let negative = self.reference.iter().all(|r| *r < 0.0);
        match self.pointwise_rel_error() {
            Some(e) if positive || negative => e,
            _ => self.sup_rel_error(),
        }
    }
}

/// `S[R[f; rho]]` against `<<sigma, rho>> f` on a test set.
pub fn reconstruct(
    target: &TargetFunction,
    pair: &RidgeletPair,
    x_quad: &Quadrature,
    ab_grid: &BoxGrid,
    tests: &[(FeatureVec, GroupElement)],
) -> Result<Reconstruction> {
    let gamma = ridgelet_transform(target, pair, x_quad, ab_grid)?;
    let values = apply_s_batch(&gamma, pair.sigma(), target.representation(), tests)?;
    let reference = tests
        .iter()
        .map(|(x, g)| Ok(pair.product() * target.eval(x, g)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Reconstruction {
        values,
        reference,
        product: pair.product(),
    })
}

/// Finite network from a distribution on an `n^{m+1}` partition of its
/// box. If the distribution's grid has `n` points per axis the units sit at
/// its nodes with `c = gamma * vol / <<sigma, rho>>`; if it has a multiple
/// of `n` the coefficient is the mass of the coarse cell.
pub fn discretize(
    gamma: &ParamDistribution,
    pair: &RidgeletPair,
    rep: &Arc<Representation>,
    n_per_axis: usize,
) -> Result<FiniteNetwork> {
    if n_per_axis == 0 {
        return invalid("n_per_axis must be at least 1");
    }
    let grid = gamma.grid();
    let dim = grid.radii().len();
    let units_total = (n_per_axis as u64).checked_pow(dim as u32);
    if units_total.is_none_or(|u| u > MAX_UNITS as u64) {
        return Err(Error::ResourceLimit(format!(
            "{n_per_axis}^{dim} units exceeds the limit of {MAX_UNITS}"
        )));
    }
    if !grid.points().is_multiple_of(n_per_axis) {
        return invalid(format!(
            "distribution has {} points per axis, not a multiple of {n_per_axis}",
            grid.points()
        ));
    }
    gamma.check_real()?;
    let scale = 1.0 / pair.product();
    if grid.points() == n_per_axis {
        let units = atoms(gamma, rep, scale)?;
        return FiniteNetwork::new(units, *pair.sigma(), Arc::clone(rep));
    }
    let coarse = BoxGrid::new(grid.radii().to_vec(), n_per_axis)?;
    let ratio = grid.points() / n_per_axis;
    let mut mass = vec![0.0; coarse.len()];
    for (i, v) in gamma.values().iter().enumerate() {
        let idx = grid.multi_index(i);
        let ci = idx
            .iter()
            .fold(0usize, |acc, k| acc * n_per_axis + k / ratio);
        mass[ci] += v.re;
    }
    let w = grid.weight() * scale;
    let m = dim - 1;
    let mut node = vec![0.0; dim];
    let units = mass
        .iter()
        .enumerate()
        .map(|(i, s)| {
            coarse.node_into(i, &mut node);
            Unit {
                a: node_filter(rep, &node),
                b: node[m],
                c: s * w,
            }
        })
        .collect();
    FiniteNetwork::new(units, *pair.sigma(), Arc::clone(rep))
}

/// One row of a universality sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub units: usize,
    /// `sup |f - f_n|` over the sample set.
    pub sup_error: f64,
    /// `sup_error / sup |f|`.
    pub rel_error: f64,
}

/// How a sweep turns the ridgelet transform into `n^{m+1}` units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Units at the cell centers with `c = R f(center) * vol / <<sigma, rho>>`.
    Sample,
    /// Units at the cell centers carrying the cell mass of `R f`, tabulated
    /// once on a grid with `base_points` per axis (a multiple of every `n`).
    CellMass { base_points: usize },
}

/// Rows of a sweep and the network for its largest `n`.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub finest: FiniteNetwork,
}

/// For each `n` builds a network on an `n^{m+1}` partition of the `(a, b)`
/// box and measures `sup |f - f_n|` over the inputs and elements.
#[allow(clippy::too_many_arguments)]
pub fn universality_sweep(
    target: &TargetFunction,
    pair: &RidgeletPair,
    x_quad: &Quadrature,
    ab_radii: &[f64],
    n_list: &[usize],
    mode: SweepMode,
    inputs: &[FeatureVec],
    elements: &[GroupElement],
) -> Result<Sweep> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("n_list must be non-empty and strictly increasing");
    }
    let rep = target.representation();
    let points: Vec<(FeatureVec, GroupElement)> = inputs
        .iter()
        .flat_map(|x| elements.iter().map(move |g| (x.clone(), g.clone())))
        .collect();
    let reference = points
        .iter()
        .map(|(x, g)| target.eval(x, g))
        .collect::<Result<Vec<_>>>()?;
    let scale = reference.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    let base = match mode {
        SweepMode::Sample => None,
        SweepMode::CellMass { base_points } => {
            if let Some(n) = n_list.iter().find(|&&n| base_points % n != 0) {
                return invalid(format!(
                    "base grid {base_points} is not a multiple of n = {n}"
                ));
            }
            let grid = BoxGrid::new(ab_radii.to_vec(), base_points)?;
            Some(ridgelet_transform(target, pair, x_quad, &grid)?)
        }
    };
    let mut rows = Vec::with_capacity(n_list.len());
    let mut finest = None;
    for &n in n_list {
        let net = match &base {
            Some(gamma) => discretize(gamma, pair, rep, n)?,
            None => {
                let grid = BoxGrid::new(ab_radii.to_vec(), n)?;
                let gamma = ridgelet_transform(target, pair, x_quad, &grid)?;
                discretize(&gamma, pair, rep, n)?
            }
        };
        let approx = points
            .par_iter()
            .map(|(x, g)| net.eval(x, g))
            .collect::<Result<Vec<_>>>()?;
        let sup_error = approx
            .iter()
            .zip(&reference)
            .map(|(a, r)| (a - r).abs())
            .fold(0.0, f64::max);
        rows.push(SweepRow {
            n,
            units: net.len(),
            sup_error,
            rel_error: if scale > 0.0 {
                sup_error / scale
            } else {
                sup_error
            },
        });
        finest = Some(net);
    }
    Ok(Sweep {
        rows,
        finest: finest.expect("n_list is non-empty"),
    })
}

/// A network whose units use `Delta_theta^k [sigma]` in place of `sigma`.
#[derive(Debug, Clone)]
pub struct DifferenceNetwork {
    pub net: FiniteNetwork,
    pub k: usize,
    pub theta: f64,
}

impl DifferenceNetwork {
    pub fn eval(&self, x: &FeatureVec, g: &GroupElement) -> Result<f64> {
        let rep = self.net.representation();
        let y = inverse_translate(rep, x, g)?;
        let d = ForwardDifference {
            sigma: *self.net.sigma(),
            n: self.k,
            theta: self.theta,
        };
        let space = rep.space();
        Ok(self
            .net
            .units()
            .iter()
            .map(|u| u.c * d.eval(space.inner_raw(&y, &u.a) - u.b))
            .sum())
    }
}

/// Rewrites a difference network as a plain one with `k + 1` units per
/// unit: `Delta^k s(t - b) = sum_j (-1)^{k-j} C(k, j) s(t - (b - j theta))`.
pub fn reduce_difference_model(model: &DifferenceNetwork) -> Result<FiniteNetwork> {
    if !(model.theta.is_finite() && model.theta > 0.0) {
        return invalid("difference step must be positive");
    }
    let d = ForwardDifference {
        sigma: *model.net.sigma(),
        n: model.k,
        theta: model.theta,
    };
    let expansion = d.expansion();
    let units = model
        .net
        .units()
        .iter()
        .flat_map(|u| {
            expansion.iter().map(move |(coeff, shift)| Unit {
                a: u.a.clone(),
                b: u.b - shift,
                c: u.c * coeff,
            })
        })
        .collect();
    FiniteNetwork::new(
        units,
        *model.net.sigma(),
        Arc::clone(model.net.representation()),
    )
}
