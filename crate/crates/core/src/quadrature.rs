//! Tensor-product midpoint grids and seeded Monte Carlo point clouds, with a
//! deterministic parallel reduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Largest node count any grid may have.
pub const MAX_NODES: u64 = 100_000_000;

/// Nodes per reduction block. Fixed so that the summation tree does not
/// depend on the thread count.
const BLOCK: usize = 4096;

/// Sum with a fixed binary tree; error grows like `log n` rather than `n`.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        let mut s = 0.0;
        for x in v {
            s += x;
        }
        return s;
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// A finite set of weighted nodes in orthonormal coordinates.
pub trait NodeSet: Sync {
    fn dim(&self) -> usize;
    fn len(&self) -> usize;
    fn weight(&self) -> f64;
    fn node_into(&self, index: usize, out: &mut [f64]);

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn node(&self, index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.node_into(index, &mut out);
        out
    }
}

/// Midpoint grid on `prod [-r_i, r_i]` with `points` cells per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxGrid {
    radii: Vec<f64>,
    points: usize,
}

impl BoxGrid {
    pub fn new(radii: Vec<f64>, points: usize) -> Result<Self> {
        if radii.is_empty() {
            return invalid("grid needs at least one axis");
        }
        if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return invalid(format!("grid radius {r} must be positive"));
        }
        if points == 0 {
            return invalid("grid needs at least one point per axis");
        }
        let count = (points as u64).checked_pow(radii.len() as u32);
        match count {
            Some(c) if c <= MAX_NODES => {}
            _ => {
                return Err(Error::ResourceLimit(format!(
                    "{points}^{} nodes exceeds the limit of {MAX_NODES}",
                    radii.len()
                )))
            }
        }
        Ok(Self { radii, points })
    }

    pub fn cube(dim: usize, radius: f64, points: usize) -> Result<Self> {
        Self::new(vec![radius; dim], points)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self, axis: usize) -> f64 {
        2.0 * self.radii[axis] / self.points as f64
    }

    /// Cell center `i` along `axis`.
    #[inline]
    pub fn axis_node(&self, axis: usize, i: usize) -> f64 {
        -self.radii[axis] + (i as f64 + 0.5) * self.step(axis)
    }

    /// Multi-index of a node; the last axis varies fastest.
    pub fn multi_index(&self, mut index: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for slot in idx.iter_mut().rev() {
            *slot = index % self.points;
            index /= self.points;
        }
        idx
    }

    pub fn volume(&self) -> f64 {
        self.radii.iter().map(|r| 2.0 * r).product()
    }

    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor < 2 {
            return invalid(format!("refinement factor {factor} must be at least 2"));
        }
        let points = self
            .points
            .checked_mul(factor)
            .ok_or_else(|| Error::ResourceLimit("points per axis overflow".into()))?;
        Self::new(self.radii.clone(), points)
    }
}

impl NodeSet for BoxGrid {
    fn dim(&self) -> usize {
        self.radii.len()
    }

    fn len(&self) -> usize {
        self.points.pow(self.radii.len() as u32)
    }

    fn weight(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    #[inline]
    fn node_into(&self, mut index: usize, out: &mut [f64]) {
        for axis in (0..self.radii.len()).rev() {
            out[axis] = self.axis_node(axis, index % self.points);
            index /= self.points;
        }
    }
}

/// Uniform random nodes in a box, drawn once from a seeded generator.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    radii: Vec<f64>,
    coords: Vec<f64>,
    seed: u64,
}

impl PointCloud {
    pub fn new(radii: Vec<f64>, samples: usize, seed: u64) -> Result<Self> {
        if radii.is_empty() || samples == 0 {
            return invalid("point cloud needs a dimension and at least one sample");
        }
        if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return invalid(format!("box radius {r} must be positive"));
        }
        if (samples as u64).saturating_mul(radii.len() as u64) > MAX_NODES {
            return Err(Error::ResourceLimit(format!(
                "{samples} samples exceeds the node limit"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coords = Vec::with_capacity(samples * radii.len());
        for _ in 0..samples {
            for r in &radii {
                coords.push(rng.random_range(-r..*r));
            }
        }
        Ok(Self {
            radii,
            coords,
            seed,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

impl NodeSet for PointCloud {
    fn dim(&self) -> usize {
        self.radii.len()
    }

    fn len(&self) -> usize {
        self.coords.len() / self.radii.len()
    }

    fn weight(&self) -> f64 {
        self.radii.iter().map(|r| 2.0 * r).product::<f64>() / self.len() as f64
    }

    fn node_into(&self, index: usize, out: &mut [f64]) {
        let d = self.radii.len();
        out.copy_from_slice(&self.coords[index * d..(index + 1) * d]);
    }
}

/// Integration nodes for the feature-space integral.
#[derive(Debug, Clone, PartialEq)]
pub enum Quadrature {
    Midpoint(BoxGrid),
    MonteCarlo(PointCloud),
}

impl Quadrature {
    pub fn radii(&self) -> &[f64] {
        match self {
            Quadrature::Midpoint(g) => g.radii(),
            Quadrature::MonteCarlo(c) => c.radii(),
        }
    }

    pub fn as_nodes(&self) -> &dyn NodeSet {
        match self {
            Quadrature::Midpoint(g) => g,
            Quadrature::MonteCarlo(c) => c,
        }
    }
}

/// Evaluates `f` at every node (in parallel) and reduces block sums with a
/// fixed tree, so the result is independent of the thread count.
/// Non-finite values abort with the offending node.
pub fn integrate<N, F>(nodes: &N, f: F) -> Result<f64>
where
    N: NodeSet + ?Sized,
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = nodes.len();
    let blocks = n.div_ceil(BLOCK);
    let sums: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map_init(
            || (vec![0.0; nodes.dim()], Vec::with_capacity(BLOCK)),
            |(x, vals), b| -> Result<f64> {
                vals.clear();
                for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                    nodes.node_into(i, x);
                    let v = f(x);
                    if !v.is_finite() {
                        return Err(Error::Numeric(format!("integrand is {v} at node {x:?}")));
                    }
                    vals.push(v);
                }
                Ok(pairwise_sum(vals))
            },
        )
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&sums) * nodes.weight())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn volume_and_odd_symmetry() {
        let g = BoxGrid::cube(2, 1.0, 10).unwrap();
        assert!((integrate(&g, |_| 1.0).unwrap() - 4.0).abs() < 1e-14);
        assert!(integrate(&g, |x| x[0]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn gaussian_integral() {
        let g = BoxGrid::cube(2, 8.0, 256).unwrap();
        let v = integrate(&g, |x| (-0.5 * (x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        assert!((v - TAU).abs() < 1e-6);
    }

    #[test]
    fn affine_integrands_are_exact() {
        let g = BoxGrid::new(vec![1.5, 0.5, 2.0], 7).unwrap();
        let v = integrate(&g, |x| 3.0 - 2.0 * x[0] + 0.7 * x[1] - 1.1 * x[2]).unwrap();
        assert!((v - 3.0 * g.volume()).abs() < 1e-12);
    }

    #[test]
    fn cell_aligned_cube_measure() {
        // [-0.5, 0.5] x [-0.25, 0.75] in a box of radius 1 with 40 cells
        let g = BoxGrid::cube(2, 1.0, 40).unwrap();
        let inside = |x: &[f64]| {
            if x[0].abs() < 0.5 && x[1] > -0.25 && x[1] < 0.75 {
                1.0
            } else {
                0.0
            }
        };
        assert!((integrate(&g, inside).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn refine_composes() {
        let g = BoxGrid::cube(2, 3.0, 10).unwrap();
        assert_eq!(g.refine(2).unwrap().points(), 20);
        let twice = g.refine(2).unwrap().refine(2).unwrap();
        let once = g.refine(4).unwrap();
        assert_eq!(twice, once);
        for i in (0..once.len()).step_by(97) {
            assert_eq!(twice.node(i), once.node(i));
        }
        assert!(g.refine(1).is_err());
    }

    #[test]
    fn node_limit() {
        assert!(matches!(
            BoxGrid::cube(4, 1.0, 101),
            Err(Error::ResourceLimit(_))
        ));
        let g = BoxGrid::cube(2, 1.0, 10_000).unwrap();
        assert!(matches!(g.refine(2), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn refinement_error_decays() {
        // integrand whose box boundary terms are visible
        let f = |x: &[f64]| (-(x[0] - 0.3).powi(2)).exp() * (1.0 + x[1] * x[1]);
        let mut g = BoxGrid::cube(2, 1.0, 4).unwrap();
        let mut prev = integrate(&g, f).unwrap();
        let mut prev_change = f64::INFINITY;
        for _ in 0..4 {
            g = g.refine(2).unwrap();
            let v = integrate(&g, f).unwrap();
            let change = (v - prev).abs();
            assert!(change < prev_change / 2.0);
            prev_change = change;
            prev = v;
        }
    }

    #[test]
    fn gaussian_error_is_monotone_under_refinement() {
        let exact = {
            // int_{-2}^{2} e^{-x^2} dx = sqrt(pi) erf(2)
            let erf2 = 0.995_322_265_018_952_7;
            std::f64::consts::PI.sqrt() * erf2
        };
        let mut g = BoxGrid::cube(1, 2.0, 3).unwrap();
        let mut last = f64::INFINITY;
        for _ in 0..6 {
            let e = (integrate(&g, |x| (-x[0] * x[0]).exp()).unwrap() - exact).abs();
            assert!(e < last);
            last = e;
            g = g.refine(2).unwrap();
        }
    }

    #[test]
    fn non_finite_reports_node() {
        let g = BoxGrid::cube(1, 1.0, 4).unwrap();
        let err = integrate(&g, |x| if x[0] > 0.5 { f64::NAN } else { 0.0 }).unwrap_err();
        assert!(matches!(err, Error::Numeric(ref m) if m.contains("0.75")));
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let g = BoxGrid::cube(3, 2.0, 40).unwrap();
        let f = |x: &[f64]| (x[0] * 1.3 + x[1] * x[2]).sin() + 1e-3 * x[0];
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| integrate(&g, f).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| integrate(&g, f).unwrap());
        assert_eq!(one.to_bits(), many.to_bits());
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let a = PointCloud::new(vec![1.0; 4], 20_000, 7).unwrap();
        let b = PointCloud::new(vec![1.0; 4], 20_000, 7).unwrap();
        assert_eq!(a, b);
        let v = integrate(&a, |x| x.iter().map(|t| t * t).sum::<f64>()).unwrap();
        // exact: 16 * 4/3
        assert!((v - 64.0 / 3.0).abs() < 0.5);
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 45.0);
    }
}
