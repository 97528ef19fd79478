//! Finite groups, the band-limited torus, their representations on feature
//! spaces, and the group convolution `(a * x)(g) = <T_{g^-1} x, a>`.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::feature_space::{FeatureSpace, FeatureVec};

/// Upper bound on the size of a permutation group enumerated by closure.
pub const MAX_CLOSURE_ELEMENTS: usize = 10_000;

/// Default number of sample angles used for the torus.
pub const DEFAULT_TORUS_ANGLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Cyclic(usize),
    Pair(usize, usize),
    /// Permutation in one-line notation: `i -> p[i]`.
    Perm(Vec<usize>),
    /// Angle in `[0, 2pi)`.
    Angle(f64),
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Cyclic(i) => write!(f, "{i}"),
            GroupElement::Pair(i, j) => write!(f, "({i};{j})"),
            GroupElement::Perm(p) => {
                write!(f, "[")?;
                for (k, v) in p.iter().enumerate() {
                    if k > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            GroupElement::Angle(a) => write!(f, "{a:.12}"),
        }
    }
}

fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Group {
    Cyclic {
        m: usize,
    },
    ProductCyclic {
        m1: usize,
        m2: usize,
    },
    /// A subgroup of the symmetric group on `n` letters, stored sorted so the
    /// identity comes first.
    Symmetric {
        n: usize,
        elements: Vec<Vec<usize>>,
    },
    /// The circle group; `angles` is the size of the evaluation grid.
    Torus {
        band: usize,
        angles: usize,
    },
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &v in p {
        if v >= p.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

fn compose_perm(g: &[usize], h: &[usize]) -> Vec<usize> {
    h.iter().map(|&i| g[i]).collect()
}

fn invert_perm(g: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; g.len()];
    for (i, &gi) in g.iter().enumerate() {
        inv[gi] = i;
    }
    inv
}

impl Group {
    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 {
            return invalid("cyclic group order must be positive");
        }
        Ok(Group::Cyclic { m })
    }

    pub fn product_cyclic(m1: usize, m2: usize) -> Result<Self> {
        if m1 == 0 || m2 == 0 {
            return invalid("product cyclic factors must be positive");
        }
        Ok(Group::ProductCyclic { m1, m2 })
    }

    /// Subgroup of `S_n` generated by `generators`, enumerated by closure.
    pub fn symmetric(n: usize, generators: &[Vec<usize>]) -> Result<Self> {
        if n == 0 {
            return invalid("symmetric group needs at least one letter");
        }
        for g in generators {
            if g.len() != n || !is_permutation(g) {
                return invalid(format!("{g:?} is not a permutation of {n} letters"));
            }
        }
        let identity: Vec<usize> = (0..n).collect();
        let mut seen = BTreeSet::new();
        seen.insert(identity.clone());
        let mut queue = VecDeque::from([identity]);
        while let Some(p) = queue.pop_front() {
            for g in generators {
                let q = compose_perm(g, &p);
                if seen.insert(q.clone()) {
                    if seen.len() > MAX_CLOSURE_ELEMENTS {
                        return Err(Error::ResourceLimit(format!(
                            "permutation group exceeds {MAX_CLOSURE_ELEMENTS} elements"
                        )));
                    }
                    queue.push_back(q);
                }
            }
        }
        Ok(Group::Symmetric {
            n,
            elements: seen.into_iter().collect(),
        })
    }

    /// The full symmetric group, generated by a transposition and a cycle.
    pub fn full_symmetric(n: usize) -> Result<Self> {
        if n < 2 {
            return Self::symmetric(n, &[]);
        }
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::symmetric(n, &[swap, cycle])
    }

    pub fn torus(band: usize, angles: usize) -> Result<Self> {
        if band == 0 || angles == 0 {
            return invalid("torus band and angle count must be positive");
        }
        Ok(Group::Torus { band, angles })
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            Group::Cyclic { .. } => GroupElement::Cyclic(0),
            Group::ProductCyclic { .. } => GroupElement::Pair(0, 0),
            Group::Symmetric { n, .. } => GroupElement::Perm((0..*n).collect()),
            Group::Torus { .. } => GroupElement::Angle(0.0),
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Group::Torus { .. })
    }

    /// Number of elements; for the torus, the size of the angle grid.
    pub fn order(&self) -> usize {
        match self {
            Group::Cyclic { m } => *m,
            Group::ProductCyclic { m1, m2 } => m1 * m2,
            Group::Symmetric { elements, .. } => elements.len(),
            Group::Torus { angles, .. } => *angles,
        }
    }

    /// All elements, or the evaluation angle grid `2 pi k / L` for the torus.
    pub fn elements(&self) -> Vec<GroupElement> {
        match self {
            Group::Cyclic { m } => (0..*m).map(GroupElement::Cyclic).collect(),
            Group::ProductCyclic { m1, m2 } => (0..*m1)
                .flat_map(|i| (0..*m2).map(move |j| GroupElement::Pair(i, j)))
                .collect(),
            Group::Symmetric { elements, .. } => {
                elements.iter().cloned().map(GroupElement::Perm).collect()
            }
            Group::Torus { angles, .. } => (0..*angles)
                .map(|k| GroupElement::Angle(TAU * k as f64 / *angles as f64))
                .collect(),
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (Group::Cyclic { m }, GroupElement::Cyclic(i)) => i < m,
            (Group::ProductCyclic { m1, m2 }, GroupElement::Pair(i, j)) => i < m1 && j < m2,
            (Group::Symmetric { elements, .. }, GroupElement::Perm(p)) => {
                elements.binary_search(p).is_ok()
            }
            (Group::Torus { .. }, GroupElement::Angle(a)) => a.is_finite(),
            _ => false,
        }
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            invalid(format!("element {g} does not belong to the group"))
        }
    }

    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(match (self, g, h) {
            (Group::Cyclic { m }, GroupElement::Cyclic(a), GroupElement::Cyclic(b)) => {
                GroupElement::Cyclic((a + b) % m)
            }
            (
                Group::ProductCyclic { m1, m2 },
                GroupElement::Pair(a1, a2),
                GroupElement::Pair(b1, b2),
            ) => GroupElement::Pair((a1 + b1) % m1, (a2 + b2) % m2),
            (Group::Symmetric { .. }, GroupElement::Perm(p), GroupElement::Perm(q)) => {
                GroupElement::Perm(compose_perm(p, q))
            }
            (Group::Torus { .. }, GroupElement::Angle(a), GroupElement::Angle(b)) => {
                GroupElement::Angle(wrap_angle(a + b))
            }
            _ => unreachable!("membership checked above"),
        })
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(match (self, g) {
            (Group::Cyclic { m }, GroupElement::Cyclic(a)) => GroupElement::Cyclic((m - a) % m),
            (Group::ProductCyclic { m1, m2 }, GroupElement::Pair(a, b)) => {
                GroupElement::Pair((m1 - a) % m1, (m2 - b) % m2)
            }
            (Group::Symmetric { .. }, GroupElement::Perm(p)) => GroupElement::Perm(invert_perm(p)),
            (Group::Torus { .. }, GroupElement::Angle(a)) => GroupElement::Angle(wrap_angle(-a)),
            _ => unreachable!("membership checked above"),
        })
    }

    /// Exhaustively checks identity, inverses and closure. The torus is
    /// checked on its angle grid only.
    pub fn verify(&self) -> Result<()> {
        let elems = self.elements();
        let e = self.identity();
        for g in &elems {
            let gi = self.inverse(g)?;
            let prod = self.compose(g, &gi)?;
            if !self.same_element(&prod, &e) {
                return Err(Error::Precondition(format!("{g} has no inverse")));
            }
            if !self.same_element(&self.compose(&e, g)?, g) {
                return Err(Error::Precondition("identity is not neutral".into()));
            }
        }
        if self.is_finite() && elems.len() <= 1024 {
            for g in &elems {
                for h in &elems {
                    self.compose(g, h)?;
                }
            }
        }
        Ok(())
    }

    pub fn same_element(&self, g: &GroupElement, h: &GroupElement) -> bool {
        match (g, h) {
            (GroupElement::Angle(a), GroupElement::Angle(b)) => {
                let d = (a - b).rem_euclid(TAU);
                d.min(TAU - d) < 1e-12
            }
            _ => g == h,
        }
    }
}

/// Metric choice for the permutation-type representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    /// Weights `1/dim`, the averaging inner product.
    #[default]
    Averaging,
    /// Weights `1`.
    Euclidean,
}

/// A representation `g -> T_g` of a group on a feature space, acting
/// structurally (index arithmetic or spectral phases).
///
/// `subspace_dim` is the dimension of the integration subspace: the first
/// `subspace_dim` raw coordinates. It equals the full dimension except for
/// the torus, whose real cosine coefficients span a non-invariant subspace.
#[derive(Debug, Clone)]
pub struct Representation {
    group: Group,
    space: Arc<FeatureSpace>,
    channels: usize,
    subspace: Arc<FeatureSpace>,
}

impl Representation {
    /// Regular representation of `Z_m`: `T_i[x](j) = x_{j-i}`.
    pub fn regular_cyclic(m: usize, metric: Metric) -> Result<Self> {
        let group = Group::cyclic(m)?;
        Self::permutation_like(group, m, 1, metric)
    }

    /// `Z_m1 x Z_m2` acting on `channels`-channel images by translation.
    pub fn image(m1: usize, m2: usize, channels: usize, metric: Metric) -> Result<Self> {
        if channels == 0 {
            return invalid("image needs at least one channel");
        }
        let group = Group::product_cyclic(m1, m2)?;
        Self::permutation_like(group, m1 * m2 * channels, channels, metric)
    }

    /// Permutation representation `T_g[x]_i = x_{g^-1(i)}`.
    pub fn permutation(group: Group, metric: Metric) -> Result<Self> {
        let n = match &group {
            Group::Symmetric { n, .. } => *n,
            _ => return invalid("permutation representation needs a symmetric group"),
        };
        Self::permutation_like(group, n, 1, metric)
    }

    fn permutation_like(group: Group, dim: usize, channels: usize, metric: Metric) -> Result<Self> {
        let space = match metric {
            Metric::Averaging => FeatureSpace::uniform(dim)?,
            Metric::Euclidean => FeatureSpace::unit(dim)?,
        };
        Ok(Self {
            group,
            subspace: Arc::clone(&space),
            space,
            channels,
        })
    }

    /// Band-limited real signals `x(theta) = sum_{|n|<band} c_n e^{in theta}`
    /// under rotation. Coordinates are `(re_0, re_1.., re_{band-1}, im_1..,
    /// im_{band-1})` with weights `(1, 2, .., 2)` so that the inner product
    /// is the average of `x y` over the circle. The integration subspace is
    /// the cosine part `(re_0, .., re_{band-1})`.
    pub fn torus(band: usize, angles: usize) -> Result<Self> {
        let group = Group::torus(band, angles)?;
        let dim = 2 * band - 1;
        let weights: Vec<f64> = (0..dim).map(|i| if i == 0 { 1.0 } else { 2.0 }).collect();
        let space = FeatureSpace::new(weights.clone())?;
        let subspace = FeatureSpace::new(weights[..band].to_vec())?;
        Ok(Self {
            group,
            space,
            channels: 1,
            subspace,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// The integration subspace with its induced metric.
    pub fn subspace(&self) -> &Arc<FeatureSpace> {
        &self.subspace
    }

    pub fn subspace_dim(&self) -> usize {
        self.subspace.dim()
    }

    /// Zero-pads subspace raw coordinates to the full space.
    pub fn embed(&self, sub: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        out[..sub.len()].copy_from_slice(sub);
        out
    }

    /// Orthogonal projection onto the integration subspace, in raw
    /// coordinates of the subspace.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        x[..self.subspace_dim()].to_vec()
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return invalid(format!(
                "dimension mismatch: representation acts on {}, got {len}",
                self.dim()
            ));
        }
        Ok(())
    }

    /// `out = T_g[x]` on raw coordinate slices.
    pub fn act_into(&self, g: &GroupElement, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dim(x.len())?;
        self.check_dim(out.len())?;
        self.group.check(g)?;
        match (&self.group, g) {
            (Group::Cyclic { m }, GroupElement::Cyclic(s)) => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = x[(j + m - s) % m];
                }
            }
            (Group::ProductCyclic { m1, m2 }, GroupElement::Pair(p, q)) => {
                let ch = self.channels;
                for i in 0..*m1 {
                    let si = (i + m1 - p) % m1;
                    for j in 0..*m2 {
                        let sj = (j + m2 - q) % m2;
                        let dst = (i * m2 + j) * ch;
                        let src = (si * m2 + sj) * ch;
                        out[dst..dst + ch].copy_from_slice(&x[src..src + ch]);
                    }
                }
            }
            (Group::Symmetric { .. }, GroupElement::Perm(p)) => {
                for (i, &pi) in p.iter().enumerate() {
                    out[pi] = x[i];
                }
            }
            (Group::Torus { band, .. }, GroupElement::Angle(alpha)) => {
                let m = *band;
                out[0] = x[0];
                for n in 1..m {
                    let (s, c) = (n as f64 * alpha).sin_cos();
                    let (re, im) = (x[n], x[m - 1 + n]);
                    out[n] = re * c + im * s;
                    out[m - 1 + n] = im * c - re * s;
                }
            }
            _ => unreachable!("membership checked above"),
        }
        Ok(())
    }

    pub fn act(&self, g: &GroupElement, x: &FeatureVec) -> Result<FeatureVec> {
        let mut out = vec![0.0; self.dim()];
        self.act_into(g, x.coords(), &mut out)?;
        Ok(FeatureVec::from_parts_unchecked(
            Arc::clone(&self.space),
            out,
        ))
    }

    /// Dual action `T*_g = W^-1 (T_{g^-1})^T W`, the adjoint of `T_{g^-1}`
    /// for the weighted inner product. Computed from the matrix of
    /// `T_{g^-1}` so it does not presuppose that `T` is an isometry.
    pub fn dual_act(&self, g: &GroupElement, a: &FeatureVec) -> Result<FeatureVec> {
        self.check_dim(a.dim())?;
        let gi = self.group.inverse(g)?;
        let d = self.dim();
        let w = self.space.weights();
        let mut basis = vec![0.0; d];
        let mut col = vec![0.0; d];
        let mut out = vec![0.0; d];
        for (j, o) in out.iter_mut().enumerate() {
            basis[j] = 1.0;
            self.act_into(&gi, &basis, &mut col)?;
            basis[j] = 0.0;
            // (M^T W a)_j = sum_i M_ij w_i a_i
            let s: f64 = col
                .iter()
                .zip(w)
                .zip(a.coords())
                .map(|((m, wi), ai)| m * wi * ai)
                .sum();
            *o = s / w[j];
        }
        Ok(FeatureVec::from_parts_unchecked(
            Arc::clone(&self.space),
            out,
        ))
    }

    /// `(a * x)(g) = <T_{g^-1}[x], a>`.
    pub fn gconv(&self, a: &FeatureVec, x: &FeatureVec, g: &GroupElement) -> Result<f64> {
        self.check_dim(a.dim())?;
        self.check_dim(x.dim())?;
        let gi = self.group.inverse(g)?;
        let mut y = vec![0.0; self.dim()];
        self.act_into(&gi, x.coords(), &mut y)?;
        Ok(self.space.inner_raw(&y, a.coords()))
    }

    /// `T_{g^-1}[x]` for each `g` in `elements`; the convolution with any
    /// filter `a` at `g` is then a single inner product.
    pub fn inverse_orbit(&self, x: &[f64], elements: &[GroupElement]) -> Result<Vec<Vec<f64>>> {
        elements
            .iter()
            .map(|g| {
                let gi = self.group.inverse(g)?;
                let mut y = vec![0.0; self.dim()];
                self.act_into(&gi, x, &mut y)?;
                Ok(y)
            })
            .collect()
    }
}

/// `max |f(T_g x)(h) - f(x)(g^-1 h)|` over the samples `(x, g, h)`.
pub fn equivariance_defect<F>(
    f: F,
    rep: &Representation,
    samples: &[(FeatureVec, GroupElement, GroupElement)],
) -> Result<f64>
where
    F: Fn(&FeatureVec, &GroupElement) -> Result<f64>,
{
    if samples.is_empty() {
        return invalid("equivariance check needs at least one sample");
    }
    let group = rep.group();
    let mut worst = 0.0f64;
    for (x, g, h) in samples {
        let tx = rep.act(g, x)?;
        let lhs = f(&tx, h)?;
        let gih = group.compose(&group.inverse(g)?, h)?;
        let rhs = f(x, &gih)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// All `(x, g, h)` triples for the given inputs over the group's element
/// list (the angle grid for the torus).
pub fn exhaustive_samples(
    rep: &Representation,
    inputs: &[FeatureVec],
) -> Vec<(FeatureVec, GroupElement, GroupElement)> {
    let elems = rep.group().elements();
    let mut out = Vec::with_capacity(inputs.len() * elems.len() * elems.len());
    for x in inputs {
        for g in &elems {
            for h in &elems {
                out.push((x.clone(), g.clone(), h.clone()));
            }
        }
    }
    out
}
