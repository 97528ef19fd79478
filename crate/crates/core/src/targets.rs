//! Equivariant target functions and the cutoffs that make them integrable.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::feature_space::FeatureSpace;
use crate::group::{Group, Representation};
use crate::ridgelet::TargetFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    /// `exp(-|x|^2 / 4t)`.
    GaussianFactor { t: f64 },
    /// Indicator of the raw-coordinate cube `max |x_i| <= radius`.
    BoxIndicator { radius: f64 },
    /// 1 for `|x| <= radius`, 0 for `|x| >= radius + width`, smooth between.
    SmoothBump { radius: f64, width: f64 },
}

/// `C^inf` step from 0 at `s <= 0` to 1 at `s >= 1`.
fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    a / (a + b)
}

impl Cutoff {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Cutoff::GaussianFactor { t } => t.is_finite() && t > 0.0,
            Cutoff::BoxIndicator { radius } => radius.is_finite() && radius > 0.0,
            Cutoff::SmoothBump { radius, width } => {
                radius.is_finite() && radius > 0.0 && width.is_finite() && width > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("cutoff parameters out of range: {self:?}"))
        }
    }

    #[inline]
    pub fn eval(&self, space: &FeatureSpace, x: &[f64]) -> f64 {
        match *self {
            Cutoff::GaussianFactor { t } => (-space.inner_raw(x, x) / (4.0 * t)).exp(),
            Cutoff::BoxIndicator { radius } => {
                if x.iter().all(|v| v.abs() <= radius) {
                    1.0
                } else {
                    0.0
                }
            }
            Cutoff::SmoothBump { radius, width } => {
                let r = space.inner_raw(x, x).sqrt();
                1.0 - smooth_step((r - radius) / width)
            }
        }
    }

    /// Whether `cutoff(T_g x) = cutoff(x)` on random samples over the
    /// group's element list.
    pub fn is_invariant(&self, rep: &Representation) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let space = rep.space();
        let scale = match *self {
            Cutoff::GaussianFactor { t } => 2.0 * t.sqrt(),
            Cutoff::BoxIndicator { radius } => radius,
            Cutoff::SmoothBump { radius, width } => radius + width,
        };
        let elements = rep.group().elements();
        let mut y = vec![0.0; rep.dim()];
        for _ in 0..16 {
            let x: Vec<f64> = (0..rep.dim())
                .map(|_| rng.random_range(-1.2 * scale..1.2 * scale))
                .collect();
            let base = self.eval(space, &x);
            for g in &elements {
                if rep.act_into(g, &x, &mut y).is_err() {
                    return false;
                }
                if (self.eval(space, &y) - base).abs() > 1e-12 {
                    return false;
                }
            }
        }
        true
    }
}

/// `f(x)(g) = f_e(T_{g^-1} x)`.
pub fn orbit_target<F>(name: &str, f_e: F, rep: Arc<Representation>) -> TargetFunction
where
    F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
{
    TargetFunction::new(name, rep, f_e)
}

/// `f_e(x) = exp(-|Px - mu|^2 / 2s^2)` with `P` the projection onto the
/// integration subspace and `mu` a subspace vector in raw coordinates.
pub fn gaussian_orbit(
    rep: Arc<Representation>,
    scale: f64,
    center: Option<Vec<f64>>,
) -> Result<TargetFunction> {
    if !(scale.is_finite() && scale > 0.0) {
        return invalid(format!("gaussian scale {scale} must be positive"));
    }
    let m = rep.subspace_dim();
    let mu = center.unwrap_or_else(|| vec![0.0; m]);
    if mu.len() != m {
        return invalid(format!("center has length {}, expected {m}", mu.len()));
    }
    let sub = Arc::clone(rep.subspace());
    let denom = 2.0 * scale * scale;
    Ok(orbit_target(
        "gaussian_orbit",
        move |x| {
            let d: Vec<f64> = x[..m].iter().zip(&mu).map(|(a, b)| a - b).collect();
            (-sub.inner_raw(&d, &d) / denom).exp()
        },
        rep,
    ))
}

/// `f(x)(i) = (x_{i+1} - x_i) cutoff(x)` on the regular representation of
/// `Z_m`.
pub fn difference_filter(rep: Arc<Representation>, cutoff: Cutoff) -> Result<TargetFunction> {
    cutoff.validate()?;
    match rep.group() {
        Group::Cyclic { m } if *m >= 2 => {}
        _ => return invalid("difference filter needs the regular representation of Z_m, m >= 2"),
    }
    if !cutoff.is_invariant(&rep) {
        log::warn!("cutoff {cutoff:?} is not invariant; equivariance holds only on its plateau");
    }
    let space = Arc::clone(rep.space());
    Ok(orbit_target(
        "difference",
        move |x| (x[1] - x[0]) * cutoff.eval(&space, x),
        rep,
    ))
}

/// Derivative of the band-limited signal at angle 0 damped by a Gaussian
/// factor: `f_e(x) = x'(0) exp(-|x|^2 / 4t)`, so that the orbit gives
/// `f(x)(alpha) = x'(alpha) exp(-|x|^2 / 4t)`.
///
/// With `x(theta) = sum_{|n|<m} c_n e^{in theta}`, `x'(0) = sum in c_n =
/// -2 sum_{n>0} n Im c_n`.
pub fn torus_differential(rep: Arc<Representation>, t: f64) -> Result<TargetFunction> {
    let band = match rep.group() {
        Group::Torus { band, .. } if *band >= 2 => *band,
        _ => return invalid("torus differential needs a torus representation with band >= 2"),
    };
    let cutoff = Cutoff::GaussianFactor { t };
    cutoff.validate()?;
    let space = Arc::clone(rep.space());
    Ok(orbit_target(
        "torus_diff",
        move |x| {
            let deriv: f64 = (1..band).map(|n| -2.0 * n as f64 * x[band - 1 + n]).sum();
            deriv * cutoff.eval(&space, x)
        },
        rep,
    ))
}

/// `f_e(x) = x_0 exp(-|x|^2 / 2)` on a permutation representation.
pub fn deepsets_target(rep: Arc<Representation>) -> Result<TargetFunction> {
    if !matches!(rep.group(), Group::Symmetric { .. }) {
        return invalid("deep sets target needs a permutation representation");
    }
    let space = Arc::clone(rep.space());
    Ok(orbit_target(
        "deepsets",
        move |x| x[0] * (-0.5 * space.inner_raw(x, x)).exp(),
        rep,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{equivariance_defect, exhaustive_samples, GroupElement, Metric};
    use std::f64::consts::TAU;

    fn cyclic(m: usize) -> Arc<Representation> {
        Arc::new(Representation::regular_cyclic(m, Metric::Averaging).unwrap())
    }

    #[test]
    fn orbit_examples() {
        let rep = cyclic(2);
        let f = orbit_target("first", |x| x[0], Arc::clone(&rep));
        let x = rep.space().vector(vec![3.0, 7.0]).unwrap();
        assert_eq!(f.eval(&x, &GroupElement::Cyclic(0)).unwrap(), 3.0);
        assert_eq!(f.eval(&x, &GroupElement::Cyclic(1)).unwrap(), 7.0);
        let c = orbit_target("const", |_| 2.5, Arc::clone(&rep));
        for g in rep.group().elements() {
            assert_eq!(c.eval(&x, &g).unwrap(), 2.5);
        }
    }

    #[test]
    fn difference_examples() {
        let rep = cyclic(4);
        let f = difference_filter(Arc::clone(&rep), Cutoff::GaussianFactor { t: 1e6 }).unwrap();
        let flat = rep.space().vector(vec![0.4; 4]).unwrap();
        assert_eq!(f.eval(&flat, &GroupElement::Cyclic(0)).unwrap(), 0.0);
        let bump = rep.space().vector(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let v = f.eval(&bump, &GroupElement::Cyclic(0)).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
        // f(x)(i) = x_{i+1} - x_i on the plateau
        let x = rep.space().vector(vec![0.1, -0.3, 0.2, 0.05]).unwrap();
        let f = difference_filter(
            Arc::clone(&rep),
            Cutoff::SmoothBump {
                radius: 2.0,
                width: 1.0,
            },
        )
        .unwrap();
        for i in 0..4 {
            let got = f.eval(&x, &GroupElement::Cyclic(i)).unwrap();
            let want = x.coords()[(i + 1) % 4] - x.coords()[i];
            assert!((got - want).abs() < 1e-15, "{i}");
        }
        assert!(difference_filter(cyclic(1), Cutoff::GaussianFactor { t: 1.0 }).is_err());
    }

    #[test]
    fn deepsets_examples() {
        let group = Group::full_symmetric(2).unwrap();
        let rep = Arc::new(Representation::permutation(group, Metric::Euclidean).unwrap());
        let f = deepsets_target(Arc::clone(&rep)).unwrap();
        let zero = rep.space().zeros();
        assert_eq!(f.eval(&zero, &GroupElement::Perm(vec![0, 1])).unwrap(), 0.0);
        let x = rep.space().vector(vec![1.0, 2.0]).unwrap();
        let v = f.eval(&x, &GroupElement::Perm(vec![1, 0])).unwrap();
        assert!((v - 2.0 * (-2.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn shipped_targets_are_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s3 = Arc::new(
            Representation::permutation(Group::full_symmetric(3).unwrap(), Metric::Averaging)
                .unwrap(),
        );
        let torus = Arc::new(Representation::torus(3, 12).unwrap());
        let image = Arc::new(Representation::image(2, 3, 1, Metric::Averaging).unwrap());
        let targets = vec![
            deepsets_target(Arc::clone(&s3)).unwrap(),
            difference_filter(
                cyclic(3),
                Cutoff::SmoothBump {
                    radius: 1.0,
                    width: 0.5,
                },
            )
            .unwrap(),
            difference_filter(cyclic(4), Cutoff::GaussianFactor { t: 0.5 }).unwrap(),
            gaussian_orbit(cyclic(2), 1.0, Some(vec![0.3, -0.1])).unwrap(),
            gaussian_orbit(Arc::clone(&torus), 1.0, None).unwrap(),
            torus_differential(Arc::clone(&torus), 2.0).unwrap(),
            gaussian_orbit(image, 0.8, None).unwrap(),
        ];
        for f in targets {
            let rep = f.representation();
            let inputs: Vec<_> = (0..3)
                .map(|_| {
                    let c = (0..rep.dim())
                        .map(|_| rng.random_range(-1.0..1.0))
                        .collect();
                    rep.space().vector(c).unwrap()
                })
                .collect();
            let samples = exhaustive_samples(rep, &inputs);
            let d = equivariance_defect(|x, g| f.eval(x, g), rep, &samples).unwrap();
            assert!(d <= 1e-10, "{}: {d}", f.name());
        }
    }

    #[test]
    fn torus_derivative_matches_finite_difference() {
        let band = 4;
        let rep = Arc::new(Representation::torus(band, 32).unwrap());
        let t = 3.0;
        let f = torus_differential(Arc::clone(&rep), t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c: Vec<f64> = (0..rep.dim())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let x = rep.space().vector(c.clone()).unwrap();
        let signal = |theta: f64| -> f64 {
            let mut s = c[0];
            for n in 1..band {
                let (sn, cn) = (n as f64 * theta).sin_cos();
                s += 2.0 * (c[n] * cn - c[band - 1 + n] * sn);
            }
            s
        };
        let phi = (-x.norm_sq() / (4.0 * t)).exp();
        let h = 1e-4;
        for g in rep.group().elements() {
            let alpha = match g {
                GroupElement::Angle(a) => a,
                _ => unreachable!(),
            };
            let fd = (signal(alpha + h) - signal(alpha - h)) / (2.0 * h) * phi;
            let got = f.eval(&x, &g).unwrap();
            assert!((got - fd).abs() < 1e-6, "{alpha}: {got} vs {fd}");
        }
        // constants have no derivative
        let dc = rep
            .space()
            .vector(rep.embed(&[1.3, 0.0, 0.0, 0.0]))
            .unwrap();
        assert_eq!(f.eval(&dc, &GroupElement::Angle(0.7)).unwrap(), 0.0);
        // a pure sine mode 2 Im c_1 = -1 has derivative 2 cos(alpha) * ...
        let mut sine = vec![0.0; rep.dim()];
        sine[band] = -0.5;
        let s = rep.space().vector(sine).unwrap();
        let phi = (-s.norm_sq() / (4.0 * t)).exp();
        let v = f.eval(&s, &GroupElement::Angle(TAU / 8.0)).unwrap();
        assert!((v - (TAU / 8.0).cos() * phi).abs() < 1e-12);
    }

    #[test]
    fn gaussian_factor_is_monotone_in_t() {
        let rep = cyclic(3);
        let x = [0.5, -1.0, 2.0];
        let mut last = 0.0;
        for t in [0.1, 0.5, 1.0, 4.0, 100.0] {
            let v = Cutoff::GaussianFactor { t }.eval(rep.space(), &x);
            assert!(v > last && v <= 1.0);
            last = v;
        }
    }

    #[test]
    fn invariance_of_cutoffs() {
        let torus = Representation::torus(3, 16).unwrap();
        assert!(Cutoff::GaussianFactor { t: 1.0 }.is_invariant(&torus));
        assert!(Cutoff::SmoothBump {
            radius: 1.0,
            width: 0.5
        }
        .is_invariant(&torus));
        assert!(!Cutoff::BoxIndicator { radius: 1.0 }.is_invariant(&torus));
        assert!(Cutoff::BoxIndicator { radius: 1.0 }.is_invariant(&cyclic(3)));
    }

    #[test]
    fn smooth_bump_shape() {
        let s = FeatureSpace::unit(1).unwrap();
        let c = Cutoff::SmoothBump {
            radius: 1.0,
            width: 0.5,
        };
        assert_eq!(c.eval(&s, &[0.9]), 1.0);
        assert_eq!(c.eval(&s, &[1.6]), 0.0);
        let mid = c.eval(&s, &[1.25]);
        assert!((mid - 0.5).abs() < 1e-12);
    }
}
