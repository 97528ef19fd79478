//! Activations, mother ridgelets, the fractional Laplacian `rho =
//! Delta^{m/2} rho0`, the scalar product `<<sigma, rho>>` and the
//! forward-difference regularity check.
//!
//! Fourier convention: `f#(w) = int f(b) e^{-iwb} db`.

use std::f64::consts::{PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};

/// Half-width of the default b-grid for the spectral fractional Laplacian.
pub const DEFAULT_FFT_RADIUS: f64 = 40.0;
/// Node count of the default b-grid.
pub const DEFAULT_FFT_POINTS: usize = 1 << 14;
/// `|<<sigma, rho>>|` below this is treated as a degenerate pair.
pub const DEGENERATE_THRESHOLD: f64 = 1e-12;
/// Relative size of `rho0` tolerated at the edge of the spectral grid.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;
/// Relative magnitude below which FFT coefficients of `rho0` are discarded.
pub const SPECTRAL_NOISE_FLOOR: f64 = 1e-13;

/// Normalization turning `int sigma rho0 db` into `<<sigma, rho>>` for
/// `rho = Delta^{m/2} rho0` on an `m`-dimensional feature space.
///
/// `(2pi)^{m-1} int sigma# conj(rho#) |w|^{-m} dw = (2pi)^{m-1} int sigma#
/// conj(rho0#) dw = (2pi)^m int sigma rho0 db` by Parseval. The test suite
/// recovers this value independently from the reconstruction identity.
pub fn c_norm(m: usize) -> f64 {
    TAU.powi(m as i32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Relu,
    Tanh,
    Gaussian,
    Step,
    TruncatedPower(u32),
}

impl Activation {
    #[inline]
    pub fn eval(&self, b: f64) -> f64 {
        match *self {
            Activation::Relu => b.max(0.0),
            Activation::Tanh => b.tanh(),
            Activation::Gaussian => (-0.5 * b * b).exp(),
            Activation::Step => {
                if b >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::TruncatedPower(k) => {
                if b >= 0.0 {
                    b.powi(k as i32)
                } else {
                    0.0
                }
            }
        }
    }

    /// Classical Fourier transform, where one exists as a function.
    pub fn spectrum(&self, omega: f64) -> Option<f64> {
        match self {
            Activation::Gaussian => Some(TAU.sqrt() * (-0.5 * omega * omega).exp()),
            _ => None,
        }
    }

    /// Points where the activation is not smooth.
    fn kinks(&self) -> &'static [f64] {
        match self {
            Activation::Relu | Activation::Step | Activation::TruncatedPower(_) => &[0.0],
            _ => &[],
        }
    }

    pub fn name(&self) -> String {
        match self {
            Activation::Relu => "relu".into(),
            Activation::Tanh => "tanh".into(),
            Activation::Gaussian => "gaussian".into(),
            Activation::Step => "step".into(),
            Activation::TruncatedPower(k) => format!("truncated_power_{k}"),
        }
    }
}

/// Probabilists' Hermite polynomial `He_n(u)`.
#[inline]
pub fn hermite_he(n: usize, u: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut p0, mut p1) = (1.0, u);
    for k in 1..n {
        let p2 = u * p1 - k as f64 * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

#[derive(Debug, Clone, PartialEq)]
pub enum MotherRidgelet {
    /// `exp(-b^2 / 2w^2)`.
    Gaussian { width: f64 },
    /// `He_k(b/w) exp(-b^2 / 2w^2)`. For `k >= 1` the first `k` moments vanish.
    HermiteGaussian { order: usize, width: f64 },
    /// Even real spectrum sampled at `j * omega_max / (n-1)`, zero beyond
    /// `omega_max`; linear in between.
    TabulatedSpectrum { omega_max: f64, values: Vec<f64> },
}

impl MotherRidgelet {
    pub fn validate(&self) -> Result<()> {
        match self {
            MotherRidgelet::Gaussian { width } | MotherRidgelet::HermiteGaussian { width, .. } => {
                if !(width.is_finite() && *width > 0.0) {
                    return invalid(format!("mother ridgelet width {width} must be positive"));
                }
            }
            MotherRidgelet::TabulatedSpectrum { omega_max, values } => {
                if !(omega_max.is_finite() && *omega_max > 0.0) || values.len() < 2 {
                    return invalid("tabulated spectrum needs omega_max > 0 and two samples");
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return invalid("tabulated spectrum has non-finite samples");
                }
            }
        }
        Ok(())
    }

    fn hermite_params(&self) -> Option<(usize, f64)> {
        match *self {
            MotherRidgelet::Gaussian { width } => Some((0, width)),
            MotherRidgelet::HermiteGaussian { order, width } => Some((order, width)),
            MotherRidgelet::TabulatedSpectrum { .. } => None,
        }
    }

    /// Length scale used to size integration ranges.
    pub fn scale(&self) -> f64 {
        match self {
            MotherRidgelet::Gaussian { width } => *width,
            MotherRidgelet::HermiteGaussian { order, width } => {
                width * (1.0 + (*order as f64).sqrt())
            }
            MotherRidgelet::TabulatedSpectrum { omega_max, .. } => PI / omega_max,
        }
    }

    pub fn eval(&self, b: f64) -> f64 {
        match self {
            MotherRidgelet::Gaussian { width } => {
                let u = b / width;
                (-0.5 * u * u).exp()
            }
            MotherRidgelet::HermiteGaussian { order, width } => {
                let u = b / width;
                hermite_he(*order, u) * (-0.5 * u * u).exp()
            }
            MotherRidgelet::TabulatedSpectrum { omega_max, values } => {
                // (1/pi) int_0^W S(w) cos(wb) dw, trapezoid on the table
                let h = omega_max / (values.len() - 1) as f64;
                let n = values.len() - 1;
                let mut acc = 0.5 * (values[0] + values[n] * (omega_max * b).cos());
                for (j, v) in values.iter().enumerate().take(n).skip(1) {
                    acc += v * (j as f64 * h * b).cos();
                }
                acc * h / PI
            }
        }
    }

    pub fn spectrum(&self, omega: f64) -> Complex64 {
        match self {
            MotherRidgelet::Gaussian { width } => {
                let s = width * TAU.sqrt() * (-0.5 * (width * omega).powi(2)).exp();
                Complex64::new(s, 0.0)
            }
            MotherRidgelet::HermiteGaussian { order, width } => {
                let s = width * TAU.sqrt() * (-0.5 * (width * omega).powi(2)).exp();
                Complex64::new(0.0, -width * omega).powu(*order as u32) * s
            }
            MotherRidgelet::TabulatedSpectrum { omega_max, values } => {
                let w = omega.abs();
                if w >= *omega_max {
                    return Complex64::new(0.0, 0.0);
                }
                let pos = w / omega_max * (values.len() - 1) as f64;
                let i = pos.floor() as usize;
                let t = pos - i as f64;
                let v = values[i] * (1.0 - t) + values[(i + 1).min(values.len() - 1)] * t;
                Complex64::new(v, 0.0)
            }
        }
    }

    /// `true` when `|rho0(b)| (1+|b|)^10` on the far half of a wide grid
    /// stays below its value on the near half.
    pub fn is_rapidly_decreasing(&self) -> bool {
        let r = 50.0 * self.scale();
        let weighted = |b: f64| self.eval(b).abs() * (1.0 + b.abs()).powi(10);
        let sup = |lo: f64, hi: f64| {
            (0..=2000)
                .map(|i| lo + (hi - lo) * i as f64 / 2000.0)
                .flat_map(|b| [weighted(b), weighted(-b)])
                .fold(0.0f64, f64::max)
        };
        let (near, far) = (sup(0.0, r), sup(r, 2.0 * r));
        far.is_finite() && far <= near
    }
}

/// Uniform b-grid on `[-radius, radius)` used by the spectral path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    pub radius: f64,
    pub points: usize,
}

impl Default for SpectralGrid {
    fn default() -> Self {
        Self {
            radius: DEFAULT_FFT_RADIUS,
            points: DEFAULT_FFT_POINTS,
        }
    }
}

impl SpectralGrid {
    pub fn step(&self) -> f64 {
        2.0 * self.radius / self.points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.radius + j as f64 * self.step()
    }
}

/// Samples on a uniform grid, evaluated by 4-point cubic Lagrange
/// interpolation and zero outside the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformTable {
    start: f64,
    step: f64,
    values: Vec<f64>,
}

impl UniformTable {
    pub fn new(start: f64, step: f64, values: Vec<f64>) -> Self {
        Self {
            start,
            step,
            values,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    #[inline]
    pub fn eval(&self, b: f64) -> f64 {
        let pos = (b - self.start) / self.step;
        let n = self.values.len();
        if !(pos >= 0.0 && pos <= (n - 1) as f64) {
            return 0.0;
        }
        let i = (pos.floor() as usize).clamp(1, n.saturating_sub(3).max(1));
        if n < 4 {
            let j = pos.round() as usize;
            return self.values[j.min(n - 1)];
        }
        let t = pos - i as f64;
        let (y0, y1, y2, y3) = (
            self.values[i - 1],
            self.values[i],
            self.values[i + 1],
            self.values[i + 2],
        );
        // Lagrange basis on nodes -1, 0, 1, 2
        let a0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let a1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let a2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let a3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        a0 * y0 + a1 * y1 + a2 * y2 + a3 * y3
    }
}

/// The derived ridgelet function `rho`.
#[derive(Debug, Clone, PartialEq)]
pub enum Rho {
    /// `scale * He_order(b/w) exp(-b^2/2w^2)`.
    Hermite {
        order: usize,
        width: f64,
        scale: f64,
    },
    Tabulated(UniformTable),
}

impl Rho {
    #[inline]
    pub fn eval(&self, b: f64) -> f64 {
        match self {
            Rho::Hermite {
                order,
                width,
                scale,
            } => {
                let u = b / width;
                scale * hermite_he(*order, u) * (-0.5 * u * u).exp()
            }
            Rho::Tabulated(t) => t.eval(b),
        }
    }

    /// Closed form of `Delta^{m/2} rho0` for even `m` and the Hermite
    /// family: `(-1)^{m/2} w^{-m} He_{k+m}(b/w) exp(-b^2/2w^2)`.
    pub fn closed_form(rho0: &MotherRidgelet, m: usize) -> Option<Rho> {
        if !m.is_multiple_of(2) {
            return None;
        }
        let (order, width) = rho0.hermite_params()?;
        let sign = if (m / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        Some(Rho::Hermite {
            order: order + m,
            width,
            scale: sign * width.powi(-(m as i32)),
        })
    }
}

/// `Delta^{m/2} rho0` by the FFT multiplier `|w|^m` on a periodic grid.
pub fn fractional_laplacian(rho0: &MotherRidgelet, m: usize, grid: SpectralGrid) -> Result<Rho> {
    rho0.validate()?;
    if grid.points < 8 || !grid.radius.is_finite() || grid.radius <= 0.0 {
        return invalid("spectral grid needs at least 8 points and a positive radius");
    }
    let n = grid.points;
    let samples: Vec<f64> = (0..n).map(|j| rho0.eval(grid.node(j))).collect();
    let peak = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let edge = rho0
        .eval(-grid.radius)
        .abs()
        .max(rho0.eval(grid.radius).abs());
    if edge > BOUNDARY_TOLERANCE * peak.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!(
            "mother ridgelet has not decayed at the spectral grid edge \
             (|rho0(+-{})| = {edge:e}); widen the grid",
            grid.radius
        )));
    }
    if m == 0 || peak == 0.0 {
        return Ok(Rho::Tabulated(UniformTable::new(
            -grid.radius,
            grid.step(),
            samples,
        )));
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    // Coefficients past the last one above the rounding floor are noise,
    // which |w|^m would amplify without bound.
    let cmax = buf.iter().fold(0.0f64, |a, c| a.max(c.norm()));
    let floor = SPECTRAL_NOISE_FLOOR * cmax;
    let cut = (0..=n / 2)
        .rev()
        .find(|&k| buf[k].norm() > floor || buf[(n - k) % n].norm() > floor)
        .unwrap_or(0);
    let dw = TAU / (2.0 * grid.radius);
    for (k, c) in buf.iter_mut().enumerate() {
        let kk = if k <= n / 2 { k } else { n - k };
        if kk > cut {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= (kk as f64 * dw).powi(m as i32);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let values = buf.iter().map(|c| c.re / n as f64).collect();
    Ok(Rho::Tabulated(UniformTable::new(
        -grid.radius,
        grid.step(),
        values,
    )))
}

/// Composite Gauss-Legendre quadrature of `f` over `[lo, hi]` with panels
/// of width at most `panel`, split at `breaks`.
pub fn gauss_legendre_integral<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    panel: f64,
    breaks: &[f64],
) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(20).expect("nonzero degree"));
    let mut cuts = vec![lo];
    cuts.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    cuts.push(hi);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let pieces = ((w[1] - w[0]) / panel).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / pieces as f64;
        for p in 0..pieces {
            let a = w[0] + p as f64 * h;
            total += rule.integrate(a, a + h, &f);
        }
    }
    total
}

/// `int sigma(b) rho0(b) db` by composite Gauss-Legendre quadrature.
pub fn time_domain_integral(sigma: &Activation, rho0: &MotherRidgelet) -> Result<f64> {
    rho0.validate()?;
    let s = rho0.scale();
    let r = 60.0 * s;
    let v = gauss_legendre_integral(
        |b| sigma.eval(b) * rho0.eval(b),
        -r,
        r,
        0.25 * s,
        sigma.kinks(),
    );
    if !v.is_finite() {
        return Err(Error::Numeric(
            "scalar product integral is not finite".into(),
        ));
    }
    Ok(v)
}

/// `<<sigma, rho>> = c_norm(m) * int sigma rho0 db`.
pub fn scalar_product(sigma: &Activation, rho0: &MotherRidgelet, m: usize) -> Result<f64> {
    let v = c_norm(m) * time_domain_integral(sigma, rho0)?;
    if v.abs() < DEGENERATE_THRESHOLD {
        return Err(Error::DegeneratePair { value: v });
    }
    Ok(v)
}

/// `(2pi)^{m-1} int sigma#(w) conj(rho#(w)) |w|^{-m} dw` with `rho#` taken
/// by direct quadrature of `rho` on `grid`. The integrand is even in `w`;
/// it is integrated over `(0, omega_max)` by the midpoint rule with `nodes`
/// nodes and doubled. Only for activations with a classical spectrum.
pub fn scalar_product_fourier(
    sigma: &Activation,
    rho: &Rho,
    m: usize,
    grid: SpectralGrid,
    omega_max: f64,
    nodes: usize,
) -> Result<f64> {
    if sigma.spectrum(0.0).is_none() {
        return invalid(format!(
            "activation {} has no classical spectrum",
            sigma.name()
        ));
    }
    if nodes == 0 || !omega_max.is_finite() || omega_max <= 0.0 {
        return invalid("frequency grid needs nodes and a positive range");
    }
    let h = grid.step();
    let samples: Vec<f64> = (0..grid.points).map(|j| rho.eval(grid.node(j))).collect();
    let b0 = grid.node(0);
    let dw = omega_max / nodes as f64;
    let total: f64 = (0..nodes)
        .map(|i| {
            let w = (i as f64 + 0.5) * dw;
            let rot = Complex64::from_polar(1.0, -w * h);
            let mut phase = Complex64::from_polar(1.0, -w * b0);
            let mut acc = Complex64::new(0.0, 0.0);
            for &v in &samples {
                acc += phase * v;
                phase *= rot;
            }
            let rho_hat = acc * h;
            sigma.spectrum(w).unwrap_or(0.0) * rho_hat.conj().re / w.powi(m as i32)
        })
        .sum();
    Ok(2.0 * total * dw * TAU.powi(m as i32 - 1))
}

/// `(sigma, rho0, m)` with the derived `rho` and the constant
/// `<<sigma, rho>>`.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeletPair {
    sigma: Activation,
    rho0: MotherRidgelet,
    m: usize,
    rho: Rho,
    time_integral: f64,
    product: f64,
}

impl RidgeletPair {
    /// Uses the closed form for even `m` and the default spectral grid
    /// otherwise.
    pub fn new(sigma: Activation, rho0: MotherRidgelet, m: usize) -> Result<Self> {
        Self::with_grid(sigma, rho0, m, SpectralGrid::default())
    }

    pub fn with_grid(
        sigma: Activation,
        rho0: MotherRidgelet,
        m: usize,
        grid: SpectralGrid,
    ) -> Result<Self> {
        rho0.validate()?;
        let rho = match Rho::closed_form(&rho0, m) {
            Some(r) => r,
            None => fractional_laplacian(&rho0, m, grid)?,
        };
        let time_integral = time_domain_integral(&sigma, &rho0)?;
        let product = c_norm(m) * time_integral;
        if product.abs() < DEGENERATE_THRESHOLD || !product.is_finite() {
            return Err(Error::DegeneratePair { value: product });
        }
        Ok(Self {
            sigma,
            rho0,
            m,
            rho,
            time_integral,
            product,
        })
    }

    pub fn sigma(&self) -> &Activation {
        &self.sigma
    }

    pub fn rho0(&self) -> &MotherRidgelet {
        &self.rho0
    }

    pub fn rho(&self) -> &Rho {
        &self.rho
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn time_integral(&self) -> f64 {
        self.time_integral
    }

    /// `<<sigma, rho>>`.
    pub fn product(&self) -> f64 {
        self.product
    }

    pub fn c_norm(&self) -> f64 {
        c_norm(self.m)
    }
}

/// `Delta_theta^n [sigma]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardDifference {
    pub sigma: Activation,
    pub n: usize,
    pub theta: f64,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl ForwardDifference {
    /// Recursive definition `D^n s(t) = D^{n-1} s(t + theta) - D^{n-1} s(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        fn rec(s: &Activation, n: usize, theta: f64, t: f64) -> f64 {
            if n == 0 {
                s.eval(t)
            } else {
                rec(s, n - 1, theta, t + theta) - rec(s, n - 1, theta, t)
            }
        }
        rec(&self.sigma, self.n, self.theta, t)
    }

    /// `sum_j (-1)^{n-j} C(n,j) sigma(t + j theta)`.
    pub fn eval_binomial(&self, t: f64) -> f64 {
        (0..=self.n)
            .map(|j| {
                let sign = if (self.n - j).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                sign * binomial(self.n, j) * self.sigma.eval(t + j as f64 * self.theta)
            })
            .sum()
    }

    /// Coefficients and shifts of the binomial expansion:
    /// `D^n s(t) = sum_j coeff_j s(t + shift_j)`.
    pub fn expansion(&self) -> Vec<(f64, f64)> {
        (0..=self.n)
            .map(|j| {
                let sign = if (self.n - j).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                (sign * binomial(self.n, j), j as f64 * self.theta)
            })
            .collect()
    }
}

pub fn forward_difference(sigma: Activation, n: usize, theta: f64) -> Result<ForwardDifference> {
    if !(theta.is_finite() && theta > 0.0) {
        return invalid(format!("forward difference step {theta} must be positive"));
    }
    Ok(ForwardDifference { sigma, n, theta })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A3Report {
    pub bounded: bool,
    pub sup: f64,
    /// Largest difference quotient on the requested grid.
    pub lipschitz_est: f64,
    /// The same estimate with half the spacing.
    pub lipschitz_refined: f64,
    /// Whether the estimate is stable under refinement.
    pub lipschitz: bool,
}

/// Grid study of `Delta_theta^n [sigma]` on `[-radius, radius]` with
/// `points` nodes (`n = 0` is `sigma` itself).
pub fn a3_check(
    sigma: Activation,
    n: usize,
    theta: f64,
    radius: f64,
    points: usize,
) -> Result<A3Report> {
    if radius < 100.0 {
        return invalid(format!("a3 grid radius {radius} must be at least 100"));
    }
    if points < 3 {
        return invalid("a3 grid needs at least three points");
    }
    let d = forward_difference(sigma, n, theta)?;
    let sample = |r: f64, pts: usize| -> Vec<f64> {
        (0..pts)
            .map(|i| d.eval(-r + 2.0 * r * i as f64 / (pts - 1) as f64))
            .collect()
    };
    let sup_of = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let lip_of = |v: &[f64], h: f64| {
        v.windows(2)
            .map(|w| (w[1] - w[0]).abs() / h)
            .fold(0.0f64, f64::max)
    };
    let h = 2.0 * radius / (points - 1) as f64;
    let base = sample(radius, points);
    let wide = sample(2.0 * radius, 2 * points - 1);
    let fine = sample(radius, 2 * points - 1);
    let sup = sup_of(&base);
    let sup_wide = sup_of(&wide);
    let bounded = sup.is_finite() && (sup_wide - sup).abs() <= 1e-6 * sup.max(1.0);
    let lipschitz_est = lip_of(&base, h);
    let lipschitz_refined = lip_of(&fine, h / 2.0);
    let lipschitz =
        lipschitz_refined.is_finite() && lipschitz_refined <= 1.01 * lipschitz_est + 1e-12;
    Ok(A3Report {
        bounded,
        sup,
        lipschitz_est,
        lipschitz_refined,
        lipschitz,
    })
}
