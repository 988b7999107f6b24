//! Marchenko–Pastur numerics and a contour-quadrature oracle.
//!
//! The asymptotic means and variances used by [`crate::asymptotics`] are
//! closed forms of contour integrals in the companion Stieltjes variable
//! `m̲`, through the inverse map
//!
//! ```text
//! z(m̲) = −1/m̲ + y/(1 + m̲).
//! ```
//!
//! This module evaluates those integrals numerically with the periodic
//! trapezoid rule on a circle, so the closed forms can be checked
//! independently.
//!
//! Contour geometry for `y ∈ (0, 1)`: the support `[a, b]` of the law maps
//! to the real interval `[−1/(1−√y), −1/(1+√y)]` in the `m̲` plane. That
//! interval contains the poles `−1` and `1/(y−1)` of the integrands and the
//! branch points of `log z(m̲)`; `m̲ = 0` lies to its right. A valid contour
//! is any circle that encloses the interval and leaves `0` outside,
//! traversed counter-clockwise.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Marchenko–Pastur law `F_y`: the limiting spectrum of `XX'/n` for a
/// `p × n` matrix of standardised i.i.d. entries with `p/n → y`.
///
/// The continuous part lives on `[a, b] = [(1−√y)², (1+√y)²]`. For `y > 1`
/// there is an additional atom of mass `1 − 1/y` at zero, and the density
/// integrates to `1/y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpLaw {
    pub y: f64,
    pub a: f64,
    pub b: f64,
}

impl MpLaw {
    pub fn new(y: f64) -> Result<Self> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::DegenerateRatio { y, range: "(0, ∞)" });
        }
        let s = y.sqrt();
        Ok(Self {
            y,
            a: (1.0 - s).powi(2),
            b: (1.0 + s).powi(2),
        })
    }

    /// Density of the continuous part; zero outside `[a, b]`.
    pub fn density(&self, x: f64) -> f64 {
        if x <= self.a || x >= self.b || x <= 0.0 {
            return 0.0;
        }
        ((self.b - x) * (x - self.a)).sqrt() / (2.0 * PI * self.y * x)
    }

    /// Mass of the continuous part, `min(1, 1/y)`.
    pub fn continuous_mass(&self) -> f64 {
        (1.0 / self.y).min(1.0)
    }

    /// Mass of the atom at zero (nonzero only for `y > 1`).
    pub fn atom_at_zero(&self) -> f64 {
        1.0 - self.continuous_mass()
    }

    // Substitution x = c − r cos θ turns the square-root edges into sin²θ,
    // which makes the integrand smooth.
    fn theta_integrand(&self, f: &impl Fn(f64) -> f64, theta: f64) -> f64 {
        let c = 0.5 * (self.a + self.b);
        let r = 0.5 * (self.b - self.a);
        let x = c - r * theta.cos();
        let s = theta.sin();
        f(x) * r * r * s * s / (2.0 * PI * self.y * x)
    }

    /// `∫ f(x) g_y(x) dx` over the continuous part.
    ///
    /// After the cosine substitution the integrand is an even, `2π`-periodic
    /// function of `θ`, so the trapezoid rule on `[0, π]` converges
    /// geometrically. Nodes are doubled until successive estimates differ by
    /// at most `tol`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
        const MAX_INTERVALS: usize = 1 << 22;
        let mut intervals = 64usize;
        let mut sum: f64 = (1..intervals)
            .map(|k| self.theta_integrand(&f, PI * k as f64 / intervals as f64))
            .sum();
        let mut estimate = sum * PI / intervals as f64;
        loop {
            // Only the odd nodes of the refined grid are new.
            let refined = 2 * intervals;
            let h = PI / refined as f64;
            sum += (0..intervals)
                .map(|k| self.theta_integrand(&f, (2 * k + 1) as f64 * h))
                .sum::<f64>();
            let next = sum * h;
            let change = (next - estimate).abs();
            intervals = refined;
            estimate = next;
            if change <= tol {
                return Ok(estimate);
            }
            if intervals >= MAX_INTERVALS || !estimate.is_finite() {
                return Err(Error::NonConvergent {
                    change,
                    nodes: intervals,
                });
            }
        }
    }

    /// Distribution function, including the atom at zero when `y > 1`.
    pub fn cdf(&self, x: f64) -> f64 {
        let atom = if x >= 0.0 { self.atom_at_zero() } else { 0.0 };
        if x <= self.a {
            return atom;
        }
        if x >= self.b {
            return atom + self.continuous_mass();
        }
        let c = 0.5 * (self.a + self.b);
        let r = 0.5 * (self.b - self.a);
        let theta_x = ((c - x) / r).clamp(-1.0, 1.0).acos();
        let part = adaptive_simpson(&|t| self.theta_integrand(&|_| 1.0, t), 0.0, theta_x, 1e-13, 40);
        atom + part.clamp(0.0, self.continuous_mass())
    }
}

/// `g_y(x)`, the Marchenko–Pastur density.
pub fn mp_density(x: f64, y: f64) -> Result<f64> {
    Ok(MpLaw::new(y)?.density(x))
}

fn check_unit_ratio(y: f64) -> Result<()> {
    if y > 0.0 && y < 1.0 {
        Ok(())
    } else {
        Err(Error::DegenerateRatio { y, range: "(0, 1)" })
    }
}

/// Absolute tolerance used by [`mp_moment`] and [`clrt_mp_integral`].
pub const MP_QUADRATURE_TOL: f64 = 1e-9;

/// `∫ x^k dF_y(x)` by quadrature, for `k ≤ 8` and `y ∈ (0, 1)`.
pub fn mp_moment(k: u32, y: f64) -> Result<f64> {
    if k > 8 {
        return Err(Error::InvalidParameter(format!("moment order {k} exceeds 8")));
    }
    check_unit_ratio(y)?;
    MpLaw::new(y)?.integrate(|x| x.powi(k as i32), MP_QUADRATURE_TOL)
}

/// `∫ (x − log x − 1) dF_y(x)` by quadrature.
pub fn clrt_mp_integral(y: f64) -> Result<f64> {
    check_unit_ratio(y)?;
    MpLaw::new(y)?.integrate(|x| x - x.ln() - 1.0, MP_QUADRATURE_TOL)
}

/// `d(y) = −1 − (1/y − 1) log(1 − y)`, the almost-sure limit of
/// `log|S_n|/p − log|Σ|/p`.
pub fn d_limit(y: f64) -> Result<f64> {
    check_unit_ratio(y)?;
    Ok(-1.0 - (1.0 - y) * (-y).ln_1p() / y)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, depth)
}

/// Empirical spectral distribution `F(x) = #{λ_i ≤ x} / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Esd {
    eigenvalues: Vec<f64>,
}

impl Esd {
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidInput("empty spectrum".into()));
        }
        if let Some(i) = eigenvalues.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Right-continuous step CDF.
    pub fn cdf(&self, x: f64) -> f64 {
        let count = self.eigenvalues.partition_point(|&v| v <= x);
        count as f64 / self.eigenvalues.len() as f64
    }

    /// `(1/N) Σ 1/(λ_i − z)` for `Im z > 0`.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Stieltjes transform needs Im z > 0, got {z}"
            )));
        }
        let sum: Complex64 = self.eigenvalues.iter().map(|&l| 1.0 / (l - z)).sum();
        Ok(sum / self.eigenvalues.len() as f64)
    }

    /// `sup_x |F(x) − F_y(x)|`, attained at one side of a jump.
    pub fn sup_distance(&self, law: &MpLaw) -> f64 {
        let n = self.eigenvalues.len() as f64;
        let mut worst = 0.0_f64;
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            let f = law.cdf(l);
            // Ties collapse onto the same point; the bounds still bracket it.
            worst = worst.max((i as f64 / n - f).abs());
            worst = worst.max(((i + 1) as f64 / n - f).abs());
        }
        worst
    }
}

/// The contour identities behind the closed-form null laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    /// First mean term for `f(x) = x − log x − 1`; equals `−log(1−y)/2`.
    M11,
    /// `(y/2πi)∮ log z(m̲) · m̲/(1+m̲)³ dm̲ = y/2`.
    M12,
    /// Third mean term for `f`; equals `−y − log(1−y)`.
    M13,
    /// Double-contour variance term for `f`; equals `−2y − 2 log(1−y)`.
    V11,
    /// `(1/2πi)∮ f(z(m̲))/(1+m̲)² dm̲ = 0`.
    V12,
    /// Mean of the limit of `∫ g dG_n` with `g(x) = (x−1)² − 2yx + y`;
    /// equals `y(1 + Δ + y)`.
    XgMean,
    /// Variance of the same; equals `4y²`.
    XgVar,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::M11,
        Identity::M12,
        Identity::M13,
        Identity::V11,
        Identity::V12,
        Identity::XgMean,
        Identity::XgVar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::M11 => "m11",
            Identity::M12 => "m12",
            Identity::M13 => "m13",
            Identity::V11 => "v11",
            Identity::V12 => "v12",
            Identity::XgMean => "xg-mean",
            Identity::XgVar => "xg-var",
        }
    }

    /// The closed-form value the quadrature should reproduce.
    pub fn closed_form(self, y: f64, delta: f64) -> f64 {
        let l = (-y).ln_1p();
        match self {
            Identity::M11 => -0.5 * l,
            Identity::M12 => 0.5 * y,
            Identity::M13 => -y - l,
            Identity::V11 => -2.0 * y - 2.0 * l,
            Identity::V12 => 0.0,
            Identity::XgMean => y * (1.0 + delta + y),
            Identity::XgVar => 4.0 * y * y,
        }
    }

    pub fn is_double(self) -> bool {
        matches!(self, Identity::V11 | Identity::XgVar)
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Minimum number of trapezoid nodes on a contour.
pub const MIN_NODES: usize = 64;
/// Default starting node count.
pub const DEFAULT_NODES: usize = 512;
/// Doubling stops once successive estimates agree this closely.
pub const CONVERGED_CHANGE: f64 = 1e-10;
/// A result whose last doubling moved it by more than this is rejected.
pub const MAX_ACCEPTED_CHANGE: f64 = 1e-7;
const MAX_SINGLE_NODES: usize = 1 << 18;
const MAX_DOUBLE_NODES: usize = 1 << 13;

/// A counter-clockwise circle in the `m̲` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub center: Complex64,
    pub radius: f64,
    /// Starting node count; doubled until converged.
    pub nodes: usize,
}

/// Real endpoints of the image of the Marchenko–Pastur support.
fn support_image(y: f64) -> (f64, f64) {
    let s = y.sqrt();
    (-1.0 / (1.0 - s), -1.0 / (1.0 + s))
}

impl ContourSpec {
    /// Circle centred on the midpoint of the support image whose radius
    /// sits halfway between the image's endpoints and the pole at `0`.
    pub fn for_ratio(y: f64) -> Result<Self> {
        Self::with_gap_fraction(y, 0.5)
    }

    /// Concentric family: `radius = half_width + frac · gap`, where the gap
    /// is the distance from the right end of the support image to `0`.
    /// `frac ∈ (0, 1)` sweeps the whole valid annulus.
    pub fn with_gap_fraction(y: f64, frac: f64) -> Result<Self> {
        check_unit_ratio(y)?;
        if !(frac > 0.0 && frac < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gap fraction must lie in (0, 1), got {frac}"
            )));
        }
        let (lo, hi) = support_image(y);
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let spec = Self {
            center: Complex64::new(center, 0.0),
            radius: half + frac * (-hi),
            nodes: DEFAULT_NODES,
        };
        spec.validate(y)?;
        Ok(spec)
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    /// Checks that the circle encloses the support image, excludes `0`, and
    /// passes no closer than `radius/100` to any singular point.
    pub fn validate(&self, y: f64) -> Result<()> {
        check_unit_ratio(y)?;
        if self.nodes < MIN_NODES {
            return Err(Error::InvalidParameter(format!(
                "contour needs at least {MIN_NODES} nodes, got {}",
                self.nodes
            )));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "contour radius must be positive, got {}",
                self.radius
            )));
        }
        let (lo, hi) = support_image(y);
        let inside = |x: f64| (Complex64::new(x, 0.0) - self.center).norm() < self.radius;
        if !inside(lo) || !inside(hi) {
            return Err(Error::InvalidParameter(format!(
                "contour must enclose the support image [{lo:.6}, {hi:.6}]"
            )));
        }
        if inside(0.0) {
            return Err(Error::InvalidParameter(
                "contour must leave m = 0 outside".into(),
            ));
        }
        let required = 0.01 * self.radius.min(1.0 / (1.0 + y.sqrt()));
        for point in [0.0, -1.0, 1.0 / (y - 1.0), lo, hi] {
            let distance = ((Complex64::new(point, 0.0) - self.center).norm() - self.radius).abs();
            if distance < required {
                return Err(Error::ContourTooClose {
                    point,
                    distance,
                    required,
                });
            }
        }
        Ok(())
    }

    /// Inner circle for double integrals: concentric, with radius halfway
    /// between the support image and this circle.
    fn inner(&self, y: f64) -> Result<Self> {
        let (lo, hi) = support_image(y);
        let reach = (Complex64::new(lo, 0.0) - self.center)
            .norm()
            .max((Complex64::new(hi, 0.0) - self.center).norm());
        let inner = Self {
            radius: 0.5 * (reach + self.radius),
            ..*self
        };
        inner.validate(y)?;
        Ok(inner)
    }
}

/// Contour nodes with `z(m̲)` and a continuous branch of `log z(m̲)`.
struct Discretisation {
    m: Vec<Complex64>,
    z: Vec<Complex64>,
    log_z: Vec<Complex64>,
    /// `dm̲ / (2πi)` for each node.
    weight: Vec<Complex64>,
}

impl Discretisation {
    fn new(spec: &ContourSpec, nodes: usize, y: f64) -> Result<Self> {
        let mut d = Self {
            m: Vec::with_capacity(nodes),
            z: Vec::with_capacity(nodes),
            log_z: Vec::with_capacity(nodes),
            weight: Vec::with_capacity(nodes),
        };
        // θ = 0 is the rightmost point, where z(m̲) > b > 0 is real and the
        // principal log is the right anchor.
        let mut phase = 0.0;
        let mut prev_arg = 0.0;
        for k in 0..nodes {
            let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
            let m = spec.center + spec.radius * e;
            let z = -1.0 / m + y / (1.0 + m);
            let arg = z.arg();
            if k == 0 {
                phase = arg;
            } else {
                let mut step = arg - prev_arg;
                if step > PI {
                    step -= 2.0 * PI;
                } else if step < -PI {
                    step += 2.0 * PI;
                }
                phase += step;
            }
            prev_arg = arg;
            d.m.push(m);
            d.z.push(z);
            d.log_z.push(Complex64::new(z.norm().ln(), phase));
            d.weight.push(spec.radius * e / nodes as f64);
        }
        // Closing step back to the first node: z must not wind around 0.
        let mut step = d.z[0].arg() - prev_arg;
        if step > PI {
            step -= 2.0 * PI;
        } else if step < -PI {
            step += 2.0 * PI;
        }
        let winding = (phase + step - d.log_z[0].im) / (2.0 * PI);
        if winding.abs() > 0.5 {
            return Err(Error::InvalidParameter(format!(
                "z(m) winds {winding:.0} times around 0 on this contour"
            )));
        }
        Ok(d)
    }

    /// `(1/2πi) ∮ F(m̲, z, log z) dm̲`.
    fn integrate(&self, f: impl Fn(Complex64, Complex64, Complex64) -> Complex64) -> Complex64 {
        (0..self.m.len())
            .map(|k| f(self.m[k], self.z[k], self.log_z[k]) * self.weight[k])
            .sum()
    }
}

/// A test function evaluated on the contour: `(z, log z) ↦ f(z)`.
pub trait SpectralFunction: Fn(Complex64, Complex64) -> Complex64 + Sync {}
impl<T: Fn(Complex64, Complex64) -> Complex64 + Sync> SpectralFunction for T {}

/// `f(x) = x − log x − 1`.
pub fn clrt_function(z: Complex64, log_z: Complex64) -> Complex64 {
    z - log_z - 1.0
}

/// `g(x) = (x − 1)² − 2yx + y`.
pub fn lw_function(y: f64) -> impl Fn(Complex64, Complex64) -> Complex64 + Sync + Copy {
    move |z, _| (z - 1.0) * (z - 1.0) - 2.0 * y * z + y
}

/// Numerical value of a contour integral and its convergence record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourValue {
    pub value: Complex64,
    /// Node count (per contour) of the returned estimate.
    pub nodes: usize,
    /// Change over the final doubling.
    pub change: f64,
}

fn refine(
    spec: &ContourSpec,
    cap: usize,
    mut eval: impl FnMut(usize) -> Result<Complex64>,
) -> Result<ContourValue> {
    let mut nodes = spec.nodes;
    let mut prev = eval(nodes)?;
    loop {
        let next_nodes = nodes * 2;
        let next = eval(next_nodes)?;
        let change = (next - prev).norm();
        nodes = next_nodes;
        if change <= CONVERGED_CHANGE || (nodes >= cap && change <= MAX_ACCEPTED_CHANGE) {
            return Ok(ContourValue {
                value: next,
                nodes,
                change,
            });
        }
        if nodes >= cap || !next.is_finite() {
            return Err(Error::NonConvergent { change, nodes });
        }
        prev = next;
    }
}

fn single(
    spec: &ContourSpec,
    y: f64,
    integrand: impl Fn(Complex64, Complex64, Complex64) -> Complex64,
) -> Result<ContourValue> {
    spec.validate(y)?;
    refine(spec, MAX_SINGLE_NODES, |nodes| {
        Ok(Discretisation::new(spec, nodes, y)?.integrate(&integrand))
    })
}

/// Mean of the Gaussian limit of `p ∫ f d(F^{𝔖_n} − F_{y_n})`:
///
/// ```text
/// −(1/2πi)∮ y m̲ f(z) / ((1+m̲)((1+m̲)² − y m̲²)) dm̲
/// −(Δ/2πi)∮ y m̲ f(z) / (1+m̲)³ dm̲
/// +(y/2πi)∮ f(z) / ((1+m̲)(y m̲ − 1 − m̲)) dm̲
/// ```
pub fn lss_mean(f: impl SpectralFunction, y: f64, delta: f64, spec: &ContourSpec) -> Result<ContourValue> {
    single(spec, y, |m, z, lz| {
        let fz = f(z, lz);
        let one_m = 1.0 + m;
        -y * m * fz / (one_m * (one_m * one_m - y * m * m))
            - delta * y * m * fz / (one_m * one_m * one_m)
            + y * fz / (one_m * (y * m - 1.0 - m))
    })
}

/// Variance of the same limit:
///
/// ```text
/// −(1/2π²)∮∮ f(z₁) f(z₂) / (m̲₁ − m̲₂)² dm̲₁ dm̲₂ − (yΔ/4π²)(∮ f(z)/(1+m̲)² dm̲)²
/// ```
///
/// The double integral uses two disjoint concentric circles: `spec` and an
/// inner one between it and the support image.
pub fn lss_variance(
    f: impl SpectralFunction,
    y: f64,
    delta: f64,
    spec: &ContourSpec,
) -> Result<ContourValue> {
    spec.validate(y)?;
    let inner = spec.inner(y)?;
    refine(spec, MAX_DOUBLE_NODES, |nodes| {
        let outer_d = Discretisation::new(spec, nodes, y)?;
        let inner_d = Discretisation::new(&inner, nodes, y)?;
        let fo: Vec<Complex64> = (0..nodes)
            .map(|k| f(outer_d.z[k], outer_d.log_z[k]) * outer_d.weight[k])
            .collect();
        let fi: Vec<Complex64> = (0..nodes)
            .map(|k| f(inner_d.z[k], inner_d.log_z[k]) * inner_d.weight[k])
            .collect();
        let mut double = Complex64::new(0.0, 0.0);
        for (m2, w2) in outer_d.m.iter().zip(&fo) {
            let row: Complex64 = inner_d
                .m
                .iter()
                .zip(&fi)
                .map(|(m1, w1)| {
                    let d = m1 - m2;
                    w1 / (d * d)
                })
                .sum();
            double += row * w2;
        }
        // With weights dm̲/(2πi): −(1/2π²)(2πi)² = 2, −(yΔ/4π²)(2πi)² = yΔ.
        let j = outer_d.integrate(|m, z, lz| f(z, lz) / ((1.0 + m) * (1.0 + m)));
        Ok(2.0 * double + y * delta * j * j)
    })
}

/// Numerically evaluates one identity.
pub fn contour_integral(identity: Identity, y: f64, delta: f64, spec: &ContourSpec) -> Result<ContourValue> {
    match identity {
        Identity::M11 => single(spec, y, |m, z, lz| {
            let one_m = 1.0 + m;
            -y * m * clrt_function(z, lz) / (one_m * (one_m * one_m - y * m * m))
        }),
        Identity::M12 => single(spec, y, |m, _, lz| {
            let one_m = 1.0 + m;
            y * lz * m / (one_m * one_m * one_m)
        }),
        Identity::M13 => single(spec, y, |m, z, lz| {
            y * clrt_function(z, lz) / ((1.0 + m) * (y * m - 1.0 - m))
        }),
        Identity::V11 => lss_variance(clrt_function, y, 0.0, spec),
        Identity::V12 => single(spec, y, |m, z, lz| clrt_function(z, lz) / ((1.0 + m) * (1.0 + m))),
        Identity::XgMean => lss_mean(lw_function(y), y, delta, spec),
        Identity::XgVar => lss_variance(lw_function(y), y, delta, spec),
    }
}

/// One line of an identity verification table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRow {
    pub identity: Identity,
    pub y: f64,
    pub delta: f64,
    pub closed_form: f64,
    /// Real part of the quadrature, `None` if it failed.
    pub quadrature: Option<f64>,
    pub imaginary: Option<f64>,
    pub abs_diff: Option<f64>,
    pub nodes: Option<usize>,
    pub error: Option<String>,
    pub pass: bool,
}

/// Largest imaginary part accepted on a real-valued contour integral.
pub const MAX_IMAGINARY: f64 = 1e-8;

/// Evaluates every identity on the `y × Δ` grid with the default contour.
///
/// A row passes when the real part is within `tol` of the closed form and
/// the imaginary part is below [`MAX_IMAGINARY`].
pub fn verify_identities(ys: &[f64], deltas: &[f64], tol: f64) -> Vec<VerificationRow> {
    let mut rows = Vec::with_capacity(ys.len() * deltas.len() * Identity::ALL.len());
    for &y in ys {
        for &delta in deltas {
            for identity in Identity::ALL {
                let closed_form = identity.closed_form(y, delta);
                let result =
                    ContourSpec::for_ratio(y).and_then(|spec| contour_integral(identity, y, delta, &spec));
                rows.push(match result {
                    Ok(v) => {
                        let diff = (v.value.re - closed_form).abs();
                        VerificationRow {
                            identity,
                            y,
                            delta,
                            closed_form,
                            quadrature: Some(v.value.re),
                            imaginary: Some(v.value.im),
                            abs_diff: Some(diff),
                            nodes: Some(v.nodes),
                            error: None,
                            pass: diff <= tol && v.value.im.abs() <= MAX_IMAGINARY,
                        }
                    }
                    Err(e) => VerificationRow {
                        identity,
                        y,
                        delta,
                        closed_form,
                        quadrature: None,
                        imaginary: None,
                        abs_diff: None,
                        nodes: None,
                        error: Some(e.to_string()),
                        pass: false,
                    },
                });
            }
        }
    }
    rows
}
