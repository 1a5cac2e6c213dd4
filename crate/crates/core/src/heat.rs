//! Heat-kernel side of the index theorem.
//!
//! * McKean–Singer supertraces over the exact model spectra.
//! * The Mehler kernel of the two-dimensional Getzler oscillator, with an
//!   independent Crank–Nicolson solve as oracle.
//! * The Getzler rescaling transform and its small-`u` limit on the flat torus.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{Blade, Generators, MultiVector};
use crate::models::SpectralModel;

/// `Str e^{−tD²}` over the retained spectrum with a bound on the omitted part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Supertrace {
    pub t: f64,
    pub value: f64,
    pub tail_bound: f64,
}

/// McKean–Singer supertrace `Σ χ m e^{−tμ}` over the levels of the model.
pub fn heat_supertrace(model: &SpectralModel, t: f64) -> Result<Supertrace> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Argument(format!("time t = {t} must be positive")));
    }
    let value = neumaier_sum(
        model
            .levels()
            .iter()
            .map(|l| l.chirality as f64 * l.multiplicity as f64 * (-t * l.d_squared).exp()),
    );
    Ok(Supertrace {
        t,
        value,
        tail_bound: model.tail_bound(t),
    })
}

/// Compensated sum, independent of magnitude ordering.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Complex variant of [`neumaier_sum`].
pub fn neumaier_sum_complex(values: impl IntoIterator<Item = Complex64>) -> Complex64 {
    let (re, im): (Vec<f64>, Vec<f64>) = values.into_iter().map(|c| (c.re, c.im)).unzip();
    Complex64::new(neumaier_sum(re), neumaier_sum(im))
}

/// Below this `|z|` the Mehler factors use their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-3;

/// `(z/sinh z, z coth z)` as functions of `w = z²`, by series near zero.
fn mehler_factors(w: Complex64) -> Result<(Complex64, Complex64)> {
    if w.im.abs() <= 1e-14 * (1.0 + w.re.abs()) && w.re <= -PI * PI * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "z² = {w} is at or beyond the first pole of coth (z = iπ)"
        )));
    }
    if w.norm() < SERIES_THRESHOLD * SERIES_THRESHOLD {
        let f = Complex64::new(1.0, 0.0) - w / 6.0 + w * w * (7.0 / 360.0);
        let g = Complex64::new(1.0, 0.0) + w / 3.0 - w * w / 45.0;
        return Ok((f, g));
    }
    // both factors are even in z, so the branch of the root is irrelevant
    let z = w.sqrt();
    let sh = z.sinh();
    Ok((z / sh, z * z.cosh() / sh))
}

/// Curvature parameter `ρ` of a `2 × 2` antisymmetric `R = [[0, ρ], [−ρ, 0]]`.
fn oscillator_parameter(r: &DMatrix<Complex64>) -> Result<Complex64> {
    if r.shape() != (2, 2) {
        return Err(Error::Unsupported(format!(
            "only two-dimensional curvature is supported, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    let scale = 1.0 + r.norm();
    if r[(0, 0)].norm() > 1e-14 * scale
        || r[(1, 1)].norm() > 1e-14 * scale
        || (r[(0, 1)] + r[(1, 0)]).norm() > 1e-14 * scale
    {
        return Err(Error::Precondition(
            "curvature matrix is not antisymmetric".into(),
        ));
    }
    Ok(r[(0, 1)])
}

/// `R = [[0, ρ], [−ρ, 0]]`.
pub fn curvature_block(rho: Complex64) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            rho,
            -rho,
            Complex64::new(0.0, 0.0),
        ],
    )
}

/// The block with real eigenvalues `±b`, `[[0, −ib], [ib, 0]]`, for which the
/// oscillator is confining with frequency `b/4` and the determinant factor
/// is `(tb/2)/sinh(tb/2)`.
pub fn confining_curvature(b: f64) -> DMatrix<Complex64> {
    curvature_block(Complex64::new(0.0, -b))
}

/// Mehler kernel of `K = −Σ(∂i + ¼ Rij vj)² + F` in two dimensions:
///
/// `(4πt)^{-1} det^{1/2}((tR/2)/sinh(tR/2)) exp(−(1/4t)(v, (tR/2)coth(tR/2) v)) exp(−tF)`.
///
/// With `z² = −(tρ/2)²` the determinant factor is `z/sinh z` and the quadratic
/// form is `z coth z · |v|²`. The twist `F` is any even form (a scalar or a
/// two-form); its exponential is taken in the exterior algebra.
pub fn mehler_kernel(
    r: &DMatrix<Complex64>,
    twist: &MultiVector,
    t: f64,
    v: [f64; 2],
) -> Result<MultiVector> {
    if !(t > 0.0) {
        return Err(Error::Argument(format!("time t = {t} must be positive")));
    }
    let rho = oscillator_parameter(r)?;
    let w = -(rho * t / 2.0) * (rho * t / 2.0);
    let (f, g) = mehler_factors(w)?;
    let v2 = v[0] * v[0] + v[1] * v[1];
    let scalar = f * (-g * v2 / (4.0 * t)).exp() / (4.0 * PI * t);
    Ok(twist.scale(-t).exp().scale(scalar))
}

/// Resolution parameters for [`oscillator_fd_oracle`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FdGrid {
    /// Points on the finest grid; the study also uses `N/2` and `N/4`.
    pub points: usize,
    /// Dirichlet boundary at `±half_width`; `None` picks `max(3, 12√t)`.
    pub half_width: Option<f64>,
    /// Start time of the narrow Gaussian; the study also starts at `s0/2`.
    pub start_time: f64,
    /// Time steps per grid spacing (`Δt = h / steps_per_h`).
    pub steps_per_h: f64,
}

impl Default for FdGrid {
    fn default() -> Self {
        FdGrid {
            points: 512,
            half_width: None,
            start_time: 0.02,
            steps_per_h: 16.0,
        }
    }
}

/// Output of the finite-difference oracle.
#[derive(Clone, Debug, Serialize)]
pub struct FdSolution {
    /// Extrapolated kernel at `v = 0`, including the twist factor.
    #[serde(skip)]
    pub value: MultiVector,
    /// Extrapolated scalar kernel at `v = 0`.
    pub origin: f64,
    /// Observed order in the grid spacing from the `N/4, N/2, N` sequence.
    pub order: f64,
    /// `∫ p(t, v) dv` on the finest grid before the twist factor.
    pub mass: f64,
    /// Finest-grid scalar kernel at `v = 0` before extrapolation in `h`.
    pub finest: f64,
    /// Grid nodes and the extrapolated one-dimensional factor `q`, with
    /// `p(t, (x, y)) = q(x) q(y)`.
    pub profile: Vec<(f64, f64)>,
}

/// Accepted window for the measured convergence order.
pub const ORDER_WINDOW: (f64, f64) = (1.8, 2.2);

/// Solves `(∂t + K) p = 0` for the two-dimensional oscillator by
/// Crank–Nicolson, independently of the Mehler formula.
///
/// For `R = [[0, ρ], [−ρ, 0]]`, `K = −Δ − (ρ/2)(v2∂1 − v1∂2) + ω²|v|² + F`
/// with `ω² = −ρ²/16`, which must be real. The rotation term annihilates
/// radial functions, so the kernel from the origin is the product of two
/// one-dimensional solutions of `∂t q = q'' − ω² x² q`. Each is started from
/// the free Gaussian at `s0` (and at `s0/2`, Richardson-combined to remove
/// the `O(s0²)` start-up error) and the result is extrapolated in `h`.
pub fn oscillator_fd_oracle(
    r: &DMatrix<Complex64>,
    twist: &MultiVector,
    t: f64,
    grid: FdGrid,
) -> Result<FdSolution> {
    if !(t > 0.0) {
        return Err(Error::Argument(format!("time t = {t} must be positive")));
    }
    let rho = oscillator_parameter(r)?;
    let omega2c = -(rho * rho) / 16.0;
    if omega2c.im.abs() > 1e-12 * (1.0 + omega2c.re.abs()) {
        return Err(Error::Unsupported(
            "ρ² must be real for a real-coefficient oscillator".into(),
        ));
    }
    let omega2 = omega2c.re;
    let s0 = grid.start_time;
    if !(s0 > 0.0 && s0 < t) || grid.points < 64 || grid.steps_per_h <= 0.0 {
        return Err(Error::Argument(format!(
            "invalid grid {grid:?} for t = {t}"
        )));
    }
    let half_width = grid
        .half_width
        .unwrap_or_else(|| (12.0 * t.sqrt()).max(3.0));

    let levels = [grid.points / 4, grid.points / 2, grid.points];
    let mut solutions = Vec::with_capacity(3);
    for &n in &levels {
        let a = solve_1d(omega2, t, s0, n, half_width, grid.steps_per_h)?;
        let b = solve_1d(omega2, t, s0 / 2.0, n, half_width, grid.steps_per_h)?;
        let q: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (4.0 * y - x) / 3.0).collect();
        solutions.push(q);
    }
    let centre = |q: &Vec<f64>| q[q.len() / 2];
    let (c4, c2, c1) = (
        centre(&solutions[0]),
        centre(&solutions[1]),
        centre(&solutions[2]),
    );
    let ratio = (c4 - c2) / (c2 - c1);
    let order = if ratio > 0.0 { ratio.log2() } else { f64::NAN };
    if !(order >= ORDER_WINDOW.0 && order <= ORDER_WINDOW.1) {
        return Err(Error::Convergence {
            order,
            reason: format!("grid sequence {levels:?} is not in the asymptotic regime"),
        });
    }
    // the finest grid contains every node of the N/2 grid at even positions
    let fine = &solutions[2];
    let coarse = &solutions[1];
    let n = grid.points;
    let h = 2.0 * half_width / n as f64;
    let profile: Vec<(f64, f64)> = (0..=n / 2)
        .map(|i| {
            (
                -half_width + 2.0 * i as f64 * h,
                (4.0 * fine[2 * i] - coarse[i]) / 3.0,
            )
        })
        .collect();
    let q0 = (4.0 * c1 - c2) / 3.0;
    let mass_1d: f64 = h * fine.iter().sum::<f64>();
    let origin = q0 * q0;
    Ok(FdSolution {
        value: twist.scale(-t).exp().scale(origin),
        origin,
        order,
        mass: mass_1d * mass_1d,
        finest: c1 * c1,
        profile,
    })
}

/// Crank–Nicolson for `∂t q = q'' − ω² x² q` on `[−L, L]` with `n` intervals
/// and Dirichlet ends, from the free Gaussian at `s0` up to `t`. Returns the
/// values at the `n + 1` nodes.
fn solve_1d(
    omega2: f64,
    t: f64,
    s0: f64,
    n: usize,
    half_width: f64,
    steps_per_h: f64,
) -> Result<Vec<f64>> {
    if !n.is_multiple_of(4) {
        return Err(Error::Argument(format!(
            "grid size {n} must be divisible by 4"
        )));
    }
    let h = 2.0 * half_width / n as f64;
    let x: Vec<f64> = (0..=n).map(|i| -half_width + i as f64 * h).collect();
    let mut q: Vec<f64> = x
        .iter()
        .map(|&x| (-x * x / (4.0 * s0)).exp() / (4.0 * PI * s0).sqrt())
        .collect();
    q[0] = 0.0;
    q[n] = 0.0;
    let span = t - s0;
    let steps = ((span * steps_per_h / h).ceil() as usize).max(1);
    let dt = span / steps as f64;
    let m = n - 1;
    let r = dt / (2.0 * h * h);
    // operator A q = (q_{i+1} - 2 q_i + q_{i-1})/h² - ω² x_i² q_i on the interior
    let diag_a: Vec<f64> = (1..n)
        .map(|i| -2.0 / (h * h) - omega2 * x[i] * x[i])
        .collect();
    let lower = vec![-r; m];
    let upper = vec![-r; m];
    let diag_lhs: Vec<f64> = diag_a.iter().map(|a| 1.0 - 0.5 * dt * a).collect();
    let mut rhs = vec![0.0; m];
    for _ in 0..steps {
        for k in 0..m {
            let i = k + 1;
            rhs[k] = q[i] + 0.5 * dt * (diag_a[k] * q[i] + (q[i - 1] + q[i + 1]) / (h * h));
        }
        let sol = thomas(&lower, &diag_lhs, &upper, &rhs);
        q[1..n].copy_from_slice(&sol);
    }
    Ok(q)
}

/// Tridiagonal solve; `lower[0]` and `upper[m-1]` are ignored.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..m {
        let den = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < m { upper[i] / den } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / den;
    }
    let mut out = vec![0.0; m];
    out[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}

fn check_scale(u: f64) -> Result<()> {
    if u > 0.0 && u <= 1.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "rescaling parameter u = {u} is outside (0, 1]"
        )))
    }
}

/// `(δ_u α)(t, v) = Σ_i u^{−i/2} α(ut, u^{1/2} v)_{[i]}`.
pub fn delta_rescale<F>(alpha: F, u: f64) -> Result<impl Fn(f64, &[f64]) -> MultiVector>
where
    F: Fn(f64, &[f64]) -> MultiVector,
{
    check_scale(u)?;
    Ok(move |t: f64, v: &[f64]| {
        let sv: Vec<f64> = v.iter().map(|x| x * u.sqrt()).collect();
        let value = alpha(u * t, &sv);
        weight_by_degree(&value, |i| u.powf(-(i as f64) / 2.0))
    })
}

/// `r(u, t, v) = u^{dim/2} (δ_u k)(t, v)`, where `dim` is the number of
/// generators of the values of `k`.
pub fn getzler_rescale<F>(k: F, u: f64) -> Result<impl Fn(f64, &[f64]) -> MultiVector>
where
    F: Fn(f64, &[f64]) -> MultiVector,
{
    let delta = delta_rescale(k, u)?;
    Ok(move |t: f64, v: &[f64]| {
        let value = delta(t, v);
        let dim = value.generators().count() as f64;
        value.scale(u.powf(dim / 2.0))
    })
}

fn weight_by_degree(value: &MultiVector, weight: impl Fn(usize) -> f64) -> MultiVector {
    MultiVector::from_terms(
        value.generators(),
        value.terms().map(|(b, c)| (b, c * weight(b.grade()))),
    )
}

/// Heat kernel `p_t(v)` of the Laplacian on the flat unit-area torus.
///
/// Uses the image sum `Σ_m (4πt)^{-1} e^{−|v+m|²/4t}` for `t < 1/4π` and the
/// Fourier series `Σ_p e^{−4π²t|p|²} e^{2πi p·v}` otherwise; either factorises
/// into one-dimensional theta sums.
pub fn flat_torus_heat_kernel(t: f64, v: [f64; 2]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Argument(format!("time t = {t} must be positive")));
    }
    Ok(theta_1d(t, v[0]) * theta_1d(t, v[1]))
}

fn theta_1d(t: f64, x: f64) -> f64 {
    let x = x - x.round();
    let mut terms = Vec::new();
    if t < 1.0 / (4.0 * PI) {
        let norm = 1.0 / (4.0 * PI * t).sqrt();
        terms.push(norm * (-x * x / (4.0 * t)).exp());
        for m in 1i32.. {
            let a = norm * (-(x + m as f64).powi(2) / (4.0 * t)).exp();
            let b = norm * (-(x - m as f64).powi(2) / (4.0 * t)).exp();
            terms.push(a);
            terms.push(b);
            if a + b < 1e-18 * terms[0] {
                break;
            }
        }
    } else {
        terms.push(1.0);
        for p in 1i32.. {
            let w = (-4.0 * PI * PI * t * (p * p) as f64).exp();
            terms.push(2.0 * w * (2.0 * PI * p as f64 * x).cos());
            if w < 1e-18 {
                break;
            }
        }
    }
    neumaier_sum(terms)
}

/// One row of a rescaling table.
#[derive(Clone, Debug, Serialize)]
pub struct RescaleRow {
    pub u: f64,
    /// `r(u, 1, 0)` as a two-generator form.
    #[serde(skip)]
    pub value: MultiVector,
    pub error: f64,
}

/// Result of [`rescaled_limit_check`].
#[derive(Clone, Debug, Serialize)]
pub struct RescaleTable {
    pub twist: f64,
    pub rows: Vec<RescaleRow>,
    /// Least-squares slope of `log error` against `log u`, over rows whose
    /// error is above [`ERROR_FLOOR`].
    pub exponent: f64,
    /// Error at the smallest `u`.
    pub limit_error: f64,
    #[serde(skip)]
    pub target: MultiVector,
}

/// Errors below this are rounding noise and excluded from the rate fit.
pub const ERROR_FLOOR: f64 = 1e-14;

/// Tabulates `‖r(u, 1, 0) − (4π)^{-1} e^{−F}‖` on the flat torus with the
/// constant twist `F = f e1∧e2`.
///
/// The twisted kernel is `k(t, v) = p_t(v) σ(e^{−t f γ1γ2}) = p_t(v)(cos tf − sin tf e12)`:
/// the twist acts by Clifford multiplication, whose symbol is the two-form.
/// Rescaling turns the Clifford factor into `e^{−F}`.
pub fn rescaled_limit_check(f: f64, us: &[f64]) -> Result<RescaleTable> {
    if us.len() < 2 || us.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Argument(
            "u-sequence must be strictly decreasing with at least two entries".into(),
        ));
    }
    let g = Generators::TWO;
    let e12 = g.top();
    let kernel = move |t: f64, v: &[f64]| {
        let p = flat_torus_heat_kernel(t, [v[0], v[1]]).expect("positive time");
        MultiVector::from_terms(
            g,
            [
                (Blade::SCALAR, Complex64::new(p * (t * f).cos(), 0.0)),
                (e12, Complex64::new(-p * (t * f).sin(), 0.0)),
            ],
        )
    };
    let target = MultiVector::blade(g, e12, -f).exp().scale(1.0 / (4.0 * PI));
    let mut rows = Vec::with_capacity(us.len());
    for &u in us {
        let r = getzler_rescale(kernel, u)?;
        let value = r(1.0, &[0.0, 0.0]);
        let error = value.abs_diff(&target);
        rows.push(RescaleRow { u, value, error });
    }
    let exponent = fit_exponent(rows.iter().map(|r| (r.u, r.error)));
    let limit_error = rows.last().map(|r| r.error).unwrap_or(f64::NAN);
    Ok(RescaleTable {
        twist: f,
        rows,
        exponent,
        limit_error,
        target,
    })
}

/// Least-squares slope of `log y` against `log x` over points with
/// `y > ERROR_FLOOR`. If everything is below the floor the convergence is
/// faster than any power and the result is `+∞`; a single point gives `NaN`.
pub fn fit_exponent(points: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .into_iter()
        .filter(|(_, y)| *y > ERROR_FLOOR)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    match pts.len() {
        0 => f64::INFINITY,
        1 => f64::NAN,
        n => {
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            sxy / sxx
        }
    }
}

impl RescaleTable {
    /// CSV with columns `u, error, fitted_exponent, value_scalar, value_e12`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "error", "fitted_exponent", "value_scalar", "value_e12"])?;
        let e12 = Generators::TWO.top();
        for r in &self.rows {
            w.write_record([
                format!("{:.17e}", r.u),
                format!("{:.17e}", r.error),
                format!("{:.17e}", self.exponent),
                format!("{:.17e}", r.value.scalar_part().re),
                format!("{:.17e}", r.value.coefficient(e12).re),
            ])?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv writer>".into(),
            source,
        })?;
        Ok(())
    }
}

/// Geometric sequence of `count` values from `start` down to `end`.
pub fn geometric_sequence(start: f64, end: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let ratio = (end / start).powf(1.0 / (count - 1) as f64);
    (0..count).map(|i| start * ratio.powi(i as i32)).collect()
}
