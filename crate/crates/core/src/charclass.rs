//! Characteristic classes and top-degree integration.
//!
//! Curvatures are matrices of even forms ([`FormMatrix`]). Because even forms
//! commute and have nilpotent positive-degree parts, every power series used
//! here (`x/sinh x`, `log(1 + x)`, `exp`) terminates after at most `n/2`
//! terms, so the results are exact up to rounding.
//!
//! Sampled forms live on two model manifolds, the unit-area flat torus and the
//! unit round sphere, with the coordinate coframe as generators `e1, e2`.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{Blade, Generators, MultiVector};
use crate::fourier;

/// Square matrix whose entries are even forms of degree at least two.
#[derive(Clone, Debug, PartialEq)]
pub struct FormMatrix {
    size: usize,
    gens: Generators,
    entries: Vec<MultiVector>,
}

impl FormMatrix {
    /// Row-major entries. Every entry must be free of degree-0 and odd parts.
    pub fn new(size: usize, gens: Generators, entries: Vec<MultiVector>) -> Result<Self> {
        if entries.len() != size * size || size == 0 {
            return Err(Error::Dimension(format!(
                "{} entries do not form a nonempty {size}x{size} matrix",
                entries.len()
            )));
        }
        for (k, e) in entries.iter().enumerate() {
            if e.generators() != gens {
                return Err(Error::Dimension(format!(
                    "entry {k} has the wrong generator count"
                )));
            }
            if e.scalar_part() != Complex64::new(0.0, 0.0) || e.has_odd_part() {
                return Err(Error::Precondition(format!(
                    "entry ({}, {}) is not a nilpotent even form: {e}",
                    k / size,
                    k % size
                )));
            }
        }
        Ok(FormMatrix {
            size,
            gens,
            entries,
        })
    }

    pub fn zero(size: usize, gens: Generators) -> Self {
        FormMatrix {
            size,
            gens,
            entries: vec![MultiVector::zero(gens); size * size],
        }
    }

    pub fn diagonal(gens: Generators, diag: Vec<MultiVector>) -> Result<Self> {
        let size = diag.len();
        let mut entries = vec![MultiVector::zero(gens); size * size];
        for (i, d) in diag.into_iter().enumerate() {
            entries[i * size + i] = d;
        }
        Self::new(size, gens, entries)
    }

    /// The 2×2 block `[[0, θ], [-θ, 0]]`.
    pub fn skew_block(theta: MultiVector) -> Result<Self> {
        let gens = theta.generators();
        Self::new(
            2,
            gens,
            vec![
                MultiVector::zero(gens),
                theta.clone(),
                -theta,
                MultiVector::zero(gens),
            ],
        )
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn generators(&self) -> Generators {
        self.gens
    }

    pub fn entry(&self, i: usize, j: usize) -> &MultiVector {
        &self.entries[i * self.size + j]
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        (0..self.size)
            .all(|i| (0..self.size).all(|j| (self.entry(i, j) + self.entry(j, i)).max_abs() <= tol))
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &FormMatrix) -> Result<Self> {
        if self.gens != other.gens {
            return Err(Error::Dimension("generator counts differ".into()));
        }
        let n = self.size + other.size;
        let mut entries = vec![MultiVector::zero(self.gens); n * n];
        for i in 0..self.size {
            for j in 0..self.size {
                entries[i * n + j] = self.entry(i, j).clone();
            }
        }
        for i in 0..other.size {
            for j in 0..other.size {
                entries[(i + self.size) * n + j + self.size] = other.entry(i, j).clone();
            }
        }
        Self::new(n, self.gens, entries)
    }

    fn as_work(&self) -> WorkMatrix {
        WorkMatrix {
            size: self.size,
            gens: self.gens,
            entries: self.entries.clone(),
        }
    }
}

/// Unrestricted matrix of forms used while summing series.
#[derive(Clone)]
struct WorkMatrix {
    size: usize,
    gens: Generators,
    entries: Vec<MultiVector>,
}

impl WorkMatrix {
    fn identity(size: usize, gens: Generators) -> Self {
        let mut entries = vec![MultiVector::zero(gens); size * size];
        for i in 0..size {
            entries[i * size + i] = MultiVector::one(gens);
        }
        WorkMatrix {
            size,
            gens,
            entries,
        }
    }

    fn mul(&self, other: &WorkMatrix) -> WorkMatrix {
        let n = self.size;
        let mut entries = vec![MultiVector::zero(self.gens); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = MultiVector::zero(self.gens);
                for k in 0..n {
                    acc += &self.entries[i * n + k]
                        .wedge(&other.entries[k * n + j])
                        .expect("same generators");
                }
                entries[i * n + j] = acc;
            }
        }
        WorkMatrix {
            size: n,
            gens: self.gens,
            entries,
        }
    }

    fn add_scaled(&mut self, other: &WorkMatrix, c: f64) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += &b.scale(c);
        }
    }

    fn scale(&self, c: f64) -> WorkMatrix {
        WorkMatrix {
            size: self.size,
            gens: self.gens,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    fn trace(&self) -> MultiVector {
        (0..self.size).fold(MultiVector::zero(self.gens), |acc, i| {
            acc + self.entries[i * self.size + i].clone()
        })
    }

    fn is_zero(&self) -> bool {
        self.entries.iter().all(MultiVector::is_zero)
    }
}

/// Taylor coefficients of `x / sinh x` in powers of `x²`, by inverting the
/// series of `sinh x / x = Σ x^{2k} / (2k+1)!`.
pub fn x_over_sinh_coefficients(count: usize) -> Vec<f64> {
    let a: Vec<f64> = (0..count)
        .map(|k| 1.0 / (1..=(2 * k + 1)).map(|j| j as f64).product::<f64>())
        .collect();
    let mut c = vec![0.0; count];
    if count > 0 {
        c[0] = 1.0;
    }
    for k in 1..count {
        c[k] = -(1..=k).map(|j| a[j] * c[k - j]).sum::<f64>();
    }
    c
}

/// `Â = det^{1/2}((R/2) / sinh(R/2))`, evaluated as `exp(½ tr log(..))`.
pub fn a_hat(r: &FormMatrix) -> Result<MultiVector> {
    if !r.is_antisymmetric(1e-12) {
        return Err(Error::Precondition(
            "curvature matrix is not antisymmetric".into(),
        ));
    }
    let gens = r.gens;
    // entries have degree >= 2, so (R/2)^{2k} vanishes once 4k > n
    let half_powers = gens.count() / 4;
    let coeffs = x_over_sinh_coefficients(half_powers + 1);
    let x = r.as_work().scale(0.5);
    let x2 = x.mul(&x);

    let id = WorkMatrix::identity(r.size, gens);
    let mut nil = WorkMatrix {
        size: r.size,
        gens,
        entries: vec![MultiVector::zero(gens); r.size * r.size],
    };
    let mut power = id.clone();
    for c in coeffs.iter().skip(1) {
        power = power.mul(&x2);
        nil.add_scaled(&power, *c);
    }

    // log(1 + N) = Σ (-1)^{j+1} N^j / j
    let mut log = WorkMatrix {
        size: r.size,
        gens,
        entries: vec![MultiVector::zero(gens); r.size * r.size],
    };
    let mut npow = id;
    for j in 1..=half_powers.max(1) {
        npow = npow.mul(&nil);
        if npow.is_zero() {
            break;
        }
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        log.add_scaled(&npow, sign / j as f64);
    }
    Ok(log.trace().scale(0.5).exp())
}

/// `ch(F) = tr exp(-F)`.
pub fn chern_character(f: &FormMatrix) -> Result<MultiVector> {
    let gens = f.gens;
    let minus_f = f.as_work().scale(-1.0);
    let mut term = WorkMatrix::identity(f.size, gens);
    let mut sum = term.clone();
    for k in 1..=gens.count() / 2 {
        term = term.mul(&minus_f).scale(1.0 / k as f64);
        if term.is_zero() {
            break;
        }
        sum.add_scaled(&term, 1.0);
    }
    Ok(sum.trace())
}

/// Quadrature domain for sampled 2-forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Domain {
    /// Unit-area flat torus with an `n × n` uniform grid; nodes `(i/n, j/n)`,
    /// generators `e1 = dx`, `e2 = dy`.
    Torus { n: usize },
    /// Unit round sphere with Gauss–Legendre nodes in `z = cos θ` and uniform
    /// nodes in `φ`; generators form the orthonormal coframe `e1 = dθ`,
    /// `e2 = sin θ dφ` (outward orientation).
    Sphere { n_polar: usize, n_azimuth: usize },
}

impl Domain {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Domain::Torus { n } => n >= 4,
            Domain::Sphere { n_polar, n_azimuth } => n_polar >= 4 && n_azimuth >= 4,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "grid too small: {self:?} (need at least 4 nodes per axis)"
            )))
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            Domain::Torus { n } => n * n,
            Domain::Sphere { n_polar, n_azimuth } => n_polar * n_azimuth,
        }
    }

    /// Node coordinates: `(x, y)` on the torus, `(z, φ)` on the sphere.
    pub fn nodes(&self) -> Vec<[f64; 2]> {
        match *self {
            Domain::Torus { n } => (0..n * n)
                .map(|k| [(k / n) as f64 / n as f64, (k % n) as f64 / n as f64])
                .collect(),
            Domain::Sphere { n_polar, n_azimuth } => {
                let (z, _) = gauss_legendre(n_polar);
                let mut out = Vec::with_capacity(n_polar * n_azimuth);
                for &za in &z {
                    for b in 0..n_azimuth {
                        out.push([za, 2.0 * PI * b as f64 / n_azimuth as f64]);
                    }
                }
                out
            }
        }
    }

    /// Quadrature weights against the volume form.
    pub fn weights(&self) -> Vec<f64> {
        match *self {
            Domain::Torus { n } => vec![1.0 / (n * n) as f64; n * n],
            Domain::Sphere { n_polar, n_azimuth } => {
                let (_, w) = gauss_legendre(n_polar);
                let dphi = 2.0 * PI / n_azimuth as f64;
                w.iter()
                    .flat_map(|&wa| std::iter::repeat_n(wa * dphi, n_azimuth))
                    .collect()
            }
        }
    }

    fn coordinate_names(&self) -> [&'static str; 2] {
        match self {
            Domain::Torus { .. } => ["x", "y"],
            Domain::Sphere { .. } => ["z", "phi"],
        }
    }
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = -(PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Differential forms sampled at the nodes of a [`Domain`] (two generators).
#[derive(Clone, Debug)]
pub struct FormField {
    domain: Domain,
    values: Vec<MultiVector>,
}

impl FormField {
    pub fn new(domain: Domain, values: Vec<MultiVector>) -> Result<Self> {
        domain.validate()?;
        if values.len() != domain.node_count() {
            return Err(Error::Dimension(format!(
                "{} values for {} nodes",
                values.len(),
                domain.node_count()
            )));
        }
        for v in &values {
            if v.generators() != Generators::TWO {
                return Err(Error::Dimension("form fields use two generators".into()));
            }
            if v.terms()
                .any(|(_, c)| !c.re.is_finite() || !c.im.is_finite())
            {
                return Err(Error::Input("non-finite form value".into()));
            }
        }
        Ok(FormField { domain, values })
    }

    pub fn from_fn(domain: Domain, f: impl Fn([f64; 2]) -> MultiVector) -> Result<Self> {
        domain.validate()?;
        let values = domain.nodes().into_iter().map(f).collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[MultiVector] {
        &self.values
    }

    /// Pointwise wedge product.
    pub fn wedge(&self, other: &FormField) -> Result<FormField> {
        if self.domain != other.domain {
            return Err(Error::Dimension(
                "form fields live on different grids".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.wedge(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(FormField {
            domain: self.domain,
            values,
        })
    }

    /// Pointwise wedge with a constant form.
    pub fn wedge_constant(&self, form: &MultiVector) -> Result<FormField> {
        let values = self
            .values
            .iter()
            .map(|a| a.wedge(form))
            .collect::<Result<Vec<_>>>()?;
        Ok(FormField {
            domain: self.domain,
            values,
        })
    }

    /// CSV dump: node coordinates followed by real and imaginary parts of the
    /// coefficients of `1, e1, e2, e12`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let [a, b] = self.domain.coordinate_names();
        let blades = [Blade::SCALAR, blade(&[1]), blade(&[2]), blade(&[1, 2])];
        let mut header = vec![a.to_string(), b.to_string()];
        for bl in &blades {
            header.push(format!("{bl}_re"));
            header.push(format!("{bl}_im"));
        }
        w.write_record(&header)?;
        for (node, v) in self.domain.nodes().iter().zip(&self.values) {
            let mut rec = vec![format!("{:.17e}", node[0]), format!("{:.17e}", node[1])];
            for bl in &blades {
                let c = v.coefficient(*bl);
                rec.push(format!("{:.17e}", c.re));
                rec.push(format!("{:.17e}", c.im));
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv writer>".into(),
            source,
        })?;
        Ok(())
    }
}

fn blade(idx: &[usize]) -> Blade {
    Blade::from_indices(idx).expect("distinct indices")
}

/// Quadrature of the top-degree coefficient against the volume form.
pub fn integrate_top(f: &FormField) -> Complex64 {
    let top = Generators::TWO.top();
    let weights = f.domain.weights();
    // compensated summation for reproducibility across grid sizes
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for (v, w) in f.values.iter().zip(weights) {
        let y = v.coefficient(top) * w - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Idempotent-valued field `x ↦ e(x) ∈ M_k(C)` on a quadrature domain.
#[derive(Clone, Debug)]
pub struct IdempotentField {
    domain: Domain,
    size: usize,
    values: Vec<DMatrix<Complex64>>,
}

/// Pointwise idempotency tolerance `‖e² − e‖`.
pub const IDEMPOTENCY_TOL: f64 = 1e-12;

impl IdempotentField {
    pub fn new(domain: Domain, values: Vec<DMatrix<Complex64>>) -> Result<Self> {
        domain.validate()?;
        if values.len() != domain.node_count() || values.is_empty() {
            return Err(Error::Dimension(format!(
                "{} values for {} nodes",
                values.len(),
                domain.node_count()
            )));
        }
        let size = values[0].nrows();
        let rank = values[0].trace();
        for (k, e) in values.iter().enumerate() {
            if e.shape() != (size, size) {
                return Err(Error::Dimension(format!(
                    "node {k}: matrix is not {size}x{size}"
                )));
            }
            let defect = (e * e - e).norm();
            if defect > IDEMPOTENCY_TOL {
                return Err(Error::Input(format!("node {k}: ‖e² − e‖ = {defect:.3e}")));
            }
            if (e.trace() - rank).norm() > 1e-10 {
                return Err(Error::Input(format!(
                    "node {k}: rank jumps from {rank} to {}",
                    e.trace()
                )));
            }
        }
        Ok(IdempotentField {
            domain,
            size,
            values,
        })
    }

    pub fn constant(domain: Domain, e: DMatrix<Complex64>) -> Result<Self> {
        Self::new(domain, vec![e; domain.node_count()])
    }

    pub fn from_fn(domain: Domain, f: impl Fn([f64; 2]) -> DMatrix<Complex64>) -> Result<Self> {
        domain.validate()?;
        let values = domain.nodes().into_iter().map(f).collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Side length `k` of the matrices.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[DMatrix<Complex64>] {
        &self.values
    }

    /// Pointwise rank (the trace, constant over the domain).
    pub fn rank(&self) -> f64 {
        self.values[0].trace().re
    }

    /// Matrix entry `(a, b)` sampled over the grid.
    fn entry_samples(&self, a: usize, b: usize) -> Vec<Complex64> {
        self.values.iter().map(|e| e[(a, b)]).collect()
    }

    /// Entrywise partial derivatives along the two coordinate directions:
    /// `(∂x e, ∂y e)` on the torus, `(∂z e, ∂φ e)` on the sphere.
    fn partials(&self) -> (Vec<DMatrix<Complex64>>, Vec<DMatrix<Complex64>>) {
        let k = self.size;
        let nodes = self.domain.node_count();
        let mut d1 = vec![DMatrix::zeros(k, k); nodes];
        let mut d2 = vec![DMatrix::zeros(k, k); nodes];
        for a in 0..k {
            for b in 0..k {
                let samples = self.entry_samples(a, b);
                let (p1, p2) = match self.domain {
                    Domain::Torus { n } => fourier::gradient(&samples, n),
                    Domain::Sphere { n_polar, n_azimuth } => {
                        sphere_partials(&samples, n_polar, n_azimuth)
                    }
                };
                for m in 0..nodes {
                    d1[m][(a, b)] = p1[m];
                    d2[m][(a, b)] = p2[m];
                }
            }
        }
        (d1, d2)
    }
}

/// `(∂z f, ∂φ f)` on the sphere grid, spectral in `φ`. Smooth functions on the
/// sphere need not be smooth in `z` at the poles, so the polar derivative uses
/// five-point Lagrange differences in `θ` and `∂z = −∂θ / sin θ`.
fn sphere_partials(
    samples: &[Complex64],
    n_polar: usize,
    n_azimuth: usize,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let (z, _) = gauss_legendre(n_polar);
    let mut dz = vec![Complex64::new(0.0, 0.0); samples.len()];
    let mut dphi = dz.clone();
    for a in 0..n_polar {
        let row = &samples[a * n_azimuth..(a + 1) * n_azimuth];
        let d = fourier::derivative_1d(row, 2.0 * PI);
        dphi[a * n_azimuth..(a + 1) * n_azimuth].copy_from_slice(&d);
    }
    let theta: Vec<f64> = z.iter().map(|z| z.acos()).collect();
    let width = 5.min(n_polar);
    for a in 0..n_polar {
        let start = a.saturating_sub(width / 2).min(n_polar - width);
        let stencil: Vec<usize> = (start..start + width).collect();
        let xs: Vec<f64> = stencil.iter().map(|&s| theta[s]).collect();
        let scale = -1.0 / theta[a].sin();
        let w: Vec<f64> = lagrange_derivative_weights(&xs, theta[a])
            .into_iter()
            .map(|w| w * scale)
            .collect();
        for b in 0..n_azimuth {
            dz[a * n_azimuth + b] = stencil
                .iter()
                .zip(&w)
                .map(|(&s, &wk)| samples[s * n_azimuth + b] * wk)
                .sum();
        }
    }
    (dz, dphi)
}

/// Weights `w_k` with `p'(x) = Σ w_k f(x_k)` for the interpolating polynomial.
fn lagrange_derivative_weights(xs: &[f64], x: f64) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|k| {
            let denom: f64 = (0..n).filter(|&j| j != k).map(|j| xs[k] - xs[j]).product();
            let numer: f64 = (0..n)
                .filter(|&m| m != k)
                .map(|m| {
                    (0..n)
                        .filter(|&j| j != k && j != m)
                        .map(|j| x - xs[j])
                        .product::<f64>()
                })
                .sum();
            numer / denom
        })
        .collect()
}

/// Chern character of the Grassmann connection `e∘d` on the range of `e`,
/// whose curvature is `e·de·de`: pointwise `tr exp(−e de de)`, the same
/// sign convention as [`chern_character`].
pub fn ch_de_rham(e: &IdempotentField) -> Result<FormField> {
    let (d1, d2) = e.partials();
    let top = Generators::TWO.top();
    let values = e
        .values
        .iter()
        .enumerate()
        .map(|(m, em)| {
            // de ∧ de = [∂x e, ∂y e] e12 on the torus; on the sphere the
            // orthonormal coframe turns it into [∂φ e, ∂z e] e12
            let commutator = match e.domain {
                Domain::Torus { .. } => &d1[m] * &d2[m] - &d2[m] * &d1[m],
                Domain::Sphere { .. } => &d2[m] * &d1[m] - &d1[m] * &d2[m],
            };
            let curvature = (em * commutator).trace();
            MultiVector::from_terms(
                Generators::TWO,
                [(Blade::SCALAR, em.trace()), (top, -curvature)],
            )
        })
        .collect();
    FormField::new(e.domain, values)
}

/// `(2πi)^{-exponent}`.
pub fn index_prefactor(exponent: u32) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI).powu(exponent).inv()
}

/// `(2πi)^{-dim/2} ∫ ch_dR(e) ∧ Â(R) ∧ ch(F)` over a two-dimensional domain.
pub fn rhs_index(e: &IdempotentField, r: &FormMatrix, f: &FormMatrix) -> Result<Complex64> {
    rhs_index_with_exponent(e, r, f, 1)
}

/// [`rhs_index`] with an explicit power of `2πi` in the prefactor.
pub fn rhs_index_with_exponent(
    e: &IdempotentField,
    r: &FormMatrix,
    f: &FormMatrix,
    exponent: u32,
) -> Result<Complex64> {
    if r.generators() != Generators::TWO || f.generators() != Generators::TWO {
        return Err(Error::Dimension(
            "curvatures must be forms on the two-dimensional domain".into(),
        ));
    }
    let geometric = a_hat(r)?.wedge(&chern_character(f)?)?;
    let density = ch_de_rham(e)?.wedge_constant(&geometric)?;
    Ok(index_prefactor(exponent) * integrate_top(&density))
}

/// Samples of the form `a0 da1 ∧ .. ∧ dan` (`n ≤ 2`) on a torus grid, from grid
/// values of the functions.
pub fn torus_cochain_form(n_grid: usize, functions: &[Vec<Complex64>]) -> Result<FormField> {
    let domain = Domain::Torus { n: n_grid };
    domain.validate()?;
    if functions.is_empty() || functions.len() > 3 {
        return Err(Error::Argument(
            "need between one and three functions".into(),
        ));
    }
    if functions.iter().any(|f| f.len() != n_grid * n_grid) {
        return Err(Error::Dimension(
            "function samples do not match the grid".into(),
        ));
    }
    let g = Generators::TWO;
    let grads: Vec<_> = functions[1..]
        .iter()
        .map(|f| fourier::gradient(f, n_grid))
        .collect();
    let values = (0..n_grid * n_grid)
        .map(|m| {
            let mut form = MultiVector::scalar(g, functions[0][m]);
            for (dx, dy) in &grads {
                let one_form =
                    MultiVector::from_terms(g, [(blade(&[1]), dx[m]), (blade(&[2]), dy[m])]);
                form = form.wedge(&one_form).expect("same generators");
            }
            form
        })
        .collect();
    FormField::new(domain, values)
}
