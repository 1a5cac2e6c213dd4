//! Exactly solvable Dirac operators on two-dimensional model geometries.
//!
//! Three models are provided:
//!
//! * the flat unit-area torus, diagonalised by plane waves `e^{2πi p·x}`;
//! * the torus twisted by a line bundle of integer flux `k` (Landau levels);
//! * the unit round sphere twisted by a monopole of integer charge `q`.
//!
//! Only the flat torus has a position-space realisation: multiplication
//! operators act on its truncated plane-wave basis with exact matrix
//! elements. The twisted models carry their spectra and the data of the
//! Lichnerowicz decomposition.
//!
//! # Flat-torus conventions
//!
//! Spinors are `C²` with `γ1 = iσ1`, `γ2 = iσ2`, grading `Γ = σ3`. On the
//! plane wave with momentum `p` the Dirac operator `D = Σ γj ∂j` acts as
//! `−2π(p1 σ1 + p2 σ2)`, so `D² = 4π²|p|²`. Dense matrices are indexed
//! spinor-major, `s · K + i`, with `K = (2M+1)²` labels ordered with `p1`
//! slowest; the first half of the basis has chirality `+`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charclass::{Domain, IdempotentField};
use crate::error::{Error, Result};
use crate::fourier;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which model a [`SpectralModel`] realises, with its cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    /// Plane waves with `|p1|, |p2| ≤ cutoff`.
    FlatTorus { cutoff: usize },
    /// Landau levels `0 ..= levels` on the torus with flux `flux`.
    Landau { flux: i64, levels: usize },
    /// Monopole harmonics on the sphere with level index up to `cutoff`.
    Monopole { charge: i64, cutoff: usize },
}

/// Quantum numbers labelling a spectral level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Quantum {
    Plane {
        p1: i64,
        p2: i64,
    },
    /// Index of the magnetic Laplacian level the state lives in.
    Landau {
        n: usize,
    },
    /// Level index `n` with `D² = n(n + |q|)`.
    Monopole {
        n: usize,
    },
}

/// An eigenspace of `D²` inside one chirality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralLevel {
    pub d_squared: f64,
    pub chirality: i8,
    pub multiplicity: u64,
    pub quantum: Quantum,
}

impl SpectralLevel {
    /// `|λ|` for the Dirac eigenvalues `±λ` supported on this level.
    pub fn abs_eigenvalue(&self) -> f64 {
        self.d_squared.sqrt()
    }

    pub fn label(&self) -> String {
        match self.quantum {
            Quantum::Plane { p1, p2 } => format!("plane({p1},{p2})"),
            Quantum::Landau { n } => format!("landau(n={n})"),
            Quantum::Monopole { n } => format!("monopole(n={n})"),
        }
    }
}

/// Terms of the Lichnerowicz formula `D² = Δ + F + r/4` on one level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LichnerowiczTerms {
    pub laplacian: f64,
    pub curvature: f64,
    pub scalar_curvature: f64,
}

/// A Dirac operator given by its exact spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralModel {
    kind: ModelKind,
    levels: Vec<SpectralLevel>,
}

/// Zero threshold for `D²` eigenvalues, which are exact up to rounding.
const ZERO_MODE_TOL: f64 = 1e-9;

/// Untwisted Dirac operator on the flat unit-area torus.
pub fn flat_torus_dirac(cutoff: usize) -> Result<SpectralModel> {
    if cutoff < 2 {
        return Err(Error::Argument(format!("mode cutoff {cutoff} < 2")));
    }
    let m = cutoff as i64;
    let mut levels = Vec::with_capacity(2 * (2 * cutoff + 1).pow(2));
    for chirality in [1i8, -1] {
        for p1 in -m..=m {
            for p2 in -m..=m {
                levels.push(SpectralLevel {
                    d_squared: 4.0 * PI * PI * (p1 * p1 + p2 * p2) as f64,
                    chirality,
                    multiplicity: 1,
                    quantum: Quantum::Plane { p1, p2 },
                });
            }
        }
    }
    Ok(SpectralModel {
        kind: ModelKind::FlatTorus { cutoff },
        levels,
    })
}

/// Torus twisted by a line bundle of flux `k ≠ 0`.
///
/// With `B = 2π|k|`, the chirality carrying the zero modes (that of
/// `sign k`) has `D²` levels `2Bn`, `0 ≤ n ≤ N`; the other has `2B(n+1)`,
/// `0 ≤ n < N`. Every level has multiplicity `|k|`.
pub fn landau_model(flux: i64, levels: usize) -> Result<SpectralModel> {
    if flux == 0 {
        return Err(Error::Argument("zero flux: use flat_torus_dirac".into()));
    }
    if levels < 1 {
        return Err(Error::Argument("level cutoff must be at least 1".into()));
    }
    let b = 2.0 * PI * flux.unsigned_abs() as f64;
    let s = flux.signum() as i8;
    let mult = flux.unsigned_abs();
    let mut out = Vec::with_capacity(2 * levels + 1);
    for n in 0..=levels {
        out.push(SpectralLevel {
            d_squared: 2.0 * b * n as f64,
            chirality: s,
            multiplicity: mult,
            quantum: Quantum::Landau { n },
        });
    }
    for n in 0..levels {
        out.push(SpectralLevel {
            d_squared: 2.0 * b * (n + 1) as f64,
            chirality: -s,
            multiplicity: mult,
            quantum: Quantum::Landau { n },
        });
    }
    Ok(SpectralModel {
        kind: ModelKind::Landau { flux, levels },
        levels: out,
    })
}

/// Unit round sphere twisted by a monopole of charge `q`.
///
/// `D²` has levels `n(n + |q|)` of multiplicity `2n + |q|` in each chirality
/// for `1 ≤ n ≤ L`, plus `|q|` zero modes of chirality `sign q`.
pub fn monopole_model(charge: i64, cutoff: usize) -> Result<SpectralModel> {
    if cutoff < 1 {
        return Err(Error::Argument("angular cutoff must be at least 1".into()));
    }
    let aq = charge.unsigned_abs();
    let s: i8 = if charge < 0 { -1 } else { 1 };
    let mut out = Vec::with_capacity(2 * cutoff + 1);
    if aq > 0 {
        out.push(SpectralLevel {
            d_squared: 0.0,
            chirality: s,
            multiplicity: aq,
            quantum: Quantum::Monopole { n: 0 },
        });
    }
    for chirality in [s, -s] {
        for n in 1..=cutoff {
            let n64 = n as u64;
            out.push(SpectralLevel {
                d_squared: (n64 * (n64 + aq)) as f64,
                chirality,
                multiplicity: 2 * n64 + aq,
                quantum: Quantum::Monopole { n },
            });
        }
    }
    Ok(SpectralModel {
        kind: ModelKind::Monopole { charge, cutoff },
        levels: out,
    })
}

impl SpectralModel {
    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::FlatTorus { .. } => "flat-torus",
            ModelKind::Landau { .. } => "landau",
            ModelKind::Monopole { .. } => "monopole",
        }
    }

    pub fn dimension(&self) -> usize {
        2
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn levels(&self) -> &[SpectralLevel] {
        &self.levels
    }

    /// Flux or charge, zero for the flat torus.
    pub fn topological_charge(&self) -> i64 {
        match self.kind {
            ModelKind::FlatTorus { .. } => 0,
            ModelKind::Landau { flux, .. } => flux,
            ModelKind::Monopole { charge, .. } => charge,
        }
    }

    /// Magnitude of the twisting curvature term: `B = 2π|k|` for Landau,
    /// `|q|/2` for the monopole, zero for the flat torus.
    pub fn twist_strength(&self) -> f64 {
        match self.kind {
            ModelKind::FlatTorus { .. } => 0.0,
            ModelKind::Landau { flux, .. } => 2.0 * PI * flux.unsigned_abs() as f64,
            ModelKind::Monopole { charge, .. } => charge.unsigned_abs() as f64 / 2.0,
        }
    }

    /// Retained dimension of the truncated space.
    pub fn basis_dimension(&self) -> u64 {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }

    pub fn max_d_squared(&self) -> f64 {
        self.levels.iter().map(|l| l.d_squared).fold(0.0, f64::max)
    }

    /// Signed count of zero modes, `dim ker D⁺ − dim ker D⁻`.
    pub fn zero_mode_index(&self) -> i64 {
        self.levels
            .iter()
            .filter(|l| l.d_squared.abs() < ZERO_MODE_TOL)
            .map(|l| l.chirality as i64 * l.multiplicity as i64)
            .sum()
    }

    /// Dirac eigenvalues with multiplicities, ascending. A nonzero `D²`
    /// level of multiplicity `m` in each chirality carries `±√μ`, each `m` times.
    pub fn dirac_eigenvalues(&self) -> Vec<(f64, u64)> {
        let mut out: Vec<(f64, u64)> = Vec::new();
        for l in &self.levels {
            if l.d_squared.abs() < ZERO_MODE_TOL {
                out.push((0.0, l.multiplicity));
            } else {
                let lam = l.abs_eigenvalue();
                out.push((if l.chirality > 0 { lam } else { -lam }, l.multiplicity));
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, u64)> = Vec::new();
        for (v, m) in out {
            match merged.last_mut() {
                Some((w, k)) if (*w - v).abs() <= 1e-12 * (1.0 + v.abs()) => *k += m,
                _ => merged.push((v, m)),
            }
        }
        merged
    }

    /// Whether the nonzero `D²` spectra of the two chiralities agree as multisets.
    pub fn is_spectrally_symmetric(&self) -> bool {
        let mut count: BTreeMap<u64, i64> = BTreeMap::new();
        for l in self
            .levels
            .iter()
            .filter(|l| l.d_squared.abs() >= ZERO_MODE_TOL)
        {
            *count.entry(l.d_squared.to_bits()).or_default() +=
                l.chirality as i64 * l.multiplicity as i64;
        }
        count.values().all(|&c| c == 0)
    }

    /// Bound on `|Σ_omitted χ m e^{−tμ}|` for the levels beyond the cutoff.
    pub fn tail_bound(&self, t: f64) -> f64 {
        match self.kind {
            ModelKind::FlatTorus { cutoff } => {
                // each chirality: at most 8r labels with |p|∞ = r, all with |p|² ≥ r²
                let a = 4.0 * PI * PI * t;
                ring_tail(cutoff as f64, a)
            }
            ModelKind::Landau { flux, levels } => {
                let x = 4.0 * PI * flux.unsigned_abs() as f64 * t;
                flux.unsigned_abs() as f64 * (-x * (levels + 1) as f64).exp() / (1.0 - (-x).exp())
            }
            ModelKind::Monopole { charge, cutoff } => {
                let q = charge.unsigned_abs() as f64;
                let term = |n: f64| (2.0 * n + q) * (-t * n * (n + q)).exp();
                let n = (cutoff + 1) as f64;
                // term ratios decrease in n, so the first one bounds the rest
                let ratio = (2.0 * n + 2.0 + q) / (2.0 * n + q) * (-t * (2.0 * n + 1.0 + q)).exp();
                if ratio >= 1.0 {
                    f64::INFINITY
                } else {
                    term(n) / (1.0 - ratio)
                }
            }
        }
    }

    /// The terms of `D² = Δ + F + r/4` for one level, from closed forms
    /// that do not use the model's eigenvalue formula.
    pub fn lichnerowicz_terms(&self, level: &SpectralLevel) -> LichnerowiczTerms {
        let c = level.chirality as f64;
        match (self.kind, level.quantum) {
            (ModelKind::FlatTorus { .. }, Quantum::Plane { p1, p2 }) => LichnerowiczTerms {
                laplacian: (2.0 * PI * p1 as f64).powi(2) + (2.0 * PI * p2 as f64).powi(2),
                curvature: 0.0,
                scalar_curvature: 0.0,
            },
            (ModelKind::Landau { flux, .. }, Quantum::Landau { n }) => {
                // magnetic Laplacian levels B(2n+1); the Clifford action of
                // the curvature is -B on the chirality of sign(k)
                let b = 2.0 * PI * flux.unsigned_abs() as f64;
                LichnerowiczTerms {
                    laplacian: b * (2 * n + 1) as f64,
                    curvature: -b * c * flux.signum() as f64,
                    scalar_curvature: 0.0,
                }
            }
            (ModelKind::Monopole { charge, .. }, Quantum::Monopole { n }) => {
                // sections of spin weight s have Bochner spectrum j(j+1) - s²
                let q = charge.unsigned_abs() as f64;
                let rel = if charge < 0 { -c } else { c };
                let s = if rel > 0.0 {
                    (q - 1.0) / 2.0
                } else {
                    (q + 1.0) / 2.0
                };
                let j = (q - 1.0) / 2.0 + n as f64;
                LichnerowiczTerms {
                    laplacian: j * (j + 1.0) - s * s,
                    curvature: -rel * q / 2.0,
                    scalar_curvature: 2.0,
                }
            }
            _ => unreachable!("levels are built with the quantum numbers of their model"),
        }
    }

    /// CSV with columns `eigenvalue, chirality, multiplicity, d_squared, label`.
    /// `eigenvalue` is `|λ|`, the Dirac eigenvalues being `±|λ|`.
    pub fn write_spectrum_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "eigenvalue",
            "chirality",
            "multiplicity",
            "d_squared",
            "label",
        ])?;
        for l in &self.levels {
            w.write_record([
                format!("{:.17e}", l.abs_eigenvalue()),
                l.chirality.to_string(),
                l.multiplicity.to_string(),
                format!("{:.17e}", l.d_squared),
                l.label(),
            ])?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv writer>".into(),
            source,
        })?;
        Ok(())
    }
}

/// `Σ_{r > m} 8r e^{−a r²}`, summed until the remainder is negligible.
fn ring_tail(m: f64, a: f64) -> f64 {
    let mut sum = 0.0;
    let mut r = m + 1.0;
    loop {
        let term = 8.0 * r * (-a * r * r).exp();
        sum += term;
        // the ratio of consecutive terms is below e^{-a(2r+1)} (r+1)/r
        let ratio = (-a * (2.0 * r + 1.0)).exp() * (r + 1.0) / r;
        if ratio < 0.5 && term * ratio / (1.0 - ratio) < 1e-18 * sum.max(1e-300) || term == 0.0 {
            return sum + term * ratio / (1.0 - ratio).max(0.5);
        }
        r += 1.0;
        if r > m + 1e7 {
            return f64::INFINITY;
        }
    }
}

/// `‖D² − (Δ + F + r/4)‖` on the truncated space. All three operators are
/// diagonal in the model basis, so this is the largest level-wise deviation.
pub fn lichnerowicz_residual(model: &SpectralModel) -> f64 {
    model
        .levels
        .iter()
        .map(|l| {
            let t = model.lichnerowicz_terms(l);
            (l.d_squared - (t.laplacian + t.curvature + t.scalar_curvature / 4.0)).abs()
        })
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Fourier data and operators on the flat torus

/// Fourier coefficients `f̂(p)` of a scalar function on the unit torus,
/// `f(x) = Σ f̂(p) e^{2πi p·x}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourierData {
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

impl FourierData {
    pub fn from_terms(terms: impl IntoIterator<Item = ((i64, i64), Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (p, c) in terms {
            *coeffs.entry(p).or_insert(ZERO) += c;
        }
        coeffs.retain(|_, c| *c != ZERO);
        FourierData { coeffs }
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::from_terms([((0, 0), c.into())])
    }

    pub fn plane_wave(p: (i64, i64)) -> Self {
        Self::from_terms([(p, ONE)])
    }

    /// `cos 2π p·x`.
    pub fn cos(p: (i64, i64)) -> Self {
        Self::from_terms([
            (p, Complex64::new(0.5, 0.0)),
            ((-p.0, -p.1), Complex64::new(0.5, 0.0)),
        ])
    }

    /// `sin 2π p·x`.
    pub fn sin(p: (i64, i64)) -> Self {
        Self::from_terms([
            (p, Complex64::new(0.0, -0.5)),
            ((-p.0, -p.1), Complex64::new(0.0, 0.5)),
        ])
    }

    /// Coefficients of grid samples (see [`fourier`] for the layout) with
    /// `|p|∞ ≤ radius`, dropping those below `drop_tol` in modulus.
    pub fn from_grid(
        samples: &[Complex64],
        n: usize,
        radius: usize,
        drop_tol: f64,
    ) -> Result<Self> {
        if samples.len() != n * n {
            return Err(Error::Dimension(format!(
                "{} samples on an {n}x{n} grid",
                samples.len()
            )));
        }
        if 2 * radius >= n {
            return Err(Error::Argument(format!(
                "radius {radius} not resolved by an {n}-point grid"
            )));
        }
        let hat = fourier::coefficients(samples, n);
        Ok(Self::from_terms(hat.iter().enumerate().filter_map(
            |(idx, &c)| {
                let p = (
                    fourier::signed_mode(idx / n, n),
                    fourier::signed_mode(idx % n, n),
                );
                (p.0.unsigned_abs() as usize <= radius
                    && p.1.unsigned_abs() as usize <= radius
                    && c.norm() > drop_tol)
                    .then_some((p, c))
            },
        )))
    }

    pub fn get(&self, p: (i64, i64)) -> Complex64 {
        self.coeffs.get(&p).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.coeffs.iter().map(|(p, c)| (*p, *c))
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|p|∞` with a nonzero coefficient.
    pub fn support_radius(&self) -> usize {
        self.coeffs
            .keys()
            .map(|p| p.0.unsigned_abs().max(p.1.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Complex64 {
        self.iter()
            .map(|(p, c)| {
                c * Complex64::new(0.0, 2.0 * PI * (p.0 as f64 * x + p.1 as f64 * y)).exp()
            })
            .sum()
    }

    /// Samples on an `n × n` grid.
    pub fn sample(&self, n: usize) -> Vec<Complex64> {
        let mut grid = vec![ZERO; n * n];
        for (p, c) in self.iter() {
            let i = p.0.rem_euclid(n as i64) as usize;
            let j = p.1.rem_euclid(n as i64) as usize;
            grid[i * n + j] += c;
        }
        fourier::fft2(&mut grid, n, true);
        grid
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        Self::from_terms(self.iter().map(|(p, a)| (p, a * c)))
    }

    pub fn add(&self, other: &FourierData) -> Self {
        Self::from_terms(self.iter().chain(other.iter()))
    }

    /// Pointwise product (convolution of coefficients).
    pub fn mul(&self, other: &FourierData) -> Self {
        Self::from_terms(self.iter().flat_map(|(p, a)| {
            other
                .iter()
                .map(move |(q, b)| ((p.0 + q.0, p.1 + q.1), a * b))
        }))
    }

    /// Whether the function is real-valued, `f̂(−p) = conj f̂(p)`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.iter()
            .all(|(p, c)| (self.get((-p.0, -p.1)) - c.conj()).norm() <= tol)
    }

    pub fn l2_norm_squared(&self) -> f64 {
        self.iter().map(|(_, c)| c.norm_sqr()).sum()
    }
}

/// Fourier coefficients of a `k × k` matrix-valued function on the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFourierData {
    size: usize,
    coeffs: BTreeMap<(i64, i64), DMatrix<Complex64>>,
}

impl MatrixFourierData {
    pub fn new(size: usize, coeffs: BTreeMap<(i64, i64), DMatrix<Complex64>>) -> Result<Self> {
        if coeffs.values().any(|m| m.shape() != (size, size)) {
            return Err(Error::Dimension(format!(
                "coefficients must be {size}x{size}"
            )));
        }
        Ok(MatrixFourierData { size, coeffs })
    }

    /// Scalar function times the `1 × 1` identity.
    pub fn scalar(f: &FourierData) -> Self {
        MatrixFourierData {
            size: 1,
            coeffs: f
                .iter()
                .map(|(p, c)| (p, DMatrix::from_element(1, 1, c)))
                .collect(),
        }
    }

    /// Constant matrix function.
    pub fn constant(m: DMatrix<Complex64>) -> Self {
        let size = m.nrows();
        MatrixFourierData {
            size,
            coeffs: BTreeMap::from([((0, 0), m)]),
        }
    }

    /// Coefficients with `|p|∞ ≤ radius` of a torus-sampled matrix field.
    pub fn from_field(e: &IdempotentField, radius: usize) -> Result<Self> {
        let Domain::Torus { n } = e.domain() else {
            return Err(Error::Unsupported("Fourier data needs a torus grid".into()));
        };
        let k = e.size();
        let mut coeffs: BTreeMap<(i64, i64), DMatrix<Complex64>> = BTreeMap::new();
        for a in 0..k {
            for b in 0..k {
                let samples: Vec<Complex64> = e.values().iter().map(|m| m[(a, b)]).collect();
                let f = FourierData::from_grid(&samples, n, radius, 0.0)?;
                for (p, c) in f.iter() {
                    coeffs.entry(p).or_insert_with(|| DMatrix::zeros(k, k))[(a, b)] = c;
                }
            }
        }
        Ok(MatrixFourierData { size: k, coeffs })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), &DMatrix<Complex64>)> + '_ {
        self.coeffs.iter().map(|(p, m)| (*p, m))
    }

    pub fn get(&self, p: (i64, i64)) -> Option<&DMatrix<Complex64>> {
        self.coeffs.get(&p)
    }

    pub fn support_radius(&self) -> usize {
        self.coeffs
            .keys()
            .map(|p| p.0.unsigned_abs().max(p.1.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }

    /// `self − c·1`.
    pub fn minus_identity(&self, c: f64) -> Self {
        let mut out = self.clone();
        let zero = out
            .coeffs
            .entry((0, 0))
            .or_insert_with(|| DMatrix::zeros(self.size, self.size));
        for i in 0..self.size {
            zero[(i, i)] -= Complex64::new(c, 0.0);
        }
        out
    }
}

/// Translation-covariant operator on spinor ⊗ `C^k` ⊗ `L²(T²)`: the block
/// at shift `q` maps the plane wave `p` to `p + q`. Blocks are `2k × 2k`,
/// spinor-major (`s·k + i`).
#[derive(Clone, Debug, PartialEq)]
pub struct FourierOperator {
    size: usize,
    blocks: Vec<((i64, i64), DMatrix<Complex64>)>,
}

impl FourierOperator {
    /// Multiplication by a matrix function, `1_spinor ⊗ â(q)`.
    pub fn multiplication(a: &MatrixFourierData) -> Self {
        let id2 = DMatrix::<Complex64>::identity(2, 2);
        FourierOperator {
            size: a.size,
            blocks: a.iter().map(|(q, m)| (q, id2.kronecker(m))).collect(),
        }
    }

    /// `[D, a] = c(da)`, with block `D(q) ⊗ â(q)` where `D(q) = −2π(q1σ1 + q2σ2)`.
    pub fn dirac_commutator(a: &MatrixFourierData) -> Self {
        FourierOperator {
            size: a.size,
            blocks: a
                .iter()
                .filter(|(q, _)| *q != (0, 0))
                .map(|(q, m)| (q, dirac_symbol(q).kronecker(m)))
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn blocks(&self) -> &[((i64, i64), DMatrix<Complex64>)] {
        &self.blocks
    }

    /// Galerkin compression to the plane waves with `|p|∞ ≤ cutoff`, as a
    /// dense matrix in the spinor-major layout (`(s·k + i)·K + label`).
    pub fn to_dense(&self, cutoff: usize) -> DMatrix<Complex64> {
        let side = 2 * cutoff + 1;
        let labels = side * side;
        let dim = 2 * self.size * labels;
        let mut out = DMatrix::zeros(dim, dim);
        let m = cutoff as i64;
        for (q, block) in &self.blocks {
            for p1 in -m..=m {
                for p2 in -m..=m {
                    let (r1, r2) = (p1 + q.0, p2 + q.1);
                    if r1.abs() > m || r2.abs() > m {
                        continue;
                    }
                    let col = label_index(p1, p2, cutoff);
                    let row = label_index(r1, r2, cutoff);
                    for a in 0..2 * self.size {
                        for b in 0..2 * self.size {
                            out[(a * labels + row, b * labels + col)] += block[(a, b)];
                        }
                    }
                }
            }
        }
        out
    }
}

/// Spinor matrix of `D` on the plane wave `p`: `−2π(p1σ1 + p2σ2)`.
pub fn dirac_symbol(p: (i64, i64)) -> DMatrix<Complex64> {
    let (a, b) = (-2.0 * PI * p.0 as f64, -2.0 * PI * p.1 as f64);
    DMatrix::from_row_slice(
        2,
        2,
        &[ZERO, Complex64::new(a, -b), Complex64::new(a, b), ZERO],
    )
}

/// Position of the plane wave `(p1, p2)` among the `(2M+1)²` labels.
pub fn label_index(p1: i64, p2: i64, cutoff: usize) -> usize {
    let side = 2 * cutoff as i64 + 1;
    ((p1 + cutoff as i64) * side + p2 + cutoff as i64) as usize
}

/// Plane-wave labels in basis order.
pub fn labels(cutoff: usize) -> Vec<(i64, i64)> {
    let m = cutoff as i64;
    (-m..=m)
        .flat_map(|p1| (-m..=m).map(move |p2| (p1, p2)))
        .collect()
}

/// Even operators preserve the chirality splitting, odd ones swap it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Dense operator on the truncated flat-torus basis, with its parity and any
/// truncation warnings raised while building it.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    matrix: DMatrix<Complex64>,
    parity: Parity,
    warnings: Vec<String>,
}

impl OperatorMatrix {
    /// Checks that the off-parity blocks vanish (within `1e-12` of the norm).
    /// The first half of the basis is chirality `+`.
    pub fn new(matrix: DMatrix<Complex64>, parity: Parity) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() || !n.is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "{}x{} is not an even square matrix",
                n,
                matrix.ncols()
            )));
        }
        let h = n / 2;
        let off = match parity {
            Parity::Even => matrix.view((0, h), (h, h)).norm() + matrix.view((h, 0), (h, h)).norm(),
            Parity::Odd => matrix.view((0, 0), (h, h)).norm() + matrix.view((h, h), (h, h)).norm(),
        };
        if off > 1e-12 * (1.0 + matrix.norm()) {
            return Err(Error::Precondition(format!(
                "block structure contradicts {parity:?} parity"
            )));
        }
        Ok(OperatorMatrix {
            matrix,
            parity,
            warnings: Vec::new(),
        })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.matrix.singular_values().max()
    }

    fn with_warnings(mut self, warnings: Vec<String>) -> Self {
        self.warnings = warnings;
        self
    }
}

fn flat_cutoff(model: &SpectralModel) -> Result<usize> {
    match model.kind {
        ModelKind::FlatTorus { cutoff } => Ok(cutoff),
        _ => Err(Error::Unsupported(format!(
            "multiplication operators are only realised on the flat torus, not on the {} model",
            model.name()
        ))),
    }
}

fn truncation_warnings(support: usize, cutoff: usize) -> Vec<String> {
    if 2 * support > cutoff {
        vec![format!("Fourier support radius {support} exceeds half the mode cutoff {cutoff}; tails are truncated")]
    } else {
        Vec::new()
    }
}

/// The Dirac operator on the truncated flat-torus basis.
pub fn dirac_operator(model: &SpectralModel) -> Result<OperatorMatrix> {
    let cutoff = flat_cutoff(model)?;
    let k = (2 * cutoff + 1).pow(2);
    let mut d = DMatrix::zeros(2 * k, 2 * k);
    for (i, p) in labels(cutoff).into_iter().enumerate() {
        let s = dirac_symbol(p);
        d[(i, k + i)] = s[(0, 1)];
        d[(k + i, i)] = s[(1, 0)];
    }
    OperatorMatrix::new(d, Parity::Odd)
}

/// Diagonal of `D²` on the truncated flat-torus basis.
pub fn d_squared_diagonal(model: &SpectralModel) -> Result<Vec<f64>> {
    let cutoff = flat_cutoff(model)?;
    let per: Vec<f64> = labels(cutoff)
        .into_iter()
        .map(|(a, b)| 4.0 * PI * PI * (a * a + b * b) as f64)
        .collect();
    Ok(per.iter().chain(per.iter()).copied().collect())
}

/// Multiplication by a scalar function on the truncated flat-torus basis.
pub fn multiplication_operator(model: &SpectralModel, a: &FourierData) -> Result<OperatorMatrix> {
    let cutoff = flat_cutoff(model)?;
    let dense = FourierOperator::multiplication(&MatrixFourierData::scalar(a)).to_dense(cutoff);
    Ok(OperatorMatrix::new(dense, Parity::Even)?
        .with_warnings(truncation_warnings(a.support_radius(), cutoff)))
}

/// `[D, op(a)]`, formed from the dense product.
pub fn dirac_commutator(model: &SpectralModel, a: &FourierData) -> Result<OperatorMatrix> {
    let d = dirac_operator(model)?;
    let op = multiplication_operator(model, a)?;
    let c = d.matrix() * op.matrix() - op.matrix() * d.matrix();
    let warnings = op.warnings.clone();
    Ok(OperatorMatrix::new(c, Parity::Odd)?.with_warnings(warnings))
}

/// `ad(D²)^k x`. `D²` is diagonal, so each commutator scales entry `(i, j)`
/// by `μ_i − μ_j`.
pub fn iterated_commutator(
    model: &SpectralModel,
    x: &OperatorMatrix,
    k: usize,
) -> Result<OperatorMatrix> {
    let mu = d_squared_diagonal(model)?;
    if mu.len() != x.dimension() {
        return Err(Error::Dimension(
            "operator does not live on the model basis".into(),
        ));
    }
    let mut m = x.matrix.clone();
    for _ in 0..k {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                m[(i, j)] *= mu[i] - mu[j];
            }
        }
    }
    Ok(OperatorMatrix {
        matrix: m,
        parity: x.parity,
        warnings: x.warnings.clone(),
    })
}

/// The degree-one map `v = d/|d|` behind [`bott_projection`], with
/// `d = (sin 2πx, sin 2πy, 1 + cos 2πx + cos 2πy)`.
pub fn bott_vector(x: f64, y: f64) -> [f64; 3] {
    let (sx, cx) = (2.0 * PI * x).sin_cos();
    let (sy, cy) = (2.0 * PI * y).sin_cos();
    let d = [sx, sy, 1.0 + cx + cy];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    [d[0] / r, d[1] / r, d[2] / r]
}

/// Rank-one projection `(1 + v·σ)/2` for a unit vector `v`.
pub fn spin_projection(v: [f64; 3]) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.5 * (1.0 + v[2]), 0.0),
            Complex64::new(0.5 * v[0], -0.5 * v[1]),
            Complex64::new(0.5 * v[0], 0.5 * v[1]),
            Complex64::new(0.5 * (1.0 - v[2]), 0.0),
        ],
    )
}

/// Degree-one Bott-type projection `e = (1 + v·σ)/2` on an `N × N` torus grid.
///
/// `v` is analytic, so the Fourier coefficients of `e` decay exponentially
/// and every Galerkin truncation sees a smooth symbol.
pub fn bott_projection(grid_size: usize) -> Result<IdempotentField> {
    if grid_size < 16 {
        return Err(Error::Argument(format!("grid size {grid_size} < 16")));
    }
    IdempotentField::from_fn(Domain::Torus { n: grid_size }, |[x, y]| {
        spin_projection(bott_vector(x, y))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::clifford_generators;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flat_torus_spectrum() {
        let m = flat_torus_dirac(3).unwrap();
        assert_eq!(m.basis_dimension(), 2 * 49);
        assert_eq!(m.zero_mode_index(), 0);
        let ev = m.dirac_eigenvalues();
        assert_eq!(ev.iter().find(|(v, _)| *v == 0.0).unwrap().1, 2);
        // (±1, 0) and (0, ±1) each carry ±2π
        let two_pi = ev
            .iter()
            .find(|(v, _)| (*v - 2.0 * PI).abs() < 1e-12)
            .unwrap();
        assert_eq!(two_pi.1, 4);
        assert!(flat_torus_dirac(1).is_err());
    }

    // The momentum symbol -2π(p·σ) squares to 4π²|p|² and has eigenvalues ±2π|p|.
    #[test]
    fn dirac_symbol_eigenvalues() {
        let s = dirac_symbol((1, 0));
        let eig = s.clone().symmetric_eigenvalues();
        let mut e: Vec<f64> = eig.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        assert!((e[0] + 2.0 * PI).abs() < 1e-12 && (e[1] - 2.0 * PI).abs() < 1e-12);
        // agrees with Σ γj ∂j on e^{2πi p·x}
        let rep = clifford_generators(2).unwrap();
        let p = (2i64, -3i64);
        let direct = (rep.gamma(1) * c(0.0, 2.0 * PI * p.0 as f64))
            + (rep.gamma(2) * c(0.0, 2.0 * PI * p.1 as f64));
        assert!((direct - dirac_symbol(p)).norm() < 1e-12);
        assert!(
            (rep.chirality()
                - DMatrix::from_diagonal(&nalgebra::dvector![c(1.0, 0.0), c(-1.0, 0.0)]))
            .norm()
                == 0.0
        );
    }

    // Landau levels of the magnetic Schrödinger operator are B(2n+1); the
    // Clifford term shifts them by -B and +B on the two chiralities.
    #[test]
    fn landau_spectrum() {
        let m = landau_model(3, 10).unwrap();
        let b = 6.0 * PI;
        let zero: Vec<_> = m.levels().iter().filter(|l| l.d_squared == 0.0).collect();
        assert_eq!(zero.len(), 1);
        assert_eq!((zero[0].multiplicity, zero[0].chirality), (3, 1));
        let first = m
            .levels()
            .iter()
            .map(|l| l.d_squared)
            .filter(|&x| x > 0.0)
            .fold(f64::INFINITY, f64::min);
        assert!((first - 12.0 * PI).abs() < 1e-12);
        for l in m.levels() {
            let Quantum::Landau { n } = l.quantum else {
                unreachable!()
            };
            let oracle = b * (2 * n + 1) as f64 - l.chirality as f64 * b;
            assert!((l.d_squared - oracle).abs() < 1e-10);
        }
        let flipped = landau_model(-3, 10).unwrap();
        for (a, b) in m.levels().iter().zip(flipped.levels()) {
            assert_eq!(a.chirality, -b.chirality);
            assert_eq!(a.d_squared, b.d_squared);
        }
        assert!(landau_model(0, 5).is_err());
    }

    #[test]
    fn monopole_spectrum() {
        let m = monopole_model(2, 10).unwrap();
        assert_eq!(m.zero_mode_index(), 2);
        let n1: Vec<_> = m
            .levels()
            .iter()
            .filter(|l| l.quantum == Quantum::Monopole { n: 1 })
            .collect();
        assert!(n1.iter().all(|l| l.multiplicity == 4 && l.d_squared == 3.0));
        let m0 = monopole_model(0, 10).unwrap();
        assert_eq!(m0.zero_mode_index(), 0);
        let smallest = m0
            .dirac_eigenvalues()
            .iter()
            .map(|(v, _)| v.abs())
            .fold(f64::INFINITY, f64::min);
        assert!((smallest - 1.0).abs() < 1e-14);
        assert_eq!(monopole_model(-2, 4).unwrap().zero_mode_index(), -2);
    }

    // Untwisted spinors on the round sphere: D has eigenvalues ±(j + 1/2)
    // with multiplicity 2j + 1 for half-integer j.
    #[test]
    fn round_sphere_dirac_spectrum() {
        let m0 = monopole_model(0, 8).unwrap();
        let ev = m0.dirac_eigenvalues();
        for j2 in (1..16).step_by(2) {
            let lam = (j2 as f64 + 1.0) / 2.0;
            let pos = ev.iter().find(|(v, _)| (*v - lam).abs() < 1e-12).unwrap();
            let neg = ev.iter().find(|(v, _)| (*v + lam).abs() < 1e-12).unwrap();
            assert_eq!((pos.1, neg.1), (j2 as u64 + 1, j2 as u64 + 1));
        }
    }

    #[test]
    fn spectral_symmetry_all_models() {
        for m in [
            flat_torus_dirac(4).unwrap(),
            landau_model(2, 7).unwrap(),
            landau_model(-1, 3).unwrap(),
            monopole_model(-3, 5).unwrap(),
            monopole_model(0, 5).unwrap(),
        ] {
            assert!(m.is_spectrally_symmetric(), "{}", m.name());
        }
    }

    #[test]
    fn lichnerowicz() {
        assert_eq!(lichnerowicz_residual(&flat_torus_dirac(5).unwrap()), 0.0);
        for k in [-3, -1, 1, 2, 3] {
            assert!(lichnerowicz_residual(&landau_model(k, 20).unwrap()) < 1e-10);
        }
        for q in -3..=3 {
            assert!(
                lichnerowicz_residual(&monopole_model(q, 20).unwrap()) < 1e-10,
                "q={q}"
            );
        }
    }

    #[test]
    fn unit_function_is_identity() {
        let m = flat_torus_dirac(2).unwrap();
        let op = multiplication_operator(&m, &FourierData::constant(1.0)).unwrap();
        assert_eq!(op.matrix(), &DMatrix::identity(50, 50));
        assert_eq!(op.parity(), Parity::Even);
        assert!(op.warnings().is_empty());
    }

    #[test]
    fn plane_wave_is_shift() {
        let m = flat_torus_dirac(3).unwrap();
        let op = multiplication_operator(&m, &FourierData::plane_wave((1, 0))).unwrap();
        let k = 49;
        for (j, p) in labels(3).into_iter().enumerate() {
            let col = op.matrix().column(j);
            if p.0 < 3 {
                let i = label_index(p.0 + 1, p.1, 3);
                assert_eq!(col[i], c(1.0, 0.0));
                assert_eq!(col.iter().filter(|z| **z != ZERO).count(), 1);
            } else {
                assert!(col.iter().all(|z| *z == ZERO));
            }
            assert_eq!(
                op.matrix()[(k + (j + 7) % k, k + j)],
                if p.0 < 3 { c(1.0, 0.0) } else { ZERO }
            );
        }
    }

    #[test]
    fn commutator_with_constant_vanishes() {
        let m = flat_torus_dirac(3).unwrap();
        let cm = dirac_commutator(&m, &FourierData::constant(c(2.0, 1.0))).unwrap();
        assert_eq!(cm.matrix().norm(), 0.0);
        assert_eq!(cm.parity(), Parity::Odd);
    }

    // ‖c(da)‖ = |da| = 2π for a = e^{2πix}.
    #[test]
    fn commutator_norm_plane_wave() {
        let m = flat_torus_dirac(4).unwrap();
        let cm = dirac_commutator(&m, &FourierData::plane_wave((1, 0))).unwrap();
        assert!((cm.operator_norm() - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn commutator_matches_fourier_blocks() {
        let a = FourierData::cos((1, 0))
            .mul(&FourierData::sin((0, 2)))
            .add(&FourierData::plane_wave((-1, 1)));
        let m = flat_torus_dirac(4).unwrap();
        let dense = dirac_commutator(&m, &a).unwrap();
        let blocks = FourierOperator::dirac_commutator(&MatrixFourierData::scalar(&a)).to_dense(4);
        assert!((dense.matrix() - blocks).norm() < 1e-10);
    }

    // largest singular value by power iteration on A†A
    fn spectral_norm(a: &DMatrix<Complex64>) -> f64 {
        let mut v =
            nalgebra::DVector::from_fn(a.ncols(), |i, _| c(1.0 + (i % 7) as f64, (i % 3) as f64));
        let mut sigma = 0.0;
        for _ in 0..500 {
            let w = a.ad_mul(&(a * &v));
            let norm = w.norm();
            let next = norm.sqrt() / v.norm().sqrt();
            v = w.unscale(norm);
            if (next - sigma).abs() < 1e-10 * next {
                return next;
            }
            sigma = next;
        }
        sigma
    }

    #[test]
    fn commutator_bounded_in_cutoff() {
        let a = FourierData::cos((1, 1)).add(&FourierData::sin((0, 1)));
        let norms: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&m| {
                // the dense product is too slow at M = 16; the block form agrees
                // with it (see commutator_matches_fourier_blocks)
                if m <= 8 {
                    spectral_norm(
                        dirac_commutator(&flat_torus_dirac(m).unwrap(), &a)
                            .unwrap()
                            .matrix(),
                    )
                } else {
                    spectral_norm(
                        &FourierOperator::dirac_commutator(&MatrixFourierData::scalar(&a))
                            .to_dense(m),
                    )
                }
            })
            .collect();
        let bound = 2.0 * PI * (2f64.sqrt() + 1.0);
        assert!(norms.iter().all(|&n| n <= bound + 1e-9), "{norms:?}");
        assert!((norms[2] - norms[1]).abs() < 0.05 * norms[2]);
    }

    #[test]
    fn iterated_commutators() {
        let m = flat_torus_dirac(3).unwrap();
        let x = dirac_commutator(&m, &FourierData::plane_wave((1, 0))).unwrap();
        assert_eq!(iterated_commutator(&m, &x, 0).unwrap(), x);
        let id = multiplication_operator(&m, &FourierData::constant(1.0)).unwrap();
        assert_eq!(
            iterated_commutator(&m, &id, 2).unwrap().matrix().norm(),
            0.0
        );
        let d = dirac_operator(&m).unwrap();
        let d2 = d.matrix() * d.matrix();
        let oracle = &d2 * x.matrix() - x.matrix() * &d2;
        let got = iterated_commutator(&m, &x, 1).unwrap();
        assert!((got.matrix() - oracle).camax() < 1e-10 * d2.camax());
        assert_eq!(got.parity(), Parity::Odd);
    }

    #[test]
    fn d_squared_is_diagonal() {
        let m = flat_torus_dirac(2).unwrap();
        let d = dirac_operator(&m).unwrap();
        let d2 = d.matrix() * d.matrix();
        let diag = d_squared_diagonal(&m).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            diag.len(),
            diag.iter().map(|&x| c(x, 0.0)),
        ));
        assert!((d2 - expected).camax() < 1e-10);
    }

    #[test]
    fn parity_checked() {
        let m = DMatrix::<Complex64>::identity(4, 4);
        assert!(OperatorMatrix::new(m.clone(), Parity::Odd).is_err());
        assert!(OperatorMatrix::new(m, Parity::Even).is_ok());
    }

    #[test]
    fn truncation_warning() {
        let m = flat_torus_dirac(4).unwrap();
        let op = multiplication_operator(&m, &FourierData::plane_wave((3, 0))).unwrap();
        assert_eq!(op.warnings().len(), 1);
    }

    #[test]
    fn twisted_models_have_no_position_space() {
        let m = landau_model(1, 4).unwrap();
        assert!(matches!(
            multiplication_operator(&m, &FourierData::constant(1.0)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn bott_projection_pointwise() {
        let e = bott_projection(32).unwrap();
        for m in e.values() {
            assert!((m * m - m).norm() <= 1e-12);
            assert!((m.trace() - c(1.0, 0.0)).norm() < 1e-14);
        }
        assert!(bott_projection(8).is_err());
    }

    #[test]
    fn bott_fourier_round_trip() {
        let n = 64;
        let e = bott_projection(n).unwrap();
        let data = MatrixFourierData::from_field(&e, 20).unwrap();
        let x = (0.3, 0.7);
        let direct = spin_projection(bott_vector(x.0, x.1));
        let mut sum = DMatrix::<Complex64>::zeros(2, 2);
        for (p, m) in data.iter() {
            sum += m * Complex64::new(0.0, 2.0 * PI * (p.0 as f64 * x.0 + p.1 as f64 * x.1)).exp();
        }
        assert!((sum - direct).norm() < 1e-6);
    }

    #[test]
    fn spectrum_csv() {
        let mut buf = Vec::new();
        monopole_model(1, 2)
            .unwrap()
            .write_spectrum_csv(&mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("eigenvalue,chirality,multiplicity"));
        assert_eq!(text.lines().count(), 1 + 5);
    }

    proptest! {
        // Columns of op(a) hold the coefficients of a shifted by the column
        // label; away from the box edge Parseval gives ‖column‖² = Σ|â|².
        #[test]
        fn parseval_columns(coeffs in proptest::collection::vec((-2i64..=2, -2i64..=2, -1.0f64..1.0, -1.0f64..1.0), 1..8)) {
            let a = FourierData::from_terms(coeffs.into_iter().map(|(p, q, re, im)| ((p, q), c(re, im))));
            let m = flat_torus_dirac(4).unwrap();
            let op = multiplication_operator(&m, &a).unwrap();
            let j = label_index(0, 0, 4);
            let col = op.matrix().column(j).norm_squared();
            prop_assert!((col - a.l2_norm_squared()).abs() < 1e-12);
        }

        #[test]
        fn commutator_parity_flip(p1 in -2i64..=2, p2 in -2i64..=2, k in 0usize..3) {
            let m = flat_torus_dirac(3).unwrap();
            let a = FourierData::plane_wave((p1, p2));
            let op = multiplication_operator(&m, &a).unwrap();
            let cm = dirac_commutator(&m, &a).unwrap();
            prop_assert_eq!(op.parity().flip(), cm.parity());
            prop_assert_eq!(iterated_commutator(&m, &cm, k).unwrap().parity(), Parity::Odd);
        }
    }
}
