//! Grassmann and Clifford algebras in even dimension.
//!
//! A [`MultiVector`] is an element of the complex exterior algebra on `n`
//! generators `e1 .. en`, stored sparsely as a map from canonically ordered
//! index sets ([`Blade`]) to coefficients. The Clifford side is the spinor
//! representation of `Cl(n)` with `γi γj + γj γi = -2 δij`, built as a tensor
//! product of Pauli matrices, together with the chirality involution `Γ` and
//! the symbol map `γ_{i1} .. γ_{ik} ↦ e_{i1} ∧ .. ∧ e_{ik}`.
//!
//! The supertrace is normalised so that `Str(γ1 .. γn) = (-2i)^{n/2}`, hence
//! `Str(quantize(a)) = (-2i)^{n/2} · berezin_top(a)` for every multivector.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of generators; keeps `2^n <= 256` terms.
pub const MAX_GENERATORS: usize = 8;

/// Number of generators of an exterior algebra: even, between 2 and 8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generators(u8);

impl Generators {
    pub const TWO: Generators = Generators(2);
    pub const FOUR: Generators = Generators(4);

    pub fn new(n: usize) -> Result<Self> {
        if !(2..=MAX_GENERATORS).contains(&n) || !n.is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "generator count must be even and in 2..={MAX_GENERATORS}, got {n}"
            )));
        }
        Ok(Generators(n as u8))
    }

    pub fn count(self) -> usize {
        self.0 as usize
    }

    /// The blade `e1 ∧ .. ∧ en`.
    pub fn top(self) -> Blade {
        Blade((1u16 << self.0) - 1)
    }
}

/// A canonically ordered set of generator indices, stored as a bitmask
/// (bit `i - 1` set means `ei` is present).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Blade(u16);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    /// Builds a blade from 1-based indices. Returns `None` on a repeated index,
    /// since the corresponding wedge product vanishes.
    pub fn from_indices(indices: &[usize]) -> Option<Blade> {
        let mut bits = 0u16;
        for &i in indices {
            assert!(
                (1..=MAX_GENERATORS).contains(&i),
                "generator index {i} out of range"
            );
            let b = 1u16 << (i - 1);
            if bits & b != 0 {
                return None;
            }
            bits |= b;
        }
        Some(Blade(bits))
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Strictly increasing 1-based indices.
    pub fn indices(self) -> Vec<usize> {
        (0..16)
            .filter(|i| self.0 & (1 << i) != 0)
            .map(|i| i + 1)
            .collect()
    }

    fn fits(self, gens: Generators) -> bool {
        self.0 >> gens.0 == 0
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        write!(f, "e")?;
        for i in self.indices() {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// Sign of reordering `a ∧ b` into canonical order, or `None` if they share a generator.
fn wedge_sign(a: u16, b: u16) -> Option<f64> {
    if a & b != 0 {
        return None;
    }
    // count pairs (i in a, j in b) with i > j
    let mut swaps = 0;
    let mut x = a >> 1;
    while x != 0 {
        swaps += (x & b).count_ones();
        x >>= 1;
    }
    Some(if swaps % 2 == 0 { 1.0 } else { -1.0 })
}

/// Element of the complex exterior algebra `Λ(C^n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiVector {
    gens: Generators,
    terms: BTreeMap<Blade, Complex64>,
}

impl MultiVector {
    pub fn zero(gens: Generators) -> Self {
        MultiVector {
            gens,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(gens: Generators, c: impl Into<Complex64>) -> Self {
        let mut m = Self::zero(gens);
        m.insert(Blade::SCALAR, c.into());
        m
    }

    pub fn one(gens: Generators) -> Self {
        Self::scalar(gens, 1.0)
    }

    /// `c · e_{i1} ∧ .. ∧ e_{ik}` for 1-based indices in any order; repeated
    /// indices give zero.
    pub fn monomial(gens: Generators, indices: &[usize], c: impl Into<Complex64>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > gens.count()) {
            return Err(Error::Argument(format!(
                "generator index {bad} outside 1..={}",
                gens.count()
            )));
        }
        let mut out = Self::scalar(gens, c);
        for &i in indices {
            out = out.wedge(&Self::blade(gens, Blade(1 << (i - 1)), 1.0))?;
        }
        Ok(out)
    }

    /// `c` times a single canonically ordered blade.
    pub fn blade(gens: Generators, blade: Blade, c: impl Into<Complex64>) -> Self {
        assert!(
            blade.fits(gens),
            "blade {blade} does not fit {} generators",
            gens.count()
        );
        let mut m = Self::zero(gens);
        m.insert(blade, c.into());
        m
    }

    pub fn from_terms(
        gens: Generators,
        terms: impl IntoIterator<Item = (Blade, Complex64)>,
    ) -> Self {
        let mut m = Self::zero(gens);
        for (b, c) in terms {
            assert!(
                b.fits(gens),
                "blade {b} does not fit {} generators",
                gens.count()
            );
            m.insert(b, c);
        }
        m
    }

    fn insert(&mut self, blade: Blade, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let slot = self.terms.entry(blade).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        if *slot == Complex64::new(0.0, 0.0) {
            self.terms.remove(&blade);
        }
    }

    pub fn generators(&self) -> Generators {
        self.gens
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, Complex64)> + '_ {
        self.terms.iter().map(|(b, c)| (*b, *c))
    }

    pub fn coefficient(&self, blade: Blade) -> Complex64 {
        self.terms.get(&blade).copied().unwrap_or_default()
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coefficient(Blade::SCALAR)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn abs_diff(&self, other: &MultiVector) -> f64 {
        (self - other).max_abs()
    }

    /// The homogeneous degree-`i` component.
    pub fn degree_part(&self, i: usize) -> Result<MultiVector> {
        if i > self.gens.count() {
            return Err(Error::Argument(format!(
                "degree {i} exceeds generator count {}",
                self.gens.count()
            )));
        }
        Ok(MultiVector {
            gens: self.gens,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.grade() == i)
                .map(|(b, c)| (*b, *c))
                .collect(),
        })
    }

    /// Coefficient of `e1 ∧ .. ∧ en`.
    pub fn berezin_top(&self) -> Complex64 {
        self.coefficient(self.gens.top())
    }

    pub fn has_odd_part(&self) -> bool {
        self.terms.keys().any(|b| b.grade() % 2 == 1)
    }

    /// Exterior product.
    pub fn wedge(&self, other: &MultiVector) -> Result<MultiVector> {
        self.check_same(other)?;
        let mut out = MultiVector::zero(self.gens);
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                if let Some(sign) = wedge_sign(a.0, b.0) {
                    out.insert(Blade(a.0 | b.0), ca * cb * sign);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> MultiVector {
        let c = c.into();
        let mut out = MultiVector::zero(self.gens);
        for (&b, &v) in &self.terms {
            out.insert(b, v * c);
        }
        out
    }

    /// Exponential in the exterior algebra. The positive-degree part is
    /// nilpotent, so the series terminates after `n` terms.
    pub fn exp(&self) -> MultiVector {
        let s = self.scalar_part();
        let nil = self - &MultiVector::scalar(self.gens, s);
        let mut term = MultiVector::one(self.gens);
        let mut sum = MultiVector::one(self.gens);
        for k in 1..=self.gens.count() {
            term = term
                .wedge(&nil)
                .expect("same generators")
                .scale(1.0 / k as f64);
            if term.is_zero() {
                break;
            }
            sum += &term;
        }
        sum.scale(s.exp())
    }

    fn check_same(&self, other: &MultiVector) -> Result<()> {
        if self.gens != other.gens {
            return Err(Error::Dimension(format!(
                "generator counts differ: {} vs {}",
                self.gens.count(),
                other.gens.count()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(b, c)| format!("({c})·{b}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// Arithmetic panics on mismatched generator counts; use `wedge` for the
// checked product.
impl<'a> Add<&'a MultiVector> for &'a MultiVector {
    type Output = MultiVector;
    fn add(self, rhs: &'a MultiVector) -> MultiVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for MultiVector {
    type Output = MultiVector;
    fn add(mut self, rhs: MultiVector) -> MultiVector {
        self += &rhs;
        self
    }
}

impl<'a> AddAssign<&'a MultiVector> for MultiVector {
    fn add_assign(&mut self, rhs: &'a MultiVector) {
        self.check_same(rhs).expect("generator counts must match");
        for (&b, &c) in &rhs.terms {
            self.insert(b, c);
        }
    }
}

impl<'a> Sub<&'a MultiVector> for &'a MultiVector {
    type Output = MultiVector;
    fn sub(self, rhs: &'a MultiVector) -> MultiVector {
        self + &(-rhs)
    }
}

impl Sub for MultiVector {
    type Output = MultiVector;
    fn sub(self, rhs: MultiVector) -> MultiVector {
        &self - &rhs
    }
}

impl Neg for &MultiVector {
    type Output = MultiVector;
    fn neg(self) -> MultiVector {
        self.scale(-1.0)
    }
}

impl Neg for MultiVector {
    type Output = MultiVector;
    fn neg(self) -> MultiVector {
        self.scale(-1.0)
    }
}

impl Mul<Complex64> for &MultiVector {
    type Output = MultiVector;
    fn mul(self, rhs: Complex64) -> MultiVector {
        self.scale(rhs)
    }
}

impl Mul<f64> for &MultiVector {
    type Output = MultiVector;
    fn mul(self, rhs: f64) -> MultiVector {
        self.scale(rhs)
    }
}

/// Spinor representation of `Cl(n)`, `n` even, with its chirality grading.
#[derive(Clone, Debug)]
pub struct CliffordRep {
    gens: Generators,
    gammas: Vec<DMatrix<Complex64>>,
    chirality: DMatrix<Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli() -> [DMatrix<Complex64>; 3] {
    let z = c(0.0, 0.0);
    [
        DMatrix::from_row_slice(2, 2, &[z, c(1.0, 0.0), c(1.0, 0.0), z]),
        DMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), z, z, c(-1.0, 0.0)]),
    ]
}

/// Clifford generators `γ1 .. γn` in dimension `2^{n/2}` with `γi² = -1`.
///
/// `γ_{2j-1} = σ3 ⊗ .. ⊗ σ3 ⊗ iσ1 ⊗ 1 ⊗ .. ⊗ 1` and likewise `γ_{2j}` with
/// `iσ2`, the Pauli factor sitting in tensor slot `j`. The grading is
/// `Γ = σ3 ⊗ .. ⊗ σ3`, which makes `γ1 .. γn = (-i)^{n/2} Γ`.
pub fn clifford_generators(n: usize) -> Result<CliffordRep> {
    if n % 2 == 1 {
        return Err(Error::Unsupported(format!("odd Clifford dimension {n}")));
    }
    let gens = Generators::new(n)?;
    let m = n / 2;
    let [s1, s2, s3] = pauli();
    let id2 = DMatrix::<Complex64>::identity(2, 2);
    let i = c(0.0, 1.0);
    let tensor = |slot_op: &DMatrix<Complex64>, slot: usize| {
        let mut acc = DMatrix::<Complex64>::identity(1, 1);
        for s in 0..m {
            let f = if s < slot {
                &s3
            } else if s == slot {
                slot_op
            } else {
                &id2
            };
            acc = acc.kronecker(f);
        }
        acc
    };
    let mut gammas = Vec::with_capacity(n);
    for j in 0..m {
        gammas.push(tensor(&(&s1 * i), j));
        gammas.push(tensor(&(&s2 * i), j));
    }
    let chirality = (0..m).fold(DMatrix::<Complex64>::identity(1, 1), |acc, _| {
        acc.kronecker(&s3)
    });
    Ok(CliffordRep {
        gens,
        gammas,
        chirality,
    })
}

impl CliffordRep {
    pub fn generators(&self) -> Generators {
        self.gens
    }

    /// Side length `2^{n/2}` of the spinor matrices.
    pub fn spinor_dim(&self) -> usize {
        self.chirality.nrows()
    }

    /// `γi`, 1-based.
    pub fn gamma(&self, i: usize) -> &DMatrix<Complex64> {
        &self.gammas[i - 1]
    }

    pub fn chirality(&self) -> &DMatrix<Complex64> {
        &self.chirality
    }

    /// Ordered product `γ_{i1} .. γ_{ik}` for the indices of `blade`.
    pub fn monomial(&self, blade: Blade) -> DMatrix<Complex64> {
        let d = self.spinor_dim();
        blade
            .indices()
            .into_iter()
            .fold(DMatrix::identity(d, d), |acc, i| acc * &self.gammas[i - 1])
    }

    /// Inverse of the symbol map: `e_{i1} ∧ .. ∧ e_{ik} ↦ γ_{i1} .. γ_{ik}`.
    pub fn quantize(&self, a: &MultiVector) -> Result<DMatrix<Complex64>> {
        if a.generators() != self.gens {
            return Err(Error::Dimension(
                "multivector and Clifford generator counts differ".into(),
            ));
        }
        let d = self.spinor_dim();
        let mut out = DMatrix::zeros(d, d);
        for (b, coeff) in a.terms() {
            out += self.monomial(b) * coeff;
        }
        Ok(out)
    }

    /// Symbol map `Cl(n) → Λ(C^n)`. The monomials are orthogonal for the
    /// trace pairing, `tr(γ_I^† γ_J) = 2^{n/2} δ_IJ`, which gives the coefficients.
    pub fn symbol(&self, x: &DMatrix<Complex64>) -> Result<MultiVector> {
        let d = self.spinor_dim();
        if x.shape() != (d, d) {
            return Err(Error::Dimension(format!(
                "expected a {d}x{d} spinor matrix, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        let mut out = MultiVector::zero(self.gens);
        for bits in 0..(1u16 << self.gens.count()) {
            let b = Blade(bits);
            let coeff = (self.monomial(b).adjoint() * x).trace() / d as f64;
            if coeff.norm() > 1e-15 * (1.0 + x.norm()) {
                out.insert(b, coeff);
            }
        }
        Ok(out)
    }

    /// `Str(x) = tr(Γ x)`.
    pub fn supertrace(&self, x: &DMatrix<Complex64>) -> Result<Complex64> {
        let d = self.spinor_dim();
        if x.shape() != (d, d) {
            return Err(Error::Dimension(format!(
                "expected a {d}x{d} spinor matrix"
            )));
        }
        Ok((&self.chirality * x).trace())
    }

    /// `(-2i)^{n/2}`, the value of `Str(γ1 .. γn)`.
    pub fn top_supertrace(&self) -> Complex64 {
        c(0.0, -2.0).powu((self.gens.count() / 2) as u32)
    }
}
