//! JLO cochains of the flat-torus Dirac operator and their small-`t` limit.
//!
//! `JLO_n^t(a0, .., an) = t^{n/2} ∫_{Δn} Str(a0 e^{−s0 tD²} [D,a1] e^{−s1 tD²} .. [D,an] e^{−sn tD²}) ds`
//!
//! is evaluated exactly on the Galerkin truncation: `D²` is diagonal on plane
//! waves, the multiplication operators and commutators are translation
//! covariant (see [`FourierOperator`]), so the supertrace reduces to a sum over
//! shift tuples and plane waves of block traces times simplex integrals of
//! heat factors, which are divided differences of the exponential.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::charclass::{index_prefactor, IdempotentField};
use crate::error::{Error, Result};
use crate::fourier;
use crate::heat::{heat_supertrace, neumaier_sum, neumaier_sum_complex};
use crate::models::{FourierOperator, MatrixFourierData, ModelKind, OperatorMatrix, SpectralModel};

/// `∫_{Δn} e^{−t Σ si λi} ds`, the `n`-th divided difference of `e^{−tx}` at
/// the `λi` divided by `(−t)^n`.
///
/// Evaluated as the corner entry of `exp(−tΛ + N)` with `Λ = diag(λ)` and `N`
/// the superdiagonal of ones, by scaling and squaring with a Taylor kernel.
/// The matrix has nonnegative off-diagonal part, so its exponential is
/// entrywise nonnegative and squaring loses no accuracy to cancellation.
pub fn divided_difference_exp(lambdas: &[f64], t: f64) -> f64 {
    let m = lambdas.len();
    assert!(m >= 1, "need at least one node");
    if m == 1 {
        return (-t * lambdas[0]).exp();
    }
    // shift by the smallest node so the diagonal is nonpositive
    let shift = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let mut a = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        a[(i, i)] = -t * (lambdas[i] - shift);
        if i + 1 < m {
            a[(i, i + 1)] = 1.0;
        }
    }
    let norm = a.iter().map(|x| x.abs()).fold(0.0, f64::max) * m as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);
    let mut term = DMatrix::<f64>::identity(m, m);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.amax() < 1e-18 * sum.amax() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum[(0, m - 1)] * (-t * shift).exp()
}

/// Exact rational simplex moment `∫_{Δn} σ1^{k1} .. σn^{kn} ds` with
/// `σj = s0 + .. + s_{j−1}`, equal to `1 / Π_j (k1 + .. + kj + j)`.
pub fn simplex_moment(k: &[u32]) -> Ratio<i128> {
    let mut denom: i128 = 1;
    let mut partial: i128 = 0;
    for (j, &kj) in k.iter().enumerate() {
        partial += kj as i128;
        denom *= partial + j as i128 + 1;
    }
    Ratio::new(1, denom)
}

/// `c(k1, .., kn) = (−1)^{Σk} / (k1! .. kn! (k1 + 1)(k1 + k2 + 2) .. (Σk + n))`,
/// the coefficient of the expansion pushing heat factors to the right.
pub fn jlo_coefficient(k: &[u32]) -> Ratio<i128> {
    let factorials: i128 = k
        .iter()
        .map(|&x| (1..=x as i128).product::<i128>())
        .product();
    let sign = if k.iter().sum::<u32>() % 2 == 0 {
        1
    } else {
        -1
    };
    simplex_moment(k) * Ratio::new(sign, factorials)
}

/// Arguments and time of one cochain evaluation.
#[derive(Clone, Debug)]
pub struct JloQuery<'a> {
    pub model: &'a SpectralModel,
    /// `a0, a1, .., an`, all of the same matrix size.
    pub args: Vec<MatrixFourierData>,
    pub t: f64,
}

impl<'a> JloQuery<'a> {
    pub fn new(model: &'a SpectralModel, args: Vec<MatrixFourierData>, t: f64) -> Result<Self> {
        if args.is_empty() {
            return Err(Error::Argument("a JLO query needs at least a0".into()));
        }
        let n = args.len() - 1;
        if !n.is_multiple_of(2) {
            return Err(Error::Argument(format!("cochain degree {n} is odd")));
        }
        if n > MAX_DEGREE {
            return Err(Error::Unsupported(format!(
                "cochain degree {n} > {MAX_DEGREE}"
            )));
        }
        if !(t > 0.0) {
            return Err(Error::Argument(format!("time t = {t} must be positive")));
        }
        let k = args[0].size();
        if args.iter().any(|a| a.size() != k) {
            return Err(Error::Dimension(
                "arguments have different matrix sizes".into(),
            ));
        }
        Ok(JloQuery { model, args, t })
    }

    pub fn degree(&self) -> usize {
        self.args.len() - 1
    }
}

/// Largest cochain degree evaluated.
pub const MAX_DEGREE: usize = 4;

/// Value of a cochain with a bound on everything the truncation dropped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JloValue {
    pub degree: usize,
    pub t: f64,
    pub value: Complex64,
    pub tail_bound: f64,
    pub warnings: Vec<String>,
}

/// Block products below this fraction of the largest are skipped (and
/// accounted for in the tail bound).
const NEGLIGIBLE_PRODUCT: f64 = 1e-16;

/// Evaluates `JLO_n^t(a0, .., an)`.
///
/// On the flat torus every degree is supported. On the twisted models only
/// `n = 0` with constant `a0` is available, where the cochain is
/// `tr(a0) · Str e^{−tD²}`.
pub fn jlo_cochain(q: &JloQuery) -> Result<JloValue> {
    let n = q.degree();
    let cutoff = match q.model.kind() {
        ModelKind::FlatTorus { cutoff } => cutoff,
        _ => {
            let a0 = &q.args[0];
            let constant = n == 0 && a0.iter().all(|(p, _)| p == (0, 0));
            if !constant {
                return Err(Error::Unsupported(format!(
                    "the {} model has no multiplication operators; only n = 0 with constant a0 is available",
                    q.model.name()
                )));
            }
            let tr = a0.get((0, 0)).map(|m| m.trace()).unwrap_or_default();
            let s = heat_supertrace(q.model, q.t)?;
            return Ok(JloValue {
                degree: 0,
                t: q.t,
                value: tr * s.value,
                tail_bound: tr.norm() * s.tail_bound,
                warnings: vec![],
            });
        }
    };
    let mut warnings = Vec::new();
    for (i, a) in q.args.iter().enumerate() {
        if 2 * a.support_radius() > cutoff {
            warnings.push(format!(
                "a{i}: Fourier support radius {} exceeds half the mode cutoff {cutoff}; tails are truncated",
                a.support_radius()
            ));
        }
    }
    let mut ops = vec![FourierOperator::multiplication(&q.args[0])];
    ops.extend(q.args[1..].iter().map(FourierOperator::dirac_commutator));
    let (sum, tail) = chain_supertrace(&ops, cutoff, q.t);
    let scale = q.t.powf(n as f64 / 2.0);
    Ok(JloValue {
        degree: n,
        t: q.t,
        value: sum * scale,
        tail_bound: tail * scale,
        warnings,
    })
}

/// Shift tuple `(q1, .., qn)` with the supertrace of the block product.
struct ShiftTerm {
    /// Offsets of the labels `p + qn + .. + q_{j+1}` relative to `p`.
    offsets: Vec<(i64, i64)>,
    trace: Complex64,
}

/// `Σ Str(A0 e^{−s0 tD²} B1 .. Bn e^{−sn tD²})` integrated over the simplex, for
/// `ops = [A0, B1, .., Bn]` compressed to `|p|∞ ≤ cutoff`; returns the value
/// and a bound on the omitted chains.
fn chain_supertrace(ops: &[FourierOperator], cutoff: usize, t: f64) -> (Complex64, f64) {
    let n = ops.len() - 1;
    let k = ops[0].size();
    let a0: HashMap<(i64, i64), &DMatrix<Complex64>> =
        ops[0].blocks().iter().map(|(q, m)| (*q, m)).collect();

    // enumerate shift tuples; the shift of A0 is fixed by Σ q = 0
    let norms: Vec<Vec<f64>> = ops
        .iter()
        .map(|o| o.blocks().iter().map(|(_, m)| m.norm()).collect())
        .collect();
    let a0_max = norms[0].iter().copied().fold(0.0, f64::max);
    let max_product = a0_max
        * norms[1..]
            .iter()
            .map(|v| v.iter().copied().fold(0.0, f64::max))
            .product::<f64>();
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for op in &ops[1..] {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..op.blocks().len()).map(move |i| {
                    let mut v = t.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    let terms: Vec<(Option<ShiftTerm>, f64)> = tuples
        .par_iter()
        .map(|idx| {
            let mut total = (0i64, 0i64);
            let mut norm = 1.0;
            for (j, &i) in idx.iter().enumerate() {
                let q = ops[j + 1].blocks()[i].0;
                total = (total.0 + q.0, total.1 + q.1);
                norm *= norms[j + 1][i];
            }
            let Some(b0) = a0.get(&(-total.0, -total.1)) else {
                return (None, 0.0);
            };
            norm *= b0.norm();
            if norm < NEGLIGIBLE_PRODUCT * max_product {
                return (None, norm);
            }
            let mut prod = (*b0).clone();
            for (j, &i) in idx.iter().enumerate() {
                prod *= &ops[j + 1].blocks()[i].1;
            }
            let trace = (0..k)
                .map(|i| prod[(i, i)] - prod[(k + i, k + i)])
                .sum::<Complex64>();
            // offsets from the right: p, p + qn, p + qn + q_{n−1}, ..
            let mut offsets = vec![(0i64, 0i64)];
            let mut acc = (0i64, 0i64);
            for (j, &i) in idx.iter().enumerate().rev() {
                let q = ops[j + 1].blocks()[i].0;
                acc = (acc.0 + q.0, acc.1 + q.1);
                offsets.push(acc);
            }
            (Some(ShiftTerm { offsets, trace }), 0.0)
        })
        .collect();

    let skipped: f64 = neumaier_sum(terms.iter().map(|(_, s)| *s));
    let m = cutoff as i64;
    let values: Vec<Complex64> = terms
        .par_iter()
        .map_init(
            HashMap::<[u32; MAX_DEGREE + 1], f64>::new,
            |cache, (term, _)| {
                let Some(term) = term else {
                    return Complex64::new(0.0, 0.0);
                };
                if term.trace == Complex64::new(0.0, 0.0) {
                    return term.trace;
                }
                let lo = |f: fn(&(i64, i64)) -> i64| -m - term.offsets.iter().map(f).min().unwrap();
                let hi = |f: fn(&(i64, i64)) -> i64| m - term.offsets.iter().map(f).max().unwrap();
                let (x0, x1, y0, y1) = (lo(|o| o.0), hi(|o| o.0), lo(|o| o.1), hi(|o| o.1));
                let mut parts = Vec::new();
                for p1 in x0..=x1 {
                    for p2 in y0..=y1 {
                        let mut key = [u32::MAX; MAX_DEGREE + 1];
                        for (slot, o) in key.iter_mut().zip(&term.offsets) {
                            let (a, b) = (p1 + o.0, p2 + o.1);
                            *slot = (a * a + b * b) as u32;
                        }
                        key[..=n].sort_unstable();
                        let s = *cache.entry(key).or_insert_with(|| {
                            let mus: Vec<f64> = key[..=n]
                                .iter()
                                .map(|&r| 4.0 * PI * PI * r as f64)
                                .collect();
                            divided_difference_exp(&mus, t)
                        });
                        parts.push(s);
                    }
                }
                term.trace * neumaier_sum(parts)
            },
        )
        .collect();
    let value = neumaier_sum_complex(values);

    // An omitted chain has a label outside the box. With spread s (largest
    // offset from p) its start p has |p|∞ = r ≥ M + 1 − s and every label has
    // |·|∞ ≥ ρ = max(r − s, M + 1 − 2s, 0), so each heat factor is below
    // e^{−4π²t ρ²}; the simplex has volume 1/n!.
    let mut by_spread: BTreeMap<i64, f64> = BTreeMap::new();
    for term in terms.iter().filter_map(|(t, _)| t.as_ref()) {
        let spread = term
            .offsets
            .iter()
            .map(|o| o.0.abs().max(o.1.abs()))
            .max()
            .unwrap_or(0);
        *by_spread.entry(spread).or_insert(0.0) += term.trace.norm();
    }
    let a = 4.0 * PI * PI * t;
    let omitted: f64 = by_spread
        .iter()
        .filter(|(_, &w)| w > 0.0)
        .map(|(&s, &weight)| weight * shifted_ring_sum(m, s, a))
        .sum();
    let factorial: f64 = (1..=n).map(|i| i as f64).product();
    let box_labels = ((2 * m + 1) * (2 * m + 1)) as f64;
    // skipped block products: |trace| ≤ 2k ‖X‖ and each simplex factor ≤ 1/n!
    let skipped_bound = skipped * 2.0 * k as f64 * box_labels / factorial;
    (value, omitted / factorial + skipped_bound)
}

/// `Σ_{r ≥ M+1−s} 8r e^{−a ρ(r)²}` with `ρ(r) = max(r − s, M + 1 − 2s, 0)`
/// (the ring `r = 0` counts once).
fn shifted_ring_sum(m: i64, spread: i64, a: f64) -> f64 {
    let start = (m + 1 - spread).max(0);
    let floor = (m + 1 - 2 * spread).max(0) as f64;
    let mut sum = 0.0;
    let mut r = start;
    loop {
        let count = if r == 0 { 1.0 } else { 8.0 * r as f64 };
        let rho = ((r - spread) as f64).max(floor);
        let term = count * (-a * rho * rho).exp();
        sum += term;
        if r > spread && term <= 1e-20 * sum {
            return sum;
        }
        if r > start + 1_000_000 {
            return f64::INFINITY;
        }
        r += 1;
    }
}

/// de Rham side `(1/(n! (2πi)^e)) ∫ tr(a0 da1 ∧ .. ∧ dan)` on the flat torus,
/// by spectral differentiation on an `n_grid²` grid. Only `n = 2` reaches top
/// degree; every other degree gives zero.
pub fn de_rham_side(args: &[MatrixFourierData], n_grid: usize, exponent: u32) -> Result<Complex64> {
    let n = args.len().saturating_sub(1);
    if n != 2 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let k = args[0].size();
    let sample = |a: &MatrixFourierData| -> Vec<Vec<Complex64>> {
        (0..k * k)
            .map(|ab| {
                let (r, c) = (ab / k, ab % k);
                let scalar =
                    crate::models::FourierData::from_terms(a.iter().map(|(p, m)| (p, m[(r, c)])));
                scalar.sample(n_grid)
            })
            .collect()
    };
    let a0 = sample(&args[0]);
    let grad = |a: &MatrixFourierData| -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
        sample(a)
            .iter()
            .map(|s| fourier::gradient(s, n_grid))
            .unzip()
    };
    let (d1x, d1y) = grad(&args[1]);
    let (d2x, d2y) = grad(&args[2]);
    let at =
        |m: &Vec<Vec<Complex64>>, node: usize| DMatrix::from_fn(k, k, |r, c| m[r * k + c][node]);
    let densities: Vec<Complex64> = (0..n_grid * n_grid)
        .map(|node| {
            let wedge = at(&d1x, node) * at(&d2y, node) - at(&d1y, node) * at(&d2x, node);
            (at(&a0, node) * wedge).trace()
        })
        .collect();
    let integral = neumaier_sum_complex(densities) / (n_grid * n_grid) as f64;
    Ok(integral * index_prefactor(exponent) / 2.0)
}

/// Output of [`jlo_small_t_limit`].
#[derive(Clone, Debug, Serialize)]
pub struct JloLimit {
    pub samples: Vec<JloValue>,
    pub extrapolated: Complex64,
    pub de_rham: Complex64,
    /// `|extrapolated − de_rham|`, relative to `|de_rham|` when that is nonzero.
    pub discrepancy: f64,
    pub relative: bool,
}

/// Lower bound on `t λ²_cut` for the truncated cochain to be trusted.
pub const WINDOW_BOUND: f64 = 5.0;

/// Evaluates the cochain on a geometric `t`-sequence, Richardson-extrapolates
/// to `t → 0` eliminating `order` integer powers of `t`, and compares with the
/// de Rham side (prefactor exponent `exponent`).
pub fn jlo_small_t_limit(
    model: &SpectralModel,
    args: &[MatrixFourierData],
    ts: &[f64],
    order: usize,
    exponent: u32,
) -> Result<JloLimit> {
    let ModelKind::FlatTorus { cutoff } = model.kind() else {
        return Err(Error::Unsupported(
            "the small-t limit is evaluated on the flat torus".into(),
        ));
    };
    if ts.len() < order + 1 {
        return Err(Error::Argument(format!(
            "order {order} needs at least {} times",
            order + 1
        )));
    }
    let ratio = ts[0] / ts[1];
    if !(ratio > 1.0)
        || ts
            .windows(2)
            .any(|w| ((w[0] / w[1]) / ratio - 1.0).abs() > 1e-9)
    {
        return Err(Error::Argument(
            "t-sequence must be geometric and decreasing".into(),
        ));
    }
    let lambda2 = 4.0 * PI * PI * (cutoff * cutoff) as f64;
    for &t in ts {
        if t * lambda2 < WINDOW_BOUND {
            return Err(Error::Window {
                t,
                product: t * lambda2,
                bound: WINDOW_BOUND,
            });
        }
    }
    let samples = ts
        .iter()
        .map(|&t| jlo_cochain(&JloQuery::new(model, args.to_vec(), t)?))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<Complex64> = samples.iter().map(|s| s.value).collect();
    let extrapolated = richardson(&values, ratio, order);
    let de_rham = de_rham_side(args, 64, exponent)?;
    let diff = (extrapolated - de_rham).norm();
    let relative = de_rham.norm() > 1e-12;
    let discrepancy = if relative {
        diff / de_rham.norm()
    } else {
        diff
    };
    Ok(JloLimit {
        samples,
        extrapolated,
        de_rham,
        discrepancy,
        relative,
    })
}

/// Richardson extrapolation of values at `t, t/r, t/r², ..` assuming an
/// expansion in integer powers of `t`, eliminating the first `order` powers.
/// Uses the last `order + 1` values.
pub fn richardson(values: &[Complex64], ratio: f64, order: usize) -> Complex64 {
    let mut level: Vec<Complex64> = values[values.len() - order - 1..].to_vec();
    for j in 1..=order {
        let f = ratio.powi(j as i32);
        level = level
            .windows(2)
            .map(|w| (w[1] * f - w[0]) / (f - 1.0))
            .collect();
    }
    level[0]
}

/// Result of the spectral side of the index pairing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralIndex {
    pub index: i64,
    /// Unrounded signed count.
    pub raw: f64,
    /// Number of singular values classed as near zero.
    pub near_zero: usize,
    /// Threshold separating them from the rest (geometric mean across the gap).
    pub threshold: f64,
    /// Ratio of the singular values on either side of the gap.
    pub gap_ratio: f64,
    pub smallest: Vec<f64>,
    pub cutoff: usize,
}

/// Minimum gap ratio accepted as a visible spectral gap.
pub const MIN_GAP_RATIO: f64 = 10.0;

/// Signed index of `e D⁺ e` on the Galerkin truncation of the flat torus.
///
/// `P` is the projection onto eigenvectors of `op(e)` with eigenvalue above ½,
/// and `A = P D⁺ P` is its chiral block. A square truncation always has as
/// many near-zero right as left singular vectors; the spurious partners of
/// genuine zero modes sit at the edge of the momentum box. Each near-zero pair
/// therefore contributes the interior weight (labels with `|p|∞ ≤ M/2`) of its
/// right vector minus that of its left vector, which tends to `+1` for a
/// kernel vector, `−1` for a cokernel vector and `0` otherwise.
pub fn spectral_index(e: &MatrixFourierData, cutoff: usize) -> Result<SpectralIndex> {
    let k = e.size();
    let labels = crate::models::labels(cutoff);
    let nl = labels.len();
    let dim = k * nl;
    let m = cutoff as i64;
    let mut op = DMatrix::<Complex64>::zeros(dim, dim);
    for (row, pr) in labels.iter().enumerate() {
        for (col, pc) in labels.iter().enumerate() {
            if let Some(block) = e.get((pr.0 - pc.0, pr.1 - pc.1)) {
                for a in 0..k {
                    for b in 0..k {
                        op[(a * nl + row, b * nl + col)] = block[(a, b)];
                    }
                }
            }
        }
    }
    // symmetrise against rounding in the Fourier data
    let op = (&op + op.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = op.symmetric_eigen();
    let keep: Vec<usize> = (0..dim).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    if keep.is_empty() {
        return Ok(SpectralIndex {
            index: 0,
            raw: 0.0,
            near_zero: 0,
            threshold: 0.0,
            gap_ratio: f64::INFINITY,
            smallest: vec![],
            cutoff,
        });
    }
    let q = DMatrix::from_fn(dim, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]);
    let dplus: Vec<Complex64> = (0..dim)
        .map(|i| {
            let p = labels[i % nl];
            Complex64::new(-2.0 * PI * p.0 as f64, -2.0 * PI * p.1 as f64)
        })
        .collect();
    let dq = DMatrix::from_fn(dim, keep.len(), |r, c| dplus[r] * q[(r, c)]);
    let a = q.ad_mul(&dq);
    let svd = a.svd(true, true);
    let u = svd.u.as_ref().expect("requested");
    let v_t = svd.v_t.as_ref().expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();

    // the smallest nonzero |D⁺| on the lattice is 2π; a truncation without
    // small singular values has nothing to count
    let scale = 2.0 * PI;
    let smallest: Vec<f64> = sv.iter().take(8).copied().collect();
    if sv[0] > 0.25 * scale {
        return Ok(SpectralIndex {
            index: 0,
            raw: 0.0,
            near_zero: 0,
            threshold: 0.25 * scale,
            gap_ratio: f64::INFINITY,
            smallest,
            cutoff,
        });
    }
    let window = sv.len().min(17);
    let (mut best, mut best_ratio) = (0usize, 0.0f64);
    for j in 0..window - 1 {
        let ratio = sv[j + 1] / sv[j].max(1e-300);
        if ratio > best_ratio {
            best_ratio = ratio;
            best = j;
        }
    }
    let near_zero = best + 1;
    let threshold = (sv[best].max(1e-300) * sv[best + 1]).sqrt();
    if best_ratio < MIN_GAP_RATIO {
        return Err(Error::Indeterminate(format!(
            "largest relative gap among the smallest singular values is {best_ratio:.2} < {MIN_GAP_RATIO} at cutoff {cutoff}"
        )));
    }
    let interior = |full: nalgebra::DVector<Complex64>| -> f64 {
        (0..dim)
            .filter(|&i| {
                let p = labels[i % nl];
                2 * p.0.abs() <= m && 2 * p.1.abs() <= m
            })
            .map(|i| full[i].norm_sqr())
            .sum()
    };
    let mut raw = 0.0;
    for &i in order.iter().take(near_zero) {
        let right = &q * v_t.row(i).adjoint();
        let left = &q * u.column(i);
        raw += interior(right) - interior(left);
    }
    let index = raw.round();
    if (raw - index).abs() > 0.25 {
        return Err(Error::Indeterminate(format!(
            "signed count {raw:.3} is not near an integer at cutoff {cutoff}"
        )));
    }
    Ok(SpectralIndex {
        index: index as i64,
        raw,
        near_zero,
        threshold,
        gap_ratio: best_ratio,
        smallest,
        cutoff,
    })
}

/// Output of [`k_pairing_index`].
#[derive(Clone, Debug, Serialize)]
pub struct PairingResult {
    pub pairing: Complex64,
    /// `(degree, weighted cochain value)` for each term of the pairing.
    pub terms: Vec<(usize, Complex64)>,
    pub tail_bound: f64,
    pub spectral: SpectralIndex,
}

/// Pairing of the JLO cocycle with `[e]`,
/// `JLO_0(tr e) + Σ_{k=1}^{cap/2} (−1)^k (2k)!/k! JLO_{2k}(e − ½, e, .., e)`,
/// next to the spectral index of the compressed Dirac operator.
///
/// Constant `e` is allowed on every model: its commutators vanish, the pairing
/// is `tr(e) Str e^{−tD²}` and the spectral index `rank(e) · Ind D`. A
/// non-constant `e` needs the flat torus; its Fourier data are taken up to
/// radius `2M`, which is every shift the truncation can see.
pub fn k_pairing_index(
    model: &SpectralModel,
    e: &IdempotentField,
    t: f64,
    degree_cap: usize,
) -> Result<PairingResult> {
    if !degree_cap.is_multiple_of(2) || degree_cap > MAX_DEGREE {
        return Err(Error::Argument(format!(
            "degree cap {degree_cap} must be even and at most {MAX_DEGREE}"
        )));
    }
    let first = &e.values()[0];
    let constant = e.values().iter().all(|m| (m - first).norm() < 1e-14);
    if constant {
        let data = MatrixFourierData::constant(first.clone());
        let j0 = jlo_cochain(&JloQuery::new(model, vec![data], t)?)?;
        let rank = first.trace().re.round() as i64;
        let spectral = SpectralIndex {
            index: rank * model.zero_mode_index(),
            raw: (rank * model.zero_mode_index()) as f64,
            near_zero: 0,
            threshold: 0.0,
            gap_ratio: f64::INFINITY,
            smallest: vec![],
            cutoff: 0,
        };
        return Ok(PairingResult {
            pairing: j0.value,
            terms: vec![(0, j0.value)],
            tail_bound: j0.tail_bound,
            spectral,
        });
    }
    let ModelKind::FlatTorus { cutoff } = model.kind() else {
        return Err(Error::Unsupported(
            "non-constant idempotents need the flat torus".into(),
        ));
    };
    let data = MatrixFourierData::from_field(e, 2 * cutoff)?;
    let shifted = data.minus_identity(0.5);
    let j0 = jlo_cochain(&JloQuery::new(model, vec![data.clone()], t)?)?;
    let mut terms = vec![(0usize, j0.value)];
    let mut tail = j0.tail_bound;
    for kk in 1..=degree_cap / 2 {
        let mut args = vec![shifted.clone()];
        args.extend(std::iter::repeat_n(data.clone(), 2 * kk));
        let v = jlo_cochain(&JloQuery::new(model, args, t)?)?;
        let weight = (if kk % 2 == 0 { 1.0 } else { -1.0 })
            * ((kk + 1)..=(2 * kk)).map(|i| i as f64).product::<f64>();
        terms.push((2 * kk, v.value * weight));
        tail += weight.abs() * v.tail_bound;
    }
    let pairing = neumaier_sum_complex(terms.iter().map(|t| t.1));
    let spectral = spectral_index(&data, cutoff)?;
    Ok(PairingResult {
        pairing,
        terms,
        tail_bound: tail,
        spectral,
    })
}

/// Largest entry of `e^{−tD²} x e^{tD²} − Σ_{k≤K} (−t)^k/k! ad(D²)^k x`.
/// The conjugation is formed entrywise in the eigenbasis of `D²`; the series
/// uses [`crate::models::iterated_commutator`].
pub fn conjugation_expansion_residual(
    model: &SpectralModel,
    x: &OperatorMatrix,
    t: f64,
    order: usize,
) -> Result<f64> {
    let mu = crate::models::d_squared_diagonal(model)?;
    let xm = x.matrix();
    let dense = DMatrix::from_fn(xm.nrows(), xm.ncols(), |i, j| {
        xm[(i, j)] * (-t * (mu[i] - mu[j])).exp()
    });
    let mut series = DMatrix::<Complex64>::zeros(xm.nrows(), xm.ncols());
    let mut coeff = 1.0;
    for k in 0..=order {
        if k > 0 {
            coeff *= -t / k as f64;
        }
        series +=
            crate::models::iterated_commutator(model, x, k)?.matrix() * Complex64::new(coeff, 0.0);
    }
    Ok((dense - series)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Fits the slope of `log residual` against `log t` for [`conjugation_expansion_residual`].
pub fn conjugation_expansion_slope(
    model: &SpectralModel,
    x: &OperatorMatrix,
    ts: &[f64],
    order: usize,
) -> Result<(f64, Vec<(f64, f64)>)> {
    let rows = ts
        .iter()
        .map(|&t| Ok((t, conjugation_expansion_residual(model, x, t, order)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((crate::heat::fit_exponent(rows.iter().copied()), rows))
}
