//! Finite-dimensional von Neumann algebras `⊕_b M_{n_b}`, their elements,
//! states and linear maps between them.
//!
//! Vectorization convention (used by every map matrix): concatenate the
//! blocks in order, each flattened row-major.

use std::ops::{Add, Mul, Neg, Sub};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalar::{atol, cabs, cr, Real, C};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraRepr")]
pub struct Algebra {
    blocks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trace_weights: Option<Vec<f64>>,
}

#[derive(Deserialize)]
struct AlgebraRepr {
    blocks: Vec<i64>,
    #[serde(default)]
    trace_weights: Option<Vec<f64>>,
}

impl TryFrom<AlgebraRepr> for Algebra {
    type Error = Error;

    fn try_from(r: AlgebraRepr) -> Result<Self> {
        if r.blocks.iter().any(|&n| n < 1) {
            return Err(Error::NonPositiveDim);
        }
        let alg = Algebra::new(r.blocks.iter().map(|&n| n as usize).collect())?;
        match r.trace_weights {
            Some(w) => alg.with_trace_weights(w),
            None => Ok(alg),
        }
    }
}

impl Algebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyBlocks);
        }
        if blocks.contains(&0) {
            return Err(Error::NonPositiveDim);
        }
        Ok(Self {
            blocks,
            trace_weights: None,
        })
    }

    /// Attach the weights of a trace `τ = Σ_b weight_b · Tr_b`; used by L_p norms.
    pub fn with_trace_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.blocks.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} trace weights for {} blocks",
                weights.len(),
                self.blocks.len()
            )));
        }
        if weights
            .iter()
            .any(|&w| w.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !w.is_finite())
        {
            return Err(Error::DataInvalid("trace weights must be positive".into()));
        }
        self.trace_weights = Some(weights);
        Ok(self)
    }

    pub fn without_trace_weights(&self) -> Self {
        Self {
            blocks: self.blocks.clone(),
            trace_weights: None,
        }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn trace_weights(&self) -> Option<&[f64]> {
        self.trace_weights.as_deref()
    }

    pub fn trace_weight(&self, block: usize) -> f64 {
        self.trace_weights.as_ref().map_or(1.0, |w| w[block])
    }

    /// Σ n_b², the length of a vectorized element.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Σ n_b, the size of the defining representation.
    pub fn rep_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn offset(&self, block: usize) -> usize {
        self.blocks[..block].iter().map(|n| n * n).sum()
    }

    pub fn index(&self, block: usize, row: usize, col: usize) -> usize {
        self.offset(block) + row * self.blocks[block] + col
    }

    /// Inverse of [`Algebra::index`].
    pub fn unit_at(&self, mut k: usize) -> MatrixUnit {
        for (b, &n) in self.blocks.iter().enumerate() {
            if k < n * n {
                return MatrixUnit {
                    block: b,
                    row: k / n,
                    col: k % n,
                };
            }
            k -= n * n;
        }
        panic!("index out of range for algebra {:?}", self.blocks)
    }

    /// Matrix units in vectorization order.
    pub fn matrix_units(&self) -> impl Iterator<Item = MatrixUnit> + '_ {
        self.blocks.iter().enumerate().flat_map(|(b, &n)| {
            (0..n * n).map(move |k| MatrixUnit {
                block: b,
                row: k / n,
                col: k % n,
            })
        })
    }

    /// `M_n ⊗ self`, realized blockwise as `M_{n·n_b}`.
    pub fn amplify(&self, n: usize) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b * n).collect(),
            trace_weights: self.trace_weights.clone(),
        }
    }

    pub fn same_shape(&self, other: &Algebra) -> bool {
        self.blocks == other.blocks
    }

    pub(crate) fn check_same(&self, other: &Algebra, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{what}: blocks {:?} vs {:?}",
                self.blocks, other.blocks
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixUnit {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

/// An element of the algebra; also the storage for L_p vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix<T: Real> {
    algebra: Algebra,
    blocks: Vec<CMat<T>>,
}

impl<T: Real> BlockMatrix<T> {
    pub fn from_blocks(algebra: &Algebra, blocks: Vec<CMat<T>>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks for algebra {:?}",
                blocks.len(),
                algebra.blocks()
            )));
        }
        for (m, &n) in blocks.iter().zip(algebra.blocks()) {
            if m.shape() != (n, n) {
                return Err(Error::ShapeMismatch(format!(
                    "block {:?} where {n}x{n} expected",
                    m.shape()
                )));
            }
        }
        Ok(Self {
            algebra: algebra.clone(),
            blocks,
        })
    }

    pub fn zeros(algebra: &Algebra) -> Self {
        Self {
            algebra: algebra.clone(),
            blocks: algebra
                .blocks()
                .iter()
                .map(|&n| CMat::zeros(n, n))
                .collect(),
        }
    }

    pub fn identity(algebra: &Algebra) -> Self {
        Self {
            algebra: algebra.clone(),
            blocks: algebra
                .blocks()
                .iter()
                .map(|&n| CMat::identity(n, n))
                .collect(),
        }
    }

    pub fn matrix_unit(algebra: &Algebra, unit: MatrixUnit) -> Self {
        let mut m = Self::zeros(algebra);
        m.blocks[unit.block][(unit.row, unit.col)] = cr(T::one());
        m
    }

    /// The k-th basis vector of the vectorization.
    pub fn basis(algebra: &Algebra, k: usize) -> Self {
        Self::matrix_unit(algebra, algebra.unit_at(k))
    }

    /// Entries i.i.d. standard complex Gaussian.
    pub fn gaussian<R: rand::Rng>(algebra: &Algebra, rng: &mut R) -> Self {
        Self {
            algebra: algebra.clone(),
            blocks: algebra
                .blocks()
                .iter()
                .map(|&n| linalg::gaussian::<T, R>(n, n, rng))
                .collect(),
        }
    }

    pub fn from_vec(algebra: &Algebra, v: &[C<T>]) -> Result<Self> {
        if v.len() != algebra.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for total dimension {}",
                v.len(),
                algebra.total_dim()
            )));
        }
        let mut blocks = Vec::with_capacity(algebra.num_blocks());
        let mut off = 0;
        for &n in algebra.blocks() {
            blocks.push(CMat::from_row_slice(n, n, &v[off..off + n * n]));
            off += n * n;
        }
        Ok(Self {
            algebra: algebra.clone(),
            blocks,
        })
    }

    pub fn to_vec(&self) -> Vec<C<T>> {
        let mut out = Vec::with_capacity(self.algebra.total_dim());
        for m in &self.blocks {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    out.push(m[(i, j)]);
                }
            }
        }
        out
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMat<T>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &CMat<T> {
        &self.blocks[b]
    }

    pub fn block_mut(&mut self, b: usize) -> &mut CMat<T> {
        &mut self.blocks[b]
    }

    pub fn map_blocks(&self, f: impl Fn(&CMat<T>) -> CMat<T>) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    fn zip_blocks(&self, other: &Self, f: impl Fn(&CMat<T>, &CMat<T>) -> CMat<T>) -> Self {
        assert!(
            self.algebra.same_shape(&other.algebra),
            "block shapes differ: {:?} vs {:?}",
            self.algebra.blocks(),
            other.algebra.blocks()
        );
        Self {
            algebra: self.algebra.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|m| m.adjoint())
    }

    /// Blockwise transpose (not the adjoint).
    pub fn transpose(&self) -> Self {
        self.map_blocks(|m| m.transpose())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        self.map_blocks(|m| m * s)
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(cr(s))
    }

    pub fn trace(&self) -> C<T> {
        self.blocks
            .iter()
            .fold(cr(T::zero()), |acc, m| acc + m.trace())
    }

    pub fn frobenius(&self) -> T {
        self.blocks
            .iter()
            .fold(T::zero(), |acc, m| {
                acc + m.iter().fold(T::zero(), |a, z| a + z.norm_sqr())
            })
            .sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        (self - other).frobenius()
    }

    pub fn max_abs(&self) -> T {
        self.blocks
            .iter()
            .flat_map(|m| m.iter())
            .fold(T::zero(), |acc, z| acc.max(cabs(*z)))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.distance(&self.adjoint()) <= tol
    }

    pub fn is_projection(&self, tol: T) -> bool {
        self.is_hermitian(tol) && self.distance(&(self * self)) <= tol
    }

    /// Eigenvalues of the Hermitian part, all blocks, ascending.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut all: Vec<T> = self
            .blocks
            .iter()
            .flat_map(|m| linalg::herm_eig(m).0)
            .collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        all
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().first().copied().unwrap_or_else(T::zero)
    }

    /// Singular values of all blocks (unsorted across blocks).
    pub fn singular_values(&self) -> Vec<T> {
        self.blocks
            .iter()
            .flat_map(|m| linalg::singular_values(m))
            .collect()
    }

    pub fn operator_norm(&self) -> T {
        self.singular_values()
            .into_iter()
            .fold(T::zero(), |a, s| a.max(s))
    }

    /// Real spectral function applied to the Hermitian part, blockwise.
    pub fn herm_apply(&self, f: impl Fn(T) -> T) -> Self {
        self.map_blocks(|m| linalg::herm_fn(m, |l| cr(f(l))))
    }

    /// Complex spectral function applied to the Hermitian part, blockwise.
    pub fn herm_apply_c(&self, f: impl Fn(T) -> C<T>) -> Self {
        self.map_blocks(|m| linalg::herm_fn(m, &f))
    }

    /// Spectral decomposition of the Hermitian part with eigenvalues clustered
    /// globally across blocks: `(λ, projection)` pairs, ascending in λ.
    pub fn spectral_projections(&self, tol: T) -> Vec<(T, BlockMatrix<T>)> {
        let mut entries: Vec<(T, usize, usize)> = Vec::new();
        let eigs: Vec<_> = self.blocks.iter().map(linalg::herm_eig).collect();
        for (b, (vals, _)) in eigs.iter().enumerate() {
            for (k, &l) in vals.iter().enumerate() {
                entries.push((l, b, k));
            }
        }
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let vals: Vec<T> = entries.iter().map(|e| e.0).collect();
        linalg::clusters(&vals, tol)
            .into_iter()
            .map(|range| {
                let mut proj = Self::zeros(&self.algebra);
                let mut mean = T::zero();
                for &(l, b, k) in &entries[range.clone()] {
                    let v = eigs[b].1.column(k);
                    proj.blocks[b] += v * v.adjoint();
                    mean += l;
                }
                (mean / T::of(range.len() as f64), proj)
            })
            .collect()
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }
}

impl<T: Real> Add for &BlockMatrix<T> {
    type Output = BlockMatrix<T>;
    fn add(self, rhs: Self) -> BlockMatrix<T> {
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &BlockMatrix<T> {
    type Output = BlockMatrix<T>;
    fn sub(self, rhs: Self) -> BlockMatrix<T> {
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

impl<T: Real> Mul for &BlockMatrix<T> {
    type Output = BlockMatrix<T>;
    fn mul(self, rhs: Self) -> BlockMatrix<T> {
        self.zip_blocks(rhs, |a, b| a * b)
    }
}

impl<T: Real> Neg for &BlockMatrix<T> {
    type Output = BlockMatrix<T>;
    fn neg(self) -> BlockMatrix<T> {
        self.map_blocks(|m| -m)
    }
}

/// A self-adjoint idempotent element.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection<T: Real>(BlockMatrix<T>);

impl<T: Real> Projection<T> {
    pub fn new(e: BlockMatrix<T>) -> Result<Self> {
        let tol = atol::<T>(e.algebra().total_dim());
        if e.is_projection(tol) {
            Ok(Self(e))
        } else {
            Err(Error::DataInvalid("element is not a projection".into()))
        }
    }

    /// Wrap an element known to be a projection by construction.
    pub(crate) fn assume(e: BlockMatrix<T>) -> Self {
        Self(e)
    }

    pub fn element(&self) -> &BlockMatrix<T> {
        &self.0
    }

    pub fn into_element(self) -> BlockMatrix<T> {
        self.0
    }

    pub fn rank(&self) -> usize {
        let t = self.0.trace().re.as_f64();
        t.round().max(0.0) as usize
    }
}

/// A positive linear functional `x ↦ Tr(ρ x)`, normally of trace one.
#[derive(Clone, Debug, PartialEq)]
pub struct State<T: Real> {
    density: BlockMatrix<T>,
    faithful: bool,
}

impl<T: Real> State<T> {
    /// A normalized state; validates Hermiticity, positivity and `Tr ρ = 1`.
    pub fn new(density: BlockMatrix<T>) -> Result<Self> {
        let s = Self::positive_functional(density)?;
        let tol = atol::<T>(s.density.algebra().total_dim());
        let tr = s.density.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::DataInvalid(format!(
                "density has trace {} (expected 1)",
                tr.re.as_f64()
            )));
        }
        Ok(s)
    }

    /// A positive functional with arbitrary total mass.
    pub fn positive_functional(density: BlockMatrix<T>) -> Result<Self> {
        let tol = atol::<T>(density.algebra().total_dim());
        if !density.is_hermitian(tol) {
            return Err(Error::DataInvalid("density is not Hermitian".into()));
        }
        let min = density.min_eigenvalue();
        if min < -tol {
            return Err(Error::NonPositiveDensity {
                min_eigenvalue: min.as_f64(),
            });
        }
        let density = density.map_blocks(|m| (m + m.adjoint()) * cr(T::of(0.5)));
        let faithful = min > T::of(T::EPS_FAITHFUL);
        Ok(Self { density, faithful })
    }

    /// The normalized trace `Tr / Σ n_b`.
    pub fn tracial(algebra: &Algebra) -> Self {
        let n = T::of(algebra.rep_dim() as f64);
        Self {
            density: BlockMatrix::identity(algebra).scale_re(T::one() / n),
            faithful: true,
        }
    }

    /// Seeded faithful state: `ρ = (1 − N δ) G G*/Tr(G G*) + δ·1` with `δ = 2 ε_faithful`,
    /// so that the smallest eigenvalue is at least `δ`.
    pub fn random_faithful(algebra: &Algebra, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_faithful_with(algebra, &mut rng)
    }

    pub fn random_faithful_with<R: rand::Rng>(algebra: &Algebra, rng: &mut R) -> Self {
        let blocks: Vec<CMat<T>> = algebra
            .blocks()
            .iter()
            .map(|&n| {
                let g = linalg::gaussian::<T, R>(n, n, rng);
                &g * g.adjoint()
            })
            .collect();
        let raw = BlockMatrix::from_blocks(algebra, blocks).expect("shapes match");
        let tr = raw.trace().re;
        let delta = T::of(2.0 * T::EPS_FAITHFUL);
        let big_n = T::of(algebra.rep_dim() as f64);
        let density = &raw.scale_re((T::one() - big_n * delta) / tr)
            + &BlockMatrix::identity(algebra).scale_re(delta);
        let density = density.map_blocks(|m| (m + m.adjoint()) * cr(T::of(0.5)));
        Self {
            density,
            faithful: true,
        }
    }

    pub fn density(&self) -> &BlockMatrix<T> {
        &self.density
    }

    pub fn algebra(&self) -> &Algebra {
        self.density.algebra()
    }

    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    pub fn require_faithful(&self) -> Result<()> {
        if self.faithful {
            Ok(())
        } else {
            Err(Error::NonFaithful {
                min_eigenvalue: self.density.min_eigenvalue().as_f64(),
            })
        }
    }

    pub fn eval(&self, x: &BlockMatrix<T>) -> C<T> {
        (&self.density * x).trace()
    }

    pub fn mass(&self) -> T {
        self.density.trace().re
    }

    /// `ρ^a` on the support of ρ (pseudo-power).
    pub fn power(&self, a: T) -> BlockMatrix<T> {
        let cutoff = self.support_cutoff();
        self.density
            .herm_apply(|l| linalg::support_power(l, a, cutoff))
    }

    /// Support projection `s(φ)`.
    pub fn support(&self) -> Projection<T> {
        let cutoff = self.support_cutoff();
        Projection::assume(
            self.density
                .herm_apply(|l| if l > cutoff { T::one() } else { T::zero() }),
        )
    }

    /// Eigenvalues at or below this are treated as zero.
    pub(crate) fn support_cutoff(&self) -> T {
        let top = self
            .density
            .eigenvalues()
            .last()
            .copied()
            .unwrap_or_else(T::zero);
        (top * T::of(T::EPS_FAITHFUL)).max(T::of(T::RANK_RTOL) * T::of(1e-6))
    }
}

/// A linear map between algebras acting on vectorized elements.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraMap<T: Real> {
    source: Algebra,
    target: Algebra,
    matrix: CMat<T>,
}

impl<T: Real> AlgebraMap<T> {
    pub fn new(source: &Algebra, target: &Algebra, matrix: CMat<T>) -> Result<Self> {
        if matrix.shape() != (target.total_dim(), source.total_dim()) {
            return Err(Error::ShapeMismatch(format!(
                "map matrix {:?} for {} -> {}",
                matrix.shape(),
                source.total_dim(),
                target.total_dim()
            )));
        }
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            matrix,
        })
    }

    /// Matrix of `f` assembled column by column from the matrix units.
    pub fn from_fn(
        source: &Algebra,
        target: &Algebra,
        f: impl Fn(&BlockMatrix<T>) -> BlockMatrix<T>,
    ) -> Self {
        Self {
            source: source.clone(),
            target: target.clone(),
            matrix: matrix_of(source, target, f),
        }
    }

    pub fn identity(algebra: &Algebra) -> Self {
        let d = algebra.total_dim();
        Self {
            source: algebra.clone(),
            target: algebra.clone(),
            matrix: CMat::identity(d, d),
        }
    }

    /// `x ↦ x^T` blockwise.
    pub fn transpose(algebra: &Algebra) -> Self {
        Self::from_fn(algebra, algebra, |x| x.transpose())
    }

    pub fn source(&self) -> &Algebra {
        &self.source
    }

    pub fn target(&self) -> &Algebra {
        &self.target
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    pub fn apply(&self, x: &BlockMatrix<T>) -> Result<BlockMatrix<T>> {
        self.source.check_same(x.algebra(), "map input")?;
        Ok(apply_matrix(&self.matrix, &self.target, x))
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &AlgebraMap<T>) -> Result<Self> {
        self.source.check_same(&inner.target, "composition")?;
        Ok(Self {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix: &self.matrix * &inner.matrix,
        })
    }

    /// `Ad_u ∘ self` for an element `u` of the target.
    pub fn conjugated_by(&self, u: &BlockMatrix<T>) -> Self {
        let ud = u.adjoint();
        let images = images(self);
        let cols: Vec<BlockMatrix<T>> = images.iter().map(|y| &(u * y) * &ud).collect();
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: columns_to_matrix(&cols, self.target.total_dim()),
        }
    }

    pub fn min_singular_value(&self) -> T {
        linalg::singular_values(&self.matrix)
            .into_iter()
            .fold(T::max_value().unwrap_or_else(T::one), |a, s| a.min(s))
    }

    /// Left inverse on the range (Moore–Penrose); meaningful for injective maps.
    pub fn pseudo_inverse(&self) -> Result<Self> {
        let d = linalg::svd(&self.matrix);
        let top = d.s.first().copied().unwrap_or_else(T::zero);
        let cutoff = top * T::of(T::RANK_RTOL);
        let mut inv = CMat::zeros(self.source.total_dim(), self.target.total_dim());
        for (k, &s) in d.s.iter().enumerate() {
            if s > cutoff {
                let vk = d.v.column(k);
                let uk = d.u.column(k);
                inv += (vk * uk.adjoint()) * cr(T::one() / s);
            }
        }
        Ok(Self {
            source: self.target.clone(),
            target: self.source.clone(),
            matrix: inv,
        })
    }
}

pub(crate) fn apply_matrix<T: Real>(
    m: &CMat<T>,
    target: &Algebra,
    x: &BlockMatrix<T>,
) -> BlockMatrix<T> {
    let v = nalgebra::DVector::from_vec(x.to_vec());
    let out = m * v;
    BlockMatrix::from_vec(target, out.as_slice()).expect("matrix rows match target")
}

pub(crate) fn matrix_of<T: Real>(
    source: &Algebra,
    target: &Algebra,
    f: impl Fn(&BlockMatrix<T>) -> BlockMatrix<T>,
) -> CMat<T> {
    let cols: Vec<BlockMatrix<T>> = (0..source.total_dim())
        .map(|k| f(&BlockMatrix::basis(source, k)))
        .collect();
    columns_to_matrix(&cols, target.total_dim())
}

pub(crate) fn columns_to_matrix<T: Real>(cols: &[BlockMatrix<T>], rows: usize) -> CMat<T> {
    let mut m = CMat::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, z) in c.to_vec().into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    m
}

/// Images of all matrix units, in vectorization order.
pub(crate) fn images<T: Real>(f: &AlgebraMap<T>) -> Vec<BlockMatrix<T>> {
    (0..f.source.total_dim())
        .map(|k| {
            let col: Vec<C<T>> = f.matrix.column(k).iter().copied().collect();
            BlockMatrix::from_vec(&f.target, &col).expect("column matches target")
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomomorphismKind {
    StarHomomorphism,
    JordanOnly,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomomorphismReport {
    pub kind: HomomorphismKind,
    pub star_defect: f64,
    pub jordan_defect: f64,
    pub multiplicative_defect: f64,
    pub min_singular_value: f64,
    pub injective: bool,
}

/// Classify a linear map by checking `F(x*) = F(x)*`, the Jordan identity and
/// multiplicativity on all pairs of matrix units.
pub fn homomorphism_kind<T: Real>(f: &AlgebraMap<T>) -> HomomorphismReport {
    let src = &f.source;
    let imgs = images(f);
    let scale = imgs.iter().fold(T::one(), |a, y| a.max(y.operator_norm()));
    let tol = atol::<T>(f.target.total_dim()) * scale * scale;

    let mut star = T::zero();
    for (k, u) in src.matrix_units().enumerate() {
        let kt = src.index(u.block, u.col, u.row);
        star = star.max(imgs[kt].distance(&imgs[k].adjoint()));
    }

    let d = src.total_dim();
    let mut jordan = T::zero();
    let mut mult = T::zero();
    for a in 0..d {
        let ua = src.unit_at(a);
        for b in 0..d {
            let ub = src.unit_at(b);
            let prod_ab = unit_product(src, ua, ub).map(|k| &imgs[k]);
            let prod_ba = unit_product(src, ub, ua).map(|k| &imgs[k]);
            let fa_fb = &imgs[a] * &imgs[b];
            let fb_fa = &imgs[b] * &imgs[a];
            let lhs_ab = prod_ab
                .cloned()
                .unwrap_or_else(|| BlockMatrix::zeros(&f.target));
            mult = mult.max(lhs_ab.distance(&fa_fb));
            if b >= a {
                let sym_lhs = match prod_ba {
                    Some(y) => &lhs_ab + y,
                    None => lhs_ab,
                };
                jordan = jordan.max(sym_lhs.distance(&(&fa_fb + &fb_fa)));
            }
        }
    }

    let kind = if star <= tol && mult <= tol {
        HomomorphismKind::StarHomomorphism
    } else if star <= tol && jordan <= tol {
        HomomorphismKind::JordanOnly
    } else {
        HomomorphismKind::Neither
    };
    let smin = f.min_singular_value();
    HomomorphismReport {
        kind,
        star_defect: star.as_f64(),
        jordan_defect: jordan.as_f64(),
        multiplicative_defect: mult.as_f64(),
        min_singular_value: smin.as_f64(),
        injective: smin > T::of(T::RANK_RTOL).sqrt() * scale,
    }
}

/// Index of `e_a e_b` if nonzero.
fn unit_product(alg: &Algebra, a: MatrixUnit, b: MatrixUnit) -> Option<usize> {
    (a.block == b.block && a.col == b.row).then(|| alg.index(a.block, a.row, b.col))
}
