//! Subalgebras, modular invariance, state-preserving conditional expectations
//! and their `L_p` extensions `ι_p`, `E_p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{
    columns_to_matrix, homomorphism_kind, images, Algebra, AlgebraMap, BlockMatrix,
    HomomorphismKind, State,
};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::lp::{check_exponent, norm_p, LpMap};
use crate::scalar::{atol, cabs, cr, Real, C};

const DECOMPOSITION_SEED: u64 = 0x5eed_a1e6_b7a0;
const DECOMPOSITION_ATTEMPTS: usize = 8;
const CHECK_SEED: u64 = 0xe7_c0de;

/// Hilbert–Schmidt inner product `Tr(y* x)`.
fn hs<T: Real>(x: &BlockMatrix<T>, y: &BlockMatrix<T>) -> C<T> {
    x.blocks()
        .iter()
        .zip(y.blocks())
        .fold(cr(T::zero()), |acc, (a, b)| acc + b.dotc(a))
}

/// Orthonormal basis (Hilbert–Schmidt) of the span of `elems`.
fn orthonormal_span<T: Real>(alg: &Algebra, elems: &[BlockMatrix<T>]) -> Vec<BlockMatrix<T>> {
    if elems.is_empty() {
        return Vec::new();
    }
    let m = columns_to_matrix(elems, alg.total_dim());
    let d = linalg::svd(&m);
    let top = d.s.first().copied().unwrap_or_else(T::zero);
    let cutoff = top * T::of(T::RANK_RTOL).sqrt();
    d.s.iter()
        .enumerate()
        .filter(|(_, &s)| s > cutoff && s > T::zero())
        .map(|(k, _)| {
            let col: Vec<C<T>> = d.u.column(k).iter().copied().collect();
            BlockMatrix::from_vec(alg, &col).expect("column length")
        })
        .collect()
}

/// Frobenius distance from `x` to the span of an orthonormal family.
fn residual<T: Real>(on: &[BlockMatrix<T>], x: &BlockMatrix<T>) -> T {
    let mut r = x.clone();
    for q in on {
        r = &r - &q.scale(hs(x, q));
    }
    r.frobenius()
}

fn span_tol<T: Real>(d: usize) -> T {
    T::of(T::CLUSTER_TOL * 100.0 * d.max(1) as f64)
}

fn random_hermitian<T: Real, R: Rng>(
    basis: &[BlockMatrix<T>],
    alg: &Algebra,
    rng: &mut R,
) -> BlockMatrix<T> {
    let mut h = BlockMatrix::zeros(alg);
    for b in basis {
        let g: f64 = rng.sample(StandardNormal);
        let herm = (b + &b.adjoint()).scale_re(T::of(0.5));
        h = &h + &herm.scale_re(T::of(g));
    }
    h
}

/// Spectral projections of `h + s·unit` with eigenvalue above one half, where
/// `s` shifts the spectrum of `h` on the unit's range away from zero.
fn shifted_projections<T: Real>(h: &BlockMatrix<T>, unit: &BlockMatrix<T>) -> Vec<BlockMatrix<T>> {
    let s = T::one() + T::of(2.0) * h.operator_norm();
    let shifted = h + &unit.scale_re(s);
    let tol = T::of(T::CLUSTER_TOL) * s;
    shifted
        .spectral_projections(tol)
        .into_iter()
        .filter(|(l, _)| *l > T::of(0.5))
        .map(|(_, e)| e)
        .collect()
}

/// A unital *-subalgebra of a parent algebra, given by a basis, together with
/// an explicit *-isomorphism `⊕_j M_{m_j} → A`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subalgebra<T: Real> {
    parent: Algebra,
    basis: Vec<BlockMatrix<T>>,
    orthonormal: Vec<BlockMatrix<T>>,
    unit: BlockMatrix<T>,
    structure: Algebra,
    embedding: AlgebraMap<T>,
}

impl<T: Real> Subalgebra<T> {
    /// Validate closure and decompose into full matrix blocks.
    pub fn new(parent: &Algebra, basis: Vec<BlockMatrix<T>>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::NotSubalgebra("empty basis".into()));
        }
        for b in &basis {
            parent.check_same(b.algebra(), "subalgebra basis")?;
        }
        let on = orthonormal_span(parent, &basis);
        if on.len() < basis.len() {
            return Err(Error::NotSubalgebra(format!(
                "basis spans dimension {} < {}",
                on.len(),
                basis.len()
            )));
        }
        let tol = span_tol::<T>(parent.total_dim());
        for (i, a) in on.iter().enumerate() {
            let r = residual(&on, &a.adjoint());
            if r > tol {
                return Err(Error::NotSubalgebra(format!(
                    "not closed under adjoint (residual {})",
                    r.as_f64()
                )));
            }
            for b in &on[i..] {
                for prod in [a * b, b * a] {
                    let r = residual(&on, &prod);
                    if r > tol {
                        return Err(Error::NotSubalgebra(format!(
                            "not closed under products (residual {})",
                            r.as_f64()
                        )));
                    }
                }
            }
        }
        let gram = on.iter().fold(BlockMatrix::zeros(parent), |acc, q| {
            &acc + &(q * &q.adjoint())
        });
        let cutoff = gram.operator_norm() * T::of(T::RANK_RTOL).sqrt();
        let unit = gram.herm_apply(|l| if l > cutoff { T::one() } else { T::zero() });
        let r = residual(&on, &unit);
        if r > tol {
            return Err(Error::NotSubalgebra(format!(
                "does not contain the unit of its corner (residual {})",
                r.as_f64()
            )));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(DECOMPOSITION_SEED);
        let mut last = Error::NotSubalgebra("decomposition failed".into());
        for _ in 0..DECOMPOSITION_ATTEMPTS {
            match decompose(parent, &on, &unit, tol, &mut rng) {
                Ok((structure, embedding)) => {
                    return Ok(Self {
                        parent: parent.clone(),
                        basis,
                        orthonormal: on,
                        unit,
                        structure,
                        embedding,
                    })
                }
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    /// The range of an injective *-homomorphism; its source supplies the block structure.
    pub fn from_embedding(pi: &AlgebraMap<T>) -> Result<Self> {
        let report = homomorphism_kind(pi);
        if report.kind != HomomorphismKind::StarHomomorphism || !report.injective {
            return Err(Error::NotSubalgebra(format!(
                "embedding is not an injective *-homomorphism ({:?})",
                report.kind
            )));
        }
        let parent = pi.target().clone();
        let structure = pi.source().without_trace_weights();
        let embedding = AlgebraMap::new(&structure, &parent, pi.matrix().clone())?;
        let basis = images(&embedding);
        let orthonormal = orthonormal_span(&parent, &basis);
        let unit = embedding.apply(&BlockMatrix::identity(&structure))?;
        Ok(Self {
            parent,
            basis,
            orthonormal,
            unit,
            structure,
            embedding,
        })
    }

    /// The whole parent algebra.
    pub fn full(parent: &Algebra) -> Self {
        Self::from_embedding(&AlgebraMap::identity(parent)).expect("identity embeds")
    }

    /// `ℂ·1`.
    pub fn scalars(parent: &Algebra) -> Self {
        Self::new(parent, vec![BlockMatrix::identity(parent)]).expect("scalars form a subalgebra")
    }

    /// Block-diagonal matrices with respect to the standard basis.
    pub fn diagonal(parent: &Algebra) -> Self {
        let basis = parent
            .matrix_units()
            .filter(|u| u.row == u.col)
            .map(|u| BlockMatrix::matrix_unit(parent, u))
            .collect();
        Self::new(parent, basis).expect("diagonal matrices form a subalgebra")
    }

    pub fn parent(&self) -> &Algebra {
        &self.parent
    }

    pub fn basis(&self) -> &[BlockMatrix<T>] {
        &self.basis
    }

    /// Hilbert–Schmidt orthonormal basis of the span.
    pub fn orthonormal_basis(&self) -> &[BlockMatrix<T>] {
        &self.orthonormal
    }

    pub fn dim(&self) -> usize {
        self.orthonormal.len()
    }

    /// Unit of `A`, the projection onto its support corner.
    pub fn unit(&self) -> &BlockMatrix<T> {
        &self.unit
    }

    /// `⊕_j M_{m_j}` isomorphic to `A`.
    pub fn structure(&self) -> &Algebra {
        &self.structure
    }

    /// The *-isomorphism `ι: structure → A ⊂ parent`.
    pub fn embedding(&self) -> &AlgebraMap<T> {
        &self.embedding
    }

    /// Same subalgebra with the basis permuted.
    pub fn with_basis_order(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.basis.len()];
        if order.len() != self.basis.len()
            || order
                .iter()
                .any(|&k| k >= seen.len() || std::mem::replace(&mut seen[k], true))
        {
            return Err(Error::ConfigInvalid(
                "basis order is not a permutation".into(),
            ));
        }
        Ok(Self {
            basis: order.iter().map(|&k| self.basis[k].clone()).collect(),
            ..self.clone()
        })
    }

    /// Frobenius distance from `x` to `span A`.
    pub fn distance_to(&self, x: &BlockMatrix<T>) -> T {
        residual(&self.orthonormal, x)
    }

    pub fn contains(&self, x: &BlockMatrix<T>, tol: T) -> bool {
        self.distance_to(x) <= tol
    }

    /// `ι(g)` for a Gaussian element `g` of the structure algebra.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> BlockMatrix<T> {
        let g = BlockMatrix::gaussian(&self.structure, rng);
        self.embedding.apply(&g).expect("structure shape")
    }
}

fn decompose<T: Real, R: Rng>(
    parent: &Algebra,
    on: &[BlockMatrix<T>],
    unit: &BlockMatrix<T>,
    tol: T,
    rng: &mut R,
) -> Result<(Algebra, AlgebraMap<T>)> {
    let d = on.len();
    let big_d = parent.total_dim();
    let mut k = CMat::zeros(d * big_d, d);
    for (c, qi) in on.iter().enumerate() {
        for (r, qk) in on.iter().enumerate() {
            for (i, z) in qi.commutator(qk).to_vec().into_iter().enumerate() {
                k[(r * big_d + i, c)] = z;
            }
        }
    }
    let svd = linalg::svd(&k);
    let center: Vec<BlockMatrix<T>> = (0..d)
        .filter(|&m| svd.s.get(m).is_none_or(|&s| s <= tol))
        .map(|m| {
            on.iter()
                .enumerate()
                .fold(BlockMatrix::zeros(parent), |acc, (i, q)| {
                    &acc + &q.scale(svd.v[(i, m)])
                })
        })
        .collect();

    let z = random_hermitian(&center, parent, rng);
    let central = shifted_projections(&z, unit);
    if central.len() != center.len() {
        return Err(Error::NotSubalgebra(format!(
            "center of dimension {} split into {} projections",
            center.len(),
            central.len()
        )));
    }

    let mut sizes = Vec::with_capacity(central.len());
    let mut units: Vec<Vec<Vec<BlockMatrix<T>>>> = Vec::with_capacity(central.len());
    for q in &central {
        let summand: Vec<BlockMatrix<T>> = on.iter().map(|a| q * a).collect();
        let summand = orthonormal_span(parent, &summand);
        let dj = summand.len();
        let m = (dj as f64).sqrt().round() as usize;
        if m * m != dj {
            return Err(Error::NotSubalgebra(format!(
                "summand of dimension {dj} is not a full matrix algebra"
            )));
        }
        let h = random_hermitian(&summand, parent, rng);
        let minimal = shifted_projections(&h, q);
        if minimal.len() != m {
            return Err(Error::NotSubalgebra(format!(
                "summand of size {m} split into {} minimal projections",
                minimal.len()
            )));
        }
        let a = summand.iter().fold(BlockMatrix::zeros(parent), |acc, b| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            &acc + &b.scale(C::new(T::of(re), T::of(im)))
        });
        let f1 = &minimal[0];
        let tr1 = f1.trace().re;
        let mut col1 = vec![f1.clone()];
        for fk in &minimal[1..] {
            let v = &(fk * &a) * f1;
            let c = hs(&v, &v).re / tr1;
            if c <= T::of(T::RANK_RTOL).sqrt() {
                return Err(Error::NotSubalgebra("degenerate matrix-unit draw".into()));
            }
            col1.push(v.scale_re(T::one() / c.sqrt()));
        }
        let block: Vec<Vec<BlockMatrix<T>>> = (0..m)
            .map(|r| (0..m).map(|c| &col1[r] * &col1[c].adjoint()).collect())
            .collect();
        sizes.push(m);
        units.push(block);
    }

    let structure = Algebra::new(sizes)?;
    let cols: Vec<BlockMatrix<T>> = structure
        .matrix_units()
        .map(|u| units[u.block][u.row][u.col].clone())
        .collect();
    let embedding = AlgebraMap::new(&structure, parent, columns_to_matrix(&cols, big_d))?;
    if structure.total_dim() != d {
        return Err(Error::NotSubalgebra(
            "dimension mismatch after decomposition".into(),
        ));
    }
    if homomorphism_kind(&embedding).kind != HomomorphismKind::StarHomomorphism {
        return Err(Error::NotSubalgebra(
            "matrix units are not multiplicative".into(),
        ));
    }
    Ok((structure, embedding))
}

/// `ρ_c = PρP` on the corner of `A`, or `NonFaithful` if it is singular there.
fn corner_density<T: Real>(a: &Subalgebra<T>, phi_bar: &State<T>) -> Result<BlockMatrix<T>> {
    a.parent.check_same(phi_bar.algebra(), "state")?;
    let p = &a.unit;
    let rho_c = &(p * phi_bar.density()) * p;
    let complement = &BlockMatrix::identity(&a.parent) - p;
    let min = (&rho_c + &complement).min_eigenvalue();
    if min <= T::of(T::EPS_FAITHFUL) {
        return Err(Error::NonFaithful {
            min_eigenvalue: min.as_f64(),
        });
    }
    Ok(rho_c)
}

/// Invariance of `A` under the modular group of `φ̄` compressed to the corner of `A`,
/// tested through the generator: the defect is the largest distance of
/// `[log ρ, a]` from `span A` over an orthonormal basis.
pub fn takesaki_invariant<T: Real>(a: &Subalgebra<T>, phi_bar: &State<T>) -> Result<(bool, T)> {
    let rho_c = corner_density(a, phi_bar)?;
    let complement = &BlockMatrix::identity(&a.parent) - &a.unit;
    let g = (&rho_c + &complement).herm_apply(|l| l.ln());
    let defect = a
        .orthonormal
        .iter()
        .map(|q| residual(&a.orthonormal, &g.commutator(q)))
        .fold(T::zero(), |m, r| m.max(r));
    let tol = atol::<T>(a.parent.total_dim()) * T::one().max(g.operator_norm());
    Ok((defect < tol, defect))
}

/// Individual defects of the conditional-expectation axioms.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationReport {
    pub idempotence: f64,
    pub module: f64,
    pub positivity: f64,
    pub state_preservation: f64,
    pub identity_on_subalgebra: f64,
    pub unital: f64,
}

impl ExpectationReport {
    pub fn max_defect(&self) -> f64 {
        [
            self.idempotence,
            self.module,
            self.positivity,
            self.state_preservation,
            self.identity_on_subalgebra,
            self.unital,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_defect() <= tol
    }
}

/// A `φ̄`-preserving conditional expectation onto a subalgebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalExpectation<T: Real> {
    subalgebra: Subalgebra<T>,
    state: State<T>,
    map: AlgebraMap<T>,
}

impl<T: Real> ConditionalExpectation<T> {
    pub fn subalgebra(&self) -> &Subalgebra<T> {
        &self.subalgebra
    }

    pub fn state(&self) -> &State<T> {
        &self.state
    }

    /// Matrix of `E` as a map of the parent into itself.
    pub fn map(&self) -> &AlgebraMap<T> {
        &self.map
    }

    pub fn apply(&self, x: &BlockMatrix<T>) -> Result<BlockMatrix<T>> {
        self.map.apply(x)
    }

    /// The same map regarded as preserving another state.
    pub(crate) fn with_state(&self, state: State<T>) -> Self {
        Self {
            state,
            ..self.clone()
        }
    }

    /// Evaluate every axiom on the basis and on seeded random samples; state
    /// preservation is tested for the state compressed to the corner of `A`.
    pub fn check(&self) -> ExpectationReport {
        let alg = &self.subalgebra.parent;
        let e = |x: &BlockMatrix<T>| self.map.apply(x).expect("parent shape");
        let mut rng = ChaCha8Rng::seed_from_u64(CHECK_SEED);
        let samples: Vec<BlockMatrix<T>> = (0..3)
            .map(|_| {
                let g = BlockMatrix::gaussian(alg, &mut rng);
                let n = g.frobenius();
                g.scale_re(T::one() / n)
            })
            .collect();

        let m = self.map.matrix();
        let idempotence = linalg::frobenius(&(m * m - m));

        let on = &self.subalgebra.orthonormal;
        let mut module = T::zero();
        for x in &samples {
            let ex = e(x);
            for a in on {
                for b in on {
                    let lhs = e(&(&(a * x) * b));
                    let rhs = &(a * &ex) * b;
                    module = module.max(lhs.distance(&rhs));
                }
            }
        }

        let positivity = samples
            .iter()
            .map(|y| e(&(y * &y.adjoint())).min_eigenvalue())
            .fold(T::zero(), |acc, l| acc.max(-l));

        let unit = &self.subalgebra.unit;
        let corner = &(unit * self.state.density()) * unit;
        let state_preservation = (0..alg.total_dim())
            .map(|k| {
                let x = BlockMatrix::basis(alg, k);
                cabs((&corner * &e(&x)).trace() - (&corner * &x).trace())
            })
            .fold(T::zero(), |acc, d| acc.max(d));

        let identity_on_subalgebra = on
            .iter()
            .map(|a| e(a).distance(a))
            .fold(T::zero(), |acc, d| acc.max(d));

        let unital = e(&BlockMatrix::identity(alg)).distance(&self.subalgebra.unit);

        ExpectationReport {
            idempotence: idempotence.as_f64(),
            module: module.as_f64(),
            positivity: positivity.as_f64(),
            state_preservation: state_preservation.as_f64(),
            identity_on_subalgebra: identity_on_subalgebra.as_f64(),
            unital: unital.as_f64(),
        }
    }
}

/// The unique `φ̄`-preserving conditional expectation onto `A`, computed as the
/// orthogonal projection for `⟨x, y⟩ = Tr(ρ_c y* x)` on the corner of `A`
/// and extended by `x ↦ E(PxP)`.
pub fn construct_expectation<T: Real>(
    a: &Subalgebra<T>,
    phi_bar: &State<T>,
) -> Result<ConditionalExpectation<T>> {
    let (invariant, defect) = takesaki_invariant(a, phi_bar)?;
    if !invariant {
        return Err(Error::NotInvariant {
            defect: defect.as_f64(),
        });
    }
    let rho_c = corner_density(a, phi_bar)?;
    let alg = &a.parent;
    let gns = |x: &BlockMatrix<T>, y: &BlockMatrix<T>| (&(&rho_c * &y.adjoint()) * x).trace();

    let mut u: Vec<BlockMatrix<T>> = Vec::with_capacity(a.basis.len());
    for b in &a.basis {
        let mut v = b.clone();
        for _ in 0..2 {
            for q in &u {
                v = &v - &q.scale(gns(&v, q));
            }
        }
        let n = gns(&v, &v).re.max(T::zero()).sqrt();
        if n > T::of(T::RANK_RTOL) {
            u.push(v.scale_re(T::one() / n));
        }
    }

    let d = alg.total_dim();
    let mut m = CMat::zeros(d, d);
    for q in &u {
        let row = (&rho_c * &q.adjoint()).transpose().to_vec();
        let col = q.to_vec();
        for (i, ci) in col.iter().enumerate() {
            for (j, rj) in row.iter().enumerate() {
                m[(i, j)] += *ci * *rj;
            }
        }
    }
    let e = ConditionalExpectation {
        subalgebra: a.clone(),
        state: phi_bar.clone(),
        map: AlgebraMap::new(alg, alg, m)?,
    };
    let report = e.check();
    let tol = atol::<T>(d).as_f64() * 1e3;
    if !report.passes(tol) {
        return Err(Error::DataInvalid(format!(
            "conditional expectation failed verification (max defect {:e})",
            report.max_defect()
        )));
    }
    Ok(e)
}

/// Positive functional whose value on each matrix unit is given.
fn density_of<T: Real>(alg: &Algebra, f: impl Fn(&BlockMatrix<T>) -> C<T>) -> BlockMatrix<T> {
    let mut rho = BlockMatrix::zeros(alg);
    for u in alg.matrix_units() {
        rho.block_mut(u.block)[(u.col, u.row)] = f(&BlockMatrix::matrix_unit(alg, u));
    }
    rho
}

/// `φ̄ ∘ ι` as a functional on the structure algebra of `A`.
pub fn restrict_state<T: Real>(phi_bar: &State<T>, a: &Subalgebra<T>) -> Result<State<T>> {
    a.parent.check_same(phi_bar.algebra(), "state")?;
    let rho = density_of(&a.structure, |x| {
        phi_bar.eval(&a.embedding.apply(x).expect("structure shape"))
    });
    State::positive_functional(rho)
}

/// Matrix of `φ_A^{α} x ↦ (φ_A ∘ ι⁻¹ ∘ E)^{α} ι(x)`.
fn inclusion_map<T: Real>(
    e: &ConditionalExpectation<T>,
    phi_a: &State<T>,
    alpha: T,
) -> Result<AlgebraMap<T>> {
    let a = &e.subalgebra;
    a.structure
        .check_same(phi_a.algebra(), "subalgebra state")?;
    phi_a.require_faithful()?;
    if alpha <= T::zero() {
        return Ok(a.embedding.clone());
    }
    let inv = a.embedding.pseudo_inverse()?;
    let rho_bar = density_of(&a.parent, |x| {
        let y = inv
            .apply(&e.map.apply(x).expect("parent shape"))
            .expect("parent shape");
        phi_a.eval(&y)
    });
    let rho_bar = State::positive_functional(rho_bar)?.power(alpha);
    let left = phi_a.power(-alpha);
    Ok(AlgebraMap::from_fn(&a.structure, &a.parent, |x| {
        &rho_bar * &a.embedding.apply(&(&left * x)).expect("structure shape")
    }))
}

/// `ι_p: L_p(A) → L_p(N)`, `φ_A^{1/p} x ↦ (φ_A ∘ E)^{1/p} x`.
pub fn lp_inclusion<T: Real>(
    e: &ConditionalExpectation<T>,
    phi_a: &State<T>,
    p: T,
) -> Result<LpMap<T>> {
    check_exponent(p)?;
    LpMap::from_map(inclusion_map(e, phi_a, T::one() / p)?, p)
}

/// `E_p: L_p(N) → L_p(A)`, the trace-duality adjoint of `ι_{p'}`.
pub fn lp_expectation<T: Real>(
    e: &ConditionalExpectation<T>,
    phi_bar: &State<T>,
    p: T,
) -> Result<LpMap<T>> {
    check_exponent(p)?;
    let a = &e.subalgebra;
    let phi_a = restrict_state(phi_bar, a)?;
    let dual = inclusion_map(e, &phi_a, T::one() - T::one() / p)?;
    let j = dual.matrix();
    let (sa, sn) = (&a.structure, &a.parent);
    let flip = |alg: &Algebra, k: usize| {
        let u = alg.unit_at(k);
        alg.index(u.block, u.col, u.row)
    };
    let m = CMat::from_fn(sa.total_dim(), sn.total_dim(), |r, c| {
        j[(flip(sn, c), flip(sa, r))]
    });
    LpMap::new(sn, sa, p, m)
}

/// `‖φ_A^{1/p} x‖_{L_p(A)} − ‖φ̄^{1/p} ι(x)‖_{L_p(N)}` with `φ_A = φ̄ ∘ ι`, for `x` in
/// the structure algebra. Nonnegative for `p ≥ 2`; identically zero when a
/// `φ̄`-preserving expectation onto `A` exists.
pub fn interpolation_gap<T: Real>(
    a: &Subalgebra<T>,
    phi_bar: &State<T>,
    x: &BlockMatrix<T>,
    p: T,
) -> Result<T> {
    check_exponent(p)?;
    a.structure.check_same(x.algebra(), "subalgebra element")?;
    let phi_a = restrict_state(phi_bar, a)?;
    let alpha = T::one() / p;
    let inner = norm_p(&(&phi_a.power(alpha) * x), p);
    let outer = norm_p(&(&phi_bar.power(alpha) * &a.embedding.apply(x)?), p);
    Ok(inner - outer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{trace_pairing, LpVector};
    use crate::scalar::cf;

    fn alg(blocks: &[usize]) -> Algebra {
        Algebra::new(blocks.to_vec()).unwrap()
    }

    fn m2(entries: [[f64; 2]; 2]) -> BlockMatrix<f64> {
        let a = alg(&[2]);
        let mut x = BlockMatrix::zeros(&a);
        for (i, row) in entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                x.block_mut(0)[(i, j)] = cr(v);
            }
        }
        x
    }

    #[test]
    fn diagonal_subalgebra_decomposes() {
        let a = Subalgebra::<f64>::diagonal(&alg(&[3, 2]));
        assert_eq!(a.dim(), 5);
        assert_eq!(a.structure().blocks(), &[1, 1, 1, 1, 1]);
        assert!(a.unit().distance(&BlockMatrix::identity(a.parent())) < 1e-12);
    }

    #[test]
    fn rotated_amplification_decomposes() {
        let parent = alg(&[4, 3]);
        let small = alg(&[2]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u0 = linalg::random_unitary::<f64, _>(4, &mut rng);
        let u1 = linalg::random_unitary::<f64, _>(3, &mut rng);
        let pi = AlgebraMap::from_fn(&small, &parent, |x| {
            let b0 = linalg::kron(x.block(0), &CMat::identity(2, 2));
            let mut b1 = CMat::zeros(3, 3);
            b1.view_mut((0, 0), (2, 2)).copy_from(x.block(0));
            BlockMatrix::from_blocks(
                &parent,
                vec![&u0 * b0 * u0.adjoint(), &u1 * b1 * u1.adjoint()],
            )
            .unwrap()
        });
        let basis = images(&pi);
        let a = Subalgebra::new(&parent, basis).unwrap();
        assert_eq!(a.structure().blocks(), &[2]);
        assert!(
            a.unit()
                .distance(&pi.apply(&BlockMatrix::identity(&small)).unwrap())
                < 1e-10
        );
    }

    #[test]
    fn rejects_non_subalgebras() {
        let a = alg(&[2]);
        let e12 = m2([[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(
            Subalgebra::new(&a, vec![e12.clone()]),
            Err(Error::NotSubalgebra(_))
        ));
        assert!(matches!(
            Subalgebra::new(&a, vec![e12.clone(), e12]),
            Err(Error::NotSubalgebra(_))
        ));
    }

    #[test]
    fn invariance_examples() {
        let a = Subalgebra::<f64>::diagonal(&alg(&[2]));
        let diag = State::new(m2([[0.7, 0.0], [0.0, 0.3]])).unwrap();
        let (inv, defect) = takesaki_invariant(&a, &diag).unwrap();
        assert!(inv && defect < 1e-12);
        let rot = State::new(m2([[0.5, 0.3], [0.3, 0.5]])).unwrap();
        let (inv, defect) = takesaki_invariant(&a, &rot).unwrap();
        assert!(!inv && defect > 1e-3);
        let full = Subalgebra::full(&alg(&[2]));
        assert!(takesaki_invariant(&full, &rot).unwrap().0);
        let pure = State::new(m2([[1.0, 0.0], [0.0, 0.0]])).unwrap();
        assert!(matches!(
            takesaki_invariant(&a, &pure),
            Err(Error::NonFaithful { .. })
        ));
    }

    #[test]
    fn diagonal_expectation_keeps_diagonal() {
        let a = Subalgebra::<f64>::diagonal(&alg(&[2]));
        let phi = State::new(m2([[0.7, 0.0], [0.0, 0.3]])).unwrap();
        let e = construct_expectation(&a, &phi).unwrap();
        let x = m2([[1.0, 2.0], [3.0, 4.0]]);
        assert!(e.apply(&x).unwrap().distance(&m2([[1.0, 0.0], [0.0, 4.0]])) < 1e-12);
        assert!(e.check().passes(1e-12));
        let rot = State::new(m2([[0.5, 0.3], [0.3, 0.5]])).unwrap();
        assert!(matches!(
            construct_expectation(&a, &rot),
            Err(Error::NotInvariant { .. })
        ));
    }

    #[test]
    fn scalar_expectation_is_the_state() {
        let parent = alg(&[2, 1]);
        let phi = State::<f64>::random_faithful(&parent, 5);
        let e = construct_expectation(&Subalgebra::scalars(&parent), &phi).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = BlockMatrix::gaussian(&parent, &mut rng);
        let expected = BlockMatrix::identity(&parent).scale(phi.eval(&x));
        assert!(e.apply(&x).unwrap().distance(&expected) < 1e-12);
    }

    #[test]
    fn full_expectation_is_identity_and_order_free() {
        let parent = alg(&[2, 2]);
        let phi = State::<f64>::random_faithful(&parent, 9);
        let a = Subalgebra::full(&parent);
        let e = construct_expectation(&a, &phi).unwrap();
        let id = CMat::<f64>::identity(8, 8);
        assert!(linalg::frobenius(&(e.map().matrix() - &id)) < 1e-10);
        let rev: Vec<usize> = (0..8).rev().collect();
        let e2 = construct_expectation(&a.with_basis_order(&rev).unwrap(), &phi).unwrap();
        assert!(linalg::frobenius(&(e.map().matrix() - e2.map().matrix())) < 1e-10);
    }

    #[test]
    fn inclusion_and_expectation_are_dual() {
        let parent = alg(&[2]);
        let a = Subalgebra::<f64>::diagonal(&parent);
        let phi = State::new(m2([[0.7, 0.0], [0.0, 0.3]])).unwrap();
        let e = construct_expectation(&a, &phi).unwrap();
        let phi_a = restrict_state(&phi, &a).unwrap();
        let p = 3.0;
        let iota = lp_inclusion(&e, &phi_a, p).unwrap();
        let ep = lp_expectation(&e, &phi, p).unwrap();
        let iota_dual = lp_inclusion(&e, &phi_a, 1.5).unwrap();

        let top = phi_a.power(1.0 / p);
        assert!(iota.apply_element(&top).distance(&phi.power(1.0 / p)) < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let h = BlockMatrix::gaussian(&parent, &mut rng);
            let k = BlockMatrix::gaussian(a.structure(), &mut rng);
            let lhs = trace_pairing(
                &LpVector::new(ep.apply_element(&h), p).unwrap(),
                &LpVector::new(k.clone(), 1.5).unwrap(),
            )
            .unwrap();
            let rhs = trace_pairing(
                &LpVector::new(h.clone(), p).unwrap(),
                &LpVector::new(iota_dual.apply_element(&k), 1.5).unwrap(),
            )
            .unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
            let x = BlockMatrix::gaussian(a.structure(), &mut rng);
            assert!(ep.apply_element(&iota.apply_element(&x)).distance(&x) < 1e-12);
            assert!(norm_p(&ep.apply_element(&h), p) <= norm_p(&h, p) + 1e-12);
        }

        let mut e11 = BlockMatrix::zeros(a.structure());
        e11.block_mut(0)[(0, 0)] = cr(1.0);
        let h = &top * &e11;
        assert!((norm_p(&iota.apply_element(&h), p) - norm_p(&h, p)).abs() < 1e-12);
    }

    #[test]
    fn interpolation_gap_detects_rotation() {
        let a = Subalgebra::<f64>::diagonal(&alg(&[2]));
        let rot = State::new(m2([[0.5, 0.3], [0.3, 0.5]])).unwrap();
        let mut x = BlockMatrix::zeros(a.structure());
        x.block_mut(0)[(0, 0)] = cr(1.0);
        let gap = interpolation_gap(&a, &rot, &x, 4.0).unwrap();
        assert!(gap > 1e-3, "gap {gap}");
        let diag = State::new(m2([[0.6, 0.0], [0.0, 0.4]])).unwrap();
        x.block_mut(1)[(0, 0)] = cf(0.3, -2.0);
        assert!(interpolation_gap(&a, &diag, &x, 4.0).unwrap().abs() < 1e-12);
    }
}
