//! Noncommutative L_p vectors over `⊕_b M_{n_b}` and the maps between them.
//!
//! For a state with density ρ the symbol `φ^{1/p}` is realized as `ρ^{1/p}`;
//! `‖h‖_p = τ(|h|^p)^{1/p}` with `τ = Σ_b weight_b · Tr_b` (weights default to 1).

use serde::{Deserialize, Serialize};

use crate::algebra::{apply_matrix, Algebra, AlgebraMap, BlockMatrix, Projection, State};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalar::{atol, cr, Real, C};

#[derive(Clone, Debug, PartialEq)]
pub struct LpVector<T: Real> {
    p: T,
    data: BlockMatrix<T>,
}

pub(crate) fn check_exponent<T: Real>(p: T) -> Result<()> {
    if p >= T::one() && p.is_finite() {
        Ok(())
    } else {
        Err(Error::ExponentUnsupported(p.as_f64()))
    }
}

/// `p' = p/(p−1)`; `None` stands for `∞` (p = 1).
pub fn conjugate_exponent<T: Real>(p: T) -> Option<T> {
    if p <= T::one() {
        None
    } else {
        Some(p / (p - T::one()))
    }
}

pub(crate) fn same_exponent<T: Real>(p: T, q: T) -> bool {
    (p - q).abs() <= T::of(1e-12).max(T::default_epsilon() * T::of(16.0)) * p.max(q)
}

impl<T: Real> LpVector<T> {
    pub fn new(data: BlockMatrix<T>, p: T) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self { p, data })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn data(&self) -> &BlockMatrix<T> {
        &self.data
    }

    pub fn into_data(self) -> BlockMatrix<T> {
        self.data
    }

    pub fn algebra(&self) -> &Algebra {
        self.data.algebra()
    }

    pub fn with_p(&self, p: T) -> Result<Self> {
        Self::new(self.data.clone(), p)
    }

    pub fn norm(&self) -> T {
        norm_p(&self.data, self.p)
    }
}

/// `τ(x) = Σ_b weight_b Tr(x_b)`.
pub fn weighted_trace<T: Real>(x: &BlockMatrix<T>) -> C<T> {
    let alg = x.algebra();
    x.blocks()
        .iter()
        .enumerate()
        .fold(cr(T::zero()), |acc, (b, m)| {
            acc + m.trace() * cr(T::of(alg.trace_weight(b)))
        })
}

/// `(Σ_b weight_b Σ σ_k(x_b)^p)^{1/p}` from singular values.
pub fn norm_p<T: Real>(x: &BlockMatrix<T>, p: T) -> T {
    let alg = x.algebra();
    let mut acc = T::zero();
    for (b, m) in x.blocks().iter().enumerate() {
        let wb = T::of(alg.trace_weight(b));
        let s: T = linalg::singular_values(m)
            .into_iter()
            .filter(|&s| s > T::zero())
            .fold(T::zero(), |a, s| a + s.powf(p));
        acc += wb * s;
    }
    if acc <= T::zero() {
        T::zero()
    } else {
        acc.powf(T::one() / p)
    }
}

pub fn lp_norm<T: Real>(h: &LpVector<T>) -> T {
    h.norm()
}

/// Polar data `h = w·|h|` with supports `s_l = w w*`, `s_r = w* w`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarData<T: Real> {
    pub w: BlockMatrix<T>,
    pub modulus: LpVector<T>,
    pub s_left: Projection<T>,
    pub s_right: Projection<T>,
}

/// Partial isometry, modulus and supports of an element.
///
/// Singular values below `RANK_RTOL × σ_max` (σ_max over all blocks) are
/// treated as zero; the partial isometry has its singular values snapped to 1.
pub fn polar<T: Real>(h: &BlockMatrix<T>) -> (BlockMatrix<T>, BlockMatrix<T>) {
    let alg = h.algebra();
    let svds: Vec<_> = h.blocks().iter().map(linalg::svd).collect();
    let smax = svds
        .iter()
        .flat_map(|d| d.s.iter().copied())
        .fold(T::zero(), |a, s| a.max(s));
    let cutoff = smax * T::of(T::RANK_RTOL);
    let mut w_blocks = Vec::with_capacity(svds.len());
    let mut m_blocks = Vec::with_capacity(svds.len());
    for (d, &n) in svds.iter().zip(alg.blocks()) {
        let mut w = CMat::zeros(n, n);
        let mut m = CMat::zeros(n, n);
        for (k, &s) in d.s.iter().enumerate() {
            let vk = d.v.column(k);
            let vv = vk * vk.adjoint();
            m += &vv * cr(s);
            if smax > T::zero() && s > cutoff {
                w += d.u.column(k) * vk.adjoint();
            }
        }
        w_blocks.push(w);
        m_blocks.push(m);
    }
    (
        BlockMatrix::from_blocks(alg, w_blocks).expect("shapes"),
        BlockMatrix::from_blocks(alg, m_blocks).expect("shapes"),
    )
}

pub fn polar_decompose<T: Real>(h: &LpVector<T>) -> PolarData<T> {
    let (w, m) = polar(h.data());
    let s_left = Projection::assume(&w * &w.adjoint());
    let s_right = Projection::assume(&w.adjoint() * &w);
    PolarData {
        w,
        modulus: LpVector { p: h.p, data: m },
        s_left,
        s_right,
    }
}

/// Right support `s_r(x) = w* w`.
pub fn right_support<T: Real>(x: &BlockMatrix<T>) -> BlockMatrix<T> {
    let (w, _) = polar(x);
    &w.adjoint() * &w
}

/// Left support `s_l(x) = w w*`.
pub fn left_support<T: Real>(x: &BlockMatrix<T>) -> BlockMatrix<T> {
    let (w, _) = polar(x);
    &w * &w.adjoint()
}

/// `φ^α = ρ^α`, recorded with exponent `p = 1/α`.
pub fn state_power<T: Real>(phi: &State<T>, alpha: T) -> Result<LpVector<T>> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::ExponentUnsupported((T::one() / alpha).as_f64()));
    }
    let tol = atol::<T>(phi.algebra().total_dim());
    let min = phi.density().min_eigenvalue();
    if min < -tol {
        return Err(Error::NonPositiveDensity {
            min_eigenvalue: min.as_f64(),
        });
    }
    Ok(LpVector {
        p: T::one() / alpha,
        data: phi.power(alpha),
    })
}

/// `⟨x, y⟩ = τ(x y)` for `x ∈ L_p`, `y ∈ L_{p'}`.
pub fn trace_pairing<T: Real>(x: &LpVector<T>, y: &LpVector<T>) -> Result<C<T>> {
    x.algebra().check_same(y.algebra(), "trace pairing")?;
    let sum = T::one() / x.p + T::one() / y.p;
    if (sum - T::one()).abs() > T::of(1e-10) {
        return Err(Error::ExponentMismatch {
            p: x.p.as_f64(),
            q: y.p.as_f64(),
        });
    }
    Ok(weighted_trace(&(x.data() * y.data())))
}

/// Pairing of `L_1` with the algebra itself.
pub fn pair_with_element<T: Real>(x: &LpVector<T>, y: &BlockMatrix<T>) -> Result<C<T>> {
    x.algebra().check_same(y.algebra(), "trace pairing")?;
    if !same_exponent(x.p, T::one()) {
        return Err(Error::ExponentMismatch {
            p: x.p.as_f64(),
            q: f64::INFINITY,
        });
    }
    Ok(weighted_trace(&(x.data() * y)))
}

/// The norming functional of `h` in `L_{p'}`: `y = |h|^{p−1} w* / ‖h‖_p^{p−1}`,
/// so that `τ(h y) = ‖h‖_p` and `‖y‖_{p'} = 1` (for unit trace weights).
pub fn dual_witness<T: Real>(h: &LpVector<T>) -> BlockMatrix<T> {
    let (w, m) = polar(h.data());
    let n = h.norm();
    if n <= T::zero() {
        return BlockMatrix::zeros(h.algebra());
    }
    let pm1 = h.p - T::one();
    let cutoff = m.operator_norm() * T::of(T::RANK_RTOL);
    let mp = m.herm_apply(|l| linalg::support_power(l, pm1, cutoff));
    let mp = if pm1 <= T::zero() {
        &w.adjoint() * &w
    } else {
        mp
    };
    (&mp * &w.adjoint()).scale_re(T::one() / n.powf(pm1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClarksonReport {
    pub defect: f64,
    pub orthogonal: bool,
    pub witness: f64,
}

/// `|‖h+k‖^p + ‖h−k‖^p − 2(‖h‖^p + ‖k‖^p)|` together with the orthogonality
/// witness `max(‖h k*‖, ‖h* k‖)` (Frobenius).
pub fn clarkson_defect<T: Real>(h: &LpVector<T>, k: &LpVector<T>) -> Result<ClarksonReport> {
    h.algebra().check_same(k.algebra(), "clarkson")?;
    if !same_exponent(h.p, k.p) {
        return Err(Error::ExponentMismatch {
            p: h.p.as_f64(),
            q: k.p.as_f64(),
        });
    }
    let p = h.p;
    let (a, b) = (h.data(), k.data());
    let lhs = norm_p(&(a + b), p).powf(p) + norm_p(&(a - b), p).powf(p);
    let rhs = T::of(2.0) * (norm_p(a, p).powf(p) + norm_p(b, p).powf(p));
    let witness = (a * &b.adjoint())
        .frobenius()
        .max((&a.adjoint() * b).frobenius());
    Ok(ClarksonReport {
        defect: (lhs - rhs).abs().as_f64(),
        orthogonal: witness < atol::<T>(a.algebra().total_dim()),
        witness: witness.as_f64(),
    })
}

/// `h ↦ h^{p/q}` on positive vectors; `‖h^{p/q}‖_q = ‖h‖_p^{p/q}`.
pub fn mazur_map<T: Real>(h: &LpVector<T>, q: T) -> Result<LpVector<T>> {
    check_exponent(q)?;
    let tol = atol::<T>(h.algebra().total_dim()) * h.data().max_abs().max(T::one());
    if !h.data().is_hermitian(tol) || h.data().min_eigenvalue() < -tol {
        return Err(Error::NotPositive);
    }
    let e = h.p / q;
    let cutoff = h.data().operator_norm() * T::of(T::RANK_RTOL);
    Ok(LpVector {
        p: q,
        data: h.data().herm_apply(|l| linalg::support_power(l, e, cutoff)),
    })
}

/// A linear map `L_p(source) → L_p(target)` acting on vectorized coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LpMap<T: Real> {
    p: T,
    map: AlgebraMap<T>,
}

impl<T: Real> LpMap<T> {
    pub fn new(source: &Algebra, target: &Algebra, p: T, matrix: CMat<T>) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self {
            p,
            map: AlgebraMap::new(source, target, matrix)?,
        })
    }

    pub fn from_map(map: AlgebraMap<T>, p: T) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self { p, map })
    }

    pub fn from_fn(
        source: &Algebra,
        target: &Algebra,
        p: T,
        f: impl Fn(&BlockMatrix<T>) -> BlockMatrix<T>,
    ) -> Result<Self> {
        Self::from_map(AlgebraMap::from_fn(source, target, f), p)
    }

    pub fn identity(algebra: &Algebra, p: T) -> Result<Self> {
        Self::from_map(AlgebraMap::identity(algebra), p)
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn source(&self) -> &Algebra {
        self.map.source()
    }

    pub fn target(&self) -> &Algebra {
        self.map.target()
    }

    pub fn matrix(&self) -> &CMat<T> {
        self.map.matrix()
    }

    pub fn as_algebra_map(&self) -> &AlgebraMap<T> {
        &self.map
    }

    pub fn apply(&self, h: &LpVector<T>) -> Result<LpVector<T>> {
        if !same_exponent(h.p, self.p) {
            return Err(Error::ExponentMismatch {
                p: h.p.as_f64(),
                q: self.p.as_f64(),
            });
        }
        Ok(LpVector {
            p: self.p,
            data: self.map.apply(h.data())?,
        })
    }

    /// Apply to raw coordinates; panics on shape mismatch.
    pub fn apply_element(&self, x: &BlockMatrix<T>) -> BlockMatrix<T> {
        assert!(self.source().same_shape(x.algebra()), "input shape");
        apply_matrix(self.matrix(), self.target(), x)
    }

    /// `self ∘ inner`, keeping `self`'s exponent.
    pub fn after(&self, inner: &LpMap<T>) -> Result<Self> {
        Ok(Self {
            p: self.p,
            map: self.map.after(&inner.map)?,
        })
    }

    pub fn with_p(&self, p: T) -> Result<Self> {
        Self::from_map(self.map.clone(), p)
    }
}

/// `a ⊗ h` in `M_n ⊗ A`, realized blockwise as `kron(a, h_b)`.
pub fn tensor_element<T: Real>(a: &CMat<T>, h: &BlockMatrix<T>) -> BlockMatrix<T> {
    let n = a.nrows();
    let alg = h.algebra().amplify(n);
    let blocks = h.blocks().iter().map(|hb| linalg::kron(a, hb)).collect();
    BlockMatrix::from_blocks(&alg, blocks).expect("kron shapes")
}

/// Matrix of `id_{M_n} ⊗ T` under the fixed vectorization.
pub fn amplify_map<T: Real>(t: &LpMap<T>, n: usize) -> LpMap<T> {
    assert!(n >= 1, "amplification order must be positive");
    let src = t.source();
    let tgt = t.target();
    let asrc = src.amplify(n);
    let atgt = tgt.amplify(n);
    let mut m = CMat::zeros(atgt.total_dim(), asrc.total_dim());
    for (col, us) in src.matrix_units().enumerate() {
        let ns = src.blocks()[us.block];
        for (row, ut) in tgt.matrix_units().enumerate() {
            let z = t.matrix()[(row, col)];
            if z == cr(T::zero()) {
                continue;
            }
            let nt = tgt.blocks()[ut.block];
            for i in 0..n {
                for j in 0..n {
                    let c = asrc.index(us.block, i * ns + us.row, j * ns + us.col);
                    let r = atgt.index(ut.block, i * nt + ut.row, j * nt + ut.col);
                    m[(r, c)] = z;
                }
            }
        }
    }
    LpMap {
        p: t.p,
        map: AlgebraMap::new(&asrc, &atgt, m).expect("amplified shapes"),
    }
}

/// Largest relative norm change `|‖T x‖_p − ‖x‖_p| / ‖x‖_p` over the samples.
pub fn sampled_isometry_defect<T: Real>(t: &LpMap<T>, samples: &[BlockMatrix<T>]) -> T {
    let p = t.p;
    samples
        .iter()
        .filter_map(|x| {
            let nx = norm_p(x, p);
            (nx > T::zero()).then(|| {
                let ny = norm_p(&t.apply_element(x), p);
                (ny - nx).abs() / nx
            })
        })
        .fold(T::zero(), |a, d| a.max(d))
}
