//! Canonical 2-isometries `φ^{1/p} x ↦ w φ̄^{1/p} π(x)`, their classification,
//! exponent transfer and duals.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    columns_to_matrix, homomorphism_kind, Algebra, AlgebraMap, BlockMatrix, HomomorphismKind, State,
};
use crate::error::{Error, Result};
use crate::expectation::{
    construct_expectation, lp_expectation, lp_inclusion, takesaki_invariant,
    ConditionalExpectation, Subalgebra,
};
use crate::linalg::{self, CMat};
use crate::lp::{
    amplify_map, check_exponent, conjugate_exponent, norm_p, polar, right_support, same_exponent,
    sampled_isometry_defect, LpMap,
};
use crate::scalar::{atol, cabs, cf, cr, Real, C};

/// Metric defects below this accept.
pub const METRIC_TOL: f64 = 1e-7;
/// Metric defects below this but above [`METRIC_TOL`] are reported as warnings.
pub const WARN_TOL: f64 = 1e-4;

/// The data `(π, w, E)` together with the reference state `φ` on the source.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryData<T: Real> {
    source: Algebra,
    target: Algebra,
    pi: AlgebraMap<T>,
    w: BlockMatrix<T>,
    expectation: ConditionalExpectation<T>,
    reference_state: State<T>,
}

impl<T: Real> IsometryData<T> {
    /// Validates the normalization `w*w = π(1)` and that `E` projects onto `π(M)`;
    /// the stored expectation is rebound to `φ̄ = φ ∘ π⁻¹ ∘ E`.
    pub fn new(
        pi: AlgebraMap<T>,
        w: BlockMatrix<T>,
        reference_state: State<T>,
        expectation: ConditionalExpectation<T>,
    ) -> Result<Self> {
        let source = pi.source().clone();
        let target = pi.target().clone();
        source.check_same(reference_state.algebra(), "reference state")?;
        target.check_same(w.algebra(), "partial isometry")?;
        target.check_same(expectation.subalgebra().parent(), "expectation")?;
        reference_state.require_faithful()?;
        let report = homomorphism_kind(&pi);
        if report.kind != HomomorphismKind::StarHomomorphism || !report.injective {
            return Err(Error::DataInvalid(format!(
                "π is not an injective *-homomorphism ({:?})",
                report.kind
            )));
        }
        let tol = atol::<T>(target.total_dim());
        let emb = expectation.subalgebra().embedding();
        if linalg::frobenius(&(emb.matrix() - pi.matrix())) > tol {
            return Err(Error::DataInvalid("expectation is not onto π(M)".into()));
        }
        let unit = pi.apply(&BlockMatrix::identity(&source))?;
        let ww = &w.adjoint() * &w;
        if ww.distance(&unit) > tol {
            return Err(Error::DataInvalid(format!(
                "w*w differs from π(1) by {}",
                ww.distance(&unit).as_f64()
            )));
        }
        let phi_bar = pulled_back_state(&pi, &reference_state, &expectation)?;
        Ok(Self {
            source,
            target,
            pi,
            w,
            expectation: expectation.with_state(phi_bar),
            reference_state,
        })
    }

    /// Builds `E` from a `π(M)`-invariant state `ψ̄` on the target.
    pub fn with_invariant_state(
        pi: AlgebraMap<T>,
        w: BlockMatrix<T>,
        reference_state: State<T>,
        invariant_state: &State<T>,
    ) -> Result<Self> {
        let a = Subalgebra::from_embedding(&pi).map_err(|e| Error::DataInvalid(e.to_string()))?;
        let e = construct_expectation(&a, invariant_state)?;
        Self::new(pi, w, reference_state, e)
    }

    pub fn source(&self) -> &Algebra {
        &self.source
    }

    pub fn target(&self) -> &Algebra {
        &self.target
    }

    pub fn pi(&self) -> &AlgebraMap<T> {
        &self.pi
    }

    pub fn w(&self) -> &BlockMatrix<T> {
        &self.w
    }

    pub fn expectation(&self) -> &ConditionalExpectation<T> {
        &self.expectation
    }

    pub fn reference_state(&self) -> &State<T> {
        &self.reference_state
    }

    /// `φ̄ = φ ∘ π⁻¹ ∘ E`.
    pub fn phi_bar(&self) -> &State<T> {
        self.expectation.state()
    }

    /// Largest Frobenius distance between corresponding components.
    pub fn distance(&self, other: &Self) -> T {
        if !self.source.same_shape(&other.source) || !self.target.same_shape(&other.target) {
            return T::max_value().unwrap_or_else(T::one);
        }
        [
            linalg::frobenius(&(self.pi.matrix() - other.pi.matrix())),
            self.w.distance(&other.w),
            linalg::frobenius(
                &(self.expectation.map().matrix() - other.expectation.map().matrix()),
            ),
            self.phi_bar().density().distance(other.phi_bar().density()),
            self.reference_state
                .density()
                .distance(other.reference_state.density()),
        ]
        .into_iter()
        .fold(T::zero(), |a, d| a.max(d))
    }
}

/// Density of `x ↦ φ(π⁻¹(E(x)))`.
fn pulled_back_state<T: Real>(
    pi: &AlgebraMap<T>,
    phi: &State<T>,
    e: &ConditionalExpectation<T>,
) -> Result<State<T>> {
    let inv = pi.pseudo_inverse()?;
    let target = pi.target();
    let mut rho = BlockMatrix::zeros(target);
    for u in target.matrix_units() {
        let x = BlockMatrix::matrix_unit(target, u);
        let y = inv.apply(&e.apply(&x)?)?;
        rho.block_mut(u.block)[(u.col, u.row)] = phi.eval(&y);
    }
    State::positive_functional(rho)
}

/// `T_q(φ^{1/q} x) = w φ̄^{1/q} π(x)`, assembled on matrix units.
pub fn transfer_exponent<T: Real>(
    pi: &AlgebraMap<T>,
    phi: &State<T>,
    phi_bar: &State<T>,
    w: &BlockMatrix<T>,
    q: T,
) -> Result<LpMap<T>> {
    check_exponent(q)?;
    phi.require_faithful()?;
    pi.source().check_same(phi.algebra(), "reference state")?;
    pi.target().check_same(phi_bar.algebra(), "target state")?;
    pi.target().check_same(w.algebra(), "partial isometry")?;
    let alpha = T::one() / q;
    let left = &w.clone() * &phi_bar.power(alpha);
    let inv = phi.power(-alpha);
    LpMap::from_fn(pi.source(), pi.target(), q, |h| {
        &left * &pi.apply(&(&inv * h)).expect("source shape")
    })
}

pub fn build_isometry<T: Real>(data: &IsometryData<T>, p: T) -> Result<LpMap<T>> {
    transfer_exponent(&data.pi, &data.reference_state, data.phi_bar(), &data.w, p)
}

/// `h ↦ w E_p(w* h)` realized as `L_w ∘ ι_p ∘ E_p ∘ L_{w*}`.
pub fn complement_projection<T: Real>(data: &IsometryData<T>, p: T) -> Result<LpMap<T>> {
    let e = &data.expectation;
    let structure = e.subalgebra().structure();
    let phi_a = State::positive_functional(BlockMatrix::from_blocks(
        structure,
        data.reference_state.density().blocks().to_vec(),
    )?)?;
    let iota = lp_inclusion(e, &phi_a, p)?;
    let ep = lp_expectation(e, data.phi_bar(), p)?;
    let w = &data.w;
    let wd = w.adjoint();
    let inner = LpMap::from_fn(&data.target, &data.target, p, |h| &wd * h)?;
    let outer = LpMap::from_fn(&data.target, &data.target, p, |h| w * h)?;
    outer.after(&iota.after(&ep.after(&inner)?)?)
}

/// Matrix units, Hermitian basis elements and `random` Gaussian elements of the
/// algebra, the latter in three flavours (full, rank one, positive).
pub fn probe_elements<T: Real>(alg: &Algebra, random: usize, seed: u64) -> Vec<BlockMatrix<T>> {
    let mut out: Vec<BlockMatrix<T>> = alg
        .matrix_units()
        .map(|u| BlockMatrix::matrix_unit(alg, u))
        .collect();
    out.extend(hermitian_basis(alg).into_iter().map(|(_, h)| h));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..random {
        let g = BlockMatrix::<T>::gaussian(alg, &mut rng);
        let x = match k % 3 {
            0 => g,
            1 => {
                let v = linalg::gaussian::<T, _>(alg.rep_dim(), 1, &mut rng);
                let mut row = 0;
                let blocks = alg
                    .blocks()
                    .iter()
                    .map(|&n| {
                        let col = v.rows(row, n).into_owned();
                        row += n;
                        &col * col.adjoint()
                    })
                    .collect();
                BlockMatrix::from_blocks(alg, blocks).expect("block shapes")
            }
            _ => &g * &g.adjoint(),
        };
        out.push(x);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum HermKind {
    Diagonal(usize, usize),
    Symmetric(usize, usize, usize),
    Antisymmetric(usize, usize, usize),
}

/// `e_kk`, `e_kl + e_lk` and `i(e_kl − e_lk)` for `k < l` in every block.
fn hermitian_basis<T: Real>(alg: &Algebra) -> Vec<(HermKind, BlockMatrix<T>)> {
    let mut out = Vec::new();
    for (b, &n) in alg.blocks().iter().enumerate() {
        for k in 0..n {
            let mut d = BlockMatrix::zeros(alg);
            d.block_mut(b)[(k, k)] = cr(T::one());
            out.push((HermKind::Diagonal(b, k), d));
            for l in k + 1..n {
                let mut s = BlockMatrix::zeros(alg);
                s.block_mut(b)[(k, l)] = cr(T::one());
                s.block_mut(b)[(l, k)] = cr(T::one());
                out.push((HermKind::Symmetric(b, k, l), s));
                let mut a = BlockMatrix::zeros(alg);
                a.block_mut(b)[(k, l)] = cf(0.0, 1.0);
                a.block_mut(b)[(l, k)] = cf(0.0, -1.0);
                out.push((HermKind::Antisymmetric(b, k, l), a));
            }
        }
    }
    out
}

/// `π(h) = Σ λ s_r(T(φ^{1/p} e_λ))` over the spectral decomposition of `h`.
fn pi_of_hermitian<T: Real>(
    t: &LpMap<T>,
    rho_p: &BlockMatrix<T>,
    h: &BlockMatrix<T>,
) -> BlockMatrix<T> {
    let tol = T::of(T::CLUSTER_TOL) * T::one().max(h.operator_norm());
    h.spectral_projections(tol)
        .into_iter()
        .filter(|(l, _)| l.abs() > tol)
        .fold(BlockMatrix::zeros(t.target()), |acc, (l, e)| {
            &acc + &right_support(&t.apply_element(&(rho_p * &e))).scale_re(l)
        })
}

/// The real-linear, then complex-linear, extension of `e ↦ s_r(T(left·e))`
/// from spectral projections of the Hermitian basis.
pub(crate) fn support_map<T: Real>(t: &LpMap<T>, left: &BlockMatrix<T>) -> Result<AlgebraMap<T>> {
    let src = t.source();
    let images: Vec<(HermKind, BlockMatrix<T>)> = hermitian_basis::<T>(src)
        .iter()
        .map(|(k, h)| (*k, pi_of_hermitian(t, left, h)))
        .collect();
    let find = |kind: HermKind| {
        &images
            .iter()
            .find(|(k, _)| *k == kind)
            .expect("basis element present")
            .1
    };
    let half = T::of(0.5);
    let cols: Vec<BlockMatrix<T>> = src
        .matrix_units()
        .map(|u| {
            let (b, k, l) = (u.block, u.row, u.col);
            if k == l {
                find(HermKind::Diagonal(b, k)).clone()
            } else {
                let (lo, hi) = (k.min(l), k.max(l));
                let s = find(HermKind::Symmetric(b, lo, hi));
                let a = find(HermKind::Antisymmetric(b, lo, hi));
                let sign = if k < l { -T::one() } else { T::one() };
                (s + &a.scale(C::new(T::zero(), sign))).scale_re(half)
            }
        })
        .collect();
    AlgebraMap::new(
        src,
        t.target(),
        columns_to_matrix(&cols, t.target().total_dim()),
    )
}

/// `π` from right supports, together with the largest violation of
/// `T(φ^{1/p} x) = T(φ^{1/p}) π(x)` over matrix units.
fn extract_pi_with_defect<T: Real>(
    t: &LpMap<T>,
    phi: &State<T>,
    p: T,
) -> Result<(AlgebraMap<T>, T)> {
    check_exponent(p)?;
    if same_exponent(p, T::of(2.0)) {
        return Err(Error::ExponentUnsupported(2.0));
    }
    if !same_exponent(p, t.p()) {
        return Err(Error::ExponentMismatch {
            p: p.as_f64(),
            q: t.p().as_f64(),
        });
    }
    t.source().check_same(phi.algebra(), "reference state")?;
    phi.require_faithful()?;
    let src = t.source();
    let rho_p = phi.power(T::one() / p);
    let pi = support_map(t, &rho_p)?;

    let t_top = t.apply_element(&rho_p);
    let defect = src
        .matrix_units()
        .map(|u| {
            let x = BlockMatrix::matrix_unit(src, u);
            let lhs = t.apply_element(&(&rho_p * &x));
            let rhs = &t_top * &pi.apply(&x).expect("source shape");
            lhs.distance(&rhs)
        })
        .fold(T::zero(), |a, d| a.max(d));
    Ok((pi, defect))
}

/// Recover `π` from a candidate isometry.
pub fn extract_pi<T: Real>(t: &LpMap<T>, phi: &State<T>, p: T) -> Result<AlgebraMap<T>> {
    let (pi, defect) = extract_pi_with_defect(t, phi, p)?;
    if defect > module_tol(t) {
        return Err(Error::NotAnIsometry {
            defect: defect.as_f64(),
        });
    }
    Ok(pi)
}

pub(crate) fn module_tol<T: Real>(t: &LpMap<T>) -> T {
    atol::<T>(t.target().total_dim()) * T::of(10.0)
}

/// `T(φ^{1/p}) = w φ̄^{1/p}`: the partial isometry and `φ̄ = |T(φ^{1/p})|^p`.
pub fn extract_polar_data<T: Real>(
    t: &LpMap<T>,
    phi: &State<T>,
    p: T,
) -> Result<(BlockMatrix<T>, State<T>)> {
    check_exponent(p)?;
    t.source().check_same(phi.algebra(), "reference state")?;
    phi.require_faithful()?;
    let image = t.apply_element(&phi.power(T::one() / p));
    if image.max_abs() <= T::of(T::RANK_RTOL) {
        return Err(Error::ZeroImage);
    }
    let (w, modulus) = polar(&image);
    let rho_bar = modulus.herm_apply(|l| if l > T::zero() { l.powf(p) } else { T::zero() });
    Ok((w, State::positive_functional(rho_bar)?))
}

/// `max_x |φ̄(π(x)) − φ(x)|` over matrix units.
pub fn verify_state_restriction<T: Real>(
    phi_bar: &State<T>,
    pi: &AlgebraMap<T>,
    phi: &State<T>,
) -> T {
    pi.source()
        .matrix_units()
        .map(|u| {
            let x = BlockMatrix::matrix_unit(pi.source(), u);
            cabs(phi_bar.eval(&pi.apply(&x).expect("source shape")) - phi.eval(&x))
        })
        .fold(T::zero(), |a, d| a.max(d))
}

/// Elements `Σ_{i,j<m} e_ij ⊗ f_{k_i k_j}` of `M_n ⊗ A` for every choice of
/// `m = min(n, n_b)` increasing indices `k` inside a block.
pub fn structured_witnesses<T: Real>(alg: &Algebra, n: usize) -> Vec<BlockMatrix<T>> {
    let amp = alg.amplify(n);
    let mut out = Vec::new();
    for (b, &nb) in alg.blocks().iter().enumerate() {
        let m = n.min(nb);
        if m < 2 {
            continue;
        }
        for ks in combinations(nb, m) {
            let mut x = BlockMatrix::zeros(&amp);
            for (i, &ki) in ks.iter().enumerate() {
                for (j, &kj) in ks.iter().enumerate() {
                    x.block_mut(b)[(i * nb + ki, j * nb + kj)] = cr(T::one());
                }
            }
            out.push(x);
        }
    }
    out
}

fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for k in start..n {
            cur.push(k);
            rec(k + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// Largest norm change of `id_{M_n} ⊗ T`: absolute on the structured witnesses,
/// and on `random` Gaussian samples normalized to unit norm.
pub fn amplified_isometry_defect<T: Real>(t: &LpMap<T>, n: usize, random: usize, seed: u64) -> T {
    let amp = amplify_map(t, n);
    let p = t.p();
    let mut defect = structured_witnesses::<T>(t.source(), n)
        .iter()
        .map(|x| (norm_p(&amp.apply_element(x), p) - norm_p(x, p)).abs())
        .fold(T::zero(), |a, d| a.max(d));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let g = BlockMatrix::<T>::gaussian(amp.source(), &mut rng);
        let ng = norm_p(&g, p);
        if ng > T::zero() {
            let x = g.scale_re(T::one() / ng);
            defect = defect.max((norm_p(&amp.apply_element(&x), p) - T::one()).abs());
        }
    }
    defect
}

/// [`amplified_isometry_defect`] at `n = 2`.
pub fn two_isometry_defect<T: Real>(t: &LpMap<T>, random: usize, seed: u64) -> T {
    amplified_isometry_defect(t, 2, random, seed)
}

/// Relative isometry defect on [`probe_elements`].
pub fn isometry_defect<T: Real>(t: &LpMap<T>, random: usize, seed: u64) -> T {
    sampled_isometry_defect(t, &probe_elements(t.source(), random, seed))
}

/// `k ↦ T'(k*)*` where `T'` is the trace-duality adjoint of `T`; acts at `p'`.
pub fn star_adjoint_dual<T: Real>(t: &LpMap<T>) -> Result<LpMap<T>> {
    let q = conjugate_exponent(t.p()).ok_or(Error::ExponentUnsupported(t.p().as_f64()))?;
    let weights = |alg: &Algebra| -> Vec<T> {
        alg.matrix_units()
            .map(|u| T::of(alg.trace_weight(u.block)))
            .collect()
    };
    let (ws, wt) = (weights(t.source()), weights(t.target()));
    let m = t.matrix();
    let dual = CMat::from_fn(m.ncols(), m.nrows(), |r, c| {
        m[(c, r)].conj() * cr(wt[c] / ws[r])
    });
    LpMap::new(t.target(), t.source(), q, dual)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Isometry,
    ModuleProperty,
    Multiplicativity,
    StateRestriction,
    Support,
    Invariance,
    Reconstruction,
    TwoIsometry,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Isometry => "isometry",
            Stage::ModuleProperty => "module_property",
            Stage::Multiplicativity => "multiplicativity",
            Stage::StateRestriction => "state_restriction",
            Stage::Support => "support",
            Stage::Invariance => "invariance",
            Stage::Reconstruction => "reconstruction",
            Stage::TwoIsometry => "two_isometry",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Named defects; `None` marks a stage that could not be reached.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Defects {
    pub isometry: Option<f64>,
    pub two_isometry: Option<f64>,
    pub module_property: Option<f64>,
    pub multiplicativity: Option<f64>,
    pub state_restriction: Option<f64>,
    pub support: Option<f64>,
    pub invariance: Option<f64>,
    pub reconstruction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub metric_tol: f64,
    pub warn_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            samples: 48,
            seed: 0,
            metric_tol: METRIC_TOL,
            warn_tol: WARN_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport<T: Real> {
    pub data: Option<IsometryData<T>>,
    pub defects: Defects,
    pub verdict: Verdict,
    pub failed_stages: Vec<Stage>,
    pub warnings: Vec<String>,
}

impl<T: Real> ClassificationReport<T> {
    /// The first failing stage in pipeline order.
    pub fn failed_stage(&self) -> Option<Stage> {
        self.failed_stages.first().copied()
    }
}

pub fn classify<T: Real>(t: &LpMap<T>, phi: &State<T>, p: T) -> Result<ClassificationReport<T>> {
    classify_with(t, phi, p, &ClassifyOptions::default())
}

/// Full pipeline: metric defects, `π`, polar data, state restriction,
/// invariance and expectation, reconstruction.
pub fn classify_with<T: Real>(
    t: &LpMap<T>,
    phi: &State<T>,
    p: T,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport<T>> {
    let (pi, module) = extract_pi_with_defect(t, phi, p)?;
    let mut defects = Defects::default();
    let mut failed = Vec::new();
    let mut warnings = Vec::new();
    let alg_tol = module_tol(t);
    let mut metric = |stage: Stage, d: T, failed: &mut Vec<Stage>| {
        let d = d.as_f64();
        if d.partial_cmp(&opts.metric_tol) != Some(std::cmp::Ordering::Less) {
            if d < opts.warn_tol {
                warnings.push(format!("{} defect {d:e} in warn band", stage.name()));
            }
            failed.push(stage);
        }
        Some(d)
    };

    defects.isometry = metric(
        Stage::Isometry,
        isometry_defect(t, opts.samples, opts.seed),
        &mut failed,
    );
    let two = two_isometry_defect(t, opts.samples.div_ceil(4), opts.seed ^ 0x2);
    defects.module_property = Some(module.as_f64());
    if module > alg_tol {
        failed.push(Stage::ModuleProperty);
    }

    let hom = homomorphism_kind(&pi);
    defects.multiplicativity = Some(hom.multiplicative_defect.max(hom.star_defect));
    let multiplicative = hom.kind == HomomorphismKind::StarHomomorphism && hom.injective;
    if !multiplicative {
        failed.push(Stage::Multiplicativity);
    }

    let mut data = None;
    match extract_polar_data(t, phi, p) {
        Err(Error::ZeroImage) => {
            if !failed.contains(&Stage::Isometry) {
                failed.push(Stage::Isometry);
            }
        }
        Err(e) => return Err(e),
        Ok((w, phi_bar)) => {
            let restriction = verify_state_restriction(&phi_bar, &pi, phi);
            defects.state_restriction = Some(restriction.as_f64());
            if restriction > alg_tol {
                failed.push(Stage::StateRestriction);
            }
            let unit = pi.apply(&BlockMatrix::identity(t.source()))?;
            let support = (&w.adjoint() * &w).distance(&unit);
            defects.support = Some(support.as_f64());
            if support > alg_tol {
                failed.push(Stage::Support);
            }
            if multiplicative {
                let a = Subalgebra::from_embedding(&pi)?;
                match takesaki_invariant(&a, &phi_bar) {
                    Ok((invariant, d)) => {
                        defects.invariance = Some(d.as_f64());
                        if !invariant {
                            failed.push(Stage::Invariance);
                        } else {
                            let e = construct_expectation(&a, &phi_bar);
                            let built =
                                e.and_then(|e| IsometryData::new(pi.clone(), w, phi.clone(), e));
                            match built {
                                Ok(d) => {
                                    let rebuilt = build_isometry(&d, p)?;
                                    let rec = column_distance(rebuilt.matrix(), t.matrix());
                                    defects.reconstruction =
                                        metric(Stage::Reconstruction, rec, &mut failed);
                                    data = Some(d);
                                }
                                Err(_) => failed.push(Stage::Reconstruction),
                            }
                        }
                    }
                    Err(Error::NonFaithful { .. }) => failed.push(Stage::Invariance),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    defects.two_isometry = metric(Stage::TwoIsometry, two, &mut failed);

    failed.sort();
    failed.dedup();
    let verdict = if failed.is_empty() {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Ok(ClassificationReport {
        data,
        defects,
        verdict,
        failed_stages: failed,
        warnings,
    })
}

/// Largest column-wise Euclidean distance, i.e. the worst matrix unit.
fn column_distance<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    (0..a.ncols())
        .map(|j| {
            (a.column(j) - b.column(j))
                .iter()
                .fold(T::zero(), |acc, z| acc + z.norm_sqr())
                .sqrt()
        })
        .fold(T::zero(), |m, d| m.max(d))
}
