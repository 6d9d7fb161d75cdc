//! Isometries out of a tracial source: `T(x) = w B J(x)` with a Jordan
//! monomorphism `J`, a partial isometry `w` and a positive `B` commuting with `J(M)`.

use serde::{Deserialize, Serialize};

use crate::algebra::{homomorphism_kind, AlgebraMap, BlockMatrix, HomomorphismKind};
use crate::error::{Error, Result};
use crate::isometry::{
    amplified_isometry_defect, isometry_defect, module_tol, structured_witnesses, support_map,
    two_isometry_defect, METRIC_TOL,
};
use crate::lp::{
    amplify_map, check_exponent, norm_p, polar, same_exponent, weighted_trace, LpMap, LpVector,
};
use crate::scalar::{cabs, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct YeadonTriple<T: Real> {
    j: AlgebraMap<T>,
    w: BlockMatrix<T>,
    b: LpVector<T>,
}

/// Defects of the defining conditions of a triple, measured against a map.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct YeadonDefects {
    /// `w*w = J(1) = s(B)`.
    pub supports: f64,
    /// `τ(x) = Tr(B^p J(x))`.
    pub trace: f64,
    /// `T(x) = w B J(x)`.
    pub reconstruction: f64,
    /// `[B, J(x)] = 0`.
    pub commutation: f64,
    /// Jordan and *-preservation defects of `J`.
    pub jordan: f64,
}

impl YeadonDefects {
    pub fn max(&self) -> f64 {
        [
            self.supports,
            self.trace,
            self.reconstruction,
            self.commutation,
            self.jordan,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl<T: Real> YeadonTriple<T> {
    /// Checks the structural conditions (supports, commutation, Jordan property).
    pub fn new(j: AlgebraMap<T>, w: BlockMatrix<T>, b: LpVector<T>) -> Result<Self> {
        j.target().check_same(w.algebra(), "partial isometry")?;
        j.target().check_same(b.algebra(), "density B")?;
        let triple = Self { j, w, b };
        let tol = atol_for(&triple);
        let (supports, commutation, jordan) = triple.structural_defects();
        let worst = supports.max(commutation).max(jordan);
        if worst > tol {
            return Err(Error::DataInvalid(format!(
                "triple conditions fail (supports {:e}, commutation {:e}, jordan {:e})",
                supports.as_f64(),
                commutation.as_f64(),
                jordan.as_f64()
            )));
        }
        if !homomorphism_kind(&triple.j).injective {
            return Err(Error::DataInvalid("J is not injective".into()));
        }
        Ok(triple)
    }

    pub fn j(&self) -> &AlgebraMap<T> {
        &self.j
    }

    pub fn w(&self) -> &BlockMatrix<T> {
        &self.w
    }

    pub fn b(&self) -> &LpVector<T> {
        &self.b
    }

    pub fn kind(&self) -> HomomorphismKind {
        homomorphism_kind(&self.j).kind
    }

    /// Largest Frobenius distance between corresponding components.
    pub fn distance(&self, other: &Self) -> T {
        if !self.j.source().same_shape(other.j.source())
            || !self.j.target().same_shape(other.j.target())
        {
            return T::max_value().unwrap_or_else(T::one);
        }
        let dj = crate::linalg::frobenius(&(self.j.matrix() - other.j.matrix()));
        dj.max(self.w.distance(&other.w))
            .max(self.b.data().distance(other.b.data()))
    }

    fn support_of_b(&self) -> BlockMatrix<T> {
        let b = self.b.data();
        let cutoff = b.operator_norm() * T::of(T::RANK_RTOL);
        b.herm_apply(|l| if l > cutoff { T::one() } else { T::zero() })
    }

    fn structural_defects(&self) -> (T, T, T) {
        let src = self.j.source();
        let j1 = self
            .j
            .apply(&BlockMatrix::identity(src))
            .expect("source shape");
        let ww = &self.w.adjoint() * &self.w;
        let supports = ww.distance(&j1).max(j1.distance(&self.support_of_b()));
        let commutation = src
            .matrix_units()
            .map(|u| {
                let jx = self
                    .j
                    .apply(&BlockMatrix::matrix_unit(src, u))
                    .expect("source shape");
                self.b.data().commutator(&jx).frobenius()
            })
            .fold(T::zero(), |a, d| a.max(d));
        let rep = homomorphism_kind(&self.j);
        let jordan = T::of(rep.jordan_defect.max(rep.star_defect));
        (supports, commutation, jordan)
    }

    /// Largest violation of `τ(x) = Tr(B^p J(x))` over matrix units, with its witness.
    fn trace_defect(&self, p: T) -> (T, String) {
        let src = self.j.source();
        let bp = self
            .b
            .data()
            .herm_apply(|l| if l > T::zero() { l.powf(p) } else { T::zero() });
        let mut worst = (T::zero(), String::new());
        for u in src.matrix_units() {
            let x = BlockMatrix::matrix_unit(src, u);
            let lhs = weighted_trace(&x);
            let rhs = weighted_trace(&(&bp * &self.j.apply(&x).expect("source shape")));
            let d = cabs(lhs - rhs);
            if d > worst.0 || worst.1.is_empty() {
                worst = (d, format!("e[{}]({},{})", u.block, u.row, u.col));
            }
        }
        worst
    }

    /// All defects of the triple against a given map `T` at exponent `p`.
    pub fn defects(&self, t: &LpMap<T>, p: T) -> YeadonDefects {
        let (supports, commutation, jordan) = self.structural_defects();
        let src = self.j.source();
        let wb = &self.w * self.b.data();
        let reconstruction = src
            .matrix_units()
            .map(|u| {
                let x = BlockMatrix::matrix_unit(src, u);
                let lhs = t.apply_element(&x);
                lhs.distance(&(&wb * &self.j.apply(&x).expect("source shape")))
            })
            .fold(T::zero(), |a, d| a.max(d));
        YeadonDefects {
            supports: supports.as_f64(),
            trace: self.trace_defect(p).0.as_f64(),
            reconstruction: reconstruction.as_f64(),
            commutation: commutation.as_f64(),
            jordan: jordan.as_f64(),
        }
    }
}

fn atol_for<T: Real>(triple: &YeadonTriple<T>) -> T {
    let scale = T::one().max(triple.b.data().operator_norm());
    crate::scalar::atol::<T>(triple.j.target().total_dim()) * T::of(10.0) * scale
}

/// `T(e) = w_e B_e`: polar parts of the image of a source element.
pub fn yeadon_parts<T: Real>(t: &LpMap<T>, e: &BlockMatrix<T>) -> (BlockMatrix<T>, BlockMatrix<T>) {
    polar(&t.apply_element(e))
}

/// Recover `(J, w, B)`: `w B` is the polar decomposition of `T(1)` and
/// `J(e) = s_r(T(e))` on spectral projections of the Hermitian basis.
pub fn yeadon_decompose<T: Real>(t: &LpMap<T>, p: T) -> Result<YeadonTriple<T>> {
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
    let src = t.source();
    let one = BlockMatrix::identity(src);
    let (w, b) = yeadon_parts(t, &one);
    if b.max_abs() <= T::of(T::RANK_RTOL) {
        return Err(Error::NotAnIsometry {
            defect: T::one().as_f64(),
        });
    }
    let j = support_map(t, &one)?;
    let triple = YeadonTriple {
        j,
        w,
        b: LpVector::new(b, p)?,
    };
    let defects = triple.defects(t, p);
    let tol = module_tol(t).max(atol_for(&triple)).as_f64();
    if defects.max() > tol {
        return Err(Error::NotAnIsometry {
            defect: defects.max(),
        });
    }
    Ok(triple)
}

/// `x ↦ w B J(x)` after checking `τ(x) = Tr(B^p J(x))` on matrix units.
pub fn build_yeadon_map<T: Real>(triple: &YeadonTriple<T>, p: T) -> Result<LpMap<T>> {
    check_exponent(p)?;
    let (defect, witness) = triple.trace_defect(p);
    if defect > atol_for(triple) {
        return Err(Error::TraceConditionViolated {
            witness,
            defect: defect.as_f64(),
        });
    }
    let wb = &triple.w * triple.b.data();
    let j = &triple.j;
    LpMap::from_fn(j.source(), j.target(), p, |x| {
        &wb * &j.apply(x).expect("source shape")
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub kind: HomomorphismKind,
    pub isometry_defect: f64,
    /// Largest defect on the structured witnesses of `id_{M_2} ⊗ T`.
    pub witness_defect: f64,
    pub two_isometry_defect: f64,
    pub three_isometry_defect: f64,
    /// `J` multiplicative exactly when the 2-isometry defect is below tolerance.
    pub consistent: bool,
}

/// Multiplicativity of `J` against the 2-isometry defect of the built map.
pub fn jordan_dichotomy_report<T: Real>(
    triple: &YeadonTriple<T>,
    p: T,
    samples: usize,
    seed: u64,
) -> Result<DichotomyReport> {
    let t = build_yeadon_map(triple, p)?;
    let kind = triple.kind();
    let amp = amplify_map(&t, 2);
    let witness = structured_witnesses::<T>(t.source(), 2)
        .iter()
        .map(|x| (norm_p(&amp.apply_element(x), p) - norm_p(x, p)).abs())
        .fold(T::zero(), |a, d| a.max(d));
    let two = two_isometry_defect(&t, samples, seed);
    let three = amplified_isometry_defect(&t, 3, samples / 2, seed ^ 0x3);
    let multiplicative = kind == HomomorphismKind::StarHomomorphism;
    Ok(DichotomyReport {
        kind,
        isometry_defect: isometry_defect(&t, samples, seed).as_f64(),
        witness_defect: witness.as_f64(),
        two_isometry_defect: two.as_f64(),
        three_isometry_defect: three.as_f64(),
        consistent: multiplicative == (two.as_f64() < METRIC_TOL),
    })
}
