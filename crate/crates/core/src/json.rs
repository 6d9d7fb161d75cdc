//! JSON wire formats. Every type has a plain `f64` representation (`Repr`)
//! that serde handles, plus a checked conversion into the generic type.
//!
//! Complex numbers are `[re, im]`; elements are `{"blocks": [...]}` with each
//! block a list of rows.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, AlgebraMap, BlockMatrix, State};
use crate::error::{Error, Result};
use crate::expectation::Subalgebra;
use crate::isometry::{ClassificationReport, Defects, IsometryData, Verdict};
use crate::linalg::CMat;
use crate::lp::{LpMap, LpVector};
use crate::scalar::{cf, Real, C};
use crate::yeadon::YeadonTriple;

pub type Complex = [f64; 2];

/// Types with a JSON representation.
pub trait Wire: Sized {
    type Repr: Serialize + DeserializeOwned;
    fn to_repr(&self) -> Self::Repr;
    fn from_repr(repr: Self::Repr) -> Result<Self>;
}

pub fn to_json<W: Wire>(w: &W) -> String {
    serde_json::to_string_pretty(&w.to_repr()).expect("wire types serialize")
}

pub fn from_json<W: Wire>(s: &str) -> Result<W> {
    let repr: W::Repr = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    W::from_repr(repr)
}

fn c_out<T: Real>(z: C<T>) -> Complex {
    [z.re.as_f64(), z.im.as_f64()]
}

fn c_in<T: Real>(z: Complex) -> Result<C<T>> {
    if !(z[0].is_finite() && z[1].is_finite()) {
        return Err(Error::Parse("non-finite entry".into()));
    }
    Ok(cf(z[0], z[1]))
}

fn matrix_out<T: Real>(m: &CMat<T>) -> Vec<Vec<Complex>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| c_out(m[(i, j)])).collect())
        .collect()
}

fn matrix_in<T: Real>(rows: &[Vec<Complex>], nrows: usize, ncols: usize) -> Result<CMat<T>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::ShapeMismatch(format!(
            "expected a {nrows}x{ncols} matrix"
        )));
    }
    let mut m = CMat::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        for (j, &z) in row.iter().enumerate() {
            m[(i, j)] = c_in(z)?;
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementRepr {
    pub blocks: Vec<Vec<Vec<Complex>>>,
}

impl ElementRepr {
    /// The algebra whose block sizes match this element.
    pub fn algebra(&self) -> Result<Algebra> {
        Algebra::new(self.blocks.iter().map(|b| b.len()).collect())
    }

    pub fn into_element<T: Real>(self, algebra: &Algebra) -> Result<BlockMatrix<T>> {
        if self.blocks.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "element has {} blocks, algebra has {}",
                self.blocks.len(),
                algebra.num_blocks()
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(algebra.blocks())
            .map(|(b, &n)| matrix_in(b, n, n))
            .collect::<Result<Vec<_>>>()?;
        BlockMatrix::from_blocks(algebra, blocks)
    }
}

impl<T: Real> Wire for BlockMatrix<T> {
    type Repr = ElementRepr;

    fn to_repr(&self) -> ElementRepr {
        ElementRepr {
            blocks: self.blocks().iter().map(matrix_out).collect(),
        }
    }

    fn from_repr(repr: ElementRepr) -> Result<Self> {
        let alg = repr.algebra()?;
        repr.into_element(&alg)
    }
}

impl Wire for Algebra {
    type Repr = Algebra;

    fn to_repr(&self) -> Algebra {
        self.clone()
    }

    fn from_repr(repr: Algebra) -> Result<Self> {
        Ok(repr)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpVectorRepr {
    pub p: f64,
    pub blocks: Vec<Vec<Vec<Complex>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_weights: Option<Vec<f64>>,
}

impl<T: Real> Wire for LpVector<T> {
    type Repr = LpVectorRepr;

    fn to_repr(&self) -> LpVectorRepr {
        LpVectorRepr {
            p: self.p().as_f64(),
            blocks: self.data().to_repr().blocks,
            trace_weights: self.algebra().trace_weights().map(<[f64]>::to_vec),
        }
    }

    fn from_repr(repr: LpVectorRepr) -> Result<Self> {
        let e = ElementRepr {
            blocks: repr.blocks,
        };
        let mut alg = e.algebra()?;
        if let Some(w) = repr.trace_weights {
            alg = alg.with_trace_weights(w)?;
        }
        LpVector::new(e.into_element(&alg)?, T::of(repr.p))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRepr {
    pub algebra: Algebra,
    pub density: ElementRepr,
}

impl<T: Real> Wire for State<T> {
    type Repr = StateRepr;

    fn to_repr(&self) -> StateRepr {
        StateRepr {
            algebra: self.algebra().clone(),
            density: self.density().to_repr(),
        }
    }

    fn from_repr(repr: StateRepr) -> Result<Self> {
        State::new(repr.density.into_element(&repr.algebra)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraMapRepr {
    pub source: Algebra,
    pub target: Algebra,
    pub matrix: Vec<Vec<Complex>>,
}

impl<T: Real> Wire for AlgebraMap<T> {
    type Repr = AlgebraMapRepr;

    fn to_repr(&self) -> AlgebraMapRepr {
        AlgebraMapRepr {
            source: self.source().clone(),
            target: self.target().clone(),
            matrix: matrix_out(self.matrix()),
        }
    }

    fn from_repr(r: AlgebraMapRepr) -> Result<Self> {
        let m = matrix_in(&r.matrix, r.target.total_dim(), r.source.total_dim())?;
        AlgebraMap::new(&r.source, &r.target, m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpMapRepr {
    pub p: f64,
    pub source: Algebra,
    pub target: Algebra,
    pub matrix: Vec<Vec<Complex>>,
}

impl<T: Real> Wire for LpMap<T> {
    type Repr = LpMapRepr;

    fn to_repr(&self) -> LpMapRepr {
        LpMapRepr {
            p: self.p().as_f64(),
            source: self.source().clone(),
            target: self.target().clone(),
            matrix: matrix_out(self.matrix()),
        }
    }

    fn from_repr(r: LpMapRepr) -> Result<Self> {
        let m = matrix_in(&r.matrix, r.target.total_dim(), r.source.total_dim())?;
        LpMap::new(&r.source, &r.target, T::of(r.p), m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubalgebraRepr {
    pub parent: Algebra,
    pub basis: Vec<ElementRepr>,
}

impl<T: Real> Wire for Subalgebra<T> {
    type Repr = SubalgebraRepr;

    fn to_repr(&self) -> SubalgebraRepr {
        SubalgebraRepr {
            parent: self.parent().clone(),
            basis: self.basis().iter().map(Wire::to_repr).collect(),
        }
    }

    fn from_repr(r: SubalgebraRepr) -> Result<Self> {
        let basis = r
            .basis
            .into_iter()
            .map(|e| e.into_element(&r.parent))
            .collect::<Result<Vec<_>>>()?;
        Subalgebra::new(&r.parent, basis)
    }
}

/// `(π, w, φ)` plus the target state `φ̄` that fixes the expectation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryDataRepr {
    pub pi: AlgebraMapRepr,
    pub w: ElementRepr,
    pub reference_state: StateRepr,
    pub phi_bar: StateRepr,
}

impl<T: Real> Wire for IsometryData<T> {
    type Repr = IsometryDataRepr;

    fn to_repr(&self) -> IsometryDataRepr {
        IsometryDataRepr {
            pi: self.pi().to_repr(),
            w: self.w().to_repr(),
            reference_state: self.reference_state().to_repr(),
            phi_bar: self.phi_bar().to_repr(),
        }
    }

    fn from_repr(r: IsometryDataRepr) -> Result<Self> {
        let pi = AlgebraMap::from_repr(r.pi)?;
        let w = r.w.into_element(pi.target())?;
        let phi = State::from_repr(r.reference_state)?;
        let phi_bar = State::from_repr(r.phi_bar)?;
        IsometryData::with_invariant_state(pi, w, phi, &phi_bar)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YeadonTripleRepr {
    pub j: AlgebraMapRepr,
    pub w: ElementRepr,
    pub b: LpVectorRepr,
}

impl<T: Real> Wire for YeadonTriple<T> {
    type Repr = YeadonTripleRepr;

    fn to_repr(&self) -> YeadonTripleRepr {
        YeadonTripleRepr {
            j: self.j().to_repr(),
            w: self.w().to_repr(),
            b: self.b().to_repr(),
        }
    }

    fn from_repr(r: YeadonTripleRepr) -> Result<Self> {
        let j = AlgebraMap::from_repr(r.j)?;
        let w = r.w.into_element(j.target())?;
        let b = LpVector::new(
            ElementRepr { blocks: r.b.blocks }.into_element(j.target())?,
            T::of(r.b.p),
        )?;
        YeadonTriple::new(j, w, b)
    }
}

/// Output-only view of a classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReportRepr {
    pub verdict: Verdict,
    pub failed_stage: Option<String>,
    pub failed_stages: Vec<String>,
    pub defects: Defects,
    pub warnings: Vec<String>,
    pub data: Option<IsometryDataRepr>,
}

impl<T: Real> ClassificationReport<T> {
    pub fn to_repr(&self) -> ClassificationReportRepr {
        ClassificationReportRepr {
            verdict: self.verdict,
            failed_stage: self.failed_stage().map(|s| s.name().to_string()),
            failed_stages: self
                .failed_stages
                .iter()
                .map(|s| s.name().to_string())
                .collect(),
            defects: self.defects.clone(),
            warnings: self.warnings.clone(),
            data: self.data.as_ref().map(Wire::to_repr),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_repr()).expect("report serializes")
    }
}
