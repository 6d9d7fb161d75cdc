//! Named verification suites. Each suite runs a few fixed canonical instances
//! followed by seeded random ones and reports one record per case.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{Algebra, AlgebraMap, BlockMatrix, HomomorphismKind, State};
use crate::error::{Error, Result};
use crate::expectation::{
    construct_expectation, interpolation_gap, takesaki_invariant, Subalgebra,
};
use crate::factory::{
    random_invariant_inclusion, random_isometry_data, random_noninvariant_inclusion,
    random_weights, random_yeadon_triple, JordanKind,
};
use crate::isometry::{
    amplified_isometry_defect, build_isometry, classify, isometry_defect, star_adjoint_dual,
    structured_witnesses, transfer_exponent, verify_state_restriction, IsometryData, Verdict,
};
use crate::json::Wire;
use crate::linalg::{self, CMat};
use crate::lp::{amplify_map, clarkson_defect, conjugate_exponent, norm_p, LpMap, LpVector};
use crate::scalar::cr;
use crate::yeadon::{
    build_yeadon_map, jordan_dichotomy_report, yeadon_decompose, yeadon_parts, YeadonTriple,
};

pub const SCHEMA: &str = "nclp/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Clarkson,
    YeadonRoundtrip,
    Dichotomy,
    ClassifyRoundtrip,
    Factory,
    StateRestriction,
    Interpolation,
    Duality,
    Extrapolation,
    L2Identity,
    ExpectationDetect,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Clarkson,
        Suite::YeadonRoundtrip,
        Suite::Dichotomy,
        Suite::ClassifyRoundtrip,
        Suite::Factory,
        Suite::StateRestriction,
        Suite::Interpolation,
        Suite::Duality,
        Suite::Extrapolation,
        Suite::L2Identity,
        Suite::ExpectationDetect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Clarkson => "clarkson",
            Suite::YeadonRoundtrip => "yeadon_roundtrip",
            Suite::Dichotomy => "dichotomy",
            Suite::ClassifyRoundtrip => "classify_roundtrip",
            Suite::Factory => "factory",
            Suite::StateRestriction => "state_restriction",
            Suite::Interpolation => "interpolation",
            Suite::Duality => "duality",
            Suite::Extrapolation => "extrapolation",
            Suite::L2Identity => "l2_identity",
            Suite::ExpectationDetect => "expectation_detect",
        }
    }

    /// The statement a passing run certifies.
    pub fn certifies(self) -> &'static str {
        match self {
            Suite::Clarkson => "Clarkson equality holds iff h k* = h* k = 0",
            Suite::YeadonRoundtrip => "J, w and B are uniquely determined by T",
            Suite::Dichotomy => "an isometry is a 2-isometry iff its Jordan part is multiplicative",
            Suite::ClassifyRoundtrip => "2-isometries are exactly x ↦ w(φ∘π⁻¹∘E)^{1/p} π(x)",
            Suite::Factory => "factory data yields complete isometries",
            Suite::StateRestriction => "φ̄ ∘ π = φ",
            Suite::Interpolation => "‖φ̄^{1/p} x‖_p ≤ ‖φ^{1/p} x‖_p for p ≥ 2",
            Suite::Duality => "T_{p'} is an isometry and inverts T_p by trace duality",
            Suite::Extrapolation => "an isometry at one exponent transfers to every exponent",
            Suite::L2Identity => "‖φ̄^{1/4} π(x) φ̄^{1/4}‖_2 = ‖φ^{1/4} x φ^{1/4}‖_2",
            Suite::ExpectationDetect => {
                "a φ̄-preserving expectation exists iff π(M) is modular invariant"
            }
        }
    }

    pub fn default_config(self) -> SuiteConfig {
        let sz = |v: &[&[usize]]| v.iter().map(|b| b.to_vec()).collect::<Vec<_>>();
        let factory_sizes = sz(&[&[1], &[2], &[1, 1], &[2, 1], &[1, 2], &[3], &[1, 1, 1]]);
        let (sizes, exponents, cases, samples, tol) = match self {
            Suite::Clarkson => (
                sz(&[&[2], &[3], &[2, 1], &[2, 2]]),
                vec![1.0, 1.5, 3.0, 4.0],
                1000,
                0,
                1e-8,
            ),
            Suite::YeadonRoundtrip => (
                sz(&[&[2], &[3], &[2, 1], &[1, 1]]),
                vec![1.0, 1.5, 3.0, 4.0],
                60,
                0,
                1e-7,
            ),
            Suite::Dichotomy => (
                sz(&[&[2], &[3], &[2, 1], &[1, 2]]),
                vec![1.0, 1.5, 3.0, 4.0],
                60,
                16,
                1e-8,
            ),
            Suite::ClassifyRoundtrip => {
                (factory_sizes, vec![1.0, 1.5, 3.0, 4.0, 7.0], 50, 48, 1e-7)
            }
            Suite::Factory => (factory_sizes, vec![1.0, 1.5, 3.0, 4.0, 7.0], 50, 24, 1e-8),
            Suite::StateRestriction => (factory_sizes, vec![1.0, 1.5, 3.0, 4.0, 7.0], 50, 48, 1e-9),
            Suite::Interpolation => (
                sz(&[&[1, 1], &[2], &[2, 1], &[1, 1, 1]]),
                vec![2.0, 3.0, 4.0, 8.0],
                40,
                500,
                1e-10,
            ),
            Suite::Duality => (factory_sizes, vec![1.5, 3.0], 40, 24, 1e-8),
            Suite::Extrapolation => (factory_sizes, vec![2.5, 4.0, 7.0], 30, 24, 1e-8),
            Suite::L2Identity => (factory_sizes, vec![4.0], 20, 10, 1e-8),
            Suite::ExpectationDetect => (sz(&[&[1, 1], &[2], &[2, 1]]), vec![4.0], 40, 500, 1e-9),
        };
        SuiteConfig {
            suite: self,
            seed: 1,
            sizes,
            exponents,
            cases,
            samples,
            tol,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// Run parameters. `cases` counts the random instances; `samples` is the
/// per-instance sampling budget; `tol` is the suite's acceptance threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub seed: u64,
    pub sizes: Vec<Vec<usize>>,
    pub exponents: Vec<f64>,
    pub cases: usize,
    pub samples: usize,
    pub tol: f64,
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::ConfigInvalid(m.to_string()));
        if self.sizes.is_empty() || self.sizes.iter().any(|s| s.is_empty() || s.contains(&0)) {
            return bad("sizes must be non-empty lists of positive block dimensions");
        }
        if self.sizes.iter().flatten().any(|&n| n > 4) {
            return bad("block dimensions are limited to 4");
        }
        if self.exponents.is_empty() || self.exponents.iter().any(|p| !(p.is_finite() && *p >= 1.0))
        {
            return bad("exponents must be finite and at least 1");
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad("tolerance must be positive");
        }
        let needs_non_hilbert = !matches!(self.suite, Suite::Interpolation | Suite::L2Identity);
        if needs_non_hilbert && self.exponents.contains(&2.0) {
            return Err(Error::ExponentUnsupported(2.0));
        }
        if self.suite == Suite::Duality && self.exponents.contains(&1.0) {
            return Err(Error::ExponentUnsupported(1.0));
        }
        Ok(())
    }
}

/// Parse a block-dimension menu such as `2,3,2+1` (three algebras).
pub fn parse_sizes(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split(',')
        .map(|alg| {
            alg.split('+')
                .map(|n| {
                    n.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::ConfigInvalid(format!("bad block size '{n}'")))
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseVerdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    pub label: String,
    pub inputs_digest: String,
    pub defects: BTreeMap<String, f64>,
    pub verdict: CaseVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub suite: Suite,
    pub certifies: String,
    pub config: SuiteConfig,
    pub cases: Vec<CaseRecord>,
    pub failures: usize,
    pub pass: bool,
    pub wall_time_ms: f64,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the timing field zeroed, for reproducibility comparisons.
    pub fn to_json_untimed(&self) -> String {
        let mut r = self.clone();
        r.wall_time_ms = 0.0;
        r.to_json()
    }

    pub fn max_defect(&self, name: &str) -> Option<f64> {
        self.cases
            .iter()
            .filter_map(|c| c.defects.get(name).copied())
            .fold(None, |a, d| Some(a.map_or(d, |a: f64| a.max(d))))
    }

    pub fn min_defect(&self, name: &str) -> Option<f64> {
        self.cases
            .iter()
            .filter_map(|c| c.defects.get(name).copied())
            .fold(None, |a, d| Some(a.map_or(d, |a: f64| a.min(d))))
    }
}

struct Case {
    label: String,
    inputs: serde_json::Value,
    defects: BTreeMap<String, f64>,
    pass: bool,
    note: Option<String>,
}

impl Case {
    fn new(label: impl Into<String>, inputs: serde_json::Value) -> Self {
        Self {
            label: label.into(),
            inputs,
            defects: BTreeMap::new(),
            pass: true,
            note: None,
        }
    }

    fn defect(&mut self, name: &str, value: f64) -> f64 {
        self.defects.insert(name.to_string(), value);
        value
    }

    /// Records `value` and requires it to be below `tol`.
    fn below(&mut self, name: &str, value: f64, tol: f64) {
        self.defect(name, value);
        if value.partial_cmp(&tol) != Some(Ordering::Less) {
            self.fail(format!("{name} = {value:e} not below {tol:e}"));
        }
    }

    /// Records `value` and requires it to exceed `bound`.
    fn above(&mut self, name: &str, value: f64, bound: f64) {
        self.defect(name, value);
        if value.partial_cmp(&bound) != Some(Ordering::Greater) {
            self.fail(format!("{name} = {value:e} not above {bound:e}"));
        }
    }

    fn fail(&mut self, why: String) {
        self.pass = false;
        if self.note.is_none() {
            self.note = Some(why);
        }
    }

    fn error(mut self, e: Error) -> Self {
        self.fail(e.to_string());
        self
    }
}

fn digest(v: &serde_json::Value) -> String {
    hex::encode(Sha256::digest(v.to_string().as_bytes()))
}

fn value<W: Wire>(w: &W) -> serde_json::Value {
    serde_json::to_value(w.to_repr()).expect("wire types serialize")
}

/// Execute a suite. Cases run in parallel; the report lists them in index order.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let start = Instant::now();
    let canon = CANONICAL_CASES;
    let total = canon + config.cases;
    let cases: Vec<CaseRecord> = (0..total)
        .into_par_iter()
        .map(|index| {
            let case = if index < canon {
                canonical_case(config, index)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ index as u64);
                random_case(config, index - canon, &mut rng)
            };
            CaseRecord {
                index,
                label: case.label,
                inputs_digest: digest(&case.inputs),
                defects: case.defects,
                verdict: if case.pass {
                    CaseVerdict::Pass
                } else {
                    CaseVerdict::Fail
                },
                note: case.note,
            }
        })
        .collect();
    let failures = cases
        .iter()
        .filter(|c| c.verdict == CaseVerdict::Fail)
        .count();
    Ok(SuiteReport {
        schema: SCHEMA.to_string(),
        suite: config.suite,
        certifies: config.suite.certifies().to_string(),
        config: config.clone(),
        cases,
        failures,
        pass: failures == 0,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn alg(blocks: &[usize]) -> Algebra {
    Algebra::new(blocks.to_vec()).expect("validated sizes")
}

fn diag_state(a: &Algebra, diag: &[f64]) -> State<f64> {
    let mut rho = BlockMatrix::zeros(a);
    let mut k = 0;
    for b in 0..a.num_blocks() {
        for i in 0..a.blocks()[b] {
            rho.block_mut(b)[(i, i)] = cr(diag[k]);
            k += 1;
        }
    }
    State::new(rho).expect("diagonal state")
}

fn m2(entries: [[f64; 2]; 2]) -> BlockMatrix<f64> {
    let a = alg(&[2]);
    let m = CMat::from_fn(2, 2, |i, j| cr(entries[i][j]));
    BlockMatrix::from_blocks(&a, vec![m]).expect("2x2 block")
}

/// Every suite starts with two fixed instances.
const CANONICAL_CASES: usize = 2;

/// Identity on `M_2` and the diagonal embedding `ℂ ⊕ ℂ → M_2`.
fn canonical_data(k: usize) -> (String, IsometryData<f64>) {
    if k == 0 {
        let a = alg(&[2]);
        let phi = diag_state(&a, &[0.3, 0.7]);
        let d = IsometryData::with_invariant_state(
            AlgebraMap::identity(&a),
            BlockMatrix::identity(&a),
            phi.clone(),
            &phi,
        )
        .expect("identity data");
        ("canonical identity on M_2".into(), d)
    } else {
        let (s, t) = (alg(&[1, 1]), alg(&[2]));
        let mut m = CMat::zeros(4, 2);
        m[(0, 0)] = cr(1.0);
        m[(3, 1)] = cr(1.0);
        let pi = AlgebraMap::new(&s, &t, m).expect("diagonal embedding");
        let d = IsometryData::with_invariant_state(
            pi,
            BlockMatrix::identity(&t),
            diag_state(&s, &[0.3, 0.7]),
            &diag_state(&t, &[0.3, 0.7]),
        )
        .expect("diagonal data");
        ("canonical diagonal subalgebra of M_2".into(), d)
    }
}

fn canonical_triple(k: usize) -> (String, YeadonTriple<f64>) {
    let a = alg(&[2]);
    let one = BlockMatrix::identity(&a);
    let b = LpVector::new(one.clone(), 1.0).expect("identity density");
    if k == 0 {
        let t = YeadonTriple::new(AlgebraMap::identity(&a), one, b).expect("identity triple");
        ("canonical identity triple on M_2".into(), t)
    } else {
        let t = YeadonTriple::new(AlgebraMap::transpose(&a), one, b).expect("transpose triple");
        ("canonical transpose triple on M_2".into(), t)
    }
}

fn canonical_case(cfg: &SuiteConfig, k: usize) -> Case {
    let p0 = cfg.exponents[0];
    match cfg.suite {
        Suite::Clarkson => {
            let a = alg(&[2]);
            let e11 = BlockMatrix::basis(&a, 0);
            let other = if k == 0 {
                BlockMatrix::basis(&a, 3)
            } else {
                BlockMatrix::basis(&a, 1)
            };
            let label = if k == 0 {
                "canonical e11, e22"
            } else {
                "canonical e11, e12"
            };
            clarkson_case(label, e11, other, p0, k == 0, cfg.tol)
        }
        Suite::YeadonRoundtrip | Suite::Dichotomy => {
            let (label, t) = canonical_triple(k);
            let label = format!("{label} p={p0}");
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            if cfg.suite == Suite::Dichotomy {
                dichotomy_case(
                    cfg,
                    label,
                    &t,
                    [JordanKind::Multiplicative, JordanKind::Transpose][k],
                    p0,
                    cfg.seed,
                )
            } else {
                yeadon_case(cfg, label, &t, p0, &mut rng)
            }
        }
        Suite::Interpolation | Suite::ExpectationDetect => {
            let parent = alg(&[2]);
            let a = Subalgebra::diagonal(&parent);
            let state = if k == 0 {
                diag_state(&parent, &[0.3, 0.7])
            } else {
                let (c, s) = (
                    std::f64::consts::FRAC_PI_4.cos(),
                    std::f64::consts::FRAC_PI_4.sin(),
                );
                State::new(m2([
                    [0.25 * c * c + 0.75 * s * s, (0.25 - 0.75) * c * s],
                    [(0.25 - 0.75) * c * s, 0.25 * s * s + 0.75 * c * c],
                ]))
                .expect("rotated state")
            };
            let label = if k == 0 {
                "canonical diagonal subalgebra, diagonal state"
            } else {
                "canonical diagonal subalgebra, rotated state"
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            if cfg.suite == Suite::Interpolation {
                interpolation_case(cfg, label.into(), &a, &state, p0, &mut rng)
            } else {
                detection_case(cfg, label.into(), &a, &state, k == 0, p0, &mut rng)
            }
        }
        _ => {
            let (label, data) = canonical_data(k);
            isometry_family_case(cfg, label, &data, p0, cfg.seed)
        }
    }
}

fn random_case(cfg: &SuiteConfig, i: usize, rng: &mut ChaCha8Rng) -> Case {
    let np = cfg.exponents.len();
    let p = cfg.exponents[i % np];
    let blocks = &cfg.sizes[(i / np) % cfg.sizes.len()];
    let seed = rng.random::<u64>();
    match cfg.suite {
        Suite::Clarkson => {
            let a = alg(blocks);
            let orthogonal = i.is_multiple_of(2);
            let p = cfg.exponents[(i / 2) % np];
            let (h, k) = if orthogonal {
                orthogonal_pair(&a, rng)
            } else {
                overlapping_pair(&a, p, rng)
            };
            let kind = if orthogonal {
                "orthogonal"
            } else {
                "overlapping"
            };
            clarkson_case(
                &format!("{kind} pair blocks={blocks:?} p={p}"),
                h,
                k,
                p,
                orthogonal,
                cfg.tol,
            )
        }
        Suite::YeadonRoundtrip | Suite::Dichotomy => {
            let kind = [
                JordanKind::Multiplicative,
                JordanKind::Transpose,
                JordanKind::Mixed,
            ][(i / np) % 3];
            let blocks = &cfg.sizes[(i / (3 * np)) % cfg.sizes.len()];
            let src = alg(blocks);
            let weights = random_weights(&src, rng);
            let src = src.with_trace_weights(weights).expect("positive weights");
            let label = format!("{kind:?} triple blocks={blocks:?} p={p}");
            match random_yeadon_triple::<f64, _>(&src, kind, p, rng) {
                Err(e) => Case::new(label, serde_json::Value::Null).error(e),
                Ok(t) if cfg.suite == Suite::Dichotomy => {
                    dichotomy_case(cfg, label, &t, kind, p, seed)
                }
                Ok(t) => yeadon_case(cfg, label, &t, p, rng),
            }
        }
        Suite::Interpolation => {
            let invariant = i.is_multiple_of(2);
            let p = cfg.exponents[(i / 2) % np];
            let (a, state) = if invariant {
                match random_invariant_inclusion::<f64, _>(&alg(blocks), rng) {
                    Ok(x) => x,
                    Err(e) => {
                        return Case::new("invariant inclusion", serde_json::Value::Null).error(e)
                    }
                }
            } else {
                random_noninvariant_inclusion::<f64, _>(rng)
            };
            let kind = if invariant {
                "invariant"
            } else {
                "non-invariant"
            };
            let label = format!(
                "{kind} inclusion {:?} ⊂ {:?} p={p}",
                a.structure().blocks(),
                a.parent().blocks()
            );
            interpolation_case(cfg, label, &a, &state, p, rng)
        }
        Suite::ExpectationDetect => {
            let invariant = i % 2 == 1;
            let (a, state) = if invariant {
                match random_invariant_inclusion::<f64, _>(&alg(blocks), rng) {
                    Ok(x) => x,
                    Err(e) => {
                        return Case::new("invariant inclusion", serde_json::Value::Null).error(e)
                    }
                }
            } else {
                random_noninvariant_inclusion::<f64, _>(rng)
            };
            let kind = if invariant {
                "invariant"
            } else {
                "non-invariant"
            };
            let label = format!(
                "{kind} inclusion {:?} ⊂ {:?}",
                a.structure().blocks(),
                a.parent().blocks()
            );
            detection_case(cfg, label, &a, &state, invariant, p, rng)
        }
        _ => {
            let src = alg(blocks);
            match random_isometry_data::<f64, _>(&src, rng) {
                Err(e) => Case::new(
                    format!("factory data blocks={blocks:?}"),
                    serde_json::Value::Null,
                )
                .error(e),
                Ok(d) => {
                    let unit = BlockMatrix::identity(d.target());
                    let pi1 = d
                        .pi()
                        .apply(&BlockMatrix::identity(&src))
                        .expect("source shape");
                    let label = format!(
                        "factory data {:?} → {:?}{}{} p={p}",
                        blocks,
                        d.target().blocks(),
                        if pi1.distance(&unit) > 1e-9 {
                            " non-unital"
                        } else {
                            ""
                        },
                        if d.w().distance(&pi1) > 1e-9 {
                            " w≠π(1)"
                        } else {
                            ""
                        },
                    );
                    isometry_family_case(cfg, label, &d, p, seed)
                }
            }
        }
    }
}

fn normalize(x: BlockMatrix<f64>, p: f64) -> BlockMatrix<f64> {
    let n = norm_p(&x, p);
    x.scale_re(1.0 / n)
}

fn clarkson_case(
    label: &str,
    h: BlockMatrix<f64>,
    k: BlockMatrix<f64>,
    p: f64,
    orthogonal: bool,
    tol: f64,
) -> Case {
    let (h, k) = (normalize(h, p), normalize(k, p));
    let inputs = serde_json::json!({ "h": value(&h), "k": value(&k), "p": p });
    let mut case = Case::new(label, inputs);
    let r = match (LpVector::new(h, p), LpVector::new(k, p)) {
        (Ok(h), Ok(k)) => clarkson_defect(&h, &k),
        (Err(e), _) | (_, Err(e)) => Err(e),
    };
    match r {
        Err(e) => case.error(e),
        Ok(r) => {
            case.defect("witness", r.witness);
            if orthogonal {
                case.below("clarkson", r.defect, tol);
            } else {
                case.above("clarkson", r.defect, 1e-6);
            }
            case
        }
    }
}

fn block_rotation(a: &Algebra, rng: &mut ChaCha8Rng) -> BlockMatrix<f64> {
    let blocks = a
        .blocks()
        .iter()
        .map(|&n| linalg::random_unitary::<f64, _>(n, rng))
        .collect();
    BlockMatrix::from_blocks(a, blocks).expect("unitary shapes")
}

/// Random partition of each block's indices into two classes, conjugated by a
/// random unitary; both classes are non-empty overall.
fn split_projections(a: &Algebra, rng: &mut ChaCha8Rng) -> (BlockMatrix<f64>, BlockMatrix<f64>) {
    let dim = a.rep_dim();
    let mut side: Vec<bool> = (0..dim).map(|_| rng.random_bool(0.5)).collect();
    if side.iter().all(|&s| s) || side.iter().all(|&s| !s) {
        let k = rng.random_range(0..dim);
        side[k] = !side[k];
    }
    let u = block_rotation(a, rng);
    let mut e = BlockMatrix::zeros(a);
    let mut f = BlockMatrix::zeros(a);
    let mut k = 0;
    for b in 0..a.num_blocks() {
        for i in 0..a.blocks()[b] {
            let target = if side[k] { &mut e } else { &mut f };
            target.block_mut(b)[(i, i)] = cr(1.0);
            k += 1;
        }
    }
    let conj = |x: &BlockMatrix<f64>| &(&u * x) * &u.adjoint();
    (conj(&e), conj(&f))
}

fn orthogonal_pair(a: &Algebra, rng: &mut ChaCha8Rng) -> (BlockMatrix<f64>, BlockMatrix<f64>) {
    let (pl, ql) = split_projections(a, rng);
    let (pr, qr) = split_projections(a, rng);
    let g1 = BlockMatrix::gaussian(a, rng);
    let g2 = BlockMatrix::gaussian(a, rng);
    let h = &(&pl * &g1) * &pr;
    let k = &(&ql * &g2) * &qr;
    if h.max_abs() < 1e-6 || k.max_abs() < 1e-6 {
        return orthogonal_pair(a, rng);
    }
    (h, k)
}

fn overlapping_pair(
    a: &Algebra,
    p: f64,
    rng: &mut ChaCha8Rng,
) -> (BlockMatrix<f64>, BlockMatrix<f64>) {
    loop {
        let h = normalize(BlockMatrix::gaussian(a, rng), p);
        let k = normalize(BlockMatrix::gaussian(a, rng), p);
        let w = (&h * &k.adjoint())
            .frobenius()
            .max((&h.adjoint() * &k).frobenius());
        if w > 0.1 {
            return (h, k);
        }
    }
}

fn isometry_family_case(
    cfg: &SuiteConfig,
    label: String,
    data: &IsometryData<f64>,
    p: f64,
    seed: u64,
) -> Case {
    let inputs = serde_json::json!({ "data": value(data), "p": p });
    let mut case = Case::new(label, inputs);
    let samples = cfg.samples;
    let tol = cfg.tol;
    let run = |case: &mut Case| -> Result<()> {
        match cfg.suite {
            Suite::Factory => {
                let t = build_isometry(data, p)?;
                case.below("isometry", isometry_defect(&t, samples, seed), tol);
                case.below(
                    "two_isometry",
                    amplified_isometry_defect(&t, 2, samples, seed ^ 2),
                    tol,
                );
                case.below(
                    "three_isometry",
                    amplified_isometry_defect(&t, 3, samples / 2, seed ^ 3),
                    tol,
                );
            }
            Suite::ClassifyRoundtrip | Suite::StateRestriction => {
                let t = build_isometry(data, p)?;
                let r = classify(&t, data.reference_state(), p)?;
                case.defect(
                    "accepted",
                    if r.verdict == Verdict::Accept {
                        1.0
                    } else {
                        0.0
                    },
                );
                match &r.data {
                    None => case.fail(format!("classification rejected at {:?}", r.failed_stage())),
                    Some(found) if cfg.suite == Suite::ClassifyRoundtrip => {
                        if r.verdict != Verdict::Accept {
                            case.fail(format!("classification rejected at {:?}", r.failed_stage()));
                        }
                        case.below("distance", found.distance(data), tol);
                    }
                    Some(found) => {
                        let d = verify_state_restriction(
                            found.phi_bar(),
                            found.pi(),
                            found.reference_state(),
                        );
                        case.below("state_restriction", d, tol);
                    }
                }
            }
            Suite::Duality => {
                let q = conjugate_exponent(p).ok_or(Error::ExponentUnsupported(p))?;
                let tp = build_isometry(data, p)?;
                let tq = build_isometry(data, q)?;
                case.below(
                    "conjugate_isometry",
                    isometry_defect(&tq, samples, seed),
                    tol,
                );
                let back = star_adjoint_dual(&tq)?.after(&tp)?;
                let n = back.matrix().nrows();
                let id = CMat::<f64>::identity(n, n);
                case.below(
                    "dual_inverse",
                    linalg::frobenius(&(back.matrix() - id)),
                    tol,
                );
            }
            Suite::Extrapolation => {
                let base = build_isometry(data, 3.0)?;
                case.below("base_isometry", isometry_defect(&base, samples, seed), tol);
                let t = transfer_exponent(
                    data.pi(),
                    data.reference_state(),
                    data.phi_bar(),
                    data.w(),
                    p,
                )?;
                case.below(
                    "transferred_isometry",
                    isometry_defect(&t, samples, seed ^ 5),
                    tol,
                );
            }
            Suite::L2Identity => {
                let src = data.source();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (phi, phi_bar) = (
                    data.reference_state().power(0.25),
                    data.phi_bar().power(0.25),
                );
                let mut worst = 0.0f64;
                for _ in 0..samples.max(1) {
                    let x = BlockMatrix::gaussian(src, &mut rng);
                    let rhs = norm_p(&(&(&phi * &x) * &phi), 2.0);
                    let lhs = norm_p(&(&(&phi_bar * &data.pi().apply(&x)?) * &phi_bar), 2.0);
                    worst = worst.max((lhs - rhs).abs() / rhs);
                }
                case.below("l2_identity", worst, tol);
            }
            _ => unreachable!("not an isometry-family suite"),
        }
        Ok(())
    };
    if let Err(e) = run(&mut case) {
        return case.error(e);
    }
    case
}

/// Largest defect on structured witnesses of `id_{M_2} ⊗ T`, rescaled so the
/// witness has norm 2.
fn normalized_witness_defect(t: &LpMap<f64>, p: f64) -> f64 {
    let amp = amplify_map(t, 2);
    structured_witnesses::<f64>(t.source(), 2)
        .iter()
        .map(|x| {
            let nx = norm_p(x, p);
            2.0 * (norm_p(&amp.apply_element(x), p) - nx).abs() / nx
        })
        .fold(0.0, f64::max)
}

/// `|2 − 4^{1/p}|`: the norm gap between `Σ e_ij ⊗ e_ij` and the swap.
pub fn transpose_witness_gap(p: f64) -> f64 {
    (2.0 - 4f64.powf(1.0 / p)).abs()
}

fn dichotomy_case(
    cfg: &SuiteConfig,
    label: String,
    triple: &YeadonTriple<f64>,
    kind: JordanKind,
    p: f64,
    seed: u64,
) -> Case {
    let inputs = serde_json::json!({ "triple": value(triple), "p": p });
    let mut case = Case::new(label, inputs);
    let r = jordan_dichotomy_report(triple, p, cfg.samples, seed)
        .and_then(|r| Ok((r, build_yeadon_map(triple, p)?)));
    let (r, t) = match r {
        Ok(x) => x,
        Err(e) => return case.error(e),
    };
    case.below("isometry", r.isometry_defect, cfg.tol);
    case.defect("two_isometry", r.two_isometry_defect);
    case.defect("three_isometry", r.three_isometry_defect);
    let w = case.defect("witness", normalized_witness_defect(&t, p));
    case.defect("consistent", if r.consistent { 1.0 } else { 0.0 });
    if !r.consistent {
        case.fail("multiplicativity disagrees with the 2-isometry defect".into());
    }
    match r.kind {
        HomomorphismKind::StarHomomorphism => {
            case.below("two_isometry_ok", r.two_isometry_defect, cfg.tol)
        }
        _ => {
            let transpose_only = kind == JordanKind::Transpose;
            if transpose_only {
                let bound = transpose_witness_gap(p) - 1e-6;
                case.defect("witness_bound", bound);
                if w < bound {
                    case.fail(format!("witness defect {w:e} below {bound:e}"));
                }
            } else {
                case.above("witness_positive", w, 1e-6);
            }
        }
    }
    case
}

fn yeadon_case(
    cfg: &SuiteConfig,
    label: String,
    triple: &YeadonTriple<f64>,
    p: f64,
    rng: &mut ChaCha8Rng,
) -> Case {
    let inputs = serde_json::json!({ "triple": value(triple), "p": p });
    let mut case = Case::new(label, inputs);
    let run = |case: &mut Case, rng: &mut ChaCha8Rng| -> Result<()> {
        let t = build_yeadon_map(triple, p)?;
        let back = yeadon_decompose(&t, p)?;
        case.below("roundtrip", back.distance(triple), cfg.tol);
        let (e, f) = split_projections(t.source(), rng);
        let (we, be) = yeadon_parts(&t, &e);
        let (wf, bf) = yeadon_parts(&t, &f);
        let (wef, bef) = yeadon_parts(&t, &(&e + &f));
        case.below("orthogonal_b", (&be * &bf).frobenius(), 1e-9);
        case.below("orthogonal_w", (&we.adjoint() * &wf).frobenius(), 1e-9);
        case.below("additive_b", bef.distance(&(&be + &bf)), 1e-9);
        case.below("additive_w", wef.distance(&(&we + &wf)), 1e-9);
        Ok(())
    };
    if let Err(e) = run(&mut case, rng) {
        return case.error(e);
    }
    case
}

fn interpolation_case(
    cfg: &SuiteConfig,
    label: String,
    a: &Subalgebra<f64>,
    state: &State<f64>,
    p: f64,
    rng: &mut ChaCha8Rng,
) -> Case {
    let inputs = serde_json::json!({ "subalgebra": value(a), "state": value(state), "p": p });
    let mut case = Case::new(label, inputs);
    let mut worst = f64::INFINITY;
    let mut violations = 0usize;
    for _ in 0..cfg.samples.max(1) {
        let x = BlockMatrix::gaussian(a.structure(), rng);
        let x = x.scale_re(1.0 / x.frobenius());
        match interpolation_gap(a, state, &x, p) {
            Ok(g) => {
                worst = worst.min(g);
                if g < -cfg.tol {
                    violations += 1;
                }
            }
            Err(e) => return case.error(e),
        }
    }
    case.defect("min_gap", worst);
    case.below("violations", violations as f64, 0.5);
    case
}

fn detection_case(
    cfg: &SuiteConfig,
    label: String,
    a: &Subalgebra<f64>,
    state: &State<f64>,
    invariant: bool,
    p: f64,
    rng: &mut ChaCha8Rng,
) -> Case {
    let inputs = serde_json::json!({ "subalgebra": value(a), "state": value(state), "p": p });
    let mut case = Case::new(label, inputs);
    let run = |case: &mut Case, rng: &mut ChaCha8Rng| -> Result<()> {
        let (found_invariant, d) = takesaki_invariant(a, state)?;
        case.defect("invariance", d);
        if invariant {
            if !found_invariant {
                case.fail("invariant inclusion reported non-invariant".into());
            }
            let e = construct_expectation(a, state)?;
            case.below("expectation", e.check().max_defect(), cfg.tol);
        } else {
            case.above("invariance_detected", d, 1e-6);
            if found_invariant {
                case.fail("non-invariant inclusion reported invariant".into());
            }
            let mut best = f64::NEG_INFINITY;
            for _ in 0..cfg.samples.max(1) {
                let x = BlockMatrix::gaussian(a.structure(), rng);
                best = best.max(interpolation_gap(a, state, &x, p)?);
                if best > 1e-3 {
                    break;
                }
            }
            case.above("strict_gap", best, 1e-3);
        }
        Ok(())
    };
    if let Err(e) = run(&mut case, rng) {
        return case.error(e);
    }
    case
}
