//! Seeded generators for isometry data, inclusions and Yeadon triples.
//!
//! Targets are built as `U_c (⊕ x_b ⊗ I_k ⊕ x_b^T ⊗ I_k' ⊕ 0) U_c*` blockwise.

use rand::Rng;

use crate::algebra::{Algebra, AlgebraMap, BlockMatrix, State};
use crate::error::Result;
use crate::expectation::Subalgebra;
use crate::isometry::IsometryData;
use crate::linalg::{self, CMat};
use crate::lp::LpVector;
use crate::scalar::{cr, Real};
use crate::yeadon::YeadonTriple;

/// Largest target block produced unless a source block is larger.
pub const MAX_TARGET_BLOCK: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Piece {
    block: usize,
    mult: usize,
    transposed: bool,
}

#[derive(Clone, Debug)]
struct TargetBlock {
    copies: Vec<Piece>,
    extra: usize,
}

impl TargetBlock {
    fn size(&self, src: &Algebra) -> usize {
        self.copies
            .iter()
            .map(|c| src.blocks()[c.block] * c.mult)
            .sum::<usize>()
            + self.extra
    }
}

/// How copies of source blocks are oriented.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JordanKind {
    Multiplicative,
    Transpose,
    Mixed,
}

struct Layout<T: Real> {
    blocks: Vec<TargetBlock>,
    unitaries: Vec<CMat<T>>,
    target: Algebra,
}

fn layout<T: Real, R: Rng>(
    src: &Algebra,
    kind: JordanKind,
    non_unital: bool,
    rng: &mut R,
) -> Layout<T> {
    let cap = MAX_TARGET_BLOCK.max(src.blocks().iter().copied().max().unwrap_or(1));
    let n_targets = rng.random_range(1..=2usize);
    let mut blocks = vec![
        TargetBlock {
            copies: Vec::new(),
            extra: 0
        };
        n_targets
    ];
    let orient = |b: usize, rng: &mut R| match kind {
        JordanKind::Multiplicative => false,
        JordanKind::Transpose => true,
        JordanKind::Mixed => src.blocks()[b] >= 2 && rng.random_bool(0.5),
    };
    for b in 0..src.num_blocks() {
        let nb = src.blocks()[b];
        let start = rng.random_range(0..blocks.len());
        let slot = (0..blocks.len())
            .map(|k| (start + k) % blocks.len())
            .find(|&c| blocks[c].size(src) + nb <= cap);
        let transposed = orient(b, rng);
        let copy = Piece {
            block: b,
            mult: 1,
            transposed,
        };
        match slot {
            Some(c) => blocks[c].copies.push(copy),
            None => blocks.push(TargetBlock {
                copies: vec![copy],
                extra: 0,
            }),
        }
    }
    if kind == JordanKind::Mixed && !blocks.iter().flat_map(|t| &t.copies).any(|c| c.transposed) {
        if let Some(c) = blocks
            .iter_mut()
            .flat_map(|t| t.copies.iter_mut())
            .find(|c| src.blocks()[c.block] >= 2)
        {
            c.transposed = true;
        }
    }
    for _ in 0..2 {
        let b = rng.random_range(0..src.num_blocks());
        let c = rng.random_range(0..blocks.len());
        let nb = src.blocks()[b];
        if blocks[c].size(src) + nb <= cap && rng.random_bool(0.5) {
            let transposed = orient(b, rng);
            match blocks[c]
                .copies
                .iter_mut()
                .find(|cp| cp.block == b && cp.transposed == transposed)
            {
                Some(cp) => cp.mult += 1,
                None => blocks[c].copies.push(Piece {
                    block: b,
                    mult: 1,
                    transposed,
                }),
            }
        }
    }
    for t in blocks.iter_mut() {
        if non_unital && t.size(src) < cap && rng.random_bool(0.4) {
            t.extra = 1;
        }
        if t.size(src) == 0 {
            t.extra = 1;
        }
    }
    let sizes: Vec<usize> = blocks.iter().map(|t| t.size(src)).collect();
    let target = Algebra::new(sizes.clone()).expect("nonempty target blocks");
    let unitaries = sizes
        .iter()
        .map(|&n| linalg::random_unitary::<T, R>(n, rng))
        .collect();
    Layout {
        blocks,
        unitaries,
        target,
    }
}

impl<T: Real> Layout<T> {
    /// `U_c (⊕_copies f(copy) ⊕ g(extra)) U_c*` per target block.
    fn assemble(
        &self,
        src: &Algebra,
        f: impl Fn(usize, &Piece) -> CMat<T>,
        g: impl Fn(usize, usize) -> CMat<T>,
    ) -> BlockMatrix<T> {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(c, tb)| {
                let n = tb.size(src);
                let mut m = CMat::zeros(n, n);
                let mut off = 0;
                for cp in &tb.copies {
                    let piece = f(c, cp);
                    let k = piece.nrows();
                    m.view_mut((off, off), (k, k)).copy_from(&piece);
                    off += k;
                }
                if tb.extra > 0 {
                    m.view_mut((off, off), (tb.extra, tb.extra))
                        .copy_from(&g(c, tb.extra));
                }
                let u = &self.unitaries[c];
                u * m * u.adjoint()
            })
            .collect();
        BlockMatrix::from_blocks(&self.target, blocks).expect("layout shapes")
    }

    fn map(&self, src: &Algebra) -> AlgebraMap<T> {
        AlgebraMap::from_fn(src, &self.target, |x| {
            self.assemble(
                src,
                |_, cp| {
                    let xb = x.block(cp.block);
                    let xb = if cp.transposed {
                        xb.transpose()
                    } else {
                        xb.clone()
                    };
                    linalg::kron(&xb, &CMat::identity(cp.mult, cp.mult))
                },
                |_, e| CMat::zeros(e, e),
            )
        })
    }
}

/// `G G*/Tr + floor·1`, renormalized to unit trace.
fn random_positive<T: Real, R: Rng>(n: usize, floor: f64, rng: &mut R) -> CMat<T> {
    let g = linalg::gaussian::<T, R>(n, n, rng);
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    let m = gg * cr(T::one() / tr) + CMat::identity(n, n) * cr(T::of(floor));
    let tr = m.trace().re;
    m * cr(T::one() / tr)
}

/// A faithful state kept away from the boundary by mixing in 10% of the trace.
pub fn well_conditioned_state<T: Real, R: Rng>(alg: &Algebra, rng: &mut R) -> State<T> {
    let raw = State::<T>::random_faithful_with(alg, rng);
    let mixed =
        &raw.density().scale_re(T::of(0.9)) + &State::tracial(alg).density().scale_re(T::of(0.1));
    State::new(mixed).expect("convex combination of states")
}

fn block_unitary<T: Real, R: Rng>(alg: &Algebra, rng: &mut R) -> BlockMatrix<T> {
    let blocks = alg
        .blocks()
        .iter()
        .map(|&n| linalg::random_unitary::<T, R>(n, rng))
        .collect();
    BlockMatrix::from_blocks(alg, blocks).expect("unitary shapes")
}

/// An injective *-homomorphism out of `src` together with a state on the
/// target whose modular group leaves its range invariant.
pub fn random_invariant_embedding<T: Real, R: Rng>(
    src: &Algebra,
    non_unital: bool,
    rng: &mut R,
) -> (AlgebraMap<T>, State<T>) {
    let lay = layout::<T, R>(src, JordanKind::Multiplicative, non_unital, rng);
    let pi = lay.map(src);
    let sigmas: Vec<CMat<T>> = src
        .blocks()
        .iter()
        .map(|&n| random_positive(n, 0.1, rng))
        .collect();
    let betas: Vec<Vec<CMat<T>>> = lay
        .blocks
        .iter()
        .map(|tb| {
            tb.copies
                .iter()
                .map(|cp| random_positive(cp.mult, 0.1, rng))
                .collect()
        })
        .collect();
    let extras: Vec<CMat<T>> = lay
        .blocks
        .iter()
        .map(|tb| random_positive(tb.extra.max(1), 0.1, rng))
        .collect();
    let raw = lay.assemble(
        src,
        |c, cp| {
            let k = lay.blocks[c]
                .copies
                .iter()
                .position(|x| x == cp)
                .expect("copy present");
            linalg::kron(&sigmas[cp.block], &betas[c][k])
        },
        |c, _| extras[c].clone(),
    );
    let tr = raw.trace().re;
    let state = State::new(raw.scale_re(T::one() / tr)).expect("positive with unit trace");
    (pi, state)
}

/// Seeded `IsometryData` over `src`: rotated amplified embedding, possibly
/// non-unital, with `w = V π(1)` for a random unitary `V` or `w = π(1)`.
pub fn random_isometry_data<T: Real, R: Rng>(
    src: &Algebra,
    rng: &mut R,
) -> Result<IsometryData<T>> {
    let non_unital = rng.random_bool(0.5);
    let (pi, psi) = random_invariant_embedding::<T, R>(src, non_unital, rng);
    let phi = well_conditioned_state::<T, R>(src, rng);
    let unit = pi.apply(&BlockMatrix::identity(src))?;
    let w = if rng.random_bool(0.35) {
        unit
    } else {
        &block_unitary::<T, R>(pi.target(), rng) * &unit
    };
    IsometryData::with_invariant_state(pi, w, phi, &psi)
}

/// Same as [`random_isometry_data`] with `w = π(1)`.
pub fn random_positive_isometry_data<T: Real, R: Rng>(
    src: &Algebra,
    rng: &mut R,
) -> Result<IsometryData<T>> {
    let (pi, psi) = random_invariant_embedding::<T, R>(src, rng.random_bool(0.5), rng);
    let phi = well_conditioned_state::<T, R>(src, rng);
    let w = pi.apply(&BlockMatrix::identity(src))?;
    IsometryData::with_invariant_state(pi, w, phi, &psi)
}

/// A subalgebra given by a rotated basis (so that it is decomposed numerically)
/// and a state for which it is modular-invariant.
pub fn random_invariant_inclusion<T: Real, R: Rng>(
    src: &Algebra,
    rng: &mut R,
) -> Result<(Subalgebra<T>, State<T>)> {
    let (pi, psi) = random_invariant_embedding::<T, R>(src, false, rng);
    let basis = crate::algebra::images(&pi);
    Ok((Subalgebra::new(pi.target(), basis)?, psi))
}

/// Diagonal matrices in `M_2` (optionally `⊕ ℂ`) with a state whose `M_2`
/// block is rotated off the diagonal by an angle in `[0.3, 1.2]`.
pub fn random_noninvariant_inclusion<T: Real, R: Rng>(rng: &mut R) -> (Subalgebra<T>, State<T>) {
    let blocks = if rng.random_bool(0.5) {
        vec![2]
    } else {
        vec![2, 1]
    };
    let parent = Algebra::new(blocks).expect("valid blocks");
    let lam: f64 = rng.random_range(0.15..0.4);
    let theta: f64 = rng.random_range(0.3..1.2);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let mass: f64 = if parent.num_blocks() == 2 {
        rng.random_range(0.6..0.9)
    } else {
        1.0
    };
    let (c, s) = (theta.cos(), theta.sin());
    let u = [[c, -s], [s, c]];
    let mut rho = BlockMatrix::<T>::zeros(&parent);
    for i in 0..2 {
        for j in 0..2 {
            let v = mass * (lam * u[i][0] * u[j][0] + (1.0 - lam) * u[i][1] * u[j][1]);
            let ph = if i < j {
                -phase
            } else if i > j {
                phase
            } else {
                0.0
            };
            rho.block_mut(0)[(i, j)] = crate::scalar::cf(v * ph.cos(), v * ph.sin());
        }
    }
    if parent.num_blocks() == 2 {
        rho.block_mut(1)[(0, 0)] = cr(T::of(1.0 - mass));
    }
    (
        Subalgebra::diagonal(&parent),
        State::new(rho).expect("rotated density is a state"),
    )
}

/// Positive weights in `[0.5, 2]` per block.
pub fn random_weights<R: Rng>(alg: &Algebra, rng: &mut R) -> Vec<f64> {
    (0..alg.num_blocks())
        .map(|_| rng.random_range(0.5..2.0))
        .collect()
}

/// A Yeadon triple over `src` (whose trace weights are used) with copies
/// oriented according to `kind`, `B = I ⊗ β` on each copy, and `w = V J(1)`.
pub fn random_yeadon_triple<T: Real, R: Rng>(
    src: &Algebra,
    kind: JordanKind,
    p: T,
    rng: &mut R,
) -> Result<YeadonTriple<T>> {
    let lay = layout::<T, R>(src, kind, true, rng);
    let j = lay.map(src);
    let betas: Vec<Vec<CMat<T>>> = lay
        .blocks
        .iter()
        .map(|tb| {
            tb.copies
                .iter()
                .map(|cp| random_positive(cp.mult, 0.2, rng))
                .collect()
        })
        .collect();
    let mut mass = vec![T::zero(); src.num_blocks()];
    for (tb, bs) in lay.blocks.iter().zip(&betas) {
        for (cp, beta) in tb.copies.iter().zip(bs) {
            let bp = linalg::herm_fn(beta, |l| cr(l.powf(p)));
            mass[cp.block] += bp.trace().re;
        }
    }
    let scale: Vec<T> = (0..src.num_blocks())
        .map(|b| (T::of(src.trace_weight(b)) / mass[b]).powf(T::one() / p))
        .collect();
    let b = lay.assemble(
        src,
        |c, cp| {
            let k = lay.blocks[c]
                .copies
                .iter()
                .position(|x| x == cp)
                .expect("copy present");
            let nb = src.blocks()[cp.block];
            linalg::kron(
                &CMat::identity(nb, nb),
                &(&betas[c][k] * cr(scale[cp.block])),
            )
        },
        |_, e| CMat::zeros(e, e),
    );
    let unit = j.apply(&BlockMatrix::identity(src))?;
    let w = if rng.random_bool(0.35) {
        unit
    } else {
        &block_unitary::<T, R>(j.target(), rng) * &unit
    };
    YeadonTriple::new(j, w, LpVector::new(b, p)?)
}
