//! Dense complex matrix helpers: Hermitian functional calculus, SVD wrappers,
//! Kronecker products and seeded random matrices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::{cabs, cr, Real, C};

pub type CMat<T> = DMatrix<C<T>>;

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn herm_eig<T: Real>(m: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let h = (m + m.adjoint()) * cr(T::of(0.5));
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// `f(H)` for the Hermitian part `H` of `m`, with a complex-valued spectral function.
pub fn herm_fn<T: Real>(m: &CMat<T>, f: impl Fn(T) -> C<T>) -> CMat<T> {
    let (vals, vecs) = herm_eig(m);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let fl = f(l);
        for i in 0..n {
            scaled[(i, j)] *= fl;
        }
    }
    scaled * vecs.adjoint()
}

/// `λ^a` on the positive part of the spectrum, zero elsewhere (pseudo-power on the support).
pub fn support_power<T: Real>(l: T, a: T, cutoff: T) -> T {
    if l > cutoff {
        l.powf(a)
    } else {
        T::zero()
    }
}

/// `λ^w` for complex `w` on the support, zero elsewhere.
pub fn support_cpower<T: Real>(l: T, w: C<T>, cutoff: T) -> C<T> {
    if l > cutoff {
        let ln = l.ln();
        let modulus = (w.re * ln).exp();
        let phase = w.im * ln;
        C::new(modulus * phase.cos(), modulus * phase.sin())
    } else {
        C::new(T::zero(), T::zero())
    }
}

/// Thin SVD `m = U Σ V*` with singular values sorted descending.
pub struct Svd<T: Real> {
    pub u: CMat<T>,
    pub s: Vec<T>,
    pub v: CMat<T>,
}

/// One-sided Jacobi SVD. `U` and `V` have orthonormal columns even where the
/// singular values vanish.
pub fn svd<T: Real>(m: &CMat<T>) -> Svd<T> {
    let (r, c) = m.shape();
    if r.min(c) == 0 {
        return Svd {
            u: CMat::zeros(r, 0),
            s: Vec::new(),
            v: CMat::zeros(c, 0),
        };
    }
    if r < c {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let (work, v) = jacobi_columns(m);
    let norms: Vec<T> = (0..c)
        .map(|j| {
            work.column(j)
                .iter()
                .fold(T::zero(), |a, z| a + z.norm_sqr())
                .sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| {
        norms[b]
            .partial_cmp(&norms[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let smax = norms[order[0]];
    let tiny = smax * T::default_epsilon() * T::of(r as f64);
    let s: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let mut u = CMat::zeros(r, c);
    let mut missing = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        if norms[j] > tiny && norms[j] > T::zero() {
            let col = work.column(j) * cr(T::one() / norms[j]);
            u.set_column(k, &col);
        } else {
            missing.push(k);
        }
    }
    complete_columns(&mut u, &missing);
    let v = CMat::from_fn(c, c, |i, k| v[(i, order[k])]);
    Svd { u, s, v }
}

/// Rotate columns of `m` until they are mutually orthogonal; returns the rotated
/// matrix `m V` and the accumulated unitary `V`.
fn jacobi_columns<T: Real>(m: &CMat<T>) -> (CMat<T>, CMat<T>) {
    let (r, c) = m.shape();
    let mut u = m.clone();
    let mut v = CMat::identity(c, c);
    let eps = T::default_epsilon();
    let col_sq =
        |u: &CMat<T>, j: usize| u.column(j).iter().fold(T::zero(), |a, z| a + z.norm_sqr());
    // Columns this small carry no resolvable singular value.
    let negligible = (0..c).fold(T::zero(), |a, j| a + col_sq(m, j)) * eps * eps;
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha = col_sq(&u, p);
                let beta = col_sq(&u, q);
                let gamma = u.column(p).dotc(&u.column(q));
                let g = cabs(gamma);
                if alpha.min(beta) <= negligible || g <= eps * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma * cr(T::one() / g)).conj();
                let zeta = (beta - alpha) / (T::of(2.0) * g);
                let sign = if zeta >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut u, &mut v] {
                    for i in 0..mat.nrows() {
                        let a = mat[(i, p)];
                        let b = mat[(i, q)] * phase;
                        mat[(i, p)] = a * cr(cs) - b * cr(sn);
                        mat[(i, q)] = a * cr(sn) + b * cr(cs);
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    debug_assert_eq!(u.nrows(), r);
    (u, v)
}

/// Fill the listed columns with unit vectors orthogonal to all other columns.
fn complete_columns<T: Real>(u: &mut CMat<T>, missing: &[usize]) {
    let r = u.nrows();
    let mut filled: Vec<usize> = (0..u.ncols()).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0;
    for &k in missing {
        while candidate < r {
            let mut e = nalgebra::DVector::<C<T>>::zeros(r);
            e[candidate] = cr(T::one());
            candidate += 1;
            for _ in 0..2 {
                for &j in &filled {
                    let col = u.column(j).into_owned();
                    let proj = col.dotc(&e);
                    e -= col * proj;
                }
            }
            let n = e.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
            if n > T::of(0.5) {
                u.set_column(k, &(e * cr(T::one() / n)));
                filled.push(k);
                break;
            }
        }
    }
}

pub fn singular_values<T: Real>(m: &CMat<T>) -> Vec<T> {
    svd(m).s
}

pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a.kronecker(b)
}

pub fn frobenius<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

pub fn gaussian<T: Real, R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMat<T> {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C::new(T::of(re), T::of(im))
    })
}

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix.
pub fn random_unitary<T: Real, R: Rng>(n: usize, rng: &mut R) -> CMat<T> {
    let g = gaussian::<T, R>(n, n, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let nd = cabs(d);
        if nd > T::zero() {
            let phase = d / cr(nd);
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Group sorted eigenvalues into clusters whose members are within `tol` of a neighbour.
pub fn clusters<T: Real>(vals: &[T], tol: T) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=vals.len() {
        if k == vals.len() || (vals[k] - vals[k - 1]).abs() > tol {
            if k > start {
                out.push(start..k);
            }
            start = k;
        }
    }
    out
}

/// Orthogonal projection onto the span of the selected eigenvector columns.
pub fn column_projector<T: Real>(vecs: &CMat<T>, cols: std::ops::Range<usize>) -> CMat<T> {
    let sub = vecs.columns(cols.start, cols.len()).into_owned();
    &sub * sub.adjoint()
}
