//! Modular flow, Connes cocycles and the self-polar form. In finite
//! dimensions every analytic continuation is exact functional calculus on
//! the densities.

use crate::algebra::{BlockMatrix, State};
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::state_power;
use crate::scalar::{atol, Real, C};

/// `ρ^{iz}` on the support of ρ.
pub fn imaginary_power<T: Real>(phi: &State<T>, z: C<T>) -> BlockMatrix<T> {
    let cutoff = phi.support_cutoff();
    // i·z = −Im z + i Re z
    let w = C::new(-z.im, z.re);
    phi.density()
        .herm_apply_c(|l| linalg::support_cpower(l, w, cutoff))
}

/// `log ρ` on the support of ρ, zero elsewhere.
pub fn modular_generator<T: Real>(phi: &State<T>) -> BlockMatrix<T> {
    let cutoff = phi.support_cutoff();
    phi.density()
        .herm_apply(|l| if l > cutoff { l.ln() } else { T::zero() })
}

/// `σ_t^φ(x) = ρ^{it} x ρ^{−it}`.
pub fn modular_automorphism<T: Real>(
    phi: &State<T>,
    t: T,
    x: &BlockMatrix<T>,
) -> Result<BlockMatrix<T>> {
    phi.require_faithful()?;
    phi.algebra()
        .check_same(x.algebra(), "modular automorphism")?;
    let u = imaginary_power(phi, C::new(t, T::zero()));
    Ok(&(&u * x) * &u.adjoint())
}

/// `(Dψ:Dφ)_z = ρ_ψ^{iz} ρ_φ^{−iz}`, powers taken on supports.
pub fn connes_cocycle<T: Real>(psi: &State<T>, phi: &State<T>, z: C<T>) -> Result<BlockMatrix<T>> {
    psi.algebra().check_same(phi.algebra(), "cocycle")?;
    let sp = psi.support().into_element();
    let sf = phi.support().into_element();
    if sp.distance(&(&sf * &sp)) > atol::<T>(psi.algebra().total_dim()) {
        return Err(Error::SupportViolation);
    }
    phi.require_faithful()?;
    let a = imaginary_power(psi, z);
    let b = imaginary_power(phi, -z);
    Ok(&a * &b)
}

/// `d = ρ_φ^{−1/p} ρ_ψ^{1/p}`, the element with `φ^{1/p} d = ψ^{1/p}`.
pub fn density_transport<T: Real>(phi: &State<T>, psi: &State<T>, p: T) -> Result<BlockMatrix<T>> {
    phi.require_faithful()?;
    phi.algebra()
        .check_same(psi.algebra(), "density transport")?;
    crate::lp::check_exponent(p)?;
    let inv = phi.power(-T::one() / p);
    let d = &inv * &psi.power(T::one() / p);
    let lhs = &state_power(phi, T::one() / p)?.into_data() * &d;
    let rhs = state_power(psi, T::one() / p)?.into_data();
    let scale = d.operator_norm().max(T::one());
    if lhs.distance(&rhs) > atol::<T>(phi.algebra().total_dim()) * scale {
        return Err(Error::DataInvalid(format!(
            "transport residual {:e}",
            lhs.distance(&rhs).as_f64()
        )));
    }
    Ok(d)
}

/// `s_φ(x, y) = Tr(ρ^{1/2} x ρ^{1/2} y*)`.
pub fn selfpolar_form<T: Real>(phi: &State<T>, x: &BlockMatrix<T>, y: &BlockMatrix<T>) -> C<T> {
    let r = phi.power(T::of(0.5));
    (&(&(&r * x) * &r) * &y.adjoint()).trace()
}
