//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All matrices are complex with real part `T`. The tolerance constants are
//! attached to the scalar because a threshold that is sensible for `f64`
//! eigensolvers is meaningless for `f32`.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Complex entries of every block matrix.
pub type C<T> = nalgebra::Complex<T>;

/// Real scalar type the algebra is built over.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {
    /// Base absolute tolerance; multiplied by the dimension scale.
    const ATOL_BASE: f64;
    /// Minimum eigenvalue for a state to count as faithful.
    const EPS_FAITHFUL: f64;
    /// Relative singular-value cutoff for supports and partial isometries.
    const RANK_RTOL: f64;
    /// Eigenvalues closer than this are one spectral projection.
    const CLUSTER_TOL: f64;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Real for f64 {
    const ATOL_BASE: f64 = 1e-9;
    const EPS_FAITHFUL: f64 = 1e-8;
    const RANK_RTOL: f64 = 1e-10;
    const CLUSTER_TOL: f64 = 1e-8;
}

impl Real for f32 {
    const ATOL_BASE: f64 = 1e-4;
    const EPS_FAITHFUL: f64 = 1e-4;
    const RANK_RTOL: f64 = 1e-5;
    const CLUSTER_TOL: f64 = 1e-4;
}

/// `re + 0i`.
#[inline]
pub fn cr<T: Real>(re: T) -> C<T> {
    C::new(re, T::zero())
}

/// Build a complex scalar from two `f64` parts.
#[inline]
pub fn cf<T: Real>(re: f64, im: f64) -> C<T> {
    C::new(T::of(re), T::of(im))
}

/// Absolute tolerance for an object of the given vectorized dimension.
pub fn atol<T: Real>(total_dim: usize) -> T {
    T::of(T::ATOL_BASE * (total_dim.max(1) as f64))
}

/// Modulus of a complex scalar, computed without underflow.
#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.re.hypot(z.im)
}
