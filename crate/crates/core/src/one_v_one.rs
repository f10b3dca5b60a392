//! Complete-information game between the Turret and a single attacker.
//!
//! The barrier is the zero level set of `V(r, θ_rel; ν) = |θ_rel| + F(1; ν) − F(r; ν)`
//! with `F(r; ν) = sqrt((r/ν)² − 1) − acos(ν/r)`. Negative values are
//! Turret-winning.

use crate::circle::{Arc, ArcSet};
use crate::error::{GameError, Result};
use crate::scalar::{sgn, Scalar};
use crate::state::{AttackerControl, AttackerPolar};

/// `F(r; ν)`, defined for `r ≥ ν`.
pub fn f_barrier<T: Scalar>(r: T, nu: T) -> Result<T> {
    if !(r >= nu) || nu <= T::zero() {
        return Err(GameError::Domain {
            r: r.to_f64_lossy(),
            nu: nu.to_f64_lossy(),
        });
    }
    let q = r / nu;
    let root = (q * q - T::one()).max(T::zero()).sqrt();
    let ratio = (nu / r).min(T::one());
    Ok(root - ratio.acos())
}

/// `∂F/∂r = sqrt(1/ν² − 1/r²)`.
pub fn f_barrier_dr<T: Scalar>(r: T, nu: T) -> T {
    (T::one() / (nu * nu) - T::one() / (r * r)).max(T::zero()).sqrt()
}

/// Value of the one-attacker game of kind.
pub fn v_1v1<T: Scalar>(r: T, theta_rel: T, nu: T) -> Result<T> {
    Ok(theta_rel.abs() + f_barrier(T::one(), nu)? - f_barrier(r, nu)?)
}

/// Half-width of the Turret-winning arc around an attacker at radius `r`.
pub fn w_1v1<T: Scalar>(r: T, nu: T) -> Result<T> {
    if r < T::one() {
        return Err(GameError::Domain {
            r: r.to_f64_lossy(),
            nu: nu.to_f64_lossy(),
        });
    }
    Ok(f_barrier(r, nu)? - f_barrier(T::one(), nu)?)
}

/// Turret-winning region `{θ_T : |θ_A − θ_T| ≤ w_1v1(r_A; ν)}`.
///
/// An attacker inside the unit circle has already breached, so its region is empty.
pub fn region_1v1<T: Scalar>(a: &AttackerPolar<T>, nu: T) -> ArcSet<T> {
    match w_1v1(a.r, nu) {
        Ok(w) => ArcSet::from_arc(Arc::new(a.theta.value(), w)),
        Err(_) => ArcSet::empty(),
    }
}

/// Equilibrium attacker control: full speed toward the tangent point of the
/// circle of radius `ν`, turning away from the Turret.
pub fn attacker_1v1_heading<T: Scalar>(r: T, theta_rel: T, nu: T) -> AttackerControl<T> {
    let s = (nu / r).min(T::one());
    AttackerControl::new(nu, sgn(theta_rel) * s.asin())
}

/// Equilibrium Turret rate: turn toward the attacker at full rate.
pub fn turret_1v1_rate<T: Scalar>(theta_rel: T) -> T {
    sgn(theta_rel)
}

/// Rate of the winning-region boundary on the Turret's side of an attacker
/// moving with speed `v` and heading `phi` (sign chosen for an attacker CCW of
/// the Turret).
pub fn lb_boundary_rate<T: Scalar>(r: T, phi: T, v: T, nu: T) -> T {
    v * phi.sin() / r + v * phi.cos() * f_barrier_dr(r, nu)
}

/// Time for an attacker at radius `r` to breach along the tangent heading at speed `ν`.
pub fn time_to_breach<T: Scalar>(r: T, nu: T) -> T {
    let a = (r * r - nu * nu).max(T::zero()).sqrt();
    let b = (T::one() - nu * nu).max(T::zero()).sqrt();
    ((a - b) / nu).max(T::zero())
}
