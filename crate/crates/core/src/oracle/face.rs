use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{pi, Real};

/// Boundary data determining a homogeneous harmonic function on one face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum FaceData<T> {
    /// Values at the two corner rays `θ = 0` and `θ = θ_e`.
    Regular { rho0: T, rho1: T },
    /// Value at `θ = 0` and the coefficient of `sin(αθ)`, needed when `α θ_e ∈ πℤ`.
    Singular { rho0: T, c2: T },
}

fn check_polar<T: Real>(theta_e: T, r: T, theta: T) -> Result<()> {
    let slack = T::tol(1e-12) * theta_e.max(T::one());
    if !(theta_e > T::zero()) {
        return Err(Error::InvalidArgument(format!("face angle {theta_e} must be positive")));
    }
    if !(r >= T::zero()) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("radius {r} must be nonnegative")));
    }
    if !(theta >= -slack && theta <= theta_e + slack) {
        return Err(Error::InvalidArgument(format!("angle {theta} is outside [0, {theta_e}]")));
    }
    Ok(())
}

fn singular_face<T: Real>(theta_e: T, alpha: T) -> bool {
    (alpha * theta_e).sin().abs() <= T::tol(1e-12)
}

/// The coefficients `(c₁, c₂)` with `ρ(θ) = c₁ cos(αθ) + c₂ sin(αθ)`.
pub fn face_coefficients<T: Real>(data: FaceData<T>, theta_e: T, alpha: T) -> Result<(T, T)> {
    match data {
        FaceData::Regular { rho0, rho1 } => {
            if singular_face(theta_e, alpha) {
                return Err(Error::SingularAlpha {
                    alpha: alpha.as_f64(),
                    singular: alpha.as_f64(),
                    guard: T::tol(1e-12).as_f64(),
                    edge: format!("face of angle {theta_e}"),
                });
            }
            let (s, c) = (alpha * theta_e).sin_cos();
            Ok((rho0, (rho1 - rho0 * c) / s))
        }
        FaceData::Singular { rho0, c2 } => Ok((rho0, c2)),
    }
}

/// `u(r, θ) = r^α (c₁ cos(αθ) + c₂ sin(αθ))` on the sector `0 ≤ θ ≤ θ_e`.
pub fn evaluate_face<T: Real>(data: FaceData<T>, theta_e: T, alpha: T, r: T, theta: T) -> Result<T> {
    check_polar(theta_e, r, theta)?;
    let (c1, c2) = face_coefficients(data, theta_e, alpha)?;
    let (s, c) = (alpha * theta).sin_cos();
    Ok(r.powf(alpha) * (c1 * c + c2 * s))
}

/// The homogeneous harmonic map of degree `α` from the sector of angle `θ_e`
/// onto the sector of angle `φ_e` sending the ray `θ = 0` to the ray `0` with
/// factor `ρ_i` and the ray `θ_e` to the ray `φ_e` with factor `ρ_j`.
pub fn evaluate_face_map<T: Real>(
    rho_i: T,
    rho_j: T,
    theta_e: T,
    phi_e: T,
    alpha: T,
    r: T,
    theta: T,
) -> Result<(T, T)> {
    check_polar(theta_e, r, theta)?;
    let phase = alpha * theta_e;
    if !(phase > T::zero() && phase < pi::<T>()) {
        return Err(Error::InvalidArgument(format!("alpha * theta_e = {phase} must lie in (0, pi)")));
    }
    if !(phi_e > T::zero() && phi_e < pi::<T>()) {
        return Err(Error::InvalidArgument(format!("target angle {phi_e} must lie in (0, pi)")));
    }
    if !(rho_i >= T::zero() && rho_j >= T::zero()) || (rho_i == T::zero() && rho_j == T::zero()) {
        return Err(Error::InvalidArgument("corner factors must be nonnegative and not both zero".into()));
    }
    let (se, ce) = phase.sin_cos();
    let (sp, cp) = phi_e.sin_cos();
    let (s, c) = (alpha * theta).sin_cos();
    let chi = rho_i * c + (rho_j * cp - rho_i * ce) / se * s;
    let eta = rho_j * sp * s / se;
    let scale = r.powf(alpha);
    Ok((scale * chi, scale * eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    #[test]
    fn closed_form_values() {
        let (te, a) = (1.1_f64, 1.7);
        for th in [0.0, 0.3, 0.9, te] {
            let u = evaluate_face(FaceData::Regular { rho0: 1.0, rho1: (a * te).cos() }, te, a, 1.0, th).unwrap();
            assert!((u - (a * th).cos()).abs() < 1e-14);
            let u = evaluate_face(FaceData::Regular { rho0: 0.0, rho1: (a * te).sin() }, te, a, 1.0, th).unwrap();
            assert!((u - (a * th).sin()).abs() < 1e-14);
        }
        let u = evaluate_face(FaceData::Regular { rho0: 1.0, rho1: 0.0 }, FRAC_PI_2, 1.0, 2.0, FRAC_PI_4).unwrap();
        assert!((u - SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn singular_face_needs_singular_data() {
        let te = 1.0_f64;
        let a = std::f64::consts::PI;
        assert!(evaluate_face(FaceData::Regular { rho0: 1.0, rho1: -1.0 }, te, a, 1.0, 0.5).is_err());
        let u = evaluate_face(FaceData::Singular { rho0: 1.0, c2: 2.0 }, te, a, 1.0, 0.5).unwrap();
        assert!((u - 2.0).abs() < 1e-14);
    }

    #[test]
    fn map_boundary_rays() {
        let (te, pe, a) = (1.2_f64, 0.8, 1.3);
        let (x, y) = evaluate_face_map(0.7, 1.9, te, pe, a, 1.5, 0.0).unwrap();
        assert!((x - 1.5_f64.powf(a) * 0.7).abs() < 1e-13 && y.abs() < 1e-13);
        let (x, y) = evaluate_face_map(0.7, 1.9, te, pe, a, 1.5, te).unwrap();
        let s = 1.5_f64.powf(a) * 1.9;
        assert!((x - s * pe.cos()).abs() < 1e-12 && (y - s * pe.sin()).abs() < 1e-12);
        let (x, y) = evaluate_face_map(1.0, 1.0, FRAC_PI_2, FRAC_PI_2, 1.0, 1.0, FRAC_PI_4).unwrap();
        assert!((x - FRAC_PI_4.cos()).abs() < 1e-14 && (y - FRAC_PI_4.sin()).abs() < 1e-14);
    }

    #[test]
    fn map_rejects_bad_parameters() {
        assert!(evaluate_face_map(1.0_f64, 1.0, 1.0, 1.0, 4.0, 1.0, 0.5).is_err());
        assert!(evaluate_face_map(-1.0_f64, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5).is_err());
        assert!(evaluate_face_map(0.0_f64, 0.0, 1.0, 1.0, 1.0, 1.0, 0.5).is_err());
        assert!(evaluate_face_map(1.0_f64, 1.0, 1.0, 1.0, 1.0, 1.0, 1.5).is_err());
    }
}
