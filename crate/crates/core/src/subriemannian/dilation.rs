use crate::error::{Error, Result};
use crate::heisenberg::HeisPoint;

fn check_factor(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("dilation factor must be finite and > 0, got {t}")))
    }
}

/// Graded dilation `(x, y, z) ↦ (tx, ty, t²z)`, a group automorphism.
pub fn dilate(p: &HeisPoint, t: f64) -> Result<HeisPoint> {
    check_factor(t)?;
    Ok(HeisPoint::new(t * p.x, t * p.y, t * t * p.z))
}

/// Isotropic dilation `(x, y, z) ↦ (tx, ty, tz)`.
pub fn euclidean_dilate(p: [f64; 3], t: f64) -> Result<[f64; 3]> {
    check_factor(t)?;
    Ok(p.map(|c| t * c))
}
