use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Electrode plate area used when none is given, m² (2 cm × 2 cm).
pub const DEFAULT_PLATE_AREA_M2: f64 = 4e-4;

/// Parallel-plate coupling capacitance of a plate of `area` m² separated
/// from the skin by an insulator of `thickness` m and relative permittivity
/// `eps_r`.
pub fn insulation_to_capacitance<T: Scalar>(thickness: T, area: T, eps_r: T) -> Result<T> {
    for (name, v) in [("thickness", thickness), ("area", area), ("eps_r", eps_r)] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::param(name, "must be finite and > 0"));
        }
    }
    Ok(T::lit(EPSILON_0) * eps_r * area / thickness)
}
