//! Closed-form relations of the electrode front end: the skin/plate input
//! divider, the diode bias network, the first-stage gain and the Miller
//! neutralization of the amplifier input capacitance.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::params::CircuitParams;

fn parallel<T: Scalar>(a: T, b: T) -> T {
    if a.is_infinite() {
        b
    } else if b.is_infinite() {
        a
    } else {
        a * b / (a + b)
    }
}

/// Attenuation from the skin surface to the amplifier input.
///
/// Quasi-static form: the resistive divider of the skin resistance against
/// `Rin ∥ Rbias`, times the capacitive divider `Cs / (Cs + Cin)`. The result
/// is real in this approximation but returned as a complex factor so callers
/// can chain it with frequency-domain quantities.
pub fn input_divider<T: Scalar>(p: &CircuitParams<T>, f: T) -> Result<Complex<T>> {
    if !(f > T::zero()) {
        return Err(Error::param("f", "must be > 0"));
    }
    p.validate()?;
    let r_load = parallel(p.rin, p.bias_resistance());
    let resistive = r_load / (r_load + p.rs);
    let capacitive = p.cs / (p.cs + p.cin);
    Ok(Complex::new(resistive * capacitive, T::zero()))
}

/// Small-signal resistance of the anti-parallel diode pair from the voltage
/// across it and the two diode currents.
pub fn diode_pair_resistance<T: Scalar>(v1: T, v2: T, id1: T, id2: T) -> Result<T> {
    let total = id1 + id2;
    if total == T::zero() {
        return Err(Error::DivisionByZero(
            "diode currents sum to zero".to_string(),
        ));
    }
    Ok((v1 - v2) / total)
}

/// Bootstrapped bias resistance, exact and large-`Rd` approximate forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasResistance<T> {
    pub exact: T,
    pub approximate: T,
}

pub fn bias_resistance<T: Scalar>(rb: T, rc: T, rd: T) -> Result<BiasResistance<T>> {
    if !(rb > T::zero()) {
        return Err(Error::param("Rb", "must be > 0"));
    }
    if !(rc > T::zero()) {
        return Err(Error::param("Rc", "must be > 0"));
    }
    if !(rd >= T::zero()) {
        return Err(Error::param("Rd", "must be >= 0"));
    }
    let boost = rd * rb / rc;
    Ok(BiasResistance {
        exact: rb + rd + boost,
        approximate: boost,
    })
}

/// Magnitude of the non-inverting first-stage gain `1 + Rf1 / (Rf2 + Z_Cf1)`.
/// At DC the series capacitor is open and the stage is a follower.
pub fn first_stage_gain<T: Scalar>(rf1: T, rf2: T, cf1: T, f: T) -> T {
    if f <= T::zero() {
        return T::one();
    }
    let w = T::TAU() * f;
    let z_cf1 = Complex::new(T::zero(), -T::one() / (w * cf1));
    let g = Complex::new(T::one(), T::zero()) + Complex::new(rf1, T::zero()) / (z_cf1 + rf2);
    g.norm()
}

/// Input capacitance after neutralization. Negative values mean the
/// feedback over-compensates; they are returned unchanged with the flag set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputCapacitance<T> {
    pub farads: T,
    pub over_neutralized: bool,
}

pub fn neutralized_input_capacitance<T: Scalar>(
    cin: T,
    av: T,
    rn1: T,
    rn2: T,
    cn: T,
) -> InputCapacitance<T> {
    let alpha = rn2 / (rn1 + rn2);
    let farads = cin - (av * alpha - T::one()) * cn;
    InputCapacitance {
        farads,
        over_neutralized: farads < T::zero(),
    }
}

/// Neutralization capacitor that makes the effective input capacitance
/// exactly zero: `Cn = Cin / (Av·α − 1)`.
pub fn cancellation_capacitance<T: Scalar>(cin: T, av: T, alpha: T) -> Result<T> {
    let loop_gain = av * alpha - T::one();
    if !(loop_gain > T::zero()) {
        return Err(Error::param(
            "alpha",
            "Av·α must exceed 1 for positive-feedback neutralization",
        ));
    }
    Ok(cin / loop_gain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn divider_equal_caps_no_series_resistance() {
        let p = CircuitParams::<f64> {
            cs: 10e-12,
            cin: 10e-12,
            rs: 0.0,
            ..Default::default()
        };
        let k = input_divider(&p, 10.0).unwrap();
        assert_relative_eq!(k.re, 0.5, epsilon = 1e-15);
        assert_eq!(k.im, 0.0);
    }

    #[test]
    fn divider_capacitive_ratio() {
        let p = CircuitParams::<f64> {
            cs: 100e-12,
            cin: 10e-12,
            rs: 0.0,
            ..Default::default()
        };
        let k = input_divider(&p, 1.0).unwrap();
        assert_relative_eq!(k.re, 100.0 / 110.0, epsilon = 1e-12);
    }

    #[test]
    fn divider_large_cs_limit_is_resistive_part() {
        let p = CircuitParams::<f64> {
            cs: 1e6,
            rs: 1e11,
            rin: 1e13,
            ..Default::default()
        };
        let rbias = p.bias_resistance();
        let load = p.rin * rbias / (p.rin + rbias);
        let k = input_divider(&p, 1.0).unwrap();
        assert_relative_eq!(k.re, load / (load + p.rs), max_relative = 1e-12);
        assert!(k.norm() > 0.0 && k.norm() <= 1.0);
    }

    #[test]
    fn divider_rejects_bad_inputs() {
        let p = CircuitParams::<f64>::default();
        assert!(input_divider(&p, 0.0).is_err());
        let bad = p.with_cs(0.0);
        assert!(input_divider(&bad, 1.0).is_err());
    }

    #[test]
    fn diode_resistance_values() {
        let r = diode_pair_resistance(1e-3, 0.0, 10e-15, 10e-15).unwrap();
        assert_relative_eq!(r, 50e9, max_relative = 1e-12);
        assert_eq!(diode_pair_resistance(0.3, 0.3, 1e-12, 0.0).unwrap(), 0.0);
        let r = diode_pair_resistance(2e-3, 0.0, 0.5e-12, 0.5e-12).unwrap();
        assert_relative_eq!(r, 2e9, max_relative = 1e-12);
        assert!(matches!(
            diode_pair_resistance(1.0, 0.0, 1e-12, -1e-12),
            Err(Error::DivisionByZero(_))
        ));
    }

    #[test]
    fn bias_resistance_values() {
        let b = bias_resistance(1e6, 1e6, 50e9).unwrap();
        assert_relative_eq!(b.exact, 1e6 + 100e9, max_relative = 1e-15);
        assert_relative_eq!(b.approximate, 50e9, max_relative = 1e-15);

        let b = bias_resistance(1e6, 1e4, 50e9).unwrap();
        assert_relative_eq!(b.approximate, 5e12, max_relative = 1e-15);
        assert!(b.exact >= b.approximate);

        let b = bias_resistance(1e6, 1e4, 0.0).unwrap();
        assert_eq!(b.exact, 1e6);
        assert_eq!(b.approximate, 0.0);
        assert!(bias_resistance(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn first_stage_gain_values() {
        let g: f64 = first_stage_gain(1e6, 100e3, 100e-6, 10.0);
        assert!((g - 11.0).abs() < 1e-3, "{g}");
        for f in [0.0, 0.1, 10.0, 1e4] {
            assert_eq!(first_stage_gain(0.0, 100e3, 100e-6, f), 1.0);
        }
        assert_eq!(first_stage_gain(1e6, 100e3, 100e-6, 0.0), 1.0);
        assert!(first_stage_gain(1e6, 100e3, 100e-6, 1e-6) < 1.001);
    }

    #[test]
    fn neutralization_values() {
        // Av·α = 1: Miller term vanishes.
        let c = neutralized_input_capacitance(10e-12, 5.0, 4.0, 1.0, 7e-12);
        assert_relative_eq!(c.farads, 10e-12, max_relative = 1e-12);

        let c = neutralized_input_capacitance(10e-12, 11.0, 800e3, 200e3, 10e-12);
        assert_relative_eq!(c.farads, -2e-12, max_relative = 1e-9);
        assert!(c.over_neutralized);

        let cn: f64 = cancellation_capacitance(10e-12, 11.0, 0.2).unwrap();
        let c = neutralized_input_capacitance(10e-12, 11.0, 800e3, 200e3, cn);
        assert!(c.farads.abs() < 1e-25);
        assert!(cancellation_capacitance(10e-12, 11.0, 0.05).is_err());
    }
}
