use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::formulas;

/// Component values of the non-contact electrode front end.
///
/// All resistances are in ohms, all capacitances in farads. The defaults
/// describe the reference design: a gain-of-11 first stage with bootstrapped
/// diode biasing and input-capacitance neutralization tuned for exact
/// cancellation, followed by a 0.07 Hz high-pass and a 250 Hz low-pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams<T> {
    /// Source (coupling) capacitance between skin and plate.
    pub cs: T,
    /// Skin interface resistance.
    pub rs: T,
    /// Amplifier input resistance. `+inf` models an ideal input.
    pub rin: T,
    /// Amplifier input capacitance.
    pub cin: T,
    /// Small-signal resistance of the anti-parallel diode pair.
    pub rd: T,
    /// Bootstrap resistors.
    pub rb: T,
    pub rc: T,
    /// First-stage feedback network.
    pub rf1: T,
    pub rf2: T,
    pub cf1: T,
    /// Neutralization divider and capacitor.
    pub rn1: T,
    pub rn2: T,
    pub cn: T,
    /// Second-stage high-pass.
    pub r2: T,
    pub c2: T,
    /// Second-stage low-pass.
    pub r3: T,
    pub c3: T,
    pub neutralization_enabled: bool,
}

impl<T: Scalar> Default for CircuitParams<T> {
    fn default() -> Self {
        let cin = T::lit(10e-12);
        let rf1 = T::lit(1e6);
        let rf2 = T::lit(100e3);
        let rn1 = T::lit(800e3);
        let rn2 = T::lit(200e3);
        let av = T::one() + rf1 / rf2;
        let alpha = rn2 / (rn1 + rn2);
        let cn = cin / (av * alpha - T::one());
        CircuitParams {
            cs: T::lit(100e-12),
            rs: T::lit(1e3),
            rin: T::infinity(),
            cin,
            rd: T::lit(50e9),
            rb: T::lit(1e6),
            rc: T::lit(10e3),
            rf1,
            rf2,
            cf1: T::lit(100e-6),
            rn1,
            rn2,
            cn,
            r2: T::lit(240e3),
            c2: T::lit(10e-6),
            r3: T::lit(1.0 / (2.0 * std::f64::consts::PI * 250.0 * 10e-9)),
            c3: T::lit(10e-9),
            neutralization_enabled: true,
        }
    }
}

/// Display name and value of every component, in schematic order.
pub(crate) fn named_values<T: Scalar>(p: &CircuitParams<T>) -> [(&'static str, T); 17] {
    [
        ("Cs", p.cs),
        ("Rs", p.rs),
        ("Rin", p.rin),
        ("Cin", p.cin),
        ("Rd", p.rd),
        ("Rb", p.rb),
        ("Rc", p.rc),
        ("Rf1", p.rf1),
        ("Rf2", p.rf2),
        ("Cf1", p.cf1),
        ("Rn1", p.rn1),
        ("Rn2", p.rn2),
        ("Cn", p.cn),
        ("R2", p.r2),
        ("C2", p.c2),
        ("R3", p.r3),
        ("C3", p.c3),
    ]
}

impl<T: Scalar> CircuitParams<T> {
    /// Checks every component value. `Rs` and `Rd` may be zero (ideal
    /// contact, shorted diodes); `Rin` may be infinite; everything else must
    /// be finite and strictly positive.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in named_values(self) {
            if v.is_nan() {
                return Err(Error::param(name, "must be a number"));
            }
            match name {
                "Rs" | "Rd" => {
                    if v < T::zero() || v.is_infinite() {
                        return Err(Error::param(name, "must be finite and >= 0"));
                    }
                }
                "Rin" => {
                    if v <= T::zero() {
                        return Err(Error::param(name, "must be > 0 (inf allowed)"));
                    }
                }
                _ => {
                    if v <= T::zero() || v.is_infinite() {
                        return Err(Error::param(name, "must be finite and > 0"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Neutralization feedback ratio `Rn2 / (Rn1 + Rn2)`.
    pub fn alpha(&self) -> T {
        self.rn2 / (self.rn1 + self.rn2)
    }

    /// Mid-band first-stage gain `1 + Rf1/Rf2`.
    pub fn first_stage_midband_gain(&self) -> T {
        T::one() + self.rf1 / self.rf2
    }

    /// Exact bootstrap bias resistance.
    pub fn bias_resistance(&self) -> T {
        // Inputs come from validated params, so this cannot fail.
        formulas::bias_resistance(self.rb, self.rc, self.rd)
            .map(|b| b.exact)
            .unwrap_or_else(|_| T::nan())
    }

    /// Input capacitance seen by the source after (optional) neutralization.
    pub fn effective_input_capacitance(&self) -> formulas::InputCapacitance<T> {
        if self.neutralization_enabled {
            formulas::neutralized_input_capacitance(
                self.cin,
                self.first_stage_midband_gain(),
                self.rn1,
                self.rn2,
                self.cn,
            )
        } else {
            formulas::InputCapacitance {
                farads: self.cin,
                over_neutralized: false,
            }
        }
    }

    /// Returns a copy with `Cn` set so the neutralized input capacitance is
    /// exactly zero for the current divider and first-stage gain.
    pub fn with_exact_cancellation(mut self) -> Result<Self> {
        self.cn = formulas::cancellation_capacitance(
            self.cin,
            self.first_stage_midband_gain(),
            self.alpha(),
        )?;
        self.neutralization_enabled = true;
        Ok(self)
    }

    pub fn with_cs(mut self, cs: T) -> Self {
        self.cs = cs;
        self
    }

    pub fn with_neutralization(mut self, enabled: bool) -> Self {
        self.neutralization_enabled = enabled;
        self
    }

    /// High-pass corner of the second stage, Hz.
    pub fn hpf_corner_hz(&self) -> T {
        T::one() / (T::TAU() * self.r2 * self.c2)
    }

    /// Low-pass corner of the second stage, Hz.
    pub fn lpf_corner_hz(&self) -> T {
        T::one() / (T::TAU() * self.r3 * self.c3)
    }
}
