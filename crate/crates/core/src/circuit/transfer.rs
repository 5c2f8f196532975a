use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::params::CircuitParams;
use super::poly::Polynomial;

/// `H(s) = N(s) / D(s)` with real coefficients in ascending powers of `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTransferFunction<T> {
    num: Polynomial<T>,
    den: Polynomial<T>,
}

impl<T: Scalar> RationalTransferFunction<T> {
    pub fn new(num: Vec<T>, den: Vec<T>) -> Result<Self> {
        Self::from_polys(Polynomial::new(num), Polynomial::new(den))
    }

    pub fn from_polys(num: Polynomial<T>, den: Polynomial<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::param("denominator", "must be non-zero"));
        }
        if num.degree() > den.degree() && !num.is_zero() {
            return Err(Error::param(
                "numerator",
                "degree must not exceed denominator degree",
            ));
        }
        if num
            .coeffs()
            .iter()
            .chain(den.coeffs())
            .any(|c| !c.is_finite())
        {
            return Err(Error::param("coefficients", "must be finite"));
        }
        Ok(RationalTransferFunction { num, den })
    }

    /// Frequency-independent gain.
    pub fn constant(k: T) -> Self {
        RationalTransferFunction {
            num: Polynomial::constant(k),
            den: Polynomial::constant(T::one()),
        }
    }

    pub fn numerator(&self) -> &[T] {
        self.num.coeffs()
    }

    pub fn denominator(&self) -> &[T] {
        self.den.coeffs()
    }

    pub fn num_poly(&self) -> &Polynomial<T> {
        &self.num
    }

    pub fn den_poly(&self) -> &Polynomial<T> {
        &self.den
    }

    pub fn eval(&self, s: Complex<T>) -> Complex<T> {
        self.num.eval(s) / self.den.eval(s)
    }

    /// `H(j·2πf)`.
    pub fn eval_hz(&self, f: T) -> Complex<T> {
        self.eval(Complex::new(T::zero(), T::TAU() * f))
    }

    pub fn magnitude_hz(&self, f: T) -> T {
        self.eval_hz(f).norm()
    }

    /// Series connection `self · other`.
    pub fn cascade(&self, other: &Self) -> Self {
        RationalTransferFunction {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
    }

    pub fn poles(&self) -> Vec<Complex<T>> {
        self.den.roots()
    }

    pub fn zeros(&self) -> Vec<Complex<T>> {
        if self.num.is_zero() {
            Vec::new()
        } else {
            self.num.roots()
        }
    }

    /// Ratio of the highest-order coefficients, so that
    /// `H(s) = gain · Π(s − zᵢ) / Π(s − pⱼ)`.
    pub fn zpk_gain(&self) -> T {
        self.num.leading() / self.den.leading()
    }

    /// True when every pole lies strictly in the left half-plane.
    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.re < T::zero())
    }
}

fn first_stage_parts<T: Scalar>(p: &CircuitParams<T>) -> Result<(T, T, T, T)> {
    p.validate()?;
    let c_in = p.effective_input_capacitance();
    if c_in.over_neutralized {
        log::warn!(
            "neutralized input capacitance is negative ({:e} F): over-neutralized",
            c_in.farads.as_f64()
        );
    }
    let c_total = p.cs + c_in.farads;
    if !(c_total > T::zero()) {
        return Err(Error::ModelValidity(format!(
            "Cs + C'in = {:e} F must be positive",
            c_total.as_f64()
        )));
    }
    let a = p.cf1 * (p.rf1 + p.rf2);
    let b = p.cf1 * p.rf2;
    let g = T::one() / p.bias_resistance();
    Ok((a, b, c_total, g))
}

fn second_stage<T: Scalar>(p: &CircuitParams<T>) -> RationalTransferFunction<T> {
    let hpf = RationalTransferFunction {
        num: Polynomial::new(vec![T::zero(), T::one()]),
        den: Polynomial::new(vec![T::one() / (p.r2 * p.c2), T::one()]),
    };
    let lpf = RationalTransferFunction {
        num: Polynomial::constant(T::one()),
        den: Polynomial::new(vec![T::one(), p.r3 * p.c3]),
    };
    hpf.cascade(&lpf)
}

/// Full front-end transfer function from skin potential to output.
///
/// First stage (coupling, bias network and feedback):
///
/// ```text
///                 s·Cs·[s·Cf1·(Rf1+Rf2) + 1]
/// ─────────────────────────────────────────────────────────
///  s·(Cs + C'in)·(s·Cf1·Rf2 + 1) + (s·Cf1·Rf2 + 1) / Rbias
/// ```
///
/// cascaded with `s / (s + 1/(R2·C2))` and `1 / (1 + s·R3·C3)`. `Rbias` is
/// the exact bootstrap resistance; `C'in` is the neutralized capacitance
/// when neutralization is enabled and `Cin` otherwise.
pub fn build_transfer_function<T: Scalar>(
    p: &CircuitParams<T>,
) -> Result<RationalTransferFunction<T>> {
    let (a, b, c, g) = first_stage_parts(p)?;
    let num = Polynomial::new(vec![T::zero(), p.cs, p.cs * a]);
    let bs1 = Polynomial::new(vec![T::one(), b]);
    let den = Polynomial::new(vec![T::zero(), c])
        .mul(&bs1)
        .add(&bs1.scale(g));
    let first = RationalTransferFunction::from_polys(num, den)?;
    Ok(first.cascade(&second_stage(p)))
}

/// Skin potential to amplifier input node: `s·Cs / (s·(Cs + C'in) + 1/Rbias)`.
pub fn coupling_transfer_function<T: Scalar>(
    p: &CircuitParams<T>,
) -> Result<RationalTransferFunction<T>> {
    let (_, _, c, g) = first_stage_parts(p)?;
    RationalTransferFunction::new(vec![T::zero(), p.cs], vec![g, c])
}

/// Current injected at the input node to node voltage (ohms):
/// `1 / (s·(Cs + C'in) + 1/Rbias)`.
pub fn input_node_impedance<T: Scalar>(
    p: &CircuitParams<T>,
) -> Result<RationalTransferFunction<T>> {
    let (_, _, c, g) = first_stage_parts(p)?;
    RationalTransferFunction::new(vec![T::one()], vec![g, c])
}

/// Amplifier input node to output: first-stage gain and both filters.
pub fn amplifier_transfer_function<T: Scalar>(
    p: &CircuitParams<T>,
) -> Result<RationalTransferFunction<T>> {
    let (a, b, _, _) = first_stage_parts(p)?;
    let stage = RationalTransferFunction::new(vec![T::one(), a], vec![T::one(), b])?;
    Ok(stage.cascade(&second_stage(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_improper() {
        assert!(RationalTransferFunction::new(vec![0.0, 0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(RationalTransferFunction::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn default_midband_gain_is_about_eleven() {
        let tf = build_transfer_function(&CircuitParams::<f64>::default()).unwrap();
        let g = tf.magnitude_hz(10.0);
        assert!((g - 11.0).abs() / 11.0 < 0.01, "{g}");
        assert!(tf.is_stable());
        assert_eq!(tf.numerator().len(), 4);
        assert_eq!(tf.denominator().len(), 5);
    }

    #[test]
    fn uncompensated_small_cs_divides() {
        let p = CircuitParams::<f64>::default()
            .with_cs(5e-12)
            .with_neutralization(false);
        let tf = build_transfer_function(&p).unwrap();
        let g = tf.magnitude_hz(10.0);
        assert!((g - 11.0 * 5.0 / 15.0).abs() / 3.667 < 0.01, "{g}");
    }

    #[test]
    fn filters_removed_leaves_first_stage() {
        let p = CircuitParams::<f64> {
            r2: 1e9,
            c2: 1e3,
            r3: 1e-3,
            c3: 1e-12,
            ..Default::default()
        };
        let tf = build_transfer_function(&p).unwrap();
        for f in [10.0, 1e3, 1e4] {
            let s = Complex::new(0.0, std::f64::consts::TAU * f);
            let (a, b) = (p.cf1 * (p.rf1 + p.rf2), p.cf1 * p.rf2);
            let c = p.cs + p.effective_input_capacitance().farads;
            let g = 1.0 / p.bias_resistance();
            let first = s * p.cs * (s * a + 1.0) / (s * c * (s * b + 1.0) + (s * b + 1.0) * g);
            assert_relative_eq!(tf.magnitude_hz(f), first.norm(), max_relative = 1e-6);
        }
    }

    #[test]
    fn decomposition_matches_full_function() {
        let p = CircuitParams::<f64>::default().with_cs(30e-12);
        let full = build_transfer_function(&p).unwrap();
        let parts = coupling_transfer_function(&p)
            .unwrap()
            .cascade(&amplifier_transfer_function(&p).unwrap());
        for f in [0.01, 0.07, 1.0, 10.0, 250.0, 5e3] {
            assert_relative_eq!(
                full.magnitude_hz(f),
                parts.magnitude_hz(f),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn non_physical_capacitance_rejected() {
        let mut p = CircuitParams::<f64>::default().with_cs(1e-12);
        p.cn = 50e-12;
        assert!(matches!(
            build_transfer_function(&p),
            Err(Error::ModelValidity(_))
        ));
        // Slight over-neutralization with a large Cs remains buildable.
        let p = CircuitParams::<f64> {
            cn: 10e-12,
            ..Default::default()
        };
        assert!(p.effective_input_capacitance().over_neutralized);
        build_transfer_function(&p).unwrap();
    }

    #[test]
    fn poles_of_default_model_are_stable_and_real() {
        let tf = build_transfer_function(&CircuitParams::<f64>::default()).unwrap();
        let poles = tf.poles();
        assert_eq!(poles.len(), 4);
        for p in &poles {
            assert!(p.re < 0.0);
            assert_eq!(p.im, 0.0);
            assert_relative_eq!(tf.den_poly().eval(*p).norm(), 0.0, epsilon = 1e-12);
        }
    }
}
