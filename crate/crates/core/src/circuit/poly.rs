//! Real polynomials in ascending-power form and their complex roots.

use num_complex::Complex;

use crate::scalar::Scalar;

/// `c[0] + c[1]·x + c[2]·x² + …`
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    /// Builds a polynomial, dropping zero high-order coefficients.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Polynomial::new(vec![c])
    }

    /// Monic polynomial with the given real roots.
    pub fn from_real_roots(roots: &[T]) -> Self {
        roots
            .iter()
            .fold(Polynomial::constant(T::one()), |acc, &r| {
                acc.mul(&Polynomial::new(vec![-r, T::one()]))
            })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> T {
        *self.coeffs.last().expect("non-empty")
    }

    pub fn mul(&self, other: &Polynomial<T>) -> Polynomial<T> {
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn add(&self, other: &Polynomial<T>) -> Polynomial<T> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or_else(T::zero)
                    + other.coeffs.get(i).copied().unwrap_or_else(T::zero)
            })
            .collect();
        Polynomial::new(out)
    }

    pub fn scale(&self, k: T) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn eval(&self, x: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * x + c)
    }

    fn eval_with_derivative(&self, x: Complex<T>) -> (Complex<T>, Complex<T>) {
        let zero = Complex::new(T::zero(), T::zero());
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    /// All complex roots, including exact roots at the origin.
    ///
    /// Uses Aberth–Ehrlich iteration started from circles whose radii come
    /// from the Newton polygon of the coefficient magnitudes, which keeps
    /// convergence robust when the roots span many decades (as they do for
    /// circuit time constants).
    pub fn roots(&self) -> Vec<Complex<T>> {
        let zero_roots = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let mut roots = vec![Complex::new(T::zero(), T::zero()); zero_roots.min(self.degree())];
        let reduced = Polynomial::new(self.coeffs[zero_roots.min(self.degree())..].to_vec());
        let n = reduced.degree();
        if n == 0 {
            return roots;
        }
        if n == 1 {
            let c = reduced.coeffs();
            roots.push(Complex::new(-c[0] / c[1], T::zero()));
            return roots;
        }
        // Work on the monic form; the roots are unchanged.
        let lead = reduced.leading();
        let monic = reduced.scale(T::one() / lead);

        let mut z = initial_guesses(&monic);
        let tol = T::epsilon() * T::lit(4.0);
        for _ in 0..1000 {
            let mut max_step = T::zero();
            for i in 0..n {
                let (p, dp) = monic.eval_with_derivative(z[i]);
                if p.norm() == T::zero() {
                    continue;
                }
                let ratio = p / dp;
                let mut sum = Complex::new(T::zero(), T::zero());
                for (j, zj) in z.iter().enumerate() {
                    if j != i {
                        sum += Complex::new(T::one(), T::zero()) / (z[i] - zj);
                    }
                }
                let step = ratio / (Complex::new(T::one(), T::zero()) - ratio * sum);
                if step.re.is_finite() && step.im.is_finite() {
                    z[i] -= step;
                    let rel = step.norm() / z[i].norm().max(T::min_positive_value());
                    if rel > max_step {
                        max_step = rel;
                    }
                }
            }
            if max_step <= tol {
                break;
            }
        }
        // Snap numerically-real roots onto the real axis.
        for r in z.iter_mut() {
            if r.im.abs() <= T::lit(1e3) * T::epsilon() * r.norm() {
                r.im = T::zero();
            }
        }
        roots.extend(z);
        roots
    }
}

fn initial_guesses<T: Scalar>(p: &Polynomial<T>) -> Vec<Complex<T>> {
    let n = p.degree();
    // Upper convex hull of (k, log|a_k|).
    let pts: Vec<(usize, T)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, c.abs().ln()))
        .collect();
    let mut hull: Vec<(usize, T)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (k1, y1) = hull[hull.len() - 2];
            let (k2, y2) = hull[hull.len() - 1];
            let cross = (T::from_count(k2) - T::from_count(k1)) * (pt.1 - y1)
                - (y2 - y1) * (T::from_count(pt.0) - T::from_count(k1));
            if cross >= T::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::with_capacity(n);
    let offset = T::lit(0.4);
    for w in hull.windows(2) {
        let (k1, y1) = w[0];
        let (k2, y2) = w[1];
        let m = k2 - k1;
        let radius = ((y1 - y2) / T::from_count(m)).exp();
        for j in 0..m {
            let angle = T::TAU() * T::from_count(j) / T::from_count(m)
                + offset
                + T::from_count(out.len()) * T::lit(0.1);
            out.push(Complex::from_polar(radius, angle));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn arithmetic() {
        let a = Polynomial::new(vec![1.0, 2.0]);
        let b = Polynomial::new(vec![-1.0, 0.0, 3.0]);
        assert_eq!(a.mul(&b).coeffs(), &[-1.0, -2.0, 3.0, 6.0]);
        assert_eq!(a.add(&b).coeffs(), &[0.0, 2.0, 3.0]);
        assert_eq!(Polynomial::new(vec![1.0, 0.0, 0.0]).degree(), 0);
        let v = a.eval(Complex::new(0.0, 1.0));
        assert_eq!(v, Complex::new(1.0, 2.0));
    }

    #[test]
    fn roots_spanning_many_decades() {
        let expected = [-1e-4, -0.1, -62.8, -1570.0];
        let p = Polynomial::from_real_roots(&expected).scale(3.7e-12);
        let r = sorted(p.roots());
        let mut e = expected.to_vec();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in r.iter().zip(e) {
            assert!(
                (got.re - want).abs() <= 1e-9 * want.abs(),
                "{got} vs {want}"
            );
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn complex_and_zero_roots() {
        // s² · (s² + 2s + 5) -> 0, 0, -1 ± 2j
        let p = Polynomial::new(vec![0.0, 0.0, 5.0, 2.0, 1.0]);
        let r = sorted(p.roots());
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
        let cplx: Vec<_> = r.iter().filter(|z| z.norm() > 0.0).collect();
        for z in cplx {
            assert!((z.re + 1.0).abs() < 1e-12);
            assert!((z.im.abs() - 2.0).abs() < 1e-12);
        }
    }
}
