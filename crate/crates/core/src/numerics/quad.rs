use num_complex::Complex;

use crate::scalar::{lit, Real};

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<V> {
    pub value: V,
    pub error: f64,
    pub converged: bool,
}

fn gk15<T: Real, F: FnMut(T) -> Complex<T>>(f: &mut F, a: T, b: T) -> (Complex<T>, f64) {
    let half = (b - a) / lit(2.0);
    let mid = (a + b) / lit(2.0);
    let fc = f(mid);
    let mut kronrod = fc * lit::<T>(WGK[7]);
    let mut gauss = fc * lit::<T>(WG[3]);
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let s = f(mid - dx) + f(mid + dx);
        kronrod = kronrod + s * lit::<T>(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + s * lit::<T>(WG[j / 2]);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).norm().to_f64_lossy();
    (value, err)
}

/// Globally adaptive Gauss-Kronrod integration of a complex-valued integrand.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol * |I|)`
/// or after `max_intervals` subdivisions.
pub fn integrate_complex<T: Real, F: FnMut(T) -> Complex<T>>(
    mut f: F,
    a: T,
    b: T,
    rel_tol: f64,
    abs_tol: f64,
) -> Quadrature<Complex<T>> {
    const MAX_INTERVALS: usize = 2000;
    if a == b {
        return Quadrature { value: Complex::new(T::zero(), T::zero()), error: 0.0, converged: true };
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: Complex<T> = parts.iter().fold(Complex::new(T::zero(), T::zero()), |s, p| s + p.2);
        let err: f64 = parts.iter().map(|p| p.3).sum();
        let target = abs_tol.max(rel_tol * total.norm().to_f64_lossy());
        // below ~100 ulps of the result the estimate is pure roundoff
        let floor = 100.0 * T::epsilon().to_f64_lossy() * total.norm().to_f64_lossy();
        if err <= target || err <= floor || parts.len() >= MAX_INTERVALS {
            return Quadrature { value: total, error: err, converged: err <= target.max(floor) };
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let m = (lo + hi) / lit(2.0);
        let (v1, e1) = gk15(&mut f, lo, m);
        let (v2, e2) = gk15(&mut f, m, hi);
        parts.push((lo, m, v1, e1));
        parts.push((m, hi, v2, e2));
    }
}

/// Real-valued wrapper around [`integrate_complex`].
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    rel_tol: f64,
    abs_tol: f64,
) -> Quadrature<T> {
    let q = integrate_complex(|x| Complex::new(f(x), T::zero()), a, b, rel_tol, abs_tol);
    Quadrature { value: q.value.re, error: q.error, converged: q.converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x: f64| x.powi(7) - 3.0 * x * x, 0.0, 2.0, 1e-14, 0.0);
        assert!((q.value - (256.0 / 8.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        // ∫_0^10 e^{i 3 t} dt = (e^{30 i} - 1) / (3 i)
        let q = integrate_complex(|t: f64| Complex::new(0.0, 3.0 * t).exp(), 0.0, 10.0, 1e-12, 0.0);
        let exact = (Complex::new(0.0, 30.0).exp() - 1.0) / Complex::new(0.0, 3.0);
        assert!((q.value - exact).norm() < 1e-11);
        assert!(q.converged);
    }

    #[test]
    fn endpoint_singular_integrand_converges() {
        // ∫_0^1 1/sqrt(x) dx = 2
        let q = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-9, 0.0);
        assert!((q.value - 2.0).abs() < 1e-7, "{}", q.value);
    }
}
