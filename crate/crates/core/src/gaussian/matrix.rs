use crate::scalar::{lit, Real};

/// Row-major 2×2 matrix [[a, b], [c, d]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T: Real = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn rotation(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, v: [T; 2]) -> [T; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub(crate) fn symmetrized(&self) -> Self {
        let off = (self.b + self.c) / lit(2.0);
        Self::new(self.a, off, off, self.d)
    }

    /// Eigenvalues (smaller, larger) of the symmetric part.
    pub fn symmetric_eigenvalues(&self) -> (T, T) {
        let two = lit::<T>(2.0);
        let off = (self.b + self.c) / two;
        let mean = (self.a + self.d) / two;
        let half_diff = (self.a - self.d) / two;
        let rad = (half_diff * half_diff + off * off).sqrt();
        let hi = mean + rad;
        // product form avoids cancellation in the small eigenvalue
        let det = self.a * self.d - off * off;
        let lo = if hi > T::zero() { det / hi } else { mean - rad };
        (lo, hi)
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        (self.a - o.a).abs().max((self.b - o.b).abs()).max((self.c - o.c).abs()).max((self.d - o.d).abs())
    }
}
