use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest supported Taylor order.
pub const MAX_ORDER: usize = 8;

/// Truncated Taylor expansion `c[0] + c[1] h + .. + c[n] h^n` around a point.
///
/// Coefficients are normalized, so the k-th derivative is `k! * c[k]`.
/// Binary operations truncate to the smaller order of the two operands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; MAX_ORDER + 1],
    n: usize,
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; MAX_ORDER + 1];
        c[0] = v;
        Jet { c, n: order }
    }

    /// The independent variable at `x0`.
    pub fn var(x0: f64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order > 0 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        let mut j = Self::constant(0.0, coeffs.len() - 1);
        j.c[..coeffs.len()].copy_from_slice(coeffs);
        j
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..=self.n]
    }

    pub fn coeff(&self, k: usize) -> f64 {
        if k <= self.n {
            self.c[k]
        } else {
            0.0
        }
    }

    /// `d^k/dh^k` at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeff(k) * factorial(k)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|v| v.is_finite())
    }

    fn zeros(n: usize) -> Self {
        Jet {
            c: [0.0; MAX_ORDER + 1],
            n,
        }
    }

    pub fn scale(self, s: f64) -> Self {
        let mut r = self;
        for v in &mut r.c[..=r.n] {
            *v *= s;
        }
        r
    }

    pub fn offset(self, s: f64) -> Self {
        let mut r = self;
        r.c[0] += s;
        r
    }

    pub fn powi(self, k: u32) -> Self {
        (0..k).fold(Jet::constant(1.0, self.n), |acc, _| acc * self)
    }

    pub fn recip(self) -> Self {
        Jet::constant(1.0, self.n) / self
    }

    pub fn exp(self) -> Self {
        let mut e = Self::zeros(self.n);
        e.c[0] = self.c[0].exp();
        for k in 1..=self.n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.c[j] * e.c[k - j]).sum();
            e.c[k] = s / k as f64;
        }
        e
    }

    /// `(sin, cos)` of the jet.
    pub fn sin_cos(self) -> (Self, Self) {
        let mut s = Self::zeros(self.n);
        let mut c = Self::zeros(self.n);
        (s.c[0], c.c[0]) = self.c[0].sin_cos();
        for k in 1..=self.n {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                let a = j as f64 * self.c[j];
                ds += a * c.c[k - j];
                dc -= a * s.c[k - j];
            }
            s.c[k] = ds / k as f64;
            c.c[k] = dc / k as f64;
        }
        (s, c)
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    /// `(sinh, cosh)` of the jet.
    pub fn sinh_cosh(self) -> (Self, Self) {
        let mut s = Self::zeros(self.n);
        let mut c = Self::zeros(self.n);
        s.c[0] = self.c[0].sinh();
        c.c[0] = self.c[0].cosh();
        for k in 1..=self.n {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                let a = j as f64 * self.c[j];
                ds += a * c.c[k - j];
                dc += a * s.c[k - j];
            }
            s.c[k] = ds / k as f64;
            c.c[k] = dc / k as f64;
        }
        (s, c)
    }

    pub fn sinh(self) -> Self {
        self.sinh_cosh().0
    }

    pub fn cosh(self) -> Self {
        self.sinh_cosh().1
    }

    /// Through `t' = (1 - t^2) a'`, which stays bounded for large arguments.
    pub fn tanh(self) -> Self {
        let mut t = Self::zeros(self.n);
        let mut q = Self::zeros(self.n);
        t.c[0] = self.c[0].tanh();
        q.c[0] = 1.0 - t.c[0] * t.c[0];
        for k in 1..=self.n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.c[j] * q.c[k - j]).sum();
            t.c[k] = s / k as f64;
            q.c[k] = -(0..=k).map(|i| t.c[i] * t.c[k - i]).sum::<f64>();
        }
        t
    }

    pub fn sqrt(self) -> Self {
        let mut r = Self::zeros(self.n);
        r.c[0] = self.c[0].sqrt();
        for k in 1..=self.n {
            let s: f64 = (1..k).map(|j| r.c[j] * r.c[k - j]).sum();
            r.c[k] = (self.c[k] - s) / (2.0 * r.c[0]);
        }
        r
    }

    /// Root-test estimate of the convergence radius from the top coefficients.
    pub fn radius_estimate(&self) -> f64 {
        (self.n / 2..=self.n)
            .filter(|&k| k > 0 && self.c[k] != 0.0)
            .map(|k| self.c[k].abs().powf(-1.0 / k as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut r = Self::zeros(self.n.min(o.n));
        for k in 0..=r.n {
            r.c[k] = self.c[k] + o.c[k];
        }
        r
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut r = Self::zeros(self.n.min(o.n));
        for k in 0..=r.n {
            r.c[k] = (0..=k).map(|j| self.c[j] * o.c[k - j]).sum();
        }
        r
    }
}

/// Requires a nonzero constant term in the divisor; otherwise the result is
/// non-finite and callers are expected to check poles first.
impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let mut r = Self::zeros(self.n.min(o.n));
        for k in 0..=r.n {
            let s: f64 = (1..=k).map(|j| o.c[j] * r.c[k - j]).sum();
            r.c[k] = (self.c[k] - s) / o.c[0];
        }
        r
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, s: f64) -> Jet {
        self.offset(s)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}
