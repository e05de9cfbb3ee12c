use std::ops::{Add, Mul, Neg, Sub};

/// Second-order jet: a value with its first and second derivative.
///
/// Products and elementary functions propagate derivatives exactly, which is
/// how prefactor-times-Heun wavefunctions get analytic derivatives for the
/// residual checks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }

    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0)
    }

    /// The independent variable itself at `x`.
    pub const fn variable(x: f64) -> Self {
        Self::new(x, 1.0, 0.0)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.value * s, self.d1 * s, self.d2 * s)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self::new(e, e * self.d1, e * (self.d2 + self.d1 * self.d1))
    }

    pub fn ln(self) -> Self {
        let v = self.value;
        Self::new(
            v.ln(),
            self.d1 / v,
            self.d2 / v - self.d1 * self.d1 / (v * v),
        )
    }

    pub fn recip(self) -> Self {
        let v = self.value;
        let inv = 1.0 / v;
        Self::new(
            inv,
            -self.d1 * inv * inv,
            (2.0 * self.d1 * self.d1 * inv - self.d2) * inv * inv,
        )
    }

    pub fn powf(self, p: f64) -> Self {
        let v = self.value;
        let vp = v.powf(p);
        let d = p * v.powf(p - 1.0);
        let dd = p * (p - 1.0) * v.powf(p - 2.0);
        Self::new(vp, d * self.d1, dd * self.d1 * self.d1 + d * self.d2)
    }

    /// Rescales the independent variable: if `self` holds derivatives with
    /// respect to `x` and `x = r / eta`, the result holds derivatives in `r`.
    pub fn rescale_variable(self, dx_dr: f64) -> Self {
        Self::new(self.value, self.d1 * dx_dr, self.d2 * dx_dr * dx_dr)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
