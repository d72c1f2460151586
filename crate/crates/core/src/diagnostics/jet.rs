//! Forward-mode jets in `(t, x, y)` carrying the first derivatives and the
//! pure second derivatives in space, which is all the Laplacian needs.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub dt: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dyy: f64,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet { v, ..Default::default() }
    }

    pub fn t(t: f64) -> Self {
        Jet { v: t, dt: 1.0, ..Default::default() }
    }

    pub fn x(x: f64) -> Self {
        Jet { v: x, dx: 1.0, ..Default::default() }
    }

    pub fn y(y: f64) -> Self {
        Jet { v: y, dy: 1.0, ..Default::default() }
    }

    pub fn laplacian(&self) -> f64 {
        self.dxx + self.dyy
    }

    /// `f(self)` given `f`, `f'` and `f''` at the value.
    fn chain(self, f: f64, d1: f64, d2: f64) -> Jet {
        Jet {
            v: f,
            dt: d1 * self.dt,
            dx: d1 * self.dx,
            dy: d1 * self.dy,
            dxx: d2 * self.dx * self.dx + d1 * self.dxx,
            dyy: d2 * self.dy * self.dy + d1 * self.dyy,
        }
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn sqrt(self) -> Jet {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.v))
    }

    pub fn powi(self, n: i32) -> Jet {
        let nf = n as f64;
        let d1 = if n == 0 { 0.0 } else { nf * self.v.powi(n - 1) };
        let d2 = if n <= 1 { 0.0 } else { nf * (nf - 1.0) * self.v.powi(n - 2) };
        self.chain(self.v.powi(n), d1, d2)
    }

    pub fn recip(self) -> Jet {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            dt: self.dt + o.dt,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
            dxx: self.dxx + o.dxx,
            dyy: self.dyy + o.dyy,
        }
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
        self * -1.0
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            dt: self.dt * o.v + self.v * o.dt,
            dx: self.dx * o.v + self.v * o.dx,
            dy: self.dy * o.v + self.v * o.dy,
            dxx: self.dxx * o.v + 2.0 * self.dx * o.dx + self.v * o.dxx,
            dyy: self.dyy * o.v + 2.0 * self.dy * o.dy + self.v * o.dyy,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, c: f64) -> Jet {
        self.v += c;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, c: f64) -> Jet {
        self + (-c)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        Jet {
            v: self.v * c,
            dt: self.dt * c,
            dx: self.dx * c,
            dy: self.dy * c,
            dxx: self.dxx * c,
            dyy: self.dyy * c,
        }
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j * self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        -j + self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, c: f64) -> Jet {
        self * (1.0 / c)
    }
}
