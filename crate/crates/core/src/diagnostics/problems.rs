//! The benchmark problems: two manufactured solutions, a blow-up candidate and
//! a moving domain wall.

use std::f64::consts::PI;
use std::str::FromStr;

use super::jet::Jet;
use crate::error::Error;
use crate::mesh::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleId {
    Example1,
    Example2,
    Example3,
    Example4,
    /// `m = (0, 0, 1)` without field: a stationary state.
    Constant,
}

impl FromStr for ExampleId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "example1" => Ok(ExampleId::Example1),
            "2" | "example2" => Ok(ExampleId::Example2),
            "3" | "example3" => Ok(ExampleId::Example3),
            "4" | "example4" => Ok(ExampleId::Example4),
            "constant" => Ok(ExampleId::Constant),
            other => Err(Error::Config(format!("unknown example '{other}'"))),
        }
    }
}

impl std::fmt::Display for ExampleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = match self {
            ExampleId::Example1 => 1,
            ExampleId::Example2 => 2,
            ExampleId::Example3 => 3,
            ExampleId::Example4 => 4,
            ExampleId::Constant => return f.write_str("constant"),
        };
        write!(f, "example{n}")
    }
}

/// A benchmark problem. `t_final` is the period used inside the exact
/// solution of example 1; the run length is configured separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactProblem {
    pub id: ExampleId,
    pub alpha: f64,
    pub ce: f64,
    pub t_final: f64,
    pub domain: Rect,
    /// Example 2: blow-up time offset and amplitude.
    pub t0: f64,
    pub c0: f64,
    /// Example 3: scaling of the bubble profile.
    pub s: f64,
    /// Example 4: wall centre, half width and applied field.
    pub wall_c: f64,
    pub wall_d: f64,
    pub h_const: [f64; 3],
}

pub type JetVec = [Jet; 3];

impl ExactProblem {
    pub fn new(id: ExampleId) -> Self {
        let base = ExactProblem {
            id,
            alpha: 0.2,
            ce: 1.0,
            t_final: 0.1,
            domain: Rect::unit_square(),
            t0: 0.06,
            c0: 400.0,
            s: 16.0,
            wall_c: 0.2,
            wall_d: 0.125,
            h_const: [0.0; 3],
        };
        match id {
            ExampleId::Example1 => base,
            ExampleId::Example2 => ExactProblem { t_final: 0.05, ..base },
            ExampleId::Example3 => ExactProblem {
                alpha: 1.0,
                domain: Rect::new(-0.5, -0.5, 0.5, 0.5),
                ..base
            },
            ExampleId::Example4 => ExactProblem {
                alpha: 1.0,
                ce: 0.1,
                t_final: 0.35,
                domain: Rect::new(0.0, 0.0, 1.0, 0.2),
                h_const: [0.0, 0.0, -50.0],
                ..base
            },
            ExampleId::Constant => ExactProblem { alpha: 1.0, ..base },
        }
    }

    pub fn has_exact(&self) -> bool {
        matches!(self.id, ExampleId::Example1 | ExampleId::Example2 | ExampleId::Constant)
    }

    /// Exact solution as jets in `(t, x, y)`.
    pub fn exact_jet(&self, t: f64, x: [f64; 2]) -> Option<JetVec> {
        match self.id {
            ExampleId::Example1 => Some(self.example1(Jet::t(t), Jet::x(x[0]))),
            ExampleId::Example2 => Some(self.example2(Jet::t(t), Jet::x(x[0]), Jet::y(x[1]))),
            ExampleId::Constant => Some([Jet::constant(0.0), Jet::constant(0.0), Jet::constant(1.0)]),
            _ => None,
        }
    }

    fn example1(&self, t: Jet, x: Jet) -> JetVec {
        let f = x.powi(3) - 1.5 * x.powi(2) + 0.25;
        let w = t * (3.0 * PI / self.t_final);
        [-(f * w.sin()), (1.0 - f * f).sqrt(), -(f * w.cos())]
    }

    fn example2(&self, t: Jet, x: Jet, y: Jet) -> JetVec {
        let dx = x - 0.5;
        let dy = y - 0.5;
        let d = dx * dx + dy * dy;
        if !(d.v < 0.25) {
            return [Jet::constant(0.0), Jet::constant(0.0), Jet::constant(1.0)];
        }
        let a = self.t0 + 0.1;
        let g = (a - t).recip() * a;
        let e = (-(g / (0.25 - d))).exp();
        let m1 = self.c0 * dx * e;
        let m2 = self.c0 * dy * e;
        let m3 = (1.0 - self.c0 * self.c0 * d * e * e).sqrt();
        [m1, m2, m3]
    }

    pub fn exact(&self, t: f64, x: [f64; 2]) -> Option<[f64; 3]> {
        self.exact_jet(t, x).map(|j| j.map(|c| c.v))
    }

    /// Spatial gradient rows `[d_x m_c, d_y m_c]`.
    pub fn exact_grad(&self, t: f64, x: [f64; 2]) -> Option<[[f64; 2]; 3]> {
        self.exact_jet(t, x).map(|j| j.map(|c| [c.dx, c.dy]))
    }

    pub fn initial(&self, x: [f64; 2]) -> [f64; 3] {
        match self.id {
            ExampleId::Example1 | ExampleId::Example2 | ExampleId::Constant => self.exact(0.0, x).unwrap(),
            ExampleId::Example3 => {
                let r2 = x[0] * x[0] + x[1] * x[1];
                if r2 <= 0.5 {
                    let a = (1.0 - 2.0 * r2.sqrt()).powi(4) / self.s;
                    let den = a * a + r2;
                    [2.0 * a * x[0] / den, 2.0 * a * x[1] / den, (a * a - r2) / den]
                } else {
                    [0.0, 0.0, -1.0]
                }
            }
            ExampleId::Example4 => {
                let (c, d) = (self.wall_c, self.wall_d);
                if x[0] < c - d {
                    [0.0, 0.0, -1.0]
                } else if x[0] <= c + d {
                    let zeta = (PI * (x[0] - c) / (2.0 * d)).sin();
                    let ang = PI * zeta / 2.0;
                    [0.0, ang.cos(), ang.sin()]
                } else {
                    [0.0, 0.0, 1.0]
                }
            }
        }
    }

    /// Whether the external field vanishes identically.
    pub fn field_free(&self) -> bool {
        match self.id {
            ExampleId::Example1 | ExampleId::Example2 => false,
            _ => self.h_const == [0.0; 3],
        }
    }

    /// External field at `(t, x)`.
    pub fn h_ext(&self, t: f64, x: [f64; 2]) -> [f64; 3] {
        match self.id {
            ExampleId::Example1 | ExampleId::Example2 => derive_forcing(&self.exact_jet(t, x).unwrap(), self.alpha, self.ce),
            _ => self.h_const,
        }
    }

    /// `|d_tt m(0)|_{L^2}` where an exact solution is known, by quadrature of
    /// a central difference of the exact time derivative.
    pub fn second_time_derivative_norm(&self, t: f64) -> Option<f64> {
        if !self.has_exact() {
            return None;
        }
        let eps = 1e-6 * self.t_final;
        let rule = crate::fem::quadrature::gauss_legendre(24);
        let r = self.domain;
        let mut acc = 0.0;
        for (xi, wi) in rule.0.iter().zip(&rule.1) {
            for (yj, wj) in rule.0.iter().zip(&rule.1) {
                let p = [r.x0 + xi * (r.x1 - r.x0), r.y0 + yj * (r.y1 - r.y0)];
                let a = self.exact_jet(t + eps, p).unwrap();
                let b = self.exact_jet(t - eps, p).unwrap();
                let s: f64 = (0..3).map(|c| ((a[c].dt - b[c].dt) / (2.0 * eps)).powi(2)).sum();
                acc += wi * wj * s;
            }
        }
        Some((acc * r.area()).sqrt())
    }
}

/// `H = alpha m_t + m x m_t - C_e P(m) Delta m` makes `m` an exact solution
/// of the strong form, since every term is tangential.
pub fn derive_forcing(m: &JetVec, alpha: f64, ce: f64) -> [f64; 3] {
    let v = m.map(|c| c.v);
    let mt = m.map(|c| c.dt);
    let lap = m.map(|c| c.laplacian());
    let cross = cross(v, mt);
    let n2 = dot(v, v);
    let proj = dot(v, lap) / n2;
    let mut h = [0.0; 3];
    for c in 0..3 {
        h[c] = alpha * mt[c] + cross[c] - ce * (lap[c] - proj * v[c]);
    }
    h
}

/// Strong-form residual `alpha m_t + m x m_t - P(m)(C_e lap m + H)` from
/// explicitly given derivatives.
pub fn strong_residual(m: [f64; 3], mt: [f64; 3], lap: [f64; 3], h: [f64; 3], alpha: f64, ce: f64) -> [f64; 3] {
    let heff: [f64; 3] = std::array::from_fn(|c| ce * lap[c] + h[c]);
    let proj = dot(m, heff) / dot(m, m);
    let cr = cross(m, mt);
    std::array::from_fn(|c| alpha * mt[c] + cr[c] - (heff[c] - proj * m[c]))
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_length_everywhere() {
        for id in [ExampleId::Example1, ExampleId::Example2, ExampleId::Example3, ExampleId::Example4, ExampleId::Constant] {
            let p = ExactProblem::new(id);
            let r = p.domain;
            for i in 0..=20 {
                for j in 0..=20 {
                    let x = [
                        r.x0 + (r.x1 - r.x0) * i as f64 / 20.0,
                        r.y0 + (r.y1 - r.y0) * j as f64 / 20.0,
                    ];
                    let m = p.initial(x);
                    assert!((dot(m, m) - 1.0).abs() < 1e-14, "{id} at {x:?}");
                }
            }
        }
    }

    #[test]
    fn stationary_field_needs_no_forcing() {
        let m = [Jet::constant(0.0), Jet::constant(0.6), Jet::constant(0.8)];
        assert_eq!(derive_forcing(&m, 0.3, 1.0), [0.0; 3]);
    }

    #[test]
    fn rotating_field_forcing() {
        let (w, alpha, t) = (2.0, 0.3, 0.4);
        let tt = Jet::t(t) * w;
        let m = [tt.cos(), tt.sin(), Jet::constant(0.0)];
        let h = derive_forcing(&m, alpha, 1.0);
        let (s, c) = (w * t).sin_cos();
        let expect = [-alpha * w * s, alpha * w * c, w];
        for k in 0..3 {
            assert!((h[k] - expect[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn example2_is_continuous_at_the_rim() {
        let p = ExactProblem::new(ExampleId::Example2);
        let inside = p.exact(0.01, [0.5 + 0.4999, 0.5]).unwrap();
        assert!((inside[2] - 1.0).abs() < 1e-14 && inside[0].abs() < 1e-14);
    }
}
