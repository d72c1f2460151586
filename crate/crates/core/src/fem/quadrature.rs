//! Quadrature on the reference triangle `(0,0), (1,0), (0,1)`.

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Collapsed-coordinate (Duffy) product rule. Weights sum to the reference
/// area 1/2.
#[derive(Debug, Clone)]
pub struct TriangleQuadrature {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleQuadrature {
    /// Rule integrating every polynomial of total degree `<= degree` exactly.
    pub fn of_degree(degree: usize) -> Self {
        // the collapse adds one degree in the first coordinate
        let n = (degree + 2).div_ceil(2).max(1);
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let u = x[i];
                points.push([u, (1.0 - u) * x[j]]);
                weights.push(w[i] * w[j] * (1.0 - u));
            }
        }
        TriangleQuadrature {
            points,
            weights,
            degree,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn integrates_monomials_exactly() {
        for degree in 0..=12 {
            let q = TriangleQuadrature::of_degree(degree);
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let num: f64 = q
                        .points
                        .iter()
                        .zip(&q.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    // \int_T x^a y^b = a! b! / (a + b + 2)!
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    assert!((num - exact).abs() < 1e-15, "deg {degree} x^{a} y^{b}: {num} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_weights_sum_to_one() {
        for n in 1..20 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }
}
