//! Quadrature rules: Gauss-Legendre on the unit interval and collapsed
//! (Duffy) tensor rules on the reference triangle. The collapsed construction
//! gives exactness for any requested polynomial degree without tabulated
//! coefficients; all points are interior and all weights positive.

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature on the reference interval [0, 1]; weights sum to 1.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl EdgeRule {
    pub fn with_degree(degree: usize) -> Self {
        let n = degree / 2 + 1;
        Self::with_points(n)
    }

    pub fn with_points(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        EdgeRule {
            points: x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
            weights: w.iter().map(|w| 0.5 * w).collect(),
            degree: 2 * n - 1,
        }
    }
}

/// Quadrature on the reference triangle (0,0)-(1,0)-(0,1), points stored in
/// barycentric coordinates; weights sum to the reference area 1/2.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleRule {
    pub fn with_degree(degree: usize) -> Self {
        // Duffy map (u, v) -> (xi, eta) = (u, v (1 - u)) with Jacobian (1 - u):
        // a monomial of total degree d becomes degree <= d + 1 per direction,
        // so n Gauss points per direction integrate exactly when 2n - 1 >= d + 1.
        let n = (degree + 3) / 2;
        let (x, w) = gauss_legendre(n);
        let u: Vec<f64> = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
        let wu: Vec<f64> = w.iter().map(|w| 0.5 * w).collect();
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let xi = u[i];
                let eta = u[j] * (1.0 - u[i]);
                points.push([1.0 - xi - eta, xi, eta]);
                weights.push(wu[i] * wu[j] * (1.0 - u[i]));
            }
        }
        TriangleRule {
            points,
            weights,
            degree,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Exact integral of xi^a eta^b over the reference triangle.
    fn monomial_integral(a: usize, b: usize) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn triangle_rules_integrate_monomials_exactly() {
        for degree in 1..=10 {
            let rule = TriangleRule::with_degree(degree);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 0.5).abs() < 1e-14, "degree {degree} weight sum");
            for a in 0..=degree {
                for b in 0..=(degree - a) {
                    let num: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(l, w)| w * l[1].powi(a as i32) * l[2].powi(b as i32))
                        .sum();
                    let exact = monomial_integral(a, b);
                    assert!(
                        (num - exact).abs() < 1e-14,
                        "degree {degree}, monomial x^{a} y^{b}: {num} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn edge_rules_integrate_monomials_exactly() {
        for degree in 1..=11 {
            let rule = EdgeRule::with_degree(degree);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 1.0).abs() < 1e-14);
            for a in 0..=rule.degree {
                let num: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(t, w)| w * t.powi(a as i32))
                    .sum();
                let exact = 1.0 / (a as f64 + 1.0);
                assert!((num - exact).abs() < 1e-14, "degree {degree}, t^{a}");
            }
        }
    }

    #[test]
    fn gauss_legendre_five_point_reference_values() {
        let (x, w) = gauss_legendre(5);
        // Abramowitz & Stegun table 25.4.
        assert!((x[4] - 0.906_179_845_938_664).abs() < 1e-14);
        assert!((w[4] - 0.236_926_885_056_189).abs() < 1e-14);
        assert!((x[2]).abs() < 1e-15);
        assert!((w[2] - 0.568_888_888_888_889).abs() < 1e-14);
    }
}
