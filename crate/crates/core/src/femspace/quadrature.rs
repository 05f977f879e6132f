//! Gauss–Legendre rules on the reference interval `[-1, 1]` and square `[-1, 1]^2`.

/// Quadrature points and positive weights on a reference domain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
}

impl<P> QuadratureRule<P> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Number of Gauss points needed to integrate polynomials of `degree` exactly.
pub fn points_for_degree(degree: usize) -> usize {
    degree.max(1) / 2 + 1
}

/// `n`-point Gauss–Legendre nodes and weights, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one Gauss point is required");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Rule on `[-1, 1]` exact for polynomials up to `degree`.
pub fn interval_rule(degree: usize) -> QuadratureRule<f64> {
    let (points, weights) = gauss_legendre(points_for_degree(degree));
    QuadratureRule { points, weights }
}

/// Tensor-product rule on `[-1, 1]^2`, exact up to `degree` in each direction.
/// Points are ordered with the first coordinate varying fastest.
pub fn square_rule(degree: usize) -> QuadratureRule<[f64; 2]> {
    let (x, w) = gauss_legendre(points_for_degree(degree));
    let mut points = Vec::with_capacity(x.len() * x.len());
    let mut weights = Vec::with_capacity(x.len() * x.len());
    for (zj, wj) in x.iter().zip(&w) {
        for (xi, wi) in x.iter().zip(&w) {
            points.push([*xi, *zj]);
            weights.push(wi * wj);
        }
    }
    QuadratureRule { points, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let r = interval_rule(3);
        assert_eq!(r.len(), 2);
        let a = 1.0 / 3f64.sqrt();
        assert!((r.points[0] + a).abs() < 1e-15 && (r.points[1] - a).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15 && (r.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn square_degree_five() {
        let r = square_rule(5);
        assert_eq!(r.len(), 9);
        let v: f64 = r
            .points
            .iter()
            .zip(&r.weights)
            .map(|(p, w)| w * p[0].powi(4) * p[1].powi(4))
            .sum();
        assert!((v - 0.16).abs() < 1e-12);
    }

    #[test]
    fn weights_positive_and_sum_to_measure() {
        for d in 1..20 {
            let r = interval_rule(d);
            assert!(r.weights.iter().all(|w| *w > 0.0));
            assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let s = square_rule(d);
            assert!((s.weights.iter().sum::<f64>() - 4.0).abs() < 1e-13);
        }
    }

    #[test]
    fn exactness_up_to_degree() {
        for d in 1..16 {
            let r = interval_rule(d);
            for p in 0..=d {
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                let v: f64 = r.points.iter().zip(&r.weights).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((v - exact).abs() < 1e-13, "degree {d} monomial {p}");
            }
        }
    }
}
