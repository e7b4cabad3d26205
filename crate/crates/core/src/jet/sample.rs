//! Deterministic sample points on polydisc boundaries.

use num_complex::Complex64;

use super::Jet;

/// `count` points on the torus `|x_j| = radius`, spread by a Kronecker sequence.
///
/// By the maximum modulus principle the sup of a polynomial over the closed
/// polydisc is attained on this torus.
pub fn polydisc_samples(nvars: usize, radius: f64, count: usize) -> Vec<Vec<Complex64>> {
    const PRIMES: [f64; 12] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0, 23.0, 29.0, 31.0, 37.0];
    let steps: Vec<f64> = (0..nvars).map(|j| PRIMES[j % PRIMES.len()].sqrt().fract() + j as f64 * 0.1234567).collect();
    (0..count)
        .map(|k| {
            steps
                .iter()
                .map(|s| {
                    let theta = ((k as f64 + 0.5) * s).fract() * std::f64::consts::TAU;
                    Complex64::from_polar(radius, theta)
                })
                .collect()
        })
        .collect()
}

/// Largest modulus of the jet over the sample points.
pub fn sup_on_samples(j: &Jet, samples: &[Vec<Complex64>]) -> f64 {
    samples.iter().map(|p| j.eval_f64(p).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_lie_on_torus() {
        let pts = polydisc_samples(3, 0.5, 100);
        assert_eq!(pts.len(), 100);
        for p in &pts {
            for z in p {
                assert!((z.norm() - 0.5).abs() < 1e-12);
            }
        }
        assert_ne!(pts[0], pts[1]);
    }
}
