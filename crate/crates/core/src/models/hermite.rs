use alloc::vec::Vec;

/// Gauss–Hermite nodes and weights for `∫ f(x) e^{-x²} dx`, by Newton
/// iteration on the orthonormal Hermite recurrence. Nodes are descending.
pub fn gauss_hermite(order: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let n = order;
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let nf = n as f64;
    let mut z: f64 = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => libm::sqrt(2.0 * nf + 1.0) - 1.85575 * libm::pow(2.0 * nf + 1.0, -0.16667),
            1 => z - 1.14 * libm::pow(nf, 0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * libm::sqrt(2.0 / jf) * p2 - libm::sqrt((jf - 1.0) / jf) * p3;
            }
            pp = libm::sqrt(2.0 * nf) * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * (1.0 + z.abs()) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_gaussian_moments() {
        let sqrt_pi = core::f64::consts::PI.sqrt();
        for order in [1, 2, 5, 32] {
            let (x, w) = gauss_hermite(order);
            let m0: f64 = w.iter().sum();
            assert!((m0 - sqrt_pi).abs() < 1e-12, "order {order}");
            let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
            if order >= 2 {
                assert!((m2 - sqrt_pi / 2.0).abs() < 1e-12);
            }
        }
        let (x, w) = gauss_hermite(32);
        // ∫ cos(x) e^{-x²} dx = √π e^{-1/4}
        let c: f64 = x.iter().zip(&w).map(|(x, w)| w * x.cos()).sum();
        assert!((c - sqrt_pi * (-0.25f64).exp()).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] > p[1]));
    }
}
