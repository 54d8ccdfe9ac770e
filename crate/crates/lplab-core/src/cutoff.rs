//! The fixed smooth cutoff φ⁰ and the band profile ψ⁰ = φ⁰(·/4) − φ⁰.

fn rho(s: f64) -> f64 {
    if s > 0.0 {
        libm::exp(-1.0 / s)
    } else {
        0.0
    }
}

/// φ⁰(t): equal to 1 on [0, ¼], 0 on [1, ∞), smooth and nonincreasing between.
pub fn phi0(t: f64) -> f64 {
    if t <= 0.25 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = rho(1.0 - t);
        let b = rho(t - 0.25);
        a / (a + b)
    }
}

/// ψ⁰(t) = φ⁰(t/4) − φ⁰(t), supported in [¼, 4].
pub fn psi0(t: f64) -> f64 {
    phi0(0.25 * t) - phi0(t)
}

/// 4^{-j} as an exact power of two.
pub fn pow4_neg(j: i32) -> f64 {
    libm::ldexp(1.0, -2 * j)
}

/// 2^j as an exact power of two.
pub fn pow2(j: i32) -> f64 {
    libm::ldexp(1.0, j)
}

/// Multiplier of S_j at squared frequency `k2 = |ξ|²`.
pub fn s_mult(j: i32, k2: f64) -> f64 {
    phi0(pow4_neg(j) * k2)
}

/// Multiplier of Δ_j at squared frequency `k2 = |ξ|²`.
pub fn delta_mult(j: i32, k2: f64) -> f64 {
    psi0(pow4_neg(j) * k2)
}

/// Multiplier of Δ̃_j = Δ_{j-2} + … + Δ_{j+2} = S_{j+3} − S_{j-2}.
pub fn tilde_mult(j: i32, k2: f64) -> f64 {
    s_mult(j + 3, k2) - s_mult(j - 2, k2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        assert_eq!(phi0(0.0), 1.0);
        assert_eq!(phi0(0.25), 1.0);
        assert_eq!(phi0(1.0), 0.0);
        assert_eq!(psi0(1.0), 1.0);
        assert_eq!(psi0(64.0), 0.0);
        assert_eq!(psi0(0.25), 0.0);
        assert_eq!(psi0(4.0), 0.0);
    }

    #[test]
    fn monotone_and_bounded() {
        let mut prev = 1.0;
        for i in 0..=2000 {
            let t = i as f64 / 1000.0;
            let v = phi0(t);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn tilde_is_one_on_band() {
        for j in -3..8 {
            for i in 0..=400 {
                let r = pow2(j - 1) * (1.0 + 3.0 * i as f64 / 400.0);
                assert_eq!(tilde_mult(j, r * r), 1.0);
            }
        }
    }
}
