//! Permanents of small complex matrices (row-major, `n × n`).

use num_complex::Complex64;

/// Permanent by explicit enumeration of all `n!` permutations.
pub fn permanent(m: &[Complex64], n: usize) -> Complex64 {
    debug_assert_eq!(m.len(), n * n);
    match n {
        0 => Complex64::new(1.0, 0.0),
        1 => m[0],
        2 => m[0] * m[3] + m[1] * m[2],
        _ => {
            let mut perm: Vec<usize> = (0..n).collect();
            let mut total = Complex64::new(0.0, 0.0);
            enumerate(m, n, 0, &mut perm, &mut total);
            total
        }
    }
}

fn enumerate(m: &[Complex64], n: usize, k: usize, perm: &mut [usize], total: &mut Complex64) {
    if k == n {
        let mut p = Complex64::new(1.0, 0.0);
        for (row, &col) in perm.iter().enumerate() {
            p *= m[row * n + col];
        }
        *total += p;
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        enumerate(m, n, k + 1, perm, total);
        perm.swap(k, i);
    }
}

/// Ryser's inclusion–exclusion formula.
pub fn permanent_ryser(m: &[Complex64], n: usize) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for subset in 1u64..(1u64 << n) {
        let mut prod = Complex64::new(1.0, 0.0);
        for row in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for col in 0..n {
                if subset & (1 << col) != 0 {
                    s += m[row * n + col];
                }
            }
            prod *= s;
        }
        let sign = if (n as u32 - subset.count_ones()).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += prod * sign;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn known_values() {
        let ones = vec![Complex64::new(1.0, 0.0); 16];
        assert_eq!(permanent(&ones, 4).re, 24.0);
        let id: Vec<Complex64> = (0..9)
            .map(|i| Complex64::new(if i % 4 == 0 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        assert_eq!(permanent(&id, 3).re, 1.0);
    }

    #[test]
    fn enumeration_matches_ryser() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=4 {
            for _ in 0..50 {
                let m: Vec<Complex64> = (0..n * n)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let a = permanent(&m, n);
                let b = permanent_ryser(&m, n);
                assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
            }
        }
    }
}
