//! Physicists' Hermite polynomials by three-term recurrence.

use num_complex::Complex64;

/// `H_n(z)` from `H_{n+1} = 2z H_n - 2n H_{n-1}`.
pub fn hermite(n: usize, z: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * z;
    for m in 1..n {
        let next = 2.0 * z * cur - 2.0 * m as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn hermite_real(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for m in 1..n {
        let next = 2.0 * x * cur - 2.0 * m as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_n'(z) = 2n H_{n-1}(z)`.
pub fn hermite_derivative(n: usize, z: Complex64) -> Complex64 {
    if n == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        2.0 * n as f64 * hermite(n - 1, z)
    }
}
