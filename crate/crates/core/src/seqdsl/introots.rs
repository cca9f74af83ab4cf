//! Exact integer root extraction. No floating-point root is ever trusted:
//! a float estimate is corrected with exact integer arithmetic.

/// Largest `r` with `r^p <= n`, for `p >= 1`.
pub fn iroot(n: u64, p: u32) -> u64 {
    assert!(p >= 1, "root order must be >= 1");
    if p == 1 || n < 2 {
        return n;
    }
    if p == 2 {
        return n.isqrt();
    }
    if p >= 64 {
        return 1;
    }
    let mut r = (n as f64).powf(1.0 / p as f64).round() as u64;
    while r > 0 && pow_exceeds(r, p, n) {
        r -= 1;
    }
    while !pow_exceeds(r + 1, p, n) {
        r += 1;
    }
    r
}

/// `base^p > limit`, without overflow.
fn pow_exceeds(base: u64, p: u32, limit: u64) -> bool {
    match base.checked_pow(p) {
        Some(v) => v > limit,
        None => true,
    }
}

pub fn is_perfect_power(n: u64, p: u32) -> bool {
    let r = iroot(n, p);
    r.checked_pow(p) == Some(n)
}

pub fn is_square(n: u64) -> bool {
    is_perfect_power(n, 2)
}

pub fn is_cube(n: u64) -> bool {
    is_perfect_power(n, 3)
}
