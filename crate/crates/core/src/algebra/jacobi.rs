use crate::{Error, Result};

/// Jacobi polynomial `P^{(a,b)}_d(x)` by the three-term recurrence.
///
/// Only nonnegative `a`, `b` are accepted; callers reduce negative parameters
/// through the reflection relations before getting here.
pub fn jacobi_poly(d: u32, a: i64, b: i64, x: f64) -> Result<f64> {
    if a < 0 || b < 0 {
        return Err(Error::UnsupportedJacobi { d, a, b });
    }
    let (a, b) = (a as f64, b as f64);
    if d == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for n in 2..=d {
        let n = f64::from(n);
        let s = 2.0 * n + a + b;
        let c1 = 2.0 * n * (n + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s;
        let next = (c2 * cur - c3 * prev) / c1;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}
