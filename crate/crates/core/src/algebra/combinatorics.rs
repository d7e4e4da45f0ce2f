/// Largest eigenspace level accepted by the basis constructors.
///
/// Binomials are exact in `u128` far beyond this; the bound keeps the dense
/// `(k+1)² × (k+1)²` matrices at a tractable size.
pub const MAX_LEVEL: u32 = 40;

/// Exact binomial coefficient `C(n, r)`, zero when `r > n`.
pub fn binomial(n: u32, r: u32) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}
