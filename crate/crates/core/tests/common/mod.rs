//! Independent oracles shared by the statistics and acceptance tests.
//! Deliberately implemented with different machinery than the library:
//! exact integer enumeration for the hypergeometric test and plain
//! Simpson quadrature for the normal integral, so agreement is meaningful.

/// Pascal's triangle up to row `n_max` in exact 128-bit integers.
/// Row 60 peaks at C(60,30) ≈ 1.18e17; products of two such entries stay
/// far below u128::MAX, so the whole enumeration is exact.
pub fn binomial_table(n_max: usize) -> Vec<Vec<u128>> {
    let mut rows: Vec<Vec<u128>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut row = vec![1u128; n + 1];
        for k in 1..n {
            row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
        }
        rows.push(row);
    }
    rows
}

/// Two-sided Fisher exact p-value by brute-force enumeration of every
/// table with the observed margins, summing the exact integer weights of
/// tables no more probable than the observed one (1e-7 relative slack on
/// the comparison, mirroring the library's tie rule).
pub fn fisher_oracle(k1: u64, n1: u64, k2: u64, n2: u64, choose: &[Vec<u128>]) -> f64 {
    let col1 = k1 + k2;
    let total = n1 + n2;
    let lo = col1.saturating_sub(n2);
    let hi = col1.min(n1);
    let weight =
        |k: u64| -> u128 { choose[n1 as usize][k as usize] * choose[n2 as usize][(col1 - k) as usize] };
    let observed = weight(k1) as f64;
    let mut selected: u128 = 0;
    for k in lo..=hi {
        let w = weight(k);
        if w as f64 <= observed * (1.0 + 1e-7) {
            selected += w;
        }
    }
    selected as f64 / (choose[total as usize][col1 as usize] as f64)
}

/// Upper-tail probability of the chi-square distribution with 1 df,
/// via P(χ²₁ > x) = 2(1 − Φ(√x)) and Simpson integration of the normal
/// density over [0, √x].
pub fn chi2_1df_sf_quadrature(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let z = x.sqrt();
    let steps = 40_000usize;
    let h = z / steps as f64;
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = phi(0.0) + phi(z);
    for i in 1..steps {
        let t = i as f64 * h;
        acc += phi(t) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let integral = acc * h / 3.0;
    2.0 * (0.5 - integral)
}
