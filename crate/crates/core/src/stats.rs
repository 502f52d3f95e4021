//! Small statistics toolbox: moments, quantiles, gamma functions,
//! chi-square and Kolmogorov-Smirnov tests, Wilson intervals and least
//! squares helpers. Everything here is deterministic and allocation-light
//! so it can back both the estimators and the verification battery.

/// Relative closeness |a - b| <= tol * max(|a|, |b|, floor).
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1e-300);
    (a - b).abs() <= tol * scale
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// (mean, unbiased sample variance).
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (m, ss / (xs.len() - 1) as f64)
}

/// Linear-interpolated quantile (type 7) of already sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite data"));
    quantile_sorted(&v, q)
}

/// Natural log of the gamma function (Lanczos approximation, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * x).sin().abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x).
pub fn reg_gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // series expansion
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..500 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (sum.ln() + a * x.ln() - x - ln_gamma(a)).exp()
    } else {
        1.0 - reg_gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) by continued fraction
/// (modified Lentz), valid for x >= a + 1.
fn reg_gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (a * x.ln() - x - ln_gamma(a)).exp() * h
}

pub fn reg_gamma_q(a: f64, x: f64) -> f64 {
    if x < a + 1.0 {
        1.0 - reg_gamma_p(a, x)
    } else {
        reg_gamma_q_cf(a, x)
    }
}

/// Survival function of the chi-square distribution with `dof` degrees
/// of freedom.
pub fn chi_square_sf(x: f64, dof: f64) -> f64 {
    reg_gamma_q(dof / 2.0, x / 2.0)
}

/// Survival function of the Kolmogorov distribution,
/// Q(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2).
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 0.18 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64) * (j as f64) * t * t).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

fn ks_p_from_d(d: f64, n_eff: f64) -> f64 {
    let sqrt_n = n_eff.sqrt();
    // Stephens' small-sample correction to the asymptotic distribution.
    kolmogorov_sf((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)
}

/// One-sample KS test of `data` against the uniform distribution on
/// [lo, hi].
pub fn ks_test_uniform(data: &[f64], lo: f64, hi: f64) -> KsResult {
    assert!(!data.is_empty() && hi > lo);
    let mut v: Vec<f64> = data.iter().map(|x| (x - lo) / (hi - lo)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite data"));
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in v.iter().enumerate() {
        let cdf = x.clamp(0.0, 1.0);
        d = d.max((cdf - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - cdf).abs());
    }
    KsResult {
        statistic: d,
        p_value: ks_p_from_d(d, n),
    }
}

/// Two-sample KS test.
pub fn ks_test_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("finite data"));
    ys.sort_by(|p, q| p.partial_cmp(q).expect("finite data"));
    let (na, nb) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < na && j < nb {
        let x = xs[i].min(ys[j]);
        while i < na && xs[i] <= x {
            i += 1;
        }
        while j < nb && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let n_eff = (na * nb) as f64 / (na + nb) as f64;
    KsResult {
        statistic: d,
        p_value: ks_p_from_d(d, n_eff),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square goodness of fit for pre-binned counts against
/// expected bin masses. Expected counts below ~5 should be merged by the
/// caller beforehand.
pub fn chi_square_gof(observed: &[f64], expected: &[f64]) -> ChiSquareResult {
    assert_eq!(observed.len(), expected.len());
    assert!(observed.len() >= 2);
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = observed.len() - 1;
    ChiSquareResult {
        statistic: stat,
        dof,
        p_value: chi_square_sf(stat, dof as f64),
    }
}

pub fn poisson_pmf(k: u64, lambda: f64) -> f64 {
    (k as f64 * lambda.ln() - lambda - ln_gamma(k as f64 + 1.0)).exp()
}

/// Chi-square GOF of integer counts against Poisson(lambda), binning the
/// tails so that every expected count is at least `min_expected`.
pub fn poisson_counts_gof(counts: &[u64], lambda: f64, min_expected: f64) -> ChiSquareResult {
    let n = counts.len() as f64;
    let max_k = *counts.iter().max().expect("non-empty counts");
    // Expected per value of k, then merge from both ends.
    let upper = (max_k + 1).max((lambda + 10.0 * lambda.sqrt()) as u64);
    let expected_k: Vec<f64> = (0..=upper).map(|k| n * poisson_pmf(k, lambda)).collect();
    let mut edges: Vec<(u64, u64)> = Vec::new();
    let mut k = 0u64;
    while k <= upper {
        let mut hi = k;
        let mut mass: f64 = expected_k[k as usize];
        while mass < min_expected && hi < upper {
            hi += 1;
            mass += expected_k[hi as usize];
        }
        edges.push((k, hi));
        k = hi + 1;
    }
    // Fold everything above `upper` into the last bin.
    let mut observed = vec![0.0f64; edges.len()];
    for &c in counts {
        let idx = edges
            .iter()
            .position(|&(lo, hi)| c >= lo && c <= hi)
            .unwrap_or(edges.len() - 1);
        observed[idx] += 1.0;
    }
    let mut expected: Vec<f64> = edges
        .iter()
        .map(|&(lo, hi)| expected_k[lo as usize..=hi as usize].iter().sum())
        .collect();
    let last = expected.len() - 1;
    expected[last] += n - expected.iter().sum::<f64>().min(n);
    // Merge a deficient trailing bin into its neighbor.
    if expected[last] < min_expected && expected.len() > 2 {
        let o = observed.pop().unwrap();
        let e = expected.pop().unwrap();
        *observed.last_mut().unwrap() += o;
        *expected.last_mut().unwrap() += e;
    }
    chi_square_gof(&observed, &expected)
}

/// Wilson score interval for a binomial proportion at the given normal
/// quantile z (1.96 for a 95% interval).
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Ordinary least squares line y = slope x + intercept.
pub fn ols_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least squares for y ~ c1 * b1 + c2 * b2 (no intercept); returns
/// (c1, c2) from the 2x2 normal equations.
pub fn fit_two_basis(ys: &[f64], b1: &[f64], b2: &[f64]) -> (f64, f64) {
    assert!(ys.len() == b1.len() && ys.len() == b2.len() && ys.len() >= 2);
    let (mut a11, mut a12, mut a22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..ys.len() {
        a11 += b1[i] * b1[i];
        a12 += b1[i] * b2[i];
        a22 += b2[i] * b2[i];
        r1 += b1[i] * ys[i];
        r2 += b2[i] * ys[i];
    }
    let det = a11 * a22 - a12 * a12;
    assert!(det.abs() > 0.0, "degenerate basis");
    ((a22 * r1 - a12 * r2) / det, (a11 * r2 - a12 * r1) / det)
}
