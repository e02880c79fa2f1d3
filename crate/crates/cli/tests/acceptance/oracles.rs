//! Independent oracles for the acceptance suite. Nothing here shares code
//! with the implementation paths it checks.

/// Exact minimum-cost perfect matching (Hungarian algorithm with
/// potentials, O(n^3)). `cost[i][j]` is the cost of assigning row i to
/// column j.
pub fn assignment_cost(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // row matched to column j (1-based, 0 = free)
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| cost[matched_row[j] - 1][j - 1]).sum()
}

/// W1 between equal-size empirical samples via the assignment oracle.
pub fn assignment_w1(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    assert_eq!(n, b.len());
    let cost: Vec<Vec<f64>> =
        a.iter().map(|x| b.iter().map(|y| (x - y).abs()).collect()).collect();
    assignment_cost(&cost) / n as f64
}

/// W1 between the standard normal and Uniform(0, 1) laws by Simpson
/// quadrature of |Phi(x) - F_U(x)| over a wide truncation window.
pub fn quadrature_w1_normal_uniform() -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let normal = Normal::new(0.0, 1.0).unwrap();
    let f = |x: f64| {
        let fu = x.clamp(0.0, 1.0);
        (normal.cdf(x) - fu).abs()
    };
    let (lo, hi) = (-12.0f64, 13.0f64);
    let n = 1 << 20; // even
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + h * k as f64);
    }
    acc * h / 3.0
}

/// Relative error with a unit floor, so near-zero pairs compare absolutely.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
