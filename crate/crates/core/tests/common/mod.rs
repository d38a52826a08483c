//! Shared test oracles, independent of the library's computation paths.
#![allow(dead_code)] // each test target uses a different subset

/// Unit-ball volumes for the low dimensions the Steiner oracle covers,
/// hardcoded closed forms.
pub fn kappa(m: usize) -> f64 {
    match m {
        0 => 1.0,
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("steiner oracle only covers n <= 3"),
    }
}

/// Coefficients `c_0..c_n` of the degree-`n` polynomial through the points
/// `(ts[i], fs[i])`, by Vandermonde solve with partial pivoting.
pub fn fit_polynomial(ts: &[f64], fs: &[f64]) -> Vec<f64> {
    let n = ts.len();
    assert_eq!(fs.len(), n);
    let mut a: Vec<Vec<f64>> = ts
        .iter()
        .map(|&t| (0..n).map(|j| t.powi(j as i32)).collect())
        .collect();
    let mut b = fs.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for j in col..n {
                a[row][j] -= factor * a[col][j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row][j] * x[j];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Intrinsic volumes `V_0..V_n` extracted from a Minkowski-sum volume
/// function `t ↦ vol(K + tB)` by fitting its Steiner polynomial
/// `Σ_i κ_{n−i} V_i t^{n−i}` at `n+1` sample points.
pub fn steiner_intrinsic_volumes(n: usize, vol: impl Fn(f64) -> f64) -> Vec<f64> {
    let ts: Vec<f64> = (0..=n).map(|i| i as f64).collect();
    let fs: Vec<f64> = ts.iter().map(|&t| vol(t)).collect();
    let coeffs = fit_polynomial(&ts, &fs);
    (0..=n).map(|i| coeffs[n - i] / kappa(n - i)).collect()
}

/// `vol(RBⁿ + tBⁿ) = κ_n (R+t)ⁿ`.
pub fn ball_minkowski_volume(radius: f64, n: usize, t: f64) -> f64 {
    kappa(n) * (radius + t).powi(n as i32)
}

/// `vol(box + tB)` for boxes in dimensions 1-3: volume, faces, quarter
/// cylinders along the edges, and ball corners.
pub fn box_minkowski_volume(sides: &[f64], t: f64) -> f64 {
    use std::f64::consts::PI;
    match sides {
        [a] => a + 2.0 * t,
        [a, b] => a * b + 2.0 * (a + b) * t + PI * t * t,
        [a, b, c] => {
            a * b * c
                + 2.0 * (a * b + b * c + c * a) * t
                + PI * (a + b + c) * t * t
                + 4.0 * PI / 3.0 * t * t * t
        }
        _ => panic!("box oracle only covers n <= 3"),
    }
}
