//! Small numerical helpers shared across the crate: compensated summation,
//! log-sum-exp, and log-factorials.

/// Kahan compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

/// `ln(Σ exp(x_i))` with the usual max shift. Empty input and all-`-inf`
/// input both yield `-inf`.
pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = KahanSum::new();
    for &x in xs {
        acc.add((x - m).exp());
    }
    m + acc.value().ln()
}

/// `ln(n!)` by direct accumulation of logs.
pub(crate) fn log_factorial(n: usize) -> f64 {
    let mut acc = KahanSum::new();
    for i in 2..=n {
        acc.add((i as f64).ln());
    }
    acc.value()
}

/// `ln C(n, k)`.
pub(crate) fn log_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_factorial_small_values() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        assert!((log_factorial(5) - 120f64.ln()).abs() < 1e-13);
        assert!((log_factorial(10) - 3628800f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_matches_naive() {
        let xs = [0.1, -2.0, 1.5, 0.0];
        let naive: f64 = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - naive).abs() < 1e-14);
    }

    #[test]
    fn log_sum_exp_survives_large_inputs() {
        let xs = [1000.0, 1001.0];
        let expected = 1001.0 + 1.0f64.exp().recip().ln_1p();
        assert!((log_sum_exp(&xs) - expected).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_empty_is_neg_inf() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }

    #[test]
    fn log_binomial_matches_pascal() {
        assert!((log_binomial(6, 2) - 15f64.ln()).abs() < 1e-13);
        assert!((log_binomial(30, 15) - 155117520f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn kahan_beats_naive_on_ill_conditioned_sum() {
        let mut k = KahanSum::new();
        for _ in 0..10_000 {
            k.add(0.1);
        }
        assert!((k.value() - 1000.0).abs() < 1e-10);
    }
}
