/// Composite Simpson rule on a uniform grid. Requires an odd number of samples.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "simpson needs an odd sample count >= 3, got {n}");
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n - 1 {
        if i % 2 == 1 {
            odd += values[i];
        } else {
            even += values[i];
        }
    }
    h / 3.0 * (values[0] + values[n - 1] + 4.0 * odd + 2.0 * even)
}

/// Fourth-order central first derivative; second-order one-sided at the two
/// outermost samples on each side.
pub fn fd_first_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5);
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2])
            / (12.0 * h);
    }
    d[1] = (values[2] - values[0]) / (2.0 * h);
    d[n - 2] = (values[n - 1] - values[n - 3]) / (2.0 * h);
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    d
}

/// Fourth-order central second derivative; second-order at the edges.
pub fn fd_second_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5);
    let h2 = h * h;
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (-values[i - 2] + 16.0 * values[i - 1] - 30.0 * values[i] + 16.0 * values[i + 1]
            - values[i + 2])
            / (12.0 * h2);
    }
    d[1] = (values[0] - 2.0 * values[1] + values[2]) / h2;
    d[n - 2] = (values[n - 3] - 2.0 * values[n - 2] + values[n - 1]) / h2;
    d[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / h2;
    d[n - 1] = (2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3] - values[n - 4]) / h2;
    d
}
