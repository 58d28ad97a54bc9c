/// Composite trapezoid rule for samples `ys` at abscissae `xs`.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Trapezoid rule for `f` on `count` equally spaced points of `[a, b]`.
pub fn trapezoid_fn(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, count: usize) -> f64 {
    assert!(count >= 2);
    let h = (b - a) / (count - 1) as f64;
    let interior: f64 = (1..count - 1).map(|i| f(a + i as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + interior)
}
