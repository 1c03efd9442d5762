//! Minimum of a sampled gap curve.

/// Grid minimum of `(s, g)` samples, refined by the vertex of the parabola
/// through it and its two neighbours. Endpoint minima are returned as is.
pub fn min_gap_of_curve(samples: &[(f64, f64)]) -> Option<(f64, f64)> {
    let (at, &(s1, g1)) = samples
        .iter()
        .enumerate()
        .filter(|(_, p)| p.1.is_finite())
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
    if at == 0 || at + 1 == samples.len() {
        return Some((s1, g1));
    }
    let (s0, g0) = samples[at - 1];
    let (s2, g2) = samples[at + 1];
    if !(g0.is_finite() && g2.is_finite()) {
        return Some((s1, g1));
    }
    let d01 = (g1 - g0) / (s1 - s0);
    let d12 = (g2 - g1) / (s2 - s1);
    let c = (d12 - d01) / (s2 - s0);
    if c <= 0.0 {
        return Some((s1, g1));
    }
    let b = d01;
    // Newton form g(s) = g0 + b (s - s0) + c (s - s0)(s - s1)
    let vertex = 0.5 * (s0 + s1) - b / (2.0 * c);
    if !(s0..=s2).contains(&vertex) {
        return Some((s1, g1));
    }
    let value = g0 + b * (vertex - s0) + c * (vertex - s0) * (vertex - s1);
    Some((vertex, value))
}
