//! Small statistics helpers for comparing maps and fits.

/// Pearson correlation coefficient. Returns NaN when either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "pearson inputs differ in length");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / (sxx * syy).sqrt()
}

/// Ordinary least-squares line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len(), "linear_fit inputs differ in length");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    let slope = sxy / sxx;
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared: sxy * sxy / (sxx * syy),
    }
}

/// Least-squares amplitude `A` of `y ≈ A·f` and the residual RMS relative to
/// |A|.
pub fn fit_amplitude(f: &[f64], y: &[f64]) -> (f64, f64) {
    let num: f64 = f.iter().zip(y).map(|(a, b)| a * b).sum();
    let den: f64 = f.iter().map(|a| a * a).sum();
    let amp = num / den;
    let rss: f64 = f.iter().zip(y).map(|(a, b)| (b - amp * a).powi(2)).sum();
    let rms = (rss / f.len() as f64).sqrt();
    (amp, rms / amp.abs())
}
