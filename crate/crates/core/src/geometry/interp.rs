/// Cubic Hermite interpolation of `(xs, ys)` with prescribed slopes `dys`,
/// evaluated at `targets`. `xs` must be strictly increasing and cover the
/// targets.
///
/// On intervals where the data is monotone and the slopes agree in sign
/// with the secant, slopes are scaled into the Fritsch–Carlson region so
/// the interpolant cannot overshoot.
pub fn hermite_resample(xs: &[f64], ys: &[f64], dys: &[f64], targets: &[f64]) -> Vec<f64> {
    debug_assert!(xs.len() == ys.len() && ys.len() == dys.len() && xs.len() >= 2);
    let mut out = Vec::with_capacity(targets.len());
    let mut k = 0usize;
    for &t in targets {
        while k + 2 < xs.len() && xs[k + 1] < t {
            k += 1;
        }
        while k > 0 && xs[k] > t {
            k -= 1;
        }
        let h = xs[k + 1] - xs[k];
        let secant = (ys[k + 1] - ys[k]) / h;
        let (mut d0, mut d1) = (dys[k], dys[k + 1]);
        if secant != 0.0 && d0 * secant > 0.0 && d1 * secant > 0.0 {
            let a = d0 / secant;
            let b = d1 / secant;
            let r2 = a * a + b * b;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                d0 *= tau;
                d1 *= tau;
            }
        }
        let u = (t - xs[k]) / h;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        out.push(h00 * ys[k] + h10 * h * d0 + h01 * ys[k + 1] + h11 * h * d1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_reproduced() {
        let f = |x: f64| x * x * x - 2.0 * x;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let xs: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let ds: Vec<f64> = xs.iter().map(|&x| df(x)).collect();
        let ts = [0.0, 0.05, 0.333, 0.71, 1.0];
        for (t, v) in ts.iter().zip(hermite_resample(&xs, &ys, &ds, &ts)) {
            assert!((v - f(*t)).abs() < 1e-14, "{t}");
        }
    }

    #[test]
    fn no_overshoot_on_step() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [0.0, 0.1, 0.9, 1.0];
        let ds = [0.1, 10.0, 10.0, 0.1];
        let ts: Vec<f64> = (0..=30).map(|i| i as f64 * 0.1).collect();
        for v in hermite_resample(&xs, &ys, &ds, &ts) {
            assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{v}");
        }
    }
}
