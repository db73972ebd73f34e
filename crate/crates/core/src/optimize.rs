//! One-dimensional golden-section search.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes a unimodal `f` on `[a, b]` until the bracket is narrower than
/// `tol`. Returns `(x_min, f(x_min))`.
pub fn golden_section_minimize<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // 200 iterations shrink any bracket below f64 resolution
    for _ in 0..200 {
        if (b - a) <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

pub fn golden_section_maximize<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_section_minimize(|x| -f(x), a, b, tol);
    (x, -v)
}

/// Vertex of the parabola through three equally spaced samples, as an
/// offset in units of the spacing from the middle sample, with the value
/// there. Returns the middle sample when the samples are collinear.
pub fn parabolic_vertex(left: f64, mid: f64, right: f64) -> (f64, f64) {
    let curv = left - 2.0 * mid + right;
    if curv == 0.0 {
        return (0.0, mid);
    }
    let offset = 0.5 * (left - right) / curv;
    let offset = offset.clamp(-1.0, 1.0);
    let value = mid + 0.25 * (right - left) * offset;
    (offset, value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum() {
        let (x, v) = golden_section_minimize(|x| (x - 0.3).powi(2) + 1.0, -2.0, 5.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kink_maximum() {
        let (x, v) = golden_section_maximize(|x| 1.0 - (x + 0.25).abs(), -1.0, 1.0, 1e-13);
        assert!((x + 0.25).abs() < 1e-12);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parabola_through_samples() {
        let p = |x: f64| 2.0 * (x - 0.4).powi(2) - 3.0;
        let (o, v) = parabolic_vertex(p(-1.0), p(0.0), p(1.0));
        assert!((o - 0.4).abs() < 1e-14);
        assert!((v + 3.0).abs() < 1e-14);
    }
}
