//! Central finite differences, used as an independent oracle for the
//! closed-form derivatives elsewhere in the crate. Steps are relative to
//! the magnitude of each coordinate.

fn step(x: f64, rel: f64) -> f64 {
    rel * x.abs().max(1e-3)
}

pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, rel: f64) -> f64 {
    let h = step(x, rel);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub fn second_derivative<F: Fn(f64) -> f64>(f: F, x: f64, rel: f64) -> f64 {
    let h = step(x, rel);
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

pub fn gradient<F: Fn(&[f64]) -> f64>(f: F, point: &[f64; 2], rel: f64) -> [f64; 2] {
    let mut out = [0.0; 2];
    let mut p = *point;
    for i in 0..2 {
        let h = step(point[i], rel);
        p[i] = point[i] + h;
        let fp = f(&p);
        p[i] = point[i] - h;
        let fm = f(&p);
        p[i] = point[i];
        out[i] = (fp - fm) / (2.0 * h);
    }
    out
}

pub fn hessian<F: Fn(&[f64]) -> f64>(f: F, point: &[f64; 2], rel: f64) -> [[f64; 2]; 2] {
    let (a, b) = (point[0], point[1]);
    let ha = step(a, rel);
    let hb = step(b, rel);
    let f0 = f(&[a, b]);
    let faa = (f(&[a + ha, b]) - 2.0 * f0 + f(&[a - ha, b])) / (ha * ha);
    let fbb = (f(&[a, b + hb]) - 2.0 * f0 + f(&[a, b - hb])) / (hb * hb);
    let fab =
        (f(&[a + ha, b + hb]) - f(&[a + ha, b - hb]) - f(&[a - ha, b + hb]) + f(&[a - ha, b - hb])) / (4.0 * ha * hb);
    [[faa, fab], [fab, fbb]]
}

/// Central differences of a vector field `g`; row `i` holds `∂g/∂xᵢ`.
pub fn jacobian<F: Fn(&[f64]) -> [f64; 2]>(g: F, point: &[f64; 2], rel: f64) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    let mut p = *point;
    for i in 0..2 {
        let h = step(point[i], rel);
        p[i] = point[i] + h;
        let gp = g(&p);
        p[i] = point[i] - h;
        let gm = g(&p);
        p[i] = point[i];
        for j in 0..2 {
            out[i][j] = (gp[j] - gm[j]) / (2.0 * h);
        }
    }
    out
}
