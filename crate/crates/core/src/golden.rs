//! Golden-section search for the maximum of a unimodal function.

const INV_PHI: f64 = 0.618_033_988_749_894_8; // (√5 − 1)/2

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Maximizes `f` on `[lo, hi]` until the bracket is narrower than `tol`.
pub fn maximize<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> GoldenResult {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a).abs() > tol {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let value = f(x);
    // the midpoint can land a hair below the best probe on a flat top
    let (x, value) = [(x, value), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, value), |best, p| if p.1 > best.1 { p } else { best });
    GoldenResult {
        x,
        value,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_peak() {
        let r = maximize(|x| -(x - 1.234).powi(2), -10.0, 10.0, 1e-10);
        assert!((r.x - 1.234).abs() < 1e-7);
        assert!(r.value <= 0.0);
    }

    #[test]
    fn peak_at_edge() {
        let r = maximize(|x| x, 0.0, 1.0, 1e-10);
        assert!((r.x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reversed_bracket() {
        let r = maximize(|x: f64| -(x + 2.0).abs(), 5.0, -5.0, 1e-12);
        assert!((r.x + 2.0).abs() < 1e-10);
    }
}
