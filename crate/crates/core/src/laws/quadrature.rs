use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton's
/// method on the Legendre recurrence.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; m];
    let mut ws = vec![0.0; m];
    let mf = m as f64;
    for k in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[k] = -x;
        xs[m - 1 - k] = x;
        ws[k] = w;
        ws[m - 1 - k] = w;
    }
    (xs, ws)
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for n in 2..=m {
        let nf = n as f64;
        let p2 = ((2.0 * nf - 1.0) * x * p1 - (nf - 1.0) * p0) / nf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The 64-node rule used by all density integrals.
pub fn gl64() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(64))
}

/// Integrates `f` over `[a, b]` with the 64-node rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (xs, ws) = gl64();
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    xs.iter().zip(ws).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let (xs, ws) = gauss_legendre(10);
        assert!((ws.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // degree 19 is integrated exactly
        let s: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        assert!((integrate(|x| x.cos(), 0.0, 1.0) - 1f64.sin()).abs() < 1e-15);
    }
}
