//! Bracketed scalar root finding (Brent: bisection safeguarded inverse
//! quadratic / secant steps).

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrentOptions {
    /// Relative tolerance on the abscissa.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for BrentOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub f: f64,
    pub iterations: usize,
    /// Width of the final bracket.
    pub bracket_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BrentError {
    NotBracketed { fa: f64, fb: f64 },
    NonFinite { x: f64 },
    MaxIterations(Root),
}

impl std::fmt::Display for BrentError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BrentError::NotBracketed { fa, fb } => {
                write!(f, "endpoints do not bracket a root (f(a) = {fa}, f(b) = {fb})")
            }
            BrentError::NonFinite { x } => write!(f, "function is not finite at {x}"),
            BrentError::MaxIterations(root) => write!(
                f,
                "no convergence after {} iterations (x = {}, f = {})",
                root.iterations, root.x, root.f
            ),
        }
    }
}

/// Finds a root of `f` in `[a, b]`, requiring `f(a)` and `f(b)` of opposite sign
/// (or one of them zero).
pub fn brent<F>(mut f: F, a: f64, b: f64, opts: BrentOptions) -> Result<Root, BrentError>
where
    F: FnMut(f64) -> f64,
{
    let mut a = a;
    let mut b = b;
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() {
        return Err(BrentError::NonFinite { x: a });
    }
    if !fb.is_finite() {
        return Err(BrentError::NonFinite { x: b });
    }
    if fa == 0.0 {
        return Ok(Root { x: a, f: fa, iterations: 0, bracket_width: 0.0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, f: fb, iterations: 0, bracket_width: 0.0 });
    }
    if fa.signum() == fb.signum() {
        return Err(BrentError::NotBracketed { fa, fb });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=opts.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * opts.rel_tol * b.abs();
        let half = 0.5 * (c - b);
        if half.abs() <= tol || fb == 0.0 {
            return Ok(Root { x: b, f: fb, iterations: iter, bracket_width: (c - b).abs() });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * half * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol {
            b += d;
        } else {
            b += tol.copysign(half);
        }
        fb = f(b);
        if !fb.is_finite() {
            return Err(BrentError::NonFinite { x: b });
        }
    }
    Err(BrentError::MaxIterations(Root {
        x: b,
        f: fb,
        iterations: opts.max_iter,
        bracket_width: (c - b).abs(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let root = brent(|x| x * x - 2.0, 0.0, 2.0, BrentOptions::default()).unwrap();
        assert!((root.x - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn handles_reversed_bracket_and_exact_endpoint() {
        let root = brent(|x| x - 1.0, 3.0, 0.5, BrentOptions::default()).unwrap();
        assert!((root.x - 1.0).abs() < 1e-12);
        let root = brent(|x| x - 1.0, 1.0, 3.0, BrentOptions::default()).unwrap();
        assert_eq!(root.x, 1.0);
        assert_eq!(root.iterations, 0);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(matches!(
            brent(|x| x * x + 1.0, -1.0, 1.0, BrentOptions::default()),
            Err(BrentError::NotBracketed { .. })
        ));
    }

    #[test]
    fn converges_on_flat_transcendental() {
        // Root of multiplicity three at x = 1.
        let root = brent(|x| (x - 1.0).powi(3), 0.0, 4.0, BrentOptions::default()).unwrap();
        assert!((root.x - 1.0).abs() < 1e-4);
        let root = brent(|x| x.ln() + x - 2.0, 0.1, 10.0, BrentOptions::default()).unwrap();
        assert!((root.x.ln() + root.x - 2.0).abs() < 1e-12);
    }
}
