//! Golden-section minimization of unimodal scalar functions.

/// `(3 - sqrt 5) / 2`
const INV_PHI_SQ: f64 = 0.381_966_011_250_105_1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes `f` on `[lo, hi]` until the bracket is narrower than `tol`.
///
/// `f` must be unimodal on the interval. Infinite values are allowed and
/// simply lose every comparison. The returned point is the best of the final
/// bracket's interior probes and both original endpoints.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Minimum {
    assert!(lo <= hi, "golden_section: empty interval [{lo}, {hi}]");
    assert!(tol > 0.0, "golden_section: tolerance must be positive");

    let (mut a, mut b) = (lo, hi);
    let mut c = a + INV_PHI_SQ * (b - a);
    let mut d = b - INV_PHI_SQ * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while b - a > tol {
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = a + INV_PHI_SQ * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = b - INV_PHI_SQ * (b - a);
            fd = f(d);
        }
    }

    let mid = 0.5 * (a + b);
    [(mid, f(mid)), (c, fc), (d, fd), (lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold(None::<(f64, f64)>, |best, cand| match best {
            Some(b) if !(cand.1 < b.1) => Some(b),
            _ => Some(cand),
        })
        .map(|(x, value)| Minimum {
            x,
            value,
            iterations,
        })
        .expect("candidate list is non-empty")
}
