//! Scalar golden-section search and Nelder-Mead simplex minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarOptimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximizes `f` on `[a, b]`. Stops after `max_iter` interval reductions or
/// once the bracket is narrower than `xtol`. On equal interior values the
/// left sub-interval is kept, so ties resolve toward smaller `x`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    xtol: f64,
    max_iter: usize,
) -> ScalarOptimum {
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    for _ in 0..max_iter {
        if (b - a).abs() <= xtol {
            break;
        }
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
        evals += 1;
    }
    if fc >= fd {
        ScalarOptimum { x: c, value: fc, evaluations: evals }
    } else {
        ScalarOptimum { x: d, value: fd, evaluations: evals }
    }
}

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    pub max_evaluations: usize,
    /// Stop when the spread of simplex values falls below this.
    pub ftol: f64,
    /// and the simplex diameter falls below this.
    pub xtol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { initial_step: 0.3, max_evaluations: 4000, ftol: 1e-12, xtol: 1e-9 }
    }
}

#[derive(Clone, Debug)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` with the standard Nelder-Mead simplex (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let mut converged = false;

    while evals < opts.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= opts.ftol && diameter <= opts.xtol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect()
        };

        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(-0.5);
            (xc.clone(), f(&xc))
        } else {
            let xc = along(0.5);
            (xc.clone(), f(&xc))
        };
        evals += 1;
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = simplex[i].iter().zip(&best).map(|(p, b)| b + 0.5 * (p - b)).collect();
            values[i] = f(&simplex[i]);
        }
        evals += n;
    }

    let k = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    NelderMeadResult { x: simplex[k].clone(), value: values[k], evaluations: evals, converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_finds_parabola_peak() {
        let r = golden_section_max(|x| -(x - 1.3) * (x - 1.3), -2.0, 5.0, 1e-10, 200);
        assert_abs_diff_eq!(r.x, 1.3, epsilon = 1e-8);
    }

    #[test]
    fn golden_ties_go_left() {
        // flat function: every comparison is a tie
        let r = golden_section_max(|_| 1.0, 0.0, 1.0, 1e-9, 200);
        assert!(r.x < 1e-6);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let rosen = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let opts = NelderMeadOptions { max_evaluations: 20_000, ..Default::default() };
        let r = nelder_mead(rosen, &[-1.2, 1.0], &opts);
        assert!(r.converged);
        assert_abs_diff_eq!(r.x[0], 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(r.x[1], 1.0, epsilon = 1e-5);
    }

    #[test]
    fn nelder_mead_quadratic_in_many_dims() {
        let f = |p: &[f64]| p.iter().enumerate().map(|(i, x)| (i as f64 + 1.0) * (x - 0.5).powi(2)).sum();
        let r = nelder_mead(f, &[0.0; 6], &NelderMeadOptions { max_evaluations: 50_000, ..Default::default() });
        for x in &r.x {
            assert_abs_diff_eq!(*x, 0.5, epsilon = 1e-4);
        }
    }
}
