//! Limited-memory BFGS with Armijo backtracking, sized for the few-hundred
//! variable problems produced by path transcription.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iters: usize,
    /// Stop when the largest gradient component falls below this.
    pub grad_tol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 12,
            max_iters: 3000,
            grad_tol: 1e-11,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LbfgsReport {
    pub iters: usize,
    pub value: f64,
    pub grad_inf: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Minimises `f`, which writes its gradient into the second argument and returns the value.
pub fn minimize<F>(mut f: F, x: &mut [f64], opts: &LbfgsOptions) -> LbfgsReport
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut fx = f(x, &mut g);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut dir = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut alpha = vec![0.0; opts.memory];
    let mut stalls = 0;

    for iter in 0..opts.max_iters {
        let grad_inf = inf_norm(&g);
        if grad_inf <= opts.grad_tol || !fx.is_finite() {
            return LbfgsReport {
                iters: iter,
                value: fx,
                grad_inf,
                converged: fx.is_finite(),
            };
        }

        // two-loop recursion
        dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi);
        for (k, (s, y, rho)) in history.iter().enumerate().rev() {
            alpha[k] = rho * dot(s, &dir);
            dir.iter_mut().zip(y).for_each(|(d, yi)| *d -= alpha[k] * yi);
        }
        let gamma = history
            .back()
            .map_or(1.0 / grad_inf.max(1e-300), |(s, y, _)| dot(s, y) / dot(y, y));
        dir.iter_mut().for_each(|d| *d *= gamma);
        for (k, (s, y, rho)) in history.iter().enumerate() {
            let beta = rho * dot(y, &dir);
            dir.iter_mut().zip(s).for_each(|(d, si)| *d += (alpha[k] - beta) * si);
        }
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 {
            history.clear();
            dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi / grad_inf);
            slope = dot(&g, &dir);
        }

        let mut step = 1.0;
        let mut accepted = false;
        let mut f_new = fx;
        for _ in 0..60 {
            x_new.iter_mut().zip(x.iter().zip(&dir)).for_each(|(xn, (xi, di))| *xn = xi + step * di);
            f_new = f(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= fx + 1e-4 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return LbfgsReport {
                iters: iter,
                value: fx,
                grad_inf,
                converged: false,
            };
        }

        let s: Vec<f64> = x_new.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() && sy > 0.0 {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        if fx - f_new <= 1e-16 * fx.abs().max(1e-300) {
            stalls += 1;
        } else {
            stalls = 0;
        }
        x.copy_from_slice(&x_new);
        g.copy_from_slice(&g_new);
        fx = f_new;
        if stalls >= 8 {
            return LbfgsReport {
                iters: iter + 1,
                value: fx,
                grad_inf: inf_norm(&g),
                converged: false,
            };
        }
    }
    LbfgsReport {
        iters: opts.max_iters,
        value: fx,
        grad_inf: inf_norm(&g),
        converged: false,
    }
}
