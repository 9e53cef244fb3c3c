//! Full-batch deterministic optimizers: L-BFGS for smooth objectives and
//! accelerated proximal gradient for an added `λ‖·‖₁` term.

use std::collections::VecDeque;

use crate::Real;

/// Stopping rule shared by both optimizers.
#[derive(Clone, Copy, Debug)]
pub struct StopRule<T> {
    /// Threshold on the infinity norm of the (minimum-norm sub)gradient.
    pub tolerance: T,
    pub max_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct OptimOutcome<T> {
    pub x: Vec<T>,
    pub loss: T,
    pub grad_inf_norm: T,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn inf_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

fn axpy<T: Real>(alpha: T, x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&a, &b)| b + alpha * a).collect()
}

const MEMORY: usize = 10;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

/// Minimizes a smooth function. `eval` returns the value and gradient.
pub fn lbfgs<T: Real>(mut eval: impl FnMut(&[T]) -> (T, Vec<T>), x0: Vec<T>, stop: StopRule<T>) -> OptimOutcome<T> {
    let mut x = x0;
    let (mut f, mut g) = eval(&x);
    let mut history: VecDeque<(Vec<T>, Vec<T>, T)> = VecDeque::with_capacity(MEMORY);
    let mut iterations = 0;
    let half = T::of(0.5);
    while iterations < stop.max_iterations {
        if inf_norm(&g) <= stop.tolerance {
            break;
        }
        let mut d = two_loop(&g, &history);
        let mut gd = dot(&g, &d);
        if gd.is_nan() || gd >= T::zero() {
            history.clear();
            d = g.iter().map(|&v| -v).collect();
            gd = dot(&g, &d);
        }
        let mut step = if history.is_empty() {
            T::one().min(T::one() / dot(&g, &g).sqrt())
        } else {
            T::one()
        };
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = axpy(step, &d, &x);
            let (ft, gt) = eval(&trial);
            if ft.is_finite() && ft <= f + T::of(ARMIJO) * step * gd {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= half;
        }
        let Some((xn, fnew, gn)) = accepted else {
            if history.is_empty() {
                break;
            }
            history.clear();
            continue;
        };
        let s: Vec<T> = xn.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let yv: Vec<T> = gn.iter().zip(&g).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > T::epsilon() * dot(&yv, &yv) {
            if history.len() == MEMORY {
                history.pop_front();
            }
            history.push_back((s, yv, T::one() / sy));
        }
        x = xn;
        f = fnew;
        g = gn;
        iterations += 1;
    }
    let grad_inf_norm = inf_norm(&g);
    OptimOutcome {
        converged: grad_inf_norm <= stop.tolerance,
        x,
        loss: f,
        grad_inf_norm,
        iterations,
    }
}

/// `-H g` for the inverse-Hessian approximation held in `history`.
fn two_loop<T: Real>(g: &[T], history: &VecDeque<(Vec<T>, Vec<T>, T)>) -> Vec<T> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = *rho * dot(s, &q);
        for (qi, &yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in &mut q {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = *rho * dot(y, &q);
        for (qi, &si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    for qi in &mut q {
        *qi = -*qi;
    }
    q
}

fn soft_threshold<T: Real>(v: T, t: T) -> T {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        T::zero()
    }
}

/// Infinity norm of the minimum-norm element of `∇f + λ∂‖x_S‖₁`, where
/// `shrink[i]` marks the coordinates in `S`.
pub fn l1_optimality<T: Real>(x: &[T], g: &[T], lambda: T, shrink: &[bool]) -> T {
    x.iter()
        .zip(g)
        .zip(shrink)
        .map(|((&xi, &gi), &s)| {
            if !s {
                gi.abs()
            } else if xi > T::zero() {
                (gi + lambda).abs()
            } else if xi < T::zero() {
                (gi - lambda).abs()
            } else {
                (gi.abs() - lambda).max(T::zero())
            }
        })
        .fold(T::zero(), |m, v| m.max(v))
}

/// Minimizes `f(x) + λ Σ_{i∈S} |x_i|` with FISTA, backtracking on the
/// Lipschitz estimate and restarting momentum whenever the objective rises.
pub fn proximal_gradient<T: Real>(
    mut eval: impl FnMut(&[T]) -> (T, Vec<T>),
    x0: Vec<T>,
    lambda: T,
    shrink: &[bool],
    stop: StopRule<T>,
) -> OptimOutcome<T> {
    let penalty = |x: &[T]| -> T {
        lambda
            * x.iter()
                .zip(shrink)
                .filter(|(_, &s)| s)
                .map(|(v, _)| v.abs())
                .sum::<T>()
    };
    let two = T::of(2.0);
    let mut x = x0;
    let (mut fx, mut gx) = eval(&x);
    let mut objective = fx + penalty(&x);
    let mut y = x.clone();
    let (mut fy, mut gy) = (fx, gx.clone());
    let mut t = T::one();
    let mut lipschitz = T::one().max(inf_norm(&gx));
    let mut iterations = 0;
    let mut opt = l1_optimality(&x, &gx, lambda, shrink);
    while iterations < stop.max_iterations && opt > stop.tolerance {
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let inv = T::one() / lipschitz;
            let xn: Vec<T> = y
                .iter()
                .zip(&gy)
                .zip(shrink)
                .map(|((&yi, &gi), &s)| {
                    let v = yi - inv * gi;
                    if s {
                        soft_threshold(v, lambda * inv)
                    } else {
                        v
                    }
                })
                .collect();
            let diff: Vec<T> = xn.iter().zip(&y).map(|(&a, &b)| a - b).collect();
            let (fxn, gxn) = eval(&xn);
            let bound = fy + dot(&gy, &diff) + lipschitz / two * dot(&diff, &diff);
            if fxn.is_finite() && fxn <= bound + T::epsilon() * fy.abs() {
                accepted = Some((xn, fxn, gxn));
                break;
            }
            lipschitz *= two;
        }
        let Some((xn, fxn, gxn)) = accepted else { break };
        iterations += 1;
        let obj_n = fxn + penalty(&xn);
        opt = l1_optimality(&xn, &gxn, lambda, shrink);
        if obj_n > objective {
            // Momentum overshot: restart from the previous iterate.
            t = T::one();
            y = x.clone();
            fy = fx;
            gy = gx.clone();
            opt = l1_optimality(&x, &gx, lambda, shrink);
            continue;
        }
        let tn = (T::one() + (T::one() + T::of(4.0) * t * t).sqrt()) / two;
        let momentum = (t - T::one()) / tn;
        let yn: Vec<T> = xn.iter().zip(&x).map(|(&a, &b)| a + momentum * (a - b)).collect();
        x = xn;
        fx = fxn;
        gx = gxn;
        objective = obj_n;
        t = tn;
        if momentum == T::zero() {
            y = x.clone();
            fy = fx;
            gy = gx.clone();
        } else {
            y = yn;
            let (a, b) = eval(&y);
            fy = a;
            gy = b;
        }
        lipschitz *= T::of(0.9);
    }
    let opt = l1_optimality(&x, &gx, lambda, shrink);
    OptimOutcome {
        converged: opt <= stop.tolerance,
        loss: objective,
        grad_inf_norm: opt,
        x,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(x: &[f64]) -> (f64, Vec<f64>) {
        // f = Σ i (x_i - 1)^2 / 2 with i = 1..n
        let f = x
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as f64 + 1.0) * (v - 1.0).powi(2) / 2.0)
            .sum();
        let g = x
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as f64 + 1.0) * (v - 1.0))
            .collect();
        (f, g)
    }

    fn rosenbrock(x: &[f64]) -> (f64, Vec<f64>) {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        (f, g)
    }

    const STOP: StopRule<f64> = StopRule {
        tolerance: 1e-8,
        max_iterations: 1000,
    };

    #[test]
    fn lbfgs_solves_quadratic() {
        let out = lbfgs(quad, vec![0.0; 5], STOP);
        assert!(out.converged);
        for v in &out.x {
            assert!((v - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn lbfgs_solves_rosenbrock() {
        let out = lbfgs(rosenbrock, vec![-1.2, 1.0], STOP);
        assert!(out.converged, "{out:?}");
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lbfgs_reports_iteration_cap() {
        let out = lbfgs(
            rosenbrock,
            vec![-1.2, 1.0],
            StopRule {
                tolerance: 1e-12,
                max_iterations: 3,
            },
        );
        assert_eq!(out.iterations, 3);
        assert!(!out.converged);
    }

    #[test]
    fn proximal_matches_soft_threshold_solution() {
        // min Σ i (x_i - 1)^2 / 2 + λ|x_i|  =>  x_i = max(0, 1 - λ / i)
        let lambda = 2.5;
        let out = proximal_gradient(quad, vec![0.0; 4], lambda, &[true; 4], STOP);
        assert!(out.converged, "{out:?}");
        for (i, v) in out.x.iter().enumerate() {
            let expected = (1.0 - lambda / (i as f64 + 1.0)).max(0.0);
            assert!((v - expected).abs() < 1e-8, "{i}: {v} vs {expected}");
        }
    }

    #[test]
    fn proximal_leaves_unshrunk_coordinates_alone() {
        let out = proximal_gradient(quad, vec![0.0; 2], 10.0, &[true, false], STOP);
        assert!(out.converged);
        assert_eq!(out.x[0], 0.0);
        assert!((out.x[1] - 1.0).abs() < 1e-8);
    }
}
