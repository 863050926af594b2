//! Derivative-free simplex minimisation with a hard evaluation budget.

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Edge length of the initial simplex.
    pub step: f64,
    pub max_evals: usize,
    /// Stop once the spread of simplex values falls below this.
    pub ftol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { step: 0.4, max_evals: 200, ftol: 1e-12 }
    }
}

struct Budget<F> {
    f: F,
    used: usize,
    limit: usize,
}

impl<F: FnMut(&[f64]) -> f64> Budget<F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.used >= self.limit {
            return None;
        }
        self.used += 1;
        let v = (self.f)(x);
        Some(if v.is_nan() { f64::INFINITY } else { v })
    }
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

impl NelderMead {
    /// Minimises `f` from `x0`. Always returns the best point seen, which
    /// includes `x0` itself whenever the budget allows one evaluation.
    pub fn minimize(&self, f: impl FnMut(&[f64]) -> f64, x0: &[f64]) -> Minimum {
        let dim = x0.len();
        let mut budget = Budget { f, used: 0, limit: self.max_evals.max(1) };
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        let v0 = budget.eval(x0).expect("budget allows one evaluation");
        simplex.push((x0.to_vec(), v0));
        for i in 0..dim {
            let mut x = x0.to_vec();
            x[i] += self.step;
            match budget.eval(&x) {
                Some(v) => simplex.push((x, v)),
                None => return finish(simplex, budget.used),
            }
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[dim].1;
            if dim == 0 || (worst - best).abs() <= self.ftol * (1.0 + best.abs()) {
                break;
            }
            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..dim] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / dim as f64;
                }
            }
            let xw = simplex[dim].0.clone();
            let xr = lerp(&centroid, &xw, -1.0);
            let Some(fr) = budget.eval(&xr) else { break };

            if fr < best {
                let xe = lerp(&centroid, &xw, -2.0);
                let Some(fe) = budget.eval(&xe) else {
                    simplex[dim] = (xr, fr);
                    break;
                };
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
                continue;
            }
            let (xc, bound) = if fr < worst {
                (lerp(&centroid, &xr, 0.5), fr)
            } else {
                (lerp(&centroid, &xw, 0.5), worst)
            };
            let Some(fc) = budget.eval(&xc) else { break };
            if fc < bound {
                simplex[dim] = (xc, fc);
                continue;
            }
            let anchor = simplex[0].0.clone();
            let mut exhausted = false;
            for vertex in simplex.iter_mut().skip(1) {
                let x = lerp(&anchor, &vertex.0, 0.5);
                match budget.eval(&x) {
                    Some(v) => *vertex = (x, v),
                    None => {
                        exhausted = true;
                        break;
                    }
                }
            }
            if exhausted {
                break;
            }
        }
        finish(simplex, budget.used)
    }
}

fn finish(simplex: Vec<(Vec<f64>, f64)>, evaluations: usize) -> Minimum {
    let (x, value) = simplex
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex holds the starting point");
    Minimum { x, value, evaluations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let nm = NelderMead { max_evals: 2000, ..Default::default() };
        let m = nm.minimize(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0]);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] + 2.0).abs() < 1e-4, "{:?}", m.x);
        assert!(m.evaluations <= 2000);
    }

    #[test]
    fn rosenbrock() {
        let nm = NelderMead { max_evals: 5000, step: 0.5, ftol: 1e-14 };
        let m = nm.minimize(|x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2), &[-1.2, 1.0]);
        assert!(m.value < 1e-8, "{m:?}");
    }

    #[test]
    fn respects_budget() {
        let mut calls = 0;
        let nm = NelderMead { max_evals: 17, ..Default::default() };
        let m = nm.minimize(
            |x| {
                calls += 1;
                x.iter().map(|v| v.sin()).sum()
            },
            &[0.3; 4],
        );
        assert_eq!(m.evaluations, 17);
        assert_eq!(calls, 17);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| (3.0 * x[0]).cos() * (2.0 * x[1]).sin();
        let x0 = [0.9, -0.4];
        let start = f(&x0);
        for evals in 1..40 {
            let m = NelderMead { max_evals: evals, ..Default::default() }.minimize(f, &x0);
            assert!(m.value <= start);
        }
    }
}
