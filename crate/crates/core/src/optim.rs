//! Box-constrained Nelder–Mead simplex search.
//!
//! Trial points are clamped into the box before evaluation. The best vertex
//! value is recorded after every iteration; it never increases.

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Relative spread of simplex values at which the search stops.
    pub ftol: f64,
    pub initial_step: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Fresh simplices built around the optimum after convergence.
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

impl NelderMead {
    pub fn new(dim: usize) -> Self {
        Self {
            max_iter: 500,
            ftol: 1e-10,
            initial_step: 0.2,
            lower: vec![f64::NEG_INFINITY; dim],
            upper: vec![f64::INFINITY; dim],
            restarts: 1,
        }
    }

    pub fn bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    fn clamp(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let mut history = Vec::new();
        let mut iterations = 0;
        let mut start = x0.to_vec();
        self.clamp(&mut start);
        let (mut best_x, mut best_f, mut converged) = self.run(&mut f, &start, &mut iterations, &mut history);
        for _ in 0..self.restarts {
            if !converged || iterations >= self.max_iter {
                break;
            }
            let (x, fx, conv) = self.run(&mut f, &best_x, &mut iterations, &mut history);
            converged = conv;
            let improved = fx < best_f;
            if improved {
                best_x = x;
                best_f = fx;
            }
            if !improved || (best_f - fx).abs() <= self.ftol * (best_f.abs() + 1e-300) {
                break;
            }
        }
        Minimum { x: best_x, value: best_f, iterations, converged, history }
    }

    fn run<F: FnMut(&[f64]) -> f64>(
        &self,
        f: &mut F,
        start: &[f64],
        iterations: &mut usize,
        history: &mut Vec<f64>,
    ) -> (Vec<f64>, f64, bool) {
        let n = start.len();
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(start.to_vec());
        for i in 0..n {
            let mut v = start.to_vec();
            let step = if v[i] + self.initial_step <= self.upper[i] { self.initial_step } else { -self.initial_step };
            v[i] += step;
            self.clamp(&mut v);
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
        // the best value carried in from an earlier run
        let floor = history.last().copied().unwrap_or(f64::INFINITY);

        let mut converged = false;
        while *iterations < self.max_iter {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let (best, worst) = (values[0], values[n]);
            if (worst - best).abs() <= self.ftol * (best.abs() + 1e-300) {
                converged = true;
                break;
            }
            *iterations += 1;

            let centroid: Vec<f64> =
                (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
            let along = |t: f64| -> Vec<f64> {
                let mut p: Vec<f64> = centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (c - w)).collect();
                self.clamp(&mut p);
                p
            };

            let reflected = along(1.0);
            let fr = f(&reflected);
            if fr < values[0] {
                let expanded = along(2.0);
                let fe = f(&expanded);
                if fe < fr {
                    simplex[n] = expanded;
                    values[n] = fe;
                } else {
                    simplex[n] = reflected;
                    values[n] = fr;
                }
            } else if fr < values[n - 1] {
                simplex[n] = reflected;
                values[n] = fr;
            } else {
                let (contracted, fc) = if fr < values[n] {
                    let c = along(0.5);
                    let fc = f(&c);
                    (c, fc)
                } else {
                    let c = along(-0.5);
                    let fc = f(&c);
                    (c, fc)
                };
                if fc < values[n].min(fr) {
                    simplex[n] = contracted;
                    values[n] = fc;
                } else {
                    // shrink towards the best vertex
                    for i in 1..=n {
                        let mut v: Vec<f64> =
                            simplex[0].iter().zip(&simplex[i]).map(|(b, x)| b + 0.5 * (x - b)).collect();
                        self.clamp(&mut v);
                        values[i] = f(&v);
                        simplex[i] = v;
                    }
                }
            }
            let current = values.iter().copied().fold(f64::INFINITY, f64::min);
            history.push(current.min(floor));
        }

        let (i_best, _) = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("simplex is nonempty");
        (simplex[i_best].clone(), values[i_best], converged)
    }
}
