//! Derivative-free Nelder-Mead simplex minimization.
//!
//! Standard coefficients (reflection 1, expansion 2, contraction 0.5,
//! shrink 0.5) with a function-value convergence criterion: the spread
//! between the best and worst vertex. Objective values of `+inf` are
//! legal and simply rank worst, which is how callers reject out-of-domain
//! points.

#[derive(Debug, Clone)]
pub struct NelderMeadConfig {
    pub max_iterations: usize,
    /// Convergence when `f(worst) - f(best) <= f_tolerance`.
    pub f_tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f_min: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

/// Minimize `f` starting from `x0`, with the initial simplex built by
/// offsetting one coordinate per vertex by `steps[i]`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    config: &NelderMeadConfig,
) -> NelderMeadResult {
    let dim = x0.len();
    assert_eq!(steps.len(), dim);
    assert!(dim >= 1);

    let mut simplex: Vec<Vertex> = Vec::with_capacity(dim + 1);
    simplex.push(Vertex { x: x0.to_vec(), f: f(x0) });
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let fx = f(&x);
        simplex.push(Vertex { x, f: fx });
    }
    sort(&mut simplex);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        iterations += 1;
        if simplex[dim].f - simplex[0].f <= config.f_tolerance {
            converged = true;
            break;
        }

        // Centroid of all vertices except the worst.
        let mut centroid = vec![0.0; dim];
        for v in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(&v.x) {
                *c += xi / dim as f64;
            }
        }

        let reflected = affine(&centroid, &simplex[dim].x, -1.0);
        let f_reflected = f(&reflected);

        if f_reflected < simplex[0].f {
            let expanded = affine(&centroid, &simplex[dim].x, -2.0);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                replace_worst(&mut simplex, expanded, f_expanded);
            } else {
                replace_worst(&mut simplex, reflected, f_reflected);
            }
        } else if f_reflected < simplex[dim - 1].f {
            replace_worst(&mut simplex, reflected, f_reflected);
        } else {
            // Contract toward the better of worst/reflected.
            let (toward, f_toward) = if f_reflected < simplex[dim].f {
                (reflected.clone(), f_reflected)
            } else {
                (simplex[dim].x.clone(), simplex[dim].f)
            };
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(&toward)
                .map(|(c, t)| c + 0.5 * (t - c))
                .collect();
            let f_contracted = f(&contracted);
            if f_contracted < f_toward {
                replace_worst(&mut simplex, contracted, f_contracted);
            } else {
                // Shrink everything toward the best vertex.
                let best = simplex[0].x.clone();
                for v in simplex.iter_mut().skip(1) {
                    for (xi, bi) in v.x.iter_mut().zip(&best) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    v.f = f(&v.x);
                }
                sort(&mut simplex);
            }
        }
    }

    NelderMeadResult {
        x: simplex[0].x.clone(),
        f_min: simplex[0].f,
        iterations,
        converged,
    }
}

fn affine(centroid: &[f64], worst: &[f64], coeff: f64) -> Vec<f64> {
    centroid
        .iter()
        .zip(worst)
        .map(|(c, w)| c + coeff * (w - c))
        .collect()
}

fn replace_worst(simplex: &mut Vec<Vertex>, x: Vec<f64>, fx: f64) {
    let last = simplex.len() - 1;
    simplex[last] = Vertex { x, f: fx };
    sort(simplex);
}

fn sort(simplex: &mut [Vertex]) {
    simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
}
