//! Budgeted Nelder–Mead minimisation.

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Minimises `f` from `start` using an axis-aligned initial simplex of size
/// `step`, stopping after `budget` evaluations or when the simplex values
/// agree to `ftol`.
pub fn minimize(
    mut f: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    budget: usize,
    ftol: f64,
) -> Minimum {
    let d = start.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(start, &mut evals);
    pts.push((start.to_vec(), v0));
    if d == 0 {
        return Minimum {
            x: vec![],
            value: v0,
            evaluations: evals,
        };
    }
    for i in 0..d {
        if evals >= budget {
            break;
        }
        let mut x = start.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        pts.push((x, v));
    }
    let best_of = |pts: &[(Vec<f64>, f64)]| {
        pts.iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .cloned()
            .expect("non-empty simplex")
    };
    if pts.len() < d + 1 {
        let (x, value) = best_of(&pts);
        return Minimum {
            x,
            value,
            evaluations: evals,
        };
    }

    while evals < budget {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (pts[d].1 - pts[0].1).abs() <= ftol {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|k| pts[..d].iter().map(|p| p.0[k]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[d].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let fr = eval(&xr, &mut evals);
        if fr < pts[0].1 {
            if evals >= budget {
                pts[d] = (xr, fr);
                break;
            }
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals);
            pts[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < pts[d - 1].1 {
            pts[d] = (xr, fr);
        } else {
            if evals >= budget {
                break;
            }
            let outside = fr < pts[d].1;
            let xc = along(if outside { 0.5 } else { -0.5 });
            let fc = eval(&xc, &mut evals);
            if fc < fr.min(pts[d].1) {
                pts[d] = (xc, fc);
            } else {
                let x0 = pts[0].0.clone();
                for p in pts.iter_mut().skip(1) {
                    if evals >= budget {
                        break;
                    }
                    let xs: Vec<f64> = x0.iter().zip(&p.0).map(|(a, b)| a + 0.5 * (b - a)).collect();
                    let fs = eval(&xs, &mut evals);
                    *p = (xs, fs);
                }
            }
        }
    }
    let (x, value) = best_of(&pts);
    Minimum {
        x,
        value,
        evaluations: evals,
    }
}
