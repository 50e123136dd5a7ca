//! Small dense optimizers over a handful of real parameters: BFGS with a
//! finite-difference gradient, and Levenberg-Marquardt for zeroing a
//! residual vector.

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is `m x m` row-major. Returns `None` when the matrix is singular.
pub(crate) fn solve_linear(a: &mut [f64], b: &mut [f64], m: usize) -> Option<()> {
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| a[i * m + col].abs().total_cmp(&a[j * m + col].abs()))?;
        if a[pivot * m + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..m {
                a.swap(pivot * m + k, col * m + k);
            }
            b.swap(pivot, col);
        }
        let d = a[col * m + col];
        for row in col + 1..m {
            let f = a[row * m + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..m {
                a[row * m + k] -= f * a[col * m + k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..m).rev() {
        let mut acc = b[col];
        for k in col + 1..m {
            acc -= a[col * m + k] * b[k];
        }
        b[col] = acc / a[col * m + col];
    }
    Some(())
}

fn gradient(f: &impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS with Armijo backtracking. Returns the final point.
pub(crate) fn bfgs(f: impl Fn(&[f64]) -> f64, x0: &[f64], max_iter: usize, gtol: f64) -> Vec<f64> {
    let m = x0.len();
    let h = 1e-7;
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut g = gradient(&f, &x, h);
    let mut hinv = identity(m);
    for _ in 0..max_iter {
        if dot(&g, &g).sqrt() < gtol {
            return x;
        }
        let mut d: Vec<f64> = (0..m).map(|i| -dot(&hinv[i * m..(i + 1) * m], &g)).collect();
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            hinv = identity(m);
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-12 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let ft = f(&trial);
            if ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            return x;
        };
        let gn = gradient(&f, &xn, h);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 {
            bfgs_update(&mut hinv, &s, &y, sy, m);
        }
        let progress = fx - fnew;
        x = xn;
        fx = fnew;
        g = gn;
        if progress.abs() < 1e-15 * (1.0 + fx.abs()) {
            return x;
        }
    }
    x
}

fn identity(m: usize) -> Vec<f64> {
    let mut id = vec![0.0; m * m];
    for i in 0..m {
        id[i * m + i] = 1.0;
    }
    id
}

fn bfgs_update(hinv: &mut [f64], s: &[f64], y: &[f64], sy: f64, m: usize) {
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..m).map(|i| dot(&hinv[i * m..(i + 1) * m], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..m {
        for j in 0..m {
            hinv[i * m + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// Levenberg-Marquardt on `||r(x)||^2` with a finite-difference Jacobian.
/// Returns the final point and residual norm.
pub(crate) fn levenberg_marquardt(
    r: impl Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    max_iter: usize,
    target: f64,
) -> (Vec<f64>, f64) {
    let m = x0.len();
    let h = 1e-7;
    let mut x = x0.to_vec();
    let mut res = r(&x);
    let mut norm = dot(&res, &res).sqrt();
    let mut lambda = 1e-3;
    for _ in 0..max_iter {
        if norm < target {
            break;
        }
        let k = res.len();
        let mut jac = vec![0.0; k * m];
        let mut probe = x.clone();
        for j in 0..m {
            probe[j] = x[j] + h;
            let up = r(&probe);
            probe[j] = x[j] - h;
            let down = r(&probe);
            probe[j] = x[j];
            for i in 0..k {
                jac[i * m + j] = (up[i] - down[i]) / (2.0 * h);
            }
        }
        let mut jtj = vec![0.0; m * m];
        let mut jtr = vec![0.0; m];
        for i in 0..k {
            for a in 0..m {
                jtr[a] += jac[i * m + a] * res[i];
                for b in 0..m {
                    jtj[a * m + b] += jac[i * m + a] * jac[i * m + b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..20 {
            let mut a = jtj.clone();
            for d in 0..m {
                a[d * m + d] += lambda * (1.0 + jtj[d * m + d]);
            }
            let mut step: Vec<f64> = jtr.iter().map(|v| -v).collect();
            if solve_linear(&mut a, &mut step, m).is_none() {
                lambda *= 10.0;
                continue;
            }
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let rt = r(&trial);
            let nt = dot(&rt, &rt).sqrt();
            if nt < norm {
                x = trial;
                res = rt;
                norm = nt;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (x, norm)
}
