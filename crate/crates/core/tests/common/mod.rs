//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;

use skewlink::data::{Factor, PolicyRecord};
use skewlink::LinkFamily;

/// Shortest window by brute force over every start, ties to the lowest start.
pub fn exhaustive_hpd(draws: &[f64], prob: f64) -> (f64, f64) {
    let mut s = draws.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = (prob * s.len() as f64).floor() as usize;
    let mut best: Option<(f64, usize)> = None;
    for j in 0..s.len() - m {
        let w = s[j + m] - s[j];
        match best {
            Some((bw, _)) if bw <= w => {}
            _ => best = Some((w, j)),
        }
    }
    let j = best.unwrap().1;
    (s[j], s[j + m])
}

/// `(ln q, ln(1-q), dq/dη)` written out per link from the textbook formulas.
fn link_terms(family: LinkFamily, eta: f64) -> (f64, f64, f64) {
    match family {
        LinkFamily::Logit => {
            let ln_q = -(1.0 + (-eta).exp()).ln();
            let ln_f = -(1.0 + eta.exp()).ln();
            let q = 1.0 / (1.0 + (-eta).exp());
            (ln_q, ln_f, q * (1.0 - q))
        }
        LinkFamily::Probit => {
            let q = 0.5 * erfc(-eta / std::f64::consts::SQRT_2);
            let f = 0.5 * erfc(eta / std::f64::consts::SQRT_2);
            let dens = (-0.5 * eta * eta).exp() / (2.0 * std::f64::consts::PI).sqrt();
            (q.ln(), f.ln(), dens)
        }
        LinkFamily::Cloglog => {
            let e = eta.exp();
            let f = (-e).exp();
            ((-(-e).exp_m1()).ln(), -e, e * f)
        }
        _ => unreachable!(),
    }
}

/// Negative log-likelihood and its gradient.
pub fn nll_and_grad(family: LinkFamily, y: &[u8], x: &[Vec<f64>], beta: &[f64]) -> (f64, Vec<f64>) {
    let mut nll = 0.0;
    let mut grad = vec![0.0; beta.len()];
    for (yi, xi) in y.iter().zip(x) {
        let eta: f64 = xi.iter().zip(beta).map(|(a, b)| a * b).sum();
        let (ln_q, ln_f, dq) = link_terms(family, eta);
        let d = if *yi == 1 {
            nll -= ln_q;
            dq / ln_q.exp()
        } else {
            nll -= ln_f;
            -dq / ln_f.exp()
        };
        for (g, xv) in grad.iter_mut().zip(xi) {
            *g -= d * xv;
        }
    }
    (nll, grad)
}

/// BFGS with Armijo backtracking on `f`; stops when the gradient max-norm
/// falls below `gtol`.
pub fn bfgs<F: Fn(&[f64]) -> (f64, Vec<f64>)>(f: F, x0: &[f64], gtol: f64, max_iter: usize) -> Vec<f64> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    let mut h = vec![vec![0.0; n]; n];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..max_iter {
        if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) < gtol {
            break;
        }
        let mut p: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| h[i][j] * g[j]).sum::<f64>()).collect();
        let mut slope: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            for (i, row) in h.iter_mut().enumerate() {
                row.iter_mut().for_each(|v| *v = 0.0);
                row[i] = 1.0;
            }
            p = g.iter().map(|v| -v).collect();
            slope = -g.iter().map(|v| v * v).sum::<f64>();
        }
        let mut t = 1.0;
        let (xn, fxn, gn) = loop {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + t * b).collect();
            let (fxn, gn) = f(&xn);
            if fxn.is_finite() && fxn <= fx + 1e-4 * t * slope {
                break (xn, fxn, gn);
            }
            t *= 0.5;
            if t < 1e-20 {
                return x;
            }
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
        if sy > 1e-300 {
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i][j] * yv[j]).sum()).collect();
            let yhy: f64 = yv.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        x = xn;
        fx = fxn;
        g = gn;
    }
    x
}

/// Random portfolio rows with every level represented.
pub fn random_policies(n: usize, seed: u64) -> Vec<PolicyRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut levels = [0; 6];
            for (k, f) in Factor::ALL.iter().enumerate() {
                levels[k] = if i < 8 { i % f.levels().len() } else { rng.random_range(0..f.levels().len()) };
            }
            PolicyRecord {
                levels,
                issue_age: rng.random_range(18.0..80.0f64).round(),
                face_amount: (rng.random_range(8.0..15.0f64).exp()).round(),
                duration: rng.random_range(0.0..25.0f64).round(),
                death: 0,
            }
        })
        .collect()
}

/// Batch-means standard error of the mean.
pub fn batch_means_se(values: &[f64], batches: usize) -> f64 {
    let size = values.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| values[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches as f64 - 1.0);
    (var / batches as f64).sqrt()
}
