//! Local minima that trapped runs settle in.

use swarmtopo::ProblemKind;

fn rosenbrock_grad(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut g = vec![0.0; n];
    for i in 0..n - 1 {
        let a = x[i + 1] - x[i] * x[i];
        g[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
        g[i + 1] += 200.0 * a;
    }
    g
}

/// Steepest descent with backtracking line search.
fn descend(mut x: Vec<f64>) -> (Vec<f64>, f64) {
    let f = |x: &[f64]| ProblemKind::Rosenbrock.evaluate(x);
    let mut fx = f(&x);
    let mut step: f64 = 1e-4;
    for _ in 0..1_000_000 {
        let g = rosenbrock_grad(&x);
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if gg < 1e-20 {
            break;
        }
        step = (step * 2.0).min(1e-3);
        loop {
            let y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let fy = f(&y);
            if fy <= fx - 1e-4 * step * gg {
                x = y;
                fx = fy;
                break;
            }
            step *= 0.5;
            if step < 1e-20 {
                return (x, fx);
            }
        }
    }
    (x, fx)
}

#[test]
fn rosenbrock_10d_second_minimum_is_near_3_99() {
    let mut start = vec![1.0; 10];
    start[0] = -1.0;
    let (x, f) = descend(start);
    assert!(x[0] < -0.9, "{x:?}");
    let g: f64 = rosenbrock_grad(&x).iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(g < 1e-5, "not stationary: |g| = {g}");
    assert!((f - 3.99).abs() < 1e-2, "{f}");
    assert!((f - 3.9866).abs() < 1e-4, "{f}");
}

/// Radial profile of Schaffer f6.
fn schaffer(r: f64) -> f64 {
    ProblemKind::SchafferF6.evaluate(&[r])
}

#[test]
fn schaffer_ring_levels() {
    let step = 1e-6;
    let values: Vec<f64> = (0..=12_000_000).map(|k| schaffer(k as f64 * step)).collect();
    let minima: Vec<f64> = (1..values.len() - 1)
        .filter(|&k| values[k] < values[k - 1] && values[k] <= values[k + 1])
        .map(|k| values[k])
        .collect();
    assert!(minima.len() >= 3);
    for (level, want) in minima.iter().zip([9.72e-3, 3.72e-2, 7.82e-2]) {
        assert!((level - want).abs() < 1e-3 / 2.0, "{level} vs {want}");
    }
    // the radial form makes every point of a ring equally good
    let r = 6.2;
    let p = [r / 2f64.sqrt(), r / 2f64.sqrt()];
    assert!((ProblemKind::SchafferF6.evaluate(&p) - schaffer(r)).abs() < 1e-15);
}
