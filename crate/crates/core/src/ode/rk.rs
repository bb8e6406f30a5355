//! Dormand-Prince 5(4) with PI step-size control.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Step control settings.
#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

/// Result of one integration.
#[derive(Clone, Copy, Debug)]
pub struct Integration<const N: usize> {
    pub y: [f64; N],
    pub steps: usize,
    pub rejected: usize,
    /// Sum of accepted local error estimates in units of the tolerance.
    pub error_sum: f64,
}

/// Integrates `y' = rhs(x, y)` from `x0` to `x1`.
///
/// `after_step(x, y)` runs after every accepted step and may rescale `y` in
/// place or abort with an error.
pub fn integrate<const N: usize, F, G>(
    mut rhs: F,
    x0: f64,
    x1: f64,
    y0: [f64; N],
    ctl: StepControl,
    mut after_step: G,
) -> Result<Integration<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    G: FnMut(f64, &mut [f64; N]) -> Result<()>,
{
    let span = x1 - x0;
    let mut x = x0;
    let mut y = y0;
    let mut h = ctl.initial_step.min(span).max(span * 1e-12);
    let mut k = [[0.0; N]; 7];
    k[0] = rhs(x, &y);
    let mut err_prev: f64 = 1.0;
    let mut steps = 0;
    let mut rejected = 0;
    let mut error_sum = 0.0;
    while x < x1 {
        if steps + rejected >= ctl.max_steps {
            return Err(Error::StepSizeUnderflow { r: x });
        }
        let last = x + h >= x1;
        if last {
            h = x1 - x;
        }
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                *yi += h * acc;
            }
            k[s] = rhs(x + C[s] * h, &ys);
        }
        let mut y_new = y;
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut hi5 = 0.0;
            let mut hi4 = 0.0;
            for s in 0..7 {
                hi5 += B5[s] * k[s][i];
                hi4 += B4[s] * k[s][i];
            }
            y_new[i] = y[i] + h * hi5;
            let scale = ctl.atol + ctl.rtol * y[i].abs().max(y_new[i].abs());
            let e = h * (hi5 - hi4) / scale;
            err = err.max(e.abs());
        }
        if !err.is_finite() {
            h *= 0.2;
            rejected += 1;
            if h.abs() < 1e-14 * span.abs() {
                return Err(Error::StepSizeUnderflow { r: x });
            }
            continue;
        }
        if err <= 1.0 {
            x = if last { x1 } else { x + h };
            y = y_new;
            steps += 1;
            error_sum += err;
            after_step(x, &mut y)?;
            k[0] = rhs(x, &y);
            let factor = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= factor.clamp(0.2, 5.0);
            err_prev = err.max(1e-4);
        } else {
            rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h.abs() < 1e-14 * span.abs() {
                return Err(Error::StepSizeUnderflow { r: x });
            }
        }
    }
    Ok(Integration {
        y,
        steps,
        rejected,
        error_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let ctl = StepControl {
            rtol: 1e-12,
            atol: 1e-14,
            initial_step: 1e-3,
            max_steps: 100_000,
        };
        let out = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, 10.0, [0.0, 1.0], ctl, |_, _| Ok(()))
            .unwrap();
        assert!((out.y[0] - 10f64.sin()).abs() < 1e-10);
        assert!((out.y[1] - 10f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn exhausting_steps_is_an_error() {
        let ctl = StepControl {
            rtol: 1e-12,
            atol: 1e-14,
            initial_step: 1e-3,
            max_steps: 3,
        };
        let out = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, 10.0, [1.0], ctl, |_, _| Ok(()));
        assert!(matches!(out, Err(Error::StepSizeUnderflow { .. })));
    }
}
