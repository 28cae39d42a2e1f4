//! The downweighting function `f(beta, t) = cosh((lambda-1) beta t) / cosh^{lambda+1}(beta t)`
//! and its derivatives, all evaluated in log space so that `|beta t|` in the
//! hundreds neither overflows nor produces `inf / inf`.

use std::f64::consts::LN_2;

/// `ln cosh(u)`.
pub(crate) fn log_cosh(u: f64) -> f64 {
    let a = u.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `ln sinh(a)` for `a > 0`.
fn log_sinh_pos(a: f64) -> f64 {
    a + (-(-2.0 * a).exp_m1()).ln() - LN_2
}

/// `sinh(a) / cosh^power(u)`.
fn sinh_over_cosh_pow(a: f64, u: f64, power: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    a.signum() * (log_sinh_pos(a.abs()) - power * log_cosh(u)).exp()
}

/// `sech^2(u)`.
pub(crate) fn sech2(u: f64) -> f64 {
    (-2.0 * log_cosh(u)).exp()
}

/// `f` expressed through `u = beta t`.
pub fn weight_at(u: f64, lambda: f64) -> f64 {
    (log_cosh((lambda - 1.0) * u) - (lambda + 1.0) * log_cosh(u)).exp()
}

/// `f(beta, t)`; identically one at `lambda = 0`.
pub fn dpd_weight(beta: f64, t: f64, lambda: f64) -> f64 {
    weight_at(beta * t, lambda)
}

/// `g(u) = (lambda sinh((lambda-2) u) - sinh(lambda u)) / cosh^{lambda+2}(u)`,
/// so that `df/dbeta = t g(beta t)` and `df/dt = beta g(beta t)`.
pub fn weight_slope_at(u: f64, lambda: f64) -> f64 {
    let power = lambda + 2.0;
    lambda * sinh_over_cosh_pow((lambda - 2.0) * u, u, power)
        - sinh_over_cosh_pow(lambda * u, u, power)
}

/// `df(beta, t) / dbeta`, finite at `beta = 0` (where it vanishes).
pub fn dpd_weight_dbeta(beta: f64, t: f64, lambda: f64) -> f64 {
    t * weight_slope_at(beta * t, lambda)
}

/// `x df(beta, x)/dx`, a function of `u = beta x` alone.
pub fn weight_elasticity_at(u: f64, lambda: f64) -> f64 {
    u * weight_slope_at(u, lambda)
}
