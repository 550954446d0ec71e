//! Closed-form reference solutions.

/// Solution of `−K ρ'' = c` on `[0, 1]` with `ρ(0) = ρ(1) = 0`.
pub fn exact_poisson_1d(c: f64, k: f64, x: f64) -> f64 {
    c * x * (1.0 - x) / (2.0 * k)
}

/// Force-driven Poiseuille profile between walls at `y = 0` and `y = H`.
pub fn exact_poiseuille(fx: f64, nu: f64, h: f64, y: f64) -> f64 {
    fx / (2.0 * nu) * y * (h - y)
}
