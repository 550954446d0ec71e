//! Least-squares parabolas and the wall locations they extrapolate to.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative floor on the curvature below which roots are not extracted.
pub const CURVATURE_FLOOR: f64 = 1e-14;

/// `u(x) = a0 + a1 x + a2 x²` fitted by least squares.
///
/// The fit is carried out on the centred, scaled abscissa
/// `t = (x − centre)/scale`, and roots are solved in `t` before mapping
/// back, which keeps them accurate when the data sit far from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolaFit {
    centre: f64,
    scale: f64,
    /// Coefficients in `t`.
    local: [f64; 3],
    /// RMS of the residuals.
    pub residual: f64,
    /// Largest |u| among the samples.
    pub magnitude: f64,
}

impl ParabolaFit {
    pub fn coefficients(&self) -> [f64; 3] {
        let [c0, c1, c2] = self.local;
        let (m, s) = (self.centre, self.scale);
        [
            c0 - c1 * m / s + c2 * m * m / (s * s),
            c1 / s - 2.0 * c2 * m / (s * s),
            c2 / (s * s),
        ]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.centre) / self.scale;
        let [c0, c1, c2] = self.local;
        c0 + t * (c1 + t * c2)
    }

    /// Second derivative `u'' = 2 a2`.
    pub fn curvature(&self) -> f64 {
        2.0 * self.local[2] / (self.scale * self.scale)
    }

    /// The two real roots in increasing order, if the discriminant is
    /// non-negative.
    pub fn roots(&self) -> Option<[f64; 2]> {
        let [c0, c1, c2] = self.local;
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            return None;
        }
        let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
        let (t1, t2) = if q == 0.0 { (0.0, 0.0) } else { (q / c2, c0 / q) };
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        Some([self.centre + self.scale * lo, self.centre + self.scale * hi])
    }
}

/// Fits a parabola to `(x, u)` samples.
pub fn fit_parabola(xs: &[f64], us: &[f64]) -> Result<ParabolaFit> {
    if xs.len() != us.len() {
        return Err(Error::Config(format!("{} abscissae but {} values", xs.len(), us.len())));
    }
    let mut distinct: Vec<f64> = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::TooFewPoints(distinct.len()));
    }
    let (lo, hi) = (distinct[0], distinct[distinct.len() - 1]);
    let centre = 0.5 * (lo + hi);
    let scale = 0.5 * (hi - lo);

    let n = xs.len();
    let design = DMatrix::from_fn(n, 3, |r, c| ((xs[r] - centre) / scale).powi(c as i32));
    let rhs = DVector::from_column_slice(us);
    let solution = design
        .clone()
        .svd(true, true)
        .solve(&rhs, f64::EPSILON)
        .map_err(|e| Error::Config(format!("least-squares solve failed: {e}")))?;
    let local = [solution[0], solution[1], solution[2]];

    let residuals = &design * &solution - &rhs;
    let residual = (residuals.norm_squared() / n as f64).sqrt();
    let magnitude = us.iter().fold(0.0_f64, |acc, u| acc.max(u.abs()));

    if !(local[2].abs() > CURVATURE_FLOOR * magnitude) {
        return Err(Error::DegenerateFit(local[2].abs() / (scale * scale)));
    }
    Ok(ParabolaFit {
        centre,
        scale,
        local,
        residual,
        magnitude,
    })
}

/// Which end of the profile a wall bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WallSide {
    /// Wall below the first node (x = 0 or y = 0).
    Low,
    /// Wall above the last node.
    High,
}

/// Distance from the boundary node to the extrapolated zero of the profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallLocationResult {
    /// Offset from `x_b` into the wall, in units of Δx.
    pub delta_q: f64,
    pub side: WallSide,
    pub boundary_node: f64,
    pub root: f64,
}

/// Locates the wall on `side` from the root of `fit` nearest to the
/// boundary node `x_b`.
pub fn wall_location(fit: &ParabolaFit, x_b: f64, dx: f64, side: WallSide) -> Result<WallLocationResult> {
    let roots = fit
        .roots()
        .ok_or_else(|| Error::WallNotLocalized("fitted parabola has no real root".into()))?;
    let root = if (roots[0] - x_b).abs() <= (roots[1] - x_b).abs() {
        roots[0]
    } else {
        roots[1]
    };
    let inward = match side {
        WallSide::Low => x_b - root,
        WallSide::High => root - x_b,
    };
    let delta_q = inward / dx;
    if !(-1.0..=2.0).contains(&delta_q) {
        return Err(Error::WallNotLocalized(format!(
            "nearest root {root} lies {delta_q} cells beyond the boundary node {x_b}"
        )));
    }
    Ok(WallLocationResult {
        delta_q,
        side,
        boundary_node: x_b,
        root,
    })
}
