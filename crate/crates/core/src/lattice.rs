//! Velocity stencils, moment bases and population/moment fields.
//!
//! Populations are stored node-major as `[f64; Q]` arrays so that the
//! change of basis and the collision operate on a contiguous node vector.
//! Grids are indexed `(x, y)` with `x` fastest; one-dimensional grids have
//! `ny == 1`.

use nalgebra::DMatrix;

use crate::boundary::Topology;
use crate::error::{Error, Result};

/// D1Q3 velocities in the order rest, +λ, −λ.
pub const D1Q3_VELOCITIES: [[i32; 2]; 3] = [[0, 0], [1, 0], [-1, 0]];
pub const D1Q3_OPPOSITE: [usize; 3] = [0, 2, 1];

/// D2Q9 velocities: rest, the four axis directions counter-clockwise from +x,
/// then the four diagonals counter-clockwise from (+x, +y).
///
/// ```text
///   6   2   5
///    \  |  /
///   3 - 0 - 1
///    /  |  \
///   7   4   8
/// ```
pub const D2Q9_VELOCITIES: [[i32; 2]; 9] = [
    [0, 0],
    [1, 0],
    [0, 1],
    [-1, 0],
    [0, -1],
    [1, 1],
    [-1, 1],
    [-1, -1],
    [1, -1],
];
pub const D2Q9_OPPOSITE: [usize; 9] = [0, 3, 4, 1, 2, 7, 8, 5, 6];

/// Geometry and units of a lattice with `Q` discrete velocities.
///
/// Velocities are integer multiples of `lambda`. The reference velocity is
/// always derived from the steps, so `lambda == dx / dt` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec<const Q: usize> {
    pub dimension: usize,
    pub velocities: [[i32; 2]; Q],
    pub opposite: [usize; Q],
    lambda: f64,
    dx: f64,
    dt: f64,
}

impl<const Q: usize> LatticeSpec<Q> {
    fn with_steps(
        dimension: usize,
        velocities: [[i32; 2]; Q],
        opposite: [usize; Q],
        dx: f64,
        dt: f64,
    ) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!(
                "space and time steps must be positive and finite (dx = {dx}, dt = {dt})"
            )));
        }
        Ok(Self {
            dimension,
            velocities,
            opposite,
            lambda: dx / dt,
            dx,
            dt,
        })
    }

    pub const fn q(&self) -> usize {
        Q
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Largest |v_x| and |v_y| over the stencil, in lattice units.
    pub fn reach(&self) -> (usize, usize) {
        self.velocities.iter().fold((0, 0), |(rx, ry), v| {
            (rx.max(v[0].unsigned_abs() as usize), ry.max(v[1].unsigned_abs() as usize))
        })
    }
}

impl LatticeSpec<3> {
    pub fn d1q3(dx: f64, dt: f64) -> Result<Self> {
        Self::with_steps(1, D1Q3_VELOCITIES, D1Q3_OPPOSITE, dx, dt)
    }

    /// Lattice units: Δx = Δt = λ = 1.
    pub fn d1q3_unit() -> Self {
        Self::d1q3(1.0, 1.0).expect("unit steps are valid")
    }
}

impl LatticeSpec<9> {
    pub fn d2q9(dx: f64, dt: f64) -> Result<Self> {
        Self::with_steps(2, D2Q9_VELOCITIES, D2Q9_OPPOSITE, dx, dt)
    }

    pub fn d2q9_unit() -> Self {
        Self::d2q9(1.0, 1.0).expect("unit steps are valid")
    }
}

/// Choice of D1Q3 moment matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum D1q3Basis {
    /// Rows `1,1,1 / 0,λ,−λ / 0,λ²/2,λ²/2`.
    A,
    /// Gram-Schmidt variant with third row `−2λ², λ², λ²`.
    B,
}

/// An invertible moment matrix together with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentBasis<const Q: usize> {
    matrix: [[f64; Q]; Q],
    inverse: [[f64; Q]; Q],
    labels: [&'static str; Q],
}

impl<const Q: usize> MomentBasis<Q> {
    /// Builds a basis from its rows, computing and caching the inverse.
    pub fn from_rows(matrix: [[f64; Q]; Q], labels: [&'static str; Q]) -> Result<Self> {
        let dense = DMatrix::from_fn(Q, Q, |r, c| matrix[r][c]);
        let inv = dense
            .try_inverse()
            .ok_or_else(|| Error::Config("moment matrix is singular".into()))?;
        let mut inverse = [[0.0; Q]; Q];
        for (r, row) in inverse.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = inv[(r, c)];
            }
        }
        Ok(Self {
            matrix,
            inverse,
            labels,
        })
    }

    pub fn matrix(&self) -> &[[f64; Q]; Q] {
        &self.matrix
    }

    pub fn inverse(&self) -> &[[f64; Q]; Q] {
        &self.inverse
    }

    pub fn labels(&self) -> &[&'static str; Q] {
        &self.labels
    }

    /// `m = M f` at a single node.
    #[inline]
    pub fn moments(&self, f: &[f64; Q]) -> [f64; Q] {
        mat_vec(&self.matrix, f)
    }

    /// `f = M⁻¹ m` at a single node.
    #[inline]
    pub fn populations(&self, m: &[f64; Q]) -> [f64; Q] {
        mat_vec(&self.inverse, m)
    }

    /// Max-norm of `M M⁻¹ − I`, relative to the largest |M| entry.
    pub fn inversion_defect(&self) -> f64 {
        let scale = self
            .matrix
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let mut worst = 0.0_f64;
        for r in 0..Q {
            for c in 0..Q {
                let dot: f64 = (0..Q).map(|k| self.matrix[r][k] * self.inverse[k][c]).sum();
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst / scale.max(1.0)
    }
}

#[inline]
fn mat_vec<const Q: usize>(a: &[[f64; Q]; Q], x: &[f64; Q]) -> [f64; Q] {
    let mut out = [0.0; Q];
    for (o, row) in out.iter_mut().zip(a) {
        *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    out
}

pub fn build_d1q3_basis(variant: D1q3Basis, lambda: f64) -> Result<MomentBasis<3>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
    }
    let l2 = lambda * lambda;
    let matrix = match variant {
        D1q3Basis::A => [
            [1.0, 1.0, 1.0],
            [0.0, lambda, -lambda],
            [0.0, l2 / 2.0, l2 / 2.0],
        ],
        D1q3Basis::B => [[1.0, 1.0, 1.0], [0.0, lambda, -lambda], [-2.0 * l2, l2, l2]],
    };
    MomentBasis::from_rows(matrix, ["rho", "j", "energy"])
}

/// Nine-moment basis in the order density, momentum (x, y), energy, square
/// energy, heat flux (x, y), diagonal stress, off-diagonal stress.
///
/// Only the momentum rows carry λ; the remaining rows are the dimensionless
/// integer stencils, so that `m5_eq = −j_x/λ` is homogeneous.
pub fn build_d2q9_basis(lambda: f64) -> Result<MomentBasis<9>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
    }
    const ROWS: [[i32; 9]; 9] = [
        [1, 1, 1, 1, 1, 1, 1, 1, 1],
        [0, 1, 0, -1, 0, 1, -1, -1, 1],
        [0, 0, 1, 0, -1, 1, 1, -1, -1],
        [-4, -1, -1, -1, -1, 2, 2, 2, 2],
        [4, -2, -2, -2, -2, 1, 1, 1, 1],
        [0, -2, 0, 2, 0, 1, -1, -1, 1],
        [0, 0, -2, 0, 2, 1, 1, -1, -1],
        [0, 1, -1, 1, -1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 1, -1, 1, -1],
    ];
    let mut matrix = [[0.0; 9]; 9];
    for (r, row) in ROWS.iter().enumerate() {
        let scale = if r == 1 || r == 2 { lambda } else { 1.0 };
        for (c, &v) in row.iter().enumerate() {
            matrix[r][c] = scale * f64::from(v);
        }
    }
    MomentBasis::from_rows(
        matrix,
        ["rho", "jx", "jy", "e", "eps", "qx", "qy", "pxx", "pxy"],
    )
}

/// Grid extents; `ny == 1` for one-dimensional problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridShape {
    pub nx: usize,
    pub ny: usize,
}

impl GridShape {
    pub fn line(n: usize) -> Self {
        Self { nx: n, ny: 1 }
    }

    pub fn plane(nx: usize, ny: usize) -> Self {
        Self { nx, ny }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.nx + x
    }
}

/// Per-node particle populations, double-buffered for streaming.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationField<const Q: usize> {
    shape: GridShape,
    data: Vec<[f64; Q]>,
    buffer: Vec<[f64; Q]>,
}

impl<const Q: usize> PopulationField<Q> {
    pub fn zeros(shape: GridShape) -> Self {
        Self {
            shape,
            data: vec![[0.0; Q]; shape.len()],
            buffer: vec![[0.0; Q]; shape.len()],
        }
    }

    pub fn from_nodes(shape: GridShape, data: Vec<[f64; Q]>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::Config(format!(
                "{} nodes supplied for a {}x{} grid",
                data.len(),
                shape.nx,
                shape.ny
            )));
        }
        Ok(Self {
            shape,
            buffer: vec![[0.0; Q]; data.len()],
            data,
        })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn nodes(&self) -> &[[f64; Q]] {
        &self.data
    }

    pub fn nodes_mut(&mut self) -> &mut [[f64; Q]] {
        &mut self.data
    }

    pub fn node(&self, x: usize, y: usize) -> &[f64; Q] {
        &self.data[self.shape.index(x, y)]
    }

    pub fn node_mut(&mut self, x: usize, y: usize) -> &mut [f64; Q] {
        let i = self.shape.index(x, y);
        &mut self.data[i]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().flatten().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().flatten().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }
}

/// Per-node moment vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentField<const Q: usize> {
    shape: GridShape,
    data: Vec<[f64; Q]>,
}

impl<const Q: usize> MomentField<Q> {
    pub fn zeros(shape: GridShape) -> Self {
        Self {
            shape,
            data: vec![[0.0; Q]; shape.len()],
        }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn nodes(&self) -> &[[f64; Q]] {
        &self.data
    }

    pub fn nodes_mut(&mut self) -> &mut [[f64; Q]] {
        &mut self.data
    }

    pub fn node(&self, x: usize, y: usize) -> &[f64; Q] {
        &self.data[self.shape.index(x, y)]
    }
}

pub fn to_moments<const Q: usize>(f: &PopulationField<Q>, basis: &MomentBasis<Q>) -> MomentField<Q> {
    MomentField {
        shape: f.shape,
        data: f.data.iter().map(|node| basis.moments(node)).collect(),
    }
}

pub fn from_moments<const Q: usize>(m: &MomentField<Q>, basis: &MomentBasis<Q>) -> PopulationField<Q> {
    PopulationField {
        shape: m.shape,
        data: m.data.iter().map(|node| basis.populations(node)).collect(),
        buffer: vec![[0.0; Q]; m.data.len()],
    }
}

/// Writes `M⁻¹ m` into an existing field of the same shape.
pub fn from_moments_into<const Q: usize>(
    m: &MomentField<Q>,
    basis: &MomentBasis<Q>,
    f: &mut PopulationField<Q>,
) -> Result<()> {
    if m.shape != f.shape {
        return Err(Error::Config(format!(
            "moment field is {}x{} but population field is {}x{}",
            m.shape.nx, m.shape.ny, f.shape.nx, f.shape.ny
        )));
    }
    for (dst, src) in f.data.iter_mut().zip(&m.data) {
        *dst = basis.populations(src);
    }
    Ok(())
}

/// Advects post-collision populations one time step.
///
/// On entry the field holds `f*`; on exit it holds
/// `f_j(x) = f*_j(x − v_j)`. Links whose source lies outside the grid are
/// filled by the face rules of `topology`; a link with no rule is an error
/// and leaves the field untouched.
pub fn stream<const Q: usize>(
    f: &mut PopulationField<Q>,
    lattice: &LatticeSpec<Q>,
    topology: &Topology,
) -> Result<()> {
    let shape = f.shape;
    let (nx, ny) = (shape.nx as isize, shape.ny as isize);
    let (reach_x, reach_y) = lattice.reach();
    let velocities = &lattice.velocities;
    let opposite = &lattice.opposite;

    for y in 0..shape.ny {
        let inner_y = y >= reach_y && y + reach_y < shape.ny;
        for x in 0..shape.nx {
            let here = shape.index(x, y);
            if inner_y && x >= reach_x && x + reach_x < shape.nx {
                for (j, v) in velocities.iter().enumerate() {
                    let sx = (x as isize - v[0] as isize) as usize;
                    let sy = (y as isize - v[1] as isize) as usize;
                    f.buffer[here][j] = f.data[shape.index(sx, sy)][j];
                }
                continue;
            }
            for (j, v) in velocities.iter().enumerate() {
                let sx = x as isize - v[0] as isize;
                let sy = y as isize - v[1] as isize;
                let value = match topology.route(sx, sy, nx, ny) {
                    crate::boundary::LinkSource::Node(px, py) => f.data[shape.index(px, py)][j],
                    crate::boundary::LinkSource::Closure(closure) => {
                        closure.incoming(j, opposite[j], &f.data[here])
                    }
                    crate::boundary::LinkSource::Unclosed => {
                        return Err(Error::UnclosedLink { x, y, direction: j })
                    }
                };
                f.buffer[here][j] = value;
            }
        }
    }
    std::mem::swap(&mut f.data, &mut f.buffer);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{BoundaryClosure, Face};

    fn assert_vec_eq<const Q: usize>(got: [f64; Q], want: [f64; Q]) {
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-14, "{got:?} != {want:?}");
        }
    }

    #[test]
    fn opposite_is_an_involution() {
        let l3 = LatticeSpec::d1q3_unit();
        for j in 0..3 {
            let o = l3.opposite[j];
            assert_eq!(l3.opposite[o], j);
            assert_eq!(l3.velocities[o][0], -l3.velocities[j][0]);
        }
        let l9 = LatticeSpec::d2q9_unit();
        for j in 0..9 {
            let o = l9.opposite[j];
            assert_eq!(l9.opposite[o], j);
            assert_eq!(l9.velocities[o], [-l9.velocities[j][0], -l9.velocities[j][1]]);
        }
    }

    #[test]
    fn lambda_follows_steps() {
        let l = LatticeSpec::d1q3(0.5, 0.25).unwrap();
        assert_eq!(l.lambda(), 2.0);
        assert!(LatticeSpec::d2q9(0.0, 1.0).is_err());
    }

    #[test]
    fn d1q3_basis_examples() {
        let a1 = build_d1q3_basis(D1q3Basis::A, 1.0).unwrap();
        assert_vec_eq(a1.moments(&[1.0, 0.0, 0.0]), [1.0, 0.0, 0.0]);
        let a2 = build_d1q3_basis(D1q3Basis::A, 2.0).unwrap();
        assert_vec_eq(a2.moments(&[0.0, 1.0, 0.0]), [1.0, 2.0, 2.0]);
        let b1 = build_d1q3_basis(D1q3Basis::B, 1.0).unwrap();
        assert_vec_eq(b1.moments(&[1.0, 0.0, 0.0]), [1.0, 0.0, -2.0]);
        assert!(build_d1q3_basis(D1q3Basis::A, -1.0).is_err());
    }

    #[test]
    fn d2q9_basis_examples() {
        let b = build_d2q9_basis(1.0).unwrap();
        let rest = b.moments(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!((rest[0], rest[1], rest[2], rest[7], rest[8]), (1.0, 0.0, 0.0, 0.0, 0.0));
        let east = b.moments(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!((east[0], east[1], east[2], east[8]), (1.0, 1.0, 0.0, 0.0));
        let uniform = b.moments(&[1.0 / 9.0; 9]);
        for k in [1, 2, 7, 8] {
            assert!(uniform[k].abs() < 1e-16);
        }
    }

    #[test]
    fn bases_invert_at_several_lambdas() {
        for lambda in [1.0, 2.0, 1.0 / 3.0] {
            for v in [D1q3Basis::A, D1q3Basis::B] {
                let b = build_d1q3_basis(v, lambda).unwrap();
                assert!(b.inversion_defect() < 1e-13);
                assert!(b.matrix()[0].iter().all(|&x| x == 1.0));
            }
            let b = build_d2q9_basis(lambda).unwrap();
            assert!(b.inversion_defect() < 1e-13);
            assert!(b.matrix()[0].iter().all(|&x| x == 1.0));
        }
    }

    #[test]
    fn zero_flux_moments_give_symmetric_populations() {
        let b = build_d1q3_basis(D1q3Basis::A, 1.0).unwrap();
        let rho = 0.7;
        let zeta = 1.0 / 3.0;
        let f = b.populations(&[rho, 0.0, zeta * rho / 2.0]);
        assert_eq!(f[1], f[2]);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let b = build_d1q3_basis(D1q3Basis::A, 1.0).unwrap();
        let m = MomentField::<3>::zeros(GridShape::line(4));
        let mut f = PopulationField::<3>::zeros(GridShape::line(5));
        assert!(matches!(from_moments_into(&m, &b, &mut f), Err(Error::Config(_))));
    }

    #[test]
    fn periodic_line_streams_cyclically() {
        let lattice = LatticeSpec::d1q3_unit();
        let mut f = PopulationField::<3>::zeros(GridShape::line(4));
        for (i, v) in [1.0, 2.0, 3.0, 4.0].into_iter().enumerate() {
            f.node_mut(i, 0)[1] = v;
        }
        stream(&mut f, &lattice, &Topology::periodic()).unwrap();
        let moved: Vec<f64> = f.nodes().iter().map(|n| n[1]).collect();
        assert_eq!(moved, vec![4.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn missing_closure_is_a_hard_error() {
        let lattice = LatticeSpec::d1q3_unit();
        let mut f = PopulationField::<3>::zeros(GridShape::line(4));
        f.node_mut(0, 0)[2] = 5.0;
        let before = f.clone();
        let topology = Topology::default();
        let err = stream(&mut f, &lattice, &topology).unwrap_err();
        assert!(matches!(err, Error::UnclosedLink { x: 0, y: 0, direction: 1 }));
        assert_eq!(f, before);
    }

    #[test]
    fn bottom_wall_links_come_from_bounce_back() {
        // 3x3 grid, walls top and bottom, periodic in x; every population
        // value is distinct so each incoming link identifies its source.
        let lattice = LatticeSpec::d2q9_unit();
        let shape = GridShape::plane(3, 3);
        let nodes: Vec<[f64; 9]> = (0..9)
            .map(|n| std::array::from_fn(|j| (10 * n + j) as f64))
            .collect();
        let mut f = PopulationField::from_nodes(shape, nodes.clone()).unwrap();
        let topology = Topology::channel(
            BoundaryClosure::periodic(Face::West),
            BoundaryClosure::periodic(Face::East),
        );
        stream(&mut f, &lattice, &topology).unwrap();
        let val = |x: usize, y: usize, j: usize| (10 * (3 * y + x) + j) as f64;
        for x in 0..3 {
            // bottom row: f2 <- f4*, f5 <- f7*, f6 <- f8* at the same node
            assert_eq!(f.node(x, 0)[2], val(x, 0, 4));
            assert_eq!(f.node(x, 0)[5], val(x, 0, 7));
            assert_eq!(f.node(x, 0)[6], val(x, 0, 8));
            // top row mirrored
            assert_eq!(f.node(x, 2)[4], val(x, 2, 2));
            assert_eq!(f.node(x, 2)[7], val(x, 2, 5));
            assert_eq!(f.node(x, 2)[8], val(x, 2, 6));
            // interior-fed links of the bottom row
            assert_eq!(f.node(x, 0)[4], val(x, 1, 4));
            assert_eq!(f.node(x, 0)[1], val((x + 2) % 3, 0, 1));
            assert_eq!(f.node(x, 0)[7], val((x + 1) % 3, 1, 7));
        }
        // diagonal wrapping through the periodic x faces
        assert_eq!(f.node(0, 1)[5], val(2, 0, 5));
        assert_eq!(f.node(0, 1)[8], val(2, 2, 8));
    }

    #[test]
    fn fully_periodic_streaming_is_a_permutation() {
        let lattice = LatticeSpec::d2q9_unit();
        let shape = GridShape::plane(5, 4);
        let nodes: Vec<[f64; 9]> = (0..shape.len())
            .map(|n| std::array::from_fn(|j| ((n * 9 + j) as f64).sin()))
            .collect();
        let mut f = PopulationField::from_nodes(shape, nodes).unwrap();
        let mut before: Vec<f64> = f.nodes().iter().flatten().copied().collect();
        stream(&mut f, &lattice, &Topology::periodic()).unwrap();
        let mut after: Vec<f64> = f.nodes().iter().flatten().copied().collect();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        assert_eq!(before, after);
    }
}
