//! Boundary closures for links fed from outside the grid.
//!
//! Every population that streams into a boundary node from beyond a face is
//! produced by exactly one rule: a periodic wrap to the opposite face, or a
//! closure evaluated from the post-collision populations of the receiving
//! node itself. Closures that reference a ghost node in their textbook form
//! (`f_j(x_b, t+Δt) = ± f_opp(x_e, t+Δt)`) are written here with the streaming
//! identity `f_opp(x_e, t+Δt) = f*_opp(x_b, t)` already applied.
//!
//! When a source lies beyond both a transverse (y) face and a longitudinal
//! (x) face, the transverse rule wins. For a channel this sends the corner
//! diagonal into the wall bounce-back.

use crate::error::{Error, Result};
use crate::lattice::{D1Q3_OPPOSITE, D2Q9_OPPOSITE, D2Q9_VELOCITIES};

/// A face of the rectangular domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Face {
    /// x = 0 (inlet, left end of a segment)
    West,
    /// x = Nx − 1 (outlet, right end of a segment)
    East,
    /// y = 0 (bottom wall)
    South,
    /// y = Ny − 1 (top wall)
    North,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::West, Face::East, Face::South, Face::North];

    pub fn opposite(self) -> Face {
        match self {
            Face::West => Face::East,
            Face::East => Face::West,
            Face::South => Face::North,
            Face::North => Face::South,
        }
    }

    /// Outward unit normal as an integer vector.
    pub fn outward_normal(self) -> [i32; 2] {
        match self {
            Face::West => [-1, 0],
            Face::East => [1, 0],
            Face::South => [0, -1],
            Face::North => [0, 1],
        }
    }

    fn slot(self) -> usize {
        match self {
            Face::West => 0,
            Face::East => 1,
            Face::South => 2,
            Face::North => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosureKind {
    /// Incoming = − outgoing (homogeneous Dirichlet on the scalar).
    AntiBounceBack,
    /// Incoming = + outgoing (no-slip wall).
    BounceBack,
    /// Anti-bounce-back plus `± coefficient · δρ`, `+` on the inlet face.
    PressureAntiBounceBack { coefficient: f64 },
    Periodic,
}

/// The rule filling the links that cross one face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryClosure {
    pub face: Face,
    pub kind: ClosureKind,
    /// Imposed scalar: the density drop δρ for the pressure closure, 0 otherwise.
    pub scalar: f64,
}

impl BoundaryClosure {
    pub fn anti_bounce_back(face: Face) -> Self {
        Self {
            face,
            kind: ClosureKind::AntiBounceBack,
            scalar: 0.0,
        }
    }

    pub fn bounce_back(face: Face) -> Self {
        Self {
            face,
            kind: ClosureKind::BounceBack,
            scalar: 0.0,
        }
    }

    pub fn periodic(face: Face) -> Self {
        Self {
            face,
            kind: ClosureKind::Periodic,
            scalar: 0.0,
        }
    }

    /// Pressure anti-bounce-back on an inlet (West) or outlet (East) face.
    pub fn pressure(face: Face, delta_rho: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !matches!(face, Face::West | Face::East) {
            return Err(Error::Config(format!(
                "pressure anti-bounce-back applies to inlet/outlet faces, not {face:?}"
            )));
        }
        Ok(Self {
            face,
            kind: ClosureKind::PressureAntiBounceBack {
                coefficient: pressure_coefficient(alpha, beta),
            },
            scalar: delta_rho,
        })
    }

    /// Value streamed into direction `j` of a boundary node whose
    /// post-collision populations are `post`.
    #[inline]
    pub fn incoming<const Q: usize>(&self, _j: usize, opposite: usize, post: &[f64; Q]) -> f64 {
        match self.kind {
            ClosureKind::BounceBack => post[opposite],
            ClosureKind::AntiBounceBack => -post[opposite],
            ClosureKind::PressureAntiBounceBack { coefficient } => {
                let sign = if self.face == Face::West { 1.0 } else { -1.0 };
                -post[opposite] + sign * coefficient * self.scalar
            }
            ClosureKind::Periodic => unreachable!("periodic faces are routed, not closed"),
        }
    }
}

/// `(4 − α − 2β) / 18`, the weight of the imposed density drop.
pub fn pressure_coefficient(alpha: f64, beta: f64) -> f64 {
    (4.0 - alpha - 2.0 * beta) / 18.0
}

/// Where a streamed link takes its value from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkSource<'a> {
    Node(usize, usize),
    Closure(&'a BoundaryClosure),
    Unclosed,
}

/// Face rules for the four faces of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Topology {
    faces: [Option<BoundaryClosure>; 4],
}

impl Topology {
    /// Checks that every closure sits on its own slot and that periodic
    /// faces come in opposite pairs.
    pub fn new(closures: &[BoundaryClosure]) -> Result<Self> {
        let mut faces: [Option<BoundaryClosure>; 4] = [None; 4];
        for c in closures {
            let slot = &mut faces[c.face.slot()];
            if slot.is_some() {
                return Err(Error::Config(format!("face {:?} has two closures", c.face)));
            }
            *slot = Some(*c);
        }
        let topology = Self { faces };
        for face in Face::ALL {
            if topology.is_periodic(face) && !topology.is_periodic(face.opposite()) {
                return Err(Error::Config(format!(
                    "face {face:?} is periodic but {:?} is not",
                    face.opposite()
                )));
            }
        }
        Ok(topology)
    }

    /// Periodic in both directions.
    pub fn periodic() -> Self {
        Self {
            faces: Face::ALL.map(|f| Some(BoundaryClosure::periodic(f))),
        }
    }

    /// Segment with anti-bounce-back at both ends.
    pub fn anti_bounce_back_segment() -> Self {
        Self {
            faces: [
                Some(BoundaryClosure::anti_bounce_back(Face::West)),
                Some(BoundaryClosure::anti_bounce_back(Face::East)),
                None,
                None,
            ],
        }
    }

    /// Bounce-back walls at South/North with the given ends.
    pub fn channel(west: BoundaryClosure, east: BoundaryClosure) -> Self {
        let mut faces = [None; 4];
        faces[Face::West.slot()] = Some(BoundaryClosure { face: Face::West, ..west });
        faces[Face::East.slot()] = Some(BoundaryClosure { face: Face::East, ..east });
        faces[Face::South.slot()] = Some(BoundaryClosure::bounce_back(Face::South));
        faces[Face::North.slot()] = Some(BoundaryClosure::bounce_back(Face::North));
        Self { faces }
    }

    pub fn face(&self, face: Face) -> Option<&BoundaryClosure> {
        self.faces[face.slot()].as_ref()
    }

    pub fn is_periodic(&self, face: Face) -> bool {
        matches!(self.face(face), Some(c) if c.kind == ClosureKind::Periodic)
    }

    /// Resolves the source `(sx, sy)` of a link on an `nx × ny` grid.
    #[inline]
    pub fn route(&self, sx: isize, sy: isize, nx: isize, ny: isize) -> LinkSource<'_> {
        let mut py = sy;
        if sy < 0 || sy >= ny {
            let face = if sy < 0 { Face::South } else { Face::North };
            match self.face(face) {
                Some(c) if c.kind == ClosureKind::Periodic => py = periodic_wrap(sy, ny as usize) as isize,
                Some(c) => return LinkSource::Closure(c),
                None => return LinkSource::Unclosed,
            }
        }
        let mut px = sx;
        if sx < 0 || sx >= nx {
            let face = if sx < 0 { Face::West } else { Face::East };
            match self.face(face) {
                Some(c) if c.kind == ClosureKind::Periodic => px = periodic_wrap(sx, nx as usize) as isize,
                Some(c) => return LinkSource::Closure(c),
                None => return LinkSource::Unclosed,
            }
        }
        LinkSource::Node(px as usize, py as usize)
    }
}

/// Maps a coordinate that left the grid through one face onto the
/// opposite face.
#[inline]
pub fn periodic_wrap(coordinate: isize, extent: usize) -> usize {
    coordinate.rem_euclid(extent as isize) as usize
}

/// D1Q3 anti-bounce-back: the inward population at an end node equals minus
/// the outward post-collision population of that node.
pub fn anti_bounce_back_1d(post: &[f64; 3], face: Face) -> Result<(usize, f64)> {
    let inward = match face {
        Face::West => 1,
        Face::East => 2,
        other => {
            return Err(Error::Config(format!("a segment has no {other:?} face")));
        }
    };
    Ok((inward, -post[D1Q3_OPPOSITE[inward]]))
}

/// D2Q9 directions pointing into the domain across `face`.
pub fn inward_directions(face: Face) -> [usize; 3] {
    let n = face.outward_normal();
    let mut out = [0; 3];
    let mut k = 0;
    for (j, v) in D2Q9_VELOCITIES.iter().enumerate() {
        if v[0] * n[0] + v[1] * n[1] < 0 {
            out[k] = j;
            k += 1;
        }
    }
    out
}

/// No-slip bounce-back at a flat wall: each wall-crossing incoming
/// population equals its opposite post-collision population.
pub fn bounce_back_wall(post: &[f64; 9], face: Face) -> [(usize, f64); 3] {
    inward_directions(face).map(|j| (j, post[D2Q9_OPPOSITE[j]]))
}

/// Anti-bounce-back with an imposed density drop on the inlet (`+`) or
/// outlet (`−`).
pub fn pressure_anti_bounce_back(
    post: &[f64; 9],
    face: Face,
    delta_rho: f64,
    alpha: f64,
    beta: f64,
) -> Result<[(usize, f64); 3]> {
    let closure = BoundaryClosure::pressure(face, delta_rho, alpha, beta)?;
    Ok(inward_directions(face).map(|j| (j, closure.incoming(j, D2Q9_OPPOSITE[j], post))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{stream, GridShape, LatticeSpec, PopulationField};
    use proptest::prelude::*;

    #[test]
    fn anti_bounce_back_1d_examples() {
        assert_eq!(anti_bounce_back_1d(&[0.3, 0.2, 0.1], Face::West).unwrap(), (1, -0.1));
        assert_eq!(anti_bounce_back_1d(&[0.3, 0.2, 0.1], Face::East).unwrap(), (2, -0.2));
        assert_eq!(anti_bounce_back_1d(&[0.0; 3], Face::West).unwrap().1, 0.0);
        assert!(anti_bounce_back_1d(&[0.0; 3], Face::North).is_err());
    }

    #[test]
    fn bounce_back_wall_examples() {
        let mut post = [0.0; 9];
        post[4] = 0.2;
        post[7] = 0.05;
        post[8] = 0.07;
        assert_eq!(
            bounce_back_wall(&post, Face::South),
            [(2, 0.2), (5, 0.05), (6, 0.07)]
        );
        assert_eq!(
            bounce_back_wall(&[0.0; 9], Face::North),
            [(4, 0.0), (7, 0.0), (8, 0.0)]
        );
    }

    #[test]
    fn pressure_coefficient_examples() {
        assert!((pressure_coefficient(-2.0, 1.0) - 2.0 / 9.0).abs() < 1e-15);
        assert!((pressure_coefficient(-2.5, 2.5) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn pressure_closure_without_drop_is_plain_anti_bounce_back() {
        let post: [f64; 9] = std::array::from_fn(|j| 0.1 * j as f64 + 0.01);
        let inlet = pressure_anti_bounce_back(&post, Face::West, 0.0, -2.0, 1.0).unwrap();
        assert_eq!(inlet, [(1, -post[3]), (5, -post[7]), (8, -post[6])]);
        let outlet = pressure_anti_bounce_back(&post, Face::East, 0.0, -2.0, 1.0).unwrap();
        assert_eq!(outlet, [(3, -post[1]), (6, -post[8]), (7, -post[5])]);
        assert!(pressure_anti_bounce_back(&post, Face::South, 0.0, -2.0, 1.0).is_err());
    }

    #[test]
    fn pressure_closure_adds_signed_drop() {
        let post = [0.0; 9];
        let c = 2.0 / 9.0;
        let inlet = pressure_anti_bounce_back(&post, Face::West, 0.9, -2.0, 1.0).unwrap();
        for (_, v) in inlet {
            assert!((v - c * 0.9).abs() < 1e-15);
        }
        let outlet = pressure_anti_bounce_back(&post, Face::East, 0.9, -2.0, 1.0).unwrap();
        for (_, v) in outlet {
            assert!((v + c * 0.9).abs() < 1e-15);
        }
    }

    #[test]
    fn same_node_pressure_closure_matches_ghost_node_form() {
        // Hand-worked 3x3 channel: stream the post-collision field onto a
        // grid padded with ghost columns k = 0 and k = Nx + 1, then apply the
        // ghost-node formulas literally and compare with the same-node closure.
        let (alpha, beta, drho) = (-2.0, 1.0, 0.3);
        let c = pressure_coefficient(alpha, beta);
        let shape = GridShape::plane(3, 3);
        let post: Vec<[f64; 9]> = (0..9)
            .map(|n| std::array::from_fn(|j| ((7 * n + 3 * j) % 11) as f64 / 10.0 - 0.4))
            .collect();
        let mut f = PopulationField::from_nodes(shape, post.clone()).unwrap();
        let topology = Topology::channel(
            BoundaryClosure::pressure(Face::West, drho, alpha, beta).unwrap(),
            BoundaryClosure::pressure(Face::East, drho, alpha, beta).unwrap(),
        );
        stream(&mut f, &LatticeSpec::d2q9_unit(), &topology).unwrap();

        // Padded grid: columns 0..=4, physical column k maps to padded k + 1.
        // ghost(k, l, j) = value of f_j at padded node (k, l) after streaming,
        // which for ghost columns is f*_j streamed from the physical grid.
        let post_at = |k: isize, l: isize, j: usize| -> Option<f64> {
            if (0..3).contains(&k) && (0..3).contains(&l) {
                Some(post[(3 * l + k) as usize][j])
            } else {
                None
            }
        };
        let ghost = |k: isize, l: isize, j: usize| -> f64 {
            let v = D2Q9_VELOCITIES[j];
            post_at(k - v[0] as isize, l - v[1] as isize, j).expect("ghost is fed by the grid")
        };
        // Only rows whose ghost source is inside the grid (middle row for the
        // diagonals, all rows for the axis link) are pressure-closed.
        for l in 0..3isize {
            assert_eq!(f.node(0, l as usize)[1], -ghost(-1, l, 3) + c * drho);
            assert_eq!(f.node(2, l as usize)[3], -ghost(3, l, 1) - c * drho);
        }
        let l = 1isize;
        assert_eq!(f.node(0, 1)[5], -ghost(-1, l - 1, 7) + c * drho);
        assert_eq!(f.node(0, 1)[8], -ghost(-1, l + 1, 6) + c * drho);
        assert_eq!(f.node(2, 1)[6], -ghost(3, l - 1, 8) - c * drho);
        assert_eq!(f.node(2, 1)[7], -ghost(3, l + 1, 5) - c * drho);
        // Corner diagonals are doubly outside and fall to the wall.
        assert_eq!(f.node(0, 0)[5], post[0][7]);
        assert_eq!(f.node(0, 2)[8], post[6][6]);
        assert_eq!(f.node(2, 0)[6], post[2][8]);
    }

    #[test]
    fn unpaired_periodic_face_is_rejected() {
        let err = Topology::new(&[
            BoundaryClosure::periodic(Face::West),
            BoundaryClosure::anti_bounce_back(Face::East),
        ]);
        assert!(matches!(err, Err(Error::Config(_))));
        let dup = Topology::new(&[
            BoundaryClosure::bounce_back(Face::South),
            BoundaryClosure::bounce_back(Face::South),
        ]);
        assert!(dup.is_err());
    }

    #[test]
    fn periodic_wrap_examples() {
        assert_eq!(periodic_wrap(4, 4), 0);
        assert_eq!(periodic_wrap(-1, 4), 3);
        let t = Topology::periodic();
        // f5 leaving (Nx-1, l) enters (0, l+1): its source seen from (0, l+1)
        // is (-1, l).
        assert_eq!(t.route(-1, 1, 4, 3), LinkSource::Node(3, 1));
    }

    #[test]
    fn uniform_field_is_invariant_under_periodic_wrap() {
        let shape = GridShape::plane(4, 3);
        let node: [f64; 9] = std::array::from_fn(|j| 0.1 + j as f64);
        let mut f = PopulationField::from_nodes(shape, vec![node; 12]).unwrap();
        let before = f.clone();
        stream(&mut f, &LatticeSpec::d2q9_unit(), &Topology::periodic()).unwrap();
        assert_eq!(f.nodes(), before.nodes());
    }

    proptest! {
        #[test]
        fn bounce_back_twice_through_reflection_is_identity(
            post in proptest::array::uniform9(-1.0f64..1.0)
        ) {
            for face in [Face::South, Face::North] {
                let first = bounce_back_wall(&post, face);
                let mut reflected = post;
                for (j, v) in first {
                    reflected[D2Q9_OPPOSITE[j]] = v;
                }
                prop_assert_eq!(reflected, post);
                let mut back = [0.0; 9];
                for (j, v) in first {
                    back[j] = v;
                }
                let mirrored: [f64; 9] = std::array::from_fn(|j| back[D2Q9_OPPOSITE[j]]);
                let second = bounce_back_wall(&mirrored, face);
                for ((j1, v1), (j2, v2)) in first.iter().zip(second.iter()) {
                    prop_assert_eq!(j1, j2);
                    prop_assert_eq!(v1, v2);
                }
            }
        }
    }
}
