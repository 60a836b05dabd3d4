//! Colosseum placement of wedges in 3D and locality certification.
//!
//! Wedge `j` of `n` occupies an angular sector of the annulus. Sheet `t` of
//! the wedge sits at angle `θ = 2π(jL + t)/(Ln)` with `L` sheets per wedge,
//! so the right face of wedge `j` and the left face of wedge `j+1` are
//! angular neighbours. Within a sheet a site at folded coordinates `(u, v)`
//! sits at radius `r_out − u·Δ_R` and height `v·Δ_R`; the two sides of the
//! fold are offset vertically by `Δ_R/4`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_traits::Float;
use serde::Serialize;

use crate::surface_code::{CodeError, SiteRole, WedgeLayout};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GeometryError {
    #[error("need at least 2 wedges, got {0}")]
    TooFewWedges(usize),
    #[error("spacings must be positive")]
    NonPositiveSpacing,
    #[error("inner spacing {0} is not positive")]
    InnerSpacing(f64),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Site3D<T> {
    pub id: usize,
    pub pos: [T; 3],
    pub role: SiteRole,
    /// Wedge index.
    pub block: usize,
}

/// Sites with coordinates and the interaction graph on them.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Layout3D<T> {
    pub sites: Vec<Site3D<T>>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalityReport<T> {
    pub kappa: T,
    pub max_edge_length: T,
    /// Most sites within distance `κ` of any site, itself included.
    pub max_ball_occupancy: usize,
    pub occupancy_bound: usize,
    pub pass: bool,
}

/// Occupancy allowed by [`check_locality`].
pub const DEFAULT_OCCUPANCY_BOUND: usize = 256;

impl<T: Float> Layout3D<T> {
    pub fn edge_length(&self, (a, b): (usize, usize)) -> T {
        dist(&self.sites[a].pos, &self.sites[b].pos)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }

    /// A single wedge laid out straight: sheets along the first axis.
    pub fn from_wedge(w: &WedgeLayout, spacing: T) -> Self {
        let sites = w
            .sites
            .iter()
            .enumerate()
            .map(|(id, s)| {
                let (u, v, side) = s.folded();
                let pos = [cast::<T>(s.t as f64), cast(u as f64), cast(v as f64 + if side { 0.25 } else { 0.0 })]
                    .map(|c| c * spacing);
                Site3D { id, pos, role: s.role, block: 0 }
            })
            .collect();
        Self { sites, edges: wedge_edges(w) }
    }
}

fn cast<T: Float>(x: f64) -> T {
    T::from(x).expect("float conversion")
}

fn dist<T: Float>(a: &[T; 3], b: &[T; 3]) -> T {
    (0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).fold(T::zero(), |s, x| s + x).sqrt()
}

/// Cluster edges plus the fold pairs of the right face used by the logical
/// gates.
fn wedge_edges(w: &WedgeLayout) -> Vec<(usize, usize)> {
    let mut e = w.edges.clone();
    e.extend(w.patch.mirror_pairs().into_iter().map(|(a, b)| (w.m + a, w.m + b)));
    e
}

/// Inner-circle spacing `Δ_in = Δ_out − 2πΔ_R/n`.
pub fn inner_spacing<T: Float>(n: usize, delta_out: T, delta_r: T) -> T {
    delta_out - cast::<T>(2.0 * PI) * delta_r / cast(n as f64)
}

/// `r_out = Δ_out·L·n/(2π)` for `L` sheets per wedge.
pub fn outer_radius<T: Float>(n: usize, sheets: usize, delta_out: T) -> T {
    delta_out * cast((sheets * n) as f64) / cast(2.0 * PI)
}

/// `n` distance-`d` wedges glued in a ring.
pub fn colosseum_layout<T: Float>(n: usize, d: usize, delta_out: T, delta_r: T) -> Result<Layout3D<T>, GeometryError> {
    colosseum_layout_for(&WedgeLayout::new(d)?, n, delta_out, delta_r)
}

/// Places `n` copies of `w` around the annulus. Global site ids are
/// `j·|w| + q`. Besides the wedge edges, face `R` of wedge `j` is joined
/// qubit by qubit to face `L` of wedge `j+1`.
pub fn colosseum_layout_for<T: Float>(
    w: &WedgeLayout,
    n: usize,
    delta_out: T,
    delta_r: T,
) -> Result<Layout3D<T>, GeometryError> {
    if n < 2 {
        return Err(GeometryError::TooFewWedges(n));
    }
    if delta_out <= T::zero() || delta_r <= T::zero() {
        return Err(GeometryError::NonPositiveSpacing);
    }
    let d_in = inner_spacing(n, delta_out, delta_r);
    if d_in <= T::zero() {
        return Err(GeometryError::InnerSpacing(d_in.to_f64().unwrap_or(f64::NAN)));
    }
    let sheets = w.t_max + 1;
    let r_out = outer_radius(n, sheets, delta_out);
    let per = w.n_qubits();
    let mut layout = Layout3D { sites: Vec::with_capacity(n * per), edges: Vec::new() };
    let base = wedge_edges(w);
    for j in 0..n {
        for (q, s) in w.sites.iter().enumerate() {
            let (u, v, side) = s.folded();
            let theta = cast::<T>(2.0 * PI * (j * sheets + s.t) as f64 / (sheets * n) as f64);
            let rho = r_out - cast::<T>(u as f64) * delta_r;
            let z = cast::<T>(v as f64 + if side { 0.25 } else { 0.0 }) * delta_r;
            layout.sites.push(Site3D { id: j * per + q, pos: [rho * theta.cos(), rho * theta.sin(), z], role: s.role, block: j });
        }
        layout.edges.extend(base.iter().map(|&(a, b)| (j * per + a, j * per + b)));
        let next = (j + 1) % n;
        layout.edges.extend((0..w.m).map(|q| (j * per + w.m + q, next * per + q)));
    }
    Ok(layout)
}

/// Locality with the default occupancy bound.
pub fn check_locality<T: Float>(layout: &Layout3D<T>, kappa: T) -> LocalityReport<T> {
    check_locality_with(layout, kappa, DEFAULT_OCCUPANCY_BOUND)
}

/// Longest edge, and the largest number of sites in a ball of radius `κ`
/// around a site, found by hashing sites into cubes of side `κ`.
pub fn check_locality_with<T: Float>(layout: &Layout3D<T>, kappa: T, occupancy_bound: usize) -> LocalityReport<T> {
    let max_edge_length = layout.edges.iter().map(|&e| layout.edge_length(e)).fold(T::zero(), T::max);
    let cell = |p: &[T; 3]| p.map(|c| (c / kappa).floor().to_i64().expect("finite coordinate"));
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, s) in layout.sites.iter().enumerate() {
        grid.entry(cell(&s.pos)).or_default().push(i);
    }
    let mut max_ball_occupancy = 0;
    for s in &layout.sites {
        let c = cell(&s.pos);
        let mut count = 0;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(v) = grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        count += v.iter().filter(|&&o| dist(&s.pos, &layout.sites[o].pos) <= kappa).count();
                    }
                }
            }
        }
        max_ball_occupancy = max_ball_occupancy.max(count);
    }
    let pass = max_edge_length <= kappa && max_ball_occupancy <= occupancy_bound;
    LocalityReport { kappa, max_edge_length, max_ball_occupancy, occupancy_bound, pass }
}
