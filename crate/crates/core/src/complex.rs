//! The cubical grid complex of a volume (voxels as vertices).
//!
//! A d-cube takes the maximum value of its vertices. Boundary enumeration uses
//! hard-coded facet tables per `(dim, type)`, listed in ascending packed order
//! so that walking a table backwards yields the reverse order.

use crate::cube::{axes_mask, kind_of_mask, pack, type_count, Cube};
use crate::error::{Error, Result};

/// Facet offsets `(dx, dy, dz, facet type)` in ascending packed order.
type FacetTable = &'static [(u8, u8, u8, u8)];

const EDGE_FACETS: [FacetTable; 3] = [
    &[(0, 0, 0, 0), (1, 0, 0, 0)],
    &[(0, 0, 0, 0), (0, 1, 0, 0)],
    &[(0, 0, 0, 0), (0, 0, 1, 0)],
];

const SQUARE_FACETS: [FacetTable; 3] = [
    // normal to x: y- and z-edges
    &[(0, 0, 0, 1), (0, 0, 0, 2), (0, 0, 1, 1), (0, 1, 0, 2)],
    // normal to y: x- and z-edges
    &[(0, 0, 0, 0), (0, 0, 0, 2), (0, 0, 1, 0), (1, 0, 0, 2)],
    // normal to z: x- and y-edges
    &[(0, 0, 0, 0), (0, 0, 0, 1), (0, 1, 0, 0), (1, 0, 0, 1)],
];

const CUBE_FACETS: FacetTable = &[
    (0, 0, 0, 0),
    (0, 0, 0, 1),
    (0, 0, 0, 2),
    (0, 0, 1, 2),
    (0, 1, 0, 1),
    (1, 0, 0, 0),
];

/// Read-only view of a volume's values as a filtered cubical complex.
///
/// Values must already be in sublevel orientation and in `(x, y, z)` order.
#[derive(Clone, Copy, Debug)]
pub struct GridComplex<'a> {
    values: &'a [f64],
    shape: [usize; 3],
    strides: [usize; 3],
}

impl<'a> GridComplex<'a> {
    pub fn new(values: &'a [f64], shape: [usize; 3]) -> Self {
        assert_eq!(values.len(), shape.iter().product::<usize>());
        GridComplex {
            values,
            shape,
            strides: [shape[1] * shape[2], shape[2], 1],
        }
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }

    pub fn vertex_count(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn offset(&self, x: usize, y: usize, z: usize) -> usize {
        x * self.strides[0] + y * self.strides[1] + z
    }

    #[inline]
    pub fn offset_of(&self, cube: &Cube) -> usize {
        self.offset(cube.x(), cube.y(), cube.z())
    }

    #[inline]
    pub fn position(&self, offset: usize) -> [usize; 3] {
        [
            offset / self.strides[0],
            (offset / self.strides[1]) % self.shape[1],
            offset % self.shape[2],
        ]
    }

    #[inline]
    pub fn vertex_value(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[self.offset(x, y, z)]
    }

    /// Number of axes with extent greater than one.
    pub fn top_dim(&self) -> usize {
        self.shape.iter().filter(|&&n| n > 1).count()
    }

    /// Whether the cube of dimension `dim` and type `kind` at `(x, y, z)` lies in the complex.
    pub fn contains(&self, dim: usize, x: usize, y: usize, z: usize, kind: u8) -> bool {
        if dim > 3 || (kind as usize) >= type_count(dim) {
            return false;
        }
        let mask = axes_mask(dim, kind);
        let p = [x, y, z];
        (0..3).all(|a| {
            let extent = if mask & (1 << a) != 0 { 1 } else { 0 };
            p[a] + extent < self.shape[a]
        })
    }

    /// Number of `dim`-cubes in the complex.
    pub fn cell_count(&self, dim: usize) -> usize {
        if dim > 3 {
            return 0;
        }
        (0..type_count(dim) as u8)
            .map(|kind| {
                let mask = axes_mask(dim, kind);
                (0..3)
                    .map(|a| {
                        if mask & (1 << a) != 0 {
                            self.shape[a] - 1
                        } else {
                            self.shape[a]
                        }
                    })
                    .product::<usize>()
            })
            .sum()
    }

    #[inline]
    pub fn edge_birth(&self, offset: usize, kind: u8) -> f64 {
        let v = self.values;
        v[offset].max(v[offset + self.strides[kind as usize]])
    }

    #[inline]
    pub fn square_birth(&self, offset: usize, kind: u8) -> f64 {
        let (a, b) = match kind {
            0 => (self.strides[1], self.strides[2]),
            1 => (self.strides[0], self.strides[2]),
            _ => (self.strides[0], self.strides[1]),
        };
        let v = self.values;
        v[offset]
            .max(v[offset + a])
            .max(v[offset + b])
            .max(v[offset + a + b])
    }

    #[inline]
    pub fn cube_birth(&self, offset: usize) -> f64 {
        let [sx, sy, _] = self.strides;
        let v = self.values;
        v[offset]
            .max(v[offset + 1])
            .max(v[offset + sy])
            .max(v[offset + sy + 1])
            .max(v[offset + sx])
            .max(v[offset + sx + 1])
            .max(v[offset + sx + sy])
            .max(v[offset + sx + sy + 1])
    }

    /// Birth of a cube known to lie in the complex.
    #[inline]
    pub fn birth_at(&self, dim: usize, offset: usize, kind: u8) -> f64 {
        match dim {
            0 => self.values[offset],
            1 => self.edge_birth(offset, kind),
            2 => self.square_birth(offset, kind),
            _ => self.cube_birth(offset),
        }
    }

    /// Filtration value of a cube: the maximum over its vertex values.
    pub fn filtration_value(&self, dim: usize, coords: [usize; 3], kind: u8) -> Result<f64> {
        let [x, y, z] = coords;
        if !self.contains(dim, x, y, z, kind) {
            return Err(Error::OutOfBounds(coords));
        }
        Ok(self.birth_at(dim, self.offset(x, y, z), kind))
    }

    /// The cube with its birth read from this complex.
    pub fn cube(&self, dim: usize, x: usize, y: usize, z: usize, kind: u8) -> Cube {
        Cube {
            birth: self.birth_at(dim, self.offset(x, y, z), kind),
            index: pack(x, y, z, kind),
        }
    }

    /// Re-reads the birth of a cube (possibly from another complex) at the same location.
    #[inline]
    pub fn rebirth(&self, dim: usize, cube: &Cube) -> Cube {
        Cube {
            birth: self.birth_at(dim, self.offset_of(cube), cube.kind()),
            index: cube.index,
        }
    }

    /// Lazily enumerates the facets of a `dim`-cube in ascending packed order;
    /// iterate with `.rev()` for descending order. `dim` must be 1, 2 or 3.
    pub fn boundary(&self, dim: usize, cube: &Cube) -> Boundary<'a> {
        let table = match dim {
            1 => EDGE_FACETS[cube.kind() as usize],
            2 => SQUARE_FACETS[cube.kind() as usize],
            3 => CUBE_FACETS,
            _ => panic!("cubes of dimension {dim} have no boundary table"),
        };
        Boundary {
            complex: *self,
            base: cube.coords(),
            facet_dim: dim - 1,
            table,
            front: 0,
            back: table.len(),
        }
    }

    /// The vertex whose value defines the cube's birth; ties go to the smallest vertex.
    pub fn critical_vertex(&self, dim: usize, cube: &Cube) -> [usize; 3] {
        let mask = axes_mask(dim, cube.kind());
        let base = cube.coords();
        let mut best: Option<([usize; 3], f64)> = None;
        // corners enumerated in ascending lexicographic order
        for corner in 0..8u8 {
            let bits = [corner >> 2 & 1, corner >> 1 & 1, corner & 1];
            if (0..3).any(|a| bits[a] == 1 && mask & (1 << a) == 0) {
                continue;
            }
            let p = [
                base[0] + bits[0] as usize,
                base[1] + bits[1] as usize,
                base[2] + bits[2] as usize,
            ];
            let v = self.vertex_value(p[0], p[1], p[2]);
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((p, v));
            }
        }
        best.expect("a cube has at least one vertex").0
    }

    /// All `dim`-cubes accepted by `keep`, in refined filtration order.
    ///
    /// Generation order is ascending packed order, so a stable sort on birth
    /// suffices. With `partition_sort`, inputs with at most two distinct births
    /// are ordered by a stable two-way partition instead.
    pub fn sorted_columns(
        &self,
        dim: usize,
        keep: impl Fn(&Cube) -> bool,
        partition_sort: bool,
    ) -> Vec<Cube> {
        let mut cubes = Vec::with_capacity(self.cell_count(dim));
        if dim > 3 {
            return cubes;
        }
        let kinds: Vec<u8> = (0..type_count(dim) as u8).collect();
        let [n1, n2, n3] = self.shape;
        for x in 0..n1 {
            for y in 0..n2 {
                for z in 0..n3 {
                    let offset = self.offset(x, y, z);
                    for &kind in &kinds {
                        if !self.contains(dim, x, y, z, kind) {
                            continue;
                        }
                        let cube = Cube {
                            birth: self.birth_at(dim, offset, kind),
                            index: pack(x, y, z, kind),
                        };
                        if keep(&cube) {
                            cubes.push(cube);
                        }
                    }
                }
            }
        }
        if partition_sort {
            if let Some(sorted) = partition_two_valued(&cubes) {
                return sorted;
            }
        }
        cubes.sort_by(|a, b| a.birth.total_cmp(&b.birth));
        cubes
    }

    /// Layout of the top-dimensional cells and their dual graph.
    pub fn dual(&self) -> DualLayout {
        DualLayout::new(self.shape)
    }

    /// Every codimension-one cell paired with its one or two cofacets.
    ///
    /// Cells on the hull get [`Cube::OUTSIDE`] as their second endpoint.
    /// Requires `top_dim() >= 2`.
    pub fn dual_edges(&self) -> Vec<(Cube, (Cube, Cube))> {
        let layout = self.dual();
        let births = layout.top_births(self);
        self.sorted_columns(layout.top_dim - 1, |_| true, false)
            .into_iter()
            .map(|edge| {
                let (lo, hi) = layout.cofacets(self, &edge);
                let vertex = |id: usize| {
                    if id == layout.outside {
                        Cube::OUTSIDE
                    } else {
                        let [x, y, z] = self.position(id);
                        Cube {
                            birth: births[id],
                            index: pack(x, y, z, layout.top_kind),
                        }
                    }
                };
                (edge, (vertex(lo), vertex(hi)))
            })
            .collect()
    }
}

fn partition_two_valued(cubes: &[Cube]) -> Option<Vec<Cube>> {
    let first = cubes.first()?.birth;
    let mut other = None;
    for c in cubes {
        if c.birth != first {
            match other {
                None => other = Some(c.birth),
                Some(o) if o != c.birth => return None,
                _ => {}
            }
        }
    }
    let Some(other) = other else {
        return Some(cubes.to_vec());
    };
    let low = first.min(other);
    let mut out = Vec::with_capacity(cubes.len());
    out.extend(cubes.iter().filter(|c| c.birth == low));
    out.extend(cubes.iter().filter(|c| c.birth != low));
    Some(out)
}

/// Lazy facet enumerator returned by [`GridComplex::boundary`].
#[derive(Clone, Debug)]
pub struct Boundary<'a> {
    complex: GridComplex<'a>,
    base: [usize; 3],
    facet_dim: usize,
    table: FacetTable,
    front: usize,
    back: usize,
}

impl Boundary<'_> {
    #[inline]
    fn facet(&self, entry: (u8, u8, u8, u8)) -> Cube {
        let (dx, dy, dz, kind) = entry;
        let (x, y, z) = (
            self.base[0] + dx as usize,
            self.base[1] + dy as usize,
            self.base[2] + dz as usize,
        );
        Cube {
            birth: self
                .complex
                .birth_at(self.facet_dim, self.complex.offset(x, y, z), kind),
            index: pack(x, y, z, kind),
        }
    }
}

impl Iterator for Boundary<'_> {
    type Item = Cube;

    #[inline]
    fn next(&mut self) -> Option<Cube> {
        if self.front == self.back {
            return None;
        }
        let entry = self.table[self.front];
        self.front += 1;
        Some(self.facet(entry))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.back - self.front;
        (n, Some(n))
    }
}

impl DoubleEndedIterator for Boundary<'_> {
    #[inline]
    fn next_back(&mut self) -> Option<Cube> {
        if self.front == self.back {
            return None;
        }
        self.back -= 1;
        Some(self.facet(self.table[self.back]))
    }
}

impl ExactSizeIterator for Boundary<'_> {}

/// Dual graph of the top-dimensional cells: top cells are dual vertices,
/// codimension-one cells are dual edges, and an extra vertex stands for the outside.
#[derive(Clone, Copy, Debug)]
pub struct DualLayout {
    /// Dimension of the top cells.
    pub top_dim: usize,
    /// Type of the top cells.
    pub top_kind: u8,
    /// Identifier of the outside vertex; top cells use their flat offset.
    pub outside: usize,
    /// For each type of codimension-one cell, the axis its cofacets differ along.
    normal_axis: [usize; 3],
    shape: [usize; 3],
}

impl DualLayout {
    fn new(shape: [usize; 3]) -> Self {
        let mask = (0..3)
            .filter(|&a| shape[a] > 1)
            .fold(0u8, |m, a| m | (1 << a));
        let (top_dim, top_kind) = kind_of_mask(mask);
        let mut normal_axis = [0; 3];
        if top_dim >= 1 {
            for kind in 0..type_count(top_dim - 1) as u8 {
                let missing = mask & !axes_mask(top_dim - 1, kind);
                if missing.count_ones() == 1 {
                    normal_axis[kind as usize] = missing.trailing_zeros() as usize;
                }
            }
        }
        DualLayout {
            top_dim,
            top_kind,
            outside: shape.iter().product(),
            normal_axis,
            shape,
        }
    }

    /// Births of the top cells by flat offset; entries of invalid offsets are unspecified.
    pub fn top_births(&self, complex: &GridComplex<'_>) -> Vec<f64> {
        let mut births = vec![f64::INFINITY; self.outside];
        let [n1, n2, n3] = self.shape;
        let reach = |n: usize| if n > 1 { n - 1 } else { 1 };
        for x in 0..reach(n1) {
            for y in 0..reach(n2) {
                for z in 0..reach(n3) {
                    let offset = complex.offset(x, y, z);
                    births[offset] = complex.birth_at(self.top_dim, offset, self.top_kind);
                }
            }
        }
        births
    }

    /// The two dual endpoints (flat offsets, or `outside`) of a codimension-one cell.
    #[inline]
    pub fn cofacets(&self, complex: &GridComplex<'_>, edge: &Cube) -> (usize, usize) {
        let axis = self.normal_axis[edge.kind() as usize];
        let p = edge.coords();
        let offset = complex.offset(p[0], p[1], p[2]);
        let stride = complex.strides[axis];
        let lower = if p[axis] >= 1 {
            offset - stride
        } else {
            self.outside
        };
        let upper = if p[axis] + 1 < self.shape[axis] {
            offset
        } else {
            self.outside
        };
        (lower, upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::unpack;

    fn grid(shape: [usize; 3], seed: u64) -> Vec<f64> {
        let n: usize = shape.iter().product();
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 33) as f64 / (1u64 << 31) as f64
            })
            .collect()
    }

    /// Facets by brute force: drop one spanned axis at the lower or upper side.
    fn brute_facets(dim: usize, c: &Cube) -> Vec<u64> {
        let mask = axes_mask(dim, c.kind());
        let mut out = Vec::new();
        for a in 0..3 {
            if mask & (1 << a) == 0 {
                continue;
            }
            let (fdim, fkind) = kind_of_mask(mask & !(1 << a));
            assert_eq!(fdim, dim - 1);
            for shift in 0..2 {
                let mut p = c.coords();
                p[a] += shift;
                out.push(pack(p[0], p[1], p[2], fkind));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn filtration_values() {
        let values = vec![0.3, 0.7, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0];
        let c = GridComplex::new(&values, [2, 2, 2]);
        assert_eq!(c.filtration_value(0, [0, 0, 0], 0).unwrap(), 0.3);
        // x-edge over voxels (0,0,0)=0.3 and (1,0,0)=0.0; y-edge over 0.3, 0.2
        assert_eq!(c.filtration_value(1, [0, 0, 0], 0).unwrap(), 0.3);
        assert_eq!(c.filtration_value(1, [0, 0, 0], 2).unwrap(), 0.7);
        assert_eq!(c.filtration_value(3, [0, 0, 0], 0).unwrap(), 0.7);
        assert!(matches!(
            c.filtration_value(1, [1, 0, 0], 0),
            Err(Error::OutOfBounds(_))
        ));

        let edge = vec![0.2, 0.7];
        let e = GridComplex::new(&edge, [2, 1, 1]);
        assert_eq!(e.filtration_value(1, [0, 0, 0], 0).unwrap(), 0.7);

        let ones = vec![1.0; 8];
        let o = GridComplex::new(&ones, [2, 2, 2]);
        assert_eq!(o.filtration_value(3, [0, 0, 0], 0).unwrap(), 1.0);
    }

    #[test]
    fn boundary_tables_match_brute_force() {
        let shape = [3, 3, 3];
        let values = grid(shape, 7);
        let c = GridComplex::new(&values, shape);
        for dim in 1..=3 {
            for cube in c.sorted_columns(dim, |_| true, false) {
                let forward: Vec<u64> = c.boundary(dim, &cube).map(|f| f.index).collect();
                assert_eq!(forward, brute_facets(dim, &cube), "dim {dim} cube {cube}");
                assert_eq!(forward.len(), 2 * dim);
                for f in c.boundary(dim, &cube) {
                    let (x, y, z, t) = unpack(f.index);
                    assert!(c.contains(dim - 1, x, y, z, t));
                    assert_eq!(f.birth, c.cube(dim - 1, x, y, z, t).birth);
                    assert!(f.birth <= cube.birth);
                }
            }
        }
    }

    #[test]
    fn square_in_xy_plane_has_two_x_and_two_y_edges() {
        let values = vec![0.0; 8];
        let c = GridComplex::new(&values, [2, 2, 2]);
        let sq = c.cube(2, 0, 0, 0, 2);
        let kinds: Vec<u8> = c.boundary(2, &sq).map(|f| f.kind()).collect();
        assert_eq!(kinds.iter().filter(|&&k| k == 0).count(), 2);
        assert_eq!(kinds.iter().filter(|&&k| k == 1).count(), 2);
        let edge = c.cube(1, 0, 0, 0, 1);
        assert_eq!(c.boundary(1, &edge).count(), 2);
    }

    #[test]
    fn reverse_boundary_is_reversed_forward() {
        let shape = [4, 5, 3];
        let values = grid(shape, 11);
        let c = GridComplex::new(&values, shape);
        let mut checked = 0;
        for dim in 1..=3 {
            for cube in c.sorted_columns(dim, |_| true, false).into_iter().take(40) {
                let mut fwd: Vec<Cube> = c.boundary(dim, &cube).collect();
                fwd.reverse();
                let rev: Vec<Cube> = c.boundary(dim, &cube).rev().collect();
                assert_eq!(fwd, rev);
                checked += 1;
            }
        }
        assert!(checked >= 100);
    }

    #[test]
    fn cell_counts_match_enumeration() {
        for n1 in 1..=4 {
            for n2 in 1..=4 {
                for n3 in 1..=4 {
                    let shape = [n1, n2, n3];
                    let values = vec![0.0; n1 * n2 * n3];
                    let c = GridComplex::new(&values, shape);
                    for dim in 0..=3 {
                        let mut brute = 0;
                        for x in 0..n1 {
                            for y in 0..n2 {
                                for z in 0..n3 {
                                    for t in 0..type_count(dim) as u8 {
                                        brute += c.contains(dim, x, y, z, t) as usize;
                                    }
                                }
                            }
                        }
                        assert_eq!(c.cell_count(dim), brute, "shape {shape:?} dim {dim}");
                        assert_eq!(c.sorted_columns(dim, |_| true, true).len(), brute);
                    }
                    assert_eq!(c.cell_count(0), n1 * n2 * n3);
                    assert_eq!(
                        c.cell_count(3),
                        (n1 - 1) * (n2 - 1) * (n3 - 1)
                    );
                }
            }
        }
    }

    #[test]
    fn constant_grid_keeps_generation_order() {
        let values = vec![0.5; 27];
        let c = GridComplex::new(&values, [3, 3, 3]);
        for dim in 0..=3 {
            let cols = c.sorted_columns(dim, |_| true, false);
            assert!(cols.windows(2).all(|w| w[0].index < w[1].index));
        }
    }

    #[test]
    fn partition_sort_matches_stable_sort() {
        let shape = [5, 4, 6];
        let values: Vec<f64> = grid(shape, 3)
            .into_iter()
            .map(|v| if v > 0.6 { 1.0 } else { 0.0 })
            .collect();
        let c = GridComplex::new(&values, shape);
        for dim in 0..=3 {
            let a = c.sorted_columns(dim, |_| true, true);
            let b = c.sorted_columns(dim, |_| true, false);
            assert_eq!(a.len(), b.len());
            assert!(a.iter().zip(&b).all(|(p, q)| p.index == q.index && p.birth == q.birth));
            assert!(b.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exclusion_of_everything_is_empty() {
        let values = grid([3, 3, 3], 1);
        let c = GridComplex::new(&values, [3, 3, 3]);
        assert!(c.sorted_columns(1, |_| false, true).is_empty());
    }

    #[test]
    fn dual_edges_interior_and_hull() {
        // 4x4x4 voxels: 3x3x3 block of 3-cubes
        let shape = [4, 4, 4];
        let values = grid(shape, 5);
        let c = GridComplex::new(&values, shape);
        let edges = c.dual_edges();
        assert_eq!(edges.len(), c.cell_count(2));
        let interior = c.cube(2, 1, 1, 1, 0);
        let (_, (a, b)) = edges.iter().find(|(e, _)| e.index == interior.index).unwrap();
        assert!(!a.is_outside() && !b.is_outside());
        assert_eq!(a.coords(), [0, 1, 1]);
        assert_eq!(b.coords(), [1, 1, 1]);
        let hull = c.cube(2, 0, 1, 1, 0);
        let (_, (a, b)) = edges.iter().find(|(e, _)| e.index == hull.index).unwrap();
        assert!(a.is_outside());
        assert_eq!(b.coords(), [0, 1, 1]);
        for (e, (a, b)) in &edges {
            for v in [a, b] {
                if !v.is_outside() {
                    assert!(e.birth <= v.birth);
                }
            }
        }
    }

    #[test]
    fn dual_edge_count_two_cubed() {
        let values = grid([2, 2, 2], 9);
        let c = GridComplex::new(&values, [2, 2, 2]);
        // 3 * (n-1)^2 * n = 3 * 1 * 2 = 6 squares, each on the hull of the single 3-cube
        let edges = c.dual_edges();
        assert_eq!(edges.len(), 6);
        assert!(edges.iter().all(|(_, (a, b))| a.is_outside() ^ b.is_outside()));
    }

    #[test]
    fn critical_vertex_is_argmax() {
        let values = vec![0.1, 0.9, 0.4, 0.9, 0.2, 0.3, 0.0, 0.5];
        let c = GridComplex::new(&values, [2, 2, 2]);
        let cube = c.cube(3, 0, 0, 0, 0);
        // 0.9 at (0,0,1) and (0,1,1); smaller one wins
        assert_eq!(c.critical_vertex(3, &cube), [0, 0, 1]);
        let e = c.cube(1, 0, 0, 0, 0);
        assert_eq!(c.critical_vertex(1, &e), [1, 0, 0]);
    }
}
