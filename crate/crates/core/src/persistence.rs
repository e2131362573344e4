//! Barcodes of single volumes.

use crate::complex::GridComplex;
use crate::cube::Cube;
use crate::engine::{self, Label, RawPair, Riders};
use crate::options::{DimSet, Options, Timings};
use crate::volume::{FiltrationMode, VoxelGrid};

/// A grid cell as reported to users.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub dim: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub kind: u8,
}

impl Cell {
    pub fn of(dim: usize, cube: &Cube) -> Self {
        Cell {
            dim,
            x: cube.x(),
            y: cube.y(),
            z: cube.z(),
            kind: cube.kind(),
        }
    }
}

/// A creator/destroyer pair of cells; births are internal (sublevel) values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: Cube,
    pub death: Cube,
}

impl PersistencePair {
    pub(crate) fn from_raw(dim: usize, (birth, death): RawPair) -> Self {
        PersistencePair { dim, birth, death }
    }

    /// The pair as an interval on the user's intensity scale.
    pub fn interval(&self, mode: FiltrationMode) -> Interval {
        Interval {
            dim: self.dim,
            birth: mode.report(self.birth.birth),
            death: mode.report(self.death.birth),
            birth_cell: Cell::of(self.dim, &self.birth),
            death_cell: Some(Cell::of(self.dim + 1, &self.death)),
        }
    }
}

/// A bar `[birth, death)` on the user's intensity scale; `death` is infinite
/// for essential bars, which have no death cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    pub birth_cell: Cell,
    pub death_cell: Option<Cell>,
}

impl Interval {
    pub fn is_essential(&self) -> bool {
        self.death_cell.is_none()
    }
}

/// Finite pairs and essential birth cells per homology dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Barcode {
    pub shape: [usize; 3],
    pub mode: FiltrationMode,
    pub dims: DimSet,
    /// Sorted by birth cube.
    pub pairs: [Vec<PersistencePair>; 3],
    /// Sorted; births are internal values.
    pub essential: [Vec<Cube>; 3],
}

impl Barcode {
    pub fn finite(&self, dim: usize) -> &[PersistencePair] {
        &self.pairs[dim]
    }

    /// Finite intervals of `dim` on the user's intensity scale.
    pub fn intervals(&self, dim: usize) -> Vec<Interval> {
        self.pairs[dim].iter().map(|p| p.interval(self.mode)).collect()
    }

    pub fn essential_intervals(&self, dim: usize) -> Vec<Interval> {
        self.essential[dim]
            .iter()
            .map(|c| Interval {
                dim,
                birth: self.mode.report(c.birth),
                death: f64::INFINITY,
                birth_cell: Cell::of(dim, c),
                death_cell: None,
            })
            .collect()
    }

    /// Number of finite and essential bars of `dim`.
    pub fn feature_count(&self, dim: usize) -> usize {
        self.pairs[dim].len() + self.essential[dim].len()
    }

    /// Number of bars of `dim` alive at intensity `t`.
    ///
    /// A sublevel bar `[b, d)` contains `t` when `b <= t < d`; a superlevel
    /// bar contains it when `d < t <= b`.
    pub fn bars_containing(&self, dim: usize, t: f64) -> usize {
        let s = self.mode.internal(t);
        let finite = self.pairs[dim]
            .iter()
            .filter(|p| p.birth.birth <= s && s < p.death.birth)
            .count();
        let essential = self.essential[dim].iter().filter(|c| c.birth <= s).count();
        finite + essential
    }

    /// Betti numbers `(β0, β1, β2)` of the sublevel (or superlevel) set at `t`.
    pub fn betti_at(&self, t: f64) -> [usize; 3] {
        [0, 1, 2].map(|d| self.bars_containing(d, t))
    }
}

/// Computes the barcode of `grid` in the requested dimensions.
pub fn compute_barcode(grid: &VoxelGrid, dims: DimSet, opts: &Options) -> Barcode {
    compute_barcode_timed(grid, dims, opts).0
}

/// As [`compute_barcode`], also returning the time spent per stage.
pub fn compute_barcode_timed(grid: &VoxelGrid, dims: DimSet, opts: &Options) -> (Barcode, Timings) {
    let values = grid.sublevel_values();
    let run = engine::run_chain(&values, grid.shape(), dims, opts, Riders::default());
    let barcode = barcode_from_chain(grid.shape(), grid.mode(), dims, run.pairs, run.essential);
    (barcode, run.timings)
}

pub(crate) fn barcode_from_chain(
    shape: [usize; 3],
    mode: FiltrationMode,
    dims: DimSet,
    pairs: [Vec<RawPair>; 3],
    essential: [Vec<Cube>; 3],
) -> Barcode {
    let mut d = 0;
    let pairs = pairs.map(|list| {
        let dim = d;
        d += 1;
        list.into_iter()
            .map(|raw| PersistencePair::from_raw(dim, raw))
            .collect()
    });
    Barcode {
        shape,
        mode,
        dims,
        pairs,
        essential,
    }
}

/// Non-zero dimension-0 pairs from linking vertices along `columns`, which must be sorted.
pub fn compute_pairs_dim0(complex: &GridComplex<'_>, columns: &[Cube]) -> Vec<PersistencePair> {
    let label = Label {
        values: complex.values(),
        keep_all: false,
    };
    let mut run = engine::union_find_dim0(complex.shape(), columns, &[label]);
    let mut pairs: Vec<_> = run
        .pairs
        .swap_remove(0)
        .into_iter()
        .map(|raw| PersistencePair::from_raw(0, raw))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Non-zero dimension-1 pairs of the sorted 2-cube `columns`, together with
/// the edges left for dimension 0 (all edges that are not pivots).
pub fn compute_pairs_dim1(
    complex: &GridComplex<'_>,
    columns: &[Cube],
    opts: &Options,
) -> (Vec<PersistencePair>, Vec<Cube>) {
    let run = engine::reduce_dim1(complex, columns, opts, false);
    let mut pairs: Vec<_> = run
        .pairs
        .into_iter()
        .map(|raw| PersistencePair::from_raw(1, raw))
        .collect();
    pairs.sort_unstable();
    let rest = complex.sorted_columns(1, |c| !run.pivots.contains(c), opts.partition_sort);
    (pairs, rest)
}

/// Non-zero dimension-2 pairs of a volume with three non-unit axes, together
/// with the 2-cubes left for dimension 1 (those that did not merge dual components).
pub fn compute_pairs_dim2(complex: &GridComplex<'_>, opts: &Options) -> (Vec<PersistencePair>, Vec<Cube>) {
    assert_eq!(complex.top_dim(), 3, "dimension 2 needs three non-unit axes");
    let label = Label {
        values: complex.values(),
        keep_all: false,
    };
    let mut t = Timings::default();
    let mut run = engine::dual_union_find(complex, &[label], opts, &mut t);
    let mut pairs: Vec<_> = run
        .pairs
        .swap_remove(0)
        .into_iter()
        .map(|raw| PersistencePair::from_raw(2, raw))
        .collect();
    pairs.sort_unstable();
    let rest = complex.sorted_columns(2, |c| !run.merged.contains(c), opts.partition_sort);
    (pairs, rest)
}
