//! Image persistence of the inclusion of an input volume into a comparison volume.
//!
//! Columns follow the comparison filtration and rows the input filtration.
//! Pairs whose input birth is not below their comparison death are reverse
//! pairs; they are kept only in extended mode.

use crate::complex::GridComplex;
use crate::cube::Cube;
use crate::engine::{self, Label, RawPair};
use crate::error::{Error, Result};
use crate::options::{Options, Timings};
use crate::volume::VoxelGrid;

/// A pair of an input cell (birth valued in the input) and a comparison cell
/// (birth valued in the comparison volume).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ImagePair {
    pub dim: usize,
    pub birth: Cube,
    pub death: Cube,
    pub is_reverse: bool,
}

impl ImagePair {
    pub(crate) fn from_raw(dim: usize, (birth, death): RawPair) -> Self {
        ImagePair {
            dim,
            birth,
            death,
            is_reverse: birth.birth >= death.birth,
        }
    }
}

/// Checks that both volumes share shape and mode and that `input` lies above
/// `comparison` everywhere in sublevel orientation.
pub fn check_dominance(input: &VoxelGrid, comparison: &VoxelGrid) -> Result<()> {
    if input.shape() != comparison.shape() {
        return Err(Error::ShapeMismatch {
            left: input.shape(),
            right: comparison.shape(),
        });
    }
    if input.mode() != comparison.mode() {
        return Err(Error::FiltrationModeMismatch);
    }
    let (a, b) = (input.sublevel_values(), comparison.sublevel_values());
    if let Some(offset) = a.iter().zip(b.iter()).position(|(x, y)| x < y) {
        let [_, n2, n3] = input.shape();
        return Err(Error::DominanceViolation {
            voxel: [offset / (n2 * n3), offset / n3 % n2, offset % n3],
        });
    }
    Ok(())
}

/// Image pairs of dimension `dim` for the inclusion `input -> comparison`.
pub fn compute_image_pairs(
    input: &VoxelGrid,
    comparison: &VoxelGrid,
    dim: usize,
    extended: bool,
    opts: &Options,
) -> Result<Vec<ImagePair>> {
    check_dominance(input, comparison)?;
    let shape = input.shape();
    let (iv, cv) = (input.sublevel_values(), comparison.sublevel_values());
    let c = GridComplex::new(&cv, shape);
    let top_dim = c.top_dim();
    let raw = if dim + 1 > top_dim {
        Vec::new()
    } else if dim + 1 == top_dim && top_dim >= 2 {
        image_top(&iv, &cv, shape, extended, opts, &mut Timings::default())
    } else if dim == 1 {
        let columns = c.sorted_columns(2, |_| true, opts.partition_sort);
        image_dim1(&iv, shape, &columns, extended, opts)
    } else {
        let edges = c.sorted_columns(1, |_| true, opts.partition_sort);
        image_dim0(&iv, shape, &edges, extended)
    };
    Ok(finish(dim, raw))
}

pub(crate) fn finish(dim: usize, raw: Vec<RawPair>) -> Vec<ImagePair> {
    let mut pairs: Vec<_> = raw.into_iter().map(|r| ImagePair::from_raw(dim, r)).collect();
    pairs.sort_unstable();
    pairs
}

/// Reduction of comparison 2-cube `columns` with facets valued in the input.
pub(crate) fn image_dim1(
    input: &[f64],
    shape: [usize; 3],
    columns: &[Cube],
    extended: bool,
    opts: &Options,
) -> Vec<RawPair> {
    let rows = GridComplex::new(input, shape);
    engine::reduce_dim1(&rows, columns, opts, extended).pairs
}

/// Union-find on the input's vertices along comparison-ordered `edges`.
pub(crate) fn image_dim0(input: &[f64], shape: [usize; 3], edges: &[Cube], extended: bool) -> Vec<RawPair> {
    let label = Label {
        values: input,
        keep_all: extended,
    };
    engine::union_find_dim0(shape, edges, &[label]).pairs.swap_remove(0)
}

/// Union-find on the comparison's dual vertices, dual edges in reverse input order.
pub(crate) fn image_top(
    input: &[f64],
    comparison: &[f64],
    shape: [usize; 3],
    extended: bool,
    opts: &Options,
    timings: &mut Timings,
) -> Vec<RawPair> {
    let order = GridComplex::new(input, shape);
    let label = Label {
        values: comparison,
        keep_all: extended,
    };
    engine::dual_union_find(&order, &[label], opts, timings)
        .pairs
        .swap_remove(0)
}
