//! Brute-force reference: dense F2 reduction of the full boundary matrix.
//!
//! Cells of all dimensions are listed with generic loops, valued by scanning
//! their vertices, and reduced left to right with whole-column additions. No
//! clearing, no union-find, no facet tables.

use std::collections::{HashMap, HashSet};

use crate::cube::{kind_of_mask, pack, Cube};
use crate::error::{Error, Result};
use crate::image::{check_dominance, ImagePair};
use crate::matching::{comparison_volume, BettiMatchingResult, DimMatching, MatchedPair};
use crate::options::DimSet;
use crate::persistence::{Barcode, PersistencePair};
use crate::volume::VoxelGrid;

/// Largest complex the oracle accepts.
pub const ORACLE_CELL_LIMIT: usize = 50_000;

/// Square F2 matrix stored as one bit column per cell.
#[derive(Clone, Debug)]
pub struct DenseBoundaryMatrix {
    n: usize,
    columns: Vec<Vec<u64>>,
}

impl DenseBoundaryMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n > ORACLE_CELL_LIMIT {
            return Err(Error::SizeGuard {
                cells: n,
                limit: ORACLE_CELL_LIMIT,
            });
        }
        Ok(DenseBoundaryMatrix {
            n,
            columns: vec![vec![0; n.div_ceil(64)]; n],
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, row: usize, col: usize) {
        self.columns[col][row / 64] ^= 1 << (row % 64);
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.columns[col][row / 64] >> (row % 64) & 1 == 1
    }

    fn low(column: &[u64]) -> Option<usize> {
        column
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    /// Standard left-to-right reduction; returns the pivot row of every column.
    pub fn reduce(&self) -> Vec<Option<usize>> {
        let mut r = self.columns.clone();
        let mut owner: Vec<Option<usize>> = vec![None; self.n];
        let mut pivots = vec![None; self.n];
        for j in 0..self.n {
            while let Some(low) = Self::low(&r[j]) {
                let Some(k) = owner[low] else {
                    owner[low] = Some(j);
                    pivots[j] = Some(low);
                    break;
                };
                let (left, right) = r.split_at_mut(j);
                for (a, b) in right[0].iter_mut().zip(&left[k]) {
                    *a ^= *b;
                }
            }
        }
        pivots
    }
}

#[derive(Clone, Copy, Debug)]
struct OracleCell {
    dim: usize,
    mask: u8,
    p: [usize; 3],
}

impl OracleCell {
    fn index(&self) -> u64 {
        pack(self.p[0], self.p[1], self.p[2], kind_of_mask(self.mask).1)
    }

    fn value(&self, values: &[f64], shape: [usize; 3]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for corner in 0..8u8 {
            if corner & !self.mask != 0 {
                continue;
            }
            let q: Vec<usize> = (0..3).map(|a| self.p[a] + ((corner >> a) & 1) as usize).collect();
            best = best.max(values[(q[0] * shape[1] + q[1]) * shape[2] + q[2]]);
        }
        best
    }

    fn facets(&self) -> Vec<(usize, u8, [usize; 3])> {
        let mut out = Vec::new();
        for a in 0..3 {
            if self.mask & (1 << a) == 0 {
                continue;
            }
            for shift in 0..2 {
                let mut q = self.p;
                q[a] += shift;
                out.push((self.dim - 1, self.mask & !(1 << a), q));
            }
        }
        out
    }
}

fn all_cells(shape: [usize; 3]) -> Vec<OracleCell> {
    let mut cells = Vec::new();
    for mask in 0..8u8 {
        let dim = mask.count_ones() as usize;
        let extent: Vec<usize> = (0..3)
            .map(|a| if mask & (1 << a) != 0 { shape[a].saturating_sub(1) } else { shape[a] })
            .collect();
        for x in 0..extent[0] {
            for y in 0..extent[1] {
                for z in 0..extent[2] {
                    cells.push(OracleCell { dim, mask, p: [x, y, z] });
                }
            }
        }
    }
    cells
}

/// Cells sorted by the refined order of one filtration: value, then dimension, then index.
struct Ordering {
    cells: Vec<(f64, OracleCell)>,
    position: HashMap<(usize, u8, [usize; 3]), usize>,
}

impl Ordering {
    fn new(cells: &[OracleCell], values: &[f64], shape: [usize; 3]) -> Self {
        let mut sorted: Vec<(f64, OracleCell)> = cells.iter().map(|c| (c.value(values, shape), *c)).collect();
        sorted.sort_by(|(va, a), (vb, b)| {
            va.total_cmp(vb)
                .then(a.dim.cmp(&b.dim))
                .then(a.index().cmp(&b.index()))
        });
        let position = sorted
            .iter()
            .enumerate()
            .map(|(i, (_, c))| ((c.dim, c.mask, c.p), i))
            .collect();
        Ordering {
            cells: sorted,
            position,
        }
    }

    fn cube(&self, i: usize) -> (usize, Cube) {
        let (v, c) = self.cells[i];
        (
            c.dim,
            Cube {
                birth: v,
                index: c.index(),
            },
        )
    }
}

/// Boundary matrix with columns ordered by `cols` and rows by `rows`.
fn boundary_matrix(rows: &Ordering, cols: &Ordering) -> Result<DenseBoundaryMatrix> {
    let mut m = DenseBoundaryMatrix::zeros(cols.cells.len())?;
    for (j, (_, cell)) in cols.cells.iter().enumerate() {
        if cell.dim == 0 {
            continue;
        }
        for f in cell.facets() {
            m.set(rows.position[&f], j);
        }
    }
    Ok(m)
}

/// All pivot pairs `(dim, birth, death)` of the reduction, zero-length ones included,
/// and the cells that are neither pivot rows nor non-zero columns.
/// `(dim, birth, death)` of every pivot, and `(dim, cube)` of every unpaired cell.
type Pairing = (Vec<(usize, Cube, Cube)>, Vec<(usize, Cube)>);

fn pivot_pairs(rows: &Ordering, cols: &Ordering) -> Result<Pairing> {
    let pivots = boundary_matrix(rows, cols)?.reduce();
    let mut pairs = Vec::new();
    let mut paired_rows = HashSet::new();
    let mut nonzero_cols = HashSet::new();
    for (j, p) in pivots.iter().enumerate() {
        if let Some(i) = *p {
            let (dim, birth) = rows.cube(i);
            let (_, death) = cols.cube(j);
            pairs.push((dim, birth, death));
            paired_rows.insert(i);
            nonzero_cols.insert(j);
        }
    }
    let mut unpaired = Vec::new();
    for j in 0..cols.cells.len() {
        let (dim, cube) = cols.cube(j);
        let i = rows.position[&(dim, cols.cells[j].1.mask, cols.cells[j].1.p)];
        if !nonzero_cols.contains(&j) && !paired_rows.contains(&i) {
            unpaired.push((dim, cube));
        }
    }
    Ok((pairs, unpaired))
}

/// Barcode of `grid` by dense reduction, all dimensions.
/// Number of cells the dense reduction of a grid of this shape has to hold.
pub fn cell_count(shape: [usize; 3]) -> usize {
    shape.iter().map(|&n| 2 * n - 1).product()
}

pub fn oracle_barcode(grid: &VoxelGrid) -> Result<Barcode> {
    let shape = grid.shape();
    let cells = all_cells(shape);
    if cells.len() > ORACLE_CELL_LIMIT {
        return Err(Error::SizeGuard {
            cells: cells.len(),
            limit: ORACLE_CELL_LIMIT,
        });
    }
    let values = grid.sublevel_values();
    let order = Ordering::new(&cells, &values, shape);
    let (pairs, unpaired) = pivot_pairs(&order, &order)?;
    let mut barcode = Barcode {
        shape,
        mode: grid.mode(),
        dims: DimSet::ALL,
        pairs: Default::default(),
        essential: Default::default(),
    };
    for (dim, birth, death) in pairs {
        if birth.birth < death.birth {
            barcode.pairs[dim].push(PersistencePair { dim, birth, death });
        }
    }
    for (dim, cube) in unpaired {
        barcode.essential[dim].push(cube);
    }
    for d in 0..3 {
        barcode.pairs[d].sort();
        barcode.essential[d].sort();
    }
    Ok(barcode)
}

/// Image pairs of all dimensions for `input -> comparison` by dense reduction
/// of the boundary matrix with comparison-ordered columns and input-ordered rows.
pub fn oracle_image_pairs(input: &VoxelGrid, comparison: &VoxelGrid, extended: bool) -> Result<Vec<ImagePair>> {
    check_dominance(input, comparison)?;
    let shape = input.shape();
    let cells = all_cells(shape);
    if cells.len() > ORACLE_CELL_LIMIT {
        return Err(Error::SizeGuard {
            cells: cells.len(),
            limit: ORACLE_CELL_LIMIT,
        });
    }
    let rows = Ordering::new(&cells, &input.sublevel_values(), shape);
    let cols = Ordering::new(&cells, &comparison.sublevel_values(), shape);
    let (pairs, _) = pivot_pairs(&rows, &cols)?;
    let mut out: Vec<ImagePair> = pairs
        .into_iter()
        .map(|(dim, birth, death)| ImagePair {
            dim,
            birth,
            death,
            is_reverse: birth.birth >= death.birth,
        })
        .filter(|p| extended || !p.is_reverse)
        .collect();
    out.sort();
    Ok(out)
}

/// Betti matching assembled from oracle barcodes and oracle image pairs.
pub fn oracle_betti_matching(i: &VoxelGrid, j: &VoxelGrid, extended: bool) -> Result<BettiMatchingResult> {
    let c = comparison_volume(i, j)?;
    let (bi, bj, bc) = (oracle_barcode(i)?, oracle_barcode(j)?, oracle_barcode(&c)?);
    let split = |pairs: Vec<ImagePair>| {
        let mut out: [Vec<ImagePair>; 3] = Default::default();
        for p in pairs {
            if p.dim < 3 {
                out[p.dim].push(p);
            }
        }
        out
    };
    let image_i = split(oracle_image_pairs(i, &c, extended)?);
    let image_j = split(oracle_image_pairs(j, &c, extended)?);

    let mut per_dim = Vec::new();
    for dim in 0..3 {
        let mut matched = Vec::new();
        for cp in &bc.pairs[dim] {
            let via_i = image_i[dim].iter().find(|p| p.death.index == cp.death.index);
            let via_j = image_j[dim].iter().find(|p| p.death.index == cp.death.index);
            if let (Some(ii), Some(ij)) = (via_i, via_j) {
                let pi = bi.pairs[dim].iter().find(|p| p.birth.index == ii.birth.index);
                let pj = bj.pairs[dim].iter().find(|p| p.birth.index == ij.birth.index);
                if let (Some(pi), Some(pj)) = (pi, pj) {
                    matched.push(MatchedPair {
                        pair_i: *pi,
                        pair_j: *pj,
                        comparison: *cp,
                        image_i: *ii,
                        image_j: *ij,
                    });
                }
            }
        }
        matched.sort_by_key(|m| m.pair_i);
        let unmatched_i = bi.pairs[dim]
            .iter()
            .filter(|p| !matched.iter().any(|m| m.pair_i == **p))
            .copied()
            .collect();
        let unmatched_j = bj.pairs[dim]
            .iter()
            .filter(|p| !matched.iter().any(|m| m.pair_j == **p))
            .copied()
            .collect();
        per_dim.push(DimMatching {
            dim,
            matched,
            unmatched_i,
            unmatched_j,
            essential_i: bi.essential[dim].clone(),
            essential_j: bj.essential[dim].clone(),
        });
    }
    Ok(BettiMatchingResult {
        shape: i.shape(),
        mode: i.mode(),
        dims: DimSet::ALL,
        extended,
        per_dim,
        barcode_i: bi,
        barcode_j: bj,
        barcode_c: bc,
        image_i,
        image_j,
    })
}
