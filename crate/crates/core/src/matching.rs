//! The (extended) Betti matching between two volumes.
//!
//! Five computations feed it: the barcodes of both inputs and of their
//! comparison volume, and the image pairs of both inclusions into the
//! comparison volume. A comparison pair matches the input pairs that share
//! birth cells with the image pairs dying at its death cell.

use std::collections::HashMap;
use std::time::Instant;

use crate::complex::GridComplex;
use crate::cube::Cube;
use crate::engine::{self, Label, RawPair, Riders};
use crate::error::{Error, Result};
use crate::image::{self, ImagePair};
use crate::options::{join, DimSet, Options, Timings};
use crate::persistence::{barcode_from_chain, Barcode, PersistencePair};
use crate::volume::{canonical, FiltrationMode, VoxelGrid};

/// Pointwise minimum of two volumes in sublevel orientation.
pub fn comparison_volume(i: &VoxelGrid, j: &VoxelGrid) -> Result<VoxelGrid> {
    if i.shape() != j.shape() {
        return Err(Error::ShapeMismatch {
            left: i.shape(),
            right: j.shape(),
        });
    }
    if i.mode() != j.mode() {
        return Err(Error::FiltrationModeMismatch);
    }
    let pick = match i.mode() {
        FiltrationMode::Sublevel => f64::min,
        FiltrationMode::Superlevel => f64::max,
    };
    let values = i
        .values()
        .iter()
        .zip(j.values())
        .map(|(&a, &b)| canonical(pick(a, b)))
        .collect();
    Ok(VoxelGrid::new(values, &i.shape())?.with_mode(i.mode()))
}

/// A pair of input intervals matched through the comparison volume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatchedPair {
    pub pair_i: PersistencePair,
    pub pair_j: PersistencePair,
    pub comparison: PersistencePair,
    pub image_i: ImagePair,
    pub image_j: ImagePair,
}

/// Matched and unmatched intervals of one homology dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DimMatching {
    pub dim: usize,
    /// Sorted by the birth cube of `pair_i`.
    pub matched: Vec<MatchedPair>,
    pub unmatched_i: Vec<PersistencePair>,
    pub unmatched_j: Vec<PersistencePair>,
    /// Essential classes take no part in the matching.
    pub essential_i: Vec<Cube>,
    pub essential_j: Vec<Cube>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BettiMatchingResult {
    pub shape: [usize; 3],
    pub mode: FiltrationMode,
    pub dims: DimSet,
    pub extended: bool,
    /// One entry per requested dimension, ascending.
    pub per_dim: Vec<DimMatching>,
    pub barcode_i: Barcode,
    pub barcode_j: Barcode,
    pub barcode_c: Barcode,
    pub image_i: [Vec<ImagePair>; 3],
    pub image_j: [Vec<ImagePair>; 3],
}

impl BettiMatchingResult {
    pub fn dim(&self, dim: usize) -> Option<&DimMatching> {
        self.per_dim.iter().find(|d| d.dim == dim)
    }

    /// The result with the roles of the two inputs exchanged.
    pub fn transpose(&self) -> BettiMatchingResult {
        let per_dim = self
            .per_dim
            .iter()
            .map(|d| {
                let mut matched: Vec<MatchedPair> = d
                    .matched
                    .iter()
                    .map(|m| MatchedPair {
                        pair_i: m.pair_j,
                        pair_j: m.pair_i,
                        comparison: m.comparison,
                        image_i: m.image_j,
                        image_j: m.image_i,
                    })
                    .collect();
                matched.sort_unstable_by_key(|m| m.pair_i);
                DimMatching {
                    dim: d.dim,
                    matched,
                    unmatched_i: d.unmatched_j.clone(),
                    unmatched_j: d.unmatched_i.clone(),
                    essential_i: d.essential_j.clone(),
                    essential_j: d.essential_i.clone(),
                }
            })
            .collect();
        BettiMatchingResult {
            shape: self.shape,
            mode: self.mode,
            dims: self.dims,
            extended: self.extended,
            per_dim,
            barcode_i: self.barcode_j.clone(),
            barcode_j: self.barcode_i.clone(),
            barcode_c: self.barcode_c.clone(),
            image_i: self.image_j.clone(),
            image_j: self.image_i.clone(),
        }
    }

    pub fn matched_count(&self) -> usize {
        self.per_dim.iter().map(|d| d.matched.len()).sum()
    }
}

/// Computes the Betti matching between `i` and `j` in the requested dimensions.
///
/// With `extended`, reverse image pairs take part in the matching.
pub fn compute_betti_matching(
    i: &VoxelGrid,
    j: &VoxelGrid,
    dims: DimSet,
    extended: bool,
    opts: &Options,
) -> Result<BettiMatchingResult> {
    compute_betti_matching_timed(i, j, dims, extended, opts).map(|(r, _)| r)
}

struct ImageParts {
    top: Option<Vec<RawPair>>,
    dim1: Option<Vec<RawPair>>,
    dim0: Option<Vec<RawPair>>,
    timings: Timings,
}

/// As [`compute_betti_matching`], also returning the time spent per stage.
pub fn compute_betti_matching_timed(
    i: &VoxelGrid,
    j: &VoxelGrid,
    dims: DimSet,
    extended: bool,
    opts: &Options,
) -> Result<(BettiMatchingResult, Timings)> {
    let c = comparison_volume(i, j)?;
    let shape = i.shape();
    let (iv, jv, cv) = (i.sublevel_values(), j.sublevel_values(), c.sublevel_values());
    let (iv, jv, cv): (&[f64], &[f64], &[f64]) = (&iv, &jv, &cv);
    let top_dim = GridComplex::new(cv, shape).top_dim();
    let upper = dims.max().unwrap_or(0) >= 1;
    let joint = opts.joint_union_find;
    let par = opts.parallel;

    let image_label = |values| Label {
        values,
        keep_all: extended,
    };
    let top_rider_c = [image_label(cv)];
    let input_chain = |xv: &[f64]| {
        let riders = Riders {
            top: if joint { &top_rider_c } else { &[] },
            dim0: &[],
        };
        engine::run_chain(xv, shape, dims, opts, riders)
    };
    let dim0_riders = [image_label(iv), image_label(jv)];
    let image_rest = |xv: &[f64], c_run: &engine::ChainRun| {
        let mut t = Timings::default();
        let start = Instant::now();
        let c_complex = GridComplex::new(cv, shape);
        let top = (!joint && upper && top_dim >= 2)
            .then(|| image::image_top(xv, cv, shape, extended, opts, &mut t));
        let dim1 = (upper && top_dim == 3).then(|| {
            let all;
            let columns: &[Cube] = match (&c_run.dim1_nonzero, opts.image_clearing) {
                (Some(nonzero), true) => nonzero,
                _ => {
                    all = c_complex.sorted_columns(2, |_| true, opts.partition_sort);
                    &all
                }
            };
            image::image_dim1(xv, shape, columns, extended, opts)
        });
        let dim0 = (!joint && top_dim >= 1).then(|| {
            let all;
            let edges: &[Cube] = match (&c_run.dim0_merging, opts.image_clearing) {
                (Some(merging), true) => merging,
                _ => {
                    all = c_complex.sorted_columns(1, |_| true, opts.partition_sort);
                    &all
                }
            };
            image::image_dim0(xv, shape, edges, extended)
        });
        t.add("image", start.elapsed());
        ImageParts {
            top,
            dim1,
            dim0,
            timings: t,
        }
    };

    let ((run_i, run_j), (run_c, (parts_i, parts_j))) = join(
        par,
        || join(par, || input_chain(iv), || input_chain(jv)),
        || {
            let riders = Riders {
                top: &[],
                dim0: if joint { &dim0_riders } else { &[] },
            };
            let run_c = engine::run_chain(cv, shape, dims, opts, riders);
            let parts = join(par, || image_rest(iv, &run_c), || image_rest(jv, &run_c));
            (run_c, parts)
        },
    );

    let start = Instant::now();
    let mut timings = Timings::default();
    for t in [&run_i.timings, &run_j.timings, &run_c.timings, &parts_i.timings, &parts_j.timings] {
        timings.merge(t);
    }

    let images = |parts: ImageParts, run: &engine::ChainRun, side: usize| {
        let mut out: [Vec<ImagePair>; 3] = Default::default();
        let top = if joint {
            run.rider_top.first().cloned()
        } else {
            parts.top
        };
        if let Some(top) = top.filter(|_| top_dim >= 2) {
            out[top_dim - 1] = image::finish(top_dim - 1, top);
        }
        if let Some(d1) = parts.dim1 {
            out[1] = image::finish(1, d1);
        }
        let d0 = if joint {
            run_c.rider_dim0.get(side).cloned()
        } else {
            parts.dim0
        };
        if let Some(d0) = d0 {
            out[0] = image::finish(0, d0);
        }
        for (d, list) in out.iter_mut().enumerate() {
            if !dims.contains(d) {
                list.clear();
            }
        }
        out
    };
    let image_i = images(parts_i, &run_i, 0);
    let image_j = images(parts_j, &run_j, 1);

    let mode = i.mode();
    let barcode_i = barcode_from_chain(shape, mode, dims, run_i.pairs, run_i.essential);
    let barcode_j = barcode_from_chain(shape, mode, dims, run_j.pairs, run_j.essential);
    let barcode_c = barcode_from_chain(shape, mode, dims, run_c.pairs, run_c.essential);
    let per_dim = dims
        .iter()
        .map(|d| assemble(d, &barcode_i, &barcode_j, &barcode_c, &image_i[d], &image_j[d]))
        .collect();
    timings.add("matching", start.elapsed());

    Ok((
        BettiMatchingResult {
            shape,
            mode,
            dims,
            extended,
            per_dim,
            barcode_i,
            barcode_j,
            barcode_c,
            image_i,
            image_j,
        },
        timings,
    ))
}

/// Matches the input pairs of one dimension through the comparison pairs.
pub(crate) fn assemble(
    dim: usize,
    barcode_i: &Barcode,
    barcode_j: &Barcode,
    barcode_c: &Barcode,
    image_i: &[ImagePair],
    image_j: &[ImagePair],
) -> DimMatching {
    let by_death = |pairs: &[ImagePair]| -> HashMap<u64, ImagePair> {
        pairs.iter().map(|p| (p.death.index, *p)).collect()
    };
    let by_birth = |pairs: &[PersistencePair]| -> HashMap<u64, PersistencePair> {
        pairs.iter().map(|p| (p.birth.index, *p)).collect()
    };
    let (img_i, img_j) = (by_death(image_i), by_death(image_j));
    let (inp_i, inp_j) = (by_birth(&barcode_i.pairs[dim]), by_birth(&barcode_j.pairs[dim]));

    let mut matched = Vec::new();
    for cp in &barcode_c.pairs[dim] {
        let (Some(ii), Some(ij)) = (img_i.get(&cp.death.index), img_j.get(&cp.death.index)) else {
            continue;
        };
        let (Some(pi), Some(pj)) = (inp_i.get(&ii.birth.index), inp_j.get(&ij.birth.index)) else {
            continue;
        };
        matched.push(MatchedPair {
            pair_i: *pi,
            pair_j: *pj,
            comparison: *cp,
            image_i: *ii,
            image_j: *ij,
        });
    }
    matched.sort_unstable_by_key(|m| m.pair_i);

    let unmatched = |pairs: &[PersistencePair], used: Vec<u64>| {
        let used: std::collections::HashSet<u64> = used.into_iter().collect();
        pairs
            .iter()
            .filter(|p| !used.contains(&p.birth.index))
            .copied()
            .collect::<Vec<_>>()
    };
    let unmatched_i = unmatched(
        &barcode_i.pairs[dim],
        matched.iter().map(|m| m.pair_i.birth.index).collect(),
    );
    let unmatched_j = unmatched(
        &barcode_j.pairs[dim],
        matched.iter().map(|m| m.pair_j.birth.index).collect(),
    );
    DimMatching {
        dim,
        matched,
        unmatched_i,
        unmatched_j,
        essential_i: barcode_i.essential[dim].clone(),
        essential_j: barcode_j.essential[dim].clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_is_pointwise_minimum() {
        let i = VoxelGrid::new(vec![0.0, 1.0], &[2]).unwrap();
        let j = VoxelGrid::new(vec![1.0, 0.0], &[2]).unwrap();
        assert_eq!(comparison_volume(&i, &j).unwrap().values(), &[0.0, 0.0]);
        assert_eq!(comparison_volume(&i, &i).unwrap(), i);
        assert_eq!(
            comparison_volume(&i, &j).unwrap(),
            comparison_volume(&j, &i).unwrap()
        );
        let si = i.clone().with_mode(FiltrationMode::Superlevel);
        let sj = j.clone().with_mode(FiltrationMode::Superlevel);
        assert_eq!(comparison_volume(&si, &sj).unwrap().values(), &[1.0, 1.0]);
        assert!(matches!(
            comparison_volume(&i, &sj),
            Err(Error::FiltrationModeMismatch)
        ));
    }

    #[test]
    fn identical_inputs_match_completely() {
        let g = VoxelGrid::from_fn(&[5, 5, 5], |x, y, z| ((x * 37 + y * 11 + z * 23) % 97) as f64 + 0.001 * (x + y + z) as f64).unwrap();
        let r = compute_betti_matching(&g, &g, DimSet::ALL, true, &Options::default()).unwrap();
        for d in &r.per_dim {
            assert!(d.unmatched_i.is_empty() && d.unmatched_j.is_empty());
            assert_eq!(d.matched.len(), r.barcode_i.pairs[d.dim].len());
            for m in &d.matched {
                assert_eq!(m.pair_i, m.pair_j);
            }
        }
    }

    #[test]
    fn opposite_corner_voxels_have_nothing_finite() {
        let n = 6;
        let corner = |at: usize| {
            VoxelGrid::from_fn(&[n, n, n], move |x, y, z| {
                if x == at && y == at && z == at { 1.0 } else { 0.0 }
            })
            .unwrap()
            .with_mode(FiltrationMode::Superlevel)
        };
        let r = compute_betti_matching(&corner(0), &corner(n - 1), DimSet::ALL, true, &Options::default())
            .unwrap();
        for d in &r.per_dim {
            assert!(d.matched.is_empty());
            assert!(d.unmatched_i.is_empty() && d.unmatched_j.is_empty());
        }
        let d0 = r.dim(0).unwrap();
        assert_eq!((d0.essential_i.len(), d0.essential_j.len()), (1, 1));
    }

    #[test]
    fn shape_mismatch() {
        let a = VoxelGrid::new(vec![0.0; 4], &[4]).unwrap();
        let b = VoxelGrid::new(vec![0.0; 4], &[2, 2]).unwrap();
        assert!(matches!(
            compute_betti_matching(&a, &b, DimSet::ALL, true, &Options::default()),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
