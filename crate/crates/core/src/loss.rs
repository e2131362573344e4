//! The Betti matching loss, its gradient targets and a feature-count metric.
//!
//! All values are on the user's intensity scale. A matched pair of intervals
//! `q` (in I) and `p` (in J) costs `2 * |q - p|^2`; an unmatched interval
//! `[b, d)` costs `(b - d)^2`. Essential intervals cost nothing.

use crate::complex::GridComplex;
use crate::cube::Cube;
use crate::error::Result;
use crate::matching::{compute_betti_matching, BettiMatchingResult};
use crate::options::{DimSet, Options};
use crate::persistence::{Barcode, PersistencePair};
use crate::volume::{FiltrationMode, VoxelGrid};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DimLoss {
    pub dim: usize,
    pub matched: f64,
    pub unmatched_i: f64,
    pub unmatched_j: f64,
}

impl DimLoss {
    pub fn total(&self) -> f64 {
        self.matched + self.unmatched_i + self.unmatched_j
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LossBreakdown {
    pub total: f64,
    pub matched_term: f64,
    pub unmatched_i_term: f64,
    pub unmatched_j_term: f64,
    pub per_dim: Vec<DimLoss>,
}

fn endpoints(p: &PersistencePair, mode: FiltrationMode) -> (f64, f64) {
    (mode.report(p.birth.birth), mode.report(p.death.birth))
}

fn squared(b: f64, d: f64) -> f64 {
    (b - d) * (b - d)
}

/// Loss of an already computed matching.
pub fn loss_of(result: &BettiMatchingResult) -> LossBreakdown {
    let mode = result.mode;
    let mut out = LossBreakdown::default();
    for d in &result.per_dim {
        let mut dl = DimLoss {
            dim: d.dim,
            ..Default::default()
        };
        for m in &d.matched {
            let (qb, qd) = endpoints(&m.pair_i, mode);
            let (pb, pd) = endpoints(&m.pair_j, mode);
            dl.matched += 2.0 * (squared(qb, pb) + squared(qd, pd));
        }
        for p in &d.unmatched_i {
            let (b, e) = endpoints(p, mode);
            dl.unmatched_i += squared(b, e);
        }
        for p in &d.unmatched_j {
            let (b, e) = endpoints(p, mode);
            dl.unmatched_j += squared(b, e);
        }
        out.matched_term += dl.matched;
        out.unmatched_i_term += dl.unmatched_i;
        out.unmatched_j_term += dl.unmatched_j;
        out.per_dim.push(dl);
    }
    out.total = out.matched_term + out.unmatched_i_term + out.unmatched_j_term;
    out
}

/// Betti matching loss between `i` and `j` (extended matching).
pub fn betti_matching_loss(i: &VoxelGrid, j: &VoxelGrid, dims: DimSet, opts: &Options) -> Result<LossBreakdown> {
    Ok(loss_of(&compute_betti_matching(i, j, dims, true, opts)?))
}

/// Loss of binarized volumes from unmatched-feature counts, each unmatched bar costing one.
/// Works on averages as well as on counts.
pub fn binarized_loss_from_counts(unmatched_i: f64, unmatched_j: f64) -> f64 {
    let bar = squared(1.0, 0.0);
    bar * unmatched_i + bar * unmatched_j
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Volume {
    I,
    J,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Birth,
    Death,
}

/// A voxel whose value defines one endpoint of a bar, with the value the loss pulls it to.
///
/// The loss changes at rate `2 * weight * (current - target)` per unit change
/// of the voxel, summed over all entries sharing the voxel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalVoxel {
    pub volume: Volume,
    pub dim: usize,
    pub voxel: [usize; 3],
    pub role: Role,
    pub current: f64,
    pub target: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CriticalVoxelReport {
    pub entries: Vec<CriticalVoxel>,
}

/// Column-oriented form of a [`CriticalVoxelReport`], one row per entry.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CriticalVoxelColumns {
    /// 0 for I, 1 for J.
    pub volume: Vec<u8>,
    pub dim: Vec<u8>,
    /// 0 for birth, 1 for death.
    pub role: Vec<u8>,
    /// Row-major `len x 3`.
    pub coords: Vec<i64>,
    pub current: Vec<f64>,
    pub target: Vec<f64>,
    pub weight: Vec<f64>,
}

impl CriticalVoxelReport {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_columns(&self) -> CriticalVoxelColumns {
        let mut c = CriticalVoxelColumns::default();
        for e in &self.entries {
            c.volume.push(e.volume as u8);
            c.dim.push(e.dim as u8);
            c.role.push(e.role as u8);
            c.coords.extend(e.voxel.iter().map(|&v| v as i64));
            c.current.push(e.current);
            c.target.push(e.target);
            c.weight.push(e.weight);
        }
        c
    }

    /// Accumulated slope `sum 2 * weight * (current - target)` per voxel of one volume.
    pub fn slope_at(&self, volume: Volume, voxel: [usize; 3]) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.volume == volume && e.voxel == voxel)
            .map(|e| 2.0 * e.weight * (e.current - e.target))
            .sum()
    }
}

const WEIGHT: f64 = 2.0;

/// Gradient targets of an already computed matching between `i` and `j`.
pub fn critical_voxels_of(result: &BettiMatchingResult, i: &VoxelGrid, j: &VoxelGrid) -> CriticalVoxelReport {
    let mode = result.mode;
    let (iv, jv) = (i.sublevel_values(), j.sublevel_values());
    let ci = GridComplex::new(&iv, i.shape());
    let cj = GridComplex::new(&jv, j.shape());
    let mut entries = Vec::new();
    let mut push = |volume: Volume, c: &GridComplex<'_>, p: &PersistencePair, targets: (f64, f64)| {
        let (b, d) = endpoints(p, mode);
        for (role, cube, dim, current, target) in [
            (Role::Birth, &p.birth, p.dim, b, targets.0),
            (Role::Death, &p.death, p.dim + 1, d, targets.1),
        ] {
            entries.push(CriticalVoxel {
                volume,
                dim: p.dim,
                voxel: critical_voxel(c, dim, cube),
                role,
                current,
                target,
                weight: WEIGHT,
            });
        }
    };
    for d in &result.per_dim {
        for m in &d.matched {
            push(Volume::I, &ci, &m.pair_i, endpoints(&m.pair_j, mode));
        }
        for m in &d.matched {
            push(Volume::J, &cj, &m.pair_j, endpoints(&m.pair_i, mode));
        }
        for p in &d.unmatched_i {
            let (b, e) = endpoints(p, mode);
            let mid = (b + e) / 2.0;
            push(Volume::I, &ci, p, (mid, mid));
        }
        for p in &d.unmatched_j {
            let (b, e) = endpoints(p, mode);
            let mid = (b + e) / 2.0;
            push(Volume::J, &cj, p, (mid, mid));
        }
    }
    CriticalVoxelReport { entries }
}

fn critical_voxel(c: &GridComplex<'_>, dim: usize, cube: &Cube) -> [usize; 3] {
    c.critical_vertex(dim, cube)
}

/// Critical voxels and their targets for the extended matching of `i` and `j`.
pub fn critical_voxels(i: &VoxelGrid, j: &VoxelGrid, dims: DimSet, opts: &Options) -> Result<CriticalVoxelReport> {
    let result = compute_betti_matching(i, j, dims, true, opts)?;
    Ok(critical_voxels_of(&result, i, j))
}

/// Per-dimension difference in the number of bars.
///
/// On binarized volumes `difference` is the doubled TopoNet loss, which is on
/// the same scale as the Betti matching loss and never exceeds it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureCountGap {
    pub dim: usize,
    pub count_i: usize,
    pub count_j: usize,
    pub difference: usize,
}

impl FeatureCountGap {
    /// The TopoNet loss without its factor of two.
    pub fn halved(&self) -> f64 {
        self.difference as f64 / 2.0
    }
}

/// `|#features(I) - #features(J)|` per dimension, finite and essential bars alike.
pub fn feature_count_metric(a: &Barcode, b: &Barcode) -> Vec<FeatureCountGap> {
    a.dims
        .iter()
        .filter(|&d| b.dims.contains(d))
        .map(|dim| {
            let (count_i, count_j) = (a.feature_count(dim), b.feature_count(dim));
            FeatureCountGap {
                dim,
                count_i,
                count_j,
                difference: count_i.abs_diff(count_j),
            }
        })
        .collect()
}

/// The feature-count gap for (possibly averaged) counts.
pub fn feature_count_gap(count_i: f64, count_j: f64) -> f64 {
    (count_i - count_j).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_volumes_cost_nothing() {
        let g = VoxelGrid::from_fn(&[4, 4, 4], |x, y, z| ((x * 7 + y * 13 + z * 29) % 61) as f64 / 61.0).unwrap();
        let l = betti_matching_loss(&g, &g, DimSet::ALL, &Options::default()).unwrap();
        assert_eq!(l.total, 0.0);
        let r = critical_voxels(&g, &g, DimSet::ALL, &Options::default()).unwrap();
        assert!(r.entries.iter().all(|e| e.current == e.target));
    }

    #[test]
    fn unmatched_bar_targets_midpoint() {
        // superlevel I: a bright voxel of 0.8 separated from the main component by 0.3
        let i = VoxelGrid::new(vec![0.9, 0.3, 0.8], &[3])
            .unwrap()
            .with_mode(FiltrationMode::Superlevel);
        let j = VoxelGrid::new(vec![0.9, 0.2, 0.1], &[3])
            .unwrap()
            .with_mode(FiltrationMode::Superlevel);
        let r = compute_betti_matching(&i, &j, DimSet::ALL, true, &Options::default()).unwrap();
        let d0 = r.dim(0).unwrap();
        assert_eq!(d0.unmatched_i.len(), 1);
        let bar = d0.unmatched_i[0].interval(FiltrationMode::Superlevel);
        assert_eq!((bar.birth, bar.death), (0.8, 0.3));
        let report = critical_voxels_of(&r, &i, &j);
        assert_eq!(report.len(), 2);
        for e in &report.entries {
            assert!((e.target - 0.55).abs() < 1e-12);
        }
        assert_eq!(report.entries[0].voxel, [2, 0, 0]);
        assert_eq!(report.entries[1].voxel, [1, 0, 0]);
        let l = loss_of(&r);
        assert!((l.total - 0.25).abs() < 1e-12);
        let cols = report.to_columns();
        assert_eq!(cols.coords, vec![2, 0, 0, 1, 0, 0]);
        assert_eq!(cols.role, vec![0, 1]);
    }

    #[test]
    fn counting_formulas() {
        assert_eq!(binarized_loss_from_counts(172.0, 214.75), 386.75);
        assert_eq!(feature_count_gap(172.0, 214.75), 42.75);
    }
}
