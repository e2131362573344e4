mod common;

use betti_core::loss::{critical_voxels_of, loss_of, Role, Volume};
use betti_core::*;

fn perturbed_loss(i: &VoxelGrid, j: &VoxelGrid, volume: Volume, voxel: [usize; 3], delta: f64) -> f64 {
    let (mut a, mut b) = (i.clone(), j.clone());
    let g = if volume == Volume::I { &mut a } else { &mut b };
    let [x, y, z] = voxel;
    g.set(x, y, z, g.get(x, y, z) + delta);
    betti_matching_loss(&a, &b, DimSet::ALL, &Options::default()).unwrap().total
}

#[test]
fn slopes_match_finite_differences_in_superlevel_mode() {
    let mut checked = 0;
    for seed in 0..20 {
        let (i, j) = common::distinct_pair([3, 4, 3], seed);
        let (i, j) = (i.with_mode(FiltrationMode::Superlevel), j.with_mode(FiltrationMode::Superlevel));
        let r = compute_betti_matching(&i, &j, DimSet::ALL, true, &Options::default()).unwrap();
        let report = critical_voxels_of(&r, &i, &j);
        for e in report.entries.iter().take(4) {
            let eps = 1e-7;
            let fd = (perturbed_loss(&i, &j, e.volume, e.voxel, eps) - perturbed_loss(&i, &j, e.volume, e.voxel, -eps)) / (2.0 * eps);
            let slope = report.slope_at(e.volume, e.voxel);
            assert!((fd - slope).abs() <= 1e-4 * fd.abs().max(slope.abs()).max(1e-9), "seed {seed}: {fd} vs {slope}");
            checked += 1;
        }
    }
    assert!(checked > 20);
}

#[test]
fn entries_carry_current_values_of_their_voxels() {
    let (i, j) = common::distinct_pair([4, 4, 4], 5);
    let r = compute_betti_matching(&i, &j, DimSet::ALL, true, &Options::default()).unwrap();
    let report = critical_voxels_of(&r, &i, &j);
    assert_eq!(report.len(), 2 * (2 * r.matched_count() + r.per_dim.iter().map(|d| d.unmatched_i.len() + d.unmatched_j.len()).sum::<usize>()));
    for e in &report.entries {
        let g = if e.volume == Volume::I { &i } else { &j };
        let [x, y, z] = e.voxel;
        assert_eq!(g.get(x, y, z), e.current);
        assert_eq!(e.weight, 2.0);
    }
    let births = report.entries.iter().filter(|e| e.role == Role::Birth).count();
    assert_eq!(2 * births, report.len());
    let cols = report.to_columns();
    assert_eq!(cols.coords.len(), 3 * report.len());
    assert_eq!(cols.target.len(), report.len());
    assert!(cols.volume.iter().all(|&v| v <= 1) && cols.role.iter().all(|&v| v <= 1));
}

#[test]
fn loss_decomposes_per_dimension() {
    let i = common::continuous([6, 6, 6], 1);
    let j = common::continuous([6, 6, 6], 2);
    let r = compute_betti_matching(&i, &j, DimSet::ALL, true, &Options::default()).unwrap();
    let l = loss_of(&r);
    let sum: f64 = l.per_dim.iter().map(|d| d.total()).sum();
    assert!((l.total - sum).abs() < 1e-12);
    assert!((l.total - (l.matched_term + l.unmatched_i_term + l.unmatched_j_term)).abs() < 1e-12);
    let only1 = compute_betti_matching(&i, &j, DimSet::only(1), true, &Options::default()).unwrap();
    assert_eq!(loss_of(&only1).total, l.per_dim[1].total());
}

#[test]
fn moving_toward_targets_lowers_the_loss() {
    let (i, j) = common::distinct_pair([4, 4, 4], 8);
    let r = compute_betti_matching(&i, &j, DimSet::ALL, true, &Options::default()).unwrap();
    let report = critical_voxels_of(&r, &i, &j);
    let base = loss_of(&r).total;
    let step = 1e-5;
    let (mut a, mut b) = (i.clone(), j.clone());
    for v in [Volume::I, Volume::J] {
        let g = if v == Volume::I { &mut a } else { &mut b };
        let mut seen = std::collections::BTreeSet::new();
        for e in report.entries.iter().filter(|e| e.volume == v) {
            if seen.insert(e.voxel) {
                let [x, y, z] = e.voxel;
                g.set(x, y, z, g.get(x, y, z) - step * report.slope_at(v, e.voxel));
            }
        }
    }
    let after = betti_matching_loss(&a, &b, DimSet::ALL, &Options::default()).unwrap().total;
    assert!(after < base, "{after} !< {base}");
}
