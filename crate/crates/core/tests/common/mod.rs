#![allow(dead_code)]

use betti_core::{FiltrationMode, VoxelGrid};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform values in [0, 1) rounded to a coarse grid so that ties occur.
pub fn continuous(shape: [usize; 3], seed: u64) -> VoxelGrid {
    let mut r = rng(seed);
    VoxelGrid::from_fn(&shape, |_, _, _| (r.random::<f64>() * 64.0).floor() / 64.0).unwrap()
}

/// A random permutation of 0..n scaled into [0, 1): all values distinct.
pub fn distinct(shape: [usize; 3], seed: u64) -> VoxelGrid {
    let n: usize = shape.iter().product();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng(seed));
    let values = perm.into_iter().map(|v| v as f64 / n as f64).collect();
    VoxelGrid::new(values, &shape).unwrap()
}

pub fn binary(shape: [usize; 3], seed: u64, density: f64) -> VoxelGrid {
    let mut r = rng(seed);
    VoxelGrid::from_fn(&shape, |_, _, _| if r.random::<f64>() < density { 1.0 } else { 0.0 })
        .unwrap()
        .with_mode(FiltrationMode::Superlevel)
}

/// `(I, min(I, J))`-style pair: a volume and a pointwise-lower copy.
pub fn dominated_pair(shape: [usize; 3], seed: u64) -> (VoxelGrid, VoxelGrid) {
    let i = continuous(shape, seed);
    let j = continuous(shape, seed ^ 0x9e37_79b9_7f4a_7c15);
    let c = betti_core::comparison_volume(&i, &j).unwrap();
    (i, c)
}

/// Two volumes whose values are jointly distinct: a permutation of `0..2n` split in halves.
pub fn distinct_pair(shape: [usize; 3], seed: u64) -> (VoxelGrid, VoxelGrid) {
    let n: usize = shape.iter().product();
    let mut perm: Vec<usize> = (0..2 * n).collect();
    perm.shuffle(&mut rng(seed));
    let scaled: Vec<f64> = perm.into_iter().map(|v| v as f64 / (2 * n) as f64).collect();
    (
        VoxelGrid::new(scaled[..n].to_vec(), &shape).unwrap(),
        VoxelGrid::new(scaled[n..].to_vec(), &shape).unwrap(),
    )
}

/// Binary superlevel volume with foreground where `inside` holds at the voxel centre.
pub fn solid(n: usize, inside: impl Fn(f64, f64, f64) -> bool) -> VoxelGrid {
    VoxelGrid::from_fn(&[n, n, n], |x, y, z| if inside(x as f64, y as f64, z as f64) { 1.0 } else { 0.0 })
        .unwrap()
        .with_mode(FiltrationMode::Superlevel)
}

pub fn distance2(centre: [f64; 3], x: f64, y: f64, z: f64) -> f64 {
    (x - centre[0]).powi(2) + (y - centre[1]).powi(2) + (z - centre[2]).powi(2)
}

/// Squared distance from a point to the circle of radius `big` around the z axis through `c`.
pub fn torus_distance2(c: f64, big: f64, x: f64, y: f64, z: f64) -> f64 {
    let rho = ((x - c).powi(2) + (y - c).powi(2)).sqrt();
    (rho - big).powi(2) + (z - c).powi(2)
}

fn foreground(g: &VoxelGrid) -> (Vec<bool>, [usize; 3]) {
    (g.values().iter().map(|&v| v >= 0.5).collect(), g.shape())
}

/// Euler characteristic of the foreground complex from direct cell counts.
pub fn euler_characteristic(g: &VoxelGrid) -> i64 {
    let (fg, [a, b, c]) = foreground(g);
    let at = |x: usize, y: usize, z: usize| fg[(x * b + y) * c + z];
    let mut chi = 0i64;
    for x in 0..a {
        for y in 0..b {
            for z in 0..c {
                // every cell whose lowest corner is (x, y, z), by the set of axes it spans
                for mask in 0u8..8 {
                    let span = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0];
                    if (span[0] && x + 1 >= a) || (span[1] && y + 1 >= b) || (span[2] && z + 1 >= c) {
                        continue;
                    }
                    let mut all = true;
                    for corner in 0u8..8 {
                        if corner & !mask != 0 {
                            continue;
                        }
                        let (dx, dy, dz) = ((corner & 1) as usize, (corner >> 1 & 1) as usize, (corner >> 2 & 1) as usize);
                        all &= at(x + dx, y + dy, z + dz);
                    }
                    if all {
                        chi += if mask.count_ones() % 2 == 0 { 1 } else { -1 };
                    }
                }
            }
        }
    }
    chi
}

fn components(cells: &[bool], shape: [usize; 3], full: bool) -> Vec<Vec<usize>> {
    let [a, b, c] = shape;
    let mut seen = vec![false; cells.len()];
    let mut out = Vec::new();
    let mut offsets = Vec::new();
    for dx in -1i64..=1 {
        for dy in -1i64..=1 {
            for dz in -1i64..=1 {
                let k = dx.abs() + dy.abs() + dz.abs();
                if k == 1 || (full && k > 0) {
                    offsets.push([dx, dy, dz]);
                }
            }
        }
    }
    for start in 0..cells.len() {
        if !cells[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            comp.push(v);
            let p = [(v / (b * c)) as i64, (v / c % b) as i64, (v % c) as i64];
            for o in &offsets {
                let q = [p[0] + o[0], p[1] + o[1], p[2] + o[2]];
                if q[0] < 0 || q[1] < 0 || q[2] < 0 || q[0] >= a as i64 || q[1] >= b as i64 || q[2] >= c as i64 {
                    continue;
                }
                let w = ((q[0] as usize) * b + q[1] as usize) * c + q[2] as usize;
                if cells[w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Face-connected foreground components.
pub fn flood_fill_components(g: &VoxelGrid) -> usize {
    let (fg, shape) = foreground(g);
    components(&fg, shape, false).len()
}

/// Background components (26-connected) that do not reach the grid boundary.
pub fn flood_fill_cavities(g: &VoxelGrid) -> usize {
    let (fg, shape) = foreground(g);
    let [a, b, c] = shape;
    let bg: Vec<bool> = fg.iter().map(|f| !f).collect();
    components(&bg, shape, true)
        .into_iter()
        .filter(|comp| {
            comp.iter().all(|&v| {
                let (x, y, z) = (v / (b * c), v / c % b, v % c);
                x > 0 && y > 0 && z > 0 && x + 1 < a && y + 1 < b && z + 1 < c
            })
        })
        .count()
}

/// Voxelized solids with known Betti numbers `(β0, β1, β2)`, scaled to an `n³` grid (`n >= 20`).
pub fn analytic_shapes(n: usize) -> Vec<(&'static str, VoxelGrid, [usize; 3])> {
    let c = (n as f64 - 1.0) / 2.0;
    let s = n as f64 / 24.0;
    let centre = [c, c, c];
    vec![
        ("solid ball", solid(n, |x, y, z| distance2(centre, x, y, z) <= (8.0 * s).powi(2)), [1, 0, 0]),
        (
            "hollow shell",
            solid(n, |x, y, z| {
                let d = distance2(centre, x, y, z);
                (4.0 * s).powi(2) <= d && d <= (8.0 * s).powi(2)
            }),
            [1, 0, 1],
        ),
        ("solid torus", solid(n, |x, y, z| torus_distance2(c, 7.0 * s, x, y, z) <= (2.5 * s).powi(2)), [1, 1, 0]),
        (
            "hollow torus shell",
            solid(n, |x, y, z| {
                let d = torus_distance2(c, 7.0 * s, x, y, z);
                (1.5 * s).powi(2) <= d && d <= (3.6 * s).powi(2)
            }),
            [1, 2, 1],
        ),
        (
            "two balls",
            solid(n, |x, y, z| {
                let r2 = (4.5 * s).powi(2);
                distance2([6.0 * s, c, c], x, y, z) <= r2 || distance2([n as f64 - 1.0 - 6.0 * s, c, c], x, y, z) <= r2
            }),
            [2, 0, 0],
        ),
    ]
}
