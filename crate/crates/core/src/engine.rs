//! The per-dimension engines and the top-down pipeline that chains them.
//!
//! Every engine is written once for both ordinary and image persistence: the
//! filtration that orders the columns and the one that values the rows may
//! differ. Pairs are returned as `(birth cube, death cube)` with births read
//! from the row and column filtrations respectively.

use crate::complex::GridComplex;
use crate::cube::{pack, Cube};
use crate::options::{DimSet, Options, Timings};
use crate::reduction::{ColumnCache, CubeMap, CubeSet, CubeXorQueue};
use crate::union_find::UnionFind;

pub(crate) type RawPair = (Cube, Cube);

/// A filtration sharing the merge structure of a union-find pass.
#[derive(Clone, Copy)]
pub(crate) struct Label<'a> {
    pub values: &'a [f64],
    /// Record every merge, including pairs whose birth is not below their death.
    pub keep_all: bool,
}

pub(crate) struct Dim1Run {
    pub pairs: Vec<RawPair>,
    pub pivots: CubeSet,
    pub nonzero_columns: Vec<Cube>,
    pub zero_columns: Vec<Cube>,
}

/// Implicit column reduction of 2-cubes.
///
/// `columns` carry their column-filtration births; facets are valued in `rows`.
pub(crate) fn reduce_dim1(
    rows: &GridComplex<'_>,
    columns: &[Cube],
    opts: &Options,
    keep_all: bool,
) -> Dim1Run {
    let shape = rows.shape();
    let mut pivot_column = CubeMap::new(shape, 3);
    let mut cache = ColumnCache::new(shape, 3);
    let mut scratch = std::collections::BinaryHeap::new();
    let mut queue = CubeXorQueue::new();
    let mut facets: Vec<Cube> = Vec::with_capacity(4);
    let mut out = Dim1Run {
        pairs: Vec::new(),
        pivots: CubeSet::new(shape, 3),
        nonzero_columns: Vec::new(),
        zero_columns: Vec::new(),
    };

    for (i, col) in columns.iter().enumerate() {
        facets.clear();
        let row_birth = rows.birth_at(2, rows.offset_of(col), col.kind());
        let mut checked = !opts.emergent_pairs;
        let mut emergent = None;
        for f in rows.boundary(2, col).rev() {
            if !checked && f.birth == row_birth {
                checked = true;
                if !pivot_column.contains(&f) {
                    emergent = Some(f);
                    break;
                }
            }
            facets.push(f);
        }
        if let Some(p) = emergent {
            pivot_column.insert(&p, i as u32);
            out.pivots.insert(&p);
            out.nonzero_columns.push(*col);
            if keep_all || p.birth < col.birth {
                out.pairs.push((p, *col));
            }
            continue;
        }

        queue.clear();
        for f in &facets {
            queue.push(*f);
        }
        loop {
            let Some(p) = queue.get_pivot() else {
                out.zero_columns.push(*col);
                break;
            };
            match pivot_column.get(&p) {
                Some(j) => {
                    let other = &columns[j as usize];
                    match cache.get(other) {
                        Some(entries) if opts.cache_as_list => {
                            for e in entries {
                                queue.push(*e);
                            }
                        }
                        Some(entries) => queue.push_heap(entries, &mut scratch),
                        None => {
                            for f in rows.boundary(2, other) {
                                queue.push(f);
                            }
                        }
                    }
                }
                None => {
                    pivot_column.insert(&p, i as u32);
                    out.pivots.insert(&p);
                    out.nonzero_columns.push(*col);
                    if keep_all || p.birth < col.birth {
                        out.pairs.push((p, *col));
                    }
                    let entries = if opts.cache_as_list {
                        queue.to_list()
                    } else {
                        queue.to_heap()
                    };
                    cache.insert(col, &entries);
                    break;
                }
            }
        }
    }
    out
}

pub(crate) struct Dim0Run {
    /// Pairs per label.
    pub pairs: Vec<Vec<RawPair>>,
    /// Surviving representatives per label.
    pub essential: Vec<Vec<Cube>>,
    pub merging: Vec<Cube>,
    pub nonmerging: Vec<Cube>,
}

/// Union-find over the vertices, linking along `edges` in the given order.
///
/// Each label keeps the oldest vertex of a component as its representative;
/// on a merge the younger representative dies at the edge.
pub(crate) fn union_find_dim0(shape: [usize; 3], edges: &[Cube], labels: &[Label<'_>]) -> Dim0Run {
    let n = shape.iter().product::<usize>();
    let strides = [shape[1] * shape[2], shape[2], 1];
    let mut uf = UnionFind::new(n);
    let mut reps: Vec<Vec<u32>> = labels.iter().map(|_| (0..n as u32).collect()).collect();
    let mut run = Dim0Run {
        pairs: vec![Vec::new(); labels.len()],
        essential: vec![Vec::new(); labels.len()],
        merging: Vec::new(),
        nonmerging: Vec::new(),
    };
    let vertex = |values: &[f64], v: u32| {
        let v = v as usize;
        Cube {
            birth: values[v],
            index: pack(v / strides[0], v / strides[1] % shape[1], v % shape[2], 0),
        }
    };

    for e in edges {
        let [x, y, z] = e.coords();
        let a = (x * strides[0] + y * strides[1] + z) as u32;
        let b = a + strides[e.kind() as usize] as u32;
        let (ra, rb) = (uf.find(a), uf.find(b));
        if ra == rb {
            run.nonmerging.push(*e);
            continue;
        }
        run.merging.push(*e);
        let root = uf.link(ra, rb);
        for (l, label) in labels.iter().enumerate() {
            let (u, v) = (reps[l][ra as usize], reps[l][rb as usize]);
            let (older, younger) = if older_vertex(label.values, u, v) {
                (u, v)
            } else {
                (v, u)
            };
            reps[l][root as usize] = older;
            let birth = label.values[younger as usize];
            if label.keep_all || birth < e.birth {
                run.pairs[l].push((vertex(label.values, younger), *e));
            }
        }
    }

    for r in 0..n as u32 {
        if uf.find(r) == r {
            for (l, label) in labels.iter().enumerate() {
                run.essential[l].push(vertex(label.values, reps[l][r as usize]));
            }
        }
    }
    run
}

#[inline]
fn older_vertex(values: &[f64], u: u32, v: u32) -> bool {
    values[u as usize]
        .total_cmp(&values[v as usize])
        .then(u.cmp(&v))
        .is_lt()
}

pub(crate) struct TopRun {
    pub pairs: Vec<Vec<RawPair>>,
    /// Codimension-one cells that merged two dual components.
    pub merged: CubeSet,
}

/// Union-find on the dual graph of the top cells.
///
/// Dual edges are traversed in reverse refined order of `order`; each label
/// values the dual vertices with its own filtration and keeps the youngest
/// vertex of a component as representative, so the older one dies.
pub(crate) fn dual_union_find(
    order: &GridComplex<'_>,
    labels: &[Label<'_>],
    opts: &Options,
    timings: &mut Timings,
) -> TopRun {
    let layout = order.dual();
    let shape = order.shape();
    let edge_dim = layout.top_dim - 1;
    let edges = timings.time("sort", || {
        order.sorted_columns(edge_dim, |_| true, opts.partition_sort)
    });
    let start = std::time::Instant::now();

    let births: Vec<Vec<f64>> = labels
        .iter()
        .map(|l| {
            let mut b = layout.top_births(&GridComplex::new(l.values, shape));
            b.push(f64::INFINITY);
            b
        })
        .collect();
    let n = layout.outside + 1;
    let mut uf = UnionFind::new(n);
    let mut reps: Vec<Vec<u32>> = labels.iter().map(|_| (0..n as u32).collect()).collect();
    let mut run = TopRun {
        pairs: vec![Vec::new(); labels.len()],
        merged: CubeSet::new(shape, 3),
    };

    for e in edges.iter().rev() {
        let (lo, hi) = layout.cofacets(order, e);
        let (ra, rb) = (uf.find(lo as u32), uf.find(hi as u32));
        if ra == rb {
            continue;
        }
        run.merged.insert(e);
        let root = uf.link(ra, rb);
        for (l, label) in labels.iter().enumerate() {
            let (u, v) = (reps[l][ra as usize], reps[l][rb as usize]);
            let (older, younger) = if older_vertex(&births[l], u, v) {
                (u, v)
            } else {
                (v, u)
            };
            reps[l][root as usize] = younger;
            let death = births[l][older as usize];
            if label.keep_all || e.birth < death {
                let [x, y, z] = order.position(older as usize);
                run.pairs[l].push((
                    *e,
                    Cube {
                        birth: death,
                        index: pack(x, y, z, layout.top_kind),
                    },
                ));
            }
        }
    }
    timings.add("top", start.elapsed());
    run
}

/// Extra filtrations carried along by a pipeline run.
#[derive(Clone, Copy, Default)]
pub(crate) struct Riders<'a> {
    /// Dual vertex filtrations sharing the top-dimensional union-find.
    pub top: &'a [Label<'a>],
    /// Vertex filtrations sharing the dimension-0 union-find.
    pub dim0: &'a [Label<'a>],
}

/// Output of one top-down pipeline over a single volume.
pub(crate) struct ChainRun {
    pub pairs: [Vec<RawPair>; 3],
    pub essential: [Vec<Cube>; 3],
    pub rider_top: Vec<Vec<RawPair>>,
    pub rider_dim0: Vec<Vec<RawPair>>,
    /// Non-zero dimension-1 reduction columns, in column order.
    pub dim1_nonzero: Option<Vec<Cube>>,
    /// Dimension-1 reduction columns that were handed to the reduction.
    pub dim1_columns: Option<Vec<Cube>>,
    /// Edges that merged components in the dimension-0 pass.
    pub dim0_merging: Option<Vec<Cube>>,
    /// Edges handed to the dimension-0 pass.
    pub dim0_columns: Option<Vec<Cube>>,
    pub timings: Timings,
}

/// Runs the engines from the top dimension down to dimension 0 with clearing hand-off.
pub(crate) fn run_chain(
    values: &[f64],
    shape: [usize; 3],
    dims: DimSet,
    opts: &Options,
    riders: Riders<'_>,
) -> ChainRun {
    let complex = GridComplex::new(values, shape);
    let top_dim = complex.top_dim();
    let mut timings = Timings::default();
    let mut run = ChainRun {
        pairs: Default::default(),
        essential: Default::default(),
        rider_top: vec![Vec::new(); riders.top.len()],
        rider_dim0: vec![Vec::new(); riders.dim0.len()],
        dim1_nonzero: None,
        dim1_columns: None,
        dim0_merging: None,
        dim0_columns: None,
        timings: Timings::default(),
    };
    let upper = dims.max().unwrap_or(0) >= 1;

    // Top dimension by duality.
    let mut top_merged = None;
    if upper && top_dim >= 2 {
        let mut labels = vec![Label {
            values,
            keep_all: false,
        }];
        labels.extend_from_slice(riders.top);
        let mut top = dual_union_find(&complex, &labels, opts, &mut timings);
        run.rider_top = top.pairs.split_off(1);
        run.pairs[top_dim - 1] = top.pairs.pop().unwrap();
        top_merged = Some(top.merged);
    }

    // Dimension 1 by implicit reduction (only when the top dimension is 3).
    let mut dim1_pivots = None;
    if upper && top_dim == 3 {
        let merged = top_merged.as_ref().filter(|_| opts.clearing);
        let columns = timings.time("sort", || {
            complex.sorted_columns(
                2,
                |c| merged.is_none_or(|m| !m.contains(c)),
                opts.partition_sort,
            )
        });
        let reduced = timings.time("reduction", || reduce_dim1(&complex, &columns, opts, false));
        run.pairs[1] = reduced.pairs;
        run.essential[2] = reduced
            .zero_columns
            .into_iter()
            .filter(|c| top_merged.as_ref().is_none_or(|m| !m.contains(c)))
            .collect();
        run.dim1_nonzero = Some(reduced.nonzero_columns);
        run.dim1_columns = Some(columns);
        dim1_pivots = Some(reduced.pivots);
    }

    // Dimension 0 by union-find on the vertices.
    if top_dim >= 1 {
        // Edges already known to create cycles cannot merge components.
        let positive = match top_dim {
            3 => dim1_pivots.as_ref(),
            2 => top_merged.as_ref(),
            _ => None,
        };
        let cleared = positive.filter(|_| opts.clearing);
        let edges = timings.time("sort", || {
            complex.sorted_columns(
                1,
                |c| cleared.is_none_or(|p| !p.contains(c)),
                opts.partition_sort,
            )
        });
        let mut labels = vec![Label {
            values,
            keep_all: false,
        }];
        labels.extend_from_slice(riders.dim0);
        let mut uf = timings.time("union_find", || union_find_dim0(shape, &edges, &labels));
        run.rider_dim0 = uf.pairs.split_off(1);
        run.pairs[0] = uf.pairs.pop().unwrap();
        run.essential[0] = uf.essential.swap_remove(0);
        if upper && top_dim >= 2 {
            run.essential[1] = uf
                .nonmerging
                .into_iter()
                .filter(|e| positive.is_none_or(|p| !p.contains(e)))
                .collect();
        }
        run.dim0_merging = Some(uf.merging);
        run.dim0_columns = Some(edges);
    } else {
        run.essential[0] = vec![Cube {
            birth: values[0],
            index: 0,
        }];
    }

    for d in 0..3 {
        if !dims.contains(d) {
            run.pairs[d].clear();
            run.essential[d].clear();
        }
        run.pairs[d].sort_unstable();
        run.essential[d].sort_unstable();
    }
    run.timings = timings;
    run
}
