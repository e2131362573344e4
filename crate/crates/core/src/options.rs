use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

/// Switches for the individual optimizations. All are on by default and none
/// of them changes any result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Options {
    /// Detect zero-persistence pairs from the youngest facet and skip their reduction.
    pub emergent_pairs: bool,
    /// Hand cleared column lists down from higher to lower dimensions.
    pub clearing: bool,
    /// Order columns of two-valued volumes by a stable partition instead of a sort.
    pub partition_sort: bool,
    /// Cache reduced columns as lists; when off, as binary-heap layouts.
    pub cache_as_list: bool,
    /// Run independent barcode computations on the rayon pool.
    pub parallel: bool,
    /// Share union-find forests between computations with identical merge structure.
    pub joint_union_find: bool,
    /// Restrict image reductions to the columns that are non-zero for the comparison volume.
    pub image_clearing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            emergent_pairs: true,
            clearing: true,
            partition_sort: true,
            cache_as_list: true,
            parallel: true,
            joint_union_find: true,
            image_clearing: true,
        }
    }
}

impl Options {
    pub fn all_off() -> Self {
        Options {
            emergent_pairs: false,
            clearing: false,
            partition_sort: false,
            cache_as_list: false,
            parallel: false,
            joint_union_find: false,
            image_clearing: false,
        }
    }

    /// Flag names in the order used by the CLI.
    pub const FLAGS: [&'static str; 7] = [
        "emergent-pairs",
        "clearing",
        "partition-sort",
        "cache-as-list",
        "parallel",
        "joint-union-find",
        "image-clearing",
    ];

    /// Mutable access to a flag by its CLI name.
    pub fn flag_mut(&mut self, name: &str) -> Option<&mut bool> {
        Some(match name {
            "emergent-pairs" => &mut self.emergent_pairs,
            "clearing" => &mut self.clearing,
            "partition-sort" => &mut self.partition_sort,
            "cache-as-list" => &mut self.cache_as_list,
            "parallel" => &mut self.parallel,
            "joint-union-find" => &mut self.joint_union_find,
            "image-clearing" => &mut self.image_clearing,
            _ => return None,
        })
    }

    /// A copy with the named flag switched off.
    pub fn without(mut self, name: &str) -> Self {
        if let Some(flag) = self.flag_mut(name) {
            *flag = false;
        }
        self
    }
}

/// A subset of the homology dimensions 0, 1 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DimSet([bool; 3]);

impl DimSet {
    pub const ALL: DimSet = DimSet([true; 3]);

    pub fn only(dim: usize) -> Self {
        let mut d = [false; 3];
        d[dim] = true;
        DimSet(d)
    }

    pub fn from_dims(dims: &[usize]) -> Option<Self> {
        let mut d = [false; 3];
        for &x in dims {
            *d.get_mut(x)? = true;
        }
        Some(DimSet(d))
    }

    /// Parses a comma-separated list such as `0,2`.
    pub fn parse(s: &str) -> Option<Self> {
        let dims: Option<Vec<usize>> = s
            .split(',')
            .map(|p| p.trim().parse().ok())
            .collect();
        let set = Self::from_dims(&dims?)?;
        (!set.is_empty()).then_some(set)
    }

    #[inline]
    pub fn contains(&self, dim: usize) -> bool {
        dim < 3 && self.0[dim]
    }

    pub fn is_empty(&self) -> bool {
        !self.0.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..3).filter(|&d| self.0[d])
    }

    pub fn max(&self) -> Option<usize> {
        (0..3).rev().find(|&d| self.0[d])
    }
}

impl Default for DimSet {
    fn default() -> Self {
        DimSet::ALL
    }
}

impl fmt::Display for DimSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Accumulated wall time per stage. Stages running concurrently are summed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Timings {
    stages: BTreeMap<&'static str, Duration>,
}

impl Timings {
    pub fn add(&mut self, stage: &'static str, d: Duration) {
        *self.stages.entry(stage).or_default() += d;
    }

    pub fn merge(&mut self, other: &Timings) {
        for (k, v) in &other.stages {
            self.add(k, *v);
        }
    }

    pub fn get(&self, stage: &str) -> Duration {
        self.stages.get(stage).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, Duration)> + '_ {
        self.stages.iter().map(|(k, v)| (*k, *v))
    }

    /// Runs `f` and adds its wall time to `stage`.
    pub fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> T) -> T {
        let start = std::time::Instant::now();
        let out = f();
        self.add(stage, start.elapsed());
        out
    }
}

/// Runs both closures, on the rayon pool when `parallel` is set and the feature is enabled.
pub(crate) fn join<A, B, RA, RB>(parallel: bool, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return rayon::join(a, b);
    }
    let _ = parallel;
    (a(), b())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_set_parsing() {
        assert_eq!(DimSet::parse("0,1,2"), Some(DimSet::ALL));
        assert_eq!(DimSet::parse("0"), Some(DimSet::only(0)));
        assert_eq!(DimSet::parse("2, 0").unwrap().iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(DimSet::parse("3"), None);
        assert_eq!(DimSet::parse("x"), None);
        assert_eq!(DimSet::parse("1").unwrap().to_string(), "1");
    }

    #[test]
    fn flags_by_name() {
        let mut o = Options::default();
        for name in Options::FLAGS {
            *o.flag_mut(name).unwrap() = false;
        }
        assert_eq!(o, Options::all_off());
        assert!(!Options::default().without("clearing").clearing);
    }

    #[test]
    fn join_runs_both() {
        assert_eq!(join(true, || 1, || 2), (1, 2));
        assert_eq!(join(false, || 1, || 2), (1, 2));
    }
}
