//! Bit-packed cube handles and the refined filtration order.

use std::cmp::Ordering;
use std::fmt;

const COORD_BITS: u32 = 20;
const TYPE_BITS: u32 = 4;
const COORD_MASK: u64 = (1 << COORD_BITS) - 1;
const TYPE_MASK: u64 = (1 << TYPE_BITS) - 1;
const X_SHIFT: u32 = TYPE_BITS + 2 * COORD_BITS;
const Y_SHIFT: u32 = TYPE_BITS + COORD_BITS;
const Z_SHIFT: u32 = TYPE_BITS;

/// Packs `(x, y, z, type)` so that integer order is lexicographic order on the tuple.
#[inline]
pub const fn pack(x: usize, y: usize, z: usize, kind: u8) -> u64 {
    ((x as u64) << X_SHIFT) | ((y as u64) << Y_SHIFT) | ((z as u64) << Z_SHIFT) | kind as u64
}

/// Inverse of [`pack`].
#[inline]
pub const fn unpack(index: u64) -> (usize, usize, usize, u8) {
    (
        ((index >> X_SHIFT) & COORD_MASK) as usize,
        ((index >> Y_SHIFT) & COORD_MASK) as usize,
        ((index >> Z_SHIFT) & COORD_MASK) as usize,
        (index & TYPE_MASK) as u8,
    )
}

/// A cube of the grid complex: its filtration value and packed location.
///
/// The location is the lexicographically smallest vertex of the cube plus a
/// type: for edges the axis they extend along, for 2-cubes the axis they are
/// normal to. Vertices and 3-cubes have type 0. The cube's dimension is never
/// stored; every algorithm knows which dimension it works in.
///
/// Cubes are ordered by birth, then by packed index. Births are never NaN.
#[derive(Clone, Copy, Debug)]
pub struct Cube {
    pub birth: f64,
    pub index: u64,
}

impl Cube {
    #[inline]
    pub fn new(birth: f64, x: usize, y: usize, z: usize, kind: u8) -> Self {
        Cube {
            birth,
            index: pack(x, y, z, kind),
        }
    }

    /// Stand-in for the unbounded outside cell of the dual complex; younger than any real cube.
    pub const OUTSIDE: Cube = Cube {
        birth: f64::INFINITY,
        index: u64::MAX,
    };

    #[inline]
    pub fn x(&self) -> usize {
        ((self.index >> X_SHIFT) & COORD_MASK) as usize
    }

    #[inline]
    pub fn y(&self) -> usize {
        ((self.index >> Y_SHIFT) & COORD_MASK) as usize
    }

    #[inline]
    pub fn z(&self) -> usize {
        ((self.index >> Z_SHIFT) & COORD_MASK) as usize
    }

    #[inline]
    pub fn kind(&self) -> u8 {
        (self.index & TYPE_MASK) as u8
    }

    #[inline]
    pub fn coords(&self) -> [usize; 3] {
        [self.x(), self.y(), self.z()]
    }

    pub fn is_outside(&self) -> bool {
        self.index == u64::MAX
    }
}

impl PartialEq for Cube {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cube {}

impl std::hash::Hash for Cube {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.birth.to_bits().hash(state);
        self.index.hash(state);
    }
}

impl PartialOrd for Cube {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cube {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.index.cmp(&other.index))
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_outside() {
            return write!(f, "outside");
        }
        write!(
            f,
            "({}, {}, {}; {})@{}",
            self.x(),
            self.y(),
            self.z(),
            self.kind(),
            self.birth
        )
    }
}

/// Bitmask of the axes a cube extends along, from its dimension and type.
#[inline]
pub const fn axes_mask(dim: usize, kind: u8) -> u8 {
    match dim {
        0 => 0,
        1 => 1 << kind,
        2 => 0b111 & !(1 << kind),
        _ => 0b111,
    }
}

/// Inverse of [`axes_mask`]: the `(dim, type)` pair spanning exactly `mask`.
#[inline]
pub const fn kind_of_mask(mask: u8) -> (usize, u8) {
    match mask {
        0 => (0, 0),
        0b001 => (1, 0),
        0b010 => (1, 1),
        0b100 => (1, 2),
        0b110 => (2, 0),
        0b101 => (2, 1),
        0b011 => (2, 2),
        _ => (3, 0),
    }
}

/// Number of types a cube of dimension `dim` can have.
#[inline]
pub const fn type_count(dim: usize) -> usize {
    match dim {
        1 | 2 => 3,
        _ => 1,
    }
}
