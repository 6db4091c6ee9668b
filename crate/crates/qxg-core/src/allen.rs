//! Allen's interval algebra: 13 mutually exclusive, jointly exhaustive
//! relations between two 1D intervals, with converse and composition.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// A 1D interval with strictly positive length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid interval [{lo}, {hi}]: endpoints must be finite with lo < hi")]
pub struct InvalidInterval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, InvalidInterval> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(InvalidInterval { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// One of the 13 atomic interval relations, in the canonical listing order
/// `p m o d s f eq pi mi oi di si fi` (indices 0..=12). The order is fixed:
/// serialized bytes and query enumeration both depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum AllenRelation {
    Precedes = 0,
    Meets = 1,
    Overlaps = 2,
    During = 3,
    Starts = 4,
    Finishes = 5,
    Equals = 6,
    PrecededBy = 7,
    MetBy = 8,
    OverlappedBy = 9,
    Contains = 10,
    StartedBy = 11,
    FinishedBy = 12,
}

pub const ALLEN_RELATION_COUNT: usize = 13;

use AllenRelation::*;

/// All 13 relations in canonical index order.
pub const ALL_RELATIONS: [AllenRelation; ALLEN_RELATION_COUNT] = [
    Precedes, Meets, Overlaps, During, Starts, Finishes, Equals, PrecededBy, MetBy, OverlappedBy,
    Contains, StartedBy, FinishedBy,
];

const TOKENS: [&str; ALLEN_RELATION_COUNT] = [
    "p", "m", "o", "d", "s", "f", "eq", "pi", "mi", "oi", "di", "si", "fi",
];

const LONG_NAMES: [&str; ALLEN_RELATION_COUNT] = [
    "precedes",
    "meets",
    "overlaps",
    "during",
    "starts",
    "finishes",
    "equals",
    "preceded-by",
    "met-by",
    "overlapped-by",
    "contains",
    "started-by",
    "finished-by",
];

impl AllenRelation {
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(index: usize) -> Option<Self> {
        ALL_RELATIONS.get(index).copied()
    }

    /// Short token used in text formats (`p`, `m`, ..., `fi`).
    pub fn token(self) -> &'static str {
        TOKENS[self.index()]
    }

    /// Readable name used when rendering relations as prose.
    pub fn long_name(self) -> &'static str {
        LONG_NAMES[self.index()]
    }

    pub fn from_token(token: &str) -> Option<Self> {
        TOKENS
            .iter()
            .position(|t| *t == token)
            .map(|i| ALL_RELATIONS[i])
    }

    /// The relation holding from b to a when `self` holds from a to b.
    /// An involution; `eq` is the only fixed point.
    #[inline]
    pub fn converse(self) -> Self {
        match self {
            Precedes => PrecededBy,
            Meets => MetBy,
            Overlaps => OverlappedBy,
            During => Contains,
            Starts => StartedBy,
            Finishes => FinishedBy,
            Equals => Equals,
            PrecededBy => Precedes,
            MetBy => Meets,
            OverlappedBy => Overlaps,
            Contains => During,
            StartedBy => Starts,
            FinishedBy => Finishes,
        }
    }

    /// Relations possible between a and c given `self` holding a→b and
    /// `other` holding b→c.
    #[inline]
    pub fn compose(self, other: Self) -> AllenSet {
        AllenSet(COMPOSITION[self.index()][other.index()])
    }
}

impl fmt::Display for AllenRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[inline]
fn cmp_eps(a: f64, b: f64, eps: f64) -> Ordering {
    if (a - b).abs() <= eps {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Classifies a pair of intervals into the unique relation holding from
/// `a` to `b`, with exact endpoint comparison.
#[inline]
pub fn classify(a: Interval, b: Interval) -> AllenRelation {
    classify_eps(a, b, 0.0)
}

/// Like [`classify`] but snapping endpoint differences of at most `eps`
/// to equality first. `eps = 0` is exact comparison.
pub fn classify_eps(a: Interval, b: Interval, eps: f64) -> AllenRelation {
    use Ordering::*;
    match cmp_eps(a.hi, b.lo, eps) {
        Less => return Precedes,
        Equal => return Meets,
        Greater => {}
    }
    match cmp_eps(b.hi, a.lo, eps) {
        Less => return PrecededBy,
        Equal => return MetBy,
        Greater => {}
    }
    match (cmp_eps(a.lo, b.lo, eps), cmp_eps(a.hi, b.hi, eps)) {
        (Less, Less) => Overlaps,
        (Less, Equal) => FinishedBy,
        (Less, Greater) => Contains,
        (Equal, Less) => Starts,
        (Equal, Equal) => Equals,
        (Equal, Greater) => StartedBy,
        (Greater, Less) => During,
        (Greater, Equal) => Finishes,
        (Greater, Greater) => OverlappedBy,
    }
}

/// True iff `r` is the relation holding from `a` to `b`.
#[inline]
pub fn holds(a: Interval, r: AllenRelation, b: Interval) -> bool {
    classify(a, b) == r
}

#[inline]
pub fn holds_eps(a: Interval, r: AllenRelation, b: Interval, eps: f64) -> bool {
    classify_eps(a, b, eps) == r
}

/// A subset of the 13 relations, as a bit mask over canonical indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct AllenSet(u16);

const FULL_MASK: u16 = (1 << ALLEN_RELATION_COUNT) - 1;

impl AllenSet {
    pub const EMPTY: Self = Self(0);
    /// Γ: all 13 relations.
    pub const FULL: Self = Self(FULL_MASK);

    #[inline]
    pub fn singleton(r: AllenRelation) -> Self {
        Self(1 << r.index())
    }

    #[inline]
    pub fn from_bits(bits: u16) -> Self {
        Self(bits & FULL_MASK)
    }

    #[inline]
    pub fn bits(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn contains(self, r: AllenRelation) -> bool {
        self.0 & (1 << r.index()) != 0
    }

    #[inline]
    pub fn insert(&mut self, r: AllenRelation) {
        self.0 |= 1 << r.index();
    }

    #[inline]
    pub fn remove(&mut self, r: AllenRelation) {
        self.0 &= !(1 << r.index());
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_full(self) -> bool {
        self.0 == FULL_MASK
    }

    #[inline]
    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    #[inline]
    pub fn complement(self) -> Self {
        Self(!self.0 & FULL_MASK)
    }

    /// The only member, if the set is a singleton.
    pub fn single(self) -> Option<AllenRelation> {
        if self.len() == 1 {
            AllenRelation::from_index(self.0.trailing_zeros() as usize)
        } else {
            None
        }
    }

    /// Members in canonical index order.
    pub fn iter(self) -> impl Iterator<Item = AllenRelation> {
        ALL_RELATIONS.into_iter().filter(move |r| self.contains(*r))
    }

    /// Elementwise converse.
    pub fn converse(self) -> Self {
        let mut out = Self::EMPTY;
        for r in self.iter() {
            out.insert(r.converse());
        }
        out
    }
}

impl fmt::Display for AllenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for r in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{}", r.token())?;
            first = false;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for AllenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Composition of two relation sets: the union of all pairwise compositions.
pub fn compose_sets(a: AllenSet, b: AllenSet) -> AllenSet {
    let mut out = AllenSet::EMPTY;
    for r1 in a.iter() {
        for r2 in b.iter() {
            out = out.union(r1.compose(r2));
            if out.is_full() {
                return out;
            }
        }
    }
    out
}

// 13x13 composition table; bit i of entry [r1][r2] is set iff relation index
// i can hold a→c when r1 holds a→b and r2 holds b→c. Frozen from witness
// enumeration over integer endpoints in 0..=8; the acceptance suite
// re-derives the table the same way and checks every entry.
const COMPOSITION: [[u16; 13]; 13] = [
    // p ; _
    [0x0001, 0x0001, 0x0001, 0x001f, 0x0001, 0x001f, 0x0001, 0x1fff, 0x001f, 0x001f, 0x0001, 0x0001, 0x0001],
    // m ; _
    [0x0001, 0x0001, 0x0001, 0x001c, 0x0002, 0x001c, 0x0002, 0x0f80, 0x1060, 0x001c, 0x0001, 0x0002, 0x0001],
    // o ; _
    [0x0001, 0x0001, 0x0007, 0x001c, 0x0004, 0x001c, 0x0004, 0x0f80, 0x0e00, 0x1e7c, 0x1407, 0x1404, 0x0007],
    // d ; _
    [0x0001, 0x0001, 0x001f, 0x0008, 0x0008, 0x0008, 0x0008, 0x0080, 0x0080, 0x03a8, 0x1fff, 0x03a8, 0x001f],
    // s ; _
    [0x0001, 0x0001, 0x0007, 0x0008, 0x0010, 0x0008, 0x0010, 0x0080, 0x0100, 0x0228, 0x1407, 0x0850, 0x0007],
    // f ; _
    [0x0001, 0x0002, 0x001c, 0x0008, 0x0008, 0x0020, 0x0020, 0x0080, 0x0080, 0x0380, 0x0f80, 0x0380, 0x1060],
    // eq ; _
    [0x0001, 0x0002, 0x0004, 0x0008, 0x0010, 0x0020, 0x0040, 0x0080, 0x0100, 0x0200, 0x0400, 0x0800, 0x1000],
    // pi ; _
    [0x1fff, 0x03a8, 0x03a8, 0x03a8, 0x03a8, 0x0080, 0x0080, 0x0080, 0x0080, 0x0080, 0x0080, 0x0080, 0x0080],
    // mi ; _
    [0x1407, 0x0850, 0x0228, 0x0228, 0x0228, 0x0100, 0x0100, 0x0080, 0x0080, 0x0080, 0x0080, 0x0080, 0x0100],
    // oi ; _
    [0x1407, 0x1404, 0x1e7c, 0x0228, 0x0228, 0x0200, 0x0200, 0x0080, 0x0080, 0x0380, 0x0f80, 0x0380, 0x0e00],
    // di ; _
    [0x1407, 0x1404, 0x1404, 0x1e7c, 0x1404, 0x0e00, 0x0400, 0x0f80, 0x0e00, 0x0e00, 0x0400, 0x0400, 0x0400],
    // si ; _
    [0x1407, 0x1404, 0x1404, 0x0228, 0x0850, 0x0200, 0x0800, 0x0080, 0x0100, 0x0200, 0x0400, 0x0800, 0x0400],
    // fi ; _
    [0x0001, 0x0002, 0x0004, 0x001c, 0x0004, 0x1060, 0x1000, 0x0f80, 0x0e00, 0x0e00, 0x0400, 0x0400, 0x1000],
];
