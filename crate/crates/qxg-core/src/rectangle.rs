//! Rectangle algebra over axis-aligned bounding boxes: 13² = 169 atomic
//! relations, each a pair of interval relations (one per axis).

use std::fmt;

use thiserror::Error;

use crate::allen::{self, AllenRelation, AllenSet, Interval, ALLEN_RELATION_COUNT};

pub const RA_RELATION_COUNT: usize = ALLEN_RELATION_COUNT * ALLEN_RELATION_COUNT;

/// Axis-aligned bounding box: top-left corner plus strictly positive
/// width and height, in the sensor's native units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid bbox [{x}, {y}, {w}, {h}]: coordinates must be finite and w, h > 0")]
pub struct InvalidBBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self, InvalidBBox> {
        let finite = x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite();
        if finite && w > 0.0 && h > 0.0 {
            Ok(Self { x, y, w, h })
        } else {
            Err(InvalidBBox { x, y, w, h })
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Projection onto the horizontal axis: [x, x+w].
    pub fn x_interval(&self) -> Interval {
        Interval::new(self.x, self.x + self.w).expect("valid box has valid x projection")
    }

    /// Projection onto the vertical axis: [y, y+h].
    pub fn y_interval(&self) -> Interval {
        Interval::new(self.y, self.y + self.h).expect("valid box has valid y projection")
    }
}

/// One of the 169 atomic rectangle relations: an interval relation per axis.
/// The canonical flat index is `13 * index(rx) + index(ry)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RaRelation {
    pub rx: AllenRelation,
    pub ry: AllenRelation,
}

impl RaRelation {
    pub fn new(rx: AllenRelation, ry: AllenRelation) -> Self {
        Self { rx, ry }
    }

    #[inline]
    pub fn flat_index(self) -> usize {
        self.rx.index() * ALLEN_RELATION_COUNT + self.ry.index()
    }

    #[inline]
    pub fn from_flat_index(index: usize) -> Option<Self> {
        if index < RA_RELATION_COUNT {
            Some(Self {
                rx: AllenRelation::from_index(index / ALLEN_RELATION_COUNT)?,
                ry: AllenRelation::from_index(index % ALLEN_RELATION_COUNT)?,
            })
        } else {
            None
        }
    }

    /// Componentwise converse; an involution.
    #[inline]
    pub fn converse(self) -> Self {
        Self {
            rx: self.rx.converse(),
            ry: self.ry.converse(),
        }
    }

    /// Componentwise composition: the cartesian product of the per-axis
    /// composition sets.
    pub fn compose(self, other: Self) -> RaSet {
        RaSet::product(self.rx.compose(other.rx), self.ry.compose(other.ry))
    }

    /// Parses the text form `(o,p)`.
    pub fn from_text(text: &str) -> Option<Self> {
        let inner = text.strip_prefix('(')?.strip_suffix(')')?;
        let (x, y) = inner.split_once(',')?;
        Some(Self {
            rx: AllenRelation::from_token(x.trim())?,
            ry: AllenRelation::from_token(y.trim())?,
        })
    }
}

impl fmt::Display for RaRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.rx.token(), self.ry.token())
    }
}

/// Classifies a pair of boxes into the unique rectangle relation holding
/// from `a` to `b`: per-axis interval classification, no axis flips.
#[inline]
pub fn classify(a: &BBox, b: &BBox) -> RaRelation {
    classify_eps(a, b, 0.0)
}

pub fn classify_eps(a: &BBox, b: &BBox, eps: f64) -> RaRelation {
    RaRelation {
        rx: allen::classify_eps(a.x_interval(), b.x_interval(), eps),
        ry: allen::classify_eps(a.y_interval(), b.y_interval(), eps),
    }
}

/// True iff `r` is the relation holding from `a` to `b`.
#[inline]
pub fn holds(a: &BBox, r: RaRelation, b: &BBox) -> bool {
    classify(a, b) == r
}

#[inline]
pub fn holds_eps(a: &BBox, r: RaRelation, b: &BBox, eps: f64) -> bool {
    classify_eps(a, b, eps) == r
}

/// A subset of the 169 rectangle relations, as a 169-bit mask indexed by
/// flat index.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct RaSet {
    words: [u64; 3],
}

const LAST_WORD_MASK: u64 = (1 << (RA_RELATION_COUNT - 128)) - 1;

impl RaSet {
    pub const EMPTY: Self = Self { words: [0; 3] };
    /// Φ: all 169 relations.
    pub const FULL: Self = Self {
        words: [u64::MAX, u64::MAX, LAST_WORD_MASK],
    };

    pub fn singleton(r: RaRelation) -> Self {
        let mut s = Self::EMPTY;
        s.insert(r);
        s
    }

    /// The product set {(x, y) : x ∈ xs, y ∈ ys}.
    pub fn product(xs: AllenSet, ys: AllenSet) -> Self {
        // flat layout groups the 13 y-bits of one x into a contiguous block,
        // so a product is the y-mask replicated at each x offset
        let ybits = ys.bits() as u64;
        let mut out = Self::EMPTY;
        for x in xs.iter() {
            let base = x.index() * ALLEN_RELATION_COUNT;
            let word = base / 64;
            let shift = base % 64;
            out.words[word] |= ybits << shift;
            if shift > 64 - ALLEN_RELATION_COUNT && word + 1 < 3 {
                out.words[word + 1] |= ybits >> (64 - shift);
            }
        }
        out
    }

    #[inline]
    pub fn contains(&self, r: RaRelation) -> bool {
        let i = r.flat_index();
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    #[inline]
    pub fn insert(&mut self, r: RaRelation) {
        let i = r.flat_index();
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, r: RaRelation) {
        let i = r.flat_index();
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words == [0; 3]
    }

    #[inline]
    pub fn is_full(&self) -> bool {
        *self == Self::FULL
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            words: [
                self.words[0] | other.words[0],
                self.words[1] | other.words[1],
                self.words[2] | other.words[2],
            ],
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            words: [
                self.words[0] & other.words[0],
                self.words[1] & other.words[1],
                self.words[2] & other.words[2],
            ],
        }
    }

    /// The only member, if the set is a singleton.
    pub fn single(&self) -> Option<RaRelation> {
        if self.len() != 1 {
            return None;
        }
        self.iter().next()
    }

    /// Members in flat-index order.
    pub fn iter(&self) -> RaSetIter {
        RaSetIter { set: *self, next: 0 }
    }

    /// Elementwise converse.
    pub fn converse(&self) -> Self {
        let mut out = Self::EMPTY;
        for r in self.iter() {
            out.insert(r.converse());
        }
        out
    }
}

pub struct RaSetIter {
    set: RaSet,
    next: usize,
}

impl Iterator for RaSetIter {
    type Item = RaRelation;

    fn next(&mut self) -> Option<RaRelation> {
        while self.next < RA_RELATION_COUNT {
            let word = self.next / 64;
            let rest = self.set.words[word] >> (self.next % 64);
            if rest == 0 {
                self.next = (word + 1) * 64;
                continue;
            }
            let i = self.next + rest.trailing_zeros() as usize;
            if i >= RA_RELATION_COUNT {
                break;
            }
            self.next = i + 1;
            return RaRelation::from_flat_index(i);
        }
        None
    }
}

impl fmt::Display for RaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for r in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{}", r)?;
            first = false;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for RaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Composition of two rectangle relation sets: the union over member pairs
/// of the componentwise composition.
pub fn compose_sets(a: &RaSet, b: &RaSet) -> RaSet {
    let mut out = RaSet::EMPTY;
    for r1 in a.iter() {
        for r2 in b.iter() {
            out = out.union(&r1.compose(r2));
            if out.is_full() {
                return out;
            }
        }
    }
    out
}
