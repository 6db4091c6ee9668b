//! A common face over the interval and rectangle calculi so constraint
//! graphs, path consistency and acquisition are written once.

use std::fmt;

use crate::allen::{self, AllenRelation, AllenSet, ALL_RELATIONS};
use crate::rectangle::{self, RaRelation, RaSet, RA_RELATION_COUNT};

pub trait Calculus {
    type Rel: Copy + Eq + fmt::Debug + fmt::Display;
    type Set: Copy + Eq + fmt::Debug;

    /// Number of atomic relations in the language.
    const SIZE: usize;

    fn universe() -> Self::Set;
    fn empty() -> Self::Set;
    fn rel_from_index(index: usize) -> Option<Self::Rel>;
    fn converse(r: Self::Rel) -> Self::Rel;
    fn converse_set(s: &Self::Set) -> Self::Set;
    fn compose_sets(a: &Self::Set, b: &Self::Set) -> Self::Set;
    fn contains(s: &Self::Set, r: Self::Rel) -> bool;
    fn remove(s: &mut Self::Set, r: Self::Rel);
    fn intersection(a: &Self::Set, b: &Self::Set) -> Self::Set;
    fn is_empty(s: &Self::Set) -> bool;
    fn cardinality(s: &Self::Set) -> usize;
    fn single(s: &Self::Set) -> Option<Self::Rel>;
}

/// Γ: the 13-relation interval language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalCalculus;

impl Calculus for IntervalCalculus {
    type Rel = AllenRelation;
    type Set = AllenSet;

    const SIZE: usize = ALL_RELATIONS.len();

    fn universe() -> AllenSet {
        AllenSet::FULL
    }

    fn empty() -> AllenSet {
        AllenSet::EMPTY
    }

    fn rel_from_index(index: usize) -> Option<AllenRelation> {
        AllenRelation::from_index(index)
    }

    fn converse(r: AllenRelation) -> AllenRelation {
        r.converse()
    }

    fn converse_set(s: &AllenSet) -> AllenSet {
        s.converse()
    }

    fn compose_sets(a: &AllenSet, b: &AllenSet) -> AllenSet {
        allen::compose_sets(*a, *b)
    }

    fn contains(s: &AllenSet, r: AllenRelation) -> bool {
        s.contains(r)
    }

    fn remove(s: &mut AllenSet, r: AllenRelation) {
        s.remove(r);
    }

    fn intersection(a: &AllenSet, b: &AllenSet) -> AllenSet {
        a.intersection(*b)
    }

    fn is_empty(s: &AllenSet) -> bool {
        s.is_empty()
    }

    fn cardinality(s: &AllenSet) -> usize {
        s.len()
    }

    fn single(s: &AllenSet) -> Option<AllenRelation> {
        s.single()
    }
}

/// Φ = Γ²: the 169-relation rectangle language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RectangleCalculus;

impl Calculus for RectangleCalculus {
    type Rel = RaRelation;
    type Set = RaSet;

    const SIZE: usize = RA_RELATION_COUNT;

    fn universe() -> RaSet {
        RaSet::FULL
    }

    fn empty() -> RaSet {
        RaSet::EMPTY
    }

    fn rel_from_index(index: usize) -> Option<RaRelation> {
        RaRelation::from_flat_index(index)
    }

    fn converse(r: RaRelation) -> RaRelation {
        r.converse()
    }

    fn converse_set(s: &RaSet) -> RaSet {
        s.converse()
    }

    fn compose_sets(a: &RaSet, b: &RaSet) -> RaSet {
        rectangle::compose_sets(a, b)
    }

    fn contains(s: &RaSet, r: RaRelation) -> bool {
        s.contains(r)
    }

    fn remove(s: &mut RaSet, r: RaRelation) {
        s.remove(r);
    }

    fn intersection(a: &RaSet, b: &RaSet) -> RaSet {
        a.intersection(b)
    }

    fn is_empty(s: &RaSet) -> bool {
        s.is_empty()
    }

    fn cardinality(s: &RaSet) -> usize {
        s.len()
    }

    fn single(s: &RaSet) -> Option<RaRelation> {
        s.single()
    }
}
