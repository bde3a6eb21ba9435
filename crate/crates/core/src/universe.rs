//! Interning of a subformula-closed set of formulas.
//!
//! Every rule of the calculus has the subformula property, so once the
//! subformulae of a root sequent are numbered, each sequent met during search
//! is a pair of bit sets over those numbers. Ids follow the canonical formula
//! order, so iterating a set by id is iterating it canonically.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use smallvec::SmallVec;

use crate::formula::{Formula, FormulaSet};

pub type Id = u32;

/// Fixed-width bit set over the ids of one universe.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdSet {
    words: SmallVec<[u64; 2]>,
}

impl IdSet {
    pub fn empty(width: usize) -> IdSet {
        let n = width.div_ceil(64).max(1);
        IdSet {
            words: SmallVec::from_elem(0, n),
        }
    }

    #[inline]
    pub fn contains(&self, id: Id) -> bool {
        let (w, b) = (id as usize / 64, id % 64);
        self.words[w] >> b & 1 == 1
    }

    /// Returns whether the id was newly inserted.
    #[inline]
    pub fn insert(&mut self, id: Id) -> bool {
        let (w, b) = (id as usize / 64, id % 64);
        let fresh = self.words[w] >> b & 1 == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, id: Id) {
        let (w, b) = (id as usize / 64, id % 64);
        self.words[w] &= !(1 << b);
    }

    pub fn with(&self, id: Id) -> IdSet {
        let mut out = self.clone();
        out.insert(id);
        out
    }

    pub fn union_with(&mut self, other: &IdSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn union(&self, other: &IdSet) -> IdSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn is_subset(&self, other: &IdSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &IdSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = Id> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                Some(wi as u32 * 64 + b)
            })
        })
    }
}

impl fmt::Debug for IdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Shape of an interned formula, with children as ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Atom,
    Top,
    Bot,
    And(Id, Id),
    Or(Id, Id),
    Imp(Id, Id),
    Excl(Id, Id),
}

#[derive(Clone, Debug)]
pub struct Universe {
    formulas: Vec<Formula>,
    nodes: Vec<Node>,
    index: HashMap<Formula, Id>,
    /// Subformula closure of each id, itself included.
    closure: Vec<IdSet>,
    degree: Vec<usize>,
    top: Option<Id>,
    bot: Option<Id>,
}

impl Universe {
    /// Interns the subformulae of the given formulas.
    pub fn new<'a>(roots: impl IntoIterator<Item = &'a Formula>) -> Universe {
        let mut all = FormulaSet::new();
        for f in roots {
            f.collect_subformulae(&mut all);
        }
        let formulas: Vec<Formula> = all.into_iter().collect();
        let index: HashMap<Formula, Id> = formulas
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i as Id))
            .collect();
        let nodes: Vec<Node> = formulas
            .iter()
            .map(|f| match f {
                Formula::Atom(_) => Node::Atom,
                Formula::Top => Node::Top,
                Formula::Bot => Node::Bot,
                Formula::And(l, r) => Node::And(index[&**l], index[&**r]),
                Formula::Or(l, r) => Node::Or(index[&**l], index[&**r]),
                Formula::Imp(l, r) => Node::Imp(index[&**l], index[&**r]),
                Formula::Excl(l, r) => Node::Excl(index[&**l], index[&**r]),
            })
            .collect();
        let width = formulas.len();
        let mut closure = Vec::with_capacity(width);
        for (i, f) in formulas.iter().enumerate() {
            let mut set = IdSet::empty(width);
            for g in f.subformulae() {
                set.insert(index[&g]);
            }
            debug_assert!(set.contains(i as Id));
            closure.push(set);
        }
        let degree = formulas.iter().map(Formula::degree).collect();
        let top = index.get(&Formula::Top).copied();
        let bot = index.get(&Formula::Bot).copied();
        Universe {
            formulas,
            nodes,
            index,
            closure,
            degree,
            top,
            bot,
        }
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn empty_set(&self) -> IdSet {
        IdSet::empty(self.len())
    }

    pub fn id(&self, f: &Formula) -> Option<Id> {
        self.index.get(f).copied()
    }

    pub fn formula(&self, id: Id) -> &Formula {
        &self.formulas[id as usize]
    }

    pub fn node(&self, id: Id) -> Node {
        self.nodes[id as usize]
    }

    pub fn top(&self) -> Option<Id> {
        self.top
    }

    pub fn bot(&self) -> Option<Id> {
        self.bot
    }

    pub fn closure(&self, id: Id) -> &IdSet {
        &self.closure[id as usize]
    }

    pub fn degree(&self, id: Id) -> usize {
        self.degree[id as usize]
    }

    /// Interns a set of formulas; `None` if some member is foreign.
    pub fn set_of<'a>(&self, fs: impl IntoIterator<Item = &'a Formula>) -> Option<IdSet> {
        let mut out = self.empty_set();
        for f in fs {
            out.insert(self.id(f)?);
        }
        Some(out)
    }

    pub fn formulas_of(&self, set: &IdSet) -> FormulaSet {
        set.iter().map(|i| self.formula(i).clone()).collect()
    }

    /// Subformula closure of a set.
    pub fn sf(&self, set: &IdSet) -> IdSet {
        let mut out = self.empty_set();
        for i in set.iter() {
            out.union_with(self.closure(i));
        }
        out
    }

    /// Sum of degrees over a set of ids.
    pub fn degree_sum(&self, set: &IdSet) -> usize {
        set.iter().map(|i| self.degree(i)).sum()
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.formulas
            .iter()
            .filter_map(|f| match f {
                Formula::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_plain;

    #[test]
    fn bitset_operations() {
        let mut a = IdSet::empty(130);
        assert!(a.is_empty());
        assert!(a.insert(3));
        assert!(!a.insert(3));
        a.insert(129);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![3, 129]);
        let b = IdSet::empty(130).with(3);
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        assert!(a.intersects(&b));
        assert_eq!(a.len(), 2);
        a.remove(3);
        assert!(!a.intersects(&b));
    }

    #[test]
    fn interning_follows_canonical_order() {
        let f = parse_plain("(p -> q) & false").unwrap();
        let u = Universe::new([&f]);
        assert_eq!(u.len(), 5);
        let listed: Vec<&Formula> = (0..u.len() as Id).map(|i| u.formula(i)).collect();
        let mut sorted = listed.clone();
        sorted.sort();
        assert_eq!(listed, sorted);
        let imp = u.id(&parse_plain("p -> q").unwrap()).unwrap();
        assert_eq!(u.closure(imp).len(), 3);
        assert!(u.bot().is_some() && u.top().is_none());
        assert_eq!(u.degree(imp), 1);
    }
}
