//! Formulas over atoms, `true`, `false`, conjunction, disjunction, implication
//! and exclusion (`-<`), together with the structural measures used by the
//! prover: length, degree and subformulae.

use std::collections::BTreeSet;
use std::fmt;

/// A negation-free bi-intuitionistic formula.
///
/// The derived `Ord` is the canonical order used everywhere a set of formulas
/// is iterated: constructor rank first (in declaration order), then children
/// left to right, with atoms compared by name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Excl(Box<Formula>, Box<Formula>),
}

/// Deduplicated set of formulas, iterated in canonical order.
pub type FormulaSet = BTreeSet<Formula>;

/// Binary connectives, in the order the enumerator uses them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    And,
    Or,
    Imp,
    Excl,
}

impl Connective {
    pub const ALL: [Connective; 4] = [
        Connective::And,
        Connective::Or,
        Connective::Imp,
        Connective::Excl,
    ];

    pub fn apply(self, l: Formula, r: Formula) -> Formula {
        match self {
            Connective::And => Formula::and(l, r),
            Connective::Or => Formula::or(l, r),
            Connective::Imp => Formula::imp(l, r),
            Connective::Excl => Formula::excl(l, r),
        }
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn excl(l: Formula, r: Formula) -> Formula {
        Formula::Excl(Box::new(l), Box::new(r))
    }

    /// Intuitionistic negation, `f -> false`.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::imp(f, Formula::Bot)
    }

    /// Dual-intuitionistic negation, `true -< f`.
    pub fn tilde(f: Formula) -> Formula {
        Formula::excl(Formula::Top, f)
    }

    /// The connective and operands of a binary formula.
    pub fn as_binary(&self) -> Option<(Connective, &Formula, &Formula)> {
        match self {
            Formula::And(l, r) => Some((Connective::And, l, r)),
            Formula::Or(l, r) => Some((Connective::Or, l, r)),
            Formula::Imp(l, r) => Some((Connective::Imp, l, r)),
            Formula::Excl(l, r) => Some((Connective::Excl, l, r)),
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.as_binary().is_none()
    }

    /// 1 for atoms, `true` and `false`; children plus one for binary nodes.
    pub fn length(&self) -> usize {
        match self.as_binary() {
            None => 1,
            Some((_, l, r)) => l.length() + r.length() + 1,
        }
    }

    /// Number of `->` and `-<` connectives.
    pub fn degree(&self) -> usize {
        match self.as_binary() {
            None => 0,
            Some((c, l, r)) => {
                let arrow = matches!(c, Connective::Imp | Connective::Excl) as usize;
                l.degree() + r.degree() + arrow
            }
        }
    }

    /// Number of binary connectives.
    pub fn connectives(&self) -> usize {
        match self.as_binary() {
            None => 0,
            Some((_, l, r)) => l.connectives() + r.connectives() + 1,
        }
    }

    pub fn subformulae(&self) -> FormulaSet {
        let mut out = FormulaSet::new();
        self.collect_subformulae(&mut out);
        out
    }

    pub(crate) fn collect_subformulae(&self, out: &mut FormulaSet) {
        if out.contains(self) {
            return;
        }
        if let Some((_, l, r)) = self.as_binary() {
            l.collect_subformulae(out);
            r.collect_subformulae(out);
        }
        out.insert(self.clone());
    }

    /// Atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Top | Formula::Bot => {}
            _ => {
                let (_, l, r) = self.as_binary().unwrap();
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// The order-dual formula: `true`/`false`, `&`/`|` and `->`/`-<` swap,
    /// with the operands of the arrows reversed.
    pub fn dual(&self) -> Formula {
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Top => Formula::Bot,
            Formula::Bot => Formula::Top,
            Formula::And(l, r) => Formula::or(l.dual(), r.dual()),
            Formula::Or(l, r) => Formula::and(l.dual(), r.dual()),
            Formula::Imp(l, r) => Formula::excl(r.dual(), l.dual()),
            Formula::Excl(l, r) => Formula::imp(r.dual(), l.dual()),
        }
    }
}

/// Union of the subformulae of every member.
pub fn subformulae_of_set<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> FormulaSet {
    let mut out = FormulaSet::new();
    for f in fs {
        f.collect_subformulae(&mut out);
    }
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::print_formula(self))
    }
}

/// Leaves available to the enumerator: the atoms followed by `true`, `false`.
fn leaves(atoms: &[String]) -> Vec<Formula> {
    let mut out: Vec<Formula> = atoms.iter().map(|a| Formula::Atom(a.clone())).collect();
    out.push(Formula::Top);
    out.push(Formula::Bot);
    out
}

/// Number of formulas with exactly `connectives` binary nodes over `n_atoms`
/// atoms plus `true` and `false`.
pub fn count_formulas_exact(n_atoms: usize, connectives: usize) -> u128 {
    let leaves = n_atoms as u128 + 2;
    let mut counts: Vec<u128> = vec![leaves];
    for n in 1..=connectives {
        let mut c = 0;
        for i in 0..n {
            c += counts[i] * counts[n - 1 - i];
        }
        counts.push(Connective::ALL.len() as u128 * c);
    }
    counts[connectives]
}

pub fn count_formulas(n_atoms: usize, max_connectives: usize) -> u128 {
    (0..=max_connectives)
        .map(|n| count_formulas_exact(n_atoms, n))
        .sum()
}

/// Every formula over `atoms` with at most `max_connectives` binary
/// connectives, each exactly once, ordered by connective count then by
/// (connective, split point, left operand, right operand).
///
/// Formulas with fewer connectives than the maximum are materialized; the
/// largest size class is produced lazily.
pub fn enumerate_formulas(
    atoms: &[String],
    max_connectives: usize,
) -> impl Iterator<Item = Formula> + '_ {
    let mut by_size: Vec<Vec<Formula>> = vec![leaves(atoms)];
    for n in 1..max_connectives {
        let mut level = Vec::new();
        for c in Connective::ALL {
            for i in 0..n {
                for l in &by_size[i] {
                    for r in &by_size[n - 1 - i] {
                        level.push(c.apply(l.clone(), r.clone()));
                    }
                }
            }
        }
        by_size.push(level);
    }
    let by_size = std::rc::Rc::new(by_size);
    let small: Vec<Formula> = by_size.iter().flatten().cloned().collect();
    let top = max_connectives;
    let lazy: Box<dyn Iterator<Item = Formula>> = if top == 0 {
        Box::new(std::iter::empty())
    } else {
        let by_size = by_size.clone();
        Box::new(Connective::ALL.into_iter().flat_map(move |c| {
            let by_size = by_size.clone();
            (0..top).flat_map(move |i| {
                let by_size = by_size.clone();
                let left_len = by_size[i].len();
                (0..left_len).flat_map(move |li| {
                    let by_size = by_size.clone();
                    let right_len = by_size[top - 1 - i].len();
                    (0..right_len).map(move |ri| {
                        c.apply(by_size[i][li].clone(), by_size[top - 1 - i][ri].clone())
                    })
                })
            })
        }))
    };
    small.into_iter().chain(lazy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }
    fn r() -> Formula {
        Formula::atom("r")
    }

    #[test]
    fn length_examples() {
        assert_eq!(p().length(), 1);
        assert_eq!(Formula::and(p(), q()).length(), 3);
        assert_eq!(Formula::or(Formula::imp(p(), q()), r()).length(), 5);
        assert_eq!(Formula::Top.length(), 1);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(Formula::and(p(), q()).degree(), 0);
        assert_eq!(Formula::imp(p(), q()).degree(), 1);
        assert_eq!(Formula::excl(Formula::imp(p(), q()), r()).degree(), 2);
    }

    #[test]
    fn subformulae_examples() {
        let f = Formula::imp(p(), q());
        let expected: FormulaSet = [p(), q(), f.clone()].into_iter().collect();
        assert_eq!(f.subformulae(), expected);
        assert_eq!(p().subformulae(), [p()].into_iter().collect());
    }

    #[test]
    fn dual_examples() {
        assert_eq!(Formula::and(p(), q()).dual(), Formula::or(p(), q()));
        assert_eq!(Formula::imp(p(), q()).dual(), Formula::excl(q(), p()));
        let f = Formula::or(Formula::imp(p(), q()), Formula::Bot);
        assert_eq!(f.dual().dual(), f);
    }

    /// Independent count: Catalan(n) tree shapes times 4^n connective
    /// labellings times leaves^(n+1) leaf labellings.
    fn closed_form(n_atoms: usize, n: usize) -> u128 {
        let mut catalan: u128 = 1;
        for k in 0..n as u128 {
            catalan = catalan * 2 * (2 * k + 1) / (k + 2);
        }
        catalan * 4u128.pow(n as u32) * (n_atoms as u128 + 2).pow(n as u32 + 1)
    }

    #[test]
    fn enumeration_counts_match_closed_form() {
        for atoms in 1..=3 {
            for n in 0..=5 {
                assert_eq!(count_formulas_exact(atoms, n), closed_form(atoms, n));
            }
        }
        // ({p}, 1): 3 leaves plus 4 connectives over 3 x 3 operand pairs.
        assert_eq!(count_formulas(1, 1), 39);
    }

    #[test]
    fn enumeration_is_exhaustive_and_unique() {
        let atoms = vec!["p".to_string()];
        let zero: Vec<Formula> = enumerate_formulas(&atoms, 0).collect();
        assert_eq!(zero, vec![p(), Formula::Top, Formula::Bot]);

        let one: Vec<Formula> = enumerate_formulas(&atoms, 1).collect();
        assert_eq!(one.len() as u128, count_formulas(1, 1));
        assert!(one.contains(&Formula::imp(p(), p())));
        assert!(one.contains(&Formula::excl(p(), p())));
        assert!(one.contains(&Formula::and(p(), Formula::Top)));

        let atoms = vec!["p".to_string(), "q".to_string()];
        for max in 0..=3 {
            let all: Vec<Formula> = enumerate_formulas(&atoms, max).collect();
            assert_eq!(all.len() as u128, count_formulas(2, max));
            let distinct: HashSet<&Formula> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            assert!(all.iter().all(|f| f.connectives() <= max));
        }
    }

    #[test]
    fn canonical_order_ranks_constructors_first() {
        assert!(p() < Formula::Top);
        assert!(Formula::Bot < Formula::and(p(), p()));
        assert!(Formula::atom("a") < Formula::atom("b"));
        assert!(Formula::imp(p(), q()) < Formula::excl(p(), p()));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
            let leaf = prop_oneof![
                Just(Formula::atom("p")),
                Just(Formula::atom("q")),
                Just(Formula::Top),
                Just(Formula::Bot),
            ];
            leaf.prop_recursive(4, 24, 2, |inner| {
                (0usize..4, inner.clone(), inner)
                    .prop_map(|(c, l, r)| Connective::ALL[c].apply(l, r))
            })
        }

        proptest! {
            #[test]
            fn measures_are_consistent(f in arb_formula()) {
                prop_assert!(f.length() >= 1);
                prop_assert!(f.degree() <= (f.length() - 1) / 2);
                let sf = f.subformulae();
                prop_assert!(sf.contains(&f));
                prop_assert!(sf.len() <= f.length());
            }

            #[test]
            fn dual_is_an_involution(f in arb_formula()) {
                prop_assert_eq!(f.dual().dual(), f.clone());
                prop_assert_eq!(f.dual().degree(), f.degree());
            }
        }
    }
}
