//! Sequents with variables, the rule schemas with their blocking conditions,
//! and variable combination.
//!
//! The public functions work on [`Sequent`] values; the prover uses the
//! indexed form [`Seq`] over a [`Universe`] so that every side is a bit set.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::RuleError;
use crate::formula::{subformulae_of_set, Formula, FormulaSet};
use crate::print::{print_formula, print_set};
use crate::universe::{Id, IdSet, Node, Universe};

/// A plain formula or a variable-derived wrapper. `BigOr(S)` stands for the
/// disjunction over `S` of the conjunction of each member, `BigAnd(P)` for
/// the conjunction over `P` of the disjunction of each member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedFormula {
    Plain(Formula),
    BigOr(BTreeSet<FormulaSet>),
    BigAnd(BTreeSet<FormulaSet>),
}

impl ExtendedFormula {
    pub fn as_plain(&self) -> Option<&Formula> {
        match self {
            ExtendedFormula::Plain(f) => Some(f),
            _ => None,
        }
    }

    /// Subformulae; the wrappers contribute only the subformulae of their
    /// members, not the implicit conjunctions and disjunctions.
    pub fn subformulae(&self) -> FormulaSet {
        match self {
            ExtendedFormula::Plain(f) => f.subformulae(),
            ExtendedFormula::BigOr(fam) | ExtendedFormula::BigAnd(fam) => {
                subformulae_of_set(fam.iter().flatten())
            }
        }
    }

    /// The ordinary formula this wrapper abbreviates. Empty conjunctions are
    /// `true`, empty disjunctions `false`.
    pub fn to_formula(&self) -> Formula {
        fn fold(
            items: impl Iterator<Item = Formula>,
            unit: Formula,
            op: fn(Formula, Formula) -> Formula,
        ) -> Formula {
            items.reduce(op).unwrap_or(unit)
        }
        match self {
            ExtendedFormula::Plain(f) => f.clone(),
            ExtendedFormula::BigOr(fam) => fold(
                fam.iter()
                    .map(|m| fold(m.iter().cloned(), Formula::Top, Formula::and)),
                Formula::Bot,
                Formula::or,
            ),
            ExtendedFormula::BigAnd(fam) => fold(
                fam.iter()
                    .map(|m| fold(m.iter().cloned(), Formula::Bot, Formula::or)),
                Formula::Top,
                Formula::and,
            ),
        }
    }
}

fn print_family(fam: &BTreeSet<FormulaSet>) -> String {
    let members: Vec<String> = fam
        .iter()
        .map(|m| format!("{{{}}}", print_set(m)))
        .collect();
    format!("{{{}}}", members.join(", "))
}

impl fmt::Display for ExtendedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedFormula::Plain(x) => f.write_str(&print_formula(x)),
            ExtendedFormula::BigOr(fam) => write!(f, "\\/{}", print_family(fam)),
            ExtendedFormula::BigAnd(fam) => write!(f, "/\\{}", print_family(fam)),
        }
    }
}

/// Successor variable `s` and predecessor variable `p`, each a set of
/// member sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vars<T: Ord> {
    pub s: BTreeSet<T>,
    pub p: BTreeSet<T>,
}

impl<T: Ord> Default for Vars<T> {
    fn default() -> Self {
        Vars {
            s: BTreeSet::new(),
            p: BTreeSet::new(),
        }
    }
}

impl<T: Ord + Clone> Vars<T> {
    pub fn is_empty(&self) -> bool {
        self.s.is_empty() && self.p.is_empty()
    }

    pub fn single(s: T, p: T) -> Self {
        Vars {
            s: BTreeSet::from([s]),
            p: BTreeSet::from([p]),
        }
    }

    pub fn union_with(&mut self, other: &Vars<T>) {
        self.s.extend(other.s.iter().cloned());
        self.p.extend(other.p.iter().cloned());
    }
}

pub type VarSets = Vars<FormulaSet>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub lhs: BTreeSet<ExtendedFormula>,
    pub rhs: BTreeSet<ExtendedFormula>,
    pub vars: VarSets,
}

impl Sequent {
    pub fn new(
        lhs: impl IntoIterator<Item = ExtendedFormula>,
        rhs: impl IntoIterator<Item = ExtendedFormula>,
    ) -> Sequent {
        Sequent {
            lhs: lhs.into_iter().collect(),
            rhs: rhs.into_iter().collect(),
            vars: VarSets::default(),
        }
    }

    pub fn from_formulas(
        lhs: impl IntoIterator<Item = Formula>,
        rhs: impl IntoIterator<Item = Formula>,
    ) -> Sequent {
        Sequent::new(
            lhs.into_iter().map(ExtendedFormula::Plain),
            rhs.into_iter().map(ExtendedFormula::Plain),
        )
    }

    pub fn is_plain(&self) -> bool {
        self.lhs
            .iter()
            .chain(&self.rhs)
            .all(|f| f.as_plain().is_some())
    }

    pub fn plain_lhs(&self) -> FormulaSet {
        self.lhs
            .iter()
            .filter_map(|f| f.as_plain().cloned())
            .collect()
    }

    pub fn plain_rhs(&self) -> FormulaSet {
        self.rhs
            .iter()
            .filter_map(|f| f.as_plain().cloned())
            .collect()
    }

    pub fn subformulae(&self) -> FormulaSet {
        let mut out = FormulaSet::new();
        for f in self.lhs.iter().chain(&self.rhs) {
            out.extend(f.subformulae());
        }
        out
    }

    /// Every plain formula and wrapper member mentioned by the sequent.
    fn mentioned(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        for f in self.lhs.iter().chain(&self.rhs) {
            match f {
                ExtendedFormula::Plain(x) => out.push(x),
                ExtendedFormula::BigOr(fam) | ExtendedFormula::BigAnd(fam) => {
                    out.extend(fam.iter().flatten())
                }
            }
        }
        out
    }

    /// Atoms occurring in the formulas of the sequent.
    pub fn atoms(&self) -> BTreeSet<String> {
        self.subformulae()
            .iter()
            .filter_map(|f| match f {
                Formula::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn universe(&self) -> Universe {
        Universe::new(self.mentioned())
    }

    /// Swaps the sides and dualizes every formula.
    pub fn dual(&self) -> Sequent {
        let d = |side: &BTreeSet<ExtendedFormula>| -> BTreeSet<ExtendedFormula> {
            side.iter()
                .map(|f| match f {
                    ExtendedFormula::Plain(x) => ExtendedFormula::Plain(x.dual()),
                    ExtendedFormula::BigOr(fam) => ExtendedFormula::BigAnd(dual_family(fam)),
                    ExtendedFormula::BigAnd(fam) => ExtendedFormula::BigOr(dual_family(fam)),
                })
                .collect()
        };
        Sequent {
            lhs: d(&self.rhs),
            rhs: d(&self.lhs),
            vars: Vars {
                s: dual_family(&self.vars.p),
                p: dual_family(&self.vars.s),
            },
        }
    }
}

fn dual_family(fam: &BTreeSet<FormulaSet>) -> BTreeSet<FormulaSet> {
    fam.iter()
        .map(|m| m.iter().map(Formula::dual).collect())
        .collect()
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &BTreeSet<ExtendedFormula>| {
            s.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let (l, r) = (side(&self.lhs), side(&self.rhs));
        match (l.is_empty(), r.is_empty()) {
            (true, true) => f.write_str("|-"),
            (true, false) => write!(f, "|- {r}"),
            (false, true) => write!(f, "{l} |-"),
            (false, false) => write!(f, "{l} |- {r}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    Id,
    BotL,
    TopR,
    AndL,
    AndR,
    OrL,
    OrR,
    ImpL,
    ExclR,
    ImpRI,
    ExclLI,
    ImpR,
    ExclL,
    BigAndR,
    BigOrL,
    Ret,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branching {
    Leaf,
    Universal,
    Existential,
}

impl RuleId {
    pub const STATIC: [RuleId; 8] = [
        RuleId::AndL,
        RuleId::OrR,
        RuleId::ImpRI,
        RuleId::ExclLI,
        RuleId::OrL,
        RuleId::AndR,
        RuleId::ImpL,
        RuleId::ExclR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Id => "Id",
            RuleId::BotL => "BotL",
            RuleId::TopR => "TopR",
            RuleId::AndL => "AndL",
            RuleId::AndR => "AndR",
            RuleId::OrL => "OrL",
            RuleId::OrR => "OrR",
            RuleId::ImpL => "ImpL",
            RuleId::ExclR => "ExclR",
            RuleId::ImpRI => "ImpRI",
            RuleId::ExclLI => "ExclLI",
            RuleId::ImpR => "ImpR",
            RuleId::ExclL => "ExclL",
            RuleId::BigAndR => "BigAndR",
            RuleId::BigOrL => "BigOrL",
            RuleId::Ret => "Ret",
        }
    }

    pub fn from_name(name: &str) -> Option<RuleId> {
        use RuleId::*;
        [
            Id, BotL, TopR, AndL, AndR, OrL, OrR, ImpL, ExclR, ImpRI, ExclLI, ImpR, ExclL, BigAndR,
            BigOrL, Ret,
        ]
        .into_iter()
        .find(|r| r.name() == name)
    }

    pub fn branching(self) -> Branching {
        match self {
            RuleId::Id | RuleId::BotL | RuleId::TopR | RuleId::Ret => Branching::Leaf,
            RuleId::ImpR | RuleId::ExclL => Branching::Existential,
            _ => Branching::Universal,
        }
    }

    pub fn is_axiom(self) -> bool {
        matches!(self, RuleId::Id | RuleId::BotL | RuleId::TopR)
    }

    pub fn is_static(self) -> bool {
        self.is_axiom() || RuleId::STATIC.contains(&self)
    }

    pub fn is_transitional(self) -> bool {
        matches!(self, RuleId::ImpR | RuleId::ExclL)
    }

    pub fn is_special(self) -> bool {
        matches!(self, RuleId::BigAndR | RuleId::BigOrL)
    }

    /// Static rules with a single premise.
    pub fn is_non_branching(self) -> bool {
        matches!(
            self,
            RuleId::AndL | RuleId::OrR | RuleId::ImpRI | RuleId::ExclLI
        )
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub principal: Option<ExtendedFormula>,
}

impl RuleInstance {
    pub fn new(rule: RuleId, principal: Option<ExtendedFormula>) -> RuleInstance {
        RuleInstance { rule, principal }
    }

    pub fn branching(&self) -> Branching {
        self.rule.branching()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Derivable,
    Open,
}

impl Status {
    pub fn is_derivable(self) -> bool {
        self == Status::Derivable
    }
}

/// Deliberately broken rule schemas, used to check that the fuzz harness
/// notices an unsound or incomplete calculus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleMutation {
    /// OrL keeps only its first premise (unsound).
    OrLDropsSecondPremise,
    /// ImpR's left premise keeps the context of the right hand side
    /// (unsound).
    ImpRKeepsContext,
    /// AndR drops its principal formula from both premises. This is the
    /// abbreviated form used when writing derivations out by hand; it is
    /// sound and only used to replay such derivations literally.
    AndRDropsPrincipal,
}

// ---------------------------------------------------------------------------
// Indexed engine.

pub(crate) type Family = BTreeSet<IdSet>;
pub(crate) type IVars = Vars<IdSet>;

/// Sequent over a universe. At most one `BigOr` on the left and one
/// `BigAnd` on the right exist at any time.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Seq {
    pub lhs: IdSet,
    pub rhs: IdSet,
    pub big_or: Option<Family>,
    pub big_and: Option<Family>,
}

impl Seq {
    pub fn plain(lhs: IdSet, rhs: IdSet) -> Seq {
        Seq {
            lhs,
            rhs,
            big_or: None,
            big_and: None,
        }
    }

    pub fn from_public(u: &Universe, s: &Sequent) -> Result<Seq, String> {
        let mut seq = Seq::plain(u.empty_set(), u.empty_set());
        let fam = |fam: &BTreeSet<FormulaSet>| -> Result<Family, String> {
            fam.iter()
                .map(|m| {
                    u.set_of(m)
                        .ok_or_else(|| "member outside universe".to_string())
                })
                .collect()
        };
        for f in &s.lhs {
            match f {
                ExtendedFormula::Plain(x) => {
                    seq.lhs.insert(u.id(x).ok_or("formula outside universe")?);
                }
                ExtendedFormula::BigOr(m) if seq.big_or.is_none() => seq.big_or = Some(fam(m)?),
                ExtendedFormula::BigOr(_) => return Err("more than one \\/ on the left".into()),
                ExtendedFormula::BigAnd(_) => return Err("/\\ on the left".into()),
            }
        }
        for f in &s.rhs {
            match f {
                ExtendedFormula::Plain(x) => {
                    seq.rhs.insert(u.id(x).ok_or("formula outside universe")?);
                }
                ExtendedFormula::BigAnd(m) if seq.big_and.is_none() => seq.big_and = Some(fam(m)?),
                ExtendedFormula::BigAnd(_) => return Err("more than one /\\ on the right".into()),
                ExtendedFormula::BigOr(_) => return Err("\\/ on the right".into()),
            }
        }
        Ok(seq)
    }

    pub fn to_public(&self, u: &Universe, vars: &IVars) -> Sequent {
        let plain = |set: &IdSet| {
            set.iter()
                .map(|i| ExtendedFormula::Plain(u.formula(i).clone()))
                .collect::<Vec<_>>()
        };
        let fam = |f: &Family| f.iter().map(|m| u.formulas_of(m)).collect::<BTreeSet<_>>();
        let mut lhs = plain(&self.lhs);
        if let Some(s) = &self.big_or {
            lhs.push(ExtendedFormula::BigOr(fam(s)));
        }
        let mut rhs = plain(&self.rhs);
        if let Some(p) = &self.big_and {
            rhs.push(ExtendedFormula::BigAnd(fam(p)));
        }
        let mut out = Sequent::new(lhs, rhs);
        out.vars = Vars {
            s: fam(&vars.s),
            p: fam(&vars.p),
        };
        out
    }

    /// Subformula closure, wrapper members included.
    pub fn sf(&self, u: &Universe) -> IdSet {
        let mut all = self.lhs.union(&self.rhs);
        for fam in self.big_or.iter().chain(&self.big_and) {
            for m in fam {
                all.union_with(m);
            }
        }
        u.sf(&all)
    }

    /// Sum of the degrees of all subformulae.
    pub fn degree(&self, u: &Universe) -> usize {
        u.degree_sum(&self.sf(u))
    }

    /// Size pair for the lexicographic LEN order; wrappers count as one
    /// formula each.
    pub fn len_measure(&self) -> (usize, usize) {
        (
            self.lhs.len() + self.big_or.is_some() as usize,
            self.rhs.len() + self.big_and.is_some() as usize,
        )
    }

    fn adds_something(&self, premise: &Seq) -> bool {
        !premise.lhs.is_subset(&self.lhs)
            || !premise.rhs.is_subset(&self.rhs)
            || (premise.big_or.is_some() && premise.big_or != self.big_or)
            || (premise.big_and.is_some() && premise.big_and != self.big_and)
    }
}

/// The first closing axiom, checked in the order Id, BotL, TopR.
pub(crate) fn axiom(u: &Universe, seq: &Seq) -> Option<RuleId> {
    if seq.lhs.intersects(&seq.rhs) {
        Some(RuleId::Id)
    } else if u.bot().is_some_and(|b| seq.lhs.contains(b)) {
        Some(RuleId::BotL)
    } else if u.top().is_some_and(|t| seq.rhs.contains(t)) {
        Some(RuleId::TopR)
    } else {
        None
    }
}

fn add_l(seq: &Seq, ids: &[Id]) -> Seq {
    let mut out = seq.clone();
    for &i in ids {
        out.lhs.insert(i);
    }
    out
}

fn add_r(seq: &Seq, ids: &[Id]) -> Seq {
    let mut out = seq.clone();
    for &i in ids {
        out.rhs.insert(i);
    }
    out
}

/// Premises of a static rule applied to the formula `id`, ignoring
/// blocking; `None` if the formula does not fit the rule.
pub(crate) fn static_premises(
    u: &Universe,
    rule: RuleId,
    id: Id,
    seq: &Seq,
    mutation: Option<RuleMutation>,
) -> Option<Vec<Seq>> {
    let in_l = seq.lhs.contains(id);
    let in_r = seq.rhs.contains(id);
    Some(match (rule, u.node(id)) {
        (RuleId::AndL, Node::And(a, b)) if in_l => vec![add_l(seq, &[a, b])],
        (RuleId::OrR, Node::Or(a, b)) if in_r => vec![add_r(seq, &[a, b])],
        (RuleId::AndR, Node::And(a, b)) if in_r => {
            let mut ps = vec![add_r(seq, &[a]), add_r(seq, &[b])];
            if mutation == Some(RuleMutation::AndRDropsPrincipal) {
                ps.iter_mut().for_each(|p| p.rhs.remove(id));
            }
            ps
        }
        (RuleId::OrL, Node::Or(a, _))
            if in_l && mutation == Some(RuleMutation::OrLDropsSecondPremise) =>
        {
            vec![add_l(seq, &[a])]
        }
        (RuleId::OrL, Node::Or(a, b)) if in_l => vec![add_l(seq, &[a]), add_l(seq, &[b])],
        (RuleId::ImpL, Node::Imp(a, b)) if in_l => vec![add_r(seq, &[a]), add_l(seq, &[b])],
        (RuleId::ExclR, Node::Excl(a, b)) if in_r => vec![add_l(seq, &[b]), add_r(seq, &[a])],
        (RuleId::ImpRI, Node::Imp(_, b)) if in_r => vec![add_r(seq, &[b])],
        (RuleId::ExclLI, Node::Excl(a, _)) if in_l => vec![add_l(seq, &[a])],
        _ => return None,
    })
}

/// Premises of a static rule if the blocking condition lets it fire: every
/// premise must add a formula to one of its sides.
pub(crate) fn unblocked_static(
    u: &Universe,
    rule: RuleId,
    id: Id,
    seq: &Seq,
    mutation: Option<RuleMutation>,
) -> Option<Vec<Seq>> {
    let premises = static_premises(u, rule, id, seq, mutation)?;
    premises
        .iter()
        .all(|p| seq.adds_something(p))
        .then_some(premises)
}

/// Left premise of ImpR (on `id` in the right side) or ExclL (on `id` in
/// the left side), ignoring blocking.
pub(crate) fn transitional_left(
    u: &Universe,
    rule: RuleId,
    id: Id,
    seq: &Seq,
    mutation: Option<RuleMutation>,
) -> Option<Seq> {
    match (rule, u.node(id)) {
        (RuleId::ImpR, Node::Imp(a, b)) if seq.rhs.contains(id) => {
            let rhs = if mutation == Some(RuleMutation::ImpRKeepsContext) {
                seq.rhs.with(b)
            } else {
                u.empty_set().with(b)
            };
            Some(Seq::plain(seq.lhs.with(a), rhs))
        }
        (RuleId::ExclL, Node::Excl(a, b)) if seq.lhs.contains(id) => {
            Some(Seq::plain(u.empty_set().with(a), seq.rhs.with(b)))
        }
        _ => None,
    }
}

/// The left premise of an existential rule, if it differs from the
/// conclusion.
pub(crate) fn unblocked_transitional(
    u: &Universe,
    rule: RuleId,
    id: Id,
    seq: &Seq,
    mutation: Option<RuleMutation>,
) -> Option<Seq> {
    let left = transitional_left(u, rule, id, seq, mutation)?;
    seq.adds_something(&left).then_some(left)
}

/// The right premise of ImpR/ExclL, created only if the returned family is
/// nonempty and each of its members brings something new to the relevant
/// side (principal included).
pub(crate) fn transitional_right(
    rule: RuleId,
    id: Id,
    seq: &Seq,
    left_vars: &IVars,
) -> Option<Seq> {
    match rule {
        RuleId::ImpR => {
            let side = seq.rhs.with(id);
            let fam = &left_vars.p;
            (!fam.is_empty() && fam.iter().all(|m| !m.is_subset(&side))).then(|| Seq {
                big_and: Some(fam.clone()),
                ..seq.clone()
            })
        }
        RuleId::ExclL => {
            let side = seq.lhs.with(id);
            let fam = &left_vars.s;
            (!fam.is_empty() && fam.iter().all(|m| !m.is_subset(&side))).then(|| Seq {
                big_or: Some(fam.clone()),
                ..seq.clone()
            })
        }
        _ => None,
    }
}

/// BigAndR / BigOrL premises: one per member, wrapper removed.
pub(crate) fn special_premises(rule: RuleId, seq: &Seq) -> Option<Vec<Seq>> {
    match rule {
        RuleId::BigAndR => {
            let fam = seq.big_and.as_ref()?;
            Some(
                fam.iter()
                    .map(|m| Seq {
                        rhs: seq.rhs.union(m),
                        big_and: None,
                        ..seq.clone()
                    })
                    .collect(),
            )
        }
        RuleId::BigOrL => {
            let fam = seq.big_or.as_ref()?;
            Some(
                fam.iter()
                    .map(|m| Seq {
                        lhs: seq.lhs.union(m),
                        big_or: None,
                        ..seq.clone()
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}

/// Derivability of a conclusion from the statuses of its premises.
pub fn combine_status(rule: RuleId, premises: &[Status]) -> Status {
    let ok = match rule.branching() {
        Branching::Leaf => rule.is_axiom(),
        Branching::Universal => premises.iter().all(|s| s.is_derivable()),
        Branching::Existential => premises.iter().any(|s| s.is_derivable()),
    };
    if ok {
        Status::Derivable
    } else {
        Status::Open
    }
}

/// Variables assigned at a conclusion from its premises' results.
///
/// For ImpR/ExclL, `results` holds the left premise and, when it was
/// created, the right premise; a missing right premise assigns the
/// conclusion's own sides.
pub fn combine_vars_with<T: Ord + Clone>(
    rule: RuleId,
    results: &[(Status, Vars<T>)],
    own_lhs: impl FnOnce() -> T,
    own_rhs: impl FnOnce() -> T,
) -> Vars<T> {
    let statuses: Vec<Status> = results.iter().map(|(s, _)| *s).collect();
    if combine_status(rule, &statuses).is_derivable() {
        return Vars::default();
    }
    match rule {
        RuleId::Ret => Vars::single(own_lhs(), own_rhs()),
        RuleId::Id | RuleId::BotL | RuleId::TopR => Vars::default(),
        RuleId::ImpR | RuleId::ExclL => match results {
            [_, (_, right)] => right.clone(),
            _ => Vars::single(own_lhs(), own_rhs()),
        },
        _ => {
            let mut out = Vars::default();
            for (status, vars) in results {
                if !status.is_derivable() {
                    out.union_with(vars);
                }
            }
            out
        }
    }
}

// ---------------------------------------------------------------------------
// Public schema functions.

fn principal_id(u: &Universe, inst: &RuleInstance) -> Result<Option<Id>, RuleError> {
    match &inst.principal {
        Some(ExtendedFormula::Plain(f)) => Ok(u.id(f)),
        _ => Ok(None),
    }
}

fn not_applicable(rule: RuleId, reason: impl Into<String>) -> RuleError {
    RuleError::NotApplicable {
        rule: rule.name(),
        reason: reason.into(),
    }
}

/// Whether `rule` may fire on `gamma` with the given principal under the
/// blocking conditions. Axioms and Ret take no principal.
pub fn applicable(rule: RuleId, gamma: &Sequent, principal: Option<&ExtendedFormula>) -> bool {
    let inst = RuleInstance::new(rule, principal.cloned());
    premises(&inst, gamma).is_ok()
}

/// Premises of a rule instance. For ImpR/ExclL only the left premise is
/// returned; see [`right_premise`].
pub fn premises(inst: &RuleInstance, gamma: &Sequent) -> Result<Vec<Sequent>, RuleError> {
    premises_with(inst, gamma, None)
}

pub fn premises_with(
    inst: &RuleInstance,
    gamma: &Sequent,
    mutation: Option<RuleMutation>,
) -> Result<Vec<Sequent>, RuleError> {
    let rule = inst.rule;
    let u = gamma.universe();
    let seq = Seq::from_public(&u, gamma).map_err(|e| not_applicable(rule, e))?;
    let empty = IVars::default();
    let out = |ps: Vec<Seq>| ps.iter().map(|p| p.to_public(&u, &empty)).collect();
    match rule {
        RuleId::Id | RuleId::BotL | RuleId::TopR => {
            let holds = match rule {
                RuleId::Id => seq.lhs.intersects(&seq.rhs),
                RuleId::BotL => u.bot().is_some_and(|b| seq.lhs.contains(b)),
                _ => u.top().is_some_and(|t| seq.rhs.contains(t)),
            };
            if holds {
                Ok(vec![])
            } else {
                Err(not_applicable(rule, "axiom condition fails"))
            }
        }
        RuleId::Ret => Ok(vec![]),
        RuleId::BigAndR | RuleId::BigOrL => {
            let wanted = matches!(
                (&inst.principal, rule),
                (Some(ExtendedFormula::BigAnd(_)), RuleId::BigAndR)
                    | (Some(ExtendedFormula::BigOr(_)), RuleId::BigOrL)
                    | (None, _)
            );
            match special_premises(rule, &seq) {
                Some(ps) if wanted => Ok(out(ps)),
                _ => Err(not_applicable(rule, "no matching extended formula")),
            }
        }
        RuleId::ImpR | RuleId::ExclL => {
            let id = principal_id(&u, inst)?.ok_or_else(|| not_applicable(rule, "no principal"))?;
            transitional_left(&u, rule, id, &seq, mutation)
                .ok_or_else(|| not_applicable(rule, "principal does not match"))
                .and_then(|left| {
                    if seq.adds_something(&left) {
                        Ok(out(vec![left]))
                    } else {
                        Err(not_applicable(rule, "blocked: left premise adds nothing"))
                    }
                })
        }
        _ => {
            let id = principal_id(&u, inst)?.ok_or_else(|| not_applicable(rule, "no principal"))?;
            let ps = static_premises(&u, rule, id, &seq, mutation)
                .ok_or_else(|| not_applicable(rule, "principal does not match"))?;
            if ps.iter().all(|p| seq.adds_something(p)) {
                Ok(out(ps))
            } else {
                Err(not_applicable(rule, "blocked: some premise adds nothing"))
            }
        }
    }
}

/// The right premise of ImpR/ExclL given the variables returned by the left
/// premise, or `None` when the creation condition fails.
pub fn right_premise(inst: &RuleInstance, gamma: &Sequent, left: &VarSets) -> Option<Sequent> {
    let mut mentioned = gamma.clone();
    for m in left.s.iter().chain(&left.p) {
        mentioned
            .lhs
            .extend(m.iter().cloned().map(ExtendedFormula::Plain));
    }
    let u = mentioned.universe();
    let seq = Seq::from_public(&u, gamma).ok()?;
    let id = principal_id(&u, inst).ok()??;
    let fam =
        |f: &BTreeSet<FormulaSet>| -> Family { f.iter().filter_map(|m| u.set_of(m)).collect() };
    let vars = Vars {
        s: fam(&left.s),
        p: fam(&left.p),
    };
    transitional_right(inst.rule, id, &seq, &vars).map(|r| r.to_public(&u, &IVars::default()))
}

/// Variable assignment at `gamma` for a rule given its premises' results.
pub fn combine_vars(rule: RuleId, results: &[(Status, VarSets)], gamma: &Sequent) -> VarSets {
    combine_vars_with(rule, results, || gamma.plain_lhs(), || gamma.plain_rhs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_plain, parse_sequent};

    fn f(s: &str) -> Formula {
        parse_plain(s).unwrap()
    }

    fn set(items: &[&str]) -> FormulaSet {
        items.iter().map(|s| f(s)).collect()
    }

    fn plain(s: &str) -> ExtendedFormula {
        ExtendedFormula::Plain(f(s))
    }

    #[test]
    fn imp_right_left_premise_drops_context() {
        let gamma = parse_sequent("p |- q, r -> ((p -< q) & r), (p -< q) & r").unwrap();
        let inst = RuleInstance::new(RuleId::ImpR, Some(plain("r -> ((p -< q) & r)")));
        assert_eq!(inst.branching(), Branching::Existential);
        let ps = premises(&inst, &gamma).unwrap();
        assert_eq!(ps, vec![parse_sequent("p, r |- (p -< q) & r").unwrap()]);
    }

    #[test]
    fn big_and_right_is_unary_for_single_member() {
        let x = f("r -> ((p -< q) & r)");
        let fam = BTreeSet::from([set(&["p -< q"])]);
        let gamma = Sequent::new(
            [plain("p")],
            [
                plain("q"),
                ExtendedFormula::Plain(x.clone()),
                ExtendedFormula::BigAnd(fam.clone()),
            ],
        );
        let inst = RuleInstance::new(RuleId::BigAndR, Some(ExtendedFormula::BigAnd(fam)));
        let ps = premises(&inst, &gamma).unwrap();
        assert_eq!(
            ps,
            vec![parse_sequent("p |- q, r -> ((p -< q) & r), p -< q").unwrap()]
        );
    }

    #[test]
    fn big_and_right_splits_members() {
        let fam = BTreeSet::from([set(&["true -< p"]), set(&["true -< q"])]);
        let x = plain("((true -< p) & (true -< q)) -> false");
        let gamma = Sequent::new([], [plain("p"), x, ExtendedFormula::BigAnd(fam.clone())]);
        let ps = premises(&RuleInstance::new(RuleId::BigAndR, None), &gamma).unwrap();
        assert_eq!(ps.len(), 2);
        assert!(ps[0].rhs.contains(&plain("true -< p")));
        assert!(ps[1].rhs.contains(&plain("true -< q")));
        assert!(ps.iter().all(|s| s.is_plain()));
    }

    #[test]
    fn blocking_conditions() {
        let gamma = parse_sequent("p |- p & q").unwrap();
        // Only AndR's second premise would be new... it's the first premise
        // that repeats `p` on the right? No: `p` is on the left, so both add.
        assert!(applicable(RuleId::AndR, &gamma, Some(&plain("p & q"))));
        let gamma = parse_sequent("|- p & q, p").unwrap();
        assert!(!applicable(RuleId::AndR, &gamma, Some(&plain("p & q"))));
        let gamma = parse_sequent("p, r, q |- p -< q").unwrap();
        assert!(!applicable(RuleId::ExclR, &gamma, Some(&plain("p -< q"))));
        let gamma = parse_sequent("p, q |- q, r -> ((p -< q) & r)").unwrap();
        assert!(applicable(RuleId::Id, &gamma, None));
        assert!(!applicable(RuleId::BotL, &gamma, None));
        let gamma = parse_sequent("p |- p -> q, q").unwrap();
        assert!(!applicable(RuleId::ImpR, &gamma, Some(&plain("p -> q"))));
        assert!(!applicable(RuleId::ImpRI, &gamma, Some(&plain("p -> q"))));
        let gamma = parse_sequent("|- p -> q").unwrap();
        assert!(applicable(RuleId::ImpRI, &gamma, Some(&plain("p -> q"))));
        assert!(!applicable(RuleId::ImpL, &gamma, Some(&plain("p -> q"))));
    }

    #[test]
    fn static_premise_shapes() {
        let gamma = parse_sequent("p -> q |- r").unwrap();
        let ps = premises(
            &RuleInstance::new(RuleId::ImpL, Some(plain("p -> q"))),
            &gamma,
        )
        .unwrap();
        assert_eq!(
            ps,
            vec![
                parse_sequent("p -> q |- r, p").unwrap(),
                parse_sequent("p -> q, q |- r").unwrap()
            ]
        );
        let gamma = parse_sequent("r |- p -< q").unwrap();
        let ps = premises(
            &RuleInstance::new(RuleId::ExclR, Some(plain("p -< q"))),
            &gamma,
        )
        .unwrap();
        assert_eq!(
            ps,
            vec![
                parse_sequent("r, q |- p -< q").unwrap(),
                parse_sequent("r |- p -< q, p").unwrap()
            ]
        );
        let gamma = parse_sequent("p -< q |- r").unwrap();
        let ps = premises(
            &RuleInstance::new(RuleId::ExclLI, Some(plain("p -< q"))),
            &gamma,
        )
        .unwrap();
        assert_eq!(ps, vec![parse_sequent("p -< q, p |- r").unwrap()]);
        let ps = premises(
            &RuleInstance::new(RuleId::ExclL, Some(plain("p -< q"))),
            &gamma,
        )
        .unwrap();
        assert_eq!(ps, vec![parse_sequent("p |- q, r").unwrap()]);
    }

    #[test]
    fn right_premise_creation_condition() {
        let gamma = parse_sequent("p |- q, r -> ((p -< q) & r), (p -< q) & r").unwrap();
        let inst = RuleInstance::new(RuleId::ImpR, Some(plain("r -> ((p -< q) & r)")));
        let left = VarSets {
            s: BTreeSet::from([set(&["p", "r", "q"])]),
            p: BTreeSet::from([set(&["p -< q"])]),
        };
        let right = right_premise(&inst, &gamma, &left).unwrap();
        assert!(right
            .rhs
            .contains(&ExtendedFormula::BigAnd(BTreeSet::from([set(&["p -< q"])]))));
        let stale = VarSets {
            s: BTreeSet::new(),
            p: BTreeSet::from([set(&["q"])]),
        };
        assert!(right_premise(&inst, &gamma, &stale).is_none());
        assert!(right_premise(&inst, &gamma, &VarSets::default()).is_none());
    }

    #[test]
    fn variable_combination() {
        let leaf = parse_sequent("p, r, q |- p -< q").unwrap();
        let v = combine_vars(RuleId::Ret, &[], &leaf);
        assert_eq!(v.s, BTreeSet::from([set(&["p", "r", "q"])]));
        assert_eq!(v.p, BTreeSet::from([set(&["p -< q"])]));

        let one = VarSets {
            s: BTreeSet::from([set(&["x"])]),
            p: BTreeSet::from([set(&["true -< p"])]),
        };
        let two = VarSets {
            s: BTreeSet::from([set(&["x"])]),
            p: BTreeSet::from([set(&["true -< q"])]),
        };
        let gamma = parse_sequent("x |- false, y").unwrap();
        let v = combine_vars(
            RuleId::AndR,
            &[(Status::Open, one.clone()), (Status::Open, two)],
            &gamma,
        );
        assert_eq!(
            v.p,
            BTreeSet::from([set(&["true -< p"]), set(&["true -< q"])])
        );
        assert_eq!(v.s.len(), 1);

        let q = VarSets {
            s: BTreeSet::from([set(&["q"])]),
            p: BTreeSet::new(),
        };
        let v = combine_vars(
            RuleId::OrL,
            &[
                (Status::Derivable, VarSets::default()),
                (Status::Open, q.clone()),
            ],
            &gamma,
        );
        assert_eq!(v, q);

        let v = combine_vars(RuleId::Id, &[], &gamma);
        assert!(v.is_empty());
        // Existential rule without a right premise falls back to its own sides.
        let v = combine_vars(RuleId::ImpR, &[(Status::Open, one.clone())], &gamma);
        assert_eq!(v, VarSets::single(set(&["x"]), set(&["false", "y"])));
        let v = combine_vars(
            RuleId::ImpR,
            &[(Status::Open, one.clone()), (Status::Open, q.clone())],
            &gamma,
        );
        assert_eq!(v, q);
        let v = combine_vars(
            RuleId::ImpR,
            &[(Status::Open, one), (Status::Derivable, VarSets::default())],
            &gamma,
        );
        assert!(v.is_empty());
    }

    #[test]
    fn extended_formula_semantics_helpers() {
        let fam = BTreeSet::from([set(&["p -< q"])]);
        let e = ExtendedFormula::BigAnd(fam);
        assert_eq!(e.subformulae(), set(&["p", "q", "p -< q"]));
        assert_eq!(e.to_formula(), f("p -< q"));
        assert_eq!(e.to_string(), "/\\{{p -< q}}");
    }

    #[test]
    fn dual_sequent_swaps_sides() {
        let s = parse_sequent("p -> q |- r & p").unwrap();
        assert_eq!(s.dual(), parse_sequent("r | p |- q -< p").unwrap());
        assert_eq!(s.dual().dual(), s);
    }
}
