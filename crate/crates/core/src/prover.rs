//! Backward proof search.
//!
//! Rule priority at a node: axioms, then BigAndR/BigOrL, then the
//! non-branching static rules, then the branching static rules, each on the
//! least principal formula. Only when no static rule fires are the
//! transitional instances tried, every ImpR before every ExclL. A node where
//! nothing fires is a Ret leaf.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::ProveError;
use crate::formula::Formula;
use crate::sequent::{
    axiom, combine_status, combine_vars_with, special_premises, transitional_right,
    unblocked_static, unblocked_transitional, Branching, ExtendedFormula, IVars, RuleId,
    RuleMutation, Seq, Sequent, Status, VarSets, Vars,
};
use crate::universe::{Id, Node, Universe};

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// How the variables of an open node are formed when several transitional
/// instances were tried and none succeeded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TransitionalVars {
    /// Union of the variables of every instance.
    #[default]
    Union,
    /// Variables of the first instance whose right premise was created;
    /// the node's own sides if there is none.
    FirstCreated,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub budget: usize,
    /// Build a [`DerivationNode`] tree. Off for bulk runs.
    pub record: bool,
    /// Keep the failed transitional instances in the tree as well.
    pub trace: bool,
    pub transitional_vars: TransitionalVars,
    pub mutation: Option<RuleMutation>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            budget: DEFAULT_BUDGET,
            record: true,
            trace: false,
            transitional_vars: TransitionalVars::default(),
            mutation: None,
        }
    }
}

impl Config {
    pub fn quiet() -> Config {
        Config {
            record: false,
            ..Config::default()
        }
    }
}

/// A broken termination or variable invariant, found while searching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// A premise has a larger sequent degree than its conclusion.
    DegreeIncrease {
        rule: RuleId,
        from: usize,
        to: usize,
    },
    /// Two left premises of the same transitional rule with one of the other
    /// kind between them, where the later is not of smaller degree than the
    /// conclusion of the earlier.
    NoDegreeDecrease { conclusion: usize, later: usize },
    /// A premise not larger than its conclusion in the LEN order.
    LenNotIncreasing { rule: RuleId },
    /// A derivable node returned nonempty variables.
    DerivableWithVars,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegreeIncrease { rule, from, to } => {
                write!(f, "{rule} raised the sequent degree from {from} to {to}")
            }
            Violation::NoDegreeDecrease { conclusion, later } => write!(
                f,
                "interleaved transitional premises: degree {later} not below {conclusion}"
            ),
            Violation::LenNotIncreasing { rule } => {
                write!(f, "{rule} produced a premise not larger in LEN order")
            }
            Violation::DerivableWithVars => f.write_str("derivable node with nonempty variables"),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SearchStats {
    pub nodes_expanded: usize,
    pub max_depth: usize,
    pub transitional_interleavings: usize,
    /// Sequent degree at each left premise of a transitional rule.
    pub degree_trace: Vec<usize>,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationNode {
    pub sequent: Sequent,
    pub rule: RuleId,
    pub principal: Option<ExtendedFormula>,
    pub branching: Branching,
    pub premises: Vec<DerivationNode>,
    pub status: Status,
    pub vars_out: VarSets,
    /// Transitional instances tried at this node besides the one shown,
    /// recorded only when tracing.
    pub alternatives: Vec<DerivationNode>,
}

impl DerivationNode {
    /// Pre-order walk over the node and its premises (alternatives
    /// included).
    pub fn walk(&self) -> Vec<&DerivationNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            for p in n.alternatives.iter().rev().chain(n.premises.iter().rev()) {
                stack.push(p);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Proof {
    pub status: Status,
    pub vars: VarSets,
    pub root: Option<DerivationNode>,
    pub stats: SearchStats,
}

impl Proof {
    pub fn is_derivable(&self) -> bool {
        self.status.is_derivable()
    }
}

/// Searches for a derivation of a sequent with plain formulas.
pub fn prove(seq: &Sequent, cfg: &Config) -> Result<Proof, ProveError> {
    if !seq.is_plain() {
        return Err(ProveError::ExtendedRoot);
    }
    let u = Arc::new(seq.universe());
    let root = Seq::from_public(&u, seq).map_err(ProveError::Construction)?;
    let run = prove_indexed(&u, &root, cfg)?;
    Ok(Proof {
        status: run.status,
        vars: public_vars(&u, &run.vars),
        root: run.node.as_ref().map(|n| n.to_public(&u)),
        stats: run.stats,
    })
}

pub fn prove_formula(f: &Formula, cfg: &Config) -> Result<Proof, ProveError> {
    prove(&Sequent::from_formulas([], [f.clone()]), cfg)
}

pub(crate) fn public_vars(u: &Universe, v: &IVars) -> VarSets {
    Vars {
        s: v.s.iter().map(|m| u.formulas_of(m)).collect(),
        p: v.p.iter().map(|m| u.formulas_of(m)).collect(),
    }
}

pub(crate) struct Run {
    pub status: Status,
    pub vars: IVars,
    pub node: Option<INode>,
    pub stats: SearchStats,
}

pub(crate) fn prove_indexed(u: &Universe, seq: &Seq, cfg: &Config) -> Result<Run, ProveError> {
    let mut search = Search {
        u,
        cfg,
        stats: SearchStats::default(),
        branch: Vec::new(),
    };
    let res = search.expand(seq.clone(), 0)?;
    Ok(Run {
        status: res.status,
        vars: res.vars,
        node: res.node,
        stats: search.stats,
    })
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Principal {
    Formula(Id),
    BigOr,
    BigAnd,
}

#[derive(Clone, Debug)]
pub(crate) struct INode {
    pub seq: Seq,
    pub rule: RuleId,
    pub principal: Option<Principal>,
    pub premises: Vec<INode>,
    pub status: Status,
    pub vars: IVars,
    pub alternatives: Vec<INode>,
}

impl INode {
    fn to_public(&self, u: &Universe) -> DerivationNode {
        let fam = |f: &Option<crate::sequent::Family>| {
            f.iter().flatten().map(|m| u.formulas_of(m)).collect()
        };
        let principal = self.principal.map(|p| match p {
            Principal::Formula(id) => ExtendedFormula::Plain(u.formula(id).clone()),
            Principal::BigOr => ExtendedFormula::BigOr(fam(&self.seq.big_or)),
            Principal::BigAnd => ExtendedFormula::BigAnd(fam(&self.seq.big_and)),
        });
        DerivationNode {
            sequent: self.seq.to_public(u, &IVars::default()),
            rule: self.rule,
            principal,
            branching: self.rule.branching(),
            premises: self.premises.iter().map(|p| p.to_public(u)).collect(),
            status: self.status,
            vars_out: public_vars(u, &self.vars),
            alternatives: self.alternatives.iter().map(|p| p.to_public(u)).collect(),
        }
    }
}

struct Res {
    status: Status,
    vars: IVars,
    node: Option<INode>,
}

/// A left premise of a transitional rule on the current branch.
struct Event {
    rule: RuleId,
    conclusion_degree: usize,
}

struct Search<'a> {
    u: &'a Universe,
    cfg: &'a Config,
    stats: SearchStats,
    branch: Vec<Event>,
}

/// The static rule that decomposes `id` on the given side.
pub(crate) fn static_rule_for(node: Node, left: bool) -> Option<RuleId> {
    Some(match (node, left) {
        (Node::And(..), true) => RuleId::AndL,
        (Node::And(..), false) => RuleId::AndR,
        (Node::Or(..), true) => RuleId::OrL,
        (Node::Or(..), false) => RuleId::OrR,
        (Node::Imp(..), true) => RuleId::ImpL,
        (Node::Imp(..), false) => RuleId::ImpRI,
        (Node::Excl(..), true) => RuleId::ExclLI,
        (Node::Excl(..), false) => RuleId::ExclR,
        _ => return None,
    })
}

/// The static rule instance the strategy picks, with its premises.
pub(crate) fn select_static(
    u: &Universe,
    seq: &Seq,
    mutation: Option<RuleMutation>,
) -> Option<(RuleId, Id, Vec<Seq>)> {
    let all = seq.lhs.union(&seq.rhs);
    for branching in [false, true] {
        for id in all.iter() {
            let Some(rule) = static_rule_for(u.node(id), seq.lhs.contains(id)) else {
                continue;
            };
            if rule.is_non_branching() == branching {
                continue;
            }
            if let Some(ps) = unblocked_static(u, rule, id, seq, mutation) {
                return Some((rule, id, ps));
            }
        }
    }
    None
}

/// Transitional instances in the order they are tried.
pub(crate) fn transitional_instances(u: &Universe, seq: &Seq) -> Vec<(RuleId, Id)> {
    let imps = seq
        .rhs
        .iter()
        .filter(|&i| matches!(u.node(i), Node::Imp(..)))
        .map(|i| (RuleId::ImpR, i));
    let excls = seq
        .lhs
        .iter()
        .filter(|&i| matches!(u.node(i), Node::Excl(..)))
        .map(|i| (RuleId::ExclL, i));
    imps.chain(excls).collect()
}

fn len_greater(a: (usize, usize), b: (usize, usize)) -> bool {
    a > b
}

impl Search<'_> {
    fn leaf(&self, seq: Seq, rule: RuleId, vars: IVars) -> Res {
        let status = combine_status(rule, &[]);
        Res {
            node: self.cfg.record.then(|| INode {
                seq,
                rule,
                principal: None,
                premises: vec![],
                status,
                vars: vars.clone(),
                alternatives: vec![],
            }),
            status,
            vars,
        }
    }

    fn check_degree(&mut self, rule: RuleId, from: usize, premise: &Seq) {
        let to = premise.degree(self.u);
        if to > from {
            self.stats
                .violations
                .push(Violation::DegreeIncrease { rule, from, to });
        }
    }

    fn expand(&mut self, seq: Seq, depth: usize) -> Result<Res, ProveError> {
        self.stats.nodes_expanded += 1;
        if self.stats.nodes_expanded > self.cfg.budget {
            return Err(ProveError::BudgetExceeded(self.cfg.budget));
        }
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let res = self.expand_inner(seq, depth)?;
        if res.status.is_derivable() && !res.vars.is_empty() {
            self.stats.violations.push(Violation::DerivableWithVars);
        }
        Ok(res)
    }

    fn expand_inner(&mut self, seq: Seq, depth: usize) -> Result<Res, ProveError> {
        let u = self.u;
        let mutation = self.cfg.mutation;
        if let Some(rule) = axiom(u, &seq) {
            return Ok(self.leaf(seq, rule, IVars::default()));
        }
        let degree = seq.degree(u);
        for (rule, principal) in [
            (RuleId::BigAndR, Principal::BigAnd),
            (RuleId::BigOrL, Principal::BigOr),
        ] {
            if let Some(ps) = special_premises(rule, &seq) {
                return self.universal(seq, rule, principal, ps, degree, depth);
            }
        }
        if let Some((rule, id, ps)) = select_static(u, &seq, mutation) {
            let before = seq.len_measure();
            if ps.iter().any(|p| !len_greater(p.len_measure(), before)) {
                self.stats
                    .violations
                    .push(Violation::LenNotIncreasing { rule });
            }
            return self.universal(seq, rule, Principal::Formula(id), ps, degree, depth);
        }
        self.transitional(seq, degree, depth)
    }

    fn universal(
        &mut self,
        seq: Seq,
        rule: RuleId,
        principal: Principal,
        premises: Vec<Seq>,
        degree: usize,
        depth: usize,
    ) -> Result<Res, ProveError> {
        let mut results = Vec::with_capacity(premises.len());
        let mut nodes = Vec::new();
        for p in premises {
            self.check_degree(rule, degree, &p);
            let r = self.expand(p, depth + 1)?;
            results.push((r.status, r.vars));
            nodes.extend(r.node);
        }
        let statuses: Vec<Status> = results.iter().map(|(s, _)| *s).collect();
        let status = combine_status(rule, &statuses);
        let vars = combine_vars_with(rule, &results, || seq.lhs.clone(), || seq.rhs.clone());
        Ok(Res {
            node: self.cfg.record.then(|| INode {
                seq,
                rule,
                principal: Some(principal),
                premises: nodes,
                status,
                vars: vars.clone(),
                alternatives: vec![],
            }),
            status,
            vars,
        })
    }

    /// Records a left transitional premise on the branch, checking the
    /// degree drop against the matching earlier premise.
    fn enter_left(&mut self, rule: RuleId, conclusion_degree: usize, left_degree: usize) {
        self.stats.degree_trace.push(left_degree);
        let other = self.branch.iter().rposition(|e| e.rule != rule);
        if let Some(j) = other {
            if let Some(i) = self.branch[..j].iter().rposition(|e| e.rule == rule) {
                self.stats.transitional_interleavings += 1;
                let conclusion = self.branch[i].conclusion_degree;
                if left_degree >= conclusion {
                    self.stats.violations.push(Violation::NoDegreeDecrease {
                        conclusion,
                        later: left_degree,
                    });
                }
            }
        }
        self.branch.push(Event {
            rule,
            conclusion_degree,
        });
    }

    fn transitional(&mut self, seq: Seq, degree: usize, depth: usize) -> Result<Res, ProveError> {
        let u = self.u;
        let record = self.cfg.record;
        let mut tried: Vec<(IVars, bool, Option<INode>)> = Vec::new();
        for (rule, id) in transitional_instances(u, &seq) {
            let Some(left) = unblocked_transitional(u, rule, id, &seq, self.cfg.mutation) else {
                continue;
            };
            let left_degree = left.degree(u);
            if left_degree > degree {
                self.stats.violations.push(Violation::DegreeIncrease {
                    rule,
                    from: degree,
                    to: left_degree,
                });
            }
            self.enter_left(rule, degree, left_degree);
            let lres = self.expand(left, depth + 1);
            self.branch.pop();
            let lres = lres?;
            let mut premises: Vec<INode> = lres.node.into_iter().collect();
            let mut statuses = vec![lres.status];
            let mut created = false;
            let mut vars = if lres.status.is_derivable() {
                IVars::default()
            } else if let Some(right) = transitional_right(rule, id, &seq, &lres.vars) {
                created = true;
                self.check_degree(rule, degree, &right);
                let before = seq.len_measure();
                let grows = special_premises(RuleId::BigAndR, &right)
                    .or_else(|| special_premises(RuleId::BigOrL, &right))
                    .is_some_and(|ps| ps.iter().all(|p| len_greater(p.len_measure(), before)));
                if !grows {
                    self.stats
                        .violations
                        .push(Violation::LenNotIncreasing { rule });
                }
                let rres = self.expand(right, depth + 1)?;
                statuses.push(rres.status);
                premises.extend(rres.node);
                rres.vars
            } else {
                IVars::single(seq.lhs.clone(), seq.rhs.clone())
            };
            let status = combine_status(rule, &statuses);
            if status.is_derivable() {
                vars = IVars::default();
            }
            let node = record.then(|| INode {
                seq: seq.clone(),
                rule,
                principal: Some(Principal::Formula(id)),
                premises,
                status,
                vars: vars.clone(),
                alternatives: vec![],
            });
            if status.is_derivable() {
                let mut node = node;
                if let Some(n) = node.as_mut() {
                    if self.cfg.trace {
                        n.alternatives = tried.into_iter().filter_map(|t| t.2).collect();
                    }
                }
                return Ok(Res { status, vars, node });
            }
            tried.push((vars, created, node));
        }
        if tried.is_empty() {
            let vars = IVars::single(seq.lhs.clone(), seq.rhs.clone());
            return Ok(self.leaf(seq, RuleId::Ret, vars));
        }
        let vars = match self.cfg.transitional_vars {
            TransitionalVars::Union => {
                let mut out = IVars::default();
                for (v, _, _) in &tried {
                    out.union_with(v);
                }
                out
            }
            TransitionalVars::FirstCreated => tried
                .iter()
                .find(|t| t.1)
                .map(|t| t.0.clone())
                .unwrap_or_else(|| IVars::single(seq.lhs.clone(), seq.rhs.clone())),
        };
        let mut nodes = tried.into_iter().filter_map(|t| t.2);
        let node = nodes.next().map(|mut first| {
            if self.cfg.trace {
                first.alternatives = nodes.collect();
            }
            first.vars = vars.clone();
            first
        });
        Ok(Res {
            status: Status::Open,
            vars,
            node,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_input, parse_plain, parse_sequent};
    use std::collections::BTreeSet;

    fn set(items: &[&str]) -> crate::formula::FormulaSet {
        items.iter().map(|s| parse_plain(s).unwrap()).collect()
    }

    fn run(text: &str) -> Proof {
        prove(&parse_input(text).unwrap(), &Config::default()).unwrap()
    }

    #[test]
    fn identity_is_a_leaf() {
        let p = run("p |- p");
        assert!(p.is_derivable());
        let root = p.root.unwrap();
        assert_eq!(root.rule, RuleId::Id);
        assert!(root.premises.is_empty());
    }

    #[test]
    fn interaction_formula_is_valid() {
        let p = run("p -> (q | (r -> ((p -< q) & r)))");
        assert!(p.is_derivable());
        assert!(p.stats.violations.is_empty());
        assert!(p.vars.is_empty());
    }

    #[test]
    fn interaction_replay_with_simplified_and_r() {
        let cfg = Config {
            mutation: Some(RuleMutation::AndRDropsPrincipal),
            ..Config::default()
        };
        let seq = parse_sequent("p |- q, r -> ((p -< q) & r)").unwrap();
        let proof = prove(&seq, &cfg).unwrap();
        assert!(proof.is_derivable());
        let tree = proof.root.unwrap();
        let root = tree
            .walk()
            .into_iter()
            .find(|n| n.rule == RuleId::ImpR)
            .unwrap();
        let ret = root
            .walk()
            .into_iter()
            .find(|n| n.rule == RuleId::Ret)
            .unwrap();
        assert_eq!(ret.vars_out.s, BTreeSet::from([set(&["p", "r", "q"])]));
        assert_eq!(ret.vars_out.p, BTreeSet::from([set(&["p -< q"])]));
        let big = &root.premises[1];
        assert_eq!(big.rule, RuleId::BigAndR);
        assert_eq!(big.premises.len(), 1);
        let mut leaves: Vec<RuleId> = root
            .walk()
            .into_iter()
            .filter(|n| n.premises.is_empty())
            .map(|n| n.rule)
            .collect();
        leaves.sort();
        assert_eq!(
            leaves,
            vec![RuleId::Id, RuleId::Id, RuleId::Id, RuleId::Id, RuleId::Ret]
        );
    }

    #[test]
    fn interaction_full_calculus() {
        let seq = parse_sequent("p |- q, r -> ((p -< q) & r)").unwrap();
        let proof = prove(&seq, &Config::default()).unwrap();
        assert!(proof.is_derivable());
        let tree = proof.root.unwrap();
        let root = tree
            .walk()
            .into_iter()
            .find(|n| n.rule == RuleId::ImpR)
            .unwrap();
        let ret = root
            .walk()
            .into_iter()
            .find(|n| n.rule == RuleId::Ret)
            .unwrap();
        let excl = parse_plain("p -< q").unwrap();
        assert!(ret.vars_out.p.iter().all(|m| m.contains(&excl)));
        assert_eq!(root.premises[1].rule, RuleId::BigAndR);
    }

    #[test]
    fn exclusion_pair_is_open() {
        let p = run("|- p, (((true -< p) & (true -< q)) -> false) -> false");
        assert!(!p.is_derivable());
        let root = p.root.unwrap();
        let big = root
            .walk()
            .into_iter()
            .find(|n| n.rule == RuleId::BigAndR)
            .cloned()
            .unwrap();
        let statuses: Vec<Status> = big.premises.iter().map(|n| n.status).collect();
        assert_eq!(statuses, vec![Status::Derivable, Status::Open]);
    }

    #[test]
    fn excluded_middle_is_open() {
        let p = run("p | (p -> false)");
        assert!(!p.is_derivable());
        assert!(!p.vars.is_empty());
    }

    #[test]
    fn budget_is_reported() {
        let cfg = Config {
            budget: 3,
            ..Config::default()
        };
        let seq = parse_input("p -> (q | (r -> ((p -< q) & r)))").unwrap();
        assert_eq!(
            prove(&seq, &cfg).unwrap_err(),
            ProveError::BudgetExceeded(3)
        );
    }

    #[test]
    fn extended_root_is_rejected() {
        let seq = Sequent::new([ExtendedFormula::BigOr(BTreeSet::new())], []);
        assert_eq!(
            prove(&seq, &Config::default()).unwrap_err(),
            ProveError::ExtendedRoot
        );
    }

    #[test]
    fn trace_keeps_failed_instances() {
        let seq = parse_input("(p -> q) | (q -> p)").unwrap();
        let cfg = Config {
            trace: true,
            ..Config::default()
        };
        let proof = prove(&seq, &cfg).unwrap();
        assert!(!proof.is_derivable());
        let with_alts = proof
            .root
            .unwrap()
            .walk()
            .into_iter()
            .any(|n| !n.alternatives.is_empty());
        assert!(with_alts);
    }
}
