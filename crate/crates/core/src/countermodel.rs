//! Saturation and model graph construction for non-derivable sequents.
//!
//! A model graph holds one or more components, each tagged with a sort.
//! Variable members carry the sort of the component they describe, so a
//! caller can graft exactly the component whose root matched.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{ModelError, ProveError};
use crate::formula::{Formula, FormulaSet};
use crate::prover::{prove_indexed, select_static, transitional_instances, Config};
use crate::semantics::KripkeModel;
use crate::sequent::{
    axiom, special_premises, unblocked_static, unblocked_transitional, IVars, RuleId, Seq, Sequent,
    Status, Vars,
};
use crate::universe::{IdSet, Node, Universe};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphNode {
    pub id: usize,
    pub sort: usize,
    pub lhs: FormulaSet,
    pub rhs: FormulaSet,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelGraph {
    pub nodes: Vec<GraphNode>,
    /// Generating edges `(a, b)` for a R b; reflexivity and transitivity are
    /// implicit.
    pub edges: Vec<(usize, usize)>,
    /// Root node of each sort.
    pub roots: BTreeMap<usize, usize>,
}

impl ModelGraph {
    pub fn sorts(&self) -> Vec<usize> {
        self.roots.keys().copied().collect()
    }

    fn universe(&self, seq: &Sequent) -> Universe {
        let mut all: Vec<&Formula> = self
            .nodes
            .iter()
            .flat_map(|n| n.lhs.iter().chain(&n.rhs))
            .collect();
        let extra = seq.subformulae();
        all.extend(extra.iter());
        Universe::new(all)
    }
}

/// Variables whose members remember the sort of their component.
pub type TaggedVars = Vars<(FormulaSet, usize)>;

/// The first model graph property that fails, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphViolation {
    /// 1 to 7 for the model graph properties; 0 for a node that is not a
    /// saturated sequent; 8 for a missing component.
    pub property: u8,
    pub detail: String,
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "model graph property {} fails: {}",
            self.property, self.detail
        )
    }
}

impl std::error::Error for GraphViolation {}

// ---------------------------------------------------------------------------
// Indexed construction.

#[derive(Clone, Debug)]
pub(crate) struct GNode {
    pub id: usize,
    pub sort: usize,
    pub lhs: IdSet,
    pub rhs: IdSet,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct IGraph {
    pub nodes: Vec<GNode>,
    pub edges: Vec<(usize, usize)>,
    pub roots: BTreeMap<usize, usize>,
}

pub(crate) type ITagged = Vars<(IdSet, usize)>;

impl IGraph {
    fn merge(&mut self, other: IGraph) {
        self.nodes.extend(other.nodes);
        self.edges.extend(other.edges);
        self.roots.extend(other.roots);
    }

    pub fn to_public(&self, u: &Universe) -> ModelGraph {
        ModelGraph {
            nodes: self
                .nodes
                .iter()
                .map(|n| GraphNode {
                    id: n.id,
                    sort: n.sort,
                    lhs: u.formulas_of(&n.lhs),
                    rhs: u.formulas_of(&n.rhs),
                })
                .collect(),
            edges: self.edges.clone(),
            roots: self.roots.clone(),
        }
    }

    fn from_public(u: &Universe, g: &ModelGraph) -> IGraph {
        IGraph {
            nodes: g
                .nodes
                .iter()
                .map(|n| GNode {
                    id: n.id,
                    sort: n.sort,
                    lhs: u.set_of(&n.lhs).expect("universe covers graph"),
                    rhs: u.set_of(&n.rhs).expect("universe covers graph"),
                })
                .collect(),
            edges: g.edges.clone(),
            roots: g.roots.clone(),
        }
    }
}

pub(crate) struct Mgc<'a> {
    u: &'a Universe,
    cfg: Config,
    memo: HashMap<Seq, (Status, IVars)>,
    next_sort: usize,
    next_node: usize,
    work: usize,
}

impl<'a> Mgc<'a> {
    pub fn new(u: &'a Universe, cfg: &Config) -> Mgc<'a> {
        Mgc {
            u,
            cfg: Config {
                record: false,
                trace: false,
                ..cfg.clone()
            },
            memo: HashMap::new(),
            next_sort: 0,
            next_node: 0,
            work: 0,
        }
    }

    fn tick(&mut self, n: usize) -> Result<(), ProveError> {
        self.work += n;
        if self.work > self.cfg.budget {
            Err(ProveError::BudgetExceeded(self.cfg.budget))
        } else {
            Ok(())
        }
    }

    pub fn prove(&mut self, seq: &Seq) -> Result<(Status, IVars), ProveError> {
        if let Some(hit) = self.memo.get(seq) {
            return Ok(hit.clone());
        }
        let run = prove_indexed(self.u, seq, &self.cfg)?;
        self.tick(run.stats.nodes_expanded)?;
        let out = (run.status, run.vars);
        self.memo.insert(seq.clone(), out.clone());
        Ok(out)
    }

    /// Static closure of an open sequent, keeping the open leaves.
    pub fn saturate(&mut self, seq: &Seq) -> Result<Vec<Seq>, ProveError> {
        self.tick(1)?;
        if axiom(self.u, seq).is_some() {
            return Ok(vec![]);
        }
        match select_static(self.u, seq, self.cfg.mutation) {
            None => Ok(vec![seq.clone()]),
            Some((_, _, premises)) => {
                let mut out = Vec::new();
                for p in premises {
                    if !self.prove(&p)?.0.is_derivable() {
                        out.extend(self.saturate(&p)?);
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn build(&mut self, seq: &Seq) -> Result<(IGraph, ITagged), ProveError> {
        let states = self.saturate(seq)?;
        if states.is_empty() {
            return Err(ProveError::Construction(
                "sequent has no open saturation".into(),
            ));
        }
        let mut graph = IGraph::default();
        let mut vars = ITagged::default();
        for alpha in states {
            let (g, v) = self.state(&alpha)?;
            graph.merge(g);
            vars.union_with(&v);
        }
        Ok((graph, vars))
    }

    fn fresh_node(&mut self) -> usize {
        self.next_node += 1;
        self.next_node - 1
    }

    fn state(&mut self, alpha: &Seq) -> Result<(IGraph, ITagged), ProveError> {
        let u = self.u;
        let i = self.next_sort;
        self.next_sort += 1;
        let root = self.fresh_node();
        let mut comp = IGraph::default();
        comp.nodes.push(GNode {
            id: root,
            sort: i,
            lhs: alpha.lhs.clone(),
            rhs: alpha.rhs.clone(),
        });
        comp.roots.insert(i, root);
        for (rule, id) in transitional_instances(u, alpha) {
            let Some(left) = unblocked_transitional(u, rule, id, alpha, self.cfg.mutation) else {
                continue;
            };
            let (g1, v1) = self.build(&left)?;
            let forward = rule == RuleId::ImpR;
            let (fam, side) = if forward {
                (&v1.p, &alpha.rhs)
            } else {
                (&v1.s, &alpha.lhs)
            };
            if fam.is_empty() {
                return Err(ProveError::Construction(
                    "open premise returned no variables".into(),
                ));
            }
            if let Some((_, j)) = fam.iter().find(|(m, _)| m.is_subset(side)) {
                let copy_root = self.graft(&g1, *j, i, &mut comp);
                comp.edges.push(if forward {
                    (root, copy_root)
                } else {
                    (copy_root, root)
                });
                continue;
            }
            // New information: rebuild this state from the right premise.
            let members: BTreeSet<IdSet> = fam.iter().map(|(m, _)| m.clone()).collect();
            let right = if forward {
                Seq {
                    big_and: Some(members),
                    ..alpha.clone()
                }
            } else {
                Seq {
                    big_or: Some(members),
                    ..alpha.clone()
                }
            };
            let special = if forward {
                RuleId::BigAndR
            } else {
                RuleId::BigOrL
            };
            let premises = special_premises(special, &right).expect("wrapper present");
            let mut graph = IGraph::default();
            let mut vars = ITagged::default();
            let mut any = false;
            for p in premises {
                if self.prove(&p)?.0.is_derivable() {
                    continue;
                }
                any = true;
                let (g, v) = self.build(&p)?;
                graph.merge(g);
                vars.union_with(&v);
            }
            if !any {
                return Err(ProveError::Construction(format!(
                    "every {special} premise is derivable"
                )));
            }
            return Ok((graph, vars));
        }
        let vars = ITagged::single((alpha.lhs.clone(), i), (alpha.rhs.clone(), i));
        Ok((comp, vars))
    }

    /// Copies component `j` of `from` into `into` under sort `i` with fresh
    /// node ids; returns the new id of its root.
    fn graft(&mut self, from: &IGraph, j: usize, i: usize, into: &mut IGraph) -> usize {
        let mut rename = HashMap::new();
        for n in from.nodes.iter().filter(|n| n.sort == j) {
            let id = self.fresh_node();
            rename.insert(n.id, id);
            into.nodes.push(GNode {
                id,
                sort: i,
                lhs: n.lhs.clone(),
                rhs: n.rhs.clone(),
            });
        }
        for (a, b) in &from.edges {
            if let (Some(&x), Some(&y)) = (rename.get(a), rename.get(b)) {
                into.edges.push((x, y));
            }
        }
        rename[&from.roots[&j]]
    }
}

/// Reflexive-transitive closure of the edges inside one component, by
/// position in `nodes`.
fn closure(nodes: &[&GNode], edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let pos: HashMap<usize, usize> = nodes.iter().enumerate().map(|(k, n)| (n.id, k)).collect();
    let n = nodes.len();
    let mut rel = vec![vec![false; n]; n];
    for (k, row) in rel.iter_mut().enumerate() {
        row[k] = true;
    }
    for (a, b) in edges {
        if let (Some(&x), Some(&y)) = (pos.get(a), pos.get(b)) {
            rel[x][y] = true;
        }
    }
    // Warshall; indices keep the row borrows apart.
    #[allow(clippy::needless_range_loop)]
    for k in 0..n {
        for i in 0..n {
            if rel[i][k] {
                for j in 0..n {
                    if rel[k][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
    }
    rel
}

fn component(g: &IGraph, sort: usize) -> Vec<&GNode> {
    g.nodes.iter().filter(|n| n.sort == sort).collect()
}

pub(crate) fn verify_indexed(
    u: &Universe,
    g: &IGraph,
    sort: usize,
    root_seq: &Seq,
) -> Result<(), GraphViolation> {
    let fail = |property: u8, detail: String| Err(GraphViolation { property, detail });
    let nodes = component(g, sort);
    let Some(&root) = g.roots.get(&sort) else {
        return fail(8, format!("no component of sort {sort}"));
    };
    let rel = closure(&nodes, &g.edges);
    let show = |id| u.formula(id).to_string();
    for n in &nodes {
        let s = Seq::plain(n.lhs.clone(), n.rhs.clone());
        if axiom(u, &s).is_some() {
            return fail(0, format!("node {} is inconsistent", n.id));
        }
        for id in n.lhs.union(&n.rhs).iter() {
            let Some(rule) = crate::prover::static_rule_for(u.node(id), n.lhs.contains(id)) else {
                continue;
            };
            if unblocked_static(u, rule, id, &s, None).is_some() {
                return fail(
                    0,
                    format!("node {} is not closed under {rule} on {}", n.id, show(id)),
                );
            }
        }
    }
    let Some(r) = nodes.iter().position(|n| n.id == root) else {
        return fail(8, format!("root {root} missing from sort {sort}"));
    };
    if !root_seq.lhs.is_subset(&nodes[r].lhs) || !root_seq.rhs.is_subset(&nodes[r].rhs) {
        return fail(1, format!("root {root} does not contain the sequent"));
    }
    let k = nodes.len();
    for w in 0..k {
        for id in nodes[w].rhs.iter() {
            if let Node::Imp(a, b) = u.node(id) {
                let ok = (0..k)
                    .any(|v| rel[w][v] && nodes[v].lhs.contains(a) && nodes[v].rhs.contains(b));
                if !ok {
                    return fail(
                        2,
                        format!("no successor of {} witnesses {}", nodes[w].id, show(id)),
                    );
                }
            }
        }
        for id in nodes[w].lhs.iter() {
            if let Node::Excl(a, b) = u.node(id) {
                let ok = (0..k)
                    .any(|v| rel[v][w] && nodes[v].lhs.contains(a) && nodes[v].rhs.contains(b));
                if !ok {
                    return fail(
                        3,
                        format!("no predecessor of {} witnesses {}", nodes[w].id, show(id)),
                    );
                }
            }
        }
    }
    for w in 0..k {
        for v in 0..k {
            if !rel[w][v] {
                continue;
            }
            let (nw, nv) = (nodes[w], nodes[v]);
            for id in nw.lhs.iter() {
                if let Node::Imp(a, b) = u.node(id) {
                    if !nv.lhs.contains(b) && !nv.rhs.contains(a) {
                        return fail(
                            4,
                            format!("{} at {} not respected at {}", show(id), nw.id, nv.id),
                        );
                    }
                }
                if !nv.lhs.contains(id) {
                    return fail(
                        6,
                        format!("{} forced at {} but not at {}", show(id), nw.id, nv.id),
                    );
                }
            }
            // Here w is the predecessor of v.
            for id in nv.rhs.iter() {
                if let Node::Excl(a, b) = u.node(id) {
                    if !nw.lhs.contains(b) && !nw.rhs.contains(a) {
                        return fail(
                            5,
                            format!("{} at {} not respected at {}", show(id), nv.id, nw.id),
                        );
                    }
                }
                if !nw.rhs.contains(id) {
                    return fail(
                        7,
                        format!("{} rejected at {} but not at {}", show(id), nv.id, nw.id),
                    );
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn is_di_tree_indexed(g: &IGraph, sort: usize) -> bool {
    let nodes = component(g, sort);
    let pos: HashMap<usize, usize> = nodes.iter().enumerate().map(|(k, n)| (n.id, k)).collect();
    let inner: Vec<(usize, usize)> = g
        .edges
        .iter()
        .filter_map(|(a, b)| Some((*pos.get(a)?, *pos.get(b)?)))
        .collect();
    if nodes.is_empty() || inner.len() + 1 != nodes.len() {
        return false;
    }
    // n - 1 edges and connected means a tree.
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (a, b) in inner {
        let (x, y) = (find(&mut parent, a), find(&mut parent, b));
        if x == y {
            return false;
        }
        parent[x] = y;
    }
    true
}

pub(crate) fn model_indexed(
    u: &Universe,
    g: &IGraph,
    sort: usize,
) -> Result<(KripkeModel, usize), ModelError> {
    let nodes = component(g, sort);
    let ids: BTreeSet<usize> = nodes.iter().map(|n| n.id).collect();
    let worlds = nodes.iter().map(|n| {
        let atoms = n
            .lhs
            .iter()
            .filter_map(|i| match u.formula(i) {
                Formula::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect();
        (n.id, atoms)
    });
    let edges = g
        .edges
        .iter()
        .copied()
        .filter(|(a, b)| ids.contains(a) && ids.contains(b));
    let model = KripkeModel::new(worlds, edges)?;
    let root = *g.roots.get(&sort).ok_or(ModelError::NoSuchWorld(sort))?;
    Ok((model, root))
}

// ---------------------------------------------------------------------------
// Public API.

fn indexed_root(seq: &Sequent) -> Result<(Universe, Seq), ProveError> {
    if !seq.is_plain() {
        return Err(ProveError::ExtendedRoot);
    }
    let u = seq.universe();
    let s = Seq::from_public(&u, seq).map_err(ProveError::Construction)?;
    Ok((u, s))
}

/// Saturated sequents of a non-derivable sequent, as (lhs, rhs) pairs.
pub fn saturate(seq: &Sequent, cfg: &Config) -> Result<Vec<(FormulaSet, FormulaSet)>, ProveError> {
    let (u, root) = indexed_root(seq)?;
    let mut m = Mgc::new(&u, cfg);
    if m.prove(&root)?.0.is_derivable() {
        return Err(ProveError::Construction("sequent is derivable".into()));
    }
    Ok(m.saturate(&root)?
        .into_iter()
        .map(|s| (u.formulas_of(&s.lhs), u.formulas_of(&s.rhs)))
        .collect())
}

/// Model graph and sort-tagged variables of a non-derivable sequent.
pub fn mgc(seq: &Sequent, cfg: &Config) -> Result<(ModelGraph, TaggedVars), ProveError> {
    let (u, root) = indexed_root(seq)?;
    let mut m = Mgc::new(&u, cfg);
    if m.prove(&root)?.0.is_derivable() {
        return Err(ProveError::Construction("sequent is derivable".into()));
    }
    let (g, v) = m.build(&root)?;
    let tag =
        |fam: &BTreeSet<(IdSet, usize)>| fam.iter().map(|(m, s)| (u.formulas_of(m), *s)).collect();
    Ok((
        g.to_public(&u),
        Vars {
            s: tag(&v.s),
            p: tag(&v.p),
        },
    ))
}

/// Checks saturation of every node of the component plus the seven model
/// graph properties over the closure of its edges.
pub fn verify_model_graph(
    g: &ModelGraph,
    sort: usize,
    seq: &Sequent,
) -> Result<(), GraphViolation> {
    let u = g.universe(seq);
    let Ok(root) = Seq::from_public(&u, seq) else {
        return Err(GraphViolation {
            property: 1,
            detail: "sequent has extended formulas".into(),
        });
    };
    verify_indexed(&u, &IGraph::from_public(&u, g), sort, &root)
}

/// Whether the component's edges form a tree once directions are ignored.
pub fn is_di_tree(g: &ModelGraph, sort: usize) -> bool {
    let u = Universe::new([]);
    let ig = IGraph {
        nodes: g
            .nodes
            .iter()
            .map(|n| GNode {
                id: n.id,
                sort: n.sort,
                lhs: u.empty_set(),
                rhs: u.empty_set(),
            })
            .collect(),
        edges: g.edges.clone(),
        roots: g.roots.clone(),
    };
    is_di_tree_indexed(&ig, sort)
}

/// Kripke model of one component: atoms on the left are true, the relation
/// is the closure of the edges. Returns the model and the component root.
pub fn graph_to_model(g: &ModelGraph, sort: usize) -> Result<(KripkeModel, usize), ModelError> {
    let nodes: Vec<&GraphNode> = g.nodes.iter().filter(|n| n.sort == sort).collect();
    let ids: BTreeSet<usize> = nodes.iter().map(|n| n.id).collect();
    let worlds = nodes.iter().map(|n| {
        let atoms = n
            .lhs
            .iter()
            .filter_map(|f| match f {
                Formula::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect();
        (n.id, atoms)
    });
    let edges = g
        .edges
        .iter()
        .copied()
        .filter(|(a, b)| ids.contains(a) && ids.contains(b));
    let model = KripkeModel::new(worlds, edges)?;
    let root = *g.roots.get(&sort).ok_or(ModelError::NoSuchWorld(sort))?;
    Ok((model, root))
}
