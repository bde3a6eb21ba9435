//! Prover plus countermodel: every verdict comes with its evidence.

use crate::countermodel::{graph_to_model, is_di_tree, mgc, verify_model_graph, ModelGraph};
use crate::error::ProveError;
use crate::formula::Formula;
use crate::prover::{prove, Config, Proof};
use crate::semantics::KripkeModel;
use crate::sequent::Sequent;

#[derive(Clone, Debug)]
pub struct Countermodel {
    pub graph: ModelGraph,
    /// The component the model was read from.
    pub sort: usize,
    pub model: KripkeModel,
    /// The world falsifying the sequent.
    pub world: usize,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Valid(Proof),
    Invalid(Proof, Box<Countermodel>),
}

impl Verdict {
    pub fn proof(&self) -> &Proof {
        match self {
            Verdict::Valid(p) | Verdict::Invalid(p, _) => p,
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid(_))
    }
}

/// Builds and checks a countermodel for a sequent the prover left open.
/// Every component of the graph must pass the model graph checks and be a
/// di-tree, and the model read from the first must falsify the sequent.
pub fn countermodel(seq: &Sequent, cfg: &Config) -> Result<Countermodel, ProveError> {
    let (graph, _) = mgc(seq, cfg)?;
    let bad = |e: String| ProveError::Unverified(e);
    for sort in graph.sorts() {
        verify_model_graph(&graph, sort, seq).map_err(|e| bad(e.to_string()))?;
        if !is_di_tree(&graph, sort) {
            return Err(bad(format!("component {sort} is not a di-tree")));
        }
    }
    let sort = *graph
        .sorts()
        .first()
        .ok_or_else(|| bad("empty model graph".into()))?;
    let (model, world) = graph_to_model(&graph, sort).map_err(|e| bad(e.to_string()))?;
    if !model
        .falsifies(world, seq)
        .map_err(|e| bad(e.to_string()))?
    {
        return Err(bad("model does not falsify the sequent at its root".into()));
    }
    Ok(Countermodel {
        graph,
        sort,
        model,
        world,
    })
}

pub fn decide(seq: &Sequent, cfg: &Config) -> Result<Verdict, ProveError> {
    let proof = prove(seq, cfg)?;
    if proof.is_derivable() {
        return Ok(Verdict::Valid(proof));
    }
    let cm = countermodel(seq, cfg)?;
    Ok(Verdict::Invalid(proof, Box::new(cm)))
}

pub fn decide_formula(f: &Formula, cfg: &Config) -> Result<Verdict, ProveError> {
    decide(&Sequent::from_formulas([], [f.clone()]), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_plain;

    #[test]
    fn verdicts_carry_evidence() {
        let cfg = Config::default();
        let interaction = parse_plain("p -> (q | (r -> ((p -< q) & r)))").unwrap();
        assert!(decide_formula(&interaction, &cfg).unwrap().is_valid());
        let em = parse_plain("p | (p -> false)").unwrap();
        match decide_formula(&em, &cfg).unwrap() {
            Verdict::Invalid(_, cm) => assert_eq!(cm.model.len(), 2),
            Verdict::Valid(_) => panic!("excluded middle proved"),
        }
        let both = parse_plain("((true -< p) & p) -> false").unwrap();
        assert!(!decide_formula(&both, &cfg).unwrap().is_valid());
    }
}
