//! Randomized checks through the public API on formulas and sequents larger
//! than the exhaustive fuzz covers.

use biint_core::emit::{derivation_text, emit_derivation, validate_derivation_json, Format};
use biint_core::prover::{prove, Config};
use biint_core::semantics::{bounded_countermodel, KripkeModel};
use biint_core::sequent::RuleMutation;
use biint_core::verdict::{decide, Verdict};
use biint_core::{parse_input, parse_plain, print_formula, Formula, RuleId, Sequent};
use proptest::prelude::*;

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::atom),
        1 => Just(Formula::Top),
        1 => Just(Formula::Bot),
    ];
    leaf.prop_recursive(4, 12, 2, |inner| {
        (0..4usize, inner.clone(), inner).prop_map(|(c, l, r)| match c {
            0 => Formula::and(l, r),
            1 => Formula::or(l, r),
            2 => Formula::imp(l, r),
            _ => Formula::excl(l, r),
        })
    })
}

fn sequent() -> impl Strategy<Value = Sequent> {
    (
        prop::collection::vec(formula(), 0..3),
        prop::collection::vec(formula(), 0..3),
    )
        .prop_map(|(l, r)| Sequent::from_formulas(l, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_then_parse_is_identity(f in formula()) {
        prop_assert_eq!(parse_plain(&print_formula(&f)).unwrap(), f);
    }

    #[test]
    fn dual_is_an_involution(s in sequent()) {
        prop_assert_eq!(s.dual().dual(), s);
    }

    #[test]
    fn verdicts_agree_with_oracle_and_dual(s in sequent()) {
        let cfg = Config::default();
        let verdict = decide(&s, &cfg).unwrap();
        let dual = decide(&s.dual(), &cfg).unwrap();
        prop_assert_eq!(verdict.is_valid(), dual.is_valid());
        match verdict {
            Verdict::Valid(proof) => {
                prop_assert!(proof.vars.is_empty());
                prop_assert!(bounded_countermodel(&s, 3, &s.atoms()).is_none());
            }
            Verdict::Invalid(_, cm) => {
                prop_assert!(cm.model.falsifies(cm.world, &s).unwrap());
                // The emitted model survives a JSON round trip.
                let back = KripkeModel::from_json(&cm.model.to_json()).unwrap();
                prop_assert!(back.falsifies(cm.world, &s).unwrap());
            }
        }
    }

    #[test]
    fn emitted_json_validates(s in sequent()) {
        let cfg = Config { trace: true, ..Config::default() };
        let proof = prove(&s, &cfg).unwrap();
        let root = proof.root.unwrap();
        validate_derivation_json(&emit_derivation(&root, Format::Json)).unwrap();
        for n in root.walk() {
            if n.status.is_derivable() {
                prop_assert!(n.vars_out.is_empty());
            }
        }
    }
}

#[test]
fn interaction_replay_leaves() {
    let cfg = Config {
        mutation: Some(RuleMutation::AndRDropsPrincipal),
        ..Config::default()
    };
    let seq = parse_input("p |- q, r -> ((p -< q) & r)").unwrap();
    let proof = prove(&seq, &cfg).unwrap();
    assert!(proof.is_derivable());
    let root = proof.root.unwrap();
    // Invertible ImpRI comes first; the replayed subtree starts at ImpR.
    assert_eq!(root.rule, RuleId::ImpRI);
    let imp_r = root
        .walk()
        .into_iter()
        .find(|n| n.rule == RuleId::ImpR)
        .unwrap();
    let text = derivation_text(imp_r);
    let mut leaves: Vec<&str> = text
        .lines()
        .zip(text.lines().skip(1).map(Some).chain([None]))
        .filter(|(line, next)| {
            let depth = |l: &str| l.len() - l.trim_start().len();
            next.is_none_or(|n| depth(n) <= depth(line))
        })
        .map(|(line, _)| line.split_whitespace().next().unwrap())
        .collect();
    leaves.sort();
    assert_eq!(leaves, ["Id", "Id", "Id", "Id", "Ret"]);
}

#[test]
fn exclusion_pair_model_at_root() {
    let seq = parse_input("|- p, (((true -< p) & (true -< q)) -> false) -> false").unwrap();
    let Verdict::Invalid(_, cm) = decide(&seq, &Config::default()).unwrap() else {
        panic!("example two proved");
    };
    assert!(cm.model.falsifies(cm.world, &seq).unwrap());
    let excl = parse_plain("true -< q").unwrap();
    assert!(!cm.model.forces(cm.world, &excl).unwrap());
}
