//! Browser bindings: prove, countermodel and check-model. Every entry point
//! takes strings and returns a JSON string, so the page needs no glue
//! beyond `JSON.parse`. Failures come back as `{"error": "..."}`.

use biint_core::emit::{derivation_text, model_dot, model_text, DerivationJson};
use biint_core::prover::Config;
use biint_core::semantics::KripkeModel;
use biint_core::verdict::{decide, Verdict};
use biint_core::{parse_input, Sequent};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Searches in the browser get a smaller budget than the CLI so a runaway
/// input cannot freeze the tab for long.
const WEB_BUDGET: usize = 200_000;

fn config() -> Config {
    Config {
        budget: WEB_BUDGET,
        ..Config::default()
    }
}

fn parse(input: &str) -> Result<Sequent, String> {
    parse_input(input).map_err(|e| format!("parse error at {e}"))
}

fn respond(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

pub fn prove_json(input: &str) -> Result<Value, String> {
    let seq = parse(input)?;
    let verdict = decide(&seq, &config()).map_err(|e| e.to_string())?;
    let proof = verdict.proof();
    let mut out = json!({
        "verdict": if verdict.is_valid() { "valid" } else { "invalid" },
        "nodes": proof.stats.nodes_expanded,
    });
    if let Some(root) = &proof.root {
        out["text"] = derivation_text(root).into();
        out["derivation"] =
            serde_json::to_value(DerivationJson::from(root)).map_err(|e| e.to_string())?;
    }
    if let Verdict::Invalid(_, cm) = &verdict {
        out["model"] = serde_json::to_value(cm.model.to_spec()).map_err(|e| e.to_string())?;
        out["point"] = cm.world.into();
    }
    Ok(out)
}

pub fn countermodel_json(input: &str) -> Result<Value, String> {
    let seq = parse(input)?;
    match decide(&seq, &config()).map_err(|e| e.to_string())? {
        Verdict::Valid(_) => Err("the sequent is valid; it has no countermodel".into()),
        Verdict::Invalid(_, cm) => Ok(json!({
            "model": serde_json::to_value(cm.model.to_spec()).map_err(|e| e.to_string())?,
            "point": cm.world,
            "text": model_text(&cm.model),
            "dot": model_dot(&cm.model),
        })),
    }
}

pub fn check_model_json(model: &str, input: &str, point: usize) -> Result<Value, String> {
    let seq = parse(input)?;
    let m = KripkeModel::from_json(model).map_err(|e| e.to_string())?;
    let falsified = m.falsifies(point, &seq).map_err(|e| e.to_string())?;
    Ok(json!({ "falsified": falsified }))
}

#[wasm_bindgen]
pub fn prove(input: &str) -> String {
    respond(prove_json(input))
}

#[wasm_bindgen]
pub fn countermodel(input: &str) -> String {
    respond(countermodel_json(input))
}

#[wasm_bindgen(js_name = checkModel)]
pub fn check_model(model: &str, input: &str, point: usize) -> String {
    respond(check_model_json(model, input, point))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prove_reports_verdicts() {
        let v: Value = serde_json::from_str(&prove("p -> (q | (r -> ((p -< q) & r)))")).unwrap();
        assert_eq!(v["verdict"], "valid");
        assert!(v["text"].as_str().unwrap().contains("Ret"));
        let v: Value = serde_json::from_str(&prove("p | !p")).unwrap();
        assert_eq!(v["verdict"], "invalid");
        assert!(v["model"]["worlds"].is_array());
    }

    #[test]
    fn errors_are_json() {
        let v: Value = serde_json::from_str(&prove("p ->")).unwrap();
        assert!(v["error"].as_str().unwrap().starts_with("parse error"));
        let v: Value = serde_json::from_str(&countermodel("p -> p")).unwrap();
        assert!(v["error"].is_string());
        let v: Value = serde_json::from_str(&check_model("[]", "p", 0)).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn countermodel_checks_back() {
        let v: Value = serde_json::from_str(&countermodel("((p -> q) -> p) -> p")).unwrap();
        let point = v["point"].as_u64().unwrap() as usize;
        let model = v["model"].to_string();
        let c: Value =
            serde_json::from_str(&check_model(&model, "((p -> q) -> p) -> p", point)).unwrap();
        assert_eq!(c["falsified"], true);
        let c: Value = serde_json::from_str(&check_model(&model, "p -> p", point)).unwrap();
        assert_eq!(c["falsified"], false);
        assert!(v["dot"].as_str().unwrap().starts_with("digraph"));
    }
}
