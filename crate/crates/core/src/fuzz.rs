//! Exhaustive cross-checking of the prover, the countermodel construction
//! and the semantics over every small formula.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::countermodel::{is_di_tree_indexed, model_indexed, verify_indexed, Mgc};
use crate::formula::{enumerate_formulas, Formula};
use crate::prover::{prove_indexed, Config, SearchStats};
use crate::semantics::ModelBank;
use crate::sequent::{Seq, Sequent};
use crate::universe::Universe;

/// `p`, `q`, `r`, `s`, then `a0`, `a1`, ...
pub fn atom_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0..=3 => ["p", "q", "r", "s"][i].to_string(),
            _ => format!("a{}", i - 4),
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct FuzzOptions {
    pub atoms: usize,
    pub max_connectives: usize,
    pub oracle_worlds: usize,
    pub config: Config,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        FuzzOptions {
            atoms: 2,
            max_connectives: 4,
            oracle_worlds: 3,
            config: Config::quiet(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum FailureKind {
    /// The node budget ran out.
    Budget,
    /// VALID, but the oracle found a countermodel.
    Soundness,
    /// INVALID, but the model graph fails one of its seven properties.
    ModelGraph,
    /// INVALID, but the graph is not a di-tree or its model does not
    /// falsify the formula.
    Countermodel,
    /// The dual sequent got a different verdict.
    Duality,
    /// A degree or LEN check failed during search.
    Termination,
    /// A derivable node returned variables.
    DerivableVars,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzFailure {
    pub formula: String,
    pub kind: FailureKind,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FuzzReport {
    pub formulas: usize,
    pub valid: usize,
    pub invalid: usize,
    pub failures: BTreeMap<FailureKind, usize>,
    /// The first few failures of each kind.
    pub examples: Vec<FuzzFailure>,
    pub max_nodes: usize,
    pub max_depth: usize,
    pub interleavings: usize,
    pub degree_checks: usize,
    pub largest_model: usize,
    /// Model graph components checked against the seven properties.
    pub graphs_verified: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl FuzzReport {
    pub fn total_failures(&self) -> usize {
        self.failures.values().sum()
    }

    pub fn count(&self, kind: FailureKind) -> usize {
        self.failures.get(&kind).copied().unwrap_or(0)
    }

    fn fail(&mut self, f: &Formula, kind: FailureKind, detail: String) {
        let seen = self.failures.entry(kind).or_insert(0);
        *seen += 1;
        if *seen <= 5 {
            self.examples.push(FuzzFailure {
                formula: f.to_string(),
                kind,
                detail,
            });
        }
    }

    fn absorb(&mut self, f: &Formula, stats: &SearchStats) {
        self.max_nodes = self.max_nodes.max(stats.nodes_expanded);
        self.max_depth = self.max_depth.max(stats.max_depth);
        self.interleavings += stats.transitional_interleavings;
        self.degree_checks += stats.degree_trace.len();
        for v in &stats.violations {
            let kind = match v {
                crate::prover::Violation::DerivableWithVars => FailureKind::DerivableVars,
                _ => FailureKind::Termination,
            };
            self.fail(f, kind, v.to_string());
        }
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} formulas: {} valid, {} invalid, {} failures ({:.1?})",
            self.formulas,
            self.valid,
            self.invalid,
            self.total_failures(),
            self.elapsed
        )?;
        writeln!(
            f,
            "largest search {} nodes, depth {}; {} interleaved transitional premises; largest model {} worlds",
            self.max_nodes, self.max_depth, self.interleavings, self.largest_model
        )?;
        for (kind, n) in &self.failures {
            writeln!(f, "  {kind}: {n}")?;
        }
        for e in &self.examples {
            writeln!(f, "  {} on `{}`: {}", e.kind, e.formula, e.detail)?;
        }
        Ok(())
    }
}

/// Runs every check on one formula.
pub struct Checker {
    bank: ModelBank,
    config: Config,
}

impl Checker {
    pub fn new(atoms: &[String], oracle_worlds: usize, config: Config) -> Checker {
        Checker {
            bank: ModelBank::new(atoms, oracle_worlds),
            config: Config {
                record: false,
                trace: false,
                ..config
            },
        }
    }

    pub fn check(&self, f: &Formula, report: &mut FuzzReport) {
        report.formulas += 1;
        let u = Universe::new([f]);
        let id = u.id(f).expect("formula interned");
        let seq = Seq::plain(u.empty_set(), u.empty_set().with(id));
        let run = match prove_indexed(&u, &seq, &self.config) {
            Ok(run) => run,
            Err(e) => return report.fail(f, FailureKind::Budget, e.to_string()),
        };
        report.absorb(f, &run.stats);

        let d = f.dual();
        let ud = Universe::new([&d]);
        let did = ud.id(&d).expect("formula interned");
        let dseq = Seq::plain(ud.empty_set().with(did), ud.empty_set());
        match prove_indexed(&ud, &dseq, &self.config) {
            Ok(drun) => {
                report.absorb(f, &drun.stats);
                if drun.status != run.status {
                    report.fail(
                        f,
                        FailureKind::Duality,
                        format!("{:?} here, {:?} for `{d} |-`", run.status, drun.status),
                    );
                }
            }
            Err(e) => report.fail(f, FailureKind::Budget, format!("dual: {e}")),
        }

        if run.status.is_derivable() {
            report.valid += 1;
            if let Some((m, w)) = self.bank.countermodel(&[], &[f]) {
                report.fail(
                    f,
                    FailureKind::Soundness,
                    format!(
                        "falsified at world {w} of {}",
                        m.to_json().replace(char::is_whitespace, "")
                    ),
                );
            }
            return;
        }
        report.invalid += 1;
        if let Err((kind, e)) = self.countermodel(&u, &seq, f, report) {
            report.fail(f, kind, e);
        }
    }

    fn countermodel(
        &self,
        u: &Universe,
        seq: &Seq,
        f: &Formula,
        report: &mut FuzzReport,
    ) -> Result<(), (FailureKind, String)> {
        use FailureKind::{Countermodel, ModelGraph};
        let mut mgc = Mgc::new(u, &self.config);
        let (g, _) = mgc.build(seq).map_err(|e| (Countermodel, e.to_string()))?;
        report.graphs_verified += g.roots.len();
        for &sort in g.roots.keys() {
            verify_indexed(u, &g, sort, seq).map_err(|e| (ModelGraph, e.to_string()))?;
            if !is_di_tree_indexed(&g, sort) {
                return Err((Countermodel, format!("component {sort} is not a di-tree")));
            }
        }
        let sort = *g
            .roots
            .keys()
            .next()
            .ok_or((Countermodel, "empty model graph".to_string()))?;
        let (m, w) = model_indexed(u, &g, sort).map_err(|e| (Countermodel, e.to_string()))?;
        report.largest_model = report.largest_model.max(m.len());
        let public = Sequent::from_formulas([], [f.clone()]);
        match m.falsifies(w, &public) {
            Ok(true) => Ok(()),
            Ok(false) => Err((
                Countermodel,
                "model does not falsify the formula at its root".into(),
            )),
            Err(e) => Err((Countermodel, e.to_string())),
        }
    }
}

/// Checks every formula over the first `atoms` atom names with at most
/// `max_connectives` connectives. `progress` is called every 100k formulas.
pub fn fuzz(opts: &FuzzOptions, mut progress: impl FnMut(&FuzzReport)) -> FuzzReport {
    let start = Instant::now();
    let names = atom_names(opts.atoms);
    let checker = Checker::new(&names, opts.oracle_worlds, opts.config.clone());
    let mut report = FuzzReport::default();
    for f in enumerate_formulas(&names, opts.max_connectives) {
        checker.check(&f, &mut report);
        if report.formulas % 100_000 == 0 {
            report.elapsed = start.elapsed();
            progress(&report);
        }
    }
    report.elapsed = start.elapsed();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequent::RuleMutation;

    #[test]
    fn small_corpus_is_clean() {
        let opts = FuzzOptions {
            atoms: 1,
            max_connectives: 3,
            ..FuzzOptions::default()
        };
        let report = fuzz(&opts, |_| {});
        assert_eq!(report.total_failures(), 0, "{report}");
        assert_eq!(
            report.formulas as u128,
            crate::formula::count_formulas(1, 3)
        );
        assert!(report.valid > 0 && report.invalid > 0);
    }

    #[test]
    fn mutations_are_caught() {
        for mutation in [
            RuleMutation::OrLDropsSecondPremise,
            RuleMutation::ImpRKeepsContext,
        ] {
            let opts = FuzzOptions {
                atoms: 1,
                max_connectives: 3,
                config: Config {
                    mutation: Some(mutation),
                    ..Config::quiet()
                },
                ..FuzzOptions::default()
            };
            let report = fuzz(&opts, |_| {});
            assert!(report.total_failures() > 0, "{mutation:?} went unnoticed");
        }
    }
}
