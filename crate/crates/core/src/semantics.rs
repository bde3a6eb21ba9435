//! Finite Kripke models, forcing, and brute-force countermodel search.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::formula::{Formula, FormulaSet};
use crate::sequent::{ExtendedFormula, Sequent};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub id: usize,
    #[serde(default)]
    pub atoms: Vec<String>,
}

/// The JSON shape of a model: worlds with their true atoms, plus generating
/// edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub worlds: Vec<WorldSpec>,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
}

/// A finite preorder with a persistent valuation. The stored relation is the
/// reflexive-transitive closure of the given edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    ids: Vec<usize>,
    index: BTreeMap<usize, usize>,
    atoms: Vec<BTreeSet<String>>,
    edges: Vec<(usize, usize)>,
    /// `rel[a][b]` iff world index a sees world index b.
    rel: Vec<Vec<bool>>,
}

impl KripkeModel {
    pub fn new(
        worlds: impl IntoIterator<Item = (usize, BTreeSet<String>)>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<KripkeModel, ModelError> {
        let mut ids = Vec::new();
        let mut index = BTreeMap::new();
        let mut atoms = Vec::new();
        for (id, a) in worlds {
            if index.insert(id, ids.len()).is_some() {
                return Err(ModelError::DuplicateWorld(id));
            }
            ids.push(id);
            atoms.push(a);
        }
        if ids.is_empty() {
            return Err(ModelError::Empty);
        }
        let n = ids.len();
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(a, b) in &edges {
            match (index.get(&a), index.get(&b)) {
                (Some(&x), Some(&y)) => rel[x][y] = true,
                _ => return Err(ModelError::UnknownWorld(a, b)),
            }
        }
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
        let model = KripkeModel {
            ids,
            index,
            atoms,
            edges,
            rel,
        };
        model.check_atomic_persistence()?;
        Ok(model)
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<KripkeModel, ModelError> {
        KripkeModel::new(
            spec.worlds
                .iter()
                .map(|w| (w.id, w.atoms.iter().cloned().collect())),
            spec.edges.iter().copied(),
        )
    }

    pub fn from_json(text: &str) -> Result<KripkeModel, ModelError> {
        let spec: ModelSpec =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        KripkeModel::from_spec(&spec)
    }

    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            worlds: self
                .ids
                .iter()
                .zip(&self.atoms)
                .map(|(&id, a)| WorldSpec {
                    id,
                    atoms: a.iter().cloned().collect(),
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("model serializes")
    }

    fn check_atomic_persistence(&self) -> Result<(), ModelError> {
        let n = self.ids.len();
        for a in 0..n {
            for b in 0..n {
                if self.rel[a][b] {
                    if let Some(atom) = self.atoms[a].difference(&self.atoms[b]).next() {
                        return Err(ModelError::NotPersistent {
                            atom: atom.clone(),
                            from: self.ids[a],
                            to: self.ids[b],
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn worlds(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Generating edges as given; the relation is their closure.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn idx(&self, w: usize) -> Result<usize, ModelError> {
        self.index
            .get(&w)
            .copied()
            .ok_or(ModelError::NoSuchWorld(w))
    }

    pub fn related(&self, a: usize, b: usize) -> Result<bool, ModelError> {
        Ok(self.rel[self.idx(a)?][self.idx(b)?])
    }

    pub fn true_atoms(&self, w: usize) -> Result<&BTreeSet<String>, ModelError> {
        Ok(&self.atoms[self.idx(w)?])
    }

    /// Truth of `f` at every world, by world index.
    fn truth(&self, f: &Formula, memo: &mut HashMap<Formula, Vec<bool>>) -> Vec<bool> {
        if let Some(v) = memo.get(f) {
            return v.clone();
        }
        let n = self.ids.len();
        let out: Vec<bool> = match f {
            Formula::Atom(a) => self.atoms.iter().map(|s| s.contains(a)).collect(),
            Formula::Top => vec![true; n],
            Formula::Bot => vec![false; n],
            Formula::And(l, r) => {
                let (l, r) = (self.truth(l, memo), self.truth(r, memo));
                (0..n).map(|w| l[w] && r[w]).collect()
            }
            Formula::Or(l, r) => {
                let (l, r) = (self.truth(l, memo), self.truth(r, memo));
                (0..n).map(|w| l[w] || r[w]).collect()
            }
            Formula::Imp(l, r) => {
                let (l, r) = (self.truth(l, memo), self.truth(r, memo));
                (0..n)
                    .map(|w| (0..n).all(|v| !self.rel[w][v] || !l[v] || r[v]))
                    .collect()
            }
            Formula::Excl(l, r) => {
                let (l, r) = (self.truth(l, memo), self.truth(r, memo));
                (0..n)
                    .map(|w| (0..n).any(|v| self.rel[v][w] && l[v] && !r[v]))
                    .collect()
            }
        };
        memo.insert(f.clone(), out.clone());
        out
    }

    pub fn forces(&self, w: usize, f: &Formula) -> Result<bool, ModelError> {
        let i = self.idx(w)?;
        Ok(self.truth(f, &mut HashMap::new())[i])
    }

    /// Forcing of an extended formula read directly: `\/S` holds if some
    /// member is wholly forced, `/\P` if every member has a forced element.
    pub fn forces_extended(&self, w: usize, f: &ExtendedFormula) -> Result<bool, ModelError> {
        let i = self.idx(w)?;
        let mut memo = HashMap::new();
        let mut at = |g: &Formula| self.truth(g, &mut memo)[i];
        Ok(match f {
            ExtendedFormula::Plain(g) => at(g),
            ExtendedFormula::BigOr(fam) => fam.iter().any(|m| m.iter().all(&mut at)),
            ExtendedFormula::BigAnd(fam) => fam.iter().all(|m| m.iter().any(&mut at)),
        })
    }

    /// Whether world `w` forces every formula on the left and rejects every
    /// formula on the right. Extended formulas go through their ordinary
    /// translations.
    pub fn falsifies(&self, w: usize, seq: &Sequent) -> Result<bool, ModelError> {
        let i = self.idx(w)?;
        let mut memo = HashMap::new();
        let mut at = |g: &ExtendedFormula| self.truth(&g.to_formula(), &mut memo)[i];
        Ok(seq.lhs.iter().all(&mut at) && !seq.rhs.iter().any(&mut at))
    }

    /// Persistence of forced formulas along the relation and of rejected
    /// formulas against it. Returns the first failure as
    /// (formula, from, to).
    pub fn check_persistence(&self, fs: &FormulaSet) -> Result<(), (Formula, usize, usize)> {
        let mut memo = HashMap::new();
        let n = self.ids.len();
        for f in fs {
            let t = self.truth(f, &mut memo);
            for a in 0..n {
                for b in 0..n {
                    // Forward for forced, and by contraposition backward for
                    // rejected: a R b, a forces f, b rejects f is the only
                    // way either can fail.
                    if self.rel[a][b] && t[a] && !t[b] {
                        return Err((f.clone(), self.ids[a], self.ids[b]));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Preorders on `n` labelled worlds as adjacency bitmasks over `n * n`
/// (bit `a * n + b` for a R b), in increasing mask order.
pub fn preorders(n: usize) -> Vec<u32> {
    let off: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|(a, b)| a != b)
        .collect();
    let diag: u32 = (0..n).map(|a| 1 << (a * n + a)).sum();
    let mut out = Vec::new();
    for m in 0u32..(1 << off.len()) {
        let mut rel = diag;
        for (k, (a, b)) in off.iter().enumerate() {
            if m >> k & 1 == 1 {
                rel |= 1 << (a * n + b);
            }
        }
        let has = |a: usize, b: usize| rel >> (a * n + b) & 1 == 1;
        let transitive =
            (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(has(a, b) && has(b, c)) || has(a, c))));
        if transitive {
            out.push(rel);
        }
    }
    out.sort_unstable();
    out
}

/// World sets (bitmasks) closed upward under the preorder `rel`.
pub fn up_sets(n: usize, rel: u32) -> Vec<u32> {
    (0u32..1 << n)
        .filter(|&s| {
            (0..n).all(|a| {
                s >> a & 1 == 0 || (0..n).all(|b| rel >> (a * n + b) & 1 == 0 || s >> b & 1 == 1)
            })
        })
        .collect()
}

/// Every choice of one up-set per atom, the first atom varying fastest.
fn valuations(ups: &[u32], k: usize) -> Vec<Vec<u32>> {
    let total = ups.len().pow(k as u32);
    (0..total)
        .map(|code| {
            let mut c = code;
            (0..k)
                .map(|_| {
                    let v = ups[c % ups.len()];
                    c /= ups.len();
                    v
                })
                .collect()
        })
        .collect()
}

fn model_from_masks(n: usize, rel: u32, atoms: &[String], vals: &[u32]) -> KripkeModel {
    let worlds = (0..n).map(|w| {
        let set = atoms
            .iter()
            .zip(vals)
            .filter(|(_, v)| *v >> w & 1 == 1)
            .map(|(a, _)| a.clone())
            .collect();
        (w, set)
    });
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && rel >> (a * n + b) & 1 == 1)
        .collect();
    KripkeModel::new(worlds, edges).expect("enumerated models are persistent")
}

/// Exhaustive search for a model of at most `max_worlds` worlds over
/// `atoms` falsifying the sequent at some world. Models are visited by world
/// count, then relation mask, then valuation mask; worlds in index order.
pub fn bounded_countermodel(
    seq: &Sequent,
    max_worlds: usize,
    atoms: &BTreeSet<String>,
) -> Option<(KripkeModel, usize)> {
    let atoms: Vec<String> = atoms.iter().cloned().collect();
    for n in 1..=max_worlds {
        for rel in preorders(n) {
            for vals in valuations(&up_sets(n, rel), atoms.len()) {
                let m = model_from_masks(n, rel, &atoms, &vals);
                for w in 0..n {
                    if m.falsifies(w, seq).unwrap_or(false) {
                        return Some((m, w));
                    }
                }
            }
        }
    }
    None
}

/// Every model with exactly `worlds` labelled worlds over a fixed atom list,
/// evaluated in parallel: one bit per model, one bit vector per world.
/// Smaller models are covered as well, since forcing at a world only looks
/// at its connected component and the extra worlds can be left unrelated.
pub struct ModelBank {
    atoms: Vec<String>,
    n: usize,
    words: usize,
    /// Per model: relation mask and valuation masks.
    models: Vec<(u32, Vec<u32>)>,
    /// `rel[a * n + b]`: bits of the models where a R b.
    rel: Vec<Vec<u64>>,
    /// `val[atom][w]`.
    val: Vec<Vec<Vec<u64>>>,
    valid: Vec<u64>,
}

type Slices = Vec<Vec<u64>>;

impl ModelBank {
    pub fn new(atoms: &[String], worlds: usize) -> ModelBank {
        let n = worlds;
        let mut models = Vec::new();
        for rel in preorders(n) {
            for vals in valuations(&up_sets(n, rel), atoms.len()) {
                models.push((rel, vals));
            }
        }
        let words = models.len().div_ceil(64);
        let mut rel = vec![vec![0u64; words]; n * n];
        let mut val = vec![vec![vec![0u64; words]; n]; atoms.len()];
        let mut valid = vec![0u64; words];
        for (m, (r, vs)) in models.iter().enumerate() {
            let (wd, bit) = (m / 64, 1u64 << (m % 64));
            valid[wd] |= bit;
            for (pair, slot) in rel.iter_mut().enumerate() {
                if r >> pair & 1 == 1 {
                    slot[wd] |= bit;
                }
            }
            for (a, v) in vs.iter().enumerate() {
                for (w, slot) in val[a].iter_mut().enumerate() {
                    if v >> w & 1 == 1 {
                        slot[wd] |= bit;
                    }
                }
            }
        }
        ModelBank {
            atoms: atoms.to_vec(),
            n,
            words,
            models,
            rel,
            val,
            valid,
        }
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    fn eval(&self, f: &Formula, memo: &mut HashMap<Formula, Slices>) -> Slices {
        if let Some(v) = memo.get(f) {
            return v.clone();
        }
        let (n, words) = (self.n, self.words);
        let zero = || vec![vec![0u64; words]; n];
        let out = match f {
            Formula::Atom(a) => match self.atoms.iter().position(|x| x == a) {
                Some(i) => self.val[i].clone(),
                None => zero(),
            },
            Formula::Top => vec![self.valid.clone(); n],
            Formula::Bot => zero(),
            Formula::And(l, r) | Formula::Or(l, r) => {
                let (l, r) = (self.eval(l, memo), self.eval(r, memo));
                let and = matches!(f, Formula::And(..));
                (0..n)
                    .map(|w| {
                        (0..words)
                            .map(|k| {
                                if and {
                                    l[w][k] & r[w][k]
                                } else {
                                    l[w][k] | r[w][k]
                                }
                            })
                            .collect()
                    })
                    .collect()
            }
            Formula::Imp(l, r) => {
                let (l, r) = (self.eval(l, memo), self.eval(r, memo));
                (0..n)
                    .map(|w| {
                        (0..words)
                            .map(|k| {
                                (0..n).fold(self.valid[k], |acc, v| {
                                    acc & (!self.rel[w * n + v][k] | !l[v][k] | r[v][k])
                                })
                            })
                            .collect()
                    })
                    .collect()
            }
            Formula::Excl(l, r) => {
                let (l, r) = (self.eval(l, memo), self.eval(r, memo));
                (0..n)
                    .map(|w| {
                        (0..words)
                            .map(|k| {
                                (0..n).fold(0, |acc, v| {
                                    acc | (self.rel[v * n + w][k] & l[v][k] & !r[v][k])
                                })
                            })
                            .collect()
                    })
                    .collect()
            }
        };
        memo.insert(f.clone(), out.clone());
        out
    }

    /// Per world, the models in which that world falsifies the sequent.
    fn falsifying(&self, lhs: &[&Formula], rhs: &[&Formula]) -> Slices {
        let mut memo = HashMap::new();
        let mut acc = vec![self.valid.clone(); self.n];
        for f in lhs {
            let t = self.eval(f, &mut memo);
            for (a, tw) in acc.iter_mut().zip(&t) {
                a.iter_mut().zip(tw).for_each(|(x, y)| *x &= y);
            }
        }
        for f in rhs {
            let t = self.eval(f, &mut memo);
            for (a, tw) in acc.iter_mut().zip(&t) {
                a.iter_mut().zip(tw).for_each(|(x, y)| *x &= !y);
            }
        }
        acc
    }

    /// Whether some banked model falsifies the plain sequent at some world.
    pub fn is_falsifiable(&self, lhs: &[&Formula], rhs: &[&Formula]) -> bool {
        self.falsifying(lhs, rhs)
            .iter()
            .any(|w| w.iter().any(|x| *x != 0))
    }

    /// The first banked (model, world) falsifying the sequent.
    pub fn countermodel(&self, lhs: &[&Formula], rhs: &[&Formula]) -> Option<(KripkeModel, usize)> {
        let acc = self.falsifying(lhs, rhs);
        let mut best: Option<(usize, usize)> = None;
        for (w, bits) in acc.iter().enumerate() {
            if let Some((k, x)) = bits.iter().enumerate().find(|(_, x)| **x != 0) {
                let m = k * 64 + x.trailing_zeros() as usize;
                if best.is_none_or(|(bm, _)| m < bm) {
                    best = Some((m, w));
                }
            }
        }
        best.map(|(m, w)| {
            let (rel, vals) = &self.models[m];
            (model_from_masks(self.n, *rel, &self.atoms, vals), w)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::enumerate_formulas;
    use crate::parse::{parse_input, parse_plain};

    fn f(s: &str) -> Formula {
        parse_plain(s).unwrap()
    }

    fn atoms(a: &[&str]) -> BTreeSet<String> {
        a.iter().map(|s| s.to_string()).collect()
    }

    fn chain() -> KripkeModel {
        KripkeModel::new([(0, atoms(&[])), (1, atoms(&["p"]))], [(0, 1)]).unwrap()
    }

    #[test]
    fn forcing_examples() {
        let one = KripkeModel::new([(0, atoms(&["p"]))], []).unwrap();
        assert!(!one.forces(0, &f("p -< p")).unwrap());
        let m = chain();
        assert!(m.forces(1, &f("true -< p")).unwrap());
        assert!(!m.forces(0, &f("p | (p -> false)")).unwrap());
        assert!(m.forces(1, &f("p | (p -> false)")).unwrap());
        assert_eq!(m.forces(7, &f("p")), Err(ModelError::NoSuchWorld(7)));
    }

    #[test]
    fn falsifies_examples() {
        let m = chain();
        assert!(m
            .falsifies(0, &parse_input("p | (p -> false)").unwrap())
            .unwrap());
        assert!(!m.falsifies(0, &parse_input("p |- p").unwrap()).unwrap());
        assert!(!m.falsifies(1, &parse_input("p |- p").unwrap()).unwrap());
        assert!(m.falsifies(0, &parse_input("|-").unwrap()).unwrap());
    }

    #[test]
    fn constructor_enforces_persistence_and_closure() {
        let err = KripkeModel::new([(0, atoms(&["p"])), (1, atoms(&[]))], [(0, 1)]).unwrap_err();
        assert!(matches!(err, ModelError::NotPersistent { .. }));
        let m = KripkeModel::new(
            [(0, atoms(&[])), (1, atoms(&[])), (2, atoms(&[]))],
            [(0, 1), (1, 2)],
        )
        .unwrap();
        assert!(m.related(0, 2).unwrap());
        assert!(m.related(2, 2).unwrap());
        assert!(!m.related(2, 0).unwrap());
        assert!(matches!(
            KripkeModel::new([(0, atoms(&[]))], [(0, 3)]),
            Err(ModelError::UnknownWorld(0, 3))
        ));
        assert_eq!(KripkeModel::new([], []).unwrap_err(), ModelError::Empty);
    }

    #[test]
    fn json_round_trip() {
        let m = chain();
        let back = KripkeModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(matches!(
            KripkeModel::from_json("{"),
            Err(ModelError::Json(_))
        ));
    }

    #[test]
    fn extended_forcing_two_ways() {
        let m = chain();
        let fam = BTreeSet::from([
            [f("p")].into_iter().collect::<FormulaSet>(),
            [f("true -< p"), f("p -> false")].into_iter().collect(),
        ]);
        for e in [
            ExtendedFormula::BigOr(fam.clone()),
            ExtendedFormula::BigAnd(fam),
        ] {
            for w in [0, 1] {
                assert_eq!(
                    m.forces_extended(w, &e).unwrap(),
                    m.forces(w, &e.to_formula()).unwrap()
                );
            }
        }
    }

    #[test]
    fn preorder_counts() {
        // Labelled preorders on 1, 2, 3 and 4 points.
        let counts: Vec<usize> = (1..=4).map(|n| preorders(n).len()).collect();
        assert_eq!(counts, vec![1, 4, 29, 355]);
    }

    #[test]
    fn oracle_examples() {
        let em = parse_input("p | (p -> false)").unwrap();
        let (m, w) = bounded_countermodel(&em, 2, &atoms(&["p"])).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.falsifies(w, &em).unwrap());
        assert!(bounded_countermodel(&parse_input("true").unwrap(), 3, &atoms(&["p"])).is_none());
        let interaction = parse_input("p -> (q | (r -> ((p -< q) & r)))").unwrap();
        assert!(bounded_countermodel(&interaction, 3, &atoms(&["p", "q", "r"])).is_none());
    }

    #[test]
    fn random_models_are_persistent() {
        use proptest::prelude::*;
        use proptest::test_runner::{Config, TestRunner};
        let fs: FormulaSet = enumerate_formulas(&["p".to_string(), "q".to_string()], 2).collect();
        let mut runner = TestRunner::new(Config::with_cases(1000));
        let strategy = (1usize..=4, any::<u32>(), any::<u32>(), any::<u32>());
        runner
            .run(&strategy, |(n, rsel, p, q)| {
                let pre = preorders(n);
                let rel = pre[rsel as usize % pre.len()];
                let ups = up_sets(n, rel);
                let vals = [ups[p as usize % ups.len()], ups[q as usize % ups.len()]];
                let m = model_from_masks(n, rel, &["p".into(), "q".into()], &vals);
                prop_assert!(m.check_persistence(&fs).is_ok());
                Ok(())
            })
            .unwrap();
    }

    #[test]
    fn bank_agrees_with_enumeration() {
        let names = ["p".to_string(), "q".to_string()];
        let bank = ModelBank::new(&names, 3);
        // Labelled preorders on three points, two persistent atoms each.
        assert_eq!(bank.len(), 632);
        let atoms: BTreeSet<String> = names.iter().cloned().collect();
        for g in enumerate_formulas(&names, 2) {
            let seq = Sequent::from_formulas([], [g.clone()]);
            let slow = bounded_countermodel(&seq, 3, &atoms);
            assert_eq!(bank.is_falsifiable(&[], &[&g]), slow.is_some(), "{g}");
            if let Some((m, w)) = bank.countermodel(&[], &[&g]) {
                assert!(m.falsifies(w, &seq).unwrap());
            }
        }
    }
}
