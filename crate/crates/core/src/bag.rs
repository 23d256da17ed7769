//! Graph model for weighted bipolar argumentation: arguments carrying an
//! initial weight in `[0,1]` plus two independent edge relations, attack and
//! support.
//!
//! A [`Bag`] is immutable after construction (use [`BagBuilder`] or the text
//! format in [`crate::format`]) and safe to share across concurrent solver
//! runs.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::format::round_significant;

/// Dense index of an argument inside its [`Bag`].
pub type ArgId = usize;

/// Which of the two edge relations an edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Attack,
    Support,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeKind::Attack => write!(f, "attack"),
            EdgeKind::Support => write!(f, "support"),
        }
    }
}

/// Errors from building or parsing a [`Bag`].
#[derive(Debug, Error)]
pub enum BagError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate argument `{0}`")]
    DuplicateArgument(String),
    #[error("invalid argument name `{0}`: names must be non-empty and free of whitespace, commas and parentheses")]
    InvalidName(String),
    #[error("weight {weight} of argument `{name}` is outside [0,1]")]
    WeightOutOfRange { name: String, weight: f64 },
    #[error("edge endpoint `{0}` is not a declared argument")]
    UndeclaredEndpoint(String),
    #[error("argument id {0} is out of range")]
    IdOutOfRange(ArgId),
    #[error("duplicate {kind} edge {from} -> {to}")]
    DuplicateEdge {
        kind: EdgeKind,
        from: String,
        to: String,
    },
    #[error("pseudocount weight needs at least one nonzero count")]
    ZeroCounts,
    #[error("unknown fixture `{0}` (expected `stock` or `edemocracy`)")]
    UnknownFixture(String),
}

/// One argument: dense id, unique name and initial weight w(i) in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Argument {
    pub id: ArgId,
    pub name: String,
    pub weight: f64,
}

fn validate_name(name: &str) -> Result<(), BagError> {
    let bad = name.is_empty()
        || name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '(' | ')'));
    if bad {
        Err(BagError::InvalidName(name.to_owned()))
    } else {
        Ok(())
    }
}

/// Incremental constructor for [`Bag`]; validates every invariant on the way.
#[derive(Debug, Default)]
pub struct BagBuilder {
    arguments: Vec<Argument>,
    index: HashMap<String, ArgId>,
    attacks: Vec<(ArgId, ArgId)>,
    supports: Vec<(ArgId, ArgId)>,
    attack_set: HashSet<(ArgId, ArgId)>,
    support_set: HashSet<(ArgId, ArgId)>,
}

impl BagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares an argument and returns its dense id.
    pub fn argument(&mut self, name: impl Into<String>, weight: f64) -> Result<ArgId, BagError> {
        let name = name.into();
        validate_name(&name)?;
        if self.index.contains_key(&name) {
            return Err(BagError::DuplicateArgument(name));
        }
        if !(0.0..=1.0).contains(&weight) || !weight.is_finite() {
            return Err(BagError::WeightOutOfRange { name, weight });
        }
        let id = self.arguments.len();
        self.index.insert(name.clone(), id);
        self.arguments.push(Argument { id, name, weight });
        Ok(id)
    }

    pub fn id_of(&self, name: &str) -> Option<ArgId> {
        self.index.get(name).copied()
    }

    /// Adds `source` as an attacker of `target`. Self-loops are allowed;
    /// repeating a pair within the attack relation is an error.
    pub fn attack(&mut self, source: ArgId, target: ArgId) -> Result<(), BagError> {
        self.edge(EdgeKind::Attack, source, target)
    }

    /// Adds `source` as a supporter of `target`. The same pair may also be
    /// present in the attack relation; the relations are independent.
    pub fn support(&mut self, source: ArgId, target: ArgId) -> Result<(), BagError> {
        self.edge(EdgeKind::Support, source, target)
    }

    fn edge(&mut self, kind: EdgeKind, source: ArgId, target: ArgId) -> Result<(), BagError> {
        for id in [source, target] {
            if id >= self.arguments.len() {
                return Err(BagError::IdOutOfRange(id));
            }
        }
        let (list, set) = match kind {
            EdgeKind::Attack => (&mut self.attacks, &mut self.attack_set),
            EdgeKind::Support => (&mut self.supports, &mut self.support_set),
        };
        if !set.insert((source, target)) {
            return Err(BagError::DuplicateEdge {
                kind,
                from: self.arguments[source].name.clone(),
                to: self.arguments[target].name.clone(),
            });
        }
        list.push((source, target));
        Ok(())
    }

    pub fn build(self) -> Bag {
        let n = self.arguments.len();
        let mut attackers_of = vec![Vec::new(); n];
        let mut supporters_of = vec![Vec::new(); n];
        for &(src, tgt) in &self.attacks {
            attackers_of[tgt].push(src);
        }
        for &(src, tgt) in &self.supports {
            supporters_of[tgt].push(src);
        }
        Bag {
            arguments: self.arguments,
            index: self.index,
            attacks: self.attacks,
            supports: self.supports,
            attackers_of,
            supporters_of,
        }
    }
}

/// A weighted bipolar argumentation graph.
///
/// Arguments are kept in declaration order; edges keep insertion order but
/// behave as sets (no duplicates within a relation). Per-argument adjacency
/// (attackers/supporters, i.e. the edge *sources* pointing at an argument)
/// is precomputed at build time.
#[derive(Debug, Clone)]
pub struct Bag {
    arguments: Vec<Argument>,
    index: HashMap<String, ArgId>,
    attacks: Vec<(ArgId, ArgId)>,
    supports: Vec<(ArgId, ArgId)>,
    attackers_of: Vec<Vec<ArgId>>,
    supporters_of: Vec<Vec<ArgId>>,
}

impl Bag {
    /// The graph with no arguments and no edges.
    pub fn empty() -> Self {
        BagBuilder::new().build()
    }

    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    pub fn arguments(&self) -> &[Argument] {
        &self.arguments
    }

    pub fn argument(&self, id: ArgId) -> &Argument {
        &self.arguments[id]
    }

    pub fn name(&self, id: ArgId) -> &str {
        &self.arguments[id].name
    }

    pub fn weight(&self, id: ArgId) -> f64 {
        self.arguments[id].weight
    }

    /// Initial weights in argument order; the solver's starting state.
    pub fn weights(&self) -> Vec<f64> {
        self.arguments.iter().map(|a| a.weight).collect()
    }

    pub fn id_of(&self, name: &str) -> Option<ArgId> {
        self.index.get(name).copied()
    }

    pub fn attacks(&self) -> &[(ArgId, ArgId)] {
        &self.attacks
    }

    pub fn supports(&self) -> &[(ArgId, ArgId)] {
        &self.supports
    }

    pub fn attack_count(&self) -> usize {
        self.attacks.len()
    }

    pub fn support_count(&self) -> usize {
        self.supports.len()
    }

    /// Ids of the arguments attacking `id`.
    pub fn attackers(&self, id: ArgId) -> &[ArgId] {
        &self.attackers_of[id]
    }

    /// Ids of the arguments supporting `id`.
    pub fn supporters(&self, id: ArgId) -> &[ArgId] {
        &self.supporters_of[id]
    }

    pub fn has_parents(&self, id: ArgId) -> bool {
        !self.attackers_of[id].is_empty() || !self.supporters_of[id].is_empty()
    }

    /// Structural equality: same names in the same order, weights equal to
    /// six significant digits, and identical edge sets.
    pub fn structural_eq(&self, other: &Bag) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let args_match = self.arguments.iter().zip(&other.arguments).all(|(a, b)| {
            a.name == b.name && round_significant(a.weight, 6) == round_significant(b.weight, 6)
        });
        if !args_match {
            return false;
        }
        let as_set = |edges: &[(ArgId, ArgId)]| edges.iter().copied().collect::<HashSet<_>>();
        as_set(&self.attacks) == as_set(&other.attacks)
            && as_set(&self.supports) == as_set(&other.supports)
    }
}

/// Weight from historical true/false counts with pseudocount bias:
/// `(t + t_bias) / (t + t_bias + f + f_bias)`.
///
/// With `t_bias == f_bias` and no data the weight is 0.5; the larger the
/// bias total, the more data it takes to move away from it.
pub fn weight_from_counts(t: u64, f: u64, t_bias: u64, f_bias: u64) -> Result<f64, BagError> {
    let denom = t + t_bias + f + f_bias;
    if denom == 0 {
        return Err(BagError::ZeroCounts);
    }
    Ok((t + t_bias) as f64 / denom as f64)
}

/// The two worked example graphs shipped with the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    /// Buy/sell decision graph: 7 arguments, 6 attacks, 4 supports, cyclic
    /// (Buy and Sell attack each other).
    Stock,
    /// Council budget e-democracy graph: 9 arguments, 4 attacks, 3 supports,
    /// acyclic.
    Edemocracy,
}

impl Fixture {
    pub const ALL: [Fixture; 2] = [Fixture::Stock, Fixture::Edemocracy];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Stock => "stock",
            Fixture::Edemocracy => "edemocracy",
        }
    }

    pub fn bag(self) -> Bag {
        match self {
            Fixture::Stock => stock_bag(),
            Fixture::Edemocracy => edemocracy_bag(),
        }
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = BagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stock" => Ok(Fixture::Stock),
            "edemocracy" => Ok(Fixture::Edemocracy),
            other => Err(BagError::UnknownFixture(other.to_owned())),
        }
    }
}

/// Returns a named example graph.
pub fn fixture(which: Fixture) -> Bag {
    which.bag()
}

fn stock_bag() -> Bag {
    let mut b = BagBuilder::new();
    let buy = b.argument("Buy", 0.5).unwrap();
    let sell = b.argument("Sell", 0.5).unwrap();
    let a1 = b.argument("1", 0.8).unwrap();
    let a2 = b.argument("2", 0.7).unwrap();
    let a3 = b.argument("3", 0.3).unwrap();
    let a4 = b.argument("4", 0.9).unwrap();
    let a5 = b.argument("5", 0.9).unwrap();
    for (s, t) in [
        (buy, sell),
        (sell, buy),
        (a2, a1),
        (a3, a2),
        (a4, a3),
        (a5, a1),
    ] {
        b.attack(s, t).unwrap();
    }
    for (s, t) in [(a1, sell), (a2, buy), (a4, a2), (a5, buy)] {
        b.support(s, t).unwrap();
    }
    b.build()
}

fn edemocracy_bag() -> Bag {
    let mut b = BagBuilder::new();
    let a1 = b.argument("A1", 0.5).unwrap();
    let a2 = b.argument("A2", 0.5).unwrap();
    let p1 = b.argument("P1", 0.7).unwrap();
    let p2 = b.argument("P2", 0.5).unwrap();
    let p3 = b.argument("P3", 0.9).unwrap();
    let c1 = b.argument("C1", 0.2).unwrap();
    let c2 = b.argument("C2", 0.2).unwrap();
    let c3 = b.argument("C3", 0.6).unwrap();
    let c4 = b.argument("C4", 0.5).unwrap();
    for (s, t) in [(c1, a2), (c2, p2), (c3, p2), (c4, p2)] {
        b.attack(s, t).unwrap();
    }
    for (s, t) in [(p1, a1), (p2, a1), (p3, a2)] {
        b.support(s, t).unwrap();
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_rejects_duplicate_name() {
        let mut b = BagBuilder::new();
        b.argument("a", 0.5).unwrap();
        assert!(matches!(
            b.argument("a", 0.3),
            Err(BagError::DuplicateArgument(n)) if n == "a"
        ));
    }

    #[test]
    fn builder_rejects_bad_names() {
        for bad in ["", "a b", "a,b", "a(b", "a)b", " "] {
            let mut b = BagBuilder::new();
            assert!(
                matches!(b.argument(bad, 0.5), Err(BagError::InvalidName(_))),
                "name {bad:?} should be rejected"
            );
        }
        // dots, slashes, unicode are all fine
        for ok in ["a.b", "x/y", "ärg", "A_1-2"] {
            let mut b = BagBuilder::new();
            assert!(
                b.argument(ok, 0.5).is_ok(),
                "name {ok:?} should be accepted"
            );
        }
    }

    #[test]
    fn builder_rejects_out_of_range_weight() {
        for w in [-0.1, 1.1, f64::NAN, f64::INFINITY] {
            let mut b = BagBuilder::new();
            assert!(matches!(
                b.argument("a", w),
                Err(BagError::WeightOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn builder_rejects_unknown_endpoint_and_duplicate_edge() {
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.5).unwrap();
        let c = b.argument("c", 0.5).unwrap();
        assert!(matches!(b.attack(a, 7), Err(BagError::IdOutOfRange(7))));
        b.attack(a, c).unwrap();
        assert!(matches!(
            b.attack(a, c),
            Err(BagError::DuplicateEdge {
                kind: EdgeKind::Attack,
                ..
            })
        ));
        // the same pair in the other relation is fine
        b.support(a, c).unwrap();
    }

    #[test]
    fn self_loops_are_accepted() {
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.5).unwrap();
        b.attack(a, a).unwrap();
        b.support(a, a).unwrap();
        let bag = b.build();
        assert_eq!(bag.attackers(a), &[a]);
        assert_eq!(bag.supporters(a), &[a]);
    }

    #[test]
    fn adjacency_matches_edge_sets() {
        let bag = fixture(Fixture::Stock);
        let buy = bag.id_of("Buy").unwrap();
        let sell = bag.id_of("Sell").unwrap();
        assert_eq!(bag.attackers(sell), &[buy]);
        let mut sup_buy = bag.supporters(buy).to_vec();
        sup_buy.sort_unstable();
        assert_eq!(
            sup_buy,
            vec![bag.id_of("2").unwrap(), bag.id_of("5").unwrap()]
        );
        // every adjacency entry is backed by an edge and vice versa
        let mut derived_attacks: Vec<(ArgId, ArgId)> = Vec::new();
        for id in 0..bag.len() {
            for &src in bag.attackers(id) {
                derived_attacks.push((src, id));
            }
        }
        let mut declared = bag.attacks().to_vec();
        derived_attacks.sort_unstable();
        declared.sort_unstable();
        assert_eq!(derived_attacks, declared);
    }

    #[test]
    fn weight_from_counts_examples() {
        let w = weight_from_counts(5, 2, 1, 1).unwrap();
        assert!((w - 6.0 / 9.0).abs() < 1e-12);
        assert!((w - 0.66).abs() < 0.01);

        let w = weight_from_counts(5, 2, 10, 10).unwrap();
        assert!((w - 15.0 / 27.0).abs() < 1e-12);
        assert!((w - 0.55).abs() < 0.01);

        assert_eq!(weight_from_counts(0, 0, 1, 1).unwrap(), 0.5);
        assert!(matches!(
            weight_from_counts(0, 0, 0, 0),
            Err(BagError::ZeroCounts)
        ));
    }

    #[test]
    fn stock_fixture_shape() {
        let bag = fixture(Fixture::Stock);
        assert_eq!(bag.len(), 7);
        assert_eq!(bag.attack_count(), 6);
        assert_eq!(bag.support_count(), 4);
        let names: Vec<_> = bag.arguments().iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["Buy", "Sell", "1", "2", "3", "4", "5"]);
        assert_eq!(bag.weight(bag.id_of("1").unwrap()), 0.8);
    }

    #[test]
    fn edemocracy_fixture_shape() {
        let bag = fixture(Fixture::Edemocracy);
        assert_eq!(bag.len(), 9);
        assert_eq!(bag.attack_count(), 4);
        assert_eq!(bag.support_count(), 3);
        let p2 = bag.id_of("P2").unwrap();
        assert_eq!(bag.attackers(p2).len(), 3);
        assert!(bag.supporters(p2).is_empty());
    }

    #[test]
    fn fixture_names_round_trip() {
        for f in Fixture::ALL {
            assert_eq!(f.name().parse::<Fixture>().unwrap(), f);
        }
        assert!(matches!(
            "nope".parse::<Fixture>(),
            Err(BagError::UnknownFixture(_))
        ));
    }

    #[test]
    fn structural_eq_detects_differences() {
        let a = fixture(Fixture::Stock);
        let mut builder = BagBuilder::new();
        for arg in a.arguments() {
            builder.argument(arg.name.clone(), arg.weight).unwrap();
        }
        for &(s, t) in a.attacks() {
            builder.attack(s, t).unwrap();
        }
        // drop one support
        for &(s, t) in &a.supports()[..3] {
            builder.support(s, t).unwrap();
        }
        let b = builder.build();
        assert!(!a.structural_eq(&b));
        assert!(a.structural_eq(&a.clone()));
    }
}
