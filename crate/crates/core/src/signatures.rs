//! Relational signatures, finite structures over them, and the axioms that
//! single out graphs, partial orders and matroids.
//!
//! Elements are addressed by dense indices internally. Labels are kept on the
//! structure and are what every external format and report uses.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Edge symbol of the graph signature.
pub const EDGE: &str = "E";
/// Order symbol of the poset signature.
pub const LEQ: &str = "<=";

/// Name of the `n`-ary independence predicate of the matroid signature.
pub fn matroid_symbol(n: usize) -> String {
    format!("P{n}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Graph,
    Poset,
    Matroid,
    Generic,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Graph => "graph",
            Kind::Poset => "poset",
            Kind::Matroid => "matroid",
            Kind::Generic => "generic",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// A finite relational signature. Equality is always available and is not
/// listed here.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let mut seen = HashSet::new();
        for symbol in &symbols {
            if symbol.arity == 0 {
                return Err(Error::ZeroArity(symbol.name.clone()));
            }
            if !seen.insert(symbol.name.as_str()) {
                return Err(Error::DuplicateSymbol(symbol.name.clone()));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn graph() -> Self {
        Signature {
            symbols: vec![Symbol::new(EDGE, 2)],
        }
    }

    pub fn poset() -> Self {
        Signature {
            symbols: vec![Symbol::new(LEQ, 2)],
        }
    }

    /// `{P1/1, ..., Pm/m}`.
    pub fn matroid(max_arity: usize) -> Self {
        Signature {
            symbols: (1..=max_arity)
                .map(|n| Symbol::new(matroid_symbol(n), n))
                .collect(),
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.position(name).map(|i| self.symbols[i].arity)
    }

    /// Checks that this is the canonical signature for `kind`.
    pub fn check_kind(&self, kind: Kind) -> Result<()> {
        let expected = match kind {
            Kind::Generic => return Ok(()),
            Kind::Graph => Signature::graph(),
            Kind::Poset => Signature::poset(),
            Kind::Matroid => {
                let m = self.symbols.len().max(1);
                let mut ours: Vec<_> = self.symbols.clone();
                ours.sort_by_key(|s| s.arity);
                if ours == Signature::matroid(m).symbols {
                    return Ok(());
                }
                return Err(Error::SignatureMismatch {
                    kind,
                    expected: "{P1/1, ..., Pm/m} for some m >= 1".to_string(),
                    found: self.to_string(),
                });
            }
        };
        if *self == expected {
            Ok(())
        } else {
            Err(Error::SignatureMismatch {
                kind,
                expected: expected.to_string(),
                found: self.to_string(),
            })
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}/{}", s.name, s.arity)?;
        }
        f.write_str("}")
    }
}

/// A finite universe together with an interpretation table per symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    signature: Signature,
    universe: Vec<String>,
    tables: Vec<BTreeSet<Vec<usize>>>,
}

impl FiniteStructure {
    /// `tables[i]` interprets `signature.symbols()[i]`.
    pub fn new(
        signature: Signature,
        universe: Vec<String>,
        tables: Vec<BTreeSet<Vec<usize>>>,
    ) -> Result<Self> {
        if universe.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let mut seen = HashSet::new();
        for label in &universe {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateElement(label.clone()));
            }
        }
        assert_eq!(
            tables.len(),
            signature.symbols.len(),
            "one table per signature symbol"
        );
        let size = universe.len();
        for (symbol, table) in signature.symbols.iter().zip(&tables) {
            for tuple in table {
                if tuple.len() != symbol.arity {
                    return Err(Error::ArityMismatch {
                        symbol: symbol.name.clone(),
                        expected: symbol.arity,
                        found: tuple.len(),
                    });
                }
                if let Some(&index) = tuple.iter().find(|&&e| e >= size) {
                    return Err(Error::ElementOutOfRange { index, size });
                }
            }
        }
        Ok(FiniteStructure {
            signature,
            universe,
            tables,
        })
    }

    /// Builds a structure from labelled tuples. Symbols missing from
    /// `relations` get empty tables.
    pub fn from_labels<S, T>(
        signature: Signature,
        universe: &[S],
        relations: &[(&str, Vec<Vec<T>>)],
    ) -> Result<Self>
    where
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let universe: Vec<String> = universe.iter().map(|s| s.as_ref().to_string()).collect();
        let lookup = |label: &str| {
            universe
                .iter()
                .position(|u| u == label)
                .ok_or_else(|| Error::UnknownElement(label.to_string()))
        };
        let mut tables = vec![BTreeSet::new(); signature.symbols.len()];
        for (name, tuples) in relations {
            let pos = signature
                .position(name)
                .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
            for tuple in tuples {
                let tuple = tuple
                    .iter()
                    .map(|l| lookup(l.as_ref()))
                    .collect::<Result<Vec<_>>>()?;
                tables[pos].insert(tuple);
            }
        }
        FiniteStructure::new(signature, universe, tables)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn label(&self, element: usize) -> &str {
        &self.universe[element]
    }

    pub fn labels(&self, elements: &[usize]) -> Vec<String> {
        elements.iter().map(|&e| self.universe[e].clone()).collect()
    }

    pub fn element(&self, label: &str) -> Result<usize> {
        self.universe
            .iter()
            .position(|u| u == label)
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn table(&self, symbol: usize) -> &BTreeSet<Vec<usize>> {
        &self.tables[symbol]
    }

    pub fn holds(&self, symbol: usize, tuple: &[usize]) -> bool {
        self.tables[symbol].contains(tuple)
    }

    /// Unknown symbols read as empty relations.
    pub fn holds_named(&self, name: &str, tuple: &[usize]) -> bool {
        match self.signature.position(name) {
            Some(pos) => self.holds(pos, tuple),
            None => false,
        }
    }

    pub fn table_named(&self, name: &str) -> Option<&BTreeSet<Vec<usize>>> {
        self.signature.position(name).map(|pos| &self.tables[pos])
    }
}

/// Graph on `size` vertices labelled `v0, v1, ...`; each undirected edge is
/// stored in both orientations.
pub fn graph_on(size: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
    let labels: Vec<String> = (0..size).map(|i| format!("v{i}")).collect();
    graph_with_labels(labels, edges)
}

pub fn graph_with_labels(
    labels: Vec<String>,
    edges: impl IntoIterator<Item = (usize, usize)>,
) -> Result<Graph> {
    let mut table = BTreeSet::new();
    for (u, v) in edges {
        table.insert(vec![u, v]);
        table.insert(vec![v, u]);
    }
    Graph::try_from(FiniteStructure::new(Signature::graph(), labels, vec![table])?)
}

/// Structure over `{P1, ..., Pk}` (`k = |labels|`) in which `P_n` holds on
/// every ordering of every listed `n`-set. Not validated.
pub fn matroid_from_sets<I>(labels: Vec<String>, sets: I) -> Result<FiniteStructure>
where
    I: IntoIterator<Item = Vec<usize>>,
{
    let m = labels.len();
    let mut tables = vec![BTreeSet::new(); m];
    for set in sets {
        if set.is_empty() || set.len() > m {
            continue;
        }
        for ordering in set.iter().copied().permutations(set.len()) {
            tables[set.len() - 1].insert(ordering);
        }
    }
    FiniteStructure::new(Signature::matroid(m), labels, tables)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    NoLoops,
    Symmetry,
    Reflexivity,
    Antisymmetry,
    Transitivity,
    /// `P_n` never holds on a tuple with a repeated entry.
    DistinctArguments(usize),
    /// Every `(n-1)`-subtuple of an independent `n`-tuple is independent.
    Hereditary(usize),
    /// Independent `n`- and `(n+1)`-tuples: some `y_i` extends the former.
    Exchange(usize),
}

impl Axiom {
    pub fn name(&self) -> String {
        match self {
            Axiom::NoLoops => "no loops".into(),
            Axiom::Symmetry => "symmetry".into(),
            Axiom::Reflexivity => "reflexivity".into(),
            Axiom::Antisymmetry => "antisymmetry".into(),
            Axiom::Transitivity => "transitivity".into(),
            Axiom::DistinctArguments(n) => format!("distinct arguments (P{n})"),
            Axiom::Hereditary(n) => format!("hereditary (P{n})"),
            Axiom::Exchange(n) => format!("exchange (P{n}, P{})", n + 1),
        }
    }

    /// Re-evaluates the axiom instance selected by `witness`. The witness
    /// layout is the list of universally quantified variables in order; for
    /// `Exchange(n)` it is `x_1..x_n` followed by `y_1..y_{n+1}`.
    pub fn holds(&self, s: &FiniteStructure, witness: &[usize]) -> bool {
        let e = |t: &[usize]| s.holds_named(EDGE, t);
        let le = |t: &[usize]| s.holds_named(LEQ, t);
        let p = |t: &[usize]| s.holds_named(&matroid_symbol(t.len()), t);
        match (self, witness) {
            (Axiom::NoLoops, &[x]) => !e(&[x, x]),
            (Axiom::Symmetry, &[x, y]) => !e(&[x, y]) || e(&[y, x]),
            (Axiom::Reflexivity, &[x]) => le(&[x, x]),
            (Axiom::Antisymmetry, &[x, y]) => !(le(&[x, y]) && le(&[y, x])) || x == y,
            (Axiom::Transitivity, &[x, y, z]) => !(le(&[x, y]) && le(&[y, z])) || le(&[x, z]),
            (Axiom::DistinctArguments(n), w) if w.len() == *n => {
                let distinct = w.iter().collect::<HashSet<_>>().len() == w.len();
                distinct || !p(w)
            }
            (Axiom::Hereditary(n), w) if w.len() == *n && *n > 1 => {
                !p(w) || (0..w.len()).all(|i| p(&without(w, i)))
            }
            (Axiom::Exchange(n), w) if w.len() == 2 * n + 1 => {
                let (xs, ys) = w.split_at(*n);
                if !(p(xs) && p(ys)) {
                    return true;
                }
                ys.iter().any(|&y| {
                    let mut extended = xs.to_vec();
                    extended.push(y);
                    p(&extended)
                })
            }
            _ => panic!("witness of length {} does not fit axiom {:?}", witness.len(), self),
        }
    }
}

fn without(tuple: &[usize], skip: usize) -> Vec<usize> {
    tuple
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, &e)| e)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub kind: Kind,
    pub passed: bool,
    pub violations: Vec<Violation>,
}

/// Checks every axiom of `kind` over the whole universe and returns all
/// violations, each with its witness.
pub fn validate(structure: &FiniteStructure, kind: Kind) -> Result<ValidationReport> {
    structure.signature.check_kind(kind)?;
    let mut violations = Vec::new();
    let mut check = |axiom: &Axiom, witness: Vec<usize>| {
        if !axiom.holds(structure, &witness) {
            violations.push(Violation {
                axiom: axiom.clone(),
                witness,
            });
        }
    };
    let k = structure.size();
    match kind {
        Kind::Generic => {}
        Kind::Graph => {
            for x in 0..k {
                check(&Axiom::NoLoops, vec![x]);
            }
            for t in structure.table(0) {
                check(&Axiom::Symmetry, t.clone());
            }
        }
        Kind::Poset => {
            let table = structure.table(0);
            for x in 0..k {
                check(&Axiom::Reflexivity, vec![x]);
            }
            for t in table {
                check(&Axiom::Antisymmetry, t.clone());
            }
            for t in table {
                for u in table.range(vec![t[1], 0]..vec![t[1] + 1, 0]) {
                    check(&Axiom::Transitivity, vec![t[0], t[1], u[1]]);
                }
            }
        }
        Kind::Matroid => {
            let m = structure.signature.symbols.len();
            for n in 1..=m {
                let table = structure.table_named(&matroid_symbol(n)).expect("checked signature");
                for t in table {
                    check(&Axiom::DistinctArguments(n), t.clone());
                    if n > 1 {
                        check(&Axiom::Hereditary(n), t.clone());
                    }
                }
                if n < m {
                    let next = structure
                        .table_named(&matroid_symbol(n + 1))
                        .expect("checked signature");
                    for xs in table {
                        for ys in next {
                            let mut w = xs.clone();
                            w.extend_from_slice(ys);
                            check(&Axiom::Exchange(n), w);
                        }
                    }
                }
            }
        }
    }
    Ok(ValidationReport {
        kind,
        passed: violations.is_empty(),
        violations,
    })
}

fn validated(structure: &FiniteStructure, kind: Kind) -> Result<()> {
    let report = validate(structure, kind)?;
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidStructure {
            kind,
            count: report.violations.len(),
            first: format!("{} at {:?}", v.axiom.name(), structure.labels(&v.witness)),
        }),
    }
}

macro_rules! validated_newtype {
    ($(#[$doc:meta])* $name:ident, $kind:expr) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq)]
        pub struct $name(FiniteStructure);

        impl $name {
            pub fn structure(&self) -> &FiniteStructure {
                &self.0
            }

            pub fn into_structure(self) -> FiniteStructure {
                self.0
            }
        }

        impl TryFrom<FiniteStructure> for $name {
            type Error = Error;

            fn try_from(structure: FiniteStructure) -> Result<Self> {
                validated(&structure, $kind)?;
                Ok($name(structure))
            }
        }

        impl AsRef<FiniteStructure> for $name {
            fn as_ref(&self) -> &FiniteStructure {
                &self.0
            }
        }
    };
}

validated_newtype!(
    /// A structure over `{E/2}` without loops and with a symmetric edge table.
    Graph,
    Kind::Graph
);
validated_newtype!(
    /// A reflexive, antisymmetric, transitive structure over `{<=/2}`.
    Poset,
    Kind::Poset
);
validated_newtype!(
    /// An independence structure over `{P1, ..., Pm}`. Predicates above the
    /// declared cap read as empty; nothing is lost once `m >= |universe|`,
    /// since longer tuples repeat an element.
    Matroid,
    Kind::Matroid
);

impl Graph {
    pub fn size(&self) -> usize {
        self.0.size()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.0.holds(0, &[u, v])
    }

    pub fn neighbours(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.0.table(0).range(vec![u, 0]..vec![u + 1, 0]).map(|t| t[1])
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.0.table(0).len() / 2
    }
}

impl Poset {
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.0.holds(0, &[a, b])
    }
}

impl Matroid {
    pub fn max_arity(&self) -> usize {
        self.0.signature().symbols().len()
    }

    pub fn independent(&self, tuple: &[usize]) -> bool {
        !tuple.is_empty() && self.0.holds_named(&matroid_symbol(tuple.len()), tuple)
    }
}

/// Lexicographically least `(x1, x2, x3)` with `E(x1,x2), E(x2,x3), E(x3,x1)`.
pub fn has_triangle(graph: &Graph) -> Option<[usize; 3]> {
    let k = graph.size();
    for x1 in 0..k {
        for x2 in graph.neighbours(x1) {
            for x3 in graph.neighbours(x2) {
                if graph.adjacent(x3, x1) {
                    return Some([x1, x2, x3]);
                }
            }
        }
    }
    None
}

/// All-pairs shortest path lengths; `None` between different components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distances(Vec<Vec<Option<usize>>>);

impl Distances {
    pub fn get(&self, u: usize, v: usize) -> Option<usize> {
        self.0[u][v]
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn rows(&self) -> &[Vec<Option<usize>>] {
        &self.0
    }
}

pub fn graph_distances(graph: &Graph) -> Distances {
    let k = graph.size();
    let rows = (0..k)
        .map(|source| {
            let mut dist = vec![None; k];
            dist[source] = Some(0);
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                let du = dist[u].expect("queued vertices are reached");
                for v in graph.neighbours(u) {
                    if dist[v].is_none() {
                        dist[v] = Some(du + 1);
                        queue.push_back(v);
                    }
                }
            }
            dist
        })
        .collect();
    Distances(rows)
}

/// The graph on `x0, ..., x{n+1}` with edges `x0 - xi - x{n+1}` for
/// `1 <= i <= n`, i.e. the complete bipartite graph `K_{2,n}`.
pub fn star_bipartite_graph(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::ZeroIndex("star size"));
    }
    let labels = (0..n + 2).map(|i| format!("x{i}")).collect();
    graph_with_labels(labels, (1..=n).flat_map(|i| [(0, i), (i, n + 1)]))
}

/// Graph with an edge `ab` exactly when `P2(a, b)`.
pub fn matroid_underlying_graph(matroid: &Matroid) -> Graph {
    let s = matroid.structure();
    let table = s.table_named(&matroid_symbol(2)).cloned().unwrap_or_default();
    let graph = FiniteStructure::new(Signature::graph(), s.universe().to_vec(), vec![table])
        .expect("P2 tuples are in range");
    Graph::try_from(graph).expect("independent pairs are distinct and symmetric")
}

/// Disjoint union; vertices of the left graph are relabelled `1.x`, of the
/// right graph `2.x`.
pub fn disjoint_union(left: &Graph, right: &Graph) -> Graph {
    let offset = left.size();
    let labels = left
        .structure()
        .universe()
        .iter()
        .map(|l| format!("1.{l}"))
        .chain(right.structure().universe().iter().map(|l| format!("2.{l}")))
        .collect();
    let edges = left
        .structure()
        .table(0)
        .iter()
        .map(|t| (t[0], t[1]))
        .chain(
            right
                .structure()
                .table(0)
                .iter()
                .map(|t| (t[0] + offset, t[1] + offset)),
        );
    graph_with_labels(labels, edges.collect::<Vec<_>>()).expect("union of graphs is a graph")
}
