//! Noetherian criteria for direct powers of graphs, partial orders and
//! matroids, and the counterexample families behind the negative verdicts.
//!
//! A graph power is Noetherian exactly when the base graph satisfies
//!
//! ```text
//! forall x1 x2 x3 x4.  E(x1,x2) & E(x2,x3) & E(x3,x4) -> E(x4,x1)
//! ```
//!
//! A matroid power is Noetherian exactly when no triple is independent and
//! the same implication holds for `P2`. Any partial order with a strict pair
//! has a non-Noetherian power; nothing is claimed for antichains.
//!
//! Negative verdicts carry a certificate from which a [`WitnessPackage`] is
//! built: a staircase family `S` together with points that satisfy its first
//! `n` members but not all of `S`, so no finite subsystem is equivalent to it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::power::{satisfies, PowerElement, PowerSystem, Staircase, StaircaseFamily};
use crate::signatures::{
    graph_distances, has_triangle, matroid_symbol, matroid_underlying_graph, FiniteStructure,
    Graph, Kind, Matroid, Poset, EDGE, LEQ,
};
use crate::solver::{Arg, Atom};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Noetherian,
    NotNoetherian,
    NoObstructionFound,
}

/// One universally quantified condition that was checked exhaustively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRecord {
    pub condition: String,
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `R(x1,x2), R(x2,x3), R(x3,x4)` but not `R(x4,x1)`, where `R` is the
    /// edge relation (graphs) or `P2` (matroids).
    Quadruple([usize; 4]),
    /// An independent triple `P3(a, b, c)`.
    Triple([usize; 3]),
    /// `a <= b` with `a != b`.
    StrictPair([usize; 2]),
    /// Conditions checked with no counterexample.
    Checked(Vec<CheckRecord>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoetherianVerdict {
    pub kind: Kind,
    pub status: Status,
    pub certificate: Certificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuasiIdentity {
    Pass,
    Fail([usize; 4]),
}

const QUASI_IDENTITY: &str = "E(x1,x2) & E(x2,x3) & E(x3,x4) -> E(x4,x1)";

/// Scans all quadruples, repeats included, in lexicographic order and returns
/// the first violation of the four-cycle quasi-identity.
pub fn graph_quasi_identity(graph: &Graph) -> QuasiIdentity {
    for x1 in 0..graph.size() {
        for x2 in graph.neighbours(x1) {
            for x3 in graph.neighbours(x2) {
                for x4 in graph.neighbours(x3) {
                    if !graph.adjacent(x4, x1) {
                        return QuasiIdentity::Fail([x1, x2, x3, x4]);
                    }
                }
            }
        }
    }
    QuasiIdentity::Pass
}

/// Triangle-free with every finite distance at most 3.
///
/// This is a diagnostic only: the path on four vertices and the five-cycle
/// pass it while failing the quasi-identity, and the verdicts follow the
/// quasi-identity.
pub fn graph_structural_check(graph: &Graph) -> bool {
    if has_triangle(graph).is_some() {
        return false;
    }
    graph_distances(graph)
        .rows()
        .iter()
        .flatten()
        .all(|d| d.is_none_or(|d| d <= 3))
}

pub fn graph_power_noetherian(graph: &Graph) -> NoetherianVerdict {
    let k = graph.size();
    match graph_quasi_identity(graph) {
        QuasiIdentity::Fail(q) => NoetherianVerdict {
            kind: Kind::Graph,
            status: Status::NotNoetherian,
            certificate: Certificate::Quadruple(q),
        },
        QuasiIdentity::Pass => NoetherianVerdict {
            kind: Kind::Graph,
            status: Status::Noetherian,
            certificate: Certificate::Checked(vec![CheckRecord {
                condition: QUASI_IDENTITY.to_string(),
                instances: k.pow(4),
            }]),
        },
    }
}

/// Negative verdict on the least strict pair; otherwise no claim.
pub fn poset_power_noetherian(poset: &Poset) -> NoetherianVerdict {
    let s = poset.structure();
    let strict = s.table(0).iter().find(|t| t[0] != t[1]);
    match strict {
        Some(t) => NoetherianVerdict {
            kind: Kind::Poset,
            status: Status::NotNoetherian,
            certificate: Certificate::StrictPair([t[0], t[1]]),
        },
        None => NoetherianVerdict {
            kind: Kind::Poset,
            status: Status::NoObstructionFound,
            certificate: Certificate::Checked(vec![CheckRecord {
                condition: "exists a, b: a <= b & a != b".to_string(),
                instances: s.size().pow(2),
            }]),
        },
    }
}

pub fn matroid_power_noetherian(matroid: &Matroid) -> NoetherianVerdict {
    let s = matroid.structure();
    let k = s.size();
    if let Some(t) = s.table_named(&matroid_symbol(3)).and_then(|t| t.first()) {
        return NoetherianVerdict {
            kind: Kind::Matroid,
            status: Status::NotNoetherian,
            certificate: Certificate::Triple([t[0], t[1], t[2]]),
        };
    }
    match graph_quasi_identity(&matroid_underlying_graph(matroid)) {
        QuasiIdentity::Fail(q) => NoetherianVerdict {
            kind: Kind::Matroid,
            status: Status::NotNoetherian,
            certificate: Certificate::Quadruple(q),
        },
        QuasiIdentity::Pass => NoetherianVerdict {
            kind: Kind::Matroid,
            status: Status::Noetherian,
            certificate: Certificate::Checked(vec![
                CheckRecord {
                    condition: "not P3(x,y,z)".to_string(),
                    instances: k.pow(3),
                },
                CheckRecord {
                    condition: "P2(x1,x2) & P2(x2,x3) & P2(x3,x4) -> P2(x4,x1)".to_string(),
                    instances: k.pow(4),
                },
            ]),
        },
    }
}

/// Dispatches on `kind` after validating the structure.
pub fn power_noetherian(structure: &FiniteStructure, kind: Kind) -> Result<NoetherianVerdict> {
    match kind {
        Kind::Graph => Ok(graph_power_noetherian(&Graph::try_from(structure.clone())?)),
        Kind::Poset => Ok(poset_power_noetherian(&Poset::try_from(structure.clone())?)),
        Kind::Matroid => Ok(matroid_power_noetherian(&Matroid::try_from(structure.clone())?)),
        Kind::Generic => Err(Error::InvalidCertificate(
            "no Noetherian criterion for generic structures".to_string(),
        )),
    }
}

/// A staircase family with no equivalent finite subsystem, and the points
/// that separate each finite prefix of it from the whole.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPackage {
    pub kind: Kind,
    pub certificate: Certificate,
    pub family: StaircaseFamily,
    /// `witness_point(n)` repeats `leading` this many times, given `n`...
    leading_copies: LeadingCopies,
    leading: usize,
    /// ...then `trailing` forever.
    trailing: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LeadingCopies {
    NMinusOne,
    N,
}

impl WitnessPackage {
    pub fn witness_point(&self, n: usize) -> Result<PowerElement> {
        if n == 0 {
            return Err(Error::ZeroIndex("witness depth"));
        }
        let copies = match self.leading_copies {
            LeadingCopies::NMinusOne => n - 1,
            LeadingCopies::N => n,
        };
        PowerElement::new(vec![self.leading; copies], vec![self.trailing])
    }

    pub fn system(&self) -> PowerSystem {
        PowerSystem::new(vec!["x".to_string()], Vec::new(), vec![self.family.clone()])
            .expect("single variable x")
    }
}

fn single_slot_family(symbol: &str, generator: usize, tail: usize) -> StaircaseFamily {
    let staircase = Staircase::new(vec![generator], PowerElement::constant(tail)).expect("nonempty generator");
    StaircaseFamily::new(Atom::relation(symbol, vec![Arg::var("x"), Arg::Const(staircase)]))
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidCertificate(msg.into())
}

fn check_range(structure: &FiniteStructure, elements: &[usize]) -> Result<()> {
    match elements.iter().find(|&&e| e >= structure.size()) {
        Some(&index) => Err(Error::ElementOutOfRange {
            index,
            size: structure.size(),
        }),
        None => Ok(()),
    }
}

/// Builds the counterexample family for a negative certificate, after
/// re-checking the certificate against the structure.
///
/// * quadruple `(a1,a2,a3,a4)`: `R(x, [a4 x (n-1), a2, a2, ...])`, separated
///   by `[a3 x (n-1), a1, a1, ...]`;
/// * strict pair `a < b`: `x <= [a x (n-1), b, b, ...]`, separated by
///   `[a x n, b, b, ...]`;
/// * triple `(a,b,c)`: `P2(x, [b x (n-1), a, a, ...])`, separated by
///   `[c x n, b, b, ...]`.
pub fn build_witness_family(
    structure: &FiniteStructure,
    kind: Kind,
    certificate: &Certificate,
) -> Result<WitnessPackage> {
    let package = |family, leading_copies, leading, trailing| WitnessPackage {
        kind,
        certificate: certificate.clone(),
        family,
        leading_copies,
        leading,
        trailing,
    };
    match (kind, certificate) {
        (Kind::Graph | Kind::Matroid, Certificate::Quadruple(q)) => {
            let [a1, a2, a3, a4] = *q;
            check_range(structure, q)?;
            let symbol = if kind == Kind::Graph {
                Graph::try_from(structure.clone())?;
                EDGE.to_string()
            } else {
                Matroid::try_from(structure.clone())?;
                matroid_symbol(2)
            };
            let r = |x: usize, y: usize| structure.holds_named(&symbol, &[x, y]);
            if !(r(a1, a2) && r(a2, a3) && r(a3, a4)) || r(a4, a1) {
                return Err(invalid(format!("{q:?} does not violate the quasi-identity")));
            }
            Ok(package(single_slot_family(&symbol, a4, a2), LeadingCopies::NMinusOne, a3, a1))
        }
        (Kind::Poset, Certificate::StrictPair(p)) => {
            let [a, b] = *p;
            check_range(structure, p)?;
            let poset = Poset::try_from(structure.clone())?;
            if a == b || !poset.leq(a, b) {
                return Err(invalid(format!("{p:?} is not a strict pair")));
            }
            Ok(package(single_slot_family(LEQ, a, b), LeadingCopies::N, a, b))
        }
        (Kind::Matroid, Certificate::Triple(t)) => {
            let [a, b, c] = *t;
            check_range(structure, t)?;
            let matroid = Matroid::try_from(structure.clone())?;
            if !matroid.independent(t) {
                return Err(invalid(format!("{t:?} is not an independent triple")));
            }
            Ok(package(single_slot_family(&matroid_symbol(2), b, a), LeadingCopies::N, c, b))
        }
        _ => Err(invalid(format!("{certificate:?} is not a negative certificate for a {kind}"))),
    }
}

/// Outcome of checking `witness_point(n)` against the family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessCheck {
    pub n: usize,
    /// The point satisfies members `1..=n`.
    pub satisfies_prefix: bool,
    /// The point is not a solution of the whole family.
    pub violates_family: bool,
    /// The point fails member `n + 1` on its own.
    pub violates_next: bool,
    /// First member the point fails, with the first failing coordinate.
    pub first_violation: Option<(usize, usize)>,
}

impl WitnessCheck {
    pub fn holds(&self) -> bool {
        self.satisfies_prefix && self.violates_family
    }
}

pub fn check_witness(structure: &FiniteStructure, package: &WitnessPackage, n: usize) -> Result<WitnessCheck> {
    let point = [package.witness_point(n)?];
    let full = package.system();
    let satisfies_prefix = satisfies(structure, &full.truncated(n), &point)?;
    let violates_family = !satisfies(structure, &full, &point)?;
    let next = PowerSystem::finite(full.variables().to_vec(), vec![package.family.member(n + 1)?])?;
    let violates_next = !satisfies(structure, &next, &point)?;
    // A violated projection at coordinate i already occurs in member i + 2.
    let reach = full.horizon().join(point[0].horizon()).end() + 2;
    let mut first_violation = None;
    for m in 1..=reach.max(n + 1) {
        let member = package.family.member(m)?;
        let single = PowerSystem::finite(full.variables().to_vec(), vec![member.clone()])?;
        if !satisfies(structure, &single, &point)? {
            let h = single.horizon().join(point[0].horizon());
            let coordinate = (0..h.end())
                .find(|&i| {
                    let eq = crate::power::project_equation(&member, i);
                    let sys = crate::solver::EquationSystem::new(full.variables().to_vec(), vec![eq])
                        .expect("variables match");
                    !crate::solver::satisfies_all(structure, &sys, &[point[0].at(i)]).unwrap_or(true)
                })
                .expect("violated somewhere below the horizon");
            first_violation = Some((m, coordinate));
            break;
        }
    }
    Ok(WitnessCheck {
        n,
        satisfies_prefix,
        violates_family,
        violates_next,
        first_violation,
    })
}

/// `witness_point(n)` solves the first `n` members but not the family.
pub fn verify_witness(structure: &FiniteStructure, package: &WitnessPackage, n: usize) -> Result<bool> {
    Ok(check_witness(structure, package, n)?.holds())
}
