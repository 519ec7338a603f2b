//! JSON documents for structures, systems, verdicts and wrap results.
//!
//! Elements are always written by label. A structure file looks like
//!
//! ```json
//! {"kind": "graph", "universe": ["a", "b"],
//!  "relations": {"E": {"arity": 2, "tuples": [["a", "b"], ["b", "a"]]}}}
//! ```
//!
//! and a system file like
//!
//! ```json
//! {"variables": ["x"],
//!  "equations": [{"rel": "E", "args": [{"var": "x"}, {"const": "a"}]},
//!                {"eq": [{"var": "x"}, {"const": "b"}]}],
//!  "families": [{"rel": "E", "args": [{"var": "x"},
//!                {"const": {"generator": ["b", "c"], "tail": "a"}}]}]}
//! ```
//!
//! Power constants are either a label (the constant sequence) or
//! `{"prefix": [...], "cycle": [...]}`. `families` is only accepted where a
//! power system is expected.

use std::collections::BTreeMap;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::noetherian::{Certificate, CheckRecord, NoetherianVerdict, Status, WitnessPackage};
use crate::power::{Horizon, PowerElement, PowerEquation, PowerSystem, Source, Staircase, StaircaseFamily};
use crate::signatures::{FiniteStructure, Kind, Signature, Symbol};
use crate::solver::{Arg, Atom, ClassId, Equation, EquationSystem, Space, Template};
use crate::wrap::{IndexSet, MEntry, WrapResult, WrapStep, WrapTrace};

#[derive(Error, Debug)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{0}")]
    Shape(String),
}

pub type FormatResult<T> = std::result::Result<T, FormatError>;

fn shape<T>(msg: impl Into<String>) -> FormatResult<T> {
    Err(FormatError::Shape(msg.into()))
}

fn pretty(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub arity: usize,
    pub tuples: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub kind: Kind,
    pub universe: Vec<String>,
    pub relations: BTreeMap<String, RelationDoc>,
}

impl StructureDoc {
    pub fn from_structure(kind: Kind, s: &FiniteStructure) -> Self {
        let relations = s
            .signature()
            .symbols()
            .iter()
            .enumerate()
            .map(|(i, sym)| {
                let tuples = s.table(i).iter().map(|t| s.labels(t)).collect();
                (sym.name.clone(), RelationDoc { arity: sym.arity, tuples })
            })
            .collect();
        StructureDoc {
            kind,
            universe: s.universe().to_vec(),
            relations,
        }
    }

    /// Symbols are ordered by arity, then name. The kind's signature is
    /// checked but its axioms are not.
    pub fn into_structure(self) -> FormatResult<(Kind, FiniteStructure)> {
        let mut symbols: Vec<Symbol> = self
            .relations
            .iter()
            .map(|(name, r)| Symbol::new(name.clone(), r.arity))
            .collect();
        symbols.sort_by(|a, b| (a.arity, &a.name).cmp(&(b.arity, &b.name)));
        let signature = Signature::new(symbols)?;
        signature.check_kind(self.kind)?;
        let relations: Vec<(&str, Vec<Vec<String>>)> = self
            .relations
            .iter()
            .map(|(name, r)| (name.as_str(), r.tuples.clone()))
            .collect();
        let structure = FiniteStructure::from_labels(signature, &self.universe, &relations)?;
        Ok((self.kind, structure))
    }
}

pub fn parse_structure(text: &str) -> FormatResult<(Kind, FiniteStructure)> {
    serde_json::from_str::<StructureDoc>(text)?.into_structure()
}

pub fn structure_to_json(kind: Kind, s: &FiniteStructure) -> String {
    pretty(&StructureDoc::from_structure(kind, s))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ArgDoc<C> {
    Var(String),
    Const(C),
}

/// Either `{"rel": ..., "args": [...]}` or `{"eq": [lhs, rhs]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc<C> {
    #[serde(default = "none", skip_serializing_if = "Option::is_none")]
    pub rel: Option<String>,
    #[serde(default = "none", skip_serializing_if = "Option::is_none")]
    pub args: Option<Vec<ArgDoc<C>>>,
    #[serde(default = "none", skip_serializing_if = "Option::is_none")]
    pub eq: Option<[ArgDoc<C>; 2]>,
}

fn none<T>() -> Option<T> {
    None
}

impl<C> AtomDoc<C> {
    pub fn from_atom<D>(atom: &Atom<D>, mut f: impl FnMut(&D) -> C) -> Self {
        let mut arg = |a: &Arg<D>| match a {
            Arg::Var(v) => ArgDoc::Var(v.clone()),
            Arg::Const(c) => ArgDoc::Const(f(c)),
        };
        match atom {
            Atom::Relation { symbol, args } => AtomDoc {
                rel: Some(symbol.clone()),
                args: Some(args.iter().map(&mut arg).collect()),
                eq: None,
            },
            Atom::Equality([l, r]) => AtomDoc {
                rel: None,
                args: None,
                eq: Some([arg(l), arg(r)]),
            },
        }
    }

    pub fn into_atom<D>(self, mut f: impl FnMut(C) -> FormatResult<D>) -> FormatResult<Atom<D>> {
        let mut arg = |a: ArgDoc<C>| -> FormatResult<Arg<D>> {
            Ok(match a {
                ArgDoc::Var(v) => Arg::Var(v),
                ArgDoc::Const(c) => Arg::Const(f(c)?),
            })
        };
        match (self.rel, self.args, self.eq) {
            (Some(symbol), Some(args), None) => Ok(Atom::Relation {
                symbol,
                args: args.into_iter().map(&mut arg).collect::<FormatResult<_>>()?,
            }),
            (None, None, Some([l, r])) => Ok(Atom::Equality([arg(l)?, arg(r)?])),
            _ => shape("an equation needs either `rel` and `args`, or `eq`"),
        }
    }
}

fn element(s: &FiniteStructure, label: &str) -> FormatResult<usize> {
    Ok(s.element(label)?)
}

fn elements(s: &FiniteStructure, labels: &[String]) -> FormatResult<Vec<usize>> {
    labels.iter().map(|l| element(s, l)).collect()
}

pub fn equation_doc(s: &FiniteStructure, eq: &Equation) -> AtomDoc<String> {
    AtomDoc::from_atom(eq, |&c| s.label(c).to_string())
}

pub fn equation_from_doc(s: &FiniteStructure, doc: AtomDoc<String>) -> FormatResult<Equation> {
    doc.into_atom(|l| element(s, &l))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub variables: Vec<String>,
    pub equations: Vec<AtomDoc<String>>,
}

impl SystemDoc {
    pub fn from_system(s: &FiniteStructure, system: &EquationSystem) -> Self {
        SystemDoc {
            variables: system.variables().to_vec(),
            equations: system.equations().iter().map(|e| equation_doc(s, e)).collect(),
        }
    }

    pub fn into_system(self, s: &FiniteStructure) -> FormatResult<EquationSystem> {
        let equations = self
            .equations
            .into_iter()
            .map(|d| equation_from_doc(s, d))
            .collect::<FormatResult<_>>()?;
        let system = EquationSystem::new(self.variables, equations)?;
        system.check(s)?;
        Ok(system)
    }
}

pub fn parse_system(s: &FiniteStructure, text: &str) -> FormatResult<EquationSystem> {
    serde_json::from_str::<SystemDoc>(text)?.into_system(s)
}

pub fn system_to_json(s: &FiniteStructure, system: &EquationSystem) -> String {
    pretty(&SystemDoc::from_system(s, system))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDoc {
    #[serde(default)]
    pub prefix: Vec<String>,
    pub cycle: Vec<String>,
}

/// A power element: a bare label for a constant sequence, otherwise prefix
/// and cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PowerConstDoc {
    Label(String),
    Sequence(SequenceDoc),
}

impl PowerConstDoc {
    pub fn from_element(s: &FiniteStructure, e: &PowerElement) -> Self {
        match (e.prefix(), e.cycle()) {
            ([], &[c]) => PowerConstDoc::Label(s.label(c).to_string()),
            (prefix, cycle) => PowerConstDoc::Sequence(SequenceDoc {
                prefix: s.labels(prefix),
                cycle: s.labels(cycle),
            }),
        }
    }

    pub fn into_element(self, s: &FiniteStructure) -> FormatResult<PowerElement> {
        match self {
            PowerConstDoc::Label(l) => Ok(PowerElement::constant(element(s, &l)?)),
            PowerConstDoc::Sequence(seq) => Ok(PowerElement::new(
                elements(s, &seq.prefix)?,
                elements(s, &seq.cycle)?,
            )?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaircaseDoc {
    pub generator: Vec<String>,
    pub tail: PowerConstDoc,
}

pub fn power_equation_doc(s: &FiniteStructure, eq: &PowerEquation) -> AtomDoc<PowerConstDoc> {
    AtomDoc::from_atom(eq, |c| PowerConstDoc::from_element(s, c))
}

pub fn power_equation_from_doc(s: &FiniteStructure, doc: AtomDoc<PowerConstDoc>) -> FormatResult<PowerEquation> {
    doc.into_atom(|c| c.into_element(s))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSystemDoc {
    pub variables: Vec<String>,
    #[serde(default)]
    pub equations: Vec<AtomDoc<PowerConstDoc>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<AtomDoc<StaircaseDoc>>,
}

impl PowerSystemDoc {
    pub fn from_system(s: &FiniteStructure, system: &PowerSystem) -> Self {
        let families = system
            .families()
            .iter()
            .map(|f| {
                AtomDoc::from_atom(f.template(), |st: &Staircase| StaircaseDoc {
                    generator: s.labels(st.generator()),
                    tail: PowerConstDoc::from_element(s, st.tail()),
                })
            })
            .collect();
        PowerSystemDoc {
            variables: system.variables().to_vec(),
            equations: system.explicit().iter().map(|e| power_equation_doc(s, e)).collect(),
            families,
        }
    }

    pub fn into_system(self, s: &FiniteStructure) -> FormatResult<PowerSystem> {
        let explicit = self
            .equations
            .into_iter()
            .map(|d| power_equation_from_doc(s, d))
            .collect::<FormatResult<_>>()?;
        let families = self
            .families
            .into_iter()
            .map(|d| {
                let template = d.into_atom(|st| {
                    Ok(Staircase::new(elements(s, &st.generator)?, st.tail.into_element(s)?)?)
                })?;
                Ok(StaircaseFamily::new(template))
            })
            .collect::<FormatResult<_>>()?;
        let system = PowerSystem::new(self.variables, explicit, families)?;
        system.check(s)?;
        Ok(system)
    }
}

pub fn parse_power_system(s: &FiniteStructure, text: &str) -> FormatResult<PowerSystem> {
    serde_json::from_str::<PowerSystemDoc>(text)?.into_system(s)
}

pub fn power_system_to_json(s: &FiniteStructure, system: &PowerSystem) -> String {
    pretty(&PowerSystemDoc::from_system(s, system))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDoc {
    pub condition: String,
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CertificateDoc {
    Quadruple([String; 4]),
    Triple([String; 3]),
    StrictPair([String; 2]),
    Checked(Vec<CheckDoc>),
}

fn label_array<const N: usize>(s: &FiniteStructure, xs: &[usize; N]) -> [String; N] {
    xs.map(|x| s.label(x).to_string())
}

fn element_array<const N: usize>(s: &FiniteStructure, xs: &[String; N]) -> FormatResult<[usize; N]> {
    let v = elements(s, xs)?;
    Ok(v.try_into().expect("same length"))
}

impl CertificateDoc {
    pub fn from_certificate(s: &FiniteStructure, c: &Certificate) -> Self {
        match c {
            Certificate::Quadruple(q) => CertificateDoc::Quadruple(label_array(s, q)),
            Certificate::Triple(t) => CertificateDoc::Triple(label_array(s, t)),
            Certificate::StrictPair(p) => CertificateDoc::StrictPair(label_array(s, p)),
            Certificate::Checked(records) => CertificateDoc::Checked(
                records
                    .iter()
                    .map(|r| CheckDoc {
                        condition: r.condition.clone(),
                        instances: r.instances,
                    })
                    .collect(),
            ),
        }
    }

    pub fn into_certificate(self, s: &FiniteStructure) -> FormatResult<Certificate> {
        Ok(match self {
            CertificateDoc::Quadruple(q) => Certificate::Quadruple(element_array(s, &q)?),
            CertificateDoc::Triple(t) => Certificate::Triple(element_array(s, &t)?),
            CertificateDoc::StrictPair(p) => Certificate::StrictPair(element_array(s, &p)?),
            CertificateDoc::Checked(records) => Certificate::Checked(
                records
                    .into_iter()
                    .map(|r| CheckRecord {
                        condition: r.condition,
                        instances: r.instances,
                    })
                    .collect(),
            ),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictDoc {
    pub kind: Kind,
    pub status: Status,
    pub certificate: CertificateDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_family: Option<PowerSystemDoc>,
}

impl VerdictDoc {
    pub fn from_verdict(s: &FiniteStructure, v: &NoetherianVerdict, package: Option<&WitnessPackage>) -> Self {
        VerdictDoc {
            kind: v.kind,
            status: v.status,
            certificate: CertificateDoc::from_certificate(s, &v.certificate),
            witness_family: package.map(|p| PowerSystemDoc::from_system(s, &p.system())),
        }
    }

    pub fn into_verdict(self, s: &FiniteStructure) -> FormatResult<NoetherianVerdict> {
        Ok(NoetherianVerdict {
            kind: self.kind,
            status: self.status,
            certificate: self.certificate.into_certificate(s)?,
        })
    }
}

pub fn verdict_to_json(s: &FiniteStructure, v: &NoetherianVerdict, package: Option<&WitnessPackage>) -> String {
    pretty(&VerdictDoc::from_verdict(s, v, package))
}

pub fn parse_verdict(s: &FiniteStructure, text: &str) -> FormatResult<NoetherianVerdict> {
    serde_json::from_str::<VerdictDoc>(text)?.into_verdict(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSetDoc {
    pub prefix: Vec<bool>,
    pub cycle: Vec<bool>,
}

impl IndexSetDoc {
    fn from_set(set: &IndexSet) -> Self {
        IndexSetDoc {
            prefix: set.prefix_bits(),
            cycle: set.cycle_bits(),
        }
    }

    fn into_set(self) -> FormatResult<IndexSet> {
        Ok(IndexSet::from_bits(&self.prefix, &self.cycle)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MEntryDoc {
    pub template: Template,
    /// Solution set of the class, as labelled points.
    pub solutions: Vec<Vec<String>>,
    pub representative: AtomDoc<String>,
    pub coordinate: usize,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcePairDoc {
    pub coordinate: usize,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct S0Doc {
    pub source: Source,
    pub equation: AtomDoc<PowerConstDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub entry: usize,
    pub i0: IndexSetDoc,
    pub i1: IndexSetDoc,
    pub equation: AtomDoc<PowerConstDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WrapTraceDoc {
    pub variables: Vec<String>,
    pub horizon: Horizon,
    pub m: Vec<MEntryDoc>,
    pub k: Vec<SourcePairDoc>,
    pub s0: Vec<S0Doc>,
    pub steps: Vec<StepDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WrapResultDoc {
    pub s_prime: PowerSystemDoc,
    pub verified: bool,
    pub bound_ok: bool,
    pub trace: WrapTraceDoc,
}

fn class_points(s: &FiniteStructure, vars: usize, class: &ClassId) -> Vec<Vec<String>> {
    let space = Space::new(s.size(), vars).expect("class was computed in this space");
    class
        .solutions
        .iter_ones()
        .map(|cell| {
            let mut p = vec![0; vars];
            space.decode(cell, &mut p);
            s.labels(&p)
        })
        .collect()
}

fn class_from_points(
    s: &FiniteStructure,
    vars: usize,
    template: Template,
    points: &[Vec<String>],
) -> FormatResult<ClassId> {
    let space = Space::new(s.size(), vars)?;
    let mut solutions = bitvec![0; space.cells];
    for p in points {
        if p.len() != vars {
            return Err(Error::PointLength {
                expected: vars,
                found: p.len(),
            }
            .into());
        }
        solutions.set(space.encode(&elements(s, p)?), true);
    }
    Ok(ClassId { template, solutions })
}

impl WrapResultDoc {
    pub fn from_result(s: &FiniteStructure, r: &WrapResult) -> Self {
        let t = &r.trace;
        let vars = t.variables.len();
        WrapResultDoc {
            s_prime: PowerSystemDoc::from_system(s, &r.s_prime),
            verified: r.verified,
            bound_ok: r.bound_ok,
            trace: WrapTraceDoc {
                variables: t.variables.clone(),
                horizon: t.horizon,
                m: t
                    .m
                    .iter()
                    .map(|e| MEntryDoc {
                        template: e.class.template.clone(),
                        solutions: class_points(s, vars, &e.class),
                        representative: equation_doc(s, &e.representative),
                        coordinate: e.coordinate,
                        source: e.source,
                    })
                    .collect(),
                k: t
                    .k
                    .iter()
                    .map(|&(coordinate, source)| SourcePairDoc { coordinate, source })
                    .collect(),
                s0: t
                    .s0
                    .iter()
                    .map(|(source, eq)| S0Doc {
                        source: *source,
                        equation: power_equation_doc(s, eq),
                    })
                    .collect(),
                steps: t
                    .steps
                    .iter()
                    .map(|st| StepDoc {
                        entry: st.entry,
                        i0: IndexSetDoc::from_set(&st.i0),
                        i1: IndexSetDoc::from_set(&st.i1),
                        equation: power_equation_doc(s, &st.equation),
                    })
                    .collect(),
            },
        }
    }

    pub fn into_result(self, s: &FiniteStructure) -> FormatResult<WrapResult> {
        let t = self.trace;
        let vars = t.variables.len();
        let m = t
            .m
            .into_iter()
            .map(|e| {
                Ok(MEntry {
                    class: class_from_points(s, vars, e.template, &e.solutions)?,
                    representative: equation_from_doc(s, e.representative)?,
                    coordinate: e.coordinate,
                    source: e.source,
                })
            })
            .collect::<FormatResult<_>>()?;
        let s0 = t
            .s0
            .into_iter()
            .map(|d| Ok((d.source, power_equation_from_doc(s, d.equation)?)))
            .collect::<FormatResult<_>>()?;
        let steps = t
            .steps
            .into_iter()
            .map(|d| {
                Ok(WrapStep {
                    entry: d.entry,
                    i0: d.i0.into_set()?,
                    i1: d.i1.into_set()?,
                    equation: power_equation_from_doc(s, d.equation)?,
                })
            })
            .collect::<FormatResult<_>>()?;
        Ok(WrapResult {
            s_prime: self.s_prime.into_system(s)?,
            verified: self.verified,
            bound_ok: self.bound_ok,
            trace: WrapTrace {
                variables: t.variables,
                horizon: t.horizon,
                m,
                k: t.k.into_iter().map(|p| (p.coordinate, p.source)).collect(),
                s0,
                steps,
            },
        })
    }
}

pub fn wrap_result_to_json(s: &FiniteStructure, r: &WrapResult) -> String {
    pretty(&WrapResultDoc::from_result(s, r))
}

pub fn parse_wrap_result(s: &FiniteStructure, text: &str) -> FormatResult<WrapResult> {
    serde_json::from_str::<WrapResultDoc>(text)?.into_result(s)
}
