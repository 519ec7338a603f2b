//! Atomic equations over a finite structure and their solution sets.
//!
//! Solving is an exhaustive scan of all `k^n` assignments. Each equation is
//! turned into a bitset over that space, so systems reduce to intersections.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signatures::FiniteStructure;

/// Largest assignment space the scanner will enumerate.
pub const MAX_CELLS: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg<C> {
    Var(String),
    Const(C),
}

impl<C> Arg<C> {
    pub fn var(name: impl Into<String>) -> Self {
        Arg::Var(name.into())
    }

    pub fn map<D>(&self, f: &mut impl FnMut(&C) -> D) -> Arg<D> {
        match self {
            Arg::Var(v) => Arg::Var(v.clone()),
            Arg::Const(c) => Arg::Const(f(c)),
        }
    }
}

/// An atomic formula: a relation applied to arguments, or an equality.
/// `C` is the constant type: base elements, power elements, or staircase
/// descriptors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom<C> {
    Relation { symbol: String, args: Vec<Arg<C>> },
    Equality([Arg<C>; 2]),
}

/// An equation over a base structure; constants are element indices.
pub type Equation = Atom<usize>;

/// Relation symbol (or `None` for equality) and which argument positions
/// hold which variable. Constant positions are `None`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Template {
    pub symbol: Option<String>,
    pub slots: Vec<Option<String>>,
}

impl<C> Atom<C> {
    pub fn relation(symbol: impl Into<String>, args: Vec<Arg<C>>) -> Self {
        Atom::Relation {
            symbol: symbol.into(),
            args,
        }
    }

    pub fn equality(lhs: Arg<C>, rhs: Arg<C>) -> Self {
        Atom::Equality([lhs, rhs])
    }

    pub fn args(&self) -> &[Arg<C>] {
        match self {
            Atom::Relation { args, .. } => args,
            Atom::Equality(sides) => sides,
        }
    }

    pub fn symbol(&self) -> Option<&str> {
        match self {
            Atom::Relation { symbol, .. } => Some(symbol),
            Atom::Equality(_) => None,
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args().iter().filter_map(|a| match a {
            Arg::Var(v) => Some(v.as_str()),
            Arg::Const(_) => None,
        })
    }

    pub fn constants(&self) -> impl Iterator<Item = &C> {
        self.args().iter().filter_map(|a| match a {
            Arg::Var(_) => None,
            Arg::Const(c) => Some(c),
        })
    }

    /// Same shape, every constant replaced by `f(constant)`.
    pub fn map_constants<D>(&self, mut f: impl FnMut(&C) -> D) -> Atom<D> {
        match self {
            Atom::Relation { symbol, args } => Atom::Relation {
                symbol: symbol.clone(),
                args: args.iter().map(|a| a.map(&mut f)).collect(),
            },
            Atom::Equality([l, r]) => Atom::Equality([l.map(&mut f), r.map(&mut f)]),
        }
    }

    pub fn try_map_constants<D, E>(
        &self,
        mut f: impl FnMut(&C) -> std::result::Result<D, E>,
    ) -> std::result::Result<Atom<D>, E> {
        let mut map = |a: &Arg<C>| -> std::result::Result<Arg<D>, E> {
            Ok(match a {
                Arg::Var(v) => Arg::Var(v.clone()),
                Arg::Const(c) => Arg::Const(f(c)?),
            })
        };
        Ok(match self {
            Atom::Relation { symbol, args } => Atom::Relation {
                symbol: symbol.clone(),
                args: args.iter().map(&mut map).collect::<std::result::Result<_, _>>()?,
            },
            Atom::Equality([l, r]) => Atom::Equality([map(l)?, map(r)?]),
        })
    }

    pub fn template(&self) -> Template {
        Template {
            symbol: self.symbol().map(str::to_string),
            slots: self
                .args()
                .iter()
                .map(|a| match a {
                    Arg::Var(v) => Some(v.clone()),
                    Arg::Const(_) => None,
                })
                .collect(),
        }
    }

    /// Renders as `E(x, a)` or `x = a` with constants shown by `show`.
    pub fn render(&self, mut show: impl FnMut(&C) -> String) -> String {
        let mut arg = |a: &Arg<C>| match a {
            Arg::Var(v) => v.clone(),
            Arg::Const(c) => show(c),
        };
        match self {
            Atom::Relation { symbol, args } => {
                let args: Vec<_> = args.iter().map(&mut arg).collect();
                format!("{symbol}({})", args.join(", "))
            }
            Atom::Equality([l, r]) => format!("{} = {}", arg(l), arg(r)),
        }
    }

    /// Checks variables against `variables` and the relation against the
    /// signature of `structure`.
    pub fn check_shape(&self, structure: &FiniteStructure, variables: &[String]) -> Result<()> {
        for v in self.variables() {
            if !variables.iter().any(|d| d == v) {
                return Err(Error::UndeclaredVariable(v.to_string()));
            }
        }
        if let Atom::Relation { symbol, args } = self {
            let arity = structure
                .signature()
                .arity(symbol)
                .ok_or_else(|| Error::UnknownSymbol(symbol.clone()))?;
            if arity != args.len() {
                return Err(Error::ArityMismatch {
                    symbol: symbol.clone(),
                    expected: arity,
                    found: args.len(),
                });
            }
        }
        Ok(())
    }
}

impl Equation {
    pub fn display<'a>(&'a self, structure: &'a FiniteStructure) -> impl fmt::Display + 'a {
        DisplayEquation(self, structure)
    }

    /// Shape check plus range check of every constant.
    pub fn check(&self, structure: &FiniteStructure, variables: &[String]) -> Result<()> {
        self.check_shape(structure, variables)?;
        let size = structure.size();
        match self.constants().find(|&&c| c >= size) {
            Some(&index) => Err(Error::ElementOutOfRange { index, size }),
            None => Ok(()),
        }
    }
}

struct DisplayEquation<'a>(&'a Equation, &'a FiniteStructure);

impl fmt::Display for DisplayEquation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.render(|&c| self.1.label(c).to_string()))
    }
}

pub(crate) fn check_variables(variables: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for v in variables {
        if !seen.insert(v) {
            return Err(Error::DuplicateVariable(v.clone()));
        }
    }
    Ok(())
}

/// A finite list of equations over a fixed, ordered variable list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EquationSystem {
    variables: Vec<String>,
    equations: Vec<Equation>,
}

impl EquationSystem {
    pub fn new(variables: Vec<String>, equations: Vec<Equation>) -> Result<Self> {
        check_variables(&variables)?;
        for eq in &equations {
            for v in eq.variables() {
                if !variables.iter().any(|d| d == v) {
                    return Err(Error::UndeclaredVariable(v.to_string()));
                }
            }
        }
        Ok(EquationSystem {
            variables,
            equations,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// The subsystem keeping the equations at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> EquationSystem {
        EquationSystem {
            variables: self.variables.clone(),
            equations: indices.iter().map(|&i| self.equations[i].clone()).collect(),
        }
    }

    pub fn union(&self, other: &EquationSystem) -> Result<EquationSystem> {
        same_variables(&self.variables, &other.variables)?;
        let mut equations = self.equations.clone();
        equations.extend(other.equations.iter().cloned());
        Ok(EquationSystem {
            variables: self.variables.clone(),
            equations,
        })
    }

    pub fn check(&self, structure: &FiniteStructure) -> Result<()> {
        self.equations
            .iter()
            .try_for_each(|eq| eq.check(structure, &self.variables))
    }
}

fn same_variables(left: &[String], right: &[String]) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::VariableMismatch {
            left: left.to_vec(),
            right: right.to_vec(),
        })
    }
}

/// Cell layout of `A^n`: the first variable is the most significant digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Space {
    pub(crate) size: usize,
    pub(crate) vars: usize,
    pub(crate) cells: usize,
}

impl Space {
    pub(crate) fn new(size: usize, vars: usize) -> Result<Self> {
        let too_large = Error::SearchSpaceTooLarge { size, vars };
        let cells = u32::try_from(vars)
            .ok()
            .and_then(|v| size.checked_pow(v))
            .ok_or(too_large.clone())?;
        if cells > MAX_CELLS {
            return Err(too_large);
        }
        Ok(Space { size, vars, cells })
    }

    pub(crate) fn decode(&self, mut cell: usize, point: &mut [usize]) {
        for slot in point.iter_mut().rev() {
            *slot = cell % self.size;
            cell /= self.size;
        }
    }

    pub(crate) fn encode(&self, point: &[usize]) -> usize {
        point.iter().fold(0, |acc, &e| acc * self.size + e)
    }
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Var(usize),
    Const(usize),
}

impl Slot {
    fn value(self, point: &[usize]) -> usize {
        match self {
            Slot::Var(i) => point[i],
            Slot::Const(c) => c,
        }
    }
}

enum Compiled {
    Relation { symbol: usize, slots: Vec<Slot> },
    Equality(Slot, Slot),
}

impl Compiled {
    fn new(structure: &FiniteStructure, variables: &[String], eq: &Equation) -> Result<Self> {
        eq.check(structure, variables)?;
        let slot = |a: &Arg<usize>| match a {
            Arg::Var(v) => Slot::Var(variables.iter().position(|d| d == v).expect("checked")),
            Arg::Const(c) => Slot::Const(*c),
        };
        Ok(match eq {
            Atom::Relation { symbol, args } => Compiled::Relation {
                symbol: structure.signature().position(symbol).expect("checked"),
                slots: args.iter().map(slot).collect(),
            },
            Atom::Equality([l, r]) => Compiled::Equality(slot(l), slot(r)),
        })
    }

    fn eval(&self, structure: &FiniteStructure, point: &[usize], buf: &mut Vec<usize>) -> bool {
        match self {
            Compiled::Relation { symbol, slots } => {
                buf.clear();
                buf.extend(slots.iter().map(|s| s.value(point)));
                structure.holds(*symbol, buf)
            }
            Compiled::Equality(l, r) => l.value(point) == r.value(point),
        }
    }
}

/// Truth of `eq` under `assignment`.
pub fn evaluate(
    structure: &FiniteStructure,
    eq: &Equation,
    assignment: &BTreeMap<String, usize>,
) -> Result<bool> {
    let variables: Vec<String> = eq.variables().map(str::to_string).collect();
    let point = variables
        .iter()
        .map(|v| {
            let &e = assignment
                .get(v)
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            if e >= structure.size() {
                return Err(Error::ElementOutOfRange {
                    index: e,
                    size: structure.size(),
                });
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    let compiled = Compiled::new(structure, &variables, eq)?;
    Ok(compiled.eval(structure, &point, &mut Vec::new()))
}

/// A subset of `A^n`, stored as one bit per assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicSet {
    variables: Vec<String>,
    space: (usize, usize),
    cells: BitVec,
}

impl AlgebraicSet {
    fn full(variables: &[String], space: Space) -> Self {
        AlgebraicSet {
            variables: variables.to_vec(),
            space: (space.size, space.vars),
            cells: bitvec![1; space.cells],
        }
    }

    fn space(&self) -> Space {
        Space {
            size: self.space.0,
            vars: self.space.1,
            cells: self.cells.len(),
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn contains(&self, point: &[usize]) -> bool {
        point.len() == self.variables.len()
            && point.iter().all(|&e| e < self.space.0)
            && self.cells[self.space().encode(point)]
    }

    pub fn len(&self) -> usize {
        self.cells.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.not_any()
    }

    /// Points in lexicographic order.
    pub fn points(&self) -> Vec<Vec<usize>> {
        let space = self.space();
        self.cells
            .iter_ones()
            .map(|cell| {
                let mut p = vec![0; space.vars];
                space.decode(cell, &mut p);
                p
            })
            .collect()
    }

    pub fn cells(&self) -> &BitSlice {
        &self.cells
    }

    pub fn intersect(&mut self, other: &AlgebraicSet) {
        self.cells &= other.cells.as_bitslice();
    }

    pub fn is_subset(&self, other: &AlgebraicSet) -> bool {
        self.cells.iter_ones().all(|i| other.cells[i])
    }
}

/// Solution set of a single equation over `variables`.
pub fn solution_set(
    structure: &FiniteStructure,
    eq: &Equation,
    variables: &[String],
) -> Result<AlgebraicSet> {
    let space = Space::new(structure.size(), variables.len())?;
    let compiled = Compiled::new(structure, variables, eq)?;
    let mut set = AlgebraicSet::full(variables, space);
    let mut point = vec![0; space.vars];
    let mut buf = Vec::new();
    for cell in 0..space.cells {
        space.decode(cell, &mut point);
        if !compiled.eval(structure, &point, &mut buf) {
            set.cells.set(cell, false);
        }
    }
    Ok(set)
}

/// All assignments satisfying every equation of `system`. An empty system
/// yields the whole space.
pub fn solve(structure: &FiniteStructure, system: &EquationSystem) -> Result<AlgebraicSet> {
    let space = Space::new(structure.size(), system.variables.len())?;
    let mut set = AlgebraicSet::full(&system.variables, space);
    for eq in &system.equations {
        set.intersect(&solution_set(structure, eq, &system.variables)?);
    }
    Ok(set)
}

/// Whether `point` (one element per variable of `system`) satisfies every
/// equation.
pub fn satisfies_all(
    structure: &FiniteStructure,
    system: &EquationSystem,
    point: &[usize],
) -> Result<bool> {
    if point.len() != system.variables.len() {
        return Err(Error::PointLength {
            expected: system.variables.len(),
            found: point.len(),
        });
    }
    let mut buf = Vec::new();
    for eq in &system.equations {
        if !Compiled::new(structure, &system.variables, eq)?.eval(structure, point, &mut buf) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_consistent(structure: &FiniteStructure, system: &EquationSystem) -> Result<bool> {
    Ok(!solve(structure, system)?.is_empty())
}

pub fn equivalent(
    structure: &FiniteStructure,
    left: &EquationSystem,
    right: &EquationSystem,
) -> Result<bool> {
    same_variables(&left.variables, &right.variables)?;
    Ok(solve(structure, left)? == solve(structure, right)?)
}

/// Equivalence class of an equation: its template together with its
/// solution set over a fixed variable list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId {
    pub template: Template,
    pub solutions: BitVec,
}

pub fn class_of(structure: &FiniteStructure, eq: &Equation, variables: &[String]) -> Result<ClassId> {
    Ok(ClassId {
        template: eq.template(),
        solutions: solution_set(structure, eq, variables)?.cells,
    })
}

/// Indices of a minimal inconsistent subsystem, found by deleting equations
/// front to back while the rest stays inconsistent. `None` when the system is
/// consistent.
pub fn minimal_inconsistent_core(
    structure: &FiniteStructure,
    system: &EquationSystem,
) -> Result<Option<Vec<usize>>> {
    let space = Space::new(structure.size(), system.variables.len())?;
    let sets = system
        .equations
        .iter()
        .map(|eq| solution_set(structure, eq, &system.variables))
        .collect::<Result<Vec<_>>>()?;
    let meet = |keep: &[usize]| {
        let mut cells = bitvec![1; space.cells];
        for &i in keep {
            cells &= sets[i].cells.as_bitslice();
        }
        cells
    };
    let mut keep: Vec<usize> = (0..sets.len()).collect();
    if meet(&keep).any() {
        return Ok(None);
    }
    let mut pos = 0;
    while pos < keep.len() {
        let mut trial = keep.clone();
        trial.remove(pos);
        if meet(&trial).not_any() {
            keep = trial;
        } else {
            pos += 1;
        }
    }
    Ok(Some(keep))
}

pub fn minimal_inconsistent_subset(
    structure: &FiniteStructure,
    system: &EquationSystem,
) -> Result<Option<EquationSystem>> {
    Ok(minimal_inconsistent_core(structure, system)?.map(|core| system.select(&core)))
}
