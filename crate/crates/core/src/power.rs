//! Direct powers `A^N` of a finite structure, restricted to eventually
//! periodic elements.
//!
//! Relations on the power hold coordinatewise, so a power equation is
//! satisfied by a point exactly when every coordinate projection is satisfied
//! in the base structure. Infinite systems are presented as finitely many
//! explicit equations plus finitely many staircase families. Everything in
//! sight is eventually periodic, which makes each question decidable by
//! checking a finite horizon of coordinates.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signatures::FiniteStructure;
use crate::solver::{
    self, check_variables, class_of, minimal_inconsistent_core, Atom, ClassId, Equation,
    EquationSystem,
};

/// An eventually periodic sequence `prefix, cycle, cycle, ...` of base
/// elements, kept in canonical form (shortest cycle, then shortest prefix),
/// so structural equality is equality of sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PowerElement {
    prefix: Vec<usize>,
    cycle: Vec<usize>,
}

impl PowerElement {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        Ok(Self::canonical(prefix, cycle))
    }

    /// `[a, a, a, ...]`
    pub fn constant(element: usize) -> Self {
        PowerElement {
            prefix: Vec::new(),
            cycle: vec![element],
        }
    }

    /// The sequence `i -> f(i)`, which must be periodic with period `period`
    /// from index `stabilization` on.
    pub fn from_fn(stabilization: usize, period: usize, f: impl Fn(usize) -> usize) -> Self {
        assert!(period > 0, "period must be positive");
        let prefix = (0..stabilization).map(&f).collect();
        let cycle = (stabilization..stabilization + period).map(&f).collect();
        Self::canonical(prefix, cycle)
    }

    fn canonical(mut prefix: Vec<usize>, mut cycle: Vec<usize>) -> Self {
        let len = cycle.len();
        if let Some(d) = (1..len).find(|&d| len.is_multiple_of(d) && (d..len).all(|i| cycle[i] == cycle[i - d])) {
            cycle.truncate(d);
        }
        while prefix.last().is_some_and(|&p| Some(&p) == cycle.last()) {
            prefix.pop();
            cycle.rotate_right(1);
        }
        PowerElement { prefix, cycle }
    }

    pub fn at(&self, i: usize) -> usize {
        match self.prefix.get(i) {
            Some(&e) => e,
            None => self.cycle[(i - self.prefix.len()) % self.cycle.len()],
        }
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn horizon(&self) -> Horizon {
        Horizon {
            stabilization: self.prefix.len(),
            period: self.cycle.len(),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.prefix.iter().chain(&self.cycle).copied()
    }

    /// `[b,c,(a)*]` for `b, c, a, a, a, ...`.
    pub fn render(&self, structure: &FiniteStructure) -> String {
        let mut parts: Vec<String> = self.prefix.iter().map(|&e| structure.label(e).to_string()).collect();
        let cycle: Vec<&str> = self.cycle.iter().map(|&e| structure.label(e)).collect();
        parts.push(format!("({})*", cycle.join(",")));
        format!("[{}]", parts.join(","))
    }
}

/// The `i`-th coordinate of `element`.
pub fn power_at(element: &PowerElement, i: usize) -> usize {
    element.at(i)
}

/// An equation over the power; constants are power elements.
pub type PowerEquation = Atom<PowerElement>;

/// `E(X, C)` becomes `E(X, C(i))`.
pub fn project_equation(eq: &PowerEquation, i: usize) -> Equation {
    eq.map_constants(|c| c.at(i))
}

/// Stabilization index and period of an eventually periodic object: it
/// repeats with `period` from `stabilization` on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    pub stabilization: usize,
    pub period: usize,
}

impl Horizon {
    pub const TRIVIAL: Horizon = Horizon {
        stabilization: 0,
        period: 1,
    };

    pub fn join(self, other: Horizon) -> Horizon {
        Horizon {
            stabilization: self.stabilization.max(other.stabilization),
            period: self.period.lcm(&other.period),
        }
    }

    /// First coordinate past the initial stretch plus one full period.
    pub fn end(self) -> usize {
        self.stabilization + self.period
    }

    /// The coordinate below `end()` that behaves like `i`.
    pub fn fold(self, i: usize) -> usize {
        if i < self.stabilization {
            i
        } else {
            self.stabilization + (i - self.stabilization) % self.period
        }
    }
}

/// One constant slot of a staircase family: the `n`-th member's constant
/// takes its first `n - 1` coordinates from the repeating generator stream
/// and continues with the tail from its beginning.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Staircase {
    generator: Vec<usize>,
    tail: PowerElement,
}

impl Staircase {
    pub fn new(generator: Vec<usize>, tail: PowerElement) -> Result<Self> {
        if generator.is_empty() {
            return Err(Error::EmptyGenerator);
        }
        Ok(Staircase { generator, tail })
    }

    pub fn generator(&self) -> &[usize] {
        &self.generator
    }

    pub fn tail(&self) -> &PowerElement {
        &self.tail
    }

    fn generator_at(&self, i: usize) -> usize {
        self.generator[i % self.generator.len()]
    }

    /// Coordinate `i` of the `n`-th member's constant (`n >= 1`).
    pub fn member_at(&self, n: usize, i: usize) -> usize {
        if i + 1 < n {
            self.generator_at(i)
        } else {
            self.tail.at(i + 1 - n)
        }
    }

    pub fn member(&self, n: usize) -> PowerElement {
        let mut prefix: Vec<usize> = (0..n.saturating_sub(1)).map(|i| self.generator_at(i)).collect();
        prefix.extend_from_slice(self.tail.prefix());
        PowerElement::canonical(prefix, self.tail.cycle().to_vec())
    }
}

/// The infinite list of power equations obtained by instantiating every
/// staircase slot of `template` with its `n`-th member, `n = 1, 2, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StaircaseFamily {
    template: Atom<Staircase>,
}

impl StaircaseFamily {
    pub fn new(template: Atom<Staircase>) -> Self {
        StaircaseFamily { template }
    }

    pub fn template(&self) -> &Atom<Staircase> {
        &self.template
    }

    pub fn member(&self, n: usize) -> Result<PowerEquation> {
        if n == 0 {
            return Err(Error::ZeroIndex("family member"));
        }
        Ok(self.template.map_constants(|s| s.member(n)))
    }

    /// Projection of the `n`-th member at coordinate `i`.
    pub fn member_projection(&self, n: usize, i: usize) -> Equation {
        self.template.map_constants(|s| s.member_at(n, i))
    }

    /// Joint period of all generator streams.
    pub fn generator_period(&self) -> usize {
        self.template
            .constants()
            .fold(1, |acc, s| acc.lcm(&s.generator.len()))
    }

    /// The set of projections at coordinate `i` is the generator tuple at `i`
    /// plus the tail tuples at `0..=i`. The tail tuples form an eventually
    /// periodic stream, so that cumulative set is constant from here on.
    pub fn horizon(&self) -> Horizon {
        let tails = self
            .template
            .constants()
            .fold(Horizon::TRIVIAL, |h, s| h.join(s.tail.horizon()));
        Horizon {
            stabilization: tails.end(),
            period: self.generator_period().lcm(&tails.period),
        }
    }
}

pub fn staircase_member(family: &StaircaseFamily, n: usize) -> Result<PowerEquation> {
    family.member(n)
}

/// Where a projected equation came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Explicit(usize),
    Member { family: usize, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projected {
    pub equation: Equation,
    pub source: Source,
}

/// Explicit power equations together with staircase families, over a fixed
/// variable list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerSystem {
    variables: Vec<String>,
    explicit: Vec<PowerEquation>,
    families: Vec<StaircaseFamily>,
}

impl PowerSystem {
    pub fn new(
        variables: Vec<String>,
        explicit: Vec<PowerEquation>,
        families: Vec<StaircaseFamily>,
    ) -> Result<Self> {
        check_variables(&variables)?;
        let declared = |v: &str| variables.iter().any(|d| d == v);
        let used = explicit
            .iter()
            .flat_map(|e| e.variables())
            .chain(families.iter().flat_map(|f| f.template.variables()));
        for v in used {
            if !declared(v) {
                return Err(Error::UndeclaredVariable(v.to_string()));
            }
        }
        Ok(PowerSystem {
            variables,
            explicit,
            families,
        })
    }

    pub fn finite(variables: Vec<String>, explicit: Vec<PowerEquation>) -> Result<Self> {
        PowerSystem::new(variables, explicit, Vec::new())
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn explicit(&self) -> &[PowerEquation] {
        &self.explicit
    }

    pub fn families(&self) -> &[StaircaseFamily] {
        &self.families
    }

    pub fn is_finite(&self) -> bool {
        self.families.is_empty()
    }

    /// Signature, arity, variable and element-range checks against `structure`.
    pub fn check(&self, structure: &FiniteStructure) -> Result<()> {
        let size = structure.size();
        let in_range = |e: usize| {
            if e < size {
                Ok(())
            } else {
                Err(Error::ElementOutOfRange { index: e, size })
            }
        };
        for eq in &self.explicit {
            eq.check_shape(structure, &self.variables)?;
            eq.constants().flat_map(|c| c.elements()).try_for_each(in_range)?;
        }
        for family in &self.families {
            family.template.check_shape(structure, &self.variables)?;
            for s in family.template.constants() {
                s.generator.iter().copied().chain(s.tail.elements()).try_for_each(in_range)?;
            }
        }
        Ok(())
    }

    pub fn horizon(&self) -> Horizon {
        let explicit = self
            .explicit
            .iter()
            .flat_map(|e| e.constants())
            .map(PowerElement::horizon);
        let families = self.families.iter().map(StaircaseFamily::horizon);
        explicit.chain(families).fold(Horizon::TRIVIAL, Horizon::join)
    }

    pub fn equation(&self, source: Source) -> Result<PowerEquation> {
        match source {
            Source::Explicit(i) => Ok(self.explicit[i].clone()),
            Source::Member { family, n } => self.families[family].member(n),
        }
    }

    /// Distinct projections at coordinate `i`, each with the first source
    /// producing it: explicit equations in order, then per family the members
    /// `n = 1, 2, ...`; members past `i + 2` repeat member `i + 2` here.
    pub fn project_with_sources(&self, i: usize) -> Vec<Projected> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut push = |equation: Equation, source: Source| {
            if seen.insert(equation.clone()) {
                out.push(Projected { equation, source });
            }
        };
        for (j, eq) in self.explicit.iter().enumerate() {
            push(project_equation(eq, i), Source::Explicit(j));
        }
        for (f, family) in self.families.iter().enumerate() {
            for n in 1..=i + 2 {
                push(family.member_projection(n, i), Source::Member { family: f, n });
            }
        }
        out
    }

    pub fn project(&self, i: usize) -> EquationSystem {
        let equations = self.project_with_sources(i).into_iter().map(|p| p.equation).collect();
        EquationSystem::new(self.variables.clone(), equations).expect("variables checked on construction")
    }

    /// Explicit system of the first `n` members of every family, plus the
    /// explicit equations.
    pub fn truncated(&self, n: usize) -> PowerSystem {
        let mut explicit = self.explicit.clone();
        for family in &self.families {
            explicit.extend((1..=n).map(|m| family.member(m).expect("m >= 1")));
        }
        PowerSystem {
            variables: self.variables.clone(),
            explicit,
            families: Vec::new(),
        }
    }
}

/// Classes of the projections of a system at every coordinate, stored for one
/// initial stretch and one period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateProfile {
    pub stabilization: usize,
    pub period: usize,
    classes: Vec<BTreeSet<ClassId>>,
}

impl CoordinateProfile {
    pub fn horizon(&self) -> Horizon {
        Horizon {
            stabilization: self.stabilization,
            period: self.period,
        }
    }

    pub fn classes_at(&self, i: usize) -> &BTreeSet<ClassId> {
        &self.classes[self.horizon().fold(i)]
    }

    /// Recomputes the classes on `[p, p + 3q)` and their shifts by `q`
    /// directly from `system` and compares them.
    pub fn certify(&self, structure: &FiniteStructure, system: &PowerSystem) -> Result<bool> {
        let mut classes = ClassCache::new(structure, system.variables());
        let (p, q) = (self.stabilization, self.period);
        for i in p..p + 3 * q {
            let here = classes.at(system, i)?;
            if here != classes.at(system, i + q)? || &here != self.classes_at(i) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Memoized classes of base equations over a fixed variable list.
pub(crate) struct ClassCache<'a> {
    structure: &'a FiniteStructure,
    variables: &'a [String],
    memo: HashMap<Equation, ClassId>,
}

impl<'a> ClassCache<'a> {
    pub(crate) fn new(structure: &'a FiniteStructure, variables: &'a [String]) -> Self {
        ClassCache {
            structure,
            variables,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn class(&mut self, eq: &Equation) -> Result<ClassId> {
        if let Some(c) = self.memo.get(eq) {
            return Ok(c.clone());
        }
        let c = class_of(self.structure, eq, self.variables)?;
        self.memo.insert(eq.clone(), c.clone());
        Ok(c)
    }

    pub(crate) fn at(&mut self, system: &PowerSystem, i: usize) -> Result<BTreeSet<ClassId>> {
        system
            .project_with_sources(i)
            .iter()
            .map(|p| self.class(&p.equation))
            .collect()
    }
}

pub fn coordinate_profile(structure: &FiniteStructure, system: &PowerSystem) -> Result<CoordinateProfile> {
    system.check(structure)?;
    let horizon = system.horizon();
    let mut cache = ClassCache::new(structure, system.variables());
    let classes = (0..horizon.end())
        .map(|i| cache.at(system, i))
        .collect::<Result<_>>()?;
    Ok(CoordinateProfile {
        stabilization: horizon.stabilization,
        period: horizon.period,
        classes,
    })
}

/// Whether `point` lies in the solution set of `system` over the power,
/// decided coordinate by coordinate.
pub fn satisfies(structure: &FiniteStructure, system: &PowerSystem, point: &[PowerElement]) -> Result<bool> {
    if point.len() != system.variables.len() {
        return Err(Error::PointLength {
            expected: system.variables.len(),
            found: point.len(),
        });
    }
    system.check(structure)?;
    let horizon = point
        .iter()
        .map(PowerElement::horizon)
        .fold(system.horizon(), Horizon::join);
    for i in 0..horizon.end() {
        let coords: Vec<usize> = point.iter().map(|e| e.at(i)).collect();
        if !solver::satisfies_all(structure, &system.project(i), &coords)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coordinates to inspect when comparing two systems: both are periodic past
/// the joint stabilization index, so `[0, p + q)` decides everything and the
/// extra period `[p + q, p + 2q)` re-checks that periodicity.
pub fn comparison_window(left: &PowerSystem, right: &PowerSystem) -> (Horizon, std::ops::Range<usize>) {
    let h = left.horizon().join(right.horizon());
    (h, 0..h.end() + h.period)
}

/// Equivalence over the power. The solution set over the power is the
/// product of the projections' solution sets, so two systems are equivalent
/// when both have an empty projection somewhere, or when every pair of
/// projections has the same solutions.
pub fn equivalent_systems(structure: &FiniteStructure, left: &PowerSystem, right: &PowerSystem) -> Result<bool> {
    if left.variables != right.variables {
        return Err(Error::VariableMismatch {
            left: left.variables.clone(),
            right: right.variables.clone(),
        });
    }
    left.check(structure)?;
    right.check(structure)?;
    let window = comparison_window(left, right).1;
    let solutions = |system: &PowerSystem| {
        window
            .clone()
            .map(|i| solver::solve(structure, &system.project(i)))
            .collect::<Result<Vec<_>>>()
    };
    let (l, r) = (solutions(left)?, solutions(right)?);
    let empty = |sets: &[solver::AlgebraicSet]| sets.iter().any(solver::AlgebraicSet::is_empty);
    if empty(&l) || empty(&r) {
        return Ok(empty(&l) && empty(&r));
    }
    Ok(l == r)
}

/// An inconsistent projection, cut down to a minimal core whose equations
/// are traced back to the power equations that produced them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InconsistencyCertificate {
    pub coordinate: usize,
    pub core: Vec<Projected>,
}

impl InconsistencyCertificate {
    pub fn core_system(&self, variables: &[String]) -> EquationSystem {
        EquationSystem::new(
            variables.to_vec(),
            self.core.iter().map(|p| p.equation.clone()).collect(),
        )
        .expect("core equations come from a checked system")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent(InconsistencyCertificate),
}

/// A system over the power is consistent iff every projection is; the first
/// inconsistent coordinate (if any) lies below the system's horizon.
pub fn consistent(structure: &FiniteStructure, system: &PowerSystem) -> Result<Consistency> {
    system.check(structure)?;
    for i in 0..system.horizon().end() {
        let projected = system.project_with_sources(i);
        let base = EquationSystem::new(
            system.variables.clone(),
            projected.iter().map(|p| p.equation.clone()).collect(),
        )?;
        if let Some(core) = minimal_inconsistent_core(structure, &base)? {
            return Ok(Consistency::Inconsistent(InconsistencyCertificate {
                coordinate: i,
                core: core.into_iter().map(|j| projected[j].clone()).collect(),
            }));
        }
    }
    Ok(Consistency::Consistent)
}
