//! Compression of a staircase-presented system over a direct power into an
//! equivalent finite system of explicit equations.
//!
//! Only finitely many classes of base equations occur among the projections
//! (the base structure is finite). Collect them in `M`, pick a few source
//! equations `S0` whose projections realise every class, and for each class
//! `m` build one power equation `D` that projects into `m` wherever `m`
//! occurs and copies the source of `m` everywhere else. Then `S0` together
//! with all the `D`s has, at every coordinate, exactly the classes of the
//! input, so the two systems have the same solutions.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;

use crate::error::Result;
use crate::power::{
    comparison_window, project_equation, ClassCache, Horizon, PowerElement, PowerEquation,
    PowerSystem, Source,
};
use crate::signatures::FiniteStructure;
use crate::solver::{self, ClassId, Equation};

/// An eventually periodic set of coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet(PowerElement);

impl IndexSet {
    /// Members are the `i` with `member(i)`, which must be periodic past
    /// `horizon.stabilization`.
    pub fn from_fn(horizon: Horizon, member: impl Fn(usize) -> bool) -> Self {
        IndexSet(PowerElement::from_fn(horizon.stabilization, horizon.period, |i| {
            member(i) as usize
        }))
    }

    pub fn from_bits(prefix: &[bool], cycle: &[bool]) -> Result<Self> {
        let bits = |b: &[bool]| b.iter().map(|&x| x as usize).collect();
        Ok(IndexSet(PowerElement::new(bits(prefix), bits(cycle))?))
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.at(i) == 1
    }

    pub fn horizon(&self) -> Horizon {
        self.0.horizon()
    }

    pub fn prefix_bits(&self) -> Vec<bool> {
        self.0.prefix().iter().map(|&b| b == 1).collect()
    }

    pub fn cycle_bits(&self) -> Vec<bool> {
        self.0.cycle().iter().map(|&b| b == 1).collect()
    }

    pub fn complement(&self) -> Self {
        IndexSet::from_fn(self.horizon(), |i| !self.contains(i))
    }

    pub fn intersection(&self, other: &IndexSet) -> Self {
        IndexSet::from_fn(self.horizon().join(other.horizon()), |i| {
            self.contains(i) && other.contains(i)
        })
    }

    pub fn is_empty(&self) -> bool {
        self.0.elements().all(|b| b == 0)
    }
}

/// One class of `M`: a base equation in that class and the place it was
/// found, projection `coordinate` of the power equation `source`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MEntry {
    pub class: ClassId,
    pub representative: Equation,
    pub coordinate: usize,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrapStep {
    /// Index into `M`.
    pub entry: usize,
    /// Coordinates whose projection contains the class of the entry.
    pub i0: IndexSet,
    pub i1: IndexSet,
    pub equation: PowerEquation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrapTrace {
    pub variables: Vec<String>,
    pub horizon: Horizon,
    pub m: Vec<MEntry>,
    /// Source pairs `(coordinate, source)` of `M`, sorted and deduplicated.
    pub k: Vec<(usize, Source)>,
    pub s0: Vec<(Source, PowerEquation)>,
    pub steps: Vec<WrapStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrapResult {
    pub s_prime: PowerSystem,
    pub trace: WrapTrace,
    pub verified: bool,
    pub bound_ok: bool,
}

/// Two projections whose solution sets differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub coordinate: usize,
    pub original: Vec<Vec<usize>>,
    pub wrapped: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrapReport {
    pub horizon: Horizon,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl WrapReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Classes are keyed by solution set alone: two equations with the same
/// solutions are interchangeable in any projection.
fn key(class: &ClassId) -> &bitvec::vec::BitVec {
    &class.solutions
}

/// Every class occurring in some projection, each with the first place it
/// occurs (least coordinate, then source order).
pub fn compute_m(structure: &FiniteStructure, system: &PowerSystem) -> Result<Vec<MEntry>> {
    system.check(structure)?;
    let mut cache = ClassCache::new(structure, system.variables());
    let mut seen = BTreeSet::new();
    let mut m = Vec::new();
    for i in 0..system.horizon().end() {
        for p in system.project_with_sources(i) {
            let class = cache.class(&p.equation)?;
            if seen.insert(key(&class).clone()) {
                m.push(MEntry {
                    class,
                    representative: p.equation,
                    coordinate: i,
                    source: p.source,
                });
            }
        }
    }
    Ok(m)
}

/// Candidate sources for `S0`: every explicit equation and, per family, the
/// members up to one past the generator period. Later members realise no
/// class that member `period + 1` misses.
fn candidates(system: &PowerSystem) -> Vec<Source> {
    let explicit = (0..system.explicit().len()).map(Source::Explicit);
    let members = system.families().iter().enumerate().flat_map(|(f, family)| {
        (1..=family.generator_period() + 1).map(move |n| Source::Member { family: f, n })
    });
    explicit.chain(members).collect()
}

/// Index of an `M` entry to the first coordinate realising it, with the
/// projected equation there.
type FirstSeen = BTreeMap<usize, (usize, Equation)>;

/// Greedy cover of `M` by source equations: repeatedly take the candidate
/// realising the most classes not yet realised, earliest candidate on ties.
/// Each entry of `M` is then re-pointed to its least coordinate in `S0`.
pub fn build_s0(
    structure: &FiniteStructure,
    system: &PowerSystem,
    m: &mut [MEntry],
) -> Result<Vec<(Source, PowerEquation)>> {
    let mut cache = ClassCache::new(structure, system.variables());
    let index: BTreeMap<_, usize> = m.iter().enumerate().map(|(s, e)| (key(&e.class).clone(), s)).collect();
    // First occurrence of each class of M in each candidate.
    let mut realised: Vec<(Source, PowerEquation, FirstSeen)> = Vec::new();
    for source in candidates(system) {
        let eq = system.equation(source)?;
        let h = eq.constants().map(PowerElement::horizon).fold(Horizon::TRIVIAL, Horizon::join);
        let mut first = BTreeMap::new();
        for i in 0..h.end() {
            let projected = project_equation(&eq, i);
            let class = cache.class(&projected)?;
            let s = index[key(&class)];
            first.entry(s).or_insert((i, projected));
        }
        realised.push((source, eq, first));
    }

    let mut covered = vec![false; m.len()];
    let mut chosen: Vec<usize> = Vec::new();
    while covered.iter().any(|c| !c) {
        let gain = |c: usize| realised[c].2.keys().filter(|&&s| !covered[s]).count();
        let best = (0..realised.len())
            .max_by_key(|&c| (gain(c), std::cmp::Reverse(c)))
            .expect("every class comes from some candidate");
        assert!(gain(best) > 0, "class of M not realised by any candidate");
        for &s in realised[best].2.keys() {
            covered[s] = true;
        }
        chosen.push(best);
    }

    for (s, entry) in m.iter_mut().enumerate() {
        let (coordinate, source, representative) = chosen
            .iter()
            .filter_map(|&c| realised[c].2.get(&s).map(|(i, eq)| (*i, realised[c].0, eq)))
            .min_by_key(|&(i, source, _)| (i, source))
            .expect("covered");
        entry.coordinate = coordinate;
        entry.source = source;
        entry.representative = representative.clone();
    }
    chosen.sort_by_key(|&c| realised[c].0);
    Ok(chosen
        .into_iter()
        .map(|c| (realised[c].0, realised[c].1.clone()))
        .collect())
}

/// Builds the finite system and its trace, then verifies it.
pub fn wrap(structure: &FiniteStructure, system: &PowerSystem) -> Result<WrapResult> {
    let mut m = compute_m(structure, system)?;
    let s0 = build_s0(structure, system, &mut m)?;
    let horizon = system.horizon();

    // Class keys present at each coordinate below the horizon.
    let mut cache = ClassCache::new(structure, system.variables());
    let present: Vec<BTreeSet<_>> = (0..horizon.end())
        .map(|i| {
            Ok(cache
                .at(system, i)?
                .into_iter()
                .map(|c| key(&c).clone())
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut steps = Vec::with_capacity(m.len());
    for (s, entry) in m.iter().enumerate() {
        let i0 = IndexSet::from_fn(horizon, |l| present[horizon.fold(l)].contains(key(&entry.class)));
        let i1 = i0.complement();
        let source = system.equation(entry.source)?;
        let i = entry.coordinate;
        let equation = source.map_constants(|c| {
            let h = horizon.join(c.horizon());
            PowerElement::from_fn(h.stabilization, h.period, |l| {
                if i0.contains(l) {
                    c.at(i)
                } else {
                    c.at(l)
                }
            })
        });
        steps.push(WrapStep {
            entry: s,
            i0,
            i1,
            equation,
        });
    }

    let mut explicit: Vec<PowerEquation> = Vec::new();
    for eq in s0.iter().map(|(_, e)| e).chain(steps.iter().map(|s| &s.equation)) {
        if !explicit.contains(eq) {
            explicit.push(eq.clone());
        }
    }
    let s_prime = PowerSystem::finite(system.variables().to_vec(), explicit)?;

    let mut k: Vec<(usize, Source)> = m.iter().map(|e| (e.coordinate, e.source)).collect();
    k.sort();
    k.dedup();
    let trace = WrapTrace {
        variables: system.variables().to_vec(),
        horizon,
        m,
        k,
        s0,
        steps,
    };
    let verified = verify_wrap(structure, system, &s_prime)?.passed();
    let mut result = WrapResult {
        s_prime,
        trace,
        verified,
        bound_ok: false,
    };
    result.bound_ok = bound_check(structure, system, &result);
    Ok(result)
}

/// Compares the solution sets of the projections of both systems on the
/// joint horizon and one extra period.
pub fn verify_wrap(structure: &FiniteStructure, original: &PowerSystem, wrapped: &PowerSystem) -> Result<WrapReport> {
    if original.variables() != wrapped.variables() {
        return Err(crate::Error::VariableMismatch {
            left: original.variables().to_vec(),
            right: wrapped.variables().to_vec(),
        });
    }
    original.check(structure)?;
    wrapped.check(structure)?;
    let (horizon, window) = comparison_window(original, wrapped);
    let checked = window.len();
    let mut mismatches = Vec::new();
    for i in window {
        let left = solver::solve(structure, &original.project(i))?;
        let right = solver::solve(structure, &wrapped.project(i))?;
        if left != right {
            mismatches.push(Mismatch {
                coordinate: i,
                original: left.points(),
                wrapped: right.points(),
            });
        }
    }
    Ok(WrapReport {
        horizon,
        checked,
        mismatches,
    })
}

/// `2^(k^n)`, or `None` when it does not fit in a `u128`.
pub fn class_bound(k: usize, n: usize) -> Option<u128> {
    let exponent = u32::try_from(k).ok()?.checked_pow(u32::try_from(n).ok()?)?;
    1u128.checked_shl(exponent)
}

/// `|M| <= 2^(k^n)` and `|S'| <= 2 |M|`, hence `|S'| <= 2^(k^n + 1)`.
pub fn bound_check(structure: &FiniteStructure, system: &PowerSystem, result: &WrapResult) -> bool {
    let m = result.trace.m.len();
    let m_ok = class_bound(structure.size(), system.variables().len()).is_none_or(|b| (m as u128) <= b);
    m_ok && result.s_prime.explicit().len() <= 2 * m
}

/// `[b,c,(a)*]`, `[(a)*]`, `[b,c,(b,a)*]`, `[b,c,(a,c)*]` over `k3()`: the
/// four equations listed for the first worked example.
pub fn example1_s_prime() -> PowerSystem {
    use crate::solver::{Arg, Atom};
    let (a, b, c) = (0, 1, 2);
    let e = |prefix: Vec<usize>, cycle: Vec<usize>| {
        Atom::relation(
            "E",
            vec![Arg::var("x"), Arg::Const(PowerElement::new(prefix, cycle).expect("nonempty"))],
        )
    };
    PowerSystem::finite(
        vec!["x".to_string()],
        vec![
            e(vec![b, c], vec![a]),
            e(vec![], vec![a]),
            e(vec![b, c], vec![b, a]),
            e(vec![b, c], vec![a, c]),
        ],
    )
    .expect("single variable x")
}

/// Least common multiple of the periods of the constants of `eq`.
pub fn equation_period(eq: &PowerEquation) -> usize {
    eq.constants().fold(1, |acc, c| acc.lcm(&c.cycle().len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::power::{satisfies, Staircase, StaircaseFamily};
    use crate::solver::{Arg, Atom};

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;

    fn pe(prefix: &[usize], cycle: &[usize]) -> PowerElement {
        PowerElement::new(prefix.to_vec(), cycle.to_vec()).unwrap()
    }

    fn e_x(c: PowerElement) -> PowerEquation {
        Atom::relation("E", vec![Arg::var("x"), Arg::Const(c)])
    }

    fn x() -> Vec<String> {
        vec!["x".into()]
    }

    #[test]
    fn index_sets() {
        let evens = IndexSet::from_fn(Horizon { stabilization: 0, period: 2 }, |i| i % 2 == 0);
        let late = IndexSet::from_fn(Horizon { stabilization: 3, period: 1 }, |i| i >= 3);
        assert!(evens.contains(10) && !evens.contains(7));
        assert_eq!(evens.complement().complement(), evens);
        let both = evens.intersection(&late);
        assert_eq!((0..12).filter(|&i| both.contains(i)).collect::<Vec<_>>(), [4, 6, 8, 10]);
        assert!(evens.intersection(&evens.complement()).is_empty());
        let odd_start = IndexSet::from_bits(&[true], &[false, true]).unwrap();
        assert!(odd_start.prefix_bits().is_empty());
        assert_eq!(odd_start.cycle_bits(), [true, false]);
    }

    #[test]
    fn example1_m_and_s0() {
        let k3 = fixtures::k3();
        let s = k3.structure();
        let system = fixtures::example1_system();
        let mut m = compute_m(s, &system).unwrap();
        let reps: Vec<String> = m.iter().map(|e| e.representative.display(s).to_string()).collect();
        assert_eq!(reps, ["E(x, a)", "E(x, b)", "E(x, c)"]);
        let s0 = build_s0(s, &system, &mut m).unwrap();
        assert_eq!(s0.len(), 1);
        assert_eq!(s0[0].0, Source::Member { family: 0, n: 3 });
        assert_eq!(s0[0].1, e_x(pe(&[B, C], &[A])));
        let pairs: Vec<(usize, Source)> = m.iter().map(|e| (e.coordinate, e.source)).collect();
        let member3 = Source::Member { family: 0, n: 3 };
        assert_eq!(pairs, [(2, member3), (0, member3), (1, member3)]);
    }

    #[test]
    fn example1_wrap_matches_the_listed_system() {
        let k3 = fixtures::k3();
        let s = k3.structure();
        let system = fixtures::example1_system();
        let result = wrap(s, &system).unwrap();
        assert!(result.verified && result.bound_ok);
        assert_eq!(result.s_prime.explicit().len(), 4);
        let mut got = result.s_prime.explicit().to_vec();
        let mut want = example1_s_prime().explicit().to_vec();
        got.sort_by_key(|e| format!("{e:?}"));
        want.sort_by_key(|e| format!("{e:?}"));
        assert_eq!(got, want);
        assert!(verify_wrap(s, &system, &example1_s_prime()).unwrap().passed());
    }

    #[test]
    fn s0_alone_is_not_enough() {
        let k3 = fixtures::k3();
        let s = k3.structure();
        let s0 = PowerSystem::finite(x(), vec![e_x(pe(&[B, C], &[A]))]).unwrap();
        let report = verify_wrap(s, &fixtures::example1_system(), &s0).unwrap();
        assert!(!report.passed());
        let at1 = report.mismatches.iter().find(|m| m.coordinate == 1).unwrap();
        assert_eq!(at1.original, [vec![B]]);
        assert_eq!(at1.wrapped, [vec![A], vec![B]]);
    }

    #[test]
    fn trivial_inputs() {
        let k3 = fixtures::k3();
        let s = k3.structure();
        let single = PowerSystem::finite(x(), vec![e_x(PowerElement::constant(A))]).unwrap();
        let result = wrap(s, &single).unwrap();
        assert_eq!(result.trace.m.len(), 1);
        assert_eq!(result.s_prime.explicit(), single.explicit());
        assert!(result.verified);

        let empty = PowerSystem::finite(x(), vec![]).unwrap();
        let result = wrap(s, &empty).unwrap();
        assert!(result.s_prime.explicit().is_empty() && result.verified && result.bound_ok);
        assert!(verify_wrap(s, &system_k3_ba(), &system_k3_ba()).unwrap().passed());
    }

    fn system_k3_ba() -> PowerSystem {
        let family = StaircaseFamily::new(Atom::relation(
            "E",
            vec![Arg::var("x"), Arg::Const(Staircase::new(vec![B], PowerElement::constant(A)).unwrap())],
        ));
        PowerSystem::new(x(), vec![], vec![family]).unwrap()
    }

    #[test]
    fn k3_family_b_then_a() {
        let k3 = fixtures::k3();
        let s = k3.structure();
        let m = compute_m(s, &system_k3_ba()).unwrap();
        let reps: Vec<String> = m.iter().map(|e| e.representative.display(s).to_string()).collect();
        assert_eq!(reps, ["E(x, a)", "E(x, b)"]);
        assert!(wrap(s, &system_k3_ba()).unwrap().verified);
    }

    #[test]
    fn two_templates_need_two_sources() {
        // E(x, y) with y pinned two ways: classes of E(x,a) and of x = b.
        let k3 = fixtures::k3();
        let s = k3.structure();
        let system = PowerSystem::finite(
            x(),
            vec![
                e_x(PowerElement::constant(A)),
                Atom::equality(Arg::var("x"), Arg::Const(PowerElement::constant(B))),
            ],
        )
        .unwrap();
        let mut m = compute_m(s, &system).unwrap();
        assert_eq!(build_s0(s, &system, &mut m).unwrap().len(), 2);
        assert!(wrap(s, &system).unwrap().verified);
    }

    #[test]
    fn trace_is_coherent_and_wrapping_is_idempotent() {
        let k3 = fixtures::k3();
        let s = k3.structure();
        let system = fixtures::example1_system();
        let result = wrap(s, &system).unwrap();
        let mut cache = ClassCache::new(s, system.variables());
        let s0: BTreeMap<Source, &PowerEquation> = result.trace.s0.iter().map(|(src, e)| (*src, e)).collect();
        for step in &result.trace.steps {
            let entry = &result.trace.m[step.entry];
            for l in 0..20 {
                let projected = project_equation(&step.equation, l);
                if step.i0.contains(l) {
                    assert_eq!(cache.class(&projected).unwrap().solutions, entry.class.solutions);
                } else {
                    assert!(step.i1.contains(l));
                    assert_eq!(projected, project_equation(s0[&entry.source], l));
                }
            }
        }
        let again = wrap(s, &result.s_prime).unwrap();
        assert!(verify_wrap(s, &result.s_prime, &again.s_prime).unwrap().passed());
        for point in [pe(&[], &[B]), pe(&[B], &[C, B]), pe(&[], &[A]), pe(&[B, B], &[B, C])] {
            let point = [point];
            assert_eq!(
                satisfies(s, &system, &point).unwrap(),
                satisfies(s, &result.s_prime, &point).unwrap()
            );
        }
    }

    #[test]
    fn class_bounds() {
        assert_eq!(class_bound(3, 1), Some(8));
        assert_eq!(class_bound(2, 2), Some(16));
        assert_eq!(class_bound(3, 5), None);
        assert_eq!(equation_period(&e_x(pe(&[B], &[A, C]))), 2);
    }
}
