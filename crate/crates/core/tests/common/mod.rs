//! Enumerators and generators shared by the integration tests.
#![allow(dead_code)]

use noether::power::{PowerElement, PowerSystem, Staircase, StaircaseFamily};
use noether::signatures::{graph_on, FiniteStructure, Graph, Signature, Symbol};
use noether::solver::{Arg, Atom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Unordered vertex pairs of `0..n`, in a fixed order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// Every graph on `n` vertices, indexed by edge bitmask.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs = pairs(n);
    (0u32..1 << pairs.len()).map(move |mask| {
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e);
        graph_on(n, edges).unwrap()
    })
}

/// Adjacency as a plain matrix, read through `Graph::adjacent`.
pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    (0..g.size()).map(|u| (0..g.size()).map(|v| g.adjacent(u, v)).collect()).collect()
}

/// Smallest relabelled edge mask over all vertex permutations.
pub fn canonical_mask(g: &Graph) -> u32 {
    use itertools::Itertools;
    let n = g.size();
    let pairs = pairs(n);
    (0..n)
        .permutations(n)
        .map(|p| {
            pairs
                .iter()
                .enumerate()
                .filter(|(_, &(u, v))| g.adjacent(p[u], p[v]))
                .map(|(i, _)| 1u32 << i)
                .sum()
        })
        .min()
        .unwrap_or(0)
}

/// Lexicographically least `(x1, x2, x3, x4)` over all of `0..k`^4 with
/// `E(x1,x2), E(x2,x3), E(x3,x4)` and not `E(x4,x1)`.
pub fn naive_quadruple(adj: &[Vec<bool>]) -> Option<[usize; 4]> {
    let k = adj.len();
    for x1 in 0..k {
        for x2 in 0..k {
            for x3 in 0..k {
                for x4 in 0..k {
                    if adj[x1][x2] && adj[x2][x3] && adj[x3][x4] && !adj[x4][x1] {
                        return Some([x1, x2, x3, x4]);
                    }
                }
            }
        }
    }
    None
}

pub fn random_element(rng: &mut ChaCha8Rng, k: usize) -> PowerElement {
    let prefix = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..k)).collect();
    let cycle = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..k)).collect();
    PowerElement::new(prefix, cycle).unwrap()
}

pub fn random_staircase(rng: &mut ChaCha8Rng, k: usize) -> Staircase {
    let generator = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..k)).collect();
    Staircase::new(generator, random_element(rng, k)).unwrap()
}

/// A structure on `k` elements with a random unary `U` and binary `R`.
pub fn random_structure(rng: &mut ChaCha8Rng, k: usize) -> FiniteStructure {
    let signature = Signature::new(vec![Symbol::new("U", 1), Symbol::new("R", 2)]).unwrap();
    let universe: Vec<String> = (0..k).map(|i| format!("e{i}")).collect();
    let unary = (0..k).filter(|_| rng.gen_bool(0.5)).map(|e| vec![e]).collect();
    let binary = (0..k)
        .flat_map(|a| (0..k).map(move |b| vec![a, b]))
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    FiniteStructure::new(signature, universe, vec![unary, binary]).unwrap()
}

fn random_atom<C>(rng: &mut ChaCha8Rng, vars: &[String], mut constant: impl FnMut(&mut ChaCha8Rng) -> C) -> Atom<C> {
    let mut arg = |rng: &mut ChaCha8Rng, force_const: bool| {
        if force_const || rng.gen_bool(0.4) {
            Arg::Const(constant(rng))
        } else {
            Arg::Var(vars[rng.gen_range(0..vars.len())].clone())
        }
    };
    match rng.gen_range(0..4) {
        0 => Atom::relation("U", vec![arg(rng, false)]),
        1 => {
            let l = Arg::Var(vars[rng.gen_range(0..vars.len())].clone());
            Atom::equality(l, arg(rng, false))
        }
        _ => {
            let first = arg(rng, false);
            let force = matches!(first, Arg::Var(_));
            Atom::relation("R", vec![first, arg(rng, force)])
        }
    }
}

/// A random system over `random_structure`: up to two explicit equations
/// and one or two staircase families over `n` variables.
pub fn random_power_system(rng: &mut ChaCha8Rng, k: usize, n: usize) -> PowerSystem {
    let vars: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let explicit = (0..rng.gen_range(0..=2))
        .map(|_| random_atom(rng, &vars, |r| random_element(r, k)))
        .collect();
    let families = (0..rng.gen_range(1..=2))
        .map(|_| StaircaseFamily::new(random_atom(rng, &vars, |r| random_staircase(r, k))))
        .collect();
    PowerSystem::new(vars, explicit, families).unwrap()
}

/// Single-variable edge family `E(x, S)` with a random staircase over `k`.
pub fn random_edge_family(rng: &mut ChaCha8Rng, k: usize) -> PowerSystem {
    let family = StaircaseFamily::new(Atom::relation(
        "E",
        vec![Arg::var("x"), Arg::Const(random_staircase(rng, k))],
    ));
    PowerSystem::new(vec!["x".into()], vec![], vec![family]).unwrap()
}

/// Members `1..=limit` of the single family of `system`, and a subsystem of
/// at most two of them equivalent to the whole family, if one exists. The
/// search compares per-coordinate solution sets on a window covering every
/// candidate; the answer is then re-checked with `equivalent_systems`.
pub fn small_equivalent_subsystem(s: &FiniteStructure, system: &PowerSystem) -> Option<Vec<usize>> {
    use noether::power::{equivalent_systems, project_equation, Horizon};
    use noether::solver::{solve, EquationSystem};

    let family = &system.families()[0];
    let limit = family.horizon().end() + family.generator_period() + 2;
    let members: Vec<_> = (1..=limit).map(|n| family.member(n).unwrap()).collect();
    let h = members
        .iter()
        .flat_map(|m| m.constants().map(PowerElement::horizon))
        .fold(system.horizon(), Horizon::join);
    let window = 0..h.end() + h.period;
    let vars = system.variables().to_vec();
    let sol = |eqs| solve(s, &EquationSystem::new(vars.clone(), eqs).unwrap()).unwrap();
    let whole: Vec<_> = window.clone().map(|i| solve(s, &system.project(i)).unwrap()).collect();
    let single: Vec<Vec<_>> = members
        .iter()
        .map(|m| window.clone().map(|i| sol(vec![project_equation(m, i)])).collect())
        .collect();
    let inconsistent = whole.iter().any(|w| w.is_empty());
    let meet = |pick: &[usize], i: usize| {
        let mut cells = single[pick[0]][i].cells().to_bitvec();
        for &p in &pick[1..] {
            cells &= single[p][i].cells();
        }
        cells
    };
    let matches = |pick: &[usize]| {
        if inconsistent {
            window.clone().any(|i| meet(pick, i).not_any())
        } else {
            window.clone().all(|i| meet(pick, i) == whole[i].cells())
        }
    };
    let picks = (0..limit)
        .map(|a| vec![a])
        .chain((0..limit).flat_map(|a| (a + 1..limit).map(move |b| vec![a, b])));
    for pick in picks {
        if matches(&pick) {
            let sub = PowerSystem::finite(vars.clone(), pick.iter().map(|&p| members[p].clone()).collect()).unwrap();
            assert!(equivalent_systems(s, system, &sub).unwrap());
            return Some(pick.iter().map(|p| p + 1).collect());
        }
    }
    None
}
