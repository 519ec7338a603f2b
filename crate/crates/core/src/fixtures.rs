//! Small named structures and systems used throughout the tests and shipped
//! as JSON under `fixtures/`.

use crate::power::{PowerSystem, Staircase, StaircaseFamily};
use crate::signatures::{
    graph_with_labels, matroid_from_sets, FiniteStructure, Graph, Matroid, Poset, Signature, LEQ,
};
use crate::solver::{Arg, Atom};

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Complete graph on `a, b, c`.
pub fn k3() -> Graph {
    graph_with_labels(labels(&["a", "b", "c"]), [(0, 1), (1, 2), (2, 0)]).unwrap()
}

/// Path `u1 - u2 - u3 - u4`.
pub fn p4() -> Graph {
    graph_with_labels(labels(&["u1", "u2", "u3", "u4"]), [(0, 1), (1, 2), (2, 3)]).unwrap()
}

/// Cycle `v1 - v2 - v3 - v4 - v5 - v1`.
pub fn c5() -> Graph {
    graph_with_labels(
        labels(&["v1", "v2", "v3", "v4", "v5"]),
        [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)],
    )
    .unwrap()
}

fn poset(universe: &[&str], strict: &[(&str, &str)]) -> Poset {
    let mut pairs: Vec<Vec<&str>> = universe.iter().map(|&x| vec![x, x]).collect();
    pairs.extend(strict.iter().map(|&(a, b)| vec![a, b]));
    Poset::try_from(FiniteStructure::from_labels(Signature::poset(), universe, &[(LEQ, pairs)]).unwrap())
        .unwrap()
}

/// Two-element chain `a < b`.
pub fn ch2() -> Poset {
    poset(&["a", "b"], &[("a", "b")])
}

/// `a < b` with `c` incomparable to both.
pub fn ch2_plus_point() -> Poset {
    poset(&["a", "b", "c"], &[("a", "b")])
}

pub fn antichain3() -> Poset {
    poset(&["a", "b", "c"], &[])
}

fn matroid(universe: &[&str], sets: Vec<Vec<usize>>) -> Matroid {
    Matroid::try_from(matroid_from_sets(labels(universe), sets).unwrap()).unwrap()
}

/// Free matroid on `a, b`.
pub fn fm2() -> Matroid {
    matroid(&["a", "b"], vec![vec![0], vec![1], vec![0, 1]])
}

/// Free matroid on `a, b, c`.
pub fn fm3() -> Matroid {
    matroid(
        &["a", "b", "c"],
        vec![
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
            vec![0, 1, 2],
        ],
    )
}

/// Uniform rank-1 matroid on `a, b, c`: only singletons are independent.
pub fn rank1() -> Matroid {
    matroid(&["a", "b", "c"], vec![vec![0], vec![1], vec![2]])
}

/// Over `k3()`: the single family `E(x, [b,c,b,c,...,b/c, a, a, ...])`,
/// whose `n`-th member carries `n - 1` entries of the stream `b c b c ...`
/// before switching to `a` forever.
pub fn example1_system() -> PowerSystem {
    let family = StaircaseFamily::new(Atom::Relation {
        symbol: "E".into(),
        args: vec![
            Arg::Var("x".into()),
            Arg::Const(Staircase::new(vec![1, 2], crate::power::PowerElement::constant(0)).unwrap()),
        ],
    });
    PowerSystem::new(vec!["x".into()], vec![], vec![family]).unwrap()
}
