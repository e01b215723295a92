//! Built-in catalogue of small algebras used as fixtures throughout the
//! test suites and the CLI.
//!
//! - `A1`..`A5`: the two-dimensional commutative associative algebras over
//!   GF(2) (unwritten products are zero).
//! - `W1_5`, `W1_7`: the Witt algebra W(1) over GF(5) and GF(7).
//! - `rigid_A4`: `[x,y] = y`, `x^[2] = x`, `y^[2] = 0` over `A4` with the
//!   anchor `rho(x) = e2 (x) e2*`, `rho(y) = 0`.
//! - `Lab0_A4`, `Lab1_A4`: the abelian two-dimensional Lie algebra over
//!   `A4` with zero anchor; `Lab1` carries the p-map
//!   `x^[2] = l1 x + l2 y` with configurable parameters.
//! - `T1_p3`, `T2_p3`, `T3_p3`: verification fixtures over GF(3) with zero
//!   anchor.

use crate::algebra::{AlgebraPresentation, LiePresentation, ModuleAction, RlrAlgebra};
use crate::gfp::{MatGfp, Prime};

fn gf2() -> Prime {
    Prime::new(2).unwrap()
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// The five two-dimensional commutative associative algebras over GF(2).
pub fn algebra_a(n: usize) -> AlgebraPresentation {
    let p = gf2();
    let lab = labels(&["e1", "e2"]);
    match n {
        1 => AlgebraPresentation::new("A1", p, lab, &[(0, 0, 0, 1)]),
        2 => AlgebraPresentation::new("A2", p, lab, &[(0, 0, 1, 1)]),
        3 => AlgebraPresentation::new("A3", p, lab, &[(0, 0, 0, 1), (1, 1, 1, 1)]),
        4 => AlgebraPresentation::new(
            "A4",
            p,
            lab,
            &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)],
        ),
        5 => AlgebraPresentation::new(
            "A5",
            p,
            lab,
            &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 1)],
        ),
        _ => panic!("algebra_a expects 1..=5"),
    }
}

/// The Witt algebra W(1) over GF(p), p >= 5: basis `e_{-1}, ..., e_{p-2}`,
/// `[e_i, e_j] = (j - i) e_{i+j}` when the index stays in range, p-map
/// `e_0^[p] = e_0` and zero on the other basis vectors.
pub fn witt(p: u32) -> LiePresentation {
    assert!(p >= 5, "W(1) is restricted for p >= 5");
    let prime = Prime::new(p).unwrap();
    let dim = p as usize;
    let lab: Vec<String> = (0..dim).map(|k| format!("e{}", k as i64 - 1)).collect();
    let mut brackets = Vec::new();
    // basis slot k holds e_{k-1}
    for ki in 0..dim {
        for kj in ki + 1..dim {
            let i = ki as i64 - 1;
            let j = kj as i64 - 1;
            let target = i + j;
            if (-1..=(p as i64 - 2)).contains(&target) {
                let coef = (j - i).rem_euclid(p as i64) as u32;
                if coef != 0 {
                    brackets.push((ki, kj, (target + 1) as usize, coef));
                }
            }
        }
    }
    let mut pmap = vec![vec![0u32; dim]; dim];
    pmap[1][1] = 1; // e_0^[p] = e_0
    LiePresentation::new(format!("W1({p})"), prime, lab, &brackets, pmap)
}

/// Basis images `f_j` of the Witt p-map, for feeding the p-map extension.
pub fn witt_pmap_images(p: u32) -> Vec<Vec<u32>> {
    let dim = p as usize;
    let mut pmap = vec![vec![0u32; dim]; dim];
    pmap[1][1] = 1;
    pmap
}

fn a4_action_on_xy() -> ModuleAction {
    // e1 . x = x, e1 . y = y, e2 . x = y, e2 . y = 0
    ModuleAction::new(2, 2, &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)])
}

fn der_matrix_e2_to(p: Prime, image: &[u32]) -> MatGfp {
    // the derivation sending e2 to `image` and e1 to 0
    let mut m = MatGfp::zeros(2, 2, p);
    for (i, &v) in image.iter().enumerate() {
        m.set(i, 1, v);
    }
    m
}

/// `[x,y] = y`, `x^[2] = x`, `y^[2] = 0` over `A4`, anchor
/// `rho(x)(e2) = e2`, `rho(y) = 0`.
pub fn rigid_a4() -> RlrAlgebra {
    let p = gf2();
    let l = LiePresentation::new(
        "L_rigid",
        p,
        labels(&["x", "y"]),
        &[(0, 1, 1, 1)],
        vec![vec![1, 0], vec![0, 0]],
    );
    RlrAlgebra {
        name: "rigid_A4".into(),
        a: algebra_a(4),
        l,
        action: a4_action_on_xy(),
        anchor: vec![der_matrix_e2_to(p, &[0, 1]), MatGfp::zeros(2, 2, p)],
    }
}

/// Abelian two-dimensional Lie algebra with zero p-map over `A4`, zero
/// anchor.
pub fn lab0_a4() -> RlrAlgebra {
    let p = gf2();
    let l = LiePresentation::new(
        "L_ab0",
        p,
        labels(&["x", "y"]),
        &[],
        vec![vec![0, 0], vec![0, 0]],
    );
    RlrAlgebra {
        name: "Lab0_A4".into(),
        a: algebra_a(4),
        l,
        action: a4_action_on_xy(),
        anchor: vec![MatGfp::zeros(2, 2, p), MatGfp::zeros(2, 2, p)],
    }
}

/// Abelian two-dimensional Lie algebra over `A4` with
/// `x^[2] = l1 x + l2 y`, `y^[2] = 0`, zero anchor.
pub fn lab1_a4(lambda1: u32, lambda2: u32) -> RlrAlgebra {
    let p = gf2();
    let l = LiePresentation::new(
        "L_ab1",
        p,
        labels(&["x", "y"]),
        &[],
        vec![vec![lambda1 % 2, lambda2 % 2], vec![0, 0]],
    );
    RlrAlgebra {
        name: format!("Lab1_A4({},{})", lambda1 % 2, lambda2 % 2),
        a: algebra_a(4),
        l,
        action: a4_action_on_xy(),
        anchor: vec![MatGfp::zeros(2, 2, p), MatGfp::zeros(2, 2, p)],
    }
}

fn gf3() -> Prime {
    Prime::new(3).unwrap()
}

/// GF(3) fixture: `A` unital-like (`e1` acts as identity, `e2^2 = 0`),
/// abelian `L` with zero p-map, zero anchor.
pub fn toy_t1_p3() -> RlrAlgebra {
    let p = gf3();
    let a = AlgebraPresentation::new(
        "B1",
        p,
        labels(&["e1", "e2"]),
        &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)],
    );
    let l = LiePresentation::new(
        "T1_L",
        p,
        labels(&["x", "y"]),
        &[],
        vec![vec![0, 0], vec![0, 0]],
    );
    RlrAlgebra {
        name: "T1_p3".into(),
        a,
        l,
        action: ModuleAction::new(2, 2, &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)]),
        anchor: vec![MatGfp::zeros(2, 2, p), MatGfp::zeros(2, 2, p)],
    }
}

/// GF(3) fixture: same carrier as `T1_p3` but with `x^[3] = x`.
pub fn toy_t2_p3() -> RlrAlgebra {
    let mut r = toy_t1_p3();
    r.name = "T2_p3".into();
    r.l.pmap_on_basis = vec![vec![1, 0], vec![0, 0]];
    r.l.name = "T2_L".into();
    r
}

/// GF(3) fixture with a nonabelian `L`: `[x,y] = y`, `x^[3] = x`,
/// `y^[3] = 0`, over the split algebra `e1^2 = e1`, `e2^2 = e2` with `L`
/// concentrated over `e1` (so the bracket is A-bilinear) and zero anchor.
pub fn toy_t3_p3() -> RlrAlgebra {
    let p = gf3();
    let a = AlgebraPresentation::new(
        "B3",
        p,
        labels(&["e1", "e2"]),
        &[(0, 0, 0, 1), (1, 1, 1, 1)],
    );
    let l = LiePresentation::new(
        "T3_L",
        p,
        labels(&["x", "y"]),
        &[(0, 1, 1, 1)],
        vec![vec![1, 0], vec![0, 0]],
    );
    RlrAlgebra {
        name: "T3_p3".into(),
        a,
        l,
        action: ModuleAction::new(2, 2, &[(0, 0, 0, 1), (0, 1, 1, 1)]),
        anchor: vec![MatGfp::zeros(2, 2, p), MatGfp::zeros(2, 2, p)],
    }
}

/// GF(3) fixture with the three-dimensional Heisenberg algebra
/// (`[x,y] = z`, zero p-map) over a two-dimensional algebra acting through
/// its idempotent, zero anchor. Large enough for a nonvanishing
/// Chevalley-Eilenberg 3-form.
pub fn heisenberg_p3() -> RlrAlgebra {
    let p = gf3();
    let a = AlgebraPresentation::new(
        "B1",
        p,
        labels(&["e1", "e2"]),
        &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)],
    );
    let l = LiePresentation::new(
        "H3_L",
        p,
        labels(&["x", "y", "z"]),
        &[(0, 1, 2, 1)],
        vec![vec![0, 0, 0]; 3],
    );
    RlrAlgebra {
        name: "H3_p3".into(),
        a,
        l,
        action: ModuleAction::new(2, 3, &[(0, 0, 0, 1), (0, 1, 1, 1), (0, 2, 2, 1)]),
        anchor: vec![MatGfp::zeros(2, 2, p); 3],
    }
}

/// Every registered name, in catalogue order.
pub fn names() -> Vec<&'static str> {
    vec![
        "A1", "A2", "A3", "A4", "A5", "W1_5", "W1_7", "rigid_A4", "Lab0_A4", "Lab1_A4", "T1_p3",
        "T2_p3", "T3_p3", "H3_p3",
    ]
}

/// A registry entry: some fixtures are bare algebras or bare Lie algebras.
pub enum Entry {
    Algebra(AlgebraPresentation),
    Lie(LiePresentation),
    Bundle(RlrAlgebra),
}

/// Look up a fixture by name. `Lab1_A4` takes its parameters from the
/// `(lambda1, lambda2)` arguments; every other entry ignores them.
pub fn lookup(name: &str, lambda1: u32, lambda2: u32) -> Option<Entry> {
    match name {
        "A1" => Some(Entry::Algebra(algebra_a(1))),
        "A2" => Some(Entry::Algebra(algebra_a(2))),
        "A3" => Some(Entry::Algebra(algebra_a(3))),
        "A4" => Some(Entry::Algebra(algebra_a(4))),
        "A5" => Some(Entry::Algebra(algebra_a(5))),
        "W1_5" => Some(Entry::Lie(witt(5))),
        "W1_7" => Some(Entry::Lie(witt(7))),
        "rigid_A4" => Some(Entry::Bundle(rigid_a4())),
        "Lab0_A4" => Some(Entry::Bundle(lab0_a4())),
        "Lab1_A4" => Some(Entry::Bundle(lab1_a4(lambda1, lambda2))),
        "T1_p3" => Some(Entry::Bundle(toy_t1_p3())),
        "T2_p3" => Some(Entry::Bundle(toy_t2_p3())),
        "T3_p3" => Some(Entry::Bundle(toy_t3_p3())),
        "H3_p3" => Some(Entry::Bundle(heisenberg_p3())),
        _ => None,
    }
}

/// The char-2 bundles on which the cohomology fixtures live.
pub fn char2_bundles() -> Vec<RlrAlgebra> {
    vec![rigid_a4(), lab0_a4(), lab1_a4(1, 0)]
}
