use std::collections::BTreeMap;

use num_complex::Complex64;
use pinchlab::diagram::{load_fixture, parse_diagram};
use pinchlab::exactalg::{parse_alg, parse_ratfunc, Alg, Poly, Symbol};
use pinchlab::pinch::{
    enumerate_subsets, eval_pinch, propagator_at, real_kinematics, solve_pinch, Classification, PinchError,
};

#[test]
fn subsets_bubble_and_two_loop() {
    let b = load_fixture("bubble.json").unwrap();
    assert_eq!(enumerate_subsets(&b, 2).unwrap(), vec![vec![0, 1]]);
    let d = load_fixture("two_loop_propagator.json").unwrap();
    let pairs = enumerate_subsets(&d, 2).unwrap();
    assert_eq!(pairs.len(), 10);
    assert_eq!(pairs[0], vec![0, 1]);
    let c = load_fixture("two_loop_crossed_vertex.json").unwrap();
    assert!(enumerate_subsets(&c, 5).unwrap().contains(&vec![0, 1, 2, 3, 4]));
    assert!(enumerate_subsets(&c, 1).is_err());
}

#[test]
fn duplicate_propagators_collapse() {
    let text = r#"{"name":"dup","loops":1,"dimension":"d","externals":["p"],"gram":{"p.p":"s"},
        "masses_sq":{"m":"m"},"propagators":[
        {"routing":[1],"shift":{},"mass_sq":"m"},
        {"routing":[-1],"shift":{},"mass_sq":"m"},
        {"routing":[1],"shift":{"p":"1"},"mass_sq":"m"}]}"#;
    let d = parse_diagram(text).unwrap();
    assert_eq!(enumerate_subsets(&d, 2).unwrap(), vec![vec![0, 2], vec![1, 2]]);
}

#[test]
fn two_loop_pair_alpha() {
    let d = load_fixture("two_loop_propagator.json").unwrap();
    let sol = solve_pinch(&d, &[0, 1]).unwrap();
    assert_eq!(sol.classification, Classification::Finite);
    assert_eq!(sol.parallel_rank, 1);
    assert_eq!(sol.involved_loops, vec![0]);
    let alpha = &sol.branches[0].alpha[0][0];
    assert_eq!(alpha, &parse_alg("-(s+m2sq-m1sq)/(2*s)").unwrap());
    // symmetric masses force the midpoint
    let sym = d.to_json().replace("\"mass_sq\": \"m2sq\"", "\"mass_sq\": \"m1sq\"");
    let ds = parse_diagram(&sym).unwrap();
    let sol = solve_pinch(&ds, &[0, 1]).unwrap();
    assert_eq!(sol.branches[0].alpha[0][0], parse_alg("-1/2").unwrap());
}

#[test]
fn differences_vanish_on_one_loop_pinches() {
    let d = load_fixture("one_loop_vertex_k.json").unwrap();
    for subset in [vec![0, 1], vec![0, 1, 2], vec![0, 1, 2, 3], vec![1, 3]] {
        let sol = solve_pinch(&d, &subset).unwrap();
        assert_eq!(sol.classification, Classification::Finite, "{:?}", subset);
        assert_eq!(sol.parallel_rank, subset.len() - 1);
        let alpha = &sol.branches[0].alpha;
        let d0 = propagator_at(&d, subset[0], alpha).unwrap();
        for &i in &subset[1..] {
            let di = propagator_at(&d, i, alpha).unwrap();
            assert!((&di - &d0).is_zero(), "subset {:?} propagator {}", subset, i);
        }
        assert_eq!(sol.branches[0].conditions[0], d0);
    }
}

#[test]
fn two_loop_strata() {
    let d = load_fixture("two_loop_propagator.json").unwrap();
    assert_eq!(solve_pinch(&d, &[0, 1, 3, 4]).unwrap().classification, Classification::NonIsolatedCandidate);
    assert_eq!(solve_pinch(&d, &[1, 2]).unwrap().classification, Classification::NonIsolated);
}

#[test]
fn degenerate_gram_is_at_infinity() {
    let text = r#"{"name":"deg","loops":1,"dimension":"d","externals":["p1","p2"],
        "gram":{"p1.p1":"s","p1.p2":"2*s","p2.p2":"4*s"},
        "masses_sq":{"m0":"m0","m1":"m1","m2":"m2"},"propagators":[
        {"routing":[1],"shift":{},"mass_sq":"m0"},
        {"routing":[1],"shift":{"p1":"1"},"mass_sq":"m1"},
        {"routing":[1],"shift":{"p2":"1"},"mass_sq":"m2"}]}"#;
    let d = parse_diagram(text).unwrap();
    let sol = solve_pinch(&d, &[0, 1, 2]).unwrap();
    assert_eq!(sol.classification, Classification::AtInfinity);
    assert_eq!(solve_pinch(&d, &[0, 1]).unwrap().classification, Classification::Finite);
}

#[test]
fn numeric_alpha_and_pole() {
    let d = load_fixture("two_loop_propagator.json").unwrap();
    let sol = solve_pinch(&d, &[0, 1]).unwrap();
    let kin = real_kinematics(&[("s", 1.0), ("m1sq", 1.0), ("m2sq", 4.0)]);
    let nb = eval_pinch(&sol, &kin).unwrap();
    assert!((nb[0].alpha[0][0] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
    let kin0 = real_kinematics(&[("s", 0.0), ("m1sq", 1.0), ("m2sq", 4.0)]);
    assert!(matches!(eval_pinch(&sol, &kin0), Err(PinchError::PoleAtPoint(_))));
}

#[test]
fn homogeneity_of_alpha() {
    let d = load_fixture("one_loop_vertex_k.json").unwrap();
    let sol = solve_pinch(&d, &[0, 1, 2]).unwrap();
    let lam2 = Poly::symbol("lam").pow(2);
    let mut map = BTreeMap::new();
    for v in ["s11", "s12", "s13", "s22", "s23", "s33", "m0sq", "m1sq", "m2sq", "m3sq"] {
        map.insert(Symbol::new(v), &lam2 * &Poly::symbol(v));
    }
    for x in &sol.branches[0].alpha[0] {
        assert_eq!(&x.subst_many(&map).unwrap(), x);
    }
}

fn qed() -> pinchlab::diagram::Diagram {
    load_fixture("qed_crossed_vertex.json").unwrap()
}

#[test]
fn qed_five_pinch_branches() {
    let d = qed();
    let sol = solve_pinch(&d, &[0, 1, 2, 3, 4]).unwrap();
    assert_eq!(sol.classification, Classification::Finite);
    assert_eq!(sol.parallel_rank, 4);
    assert_eq!(sol.branches.len(), 4);
    let gram = parse_alg("s12^2 - s11*s22").unwrap();
    for b in &sol.branches {
        for row in &b.alpha {
            for x in row {
                for r in x.radicands() {
                    let ratio = &Alg::from_poly(r.clone()) / &gram;
                    assert!(ratio.as_ratfunc().and_then(|q| q.as_constant()).is_some(), "radicand {}", r);
                }
            }
        }
    }
    // s = beta/alpha = (-p1.p2 +- sqrt(G))/p2^2 at p1^2 = p2^2 = 1, p1.p2 = 2
    let kin = real_kinematics(&[("s11", 1.0), ("s22", 1.0), ("s12", 2.0), ("mlsq", 0.7)]);
    let nb = eval_pinch(&sol, &kin).unwrap();
    let r3 = 3f64.sqrt();
    for b in &nb {
        for a in 0..2 {
            let s = b.alpha[a][1] / b.alpha[a][0];
            let ok = (s - Complex64::new(-2.0 + r3, 0.0)).norm() < 1e-10 || (s - Complex64::new(-2.0 - r3, 0.0)).norm() < 1e-10;
            assert!(ok, "s = {}", s);
        }
    }
    let s_first: Vec<f64> = nb.iter().map(|b| (b.alpha[0][1] / b.alpha[0][0]).re).collect();
    assert!((s_first[0] - s_first[2]).abs() > 1.0 || (s_first[0] - s_first[1]).abs() > 1.0);
}

#[test]
fn qed_branch_conjugacy() {
    let d = qed();
    let sol = solve_pinch(&d, &[0, 1, 2, 3, 4]).unwrap();
    // branches ordered by sign mask: (+,+), (-,+), (+,-), (-,-)
    for a in 0..2 {
        let (p, m) = if a == 0 { (0, 1) } else { (0, 2) };
        for e in 0..2 {
            let x = &sol.branches[p].alpha[a][e];
            let y = &sol.branches[m].alpha[a][e];
            assert!((x + y).is_rational());
            assert!((x * y).is_rational());
        }
    }
}

#[test]
fn massive_five_pinch_is_finite() {
    let d = load_fixture("two_loop_crossed_vertex.json").unwrap();
    let sol = solve_pinch(&d, &[0, 1, 2, 3, 4]).unwrap();
    assert_eq!(sol.classification, Classification::Finite);
    assert_eq!(sol.parallel_rank, 4);
    assert_eq!(sol.branches.len(), 4);
    let _ = parse_ratfunc("1").unwrap();
}

#[test]
fn finite_multi_loop_pinch_is_on_shell() {
    // every subset propagator vanishes at Q except the condition carriers
    let d = qed();
    let sol = solve_pinch(&d, &[0, 1, 2, 3, 4]).unwrap();
    assert!(!sol.condition_props.is_empty());
    for (b, br) in sol.branches.iter().enumerate() {
        for &i in &sol.subset {
            let v = propagator_at(&d, i, sol.alpha(b)).unwrap();
            match sol.condition_props.iter().position(|&c| c == i) {
                Some(k) => assert_eq!(v, br.conditions[k]),
                None => assert!(v.is_zero(), "branch {} propagator {}: {}", b, i, v),
            }
        }
    }
}
