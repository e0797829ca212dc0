mod common;

use common::{q, rand_rat, rat_map, rng, subst_map};
use num_rational::BigRational;
use num_traits::Zero;
use pinchlab::diagram::{load_fixture, parse_diagram, Diagram};
use pinchlab::exactalg::{parse_alg, parse_poly, Alg, Poly, RatFunc, Symbol};
use pinchlab::landau::{
    bordered_gram_det, bordered_gram_det_based, five_pinch_block_det, five_pinch_det, five_pinch_expansion,
    five_pinch_params, landau_from_pinch, normalized_landau, one_loop_gram_det, quotient, LandauError,
};
use pinchlab::pinch::{propagator_at, solve_pinch};

fn a(text: &str) -> Alg {
    parse_alg(text).unwrap()
}

fn two_loop_pair() -> (Diagram, Poly) {
    let d = load_fixture("two_loop_propagator.json").unwrap();
    let sol = solve_pinch(&d, &[0, 1]).unwrap();
    let l = landau_from_pinch(&sol).unwrap().as_poly().unwrap();
    (d, l)
}

#[test]
fn two_loop_pair_locus() {
    let (_, l) = two_loop_pair();
    assert!(l.degree_in(&Symbol::new("s")) <= 2);
    let mut r = rng(7);
    let mut pairs = vec![(q(1, 1), q(2, 1)), (q(3, 1), q(5, 1))];
    for _ in 0..10 {
        pairs.push((rand_rat(&mut r, -40, 40, 7), rand_rat(&mut r, -40, 40, 3)));
    }
    for (m1, m2) in pairs {
        for sign in [1, -1] {
            let root = &m1 + &(&m2 * &BigRational::from_integer(sign.into()));
            let s = -(&root * &root);
            let v = l
                .eval_rational(&rat_map(&[("s", s), ("m1sq", &m1 * &m1), ("m2sq", &m2 * &m2)]))
                .unwrap();
            assert!(v.is_zero());
        }
    }
    // away from the threshold it does not vanish
    let v = l.eval_rational(&rat_map(&[("s", q(1, 1)), ("m1sq", q(1, 1)), ("m2sq", q(4, 1))])).unwrap();
    assert!(!v.is_zero());
}

#[test]
fn two_loop_pair_matches_kallen_form() {
    let (_, l) = two_loop_pair();
    // (s + m1^2 - m2^2)^2 + ... written independently: lambda(-s, m1^2, m2^2)
    let kallen = parse_poly("s^2 + m1sq^2 + m2sq^2 + 2*s*m1sq + 2*s*m2sq - 2*m1sq*m2sq").unwrap();
    assert_eq!(l, kallen);
}

#[test]
fn crossed_vertex_two_pinch_matches_closed_form() {
    let d = load_fixture("two_loop_crossed_vertex.json").unwrap();
    let sol = solve_pinch(&d, &[0, 1]).unwrap();
    let alpha = sol.alpha(0)[0][0].clone();
    let one = Alg::one();
    let p1 = a("s11");
    let ap = &alpha + &one;
    // (alpha+1)(alpha^2 p1^2 + m1^2) - alpha((alpha+1)^2 p1^2 + m2^2)
    let closed = &(&ap * &(&(&(&alpha * &alpha) * &p1) + &a("m1sq")))
        - &(&alpha * &(&(&(&ap * &ap) * &p1) + &a("m2sq")));
    let l = landau_from_pinch(&sol).unwrap();
    let qt = quotient(&closed, &l.poly).unwrap();
    assert!(qt.is_rational() && !qt.is_zero());
    assert!(qt.as_ratfunc().unwrap().vars().iter().all(|v| v.name() == "s11"));
}

#[test]
fn massless_bubble_collapses_to_s() {
    let text = r#"{"name":"b0","loops":1,"dimension":"d","externals":["p"],"gram":{"p.p":"s"},
        "masses_sq":{"z":0},"propagators":[
        {"routing":[1],"shift":{},"mass_sq":"z"},
        {"routing":[1],"shift":{"p":"1"},"mass_sq":"z"}]}"#;
    let d = parse_diagram(text).unwrap();
    let l = landau_from_pinch(&solve_pinch(&d, &[0, 1]).unwrap()).unwrap();
    assert_eq!(l.as_poly().unwrap(), parse_poly("s").unwrap());
}

#[test]
fn bubble_mass_symmetry() {
    let d = load_fixture("bubble.json").unwrap();
    let l = landau_from_pinch(&solve_pinch(&d, &[0, 1]).unwrap()).unwrap().as_poly().unwrap();
    let swapped = l.subst_many(
        &[("m0sq", Poly::symbol("m1sq")), ("m1sq", Poly::symbol("m0sq"))]
            .into_iter()
            .map(|(k, v)| (Symbol::new(k), v))
            .collect(),
    );
    assert_eq!(l, swapped);
}

#[test]
fn bordered_bubble() {
    let d = load_fixture("bubble.json").unwrap();
    let b = bordered_gram_det(&d, &[0, 1]).unwrap();
    // 2x2 determinant [[s, -(s+m1-m0)/2], [-(s+m1-m0)/2, -m0]] expanded by hand
    let oracle = parse_poly("-s*m0sq - (s + m1sq - m0sq)^2/4").unwrap();
    assert_eq!(b, oracle);
    let l = landau_from_pinch(&solve_pinch(&d, &[0, 1]).unwrap()).unwrap();
    let qt = quotient(&Alg::from_poly(b.clone()), &l.poly).unwrap();
    assert!(qt.as_ratfunc().unwrap().as_constant().is_some());
    // equal masses: threshold at s = -4 m0^2
    for m in [q(1, 1), q(3, 2), q(-7, 5)] {
        let m2 = &m * &m;
        let s = -(&m2 * &q(4, 1));
        let v = b.eval_rational(&rat_map(&[("s", s), ("m0sq", m2.clone()), ("m1sq", m2)])).unwrap();
        assert!(v.is_zero());
    }
}

#[test]
fn bordered_base_independence() {
    let d = load_fixture("one_loop_vertex_k.json").unwrap();
    for subset in [vec![0, 1, 2], vec![0, 1, 2, 3]] {
        let b0 = bordered_gram_det_based(&d, &subset, subset[0]).unwrap();
        for &base in &subset[1..] {
            assert_eq!(bordered_gram_det_based(&d, &subset, base).unwrap(), b0);
        }
    }
}

#[test]
fn bordered_equals_gram_times_condition() {
    let d = load_fixture("one_loop_vertex_k.json").unwrap();
    for subset in [vec![0, 1], vec![0, 1, 2], vec![0, 1, 2, 3]] {
        let sol = solve_pinch(&d, &subset).unwrap();
        let cond = sol.condition(0).unwrap().as_ratfunc().unwrap();
        let g = one_loop_gram_det(&d, &subset).unwrap();
        let b = RatFunc::from_poly(bordered_gram_det(&d, &subset).unwrap());
        assert_eq!(b, -&(&g * &cond));
    }
}

#[test]
fn bordered_rejects_two_loop_subsets() {
    let d = load_fixture("two_loop_propagator.json").unwrap();
    assert!(matches!(bordered_gram_det(&d, &[0, 2]), Err(LandauError::NotOneLoopSubset(_))));
}

#[test]
fn degenerate_gram_bordered_value() {
    let text = r#"{"name":"deg","loops":1,"dimension":"d","externals":["p1","p2"],
        "gram":{"p1.p1":"s","p1.p2":"2*s","p2.p2":"4*s"},
        "masses_sq":{"m0":"m0","m1":"m1","m2":"m2"},"propagators":[
        {"routing":[1],"shift":{},"mass_sq":"m0"},
        {"routing":[1],"shift":{"p1":"1"},"mass_sq":"m1"},
        {"routing":[1],"shift":{"p2":"1"},"mass_sq":"m2"}]}"#;
    let d = parse_diagram(text).unwrap();
    assert!(one_loop_gram_det(&d, &[0, 1, 2]).unwrap().is_zero());
    let b = bordered_gram_det(&d, &[0, 1, 2]).unwrap();
    let b1 = "-(s + m1 - m0)/2";
    let b2 = "-(4*s + m2 - m0)/2";
    let expect = parse_poly(&format!("-s*(2*({}) - ({}))^2", b1, b2)).unwrap();
    assert_eq!(b, expect);
    let sol = solve_pinch(&d, &[0, 1, 2]).unwrap();
    assert!(matches!(landau_from_pinch(&sol), Err(LandauError::NotFinite(_))));
}

#[test]
fn normalized_two_loop_pair_is_reduced_determinant() {
    let d = load_fixture("two_loop_propagator.json").unwrap();
    let sol = solve_pinch(&d, &[0, 1]).unwrap();
    let n = normalized_landau(&d, &sol).unwrap();
    assert_eq!(n.len(), 1);
    let alpha = sol.alpha(0)[0][0].clone();
    let rs = Alg::sqrt_poly(&Poly::symbol("s"));
    let s = a("s");
    let ap = &alpha + &Alg::one();
    // -2 alpha sqrt(s) ((alpha+1)^2 s + m2) + 2 (alpha+1) sqrt(s) (alpha^2 s + m1)
    let l0 = &(&(&(&alpha * &rs) * &Alg::from_int(-2)) * &(&(&(&ap * &ap) * &s) + &a("m2sq")))
        + &(&(&(&ap * &rs) * &Alg::from_int(2)) * &(&(&(&alpha * &alpha) * &s) + &a("m1sq")));
    assert_eq!(n[0].poly, l0);
    assert!(n[0].notes[0].starts_with("quotient"));
}

#[test]
fn normalized_bubble_equal_masses() {
    let d = load_fixture("bubble.json").unwrap();
    let sol = solve_pinch(&d, &[0, 1]).unwrap();
    let n = normalized_landau(&d, &sol).unwrap().remove(0).poly;
    for m in [q(1, 1), q(2, 3)] {
        let m2 = &m * &m;
        let s = -(&m2 * &q(4, 1));
        let x = n.subst_many(&subst_map(&[("s", s), ("m0sq", m2.clone()), ("m1sq", m2)])).unwrap();
        assert!(x.is_zero());
    }
}

#[test]
fn normalized_single_propagator() {
    let d = load_fixture("bubble.json").unwrap();
    let sol = solve_pinch(&d, &[1]).unwrap();
    let n = normalized_landau(&d, &sol).unwrap().remove(0);
    assert_eq!(n.poly, a("m1sq"));
}

#[test]
fn locus_agreement_one_loop() {
    let d = load_fixture("one_loop_vertex_k.json").unwrap();
    let mut r = rng(11);
    for subset in [vec![0, 1], vec![0, 1, 2], vec![0, 2, 3]] {
        let sol = solve_pinch(&d, &subset).unwrap();
        let l = landau_from_pinch(&sol).unwrap().poly;
        let b = Alg::from_poly(bordered_gram_det(&d, &subset).unwrap());
        let n = normalized_landau(&d, &sol).unwrap().remove(0).poly;
        let qb = quotient(&b, &l).unwrap();
        let qn = quotient(&n, &l).unwrap();
        for _ in 0..20 {
            let names = ["s11", "s12", "s13", "s22", "s23", "s33", "m0sq", "m1sq", "m2sq", "m3sq"];
            let vals: Vec<(&str, BigRational)> = names.iter().map(|n| (*n, rand_rat(&mut r, -30, 30, 4))).collect();
            let m = subst_map(&vals);
            // quotients stay finite and nonzero at generic points
            for qq in [&qb, &qn] {
                match qq.subst_many(&m) {
                    Some(x) => assert!(!x.is_zero()),
                    None => continue,
                }
            }
        }
    }
}

/// Crossed-vertex diagram with a chosen rational pinch point: masses of the
/// four loop-local propagators are set to minus the squared momenta there.
fn rational_five_pinch(r: &mut rand_chacha::ChaCha8Rng) -> (Diagram, [BigRational; 4]) {
    let base = load_fixture("two_loop_crossed_vertex.json").unwrap();
    loop {
        let s11 = rand_rat(r, -20, 20, 3);
        let s12 = rand_rat(r, -20, 20, 5);
        let s22 = rand_rat(r, -20, 20, 2);
        if (&s12 * &s12 - &s11 * &s22).is_zero() {
            continue;
        }
        let [a1, b1, a2, b2] = [rand_rat(r, -9, 9, 4), rand_rat(r, -9, 9, 3), rand_rat(r, -9, 9, 2), rand_rat(r, -9, 9, 5)];
        let sq = |x: &BigRational, y: &BigRational| x * x * &s11 + x * y * &s12 * q(2, 1) + y * y * &s22;
        let one = q(1, 1);
        let vals = [
            ("s11", s11.clone()),
            ("s12", s12.clone()),
            ("s22", s22.clone()),
            ("m1sq", -sq(&a1, &b1)),
            ("m2sq", -sq(&(&a1 + &one), &b1)),
            ("m3sq", -sq(&a2, &b2)),
            ("m4sq", -sq(&a2, &(&b2 + &one))),
            ("m5sq", rand_rat(r, -20, 20, 7)),
            ("m6sq", rand_rat(r, -20, 20, 7)),
        ];
        let d = base.substitute(&subst_map(&vals)).unwrap();
        return (d, [a1, b1, a2, b2]);
    }
}

#[test]
fn five_pinch_identity_on_rational_instances() {
    let mut r = rng(5);
    let mut done = 0;
    while done < 10 {
        let (d, chosen) = rational_five_pinch(&mut r);
        let sol = match solve_pinch(&d, &[0, 1, 2, 3, 4]) {
            Ok(s) if s.is_finite() => s,
            _ => continue,
        };
        let mut found = false;
        for b in 0..sol.branches.len() {
            let p = match five_pinch_params(&d, &sol, b) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let col: Vec<Alg> = (0..5).map(|_| Alg::from_rational(rand_rat(&mut r, -50, 50, 9))).collect();
            let lhs = five_pinch_block_det(&d, &sol, b, &col).unwrap();
            assert_eq!(lhs, five_pinch_expansion(&p, &col));
            // pinch relations
            let alpha = sol.alpha(b);
            let q1 = &alpha[0];
            let q2 = &alpha[1];
            for e in 0..2 {
                let p1e = Alg::from_int(if e == 0 { 1 } else { 0 });
                let p2e = Alg::from_int(if e == 1 { 1 } else { 0 });
                assert_eq!(q2[e], &(&p.sigma1 * &p1e) + &(&p.rho1 * &q1[e]));
                assert_eq!(&(&q1[e] + &p1e) - &p2e, &(&p.sigma2 * &p2e) + &(&p.rho2 * &q2[e]));
            }
            let here: Vec<BigRational> = [&p.alpha1, &p.beta1, &p.alpha2, &p.beta2]
                .iter()
                .map(|x| x.as_ratfunc().unwrap().as_constant().unwrap())
                .collect();
            found |= here == chosen;
        }
        assert!(found, "the chosen pinch point is among the branches");
        done += 1;
    }
}

#[test]
fn five_pinch_det_is_landau_condition() {
    let mut r = rng(9);
    let (d, _) = rational_five_pinch(&mut r);
    let sol = solve_pinch(&d, &[0, 1, 2, 3, 4]).unwrap();
    let dets = five_pinch_det(&d, &sol).unwrap();
    for (b, l) in dets.iter().enumerate() {
        let p = five_pinch_params(&d, &sol, b).unwrap();
        let a5 = propagator_at(&d, 4, sol.alpha(b)).unwrap();
        assert_eq!(l.poly, &(&(&p.beta1 * &p.alpha2) * &p.delta2) * &a5);
    }
}

#[test]
fn five_pinch_shape_mismatch() {
    let d = load_fixture("two_loop_propagator.json").unwrap();
    let sol = solve_pinch(&d, &[0, 1]).unwrap();
    assert!(matches!(five_pinch_det(&d, &sol), Err(LandauError::ShapeMismatch(_))));
}

#[test]
fn qed_symbolic_identity() {
    let d = load_fixture("qed_crossed_vertex.json").unwrap();
    let sol = solve_pinch(&d, &[0, 1, 2, 3, 4]).unwrap();
    let col: Vec<Alg> = (1..=5).map(|i| a(&format!("x{}", i))).collect();
    for b in 0..sol.branches.len() {
        let p = five_pinch_params(&d, &sol, b).unwrap();
        assert_eq!(five_pinch_block_det(&d, &sol, b, &col).unwrap(), five_pinch_expansion(&p, &col));
    }
}

#[test]
fn qed_branches_match_closed_condition() {
    let d = load_fixture("qed_crossed_vertex.json").unwrap();
    let sol = solve_pinch(&d, &[0, 1, 2, 3, 4]).unwrap();
    let dets = five_pinch_det(&d, &sol).unwrap();
    let (s11, s12, s22, ml) = (a("s11"), a("s12"), a("s22"), a("mlsq"));
    let g = Alg::sqrt_poly(&parse_poly("s12^2 - s11*s22").unwrap());
    let dot = |x: &[Alg; 2], y: &[Alg; 2]| {
        &(&(&x[0] * &y[0]) * &s11) + &(&(&(&x[0] * &y[1]) + &(&x[1] * &y[0])) * &s12) + &(&(&x[1] * &y[1]) * &s22)
    };
    let two = Alg::from_int(2);
    let mut matched = vec![false; dets.len()];
    for sg1 in [1i64, -1] {
        for sg2 in [1i64, -1] {
            let s1 = &(&(-&s12) + &(&g * &Alg::from_int(sg1))) * &s22.inv().unwrap();
            let s2 = &(&(-&s12) + &(&g * &Alg::from_int(sg2))) * &s22.inv().unwrap();
            let a1 = -&(&(&s11 + &ml) * &(&two * &(&s11 + &(&s1 * &s12))).inv().unwrap());
            let a2 = -&(&(&s22 + &ml) * &(&two * &(&s12 + &(&s2 * &s22))).inv().unwrap());
            let k = [&(&a1 + &a2) + &Alg::one(), &(&a1 * &s1) + &(&a2 * &s2)];
            let target = &dot(&k, &k) + &ml;
            // locate the branch with the same s1, s2
            let mut hit = None;
            for b in 0..sol.branches.len() {
                let al = sol.alpha(b);
                let t1 = &al[0][1] * &al[0][0].inv().unwrap();
                let t2 = &al[1][1] * &al[1][0].inv().unwrap();
                if t1 == s1 && t2 == s2 {
                    hit = Some(b);
                }
            }
            let b = hit.expect("branch for the sign pair");
            matched[b] = true;
            let p = five_pinch_params(&d, &sol, b).unwrap();
            let qt = quotient(&dets[b].poly, &target).unwrap();
            assert!(!qt.is_zero());
            assert_eq!(qt, &(&p.beta1 * &p.alpha2) * &p.delta2);
        }
    }
    assert!(matched.iter().all(|m| *m));
}

#[test]
fn serializes_expression_string() {
    let (_, _) = two_loop_pair();
    let d = load_fixture("bubble.json").unwrap();
    let l = landau_from_pinch(&solve_pinch(&d, &[0, 1]).unwrap()).unwrap();
    let v: serde_json::Value = serde_json::to_value(&l).unwrap();
    let back = parse_alg(v["poly"].as_str().unwrap()).unwrap();
    assert_eq!(back, l.poly);
    assert_eq!(v["subset"], serde_json::json!([0, 1]));
}

#[test]
fn qed_branch_free_landau_polynomial() {
    let d = load_fixture("qed_crossed_vertex.json").unwrap();
    let l = landau_from_pinch(&solve_pinch(&d, &[0, 1, 2, 3, 4]).unwrap()).unwrap();
    let want = Alg::from_poly(parse_poly("mlsq^2*(mlsq + s22)^4").unwrap());
    let qt = quotient(&l.poly, &want).unwrap();
    assert!(qt.as_ratfunc().and_then(|r| r.as_constant()).is_some_and(|c| !c.is_zero()), "{}", l.poly);
}
