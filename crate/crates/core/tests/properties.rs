use nonsig_core::attacks::{adjust_marginal, attack_eps, restore_hiding, AttackPath};
use nonsig_core::coupling::{glue, maximal_coupling};
use nonsig_core::lp::{certify_binding, solve, LpProblem, LpSolution};
use nonsig_core::nonsig::{
    check_family, check_ns_partition, check_ns_two_round, check_ns_two_round_ratio, two_round_families, ConstraintId,
    Family,
};
use nonsig_core::rational::{int, ratio};
use nonsig_core::schemes::{
    make_intro_scheme, make_three_prover_scheme, make_tight_scheme, make_two_sided_scheme, simple_scheme, tight_subset,
    CommitmentScheme, Provers, X, XP,
};
use nonsig_core::table::random_table;
use nonsig_core::{Alphabet, CondTable, Event, Rational};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn alphabets(rng: &mut ChaCha8Rng, names: &[&str], max: usize) -> Vec<Alphabet> {
    names
        .iter()
        .map(|n| Alphabet::range(n, rng.random_range(1..=max)))
        .collect()
}

fn l1_half(p: &[Rational], q: &[Rational]) -> Rational {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<Rational>() / int(2)
}

/// Classical two-prover table: shared `r`, then deterministic local answers
/// `(x, y)` from `(a, r)` and `(x', y')` from `(a', r)`.
fn local_honest(rng: &mut ChaCha8Rng, outs: &[Alphabet], qs: &[Alphabet]) -> CondTable {
    let nr = rng.random_range(1..=3);
    let w: Vec<i64> = (0..nr).map(|_| rng.random_range(1..=4)).collect();
    let total: i64 = w.iter().sum();
    let sizes: Vec<usize> = outs.iter().map(Alphabet::len).collect();
    let left: Vec<Vec<(usize, usize)>> = (0..nr)
        .map(|_| {
            (0..qs[0].len())
                .map(|_| (rng.random_range(0..sizes[0]), rng.random_range(0..sizes[2])))
                .collect()
        })
        .collect();
    let right: Vec<Vec<(usize, usize)>> = (0..nr)
        .map(|_| {
            (0..qs[1].len())
                .map(|_| (rng.random_range(0..sizes[1]), rng.random_range(0..sizes[3])))
                .collect()
        })
        .collect();
    CondTable::from_fn(outs.to_vec(), qs.to_vec(), |o, i| {
        (0..nr)
            .filter(|&r| left[r][i[0]] == (o[0], o[2]) && right[r][i[1]] == (o[1], o[3]))
            .map(|r| ratio(w[r], total))
            .sum()
    })
    .unwrap()
}

/// Random two-prover scheme with small alphabets and classical honest tables.
fn random_scheme(seed: u64) -> CommitmentScheme {
    let mut rng = rng(seed);
    let qs = vec![
        Alphabet::range("a", rng.random_range(1..=2)),
        Alphabet::range("a'", rng.random_range(1..=2)),
    ];
    let outs = vec![
        Alphabet::range("x", rng.random_range(1..=3)),
        Alphabet::range("x'", rng.random_range(1..=2)),
        Alphabet::range("y", rng.random_range(1..=2)),
        Alphabet::range("y'", rng.random_range(1..=2)),
    ];
    let questions = random_table(qs.clone(), vec![], &mut rng).unwrap();
    let h0 = local_honest(&mut rng, &outs, &qs);
    let h1 = local_honest(&mut rng, &outs, &qs);
    let (s0, s1) = (h0.clone(), h1.clone());
    let mut coin = rng.clone();
    CommitmentScheme::with_predicate(Provers::Two, questions, h0, h1, move |o, i| {
        let honest = if i[2] == 0 { &s0 } else { &s1 };
        // accept the honest support, plus some noise
        let support = !honest.at(o, &i[..2]).is_zero();
        support ^ (coin.random_range(0..8) == 0)
    })
    .unwrap()
}

fn random_simple_scheme(seed: u64) -> (CommitmentScheme, Vec<Rational>, [Vec<Rational>; 2], Vec<bool>) {
    let mut rng = rng(seed);
    let (na, nx, ny) = (
        rng.random_range(1..=3),
        rng.random_range(1..=3),
        rng.random_range(1..=3),
    );
    let probs = random_table(vec![Alphabet::range("a", na)], vec![], &mut rng)
        .unwrap()
        .entries()
        .to_vec();
    // x from (a, r), y from r alone: Q never sees the question
    let honest = [0, 1].map(|_| {
        let nr = rng.random_range(1..=3);
        let w: Vec<i64> = (0..nr).map(|_| rng.random_range(1..=4)).collect();
        let total: i64 = w.iter().sum();
        let f: Vec<Vec<usize>> = (0..nr)
            .map(|_| (0..na).map(|_| rng.random_range(0..nx)).collect())
            .collect();
        let g: Vec<usize> = (0..nr).map(|_| rng.random_range(0..ny)).collect();
        let mut v = vec![Rational::zero(); na * nx * ny];
        for r in 0..nr {
            for a in 0..na {
                v[a * nx * ny + f[r][a] * ny + g[r]] += ratio(w[r], total);
            }
        }
        v
    });
    let accept: Vec<bool> = (0..nx * ny * na * 2).map(|_| rng.random_range(0..3) > 0).collect();
    let acc = accept.clone();
    let s = simple_scheme(
        Alphabet::range("a", na),
        probs.clone(),
        Alphabet::range("x", nx),
        Alphabet::range("y", ny),
        honest.clone(),
        move |x, y, a, b| acc[((x * ny + y) * na + a) * 2 + b],
    )
    .unwrap();
    (s, probs, honest, accept)
}

fn random_ns_two_round(seed: u64) -> CondTable {
    let mut rng = rng(seed);
    let bits = |ns: &[&str]| ns.iter().map(|n| Alphabet::bits(n)).collect::<Vec<_>>();
    let objective = (0..256).map(|_| int(rng.random_range(-5..=5))).collect();
    let p = LpProblem::ns_polytope(
        bits(&["x", "x'", "y", "y'"]),
        bits(&["a", "a'", "b", "b'"]),
        &two_round_families(),
        objective,
    )
    .unwrap();
    match solve(&p).unwrap() {
        LpSolution::Optimal { argmax, .. } => argmax,
        other => panic!("{other:?}"),
    }
}

fn mix(p: &CondTable, q: &CondTable, w: &Rational) -> CondTable {
    let entries = p
        .entries()
        .iter()
        .zip(q.entries())
        .map(|(a, b)| a * w + b * (Rational::one() - w))
        .collect();
    CondTable::new(p.outputs().to_vec(), p.inputs().to_vec(), entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inclusion_exclusion(seed in any::<u64>(), mask_l in any::<u64>(), mask_g in any::<u64>()) {
        let mut rng = rng(seed);
        let outs = alphabets(&mut rng, &["x", "y"], 5);
        let ins = alphabets(&mut rng, &["a"], 3);
        let t = random_table(outs, ins, &mut rng).unwrap();
        let r = t.out_radix().clone();
        let l = Event::from_predicate(&t, |tu| mask_l >> (r.encode(tu) % 64) & 1 == 1);
        let g = Event::from_predicate(&t, |tu| mask_g >> (r.encode(tu) % 64) & 1 == 1);
        for i in 0..t.input_len() {
            let p = |e: &Event| t.event_prob(e, i).unwrap();
            let both = p(&l.intersection(&g));
            prop_assert_eq!(p(&l) + p(&g), p(&l.union(&g)) + &both);
            prop_assert!(p(&l) + p(&g) <= Rational::one() + &both);
        }
    }

    #[test]
    fn stat_distance_is_a_metric(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let outs = alphabets(&mut rng, &["x", "y"], 5);
        let ins = alphabets(&mut rng, &["a"], 3);
        let [p, q, r] = [0, 1, 2].map(|_| random_table(outs.clone(), ins.clone(), &mut rng).unwrap());
        for i in 0..p.input_len() {
            let d = |a: &CondTable, b: &CondTable| a.stat_distance(b, i).unwrap();
            prop_assert_eq!(d(&p, &q), d(&q, &p));
            prop_assert!(d(&p, &p).is_zero());
            prop_assert_eq!(d(&p, &q).is_zero(), p.row(i) == q.row(i));
            prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r));
            prop_assert_eq!(d(&p, &q), l1_half(p.row(i), q.row(i)));
        }
    }

    #[test]
    fn marginals_compose(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let t = random_table(alphabets(&mut rng, &["x", "y", "z"], 4), alphabets(&mut rng, &["a"], 3), &mut rng).unwrap();
        prop_assert_eq!(t.marginal(&["x", "z"]).unwrap().marginal(&["z"]).unwrap(), t.marginal(&["z"]).unwrap());
        prop_assert_eq!(t.marginal(&["y", "x"]).unwrap().marginal(&["x"]).unwrap(), t.marginal(&["x"]).unwrap());
    }

    #[test]
    fn conditioning_a_product_recovers_the_other_factor(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let ins = alphabets(&mut rng, &["a"], 3);
        let p = random_table(alphabets(&mut rng, &["x"], 4), ins.clone(), &mut rng).unwrap();
        let q = random_table(alphabets(&mut rng, &["y", "z"], 3), ins, &mut rng).unwrap();
        let pq = p.product(&q).unwrap();
        for s in p.outputs()[0].symbols() {
            let c = pq.condition(&[("x", s.as_str())]).unwrap();
            for i in 0..q.input_len() {
                match c.row(i) {
                    Some(row) => prop_assert_eq!(row, q.row(i)),
                    None => prop_assert!(p.at(&[p.outputs()[0].index_of(s).unwrap()], &[i]).is_zero()),
                }
            }
        }
    }

    #[test]
    fn coupling_is_maximal(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.random_range(1..=6);
        let ins = alphabets(&mut rng, &["a"], 3);
        let p = random_table(vec![Alphabet::range("x0", n)], ins.clone(), &mut rng).unwrap();
        let q = random_table(vec![Alphabet::range("x1", n)], ins, &mut rng).unwrap();
        let c = maximal_coupling(&p, &q).unwrap();
        prop_assert!(c.verify().is_ok());
        for i in 0..p.input_len() {
            prop_assert_eq!(c.disagreement(i), l1_half(p.row(i), q.row(i)));
        }
    }

    #[test]
    fn gluing_commutes_with_marginals(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.random_range(1..=6);
        let ins = alphabets(&mut rng, &["a"], 2);
        let mut side = |t: &str| {
            let outs = vec![
                Alphabet::range(&format!("x{t}"), n),
                Alphabet::range(&format!("y{t}"), rng.random_range(1..=3)),
                Alphabet::range(&format!("v{t}"), rng.random_range(1..=3)),
            ];
            random_table(outs, ins.clone(), &mut rng).unwrap()
        };
        let (l, r) = (side("0"), side("1"));
        let big = glue(&l, &r, &[("x0", "x1")]).unwrap();
        let small = glue(&l.marginal(&["x0", "y0"]).unwrap(), &r.marginal(&["x1", "y1"]).unwrap(), &[("x0", "x1")]).unwrap();
        prop_assert_eq!(big.marginal(&["x0", "x1", "y0", "y1"]).unwrap(), small);
        prop_assert_eq!(big.marginal(&["x0", "y0", "v0"]).unwrap(), l);
        prop_assert_eq!(big.marginal(&["x1", "y1", "v1"]).unwrap(), r);
    }

    #[test]
    fn tight_subsets_are_balanced(n in 1usize..=12, m_off in 0usize..12) {
        let m = 1 + m_off % n;
        for a in 0..n {
            let s = tight_subset(n, m, a);
            prop_assert_eq!(s.len(), m);
        }
        for y in 0..n {
            prop_assert_eq!((0..n).filter(|&a| tight_subset(n, m, a).contains(&y)).count(), m);
        }
    }

    #[test]
    fn simple_schemes_keep_their_metrics(seed in any::<u64>()) {
        let (s, probs, honest, accept) = random_simple_scheme(seed);
        prop_assert!(s.is_simple());
        let na = probs.len();
        let cells = honest[0].len() / na;
        let ny = s.honest(0).outputs()[3].len();
        let nx = cells / ny;
        // metrics straight from the raw simple-scheme description
        for b in 0..2 {
            let mut acc = Rational::zero();
            for a in 0..na {
                for x in 0..nx {
                    for y in 0..ny {
                        if accept[((x * ny + y) * na + a) * 2 + b] {
                            acc += &probs[a] * &honest[b][a * cells + x * ny + y];
                        }
                    }
                }
            }
            prop_assert_eq!(s.honest_accept_prob(b), acc);
        }
        let mut hiding = Rational::zero();
        for a in 0..na {
            let commit = |b: usize| (0..nx).map(|x| (0..ny).map(|y| honest[b][a * cells + x * ny + y].clone()).sum()).collect::<Vec<Rational>>();
            hiding = hiding.max(l1_half(&commit(0), &commit(1)));
        }
        prop_assert_eq!(s.hiding_distance(), hiding);
    }

    #[test]
    fn constructed_schemes_have_ns_honest_tables(n in 1usize..=3, m_off in 0usize..6) {
        let nn = n + 1;
        let m = 1 + m_off % nn;
        let schemes = [
            make_intro_scheme(n).unwrap(),
            make_three_prover_scheme(n).unwrap(),
            make_tight_scheme(nn, m).unwrap(),
            make_two_sided_scheme(nn, m).unwrap(),
        ];
        for s in &schemes {
            for b in 0..2 {
                prop_assert!(s.honest_ns_report(b).passed);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn linearized_and_ratio_checkers_agree(seed in any::<u64>(), w in 0i64..=8) {
        let mut rng = rng(seed);
        let ns = random_ns_two_round(seed);
        let bits = |ns: &[&str]| ns.iter().map(|n| Alphabet::bits(n)).collect::<Vec<_>>();
        let noise = random_table(bits(&["x", "x'", "y", "y'"]), bits(&["a", "a'", "b", "b'"]), &mut rng).unwrap();
        // w = 8 stays on the polytope, smaller weights move off it
        let t = mix(&ns, &noise, &ratio(w, 8));
        let linear = check_ns_two_round(&t).unwrap().passed;
        prop_assert_eq!(linear, check_ns_two_round_ratio(&t).unwrap().passed);
        if w == 8 {
            prop_assert!(linear);
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn first_round_marginals_are_well_defined(seed in any::<u64>()) {
        let t = random_ns_two_round(seed);
        let x_free = Family { id: ConstraintId::C1, outputs: vec![0], free: vec![1, 2, 3] };
        let xp_free = Family { id: ConstraintId::C1Prime, outputs: vec![1], free: vec![0, 2, 3] };
        prop_assert!(check_family(&t, &x_free).is_none());
        prop_assert!(check_family(&t, &xp_free).is_none());
    }

    #[test]
    fn attacks_meet_their_guarantees(seed in any::<u64>()) {
        let s = random_scheme(seed);
        let eps = s.hiding_distance();
        let (q, path) = attack_eps(&s).unwrap();
        prop_assert!(q.check().unwrap().passed);
        let (v0, v1) = s.binding_value(&q).unwrap();
        prop_assert_eq!(&v0, &s.honest_accept_prob(0));
        prop_assert!(v1 >= s.honest_accept_prob(1) - &eps * int(path.loss_factor()));
        if path == AttackPath::Perfect {
            prop_assert_eq!(v1, s.honest_accept_prob(1));
        }
        let cert = certify_binding(&s).unwrap();
        prop_assert!(cert.optimum >= v0 + s.binding_value(&q).unwrap().1);
    }

    #[test]
    fn simple_attacks_lose_at_most_the_hiding_distance(seed in any::<u64>()) {
        let (s, ..) = random_simple_scheme(seed);
        let (q, path) = attack_eps(&s).unwrap();
        prop_assert_eq!(path, AttackPath::Simple);
        prop_assert!(q.check().unwrap().passed);
        let (v0, v1) = s.binding_value(&q).unwrap();
        prop_assert_eq!(v0, s.honest_accept_prob(0));
        prop_assert!(v1 >= s.honest_accept_prob(1) - s.hiding_distance());
    }

    #[test]
    fn marginal_adjustment_and_restoration(seed in any::<u64>()) {
        let s = random_scheme(seed);
        let eps = s.hiding_distance();
        let adj = adjust_marginal(&s).unwrap();
        prop_assert!(check_ns_partition(&adj, &[0, 2], &[0], &[1, 3], &[1]).passed);
        for name in [X, XP] {
            prop_assert_eq!(adj.marginal(&[name]).unwrap(), s.honest(0).marginal(&[name]).unwrap());
        }
        for i in 0..adj.input_len() {
            prop_assert!(l1_half(adj.row(i), s.honest(1).row(i)) <= &eps * int(2));
        }
        let matched = s.with_honest1(adj).unwrap();
        let eps_m = matched.hiding_distance();
        let restored = restore_hiding(&matched).unwrap();
        prop_assert_eq!(restored.table.marginal(&[X, XP]).unwrap(), s.honest(0).marginal(&[X, XP]).unwrap());
        for i in 0..restored.table.input_len() {
            prop_assert!(l1_half(restored.table.row(i), matched.honest(1).row(i)) <= eps_m);
        }
    }

    #[test]
    fn solver_self_check(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let outs = vec![Alphabet::range("x", rng.random_range(1..=3)), Alphabet::range("x'", rng.random_range(1..=3))];
        let ins = vec![Alphabet::range("a", rng.random_range(1..=3)), Alphabet::range("a'", rng.random_range(1..=3))];
        let n = outs.iter().chain(&ins).map(Alphabet::len).product::<usize>();
        let objective = (0..n).map(|_| ratio(rng.random_range(-9..=9), rng.random_range(1..=4))).collect();
        let p = LpProblem::ns_polytope(outs, ins, &nonsig_core::nonsig::bipartite_families(), objective).unwrap();
        let LpSolution::Optimal { optimum, argmax } = solve(&p).unwrap() else {
            return Err(TestCaseError::fail("NS polytope LP not optimal"));
        };
        prop_assert!(p.is_feasible(argmax.entries()));
        prop_assert_eq!(p.objective_at(argmax.entries()), optimum);
    }

    #[test]
    fn tables_and_schemes_round_trip_through_json(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let t = random_table(alphabets(&mut rng, &["x", "y"], 4), alphabets(&mut rng, &["a"], 3), &mut rng).unwrap();
        prop_assert_eq!(CondTable::from_json(&t.to_json()).unwrap(), t);
        let s = random_scheme(seed);
        prop_assert_eq!(CommitmentScheme::from_json(&s.to_json()).unwrap(), s);
    }
}
