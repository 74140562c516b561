//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the report is always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pfa_reduce::amplify::{
    amplify_f, amplify_nc, expanding, expanding_automaton, expanding_word, f_input_builder,
    go_closed_rejects, go_conditional_rejects, go_input_builder, AmplifyInput, RoundOdds,
};
use pfa_reduce::binaut::{b_matrix, BinWord};
use pfa_reduce::cl2cm::{
    accept_lower_bound, aggregate_accept_prob, coin_bruteforce, coin_equality_pfa, coin_oracle,
    correctness_test_probs, encode_configs, equality_by_coins, equality_by_coins_closed, fake_reject_bound,
    limit_accept_prob, machines as cm, rounds_needed, CheckerParams, CmConfig, EqualityChecker,
};
use pfa_reduce::exact::{int, pow2, powu, rat, RatMatrix, RatVector, Rational};
use pfa_reduce::golden::printed_matrix_checks;
use pfa_reduce::intmat::{
    chain_value, claus9_pipeline, claus_a, claus_f1, encode_middle, extend_final, hirvensalo_a,
    hirvensalo_eta1, hirvensalo_pi1, hirvensalo_stages, turakainen, ClausOptions, TernWord,
};
use pfa_reduce::pcp::{antizero, BinPcp, PcpSolution, Variant};
use pfa_reduce::pcp2pfa::{
    code_binary, encode_word, equality_pfa_11, equality_pfa_13, equality_score, rmpcp_compile, strict15,
    GadgetParams,
};
use pfa_reduce::pfa::{all_probabilities, bounded_search, words_up_to, Mode, Pfa, Want};
use pfa_reduce::tm2mpcp::{
    machines as tm, pair_count_formula, rule_pairs, starting_distribution, tm_to_mpcp, MpcpOptions,
};

type Check = Result<(), String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_bits(rng: &mut ChaCha8Rng, max: usize) -> BinWord {
    let n = rng.gen_range(0..=max);
    BinWord::new((0..n).map(|_| rng.gen_bool(0.5)).collect())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let d = rng.gen_range(1..=1000i64);
    rat(rng.gen_range(0..=d), d)
}

fn random_tern(rng: &mut ChaCha8Rng, max: usize) -> TernWord {
    let n = rng.gen_range(0..=max);
    TernWord::new((0..n).map(|_| rng.gen_range(1..=2u8)).collect()).unwrap()
}

fn ac1() -> Check {
    let b = b_matrix(&"00110".parse().unwrap());
    let want = RatMatrix::new(vec![vec![rat(26, 32), rat(6, 32)], vec![rat(25, 32), rat(7, 32)]]).unwrap();
    ensure(b == want, || format!("B(00110) = {b:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let (u, v) = (random_bits(&mut rng, 12), random_bits(&mut rng, 12));
        let lhs = b_matrix(&u).mul(&b_matrix(&v)).unwrap();
        ensure(lhs == b_matrix(&v.concat(&u)), || {
            format!("law fails for {u:?}, {v:?}")
        })?;
    }
    Ok(())
}

fn ac2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (h, q) = (rat(1, 2), rat(1, 4));
    for _ in 0..200 {
        let (x, y) = (random_rational(&mut rng), random_rational(&mut rng));
        let mix = &h * &x * &y + &q * (Rational::one() - &x * &x) + &q * (Rational::one() - &y * &y);
        let d = &x - &y;
        ensure(mix == equality_score(&x, &y) && mix == &h - &q * &d * &d, || {
            format!("trick fails at {x}, {y}")
        })?;
    }
    let coins = coin_equality_pfa();
    for i in 0..=10 {
        for j in 0..=10 {
            let x = equality_by_coins(i, j);
            ensure(x == equality_by_coins_closed(i, j), || {
                format!("coins closed form ({i},{j})")
            })?;
            let p = coins.accept_prob(&EqualityChecker::word(i, j)).unwrap();
            ensure(p == x, || format!("coin automaton ({i},{j}): {p} vs {x}"))?;
        }
    }
    Ok(())
}

fn ac3() -> Check {
    let inst = antizero(&BinPcp::classic());
    let p13 = equality_pfa_13(&inst).map_err(|e| e.to_string())?;
    let p11 = equality_pfa_11(&inst).map_err(|e| e.to_string())?;
    let p15 = strict15(&inst, &GadgetParams::separating(&inst)).map_err(|e| e.to_string())?;
    ensure(p13.dim() == 13 && p11.dim() == 11 && p15.dim() == 15, || {
        "state counts".into()
    })?;
    let sol_word = vec![0usize, 2, 1, 2];
    let (mut hits13, mut hits15) = (0, 0);
    for (w, x13) in all_probabilities(&p13, 6) {
        // Automaton words read pairs in product order, PCP solutions the reverse.
        let rev: Vec<usize> = w.iter().rev().copied().collect();
        let is_sol = !w.is_empty() && inst.check_solution(&PcpSolution(rev)).unwrap();
        ensure(is_sol == (w == sol_word), || format!("unexpected solution {w:?}"))?;
        ensure((x13 == rat(1, 2)) == is_sol && x13 <= rat(1, 2), || {
            format!("13-state on {w:?}: {x13}")
        })?;
        let x11 = p11.accept_prob_idx(&w).unwrap();
        ensure(x11 == x13, || format!("11 vs 13 on {w:?}"))?;
        let x15 = p15.accept_prob_idx(&w).unwrap();
        ensure((x15 > rat(1, 4)) == is_sol && x15 != rat(1, 4), || {
            format!("15-state on {w:?}: {x15}")
        })?;
        hits13 += is_sol as usize;
        hits15 += (x15 > rat(1, 4)) as usize;
    }
    ensure(hits13 == 1 && hits15 == 1, || format!("hits {hits13} {hits15}"))
}

fn ac4() -> Check {
    for (name, shown, made) in printed_matrix_checks() {
        ensure(shown == made, || format!("{name} differs"))?;
    }
    Ok(())
}

fn ac5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let mut v1 = random_bits(&mut rng, 5).bits().to_vec();
        let mut w1 = random_bits(&mut rng, 5).bits().to_vec();
        v1.push(true);
        w1.push(true);
        let (v1, w1) = (BinWord::new(v1), BinWord::new(w1));
        let inst = BinPcp::new(
            Variant::Rmpcp,
            vec![(v1.bits().to_vec(), w1.bits().to_vec()), (vec![true], vec![true])],
        )
        .map_err(|e| e.to_string())?;
        let params = GadgetParams::unit_rmpcp(&inst);
        let pfa = rmpcp_compile(&inst, &params).map_err(|e| e.to_string())?;
        let pi = starting_distribution(&v1, &w1, &params.gamma1);
        ensure(pi.sum() == Rational::one(), || "table does not sum to 1".into())?;
        ensure(pfa.pi() == &pi, || {
            format!("compiled start row differs for {v1:?}, {w1:?}")
        })?;
        let (x, y) = (v1.fraction(), w1.fraction());
        let (nx, ny) = (Rational::one() - &x, Rational::one() - &y);
        let (q, e, g) = (rat(1, 4), rat(1, 8), &params.gamma1);
        let closed = vec![
            &q * &nx * &ny,
            &q * &nx * &y,
            &q * &x * &ny,
            &q * &x * &y,
            &e * &nx * &nx,
            &q * &nx * &x,
            &e * &x * &x,
            &e * &ny * &ny,
            &q * &ny * &y,
            &e * &y * &y,
            &e * g,
            rat(1, 2) - &e * g,
        ];
        ensure(pi.entries() == &closed[..], || "closed forms differ".into())?;
    }
    Ok(())
}

fn ac6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let (v, w) = (random_tern(&mut rng, 6), random_tern(&mut rng, 6));
        let d = Rational::from_integer(v.value() - w.value());
        let c = RatVector::unit(6, 0)
            .mul_mat(&claus_a(&v, &w))
            .unwrap()
            .dot(&claus_f1())
            .unwrap();
        ensure(c == Rational::one() - &d * &d, || {
            format!("Claus check {v:?} {w:?}")
        })?;
        let h = chain_value(&hirvensalo_pi1(), &[&hirvensalo_a(&v, &w)], &hirvensalo_eta1()).unwrap();
        ensure(h == Rational::one() - int(2) * &d * &d, || {
            format!("reversed check {v:?} {w:?}")
        })?;
    }
    let inst = BinPcp::classic();
    let bs: Vec<RatMatrix> = inst
        .pairs
        .iter()
        .map(|(v, w)| claus_a(&TernWord::from_bits(v), &TernWord::from_bits(w)))
        .collect();
    let ds = extend_final(&bs, &claus_f1()).map_err(|e| e.to_string())?;
    let t = turakainen(&ds).map_err(|e| e.to_string())?;
    let d = t.dim();
    let inv_d = Rational::one() / int(d as i64);
    for word in words_up_to(3, 5).into_iter().filter(|w| !w.is_empty()) {
        let fs: Vec<&RatMatrix> = word.iter().map(|&i| &t.f[i]).collect();
        let es: Vec<&RatMatrix> = word.iter().map(|&i| &t.e[i]).collect();
        let fv = RatMatrix::chain(&fs).unwrap().get(0, 6) - &inv_d;
        let ev = RatMatrix::chain(&es).unwrap().get(0, 6).clone();
        ensure(fv == powu(&t.alpha, word.len() as u64) * ev, || {
            format!("chain identity on {word:?}")
        })?;
    }
    let p = claus9_pipeline(&inst, ClausOptions::default()).map_err(|e| e.to_string())?;
    ensure(p.pfa.dim() == 9 && *p.pfa.cutpoint() == rat(1, 9), || {
        "nine states, cutpoint 1/9".into()
    })?;
    let rep = bounded_search(&p.pfa, 4, &Want::from_pfa(&p.pfa));
    let wit = rep.witness.ok_or("no witness")?;
    ensure(wit.word == ["3", "2", "3", "1"], || {
        format!("witness {:?}", wit.word)
    })
}

fn toy_two_mpcp() -> BinPcp {
    BinPcp::from_strs(
        Variant::TwoMpcp,
        &[
            ("0", "01"),
            ("00", "0"),
            ("1", "0"),
            ("0", "1"),
            ("11", "1"),
            ("01", "10"),
        ],
    )
}

fn ac7() -> Check {
    let st = hirvensalo_stages(&toy_two_mpcp()).map_err(|e| e.to_string())?;
    for word in words_up_to(4, 4) {
        let coded = encode_middle(&word, 4);
        let want = st.value(&word).unwrap();
        ensure(st.coded_value(&coded).unwrap() == want, || {
            format!("coded {word:?}")
        })?;
        // Four symbols: b, ab, aab, aaa. Only a and aa are partial codewords.
        for extra in 1..=2 {
            let mut dangling = coded.clone();
            dangling.extend(std::iter::repeat_n('a', extra));
            ensure(st.coded_value(&dangling).unwrap() == want, || {
                format!("dangling {word:?} + a^{extra}")
            })?;
        }
    }
    Ok(())
}

fn ac8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let d = 3;
    let stochastic = |rng: &mut ChaCha8Rng| {
        let rows = (0..d)
            .map(|_| {
                let ws: Vec<i64> = (0..d).map(|_| rng.gen_range(0..5)).collect();
                let s: i64 = ws.iter().sum::<i64>().max(1);
                let mut row: Vec<Rational> = ws.iter().map(|&x| rat(x, s)).collect();
                if ws.iter().all(|&x| x == 0) {
                    row[0] = Rational::one();
                }
                row
            })
            .collect();
        RatMatrix::new(rows).unwrap()
    };
    let ms: Vec<RatMatrix> = (0..5).map(|_| stochastic(&mut rng)).collect();
    let p = Pfa::new(
        (1..=5).map(|i| i.to_string()).collect(),
        ms,
        RatVector::new(vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap(),
        RatVector::new(vec![Rational::one(), rat(1, 2), Rational::zero()]).unwrap(),
        rat(1, 2),
        Mode::Strict,
    )
    .map_err(|e| e.to_string())?;
    let c = code_binary(&p).map_err(|e| e.to_string())?;
    for u in words_up_to(5, 4) {
        ensure(
            c.accept_prob(&encode_word(&u, 5)).unwrap() == p.accept_prob_idx(&u).unwrap(),
            || format!("τ({u:?})"),
        )?;
    }
    for len in 0..=8usize {
        for mask in 0u32..(1 << len) {
            let w: Vec<String> = (0..len)
                .map(|i| if mask >> i & 1 == 1 { "b" } else { "a" }.to_string())
                .collect();
            let trailing_a = w.iter().rev().take_while(|s| *s == "a").count() % 4;
            if trailing_a != 0 {
                let x = c.accept_prob(&w).unwrap();
                ensure(x.is_zero(), || format!("non-image {w:?} scores {x}"))?;
            }
        }
    }
    Ok(())
}

fn ac9() -> Check {
    let ec = EqualityChecker::new(CheckerParams::default()).map_err(|e| e.to_string())?;
    for ((i, j), probs) in ec.outcome_table(14) {
        ensure(probs == coin_oracle(i, j, 12), || {
            format!("checker vs oracle at ({i},{j})")
        })?;
        if i + j <= 4 {
            ensure(probs == coin_bruteforce(i, j, 12), || {
                format!("checker vs brute force at ({i},{j})")
            })?;
        }
    }
    for g in [4u32, 8, 12] {
        let params = CheckerParams { g, k: 10 };
        let ec = EqualityChecker::new(params).map_err(|e| e.to_string())?;
        for ((i, j), p) in ec.outcome_table(14) {
            if i == j {
                ensure(p.same == p.different, || format!("G={g}: unbalanced at i=j={i}"))?;
            } else {
                ensure(p.different >= params.advantage() * &p.same, || {
                    format!("G={g}: ratio at ({i},{j})")
                })?;
            }
        }
    }
    let params = CheckerParams::default();
    let m = cm::up_down();
    let run = m.accepting_run(10).ok_or("2-step machine does not halt")?;
    ensure(run.len() == 3, || "not a 2-step run".into())?;
    let fair = correctness_test_probs(&m, &encode_configs(&run), params).map_err(|e| e.to_string())?;
    ensure(fair.correct == fair.incorrect && !fair.correct.is_zero(), || {
        "valid run is not fair".into()
    })?;
    let lim = limit_accept_prob(&fair, params.k);
    ensure(Rational::one() - &lim == pow2(-(params.k as i64)), || {
        "limit rejection is not 1/2^K".into()
    })?;
    for t in [1u64, 10, 100] {
        ensure(aggregate_accept_prob(&fair, t, params.k) <= lim, || {
            format!("t={t} exceeds limit")
        })?;
    }
    let slack = rat(1, 1000);
    let t = rounds_needed(&fair, &slack).ok_or("no round count")?;
    let lb = accept_lower_bound(&fair, &t, params.k);
    ensure(
        lb >= Rational::one() - pow2(-(params.k as i64)) - &slack && lb > rat(99, 100),
        || format!("bound {lb} at t={t}"),
    )?;
    ensure(t > BigInt::from(1000), || "round count suspiciously small".into())?;
    let fake = encode_configs(&[
        CmConfig::new("q0", 0, 0),
        CmConfig::new("q1", 13, 0),
        CmConfig::new("h", 0, 0),
    ]);
    let f = correctness_test_probs(&m, &fake, params).map_err(|e| e.to_string())?;
    ensure(f.incorrect >= params.advantage() * &f.correct, || {
        "fake run ratio".into()
    })?;
    let bound = fake_reject_bound(params);
    ensure(bound > rat(99, 100), || "(1-1/(2^11+1))^10 below 0.99".into())?;
    ensure(Rational::one() - limit_accept_prob(&f, params.k) >= bound, || {
        "fake limit".into()
    })?;
    for t in [1u64, 10, 100] {
        let rej = Rational::one() - aggregate_accept_prob(&f, t, params.k);
        ensure(rej >= bound, || format!("fake rejection at t={t}"))?;
    }
    Ok(())
}

fn ac10() -> Check {
    let shape = tm::fifteen_state_shape();
    let opts = MpcpOptions::default();
    ensure(
        (shape.left_rules(), shape.right_rules() + shape.halt_rules()) == (14, 16),
        || "shape".into(),
    )?;
    let m = tm_to_mpcp(&shape, &[], opts).map_err(|e| e.to_string())?;
    ensure(rule_pairs(&m.machine, opts).len() == 53, || {
        "53 rule pairs".into()
    })?;
    ensure(
        m.instance.k() == 54 && pair_count_formula(&shape, opts) == 54,
        || "53 + start pair".into(),
    )?;
    let halting = tm_to_mpcp(&tm::write_and_halt(), &[], opts).map_err(|e| e.to_string())?;
    ensure(
        halting.instance.k() == pair_count_formula(&tm::write_and_halt(), opts),
        || "toy count".into(),
    )?;
    let sol = halting
        .instance
        .brute_solve(30)
        .ok_or("no solution for the halting machine")?;
    let configs = halting.decode(&sol).map_err(|e| e.to_string())?;
    ensure(halting.verify_trace(&configs) == Ok(1), || {
        format!("trace {configs:?}")
    })?;
    let looping = tm_to_mpcp(&tm::run_right_forever(), &[], opts).map_err(|e| e.to_string())?;
    ensure(looping.instance.brute_solve(12).is_none(), || {
        "looping machine has a solution".into()
    })
}

fn ac11() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let x = random_rational(&mut rng);
        let e = expanding_automaton(&x).map_err(|e| e.to_string())?;
        for n in 0..=6 {
            let dist = e
                .distribution(&e.indices(&expanding_word(n, 1)).unwrap())
                .unwrap();
            let odds = RoundOdds::coin(&x, n);
            ensure(
                dist[expanding::TOP] == odds.accept && dist[expanding::BOT] == odds.reject,
                || format!("round odds x={x} n={n}"),
            )?;
        }
    }
    let always = Pfa::new(
        vec!["a".into()],
        vec![RatMatrix::identity(1)],
        RatVector::unit(1, 0),
        RatVector::unit(1, 0),
        rat(1, 2),
        Mode::Strict,
    )
    .unwrap();
    let b = amplify_f(&always).map_err(|e| e.to_string())?;
    ensure(b.dim() == 2 * 2 + 3, || format!("F has {} states", b.dim()))?;
    let (n, t) = f_input_builder(&Rational::one(), &rat(1, 100)).map_err(|e| e.to_string())?;
    let w = AmplifyInput::new(vec!["a".into()], n, t).unwrap().word();
    let acc = b.accept_prob(&w).unwrap();
    ensure(acc >= rat(99, 100), || {
        format!("always-accept base reaches only {acc}")
    })?;
    let half = Pfa::new(
        vec!["a".into(), "b".into()],
        vec![
            RatMatrix::new(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]]).unwrap(),
            RatMatrix::from_ints(&[&[1, 0], &[1, 0]]),
        ],
        RatVector::unit(2, 0),
        RatVector::unit(2, 1),
        rat(1, 2),
        Mode::Strict,
    )
    .unwrap();
    for amp in [amplify_f(&half), amplify_nc(&half)] {
        let amp = amp.map_err(|e| e.to_string())?;
        let rep = bounded_search(&amp, 8, &Want::Above(rat(1, 2)));
        ensure(rep.witness.is_none() && rep.complete, || {
            format!("sup above 1/2: {:?}", rep.witness)
        })?;
    }
    for (x, eps) in [(rat(3, 4), rat(1, 4)), (rat(5, 8), rat(1, 8))] {
        let plan = go_input_builder(&x, &eps).map_err(|e| e.to_string())?;
        let (rp, rm) = go_conditional_rejects(&x, plan.n, plan.t).map_err(|e| e.to_string())?;
        ensure(
            (rp.clone(), rm.clone()) == go_closed_rejects(&x, plan.n, plan.t),
            || "GO closed forms".into(),
        )?;
        ensure(rp <= eps && rm <= eps, || {
            format!("GO plan n={} t={} not sound for x={x}", plan.n, plan.t)
        })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("binary automaton value and law", Duration::from_secs(5), ac1),
        (
            "equality trick and equality by coins",
            Duration::from_secs(1),
            ac2,
        ),
        (
            "PCP end to end: 13, 11 and 15 states",
            Duration::from_secs(60),
            ac3,
        ),
        ("printed matrices regenerated", Duration::from_secs(1), ac4),
        ("starting distribution table", Duration::from_secs(1), ac5),
        (
            "integer route and stochastic conversion",
            Duration::from_secs(60),
            ac6,
        ),
        ("two-matrix block reduction", Duration::from_secs(60), ac7),
        ("binary coding lemma", Duration::from_secs(30), ac8),
        (
            "equality checker and dichotomy bounds",
            Duration::from_secs(120),
            ac9,
        ),
        ("Turing machine to MPCP", Duration::from_secs(60), ac10),
        ("amplification", Duration::from_secs(60), ac11),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let res = run();
        let took = start.elapsed();
        let res = res.and_then(|_| ensure(took <= limit, || format!("took {took:.2?}, limit {limit:?}")));
        match res {
            Ok(()) => println!("AC{:<2} PASS  {name} ({took:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("AC{:<2} FAIL  {name} ({took:.2?}): {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 11 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 11 criteria fail");
        ExitCode::FAILURE
    }
}
