//! `pfa`: compile, search and verify the reductions from the command line.
//! Every command reads JSON files and writes one JSON document.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use pfa_reduce::amplify::{
    amplify_f, amplify_nc, f_input_builder, go_automaton, go_closed_rejects, go_conditional_rejects,
    go_input_builder,
};
use pfa_reduce::binaut::{b_matrix, BinWord};
use pfa_reduce::cl2cm::{
    accept_lower_bound, correctness_test_probs, encode_configs, equality_by_coins, equality_by_coins_closed,
    fake_reject_bound, limit_accept_prob, rounds_needed, CheckerParams, EqualityChecker, PaddedChecker,
    TwoCounterMachine,
};
use pfa_reduce::exact::{format_rational, parse_rational, rat, RatMatrix, RatVector, Rational};
use pfa_reduce::golden::printed_matrix_checks;
use pfa_reduce::intmat::{
    claus9_pipeline, claus_a, claus_f1, extend_final, hirvensalo_a, hirvensalo_pipeline, turakainen,
    ClausOptions, TernWord,
};
use pfa_reduce::pcp::BinPcp;
use pfa_reduce::pcp2pfa::{
    code_binary, eleven_state_rmpcp, eliminate_output_vector, equality_pfa_11, equality_pfa_13,
    equality_score, f_hat, f_hat_11, m_infinity, nine_state_pfa, rmpcp_compile, strict13, strict15,
    GadgetParams,
};
use pfa_reduce::pfa::{bounded_search, Mode, Pfa, Want};
use pfa_reduce::tm2mpcp::{
    efficient_code, pair_count_formula, tm_to_mpcp, FixedPipeline, MpcpOptions, Target, TuringMachine,
};

#[derive(Parser)]
#[command(name = "pfa", version, about = "Exact PFA reductions")]
struct Cli {
    /// Write the result here instead of stdout; a manifest goes next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an automaton or instance.
    #[command(subcommand)]
    Compile(Compile),
    /// Breadth-first search for a word clearing the cutpoint.
    Search(SearchArgs),
    /// Exact checks of laws, printed matrices and identities.
    Verify(VerifyArgs),
    /// Brute-force a PCP instance.
    SolvePcp(SolveArgs),
    /// Binary code of a Turing machine, optionally with a fixed-matrix automaton.
    EncodeTm(EncodeTmArgs),
}

#[derive(Subcommand)]
enum Compile {
    Pcp2pfa {
        #[arg(long, value_enum)]
        construction: Construction,
        #[arg(long = "in")]
        input: PathBuf,
        /// Use the textbook gadget parameters instead of the separating ones.
        #[arg(long)]
        unit: bool,
    },
    Tm2mpcp {
        #[arg(long)]
        machine: PathBuf,
        /// Input tape, symbols separated by spaces.
        #[arg(long, default_value = "")]
        tape: String,
        #[arg(long)]
        uniqueness: bool,
    },
    Int2pfa {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "claus9")]
        route: Route,
    },
    Cl2cmChecker {
        #[arg(long, default_value_t = 12)]
        g: u32,
        #[arg(long, default_value_t = 10)]
        k: u32,
        /// Four-letter variant with entries in {0, 1/2, 1}.
        #[arg(long)]
        padded: bool,
        /// Also score the encoded run of this machine.
        #[arg(long)]
        machine: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    AmplifyF(AmpArgs),
    AmplifyNc(AmpArgs),
    AmplifyGo {
        #[arg(long, value_parser = parse_rat)]
        x: Rational,
        #[arg(long, value_parser = parse_rat)]
        eps: Rational,
    },
}

#[derive(Args)]
struct AmpArgs {
    /// Base automaton to amplify.
    #[arg(long)]
    pfa: Option<PathBuf>,
    /// Acceptance of the base on the repeated word, for the round plan.
    #[arg(long, value_parser = parse_rat)]
    x: Option<Rational>,
    #[arg(long, value_parser = parse_rat)]
    eps: Option<Rational>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Construction {
    Eq13,
    Eq11,
    Strict15,
    Strict13,
    Rmpcp12,
    Nine9,
    Out18,
    Minf11,
    Bin2,
}

impl Construction {
    fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Route {
    Claus9,
    Claus9Weak,
    Hirvensalo20,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchMode {
    /// The automaton's own cutpoint and mode.
    Own,
    Strict,
    Weak,
    Exact,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    pfa: PathBuf,
    #[arg(long, default_value_t = 6)]
    max_len: usize,
    #[arg(long, value_enum, default_value = "own")]
    mode: SearchMode,
    /// Threshold for strict/weak/exact; defaults to the automaton's cutpoint.
    #[arg(long, value_parser = parse_rat)]
    cutpoint: Option<Rational>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyWhat {
    Laws,
    PaperMatrices,
    Identities,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    what: VerifyWhat,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    cases: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 10)]
    max_len: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    P12,
    T9,
    T11pi,
    T11,
    T18,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Target {
        match t {
            TargetArg::P12 => Target::P12,
            TargetArg::T9 => Target::T9,
            TargetArg::T11pi => Target::T11Pi,
            TargetArg::T11 => Target::T11,
            TargetArg::T18 => Target::T18,
        }
    }
}

#[derive(Args)]
struct EncodeTmArgs {
    #[arg(long)]
    machine: PathBuf,
    /// Reserve 00000 and refuse 111 so every matrix is positive.
    #[arg(long)]
    positivity: bool,
    #[arg(long, value_enum)]
    target: Option<TargetArg>,
    #[arg(long, default_value = "")]
    tape: String,
}

fn parse_rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn r(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn tape(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

fn pfa_summary(p: &Pfa) -> Value {
    json!({
        "states": p.dim(),
        "symbols": p.alphabet().len(),
        "cutpoint": r(p.cutpoint()),
        "mode": p.mode(),
    })
}

/// Result document plus the manifest fields describing how it was made.
struct Output {
    result: Value,
    manifest: Value,
}

fn run(cmd: Cmd) -> Result<Output> {
    match cmd {
        Cmd::Compile(c) => compile(c),
        Cmd::Search(a) => search(a),
        Cmd::Verify(a) => verify(a),
        Cmd::SolvePcp(a) => {
            let inst: BinPcp = read_json(&a.input)?;
            let sol = inst.brute_solve(a.max_len);
            let result = match &sol {
                Some(s) => {
                    let (top, _) = inst.concatenations(s);
                    json!({
                        "solution": s.one_based(),
                        "word": top.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>(),
                    })
                }
                None => json!({ "solution": null }),
            };
            Ok(Output {
                result,
                manifest: json!({ "command": "solve-pcp", "max_len": a.max_len, "variant": inst.variant }),
            })
        }
        Cmd::EncodeTm(a) => {
            let tm: TuringMachine = read_json(&a.machine)?;
            let code = efficient_code(&tm, a.positivity).context("tm2mpcp::efficient_code")?;
            let mut result = json!({ "code": code });
            if let Some(t) = a.target {
                let fp = FixedPipeline::build(&tm, &code, t.into(), MpcpOptions::default())
                    .context("tm2mpcp::fixed_matrix_pipeline")?;
                let pfa = fp
                    .pfa_for(&tape(&a.tape))
                    .context("tm2mpcp::fixed_matrix_pipeline")?;
                result["denominator_exponent"] = json!(fp.denominator_exponent());
                result["pfa"] = serde_json::to_value(&pfa)?;
            }
            Ok(Output {
                result,
                manifest: json!({ "command": "encode-tm", "positivity": a.positivity, "tape": a.tape }),
            })
        }
    }
}

fn compile(c: Compile) -> Result<Output> {
    match c {
        Compile::Pcp2pfa {
            construction,
            input,
            unit,
        } => {
            let inst: BinPcp = read_json(&input)?;
            let params = |rm: bool| match (rm, unit) {
                (false, true) => GadgetParams::unit(&inst),
                (false, false) => GadgetParams::separating(&inst),
                (true, true) => GadgetParams::unit_rmpcp(&inst),
                (true, false) => GadgetParams::separating_rmpcp(&inst),
            };
            let p = match construction {
                Construction::Eq13 => equality_pfa_13(&inst),
                Construction::Eq11 => equality_pfa_11(&inst),
                Construction::Strict15 => strict15(&inst, &params(false)),
                Construction::Strict13 => strict13(&inst, &params(false)),
                Construction::Rmpcp12 => rmpcp_compile(&inst, &params(true)),
                Construction::Nine9 => nine_state_pfa(&inst),
                Construction::Out18 => nine_state_pfa(&inst).and_then(|p| eliminate_output_vector(&p)),
                Construction::Minf11 => eleven_state_rmpcp(&inst),
                Construction::Bin2 => equality_pfa_13(&inst).and_then(|p| code_binary(&p)),
            }
            .with_context(|| format!("pcp2pfa::{}", construction.name()))?;
            Ok(Output {
                manifest: json!({
                    "command": "compile pcp2pfa",
                    "construction": construction,
                    "unit_params": unit,
                    "summary": pfa_summary(&p),
                }),
                result: serde_json::to_value(&p)?,
            })
        }
        Compile::Tm2mpcp {
            machine,
            tape: t,
            uniqueness,
        } => {
            let tm: TuringMachine = read_json(&machine)?;
            let opts = MpcpOptions { uniqueness };
            let m = tm_to_mpcp(&tm, &tape(&t), opts).context("tm2mpcp::tm_to_mpcp")?;
            Ok(Output {
                manifest: json!({
                    "command": "compile tm2mpcp",
                    "uniqueness": uniqueness,
                    "pairs": m.instance.k(),
                    "pair_count_formula": pair_count_formula(&tm, opts),
                }),
                result: serde_json::to_value(&m)?,
            })
        }
        Compile::Int2pfa { input, route } => {
            let inst: BinPcp = read_json(&input)?;
            let p = match route {
                Route::Claus9 => claus9_pipeline(&inst, ClausOptions::default()),
                Route::Claus9Weak => claus9_pipeline(
                    &inst,
                    ClausOptions {
                        merge_last: true,
                        weak: true,
                    },
                ),
                Route::Hirvensalo20 => hirvensalo_pipeline(&inst).map(|(p, _)| p),
            }
            .context("intmat::int2pfa")?;
            Ok(Output {
                manifest: json!({
                    "command": "compile int2pfa",
                    "route": route,
                    "alpha": r(&p.alpha),
                    "steps": p.steps,
                    "summary": pfa_summary(&p.pfa),
                }),
                result: serde_json::to_value(&p.pfa)?,
            })
        }
        Compile::Cl2cmChecker {
            g,
            k,
            padded,
            machine,
            steps,
        } => {
            let params = CheckerParams { g, k };
            let pfa = if padded {
                PaddedChecker::new(params).context("cl2cm::padded_checker")?.pfa
            } else {
                EqualityChecker::new(params)
                    .context("cl2cm::equality_checker")?
                    .pfa
            };
            let mut manifest = json!({
                "command": "compile cl2cm-checker",
                "g": g,
                "k": k,
                "padded": padded,
                "summary": pfa_summary(&pfa),
                "fake_reject_bound": r(&fake_reject_bound(params)),
            });
            if let Some(path) = machine {
                let m: TwoCounterMachine = read_json(&path)?;
                m.validate().context("cl2cm::validate")?;
                let run = m
                    .accepting_run(steps)
                    .context("cl2cm: the machine does not halt within --steps")?;
                let word = encode_configs(&run);
                let rp = correctness_test_probs(&m, &word, params).context("cl2cm::correctness_test")?;
                let mut run = json!({
                    "word": word,
                    "correct": r(&rp.correct),
                    "incorrect": r(&rp.incorrect),
                    "limit_accept": r(&limit_accept_prob(&rp, k)),
                });
                if let Some(t) = rounds_needed(&rp, &rat(1, 1000)) {
                    run["rounds_for_slack_1/1000"] = json!(t.to_string());
                    run["accept_lower_bound"] = r(&accept_lower_bound(&rp, &t, k));
                }
                manifest["run"] = run;
            }
            Ok(Output {
                manifest,
                result: serde_json::to_value(&pfa)?,
            })
        }
        Compile::AmplifyF(a) => amplify(a, "amplify-f"),
        Compile::AmplifyNc(a) => amplify(a, "amplify-nc"),
        Compile::AmplifyGo { x, eps } => {
            let plan = go_input_builder(&x, &eps).context("amplify::go_input_builder")?;
            let (rp, rm) =
                go_conditional_rejects(&x, plan.n, plan.t).context("amplify::go_conditional_rejects")?;
            let closed = go_closed_rejects(&x, plan.n, plan.t);
            let pfa = go_automaton(&x).context("amplify::go_automaton")?;
            Ok(Output {
                manifest: json!({
                    "command": "compile amplify-go",
                    "x": r(&x),
                    "eps": r(&eps),
                    "plan": plan,
                    "reject_given_plus": r(&rp),
                    "reject_given_minus": r(&rm),
                    "closed_forms_agree": (rp.clone(), rm.clone()) == closed,
                    "sound": rp <= eps && rm <= eps,
                }),
                result: serde_json::to_value(&pfa)?,
            })
        }
    }
}

fn amplify(a: AmpArgs, name: &str) -> Result<Output> {
    let mut manifest = json!({ "command": format!("compile {name}") });
    if let (Some(x), Some(eps)) = (&a.x, &a.eps) {
        let (n, t) = f_input_builder(x, eps).context("amplify::f_input_builder")?;
        manifest["plan"] = json!({ "n": n, "t": t, "x": r(x), "eps": r(eps) });
    } else if a.x.is_some() || a.eps.is_some() {
        bail!("--x and --eps go together");
    }
    let result = match &a.pfa {
        Some(path) => {
            let base: Pfa = read_json(path)?;
            let p = if name == "amplify-f" {
                amplify_f(&base)
            } else {
                amplify_nc(&base)
            }
            .with_context(|| format!("amplify::{name}"))?;
            manifest["summary"] = pfa_summary(&p);
            serde_json::to_value(&p)?
        }
        None if manifest.get("plan").is_some() => manifest["plan"].clone(),
        None => bail!("{name} needs --pfa or --x with --eps"),
    };
    Ok(Output { result, manifest })
}

fn search(a: SearchArgs) -> Result<Output> {
    let p: Pfa = read_json(&a.pfa)?;
    let c = a.cutpoint.clone().unwrap_or_else(|| p.cutpoint().clone());
    let want = match a.mode {
        SearchMode::Own => match a.cutpoint {
            Some(c) => match p.mode() {
                Mode::Strict => Want::Above(c),
                Mode::Weak => Want::AtLeast(c),
            },
            None => Want::from_pfa(&p),
        },
        SearchMode::Strict => Want::Above(c),
        SearchMode::Weak => Want::AtLeast(c),
        SearchMode::Exact => Want::Exactly(c),
    };
    let rep = bounded_search(&p, a.max_len, &want);
    Ok(Output {
        manifest: json!({ "command": "search", "max_len": a.max_len, "summary": pfa_summary(&p) }),
        result: serde_json::to_value(&rep)?,
    })
}

fn random_bits(rng: &mut ChaCha8Rng, max: usize) -> BinWord {
    let n = rng.gen_range(0..=max);
    BinWord::new((0..n).map(|_| rng.gen_bool(0.5)).collect())
}

fn random_tern(rng: &mut ChaCha8Rng, max: usize) -> TernWord {
    let n = rng.gen_range(0..=max);
    TernWord::new((0..n).map(|_| rng.gen_range(1..=2u8)).collect()).expect("digits 1 and 2")
}

fn random_unit(rng: &mut ChaCha8Rng) -> Rational {
    let d = rng.gen_range(1..=1000i64);
    rat(rng.gen_range(0..=d), d)
}

/// Counts passes and keeps the first failure.
#[derive(Default)]
struct Tally {
    checks: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.first_failure.is_none() {
            self.first_failure = Some(what());
        }
    }

    fn report(self, name: &str) -> Value {
        json!({ "name": name, "checks": self.checks, "pass": self.first_failure.is_none(), "failure": self.first_failure })
    }
}

fn verify(a: VerifyArgs) -> Result<Output> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut reports = Vec::new();
    match a.what {
        VerifyWhat::Laws => {
            let mut t = Tally::default();
            for _ in 0..a.cases {
                let (u, v) = (random_bits(&mut rng, 12), random_bits(&mut rng, 12));
                let lhs = b_matrix(&u).mul(&b_matrix(&v))?;
                t.check(lhs == b_matrix(&v.concat(&u)), || format!("{u:?} {v:?}"));
            }
            reports.push(t.report("binary automaton: B(u)B(v) = B(vu)"));
            let (mut fw, mut rv) = (Tally::default(), Tally::default());
            for _ in 0..a.cases {
                let ws: Vec<TernWord> = (0..4).map(|_| random_tern(&mut rng, 4)).collect();
                let lhs = claus_a(&ws[0], &ws[1]).mul(&claus_a(&ws[2], &ws[3]))?;
                fw.check(
                    lhs == claus_a(&ws[0].concat(&ws[2]), &ws[1].concat(&ws[3])),
                    || format!("{ws:?}"),
                );
                let lhs = hirvensalo_a(&ws[0], &ws[1]).mul(&hirvensalo_a(&ws[2], &ws[3]))?;
                rv.check(
                    lhs == hirvensalo_a(&ws[2].concat(&ws[0]), &ws[3].concat(&ws[1])),
                    || format!("{ws:?}"),
                );
            }
            reports.push(fw.report("forward integer law"));
            reports.push(rv.report("reversed integer law"));
            let mut t = Tally::default();
            for _ in 0..a.cases.min(50) {
                let bs: Vec<RatMatrix> = (0..3)
                    .map(|_| claus_a(&random_tern(&mut rng, 3), &random_tern(&mut rng, 3)))
                    .collect();
                let tk = turakainen(&extend_final(&bs, &claus_f1())?)?;
                let last = tk.dim() - 1;
                let word: Vec<usize> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(0..3)).collect();
                let fs: Vec<&RatMatrix> = word.iter().map(|&i| &tk.f[i]).collect();
                let es: Vec<&RatMatrix> = word.iter().map(|&i| &tk.e[i]).collect();
                let fv = RatMatrix::chain(&fs)?.get(0, last).clone();
                let ev = RatMatrix::chain(&es)?.get(0, last).clone();
                t.check(fv == tk.lift(word.len(), &ev), || format!("word {word:?}"));
            }
            reports.push(t.report("stochastic lift"));
        }
        VerifyWhat::PaperMatrices => {
            for (name, shown, made) in printed_matrix_checks() {
                let mut t = Tally::default();
                t.check(shown == made, || "regenerated matrix differs".into());
                reports.push(t.report(name));
            }
        }
        VerifyWhat::Identities => {
            let mut t = Tally::default();
            let (h, q) = (rat(1, 2), rat(1, 4));
            let one = Rational::from_integer(1.into());
            for _ in 0..a.cases {
                let (x, y) = (random_unit(&mut rng), random_unit(&mut rng));
                let mix = &h * &x * &y + &q * (&one - &x * &x) + &q * (&one - &y * &y);
                t.check(mix == equality_score(&x, &y), || format!("{x} {y}"));
            }
            reports.push(t.report("equality trick"));
            let mut t = Tally::default();
            for i in 0..=10 {
                for j in 0..=10 {
                    t.check(equality_by_coins(i, j) == equality_by_coins_closed(i, j), || {
                        format!("({i},{j})")
                    });
                }
            }
            reports.push(t.report("equality by coins"));
            let mut t = Tally::default();
            let f9 = f_hat();
            let f11 = f_hat_11();
            t.check(f9[4] == rat(5, 8), || "centre output".into());
            t.check(
                m_infinity(&f11, 9, 10).mul_vec(&RatVector::unit(11, 9))? == f11,
                || "M∞ e_qA".into(),
            );
            reports.push(t.report("output vectors"));
        }
    }
    let pass = reports.iter().all(|r| r["pass"] == json!(true));
    Ok(Output {
        manifest: json!({ "command": "verify", "seed": a.seed, "cases": a.cases, "pass": pass }),
        result: json!({ "pass": pass, "checks": reports }),
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let out = run(cli.cmd)?;
    let text = serde_json::to_string_pretty(&out.result)? + "\n";
    match &cli.out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            let mut m = out.manifest;
            m["output"] = json!(path.display().to_string());
            let mpath = path.with_extension("manifest.json");
            fs::write(&mpath, serde_json::to_string_pretty(&m)? + "\n")
                .with_context(|| format!("writing {}", mpath.display()))?;
        }
        None => print!("{text}"),
    }
    if out.result.get("pass") == Some(&json!(false)) {
        std::process::exit(1);
    }
    Ok(())
}
