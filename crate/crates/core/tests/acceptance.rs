//! Acceptance suite. Runs without the libtest harness so that each
//! criterion reports exactly one pass/fail line; any failure exits 1.
//!
//! cargo test -p cfbound --test acceptance

use std::process::{Command, ExitCode};
use std::time::Instant;

use cfbound::cli::{self, read_records, reverify, reverify_witness_pair, same_values, Format, OutputRecord};
use cfbound::rational::{int, pow10, ratio, to_f64, to_fraction_string};
use cfbound::{
    advance, check_functional_equation, check_g_above_one, check_reciprocal, check_sandwich, cross_check,
    default_witness_grid, find_alpha, find_witness, limit_check, term, BigRational, CfPoint, ConvergentPair,
    EvalConfig, Mode,
};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn sandwich_ms() -> Vec<BigRational> {
    vec![int(0), ratio(1, 2), int(1), int(2), int(5)]
}

fn sandwich_lambdas() -> Vec<BigRational> {
    vec![ratio(1, 10), ratio(1, 2), int(1), int(2), int(10)]
}

fn functional_ms() -> Vec<BigRational> {
    let mut ms = vec![ratio(-1, 2), ratio(-1, 10)];
    ms.extend(sandwich_ms());
    ms
}

fn above_one_points() -> Vec<(BigRational, BigRational)> {
    let mut out = Vec::new();
    for m in [int(1), ratio(3, 2), int(5)] {
        for l in [ratio(1, 100), int(1), int(10)] {
            out.push((m.clone(), l));
        }
    }
    out
}

fn oracle_lambdas() -> Vec<BigRational> {
    vec![ratio(1, 4), ratio(1, 2), int(1), int(2), int(4)]
}

fn alpha_lambdas() -> Vec<BigRational> {
    vec![ratio(1, 2), int(1), int(2)]
}

fn random_point(rng: &mut ChaCha8Rng, m_min_num: i64) -> CfPoint {
    // m = m_min + k/d with m_min = m_min_num, up to 5; lambda = j/d up to 8
    let d: i64 = rng.gen_range(1..=97);
    let span = (5 - m_min_num) * d;
    let lo = if m_min_num < 0 { 1 } else { 0 };
    let k = rng.gen_range(lo..=span);
    let m = int(m_min_num) + ratio(k, d);
    let e: i64 = rng.gen_range(1..=97);
    let j = rng.gen_range(1..=8 * e);
    CfPoint::new(m, ratio(j, e)).expect("sampled inside the domain")
}

fn determinant_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut steps = 0;
    for _ in 0..200 {
        let point = random_point(&mut rng, -1);
        let depth = rng.gen_range(1..=60);
        let mut state = ConvergentPair::seed();
        ensure!(state.determinant() == int(1), "seed determinant at {point:?}");
        for j in 0..=depth as u64 {
            state = advance(&state, &term(&point, j));
            let expected = if state.n % 2 == 0 { -int(1) } else { int(1) };
            ensure!(state.determinant() == expected, "n = {} at m = {}, λ = {}", state.n, point.m(), point.lambda());
            steps += 1;
        }
    }
    Ok(format!("200 points, {steps} exact steps"))
}

fn bracketing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for _ in 0..100 {
        let point = random_point(&mut rng, 0);
        let mut state = ConvergentPair::seed();
        let (mut evens, mut odds) = (Vec::new(), Vec::new());
        for j in 0..=60u64 {
            state = advance(&state, &term(&point, j));
            let v = state.value().ok_or("zero denominator")?;
            if state.n % 2 == 0 {
                evens.push(v)
            } else {
                odds.push(v)
            }
        }
        let at = format!("m = {}, λ = {}", point.m(), point.lambda());
        ensure!(evens.windows(2).all(|w| w[0] < w[1]), "evens not increasing at {at}");
        ensure!(odds.windows(2).all(|w| w[0] > w[1]), "odds not decreasing at {at}");
        let max_even = evens.iter().max().unwrap();
        let min_odd = odds.iter().min().unwrap();
        ensure!(max_even < min_odd, "even above odd at {at}");
    }
    Ok("100 points, 61 convergents each".into())
}

fn sandwich() -> Outcome {
    let cfg = EvalConfig::default();
    let tol = pow10(-12);
    let mut worst = BigRational::zero();
    for m in sandwich_ms() {
        for l in sandwich_lambdas() {
            let p = CfPoint::new(m.clone(), l.clone()).unwrap();
            let (upper, lower) = check_sandwich(&p, &tol, &cfg).map_err(|e| format!("({m}, {l}): {e}"))?;
            for r in [&upper, &lower] {
                ensure!(r.certified && r.gap.is_positive(), "({m}, {l}) {} not certified", r.claim);
                ensure!(r.left.width() <= tol && r.right.width() <= tol, "({m}, {l}) {} too wide", r.claim);
                worst = worst.max(r.left.width()).max(r.right.width());
            }
        }
    }
    Ok(format!("25 points, widest enclosure {:.2e}", to_f64(&worst)))
}

fn functional() -> Outcome {
    let cfg = EvalConfig::default();
    let tol = pow10(-12);
    for m in functional_ms() {
        for l in sandwich_lambdas() {
            let p = CfPoint::new(m.clone(), l.clone()).unwrap();
            let r = check_functional_equation(&p, &tol, &cfg).map_err(|e| format!("({m}, {l}): {e}"))?;
            ensure!(r.certified && r.left.intersects(&r.right), "({m}, {l}) disjoint");
            ensure!(r.left.width() <= tol && r.right.width() <= tol, "({m}, {l}) too wide");
        }
    }
    Ok("35 points".into())
}

fn reciprocal() -> Outcome {
    let cfg = EvalConfig::default();
    let tol = pow10(-12);
    for l in [ratio(1, 10), int(1), int(10)] {
        let r = check_reciprocal(&l, &tol, &cfg).map_err(|e| format!("λ = {l}: {e}"))?;
        let (lo, hi) = r.product();
        ensure!(lo <= BigRational::one() && BigRational::one() <= hi, "λ = {l}: product misses 1");
        ensure!(r.left.hi < BigRational::one() && r.certified, "λ = {l}: G(0, λ) < 1 not certified");
    }
    Ok("3 points".into())
}

fn above_one() -> Outcome {
    let cfg = EvalConfig::default();
    let tol = pow10(-12);
    let mut directed = 0;
    for (m, l) in above_one_points() {
        let p = CfPoint::new(m.clone(), l.clone()).unwrap();
        let r = check_g_above_one(&p, &tol, &cfg).map_err(|e| format!("({m}, {l}): {e}"))?;
        ensure!(r.certified && r.left.lo > BigRational::one(), "({m}, {l}) not certified");
        directed += usize::from(r.left.mode == Mode::Directed);
    }
    Ok(format!("9 points, {directed} in directed mode"))
}

fn oracle() -> Outcome {
    let cfg = EvalConfig::default();
    let tol = pow10(-10);
    for m in 0..=8u32 {
        for l in oracle_lambdas() {
            let r = cross_check(m, &l, &tol, &cfg).map_err(|e| format!("({m}, {l}): {e}"))?;
            ensure!(r.certified && r.left.intersects(&r.right), "({m}, {l}) disjoint");
            ensure!(r.left.width() <= tol && r.right.width() <= tol, "({m}, {l}) too wide");
        }
    }
    Ok("45 points".into())
}

fn alpha() -> Outcome {
    let cfg = EvalConfig::default();
    let tol = pow10(-6);
    // independent root solves of I_{m-1}(2/λ) = I_m(2/λ)
    let reference = [0.497_729_3, 0.449_625_7, 0.325_089_1];
    let one = BigRational::one();
    let mut mids = Vec::new();
    for (l, want) in alpha_lambdas().into_iter().zip(reference) {
        let r = find_alpha(&l, &tol, &tol, &cfg).map_err(|e| format!("λ = {l}: {e}"))?;
        ensure!(r.width() <= tol, "λ = {l}: width {}", r.width());
        ensure!(r.m_lo.is_positive() && r.m_hi < one, "λ = {l}: bracket not inside (0, 1)");
        ensure!(r.g_lo.hi < one && r.g_hi.lo > one, "λ = {l}: endpoint certificates missing");
        let g = &r.g_at_mid;
        let near = g.contains(&one) || ((&g.lo - &one).abs() <= tol && (&g.hi - &one).abs() <= tol);
        ensure!(near, "λ = {l}: midpoint enclosure far from 1");
        let mid = to_f64(&r.midpoint());
        ensure!((mid - want).abs() < 2e-6, "λ = {l}: midpoint {mid} vs reference {want}");
        mids.push(format!("{mid:.7}"));
    }
    Ok(format!("α = {}", mids.join(", ")))
}

fn limit() -> Outcome {
    let cfg = EvalConfig::default();
    let tol = pow10(-12);
    let radius = ratio(1, 100);
    // G(0, 1e-3) and G(1, 1e-3) from the Bessel ratio at high precision
    let reference = [0.999_749_97, 1.000_250_09];
    let mut report = Vec::new();
    for (m, want) in [int(0), int(1)].into_iter().zip(reference) {
        let pts = limit_check(&m, &[pow10(-3)], &tol, &cfg).map_err(|e| e.to_string())?;
        let pt = &pts[0];
        let enc = pt.enclosure.as_ref().map_err(|e| format!("m = {m}: {e}"))?;
        ensure!(enc.mode == Mode::Directed, "m = {m}: expected directed mode");
        let r = pt.radius_from_one().unwrap();
        ensure!(r <= radius, "m = {m}: |G - 1| up to {}", to_f64(&r));
        ensure!((to_f64(&enc.midpoint()) - want).abs() < 1e-8, "m = {m}: off the reference value");
        report.push(format!("m = {m}: |G - 1| <= {:.3e}", to_f64(&r)));
    }
    Ok(report.join(", "))
}

fn witness() -> Outcome {
    let cfg = EvalConfig::default();
    let tol = pow10(-12);
    let m = ratio(1, 10);
    let w = find_witness(&m, &default_witness_grid(), &tol, &cfg).map_err(|e| e.to_string())?;
    ensure!(w.lambda1 < w.lambda2, "λ1 >= λ2");
    ensure!(w.g1.lo > w.g2.hi, "enclosures overlap");
    ensure!(w.g1.mode == Mode::Exact && w.g2.mode == Mode::Exact, "expected exact mode");
    let (g1, g2, ok) = w.recertify(&cfg).map_err(|e| e.to_string())?;
    ensure!(ok && g1 == w.g1 && g2 == w.g2, "re-run is not bit-identical");
    Ok(format!("λ1 = {}, λ2 = {}, gap {:.3e}", w.lambda1, w.lambda2, to_f64(&w.gap())))
}

fn run_cli(args: &[String]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cfbound".to_string()).chain(args.iter().cloned());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn args(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

fn cli_invocations() -> Vec<Vec<String>> {
    let f = to_fraction_string;
    let mut out = Vec::new();
    for m in sandwich_ms() {
        for l in sandwich_lambdas() {
            out.push(args(&format!("check sandwich --m {} --lambda {}", f(&m), f(&l))));
        }
    }
    for m in functional_ms() {
        for l in sandwich_lambdas() {
            out.push(args(&format!("check functional --m {} --lambda {}", f(&m), f(&l))));
        }
    }
    for l in [ratio(1, 10), int(1), int(10)] {
        out.push(args(&format!("check reciprocal --lambda {}", f(&l))));
    }
    for (m, l) in above_one_points() {
        out.push(args(&format!("check above-one --m {} --lambda {}", f(&m), f(&l))));
    }
    for m in 0..=8 {
        for l in oracle_lambdas() {
            out.push(args(&format!("--tol 1e-10 oracle --m {m} --lambda {}", f(&l))));
        }
    }
    for l in alpha_lambdas() {
        out.push(args(&format!("alpha --lambda {} --bracket-tol 1e-6 --g-tol 1e-6", f(&l))));
    }
    for m in [0, 1] {
        out.push(args(&format!("eval --m {m} --lambda 1e-3")));
    }
    out.push(args("witness --m 1/10"));
    out
}

fn tol_of(argv: &[String]) -> BigRational {
    argv.iter()
        .position(|a| a == "--tol")
        .map(|i| cfbound::rational::parse_rational(&argv[i + 1]).unwrap())
        .unwrap_or_else(cli::default_tol)
}

fn cli_round_trip() -> Outcome {
    let cfg = EvalConfig::default();
    let mut checked = 0;
    for argv in cli_invocations() {
        let line = argv.join(" ");
        let mut by_format = Vec::new();
        for (flag, format) in [("json", Format::Json), ("csv", Format::Csv)] {
            let mut full = argv.clone();
            full.extend(args(&format!("--format {flag}")));
            let (code, out, err) = run_cli(&full);
            ensure!(code == 0, "`{line}` ({flag}) exited {code}: {err}");
            let records = read_records(&out, format).map_err(|e| format!("`{line}` ({flag}): {e}"))?;
            ensure!(!records.is_empty(), "`{line}` ({flag}) emitted nothing");
            by_format.push(records);
        }
        let (json, csv) = (&by_format[0], &by_format[1]);
        ensure!(json.len() == csv.len(), "`{line}`: record counts differ");
        ensure!(json.iter().zip(csv).all(|(a, b)| same_values(a, b)), "`{line}`: CSV and JSON differ");
        let tol = tol_of(&argv);
        for rec in json.iter().chain(csv) {
            reverify(rec, &tol, &cfg).map_err(|e| format!("`{line}`: {e}"))?;
            checked += 1;
        }
        if argv[0] == "witness" {
            let pick = |name: &str| -> Result<&OutputRecord, String> {
                json.iter().find(|r| r.command == name).ok_or(format!("missing {name}"))
            };
            reverify_witness_pair(pick("witness:g1")?, pick("witness:g2")?, &tol, &cfg)?;
        }
    }

    // exit-code table, through the real binary
    let bin = env!("CARGO_BIN_EXE_cfbound");
    let table = [
        (0, "eval --m 1 --lambda 1"),
        (1, "eval --m -2 --lambda 1"),
        (1, "check above-one --m 0.5 --lambda 1"),
        (2, "--max-depth 3 eval --m 1 --lambda 1"),
        (3, "--tol 0.5 --tol-floor 0.5 check sandwich --m 0 --lambda 1/10"),
        (4, "witness --m 0.9 --grid-list 1,2,4"),
    ];
    for (want, line) in table {
        let status = Command::new(bin).args(line.split_whitespace()).output().map_err(|e| e.to_string())?.status;
        ensure!(status.code() == Some(want), "`{line}` exited {:?}, expected {want}", status.code());
        let (code, _, _) = run_cli(&args(line));
        ensure!(code == want, "in-process `{line}` returned {code}, expected {want}");
    }
    Ok(format!("{checked} records re-verified, exit codes 0-4 matched"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("determinant identity", determinant_identity),
        ("bracketing and nesting", bracketing),
        ("sandwich certification", sandwich),
        ("functional equation", functional),
        ("reciprocal identity and G(0, λ) < 1", reciprocal),
        ("G(m, λ) > 1 for m >= 1", above_one),
        ("Bessel oracle agreement", oracle),
        ("α(λ) bracketing", alpha),
        ("λ → 0+ limit", limit),
        ("non-monotonicity witness", witness),
        ("CLI round-trip and exit codes", cli_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("[PASS] criterion {}: {name} ({detail}; {secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name} ({why}; {secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
