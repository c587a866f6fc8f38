//! Acceptance criteria 1-9, one line per criterion.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::Instant;

use sqmul::arith::{factorize, frobenius_number, gcd, nonrepresentable_set, SemigroupPair};
use sqmul::funcsolve::{check_function, replay_script, solve, SolverConfig, Value};
use sqmul::repr::{count, enumerate, exceptional_set, is_representable, verify_dubouis};
use sqmul::theorem::{check_parametric, theorem_check, ParametricIdentity};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const THEOREM_KS: [usize; 7] = [4, 5, 6, 7, 8, 10, 13];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dubouis() -> Outcome {
    let start = Instant::now();
    for k in 4..=12 {
        let r = verify_dubouis(k, 10_000).map_err(|e| e.to_string())?;
        ensure(r.agree, || format!("k = {k} disagrees"))?;
    }
    let small = exceptional_set(4, 50);
    ensure(
        small == [1, 2, 3, 5, 6, 8, 9, 11, 14, 17, 24, 29, 32, 41],
        || format!("k = 4 up to 50: {small:?}"),
    )?;
    ensure(!is_representable(33, 5), || {
        "33 is a sum of 5 squares".into()
    })?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1}s"))?;
    Ok(format!("k = 4..=12 agree up to 10000 ({secs:.2}s)"))
}

fn theorem() -> Outcome {
    let mut times = Vec::new();
    for k in THEOREM_KS {
        let start = Instant::now();
        let r = theorem_check(k, 300, SolverConfig::default()).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        let failed: Vec<String> = r
            .failed()
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        ensure(r.all_passed, || format!("k = {k}: {failed:?}"))?;
        let pinned = r
            .checks
            .iter()
            .any(|c| c.passed && c.name.ends_with("f(n) = n for n <= 300"));
        ensure(pinned, || format!("k = {k}: no pinning check"))?;
        ensure(secs < 60.0, || format!("k = {k} took {secs:.1}s"))?;
        times.push(format!("{k}:{secs:.2}s"));
    }
    Ok(format!("all n <= 300 pinned ({})", times.join(" ")))
}

fn replay() -> Outcome {
    let expected: [(usize, &str, &str); 13] = [
        (4, "f(12)", "f(3) = {1, 3}"),
        (4, "f(35)", "f(3) = {3}"),
        (4, "f(35)", "f(5) = {5}"),
        (4, "f(35)", "f(7) = {7}"),
        (4, "f(10), f(7)", "f(2) = {2}"),
        (4, "f(18)", "f(9) = {9}"),
        (5, "f(20)", "f(4) = {1, 4}"),
        (5, "f(29)", "f(29) = {29}"),
        (5, "f(29)", "f(2) = {-2, 2}"),
        (5, "f(29)", "f(3) = {-3, 3}"),
        (7, "f(55)", "f(5) = {-5, 5}"),
        (
            8,
            "40 and 32",
            "(f(2), f(3)) in {(-2, -3), (-2, 3), (-1, -1), (-1, 1), (1, -1), (1, 1), (2, -3), (2, 3)}",
        ),
        (8, "f(71)", "f(7) = {7}"),
    ];
    let mut traces = BTreeMap::new();
    for (k, block, claim) in expected {
        if let std::collections::btree_map::Entry::Vacant(e) = traces.entry(k) {
            e.insert(replay_script(k).map_err(|e| format!("k = {k}: {e}"))?);
        }
        let t = &traces[&k];
        let b = t
            .blocks
            .iter()
            .find(|b| b.name == block)
            .ok_or_else(|| format!("k = {k}: no block {block}"))?;
        let c = b
            .claims
            .iter()
            .find(|c| c.claim == claim)
            .ok_or_else(|| format!("k = {k}, {block}: claim {claim} not scripted"))?;
        ensure(c.holds, || {
            format!("k = {k}, {block}: {claim} but got {}", c.got)
        })?;
    }
    let k8 = &traces[&8];
    let after = k8.blocks.iter().find(|b| b.name == "f(71)").unwrap();
    for claim in ["f(2) = {-2, 2}", "f(3) = {-3, 3}"] {
        ensure(
            after.claims.iter().any(|c| c.claim == claim && c.holds),
            || format!("k = 8: {claim} missing after f(71)"),
        )?;
    }
    Ok(format!("{} scripted claims reproduced", expected.len() + 2))
}

fn soundness() -> Outcome {
    let mut steps = 0;
    for k in THEOREM_KS {
        let r = solve(k, 300, SolverConfig::default()).map_err(|e| e.to_string())?;
        for s in &r.steps {
            ensure(s.keeps_identity(), || {
                format!("k = {k}: step {} drops {}", s.index, s.n)
            })?;
        }
        steps += r.steps.len();
        let t = theorem_check(k, 300, SolverConfig::default()).map_err(|e| e.to_string())?;
        let kept = t
            .checks
            .iter()
            .any(|c| c.passed && c.name.ends_with("identity never pruned"));
        ensure(kept, || format!("k = {k}: theorem run pruned the identity"))?;
    }
    for k in [4, 5, 6, 7, 8] {
        let t = replay_script(k).map_err(|e| e.to_string())?;
        for s in &t.steps {
            ensure(s.keeps_identity(), || {
                format!("replay k = {k}: step {}", s.index)
            })?;
        }
        steps += t.steps.len();
    }
    Ok(format!("{steps} trace steps keep n in f(n)"))
}

fn naive_count(n: u64, k: usize, max: u64) -> u64 {
    if k == 0 {
        return u64::from(n == 0);
    }
    (1..=max)
        .take_while(|x| x * x <= n)
        .map(|x| naive_count(n - x * x, k - 1, x))
        .sum()
}

fn oracle() -> Outcome {
    let mut checked = 0;
    for k in 1..=6 {
        for n in 1..=300u64 {
            let reps = enumerate(n, k, usize::MAX).representations;
            let expected = naive_count(n, k, n);
            ensure(count(n, k) == expected as u128, || {
                format!("count({n}, {k})")
            })?;
            ensure(reps.len() as u64 == expected, || {
                format!("enumerate({n}, {k}) incomplete")
            })?;
            for w in reps.windows(2) {
                ensure(w[0].parts() > w[1].parts(), || {
                    format!("enumerate({n}, {k}) order")
                })?;
            }
            for r in &reps {
                let p = r.parts();
                ensure(p.windows(2).all(|w| w[0] >= w[1]), || {
                    format!("{r} not canonical")
                })?;
                ensure(p.iter().map(|x| x * x).sum::<u64>() == n, || {
                    format!("{r} wrong sum")
                })?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (n, k) pairs match nested loops"))
}

fn frobenius() -> Outcome {
    let p = SemigroupPair::new(3, 8).map_err(|e| e.to_string())?;
    ensure(frobenius_number(p) == 13, || "g(3, 8) != 13".into())?;
    ensure(nonrepresentable_set(p) == [1, 2, 4, 5, 7, 10, 13], || {
        "gaps of <3, 8>".into()
    })?;
    let mut pairs = 0;
    for a in 2..=20u64 {
        for b in 2..=20u64 {
            if gcd(a, b) != 1 {
                continue;
            }
            let p = SemigroupPair::new(a, b).map_err(|e| e.to_string())?;
            let brute: Vec<u64> = (1..=a * b)
                .filter(|&t| !(0..=t / a).any(|x| (t - x * a) % b == 0))
                .collect();
            ensure(nonrepresentable_set(p) == brute, || {
                format!("gaps of <{a}, {b}>")
            })?;
            ensure(brute.last() == Some(&frobenius_number(p)), || {
                format!("g({a}, {b})")
            })?;
            pairs += 1;
        }
    }
    Ok(format!(
        "g(3, 8) = 13 and {pairs} coprime pairs match brute force"
    ))
}

fn parametric() -> Outcome {
    for id in [
        ParametricIdentity::odd_family(),
        ParametricIdentity::even_family(),
    ] {
        let r = check_parametric(&id, 1000);
        let failed: Vec<String> = r.failed().map(|c| c.name.clone()).collect();
        ensure(r.all_passed, || format!("{}: {failed:?}", id.name))?;
        let (l, rr) = id.expansion();
        ensure(l == rr, || format!("{}: {l:?} vs {rr:?}", id.name))?;
    }
    Ok("both families hold for l up to 1000, expansions equal".into())
}

fn identity_except(changes: &[(u64, i64)], bound: u64) -> BTreeMap<u64, Value> {
    let mut f: BTreeMap<u64, Value> = (2..=bound)
        .filter(|&n| factorize(n).is_prime_power())
        .map(|n| (n, Value::from_u64(n)))
        .collect();
    for &(n, v) in changes {
        f.insert(n, Value::int(v));
    }
    f
}

fn negative() -> Outcome {
    let flip = identity_except(&[(3, -3)], 100);
    let v = check_function(&flip, 4, 100, 16).map_err(|e| e.to_string())?;
    ensure(!v.is_empty(), || "sign flip not flagged".into())?;
    let branch = identity_except(&[(3, 1), (5, 1), (7, 1)], 35);
    let w = check_function(&branch, 4, 35, 16).map_err(|e| e.to_string())?;
    let hit = w
        .iter()
        .find(|x| x.constraint.target() == 35 && &x.rhs - &x.lhs == Value::int(18))
        .ok_or("no violation at 35 with rhs - lhs = 18")?;
    Ok(format!(
        "sign flip: {} violations; branch: {} with lhs {}, rhs {}",
        v.len(),
        hit.constraint,
        hit.lhs,
        hit.rhs
    ))
}

fn determinism() -> Outcome {
    let run = || -> Result<String, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_sqmul"))
            .args(["solve", "--k", "5", "--bound", "200", "--trace"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("exit {:?}", out.status.code())
        })?;
        let raw = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
        Ok(raw
            .lines()
            .filter(|l| !l.trim_start().starts_with("\"elapsed_ms\""))
            .collect::<Vec<_>>()
            .join("\n"))
    };
    let (a, b) = (run()?, run()?);
    ensure(a == b, || "envelopes differ".into())?;
    Ok(format!("two runs byte-identical ({} bytes)", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Dubouis reproduction", dubouis),
        ("theorem end-to-end", theorem),
        ("replay fidelity", replay),
        ("solver soundness", soundness),
        ("oracle equivalence", oracle),
        ("Frobenius", frobenius),
        ("parametric identities", parametric),
        ("negative detection", negative),
        ("determinism", determinism),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                all = false;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
