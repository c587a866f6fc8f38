//! Case-by-case verification that a multiplicative `f` satisfying the
//! `k`-square equation is the identity, for `k >= 4`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::arith::{factorize, frobenius_number, represent_in_semigroup, SemigroupPair};
use crate::funcsolve::replay::{frobenius_split, replay_state, sign_witness};
use crate::funcsolve::{
    roots, Atom, CandidateSet, Constraint, Poly, Roots, SolveError, SolverConfig, SolverState,
    Value,
};
use crate::repr::{ReprTable, Representation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub case: String,
    pub k: Option<usize>,
    pub checks: Vec<Check>,
    pub all_passed: bool,
    /// Names of the displayed equations this report checks.
    pub coverage: Vec<String>,
}

impl CaseReport {
    fn new(case: impl Into<String>, k: Option<usize>) -> Self {
        Self {
            case: case.into(),
            k,
            checks: Vec::new(),
            all_passed: true,
            coverage: Vec::new(),
        }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.all_passed &= passed;
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// `a*l + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinearForm {
    pub a: i64,
    pub b: i64,
}

impl LinearForm {
    pub const fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }

    pub fn at(&self, l: i64) -> i128 {
        self.a as i128 * l as i128 + self.b as i128
    }
}

/// `lhs[0]^2 + lhs[1]^2 = rhs[0]^2 + rhs[1]^2` for every `l >= threshold`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParametricIdentity {
    pub name: &'static str,
    pub lhs: [LinearForm; 2],
    pub rhs: [LinearForm; 2],
    pub threshold: i64,
}

impl ParametricIdentity {
    /// `(2l+1)^2 + (l-2)^2 = (2l-1)^2 + (l+2)^2`, `l >= 5`.
    pub fn odd_family() -> Self {
        Self {
            name: "odd family",
            lhs: [LinearForm::new(2, 1), LinearForm::new(1, -2)],
            rhs: [LinearForm::new(2, -1), LinearForm::new(1, 2)],
            threshold: 5,
        }
    }

    /// `(2l)^2 + (l-5)^2 = (2l-4)^2 + (l+3)^2`, `l >= 6`.
    pub fn even_family() -> Self {
        Self {
            name: "even family",
            lhs: [LinearForm::new(2, 0), LinearForm::new(1, -5)],
            rhs: [LinearForm::new(2, -4), LinearForm::new(1, 3)],
            threshold: 6,
        }
    }

    /// The four terms and both square sums at `l`.
    pub fn evaluate(&self, l: i64) -> ([i128; 4], i128, i128) {
        let t = [
            self.lhs[0].at(l),
            self.lhs[1].at(l),
            self.rhs[0].at(l),
            self.rhs[1].at(l),
        ];
        (t, t[0] * t[0] + t[1] * t[1], t[2] * t[2] + t[3] * t[3])
    }

    /// Square sums agree and all four terms are positive.
    pub fn holds_at(&self, l: i64) -> bool {
        let (t, lhs, rhs) = self.evaluate(l);
        lhs == rhs && t.iter().all(|&x| x >= 1)
    }

    /// Coefficients of `l^2, l, 1` in each side's square sum.
    pub fn expansion(&self) -> ([i128; 3], [i128; 3]) {
        let side = |forms: &[LinearForm; 2]| {
            forms.iter().fold([0i128; 3], |acc, f| {
                let (a, b) = (f.a as i128, f.b as i128);
                [acc[0] + a * a, acc[1] + 2 * a * b, acc[2] + b * b]
            })
        };
        (side(&self.lhs), side(&self.rhs))
    }
}

pub fn check_parametric(identity: &ParametricIdentity, l_max: i64) -> CaseReport {
    let mut report = CaseReport::new(identity.name, None);
    let (lhs, rhs) = identity.expansion();
    report.check(
        "polynomial expansion",
        lhs == rhs,
        format!("{lhs:?} vs {rhs:?}"),
    );
    let mut bad = Vec::new();
    for l in identity.threshold..=l_max {
        if !identity.holds_at(l) {
            bad.push(l);
        }
    }
    report.check(
        format!("l in {}..={l_max}", identity.threshold),
        bad.is_empty() && l_max >= identity.threshold,
        if bad.is_empty() {
            format!("{} values checked", (l_max - identity.threshold + 1).max(0))
        } else {
            format!("fails at {:?}", &bad[..bad.len().min(10)])
        },
    );
    report
}

fn displayed(report: &mut CaseReport, name: &str, target: u64, parts: &[u64]) {
    let rep = Representation::new(target, parts.to_vec());
    report.check(
        name,
        rep.is_ok(),
        match rep {
            Ok(r) => r.to_string(),
            Err(e) => e.to_string(),
        },
    );
}

fn equal_targets(report: &mut CaseReport, name: &str, k: usize, sides: &[&[u64]]) {
    let padded: Vec<Result<Representation, String>> = sides
        .iter()
        .map(|parts| {
            let target = parts.iter().map(|x| x * x).sum::<u64>() + (k - parts.len()) as u64;
            let mut full = parts.to_vec();
            full.resize(k, 1);
            Representation::new(target, full).map_err(|e| e.to_string())
        })
        .collect();
    let targets: BTreeSet<u64> = padded
        .iter()
        .flatten()
        .map(Representation::target)
        .collect();
    let ok = padded.iter().all(Result::is_ok) && targets.len() == 1;
    let detail = padded
        .iter()
        .map(|r| match r {
            Ok(r) => r.to_string(),
            Err(e) => e.clone(),
        })
        .collect::<Vec<_>>()
        .join("; ");
    report.check(name, ok, detail);
}

fn replay_into(
    report: &mut CaseReport,
    k: usize,
    bound: u64,
    config: &SolverConfig,
) -> Option<SolverState> {
    match replay_state(k, bound, config.clone()) {
        Ok((state, trace)) => {
            for b in &trace.blocks {
                let detail: Vec<String> = b.claims.iter().map(|c| c.claim.clone()).collect();
                report.check(format!("replay {}", b.name), true, detail.join("; "));
            }
            Some(state)
        }
        Err(e) => {
            report.check("replay", false, e.to_string());
            None
        }
    }
}

fn pinned_summary(report: &mut CaseReport, state: &SolverState, bound: u64) {
    let missing: Vec<u64> = (1..=bound).filter(|&n| !state.is_pinned(n)).collect();
    report.check(
        format!("f(n) = n for n <= {bound}"),
        missing.is_empty(),
        if missing.is_empty() {
            format!("{bound} values pinned")
        } else {
            format!("unpinned: {:?}", &missing[..missing.len().min(20)])
        },
    );
    report.check(
        "identity never pruned",
        state.identity_preserved(),
        format!("{} trace steps", state.trace().len()),
    );
}

/// Fixes signs of prime powers known up to sign, then sweeps induction.
fn close_signs(state: &mut SolverState, bound: u64) -> Result<(), SolveError> {
    for n in 2..=bound {
        if state.is_pinned(n) || !factorize(n).is_prime_power() {
            continue;
        }
        let pm = CandidateSet::of([Value::from_u64(n), -&Value::from_u64(n)]);
        if !state.candidates(n).is_subset_of(&pm) {
            continue;
        }
        if let Some(cs) = sign_witness(state, n, 10 * bound) {
            state.add_constraints(cs)?;
            state.propagate()?;
        }
    }
    Ok(())
}

fn complete(report: &mut CaseReport, state: &mut SolverState, bound: u64) {
    let run = (|| -> Result<(), SolveError> {
        state.add_generated()?;
        state.propagate()?;
        close_signs(state, bound)?;
        state.induction_sweep(bound)?;
        Ok(())
    })();
    if let Err(e) = run {
        report.check("propagation", false, e.to_string());
    }
    pinned_summary(report, state, bound);
}

const K4_DISPLAYED: [(&str, u64, [u64; 4]); 7] = [
    ("f(12)", 12, [3, 1, 1, 1]),
    ("f(20)", 20, [3, 3, 1, 1]),
    ("f(28)", 28, [3, 3, 3, 1]),
    ("f(35)", 35, [4, 3, 3, 1]),
    ("f(10)", 10, [2, 2, 1, 1]),
    ("f(7)", 7, [2, 1, 1, 1]),
    ("f(18)", 18, [3, 2, 2, 1]),
];

/// Displayed representations, the scripted deduction (which pins the
/// exceptional values 11, 17, 29, 41) and the `10 * 4^m` step for
/// `1 <= m <= max_m`.
pub fn verify_case_k4(max_m: u32) -> CaseReport {
    let mut report = CaseReport::new("k = 4", Some(4));
    for (name, target, parts) in K4_DISPLAYED {
        displayed(&mut report, name, target, &parts);
        report.coverage.push(name.to_string());
    }
    replay_into(&mut report, 4, 60, &SolverConfig::default());
    four_power_steps(&mut report, max_m);
    report
}

fn four_power_steps(report: &mut CaseReport, max_m: u32) {
    if max_m == 0 {
        report.check(
            "10*4^m with parts below 2*4^m",
            true,
            "vacuous: no m in 1..=0",
        );
        return;
    }
    let mut table = ReprTable::new();
    for m in 1..=max_m {
        let base = 2 * 4u64.pow(m);
        let rep = table
            .enumerate_bounded(5 * base, 4, base - 1, 1)
            .representations;
        report.check(
            format!("10*4^{m} with parts below {base}"),
            !rep.is_empty(),
            rep.first().map_or("none".to_string(), |r| r.to_string()),
        );
    }
}

fn k4_full(bound: u64, config: &SolverConfig) -> CaseReport {
    let max_m = (1..)
        .take_while(|&m| 2 * 4u64.pow(m) <= bound)
        .last()
        .unwrap_or(0);
    let mut report = CaseReport::new("k = 4", Some(4));
    for (name, target, parts) in K4_DISPLAYED {
        displayed(&mut report, name, target, &parts);
        report.coverage.push(name.to_string());
    }
    let Some(mut state) = replay_into(&mut report, 4, bound, config) else {
        return report;
    };
    four_power_steps(&mut report, max_m);
    let mut table = ReprTable::new();
    let run = (|| -> Result<(), SolveError> {
        for m in 1..=max_m {
            let base = 2 * 4u64.pow(m);
            if let Some(rep) = table
                .enumerate_bounded(5 * base, 4, base - 1, 1)
                .representations
                .first()
            {
                state.add_constraint(Constraint::sum_of_squares(rep))?;
                state.add_constraint(Constraint::multiplicative(5, base)?)?;
                for q in [3, 7] {
                    state.add_constraint(Constraint::multiplicative(q, base)?)?;
                }
            }
        }
        state.propagate()
    })();
    if let Err(e) = run {
        report.check("4^m propagation", false, e.to_string());
    }
    complete(&mut report, &mut state, bound);
    report
}

fn displayed_k(k: usize) -> Vec<(&'static str, Vec<Vec<u64>>)> {
    match k {
        5 => vec![
            ("f(20)", vec![vec![4, 1, 1, 1, 1], vec![2, 2, 2, 2, 2]]),
            (
                "f(29)",
                vec![
                    vec![5, 1, 1, 1, 1],
                    vec![3, 3, 3, 1, 1],
                    vec![4, 2, 2, 2, 1],
                ],
            ),
        ],
        6 => vec![
            (
                "f(30)",
                vec![
                    vec![5, 1, 1, 1, 1, 1],
                    vec![3, 3, 3, 1, 1, 1],
                    vec![4, 2, 2, 2, 1, 1],
                ],
            ),
            (
                "f(41)",
                vec![vec![6, 1, 1, 1, 1, 1], vec![5, 3, 2, 1, 1, 1]],
            ),
            (
                "f(21)",
                vec![vec![4, 1, 1, 1, 1, 1], vec![2, 2, 2, 2, 2, 1]],
            ),
        ],
        7 => vec![
            (
                "f(31)",
                vec![
                    vec![3, 3, 3, 1, 1, 1, 1],
                    vec![4, 2, 2, 2, 1, 1, 1],
                    vec![5, 1, 1, 1, 1, 1, 1],
                ],
            ),
            (
                "f(42)",
                vec![
                    vec![6, 1, 1, 1, 1, 1, 1],
                    vec![4, 3, 2, 2, 2, 2, 1],
                    vec![5, 3, 2, 1, 1, 1, 1],
                ],
            ),
            (
                "f(55)",
                vec![vec![7, 1, 1, 1, 1, 1, 1], vec![5, 5, 1, 1, 1, 1, 1]],
            ),
        ],
        _ => Vec::new(),
    }
}

/// Displayed representations for `k` in 5..=7, the scripted deduction and
/// the `n(n-1)` induction up to `bound`.
pub fn verify_case_k(k: usize, bound: u64) -> Result<CaseReport, SolveError> {
    verify_case_k_with(k, bound, &SolverConfig::default())
}

fn verify_case_k_with(
    k: usize,
    bound: u64,
    config: &SolverConfig,
) -> Result<CaseReport, SolveError> {
    case_k(k, bound, config).map(|(report, _)| report)
}

fn case_k(
    k: usize,
    bound: u64,
    config: &SolverConfig,
) -> Result<(CaseReport, Option<SolverState>), SolveError> {
    if !(5..=7).contains(&k) {
        return Err(SolveError::UnsupportedK(k));
    }
    let mut report = CaseReport::new(format!("k = {k}"), Some(k));
    for (name, reps) in displayed_k(k) {
        let t: u64 = reps[0].iter().map(|x| x * x).sum();
        for parts in &reps {
            displayed(&mut report, name, t, parts);
        }
        report.coverage.push(name.to_string());
    }
    let Some(mut state) = replay_into(&mut report, k, bound, config) else {
        return Ok((report, None));
    };
    let mut fired = Vec::new();
    let mut failure = None;
    for n in 2..=bound {
        if state.is_pinned(n) {
            continue;
        }
        match state.pin_by_induction(n) {
            Ok(()) => fired.push(n),
            Err(e) => {
                failure = Some(format!("n = {n}: {e}"));
                break;
            }
        }
    }
    report.check(
        "n(n-1) induction",
        failure.is_none(),
        failure.unwrap_or_else(|| match (fired.first(), fired.last()) {
            (Some(a), Some(b)) => format!("pinned {a}..={b}"),
            _ => "nothing left to pin".to_string(),
        }),
    );
    pinned_summary(&mut report, &state, bound);
    Ok((report, Some(state)))
}

/// `(f(2), f(3))` pairs solving `4 + f(2)^2 f(3)^2 = f(2)^2 + 4 f(3)^2`
/// and `5 + 3 f(3)^2 = 8 f(2)^2`, by elimination and exact roots.
pub fn forty_thirty_two_solutions() -> Option<BTreeSet<(Value, Value)>> {
    let (s2, s3) = (Poly::atom(Atom::square(2)), Poly::atom(Atom::square(3)));
    let c = |x: i64| Poly::constant(Value::int(x));
    let forty = c(4)
        .add(&s2.mul(&s3))
        .sub(&s2)
        .sub(&s3.scale(&Value::int(4)));
    let thirty_two = c(5)
        .add(&s3.scale(&Value::int(3)))
        .sub(&s2.scale(&Value::int(8)));
    let s3_expr = thirty_two.solve_linear_for(Atom::square(3))?;
    let reduced = forty.substitute_poly(Atom::square(3), &s3_expr);
    let Roots::Finite(sq2) = roots(&reduced.univariate(Atom::square(2), |_| unreachable!())) else {
        return None;
    };
    let mut out = BTreeSet::new();
    for v2 in sq2 {
        let v3 = s3_expr.substitute(|_| Some(v2.clone())).as_constant()?;
        let (r2, r3) = (v2.sqrt()?, v3.sqrt()?);
        for a in [r2.clone(), -&r2] {
            for b in [r3.clone(), -&r3] {
                out.insert((a.clone(), b));
            }
        }
    }
    Some(out)
}

fn inject_parametric(state: &mut SolverState, upto: u64) -> Result<(), SolveError> {
    let k = state.k();
    for n in 11..=upto {
        let l = (n / 2) as i64;
        let id = if n % 2 == 1 {
            ParametricIdentity::odd_family()
        } else {
            ParametricIdentity::even_family()
        };
        if l < id.threshold {
            continue;
        }
        let (t, _, _) = id.evaluate(l);
        for side in [[t[0], t[1]], [t[2], t[3]]] {
            let mut parts: Vec<u64> = side.iter().map(|&x| x as u64).collect();
            parts.resize(k, 1);
            let target = parts.iter().map(|x| x * x).sum();
            let rep = Representation::from_unordered(target, parts)
                .map_err(|e| SolveError::InvalidConstraint(e.to_string()))?;
            state.add_constraint(Constraint::sum_of_squares(&rep))?;
        }
    }
    state.propagate()
}

/// Checks (a)-(g) for `k >= 8`.
pub fn verify_case_general(k: usize, bound: u64) -> Result<CaseReport, SolveError> {
    verify_case_general_with(k, bound, &SolverConfig::default())
}

fn verify_case_general_with(
    k: usize,
    bound: u64,
    config: &SolverConfig,
) -> Result<CaseReport, SolveError> {
    if k < 8 {
        return Err(SolveError::UnsupportedK(k));
    }
    let kk = k as u64;
    let mut report = CaseReport::new("k >= 8", Some(k));

    equal_targets(
        &mut report,
        "(a) 40",
        k,
        &[&[6, 1, 1, 1, 1], &[3, 3, 3, 3, 2]],
    );
    equal_targets(
        &mut report,
        "(a) 32",
        k,
        &[&[3, 3, 3, 1, 1, 1, 1, 1], &[2; 8]],
    );

    let expected: BTreeSet<(Value, Value)> = [(1, 1), (2, 3)]
        .into_iter()
        .flat_map(|(x, y)| [(x, y), (x, -y), (-x, y), (-x, -y)])
        .map(|(x, y)| (Value::int(x), Value::int(y)))
        .collect();
    let got = forty_thirty_two_solutions();
    report.check(
        "(b) 40/32 system",
        got.as_ref() == Some(&expected),
        match &got {
            Some(s) => {
                let items: Vec<String> = s.iter().map(|(a, b)| format!("({a}, {b})")).collect();
                items.join(", ")
            }
            None => "no exact solution set".to_string(),
        },
    );

    let pair = SemigroupPair::new(3, 8).expect("coprime generators");
    let frob = frobenius_number(pair);
    let first = represent_in_semigroup(2 * kk - 1, pair);
    let split = frobenius_split(k);
    report.check(
        "(c) 2k-1 in <3, 8>",
        first.is_ok() && split.is_some() && 2 * kk - 1 > frob,
        format!(
            "2k-1 = {}, Frobenius number {frob}, (a, b) = {split:?}",
            2 * kk - 1
        ),
    );

    match split {
        Some((a, b)) => {
            let mut parts = vec![kk - 1];
            parts.extend(vec![3; b as usize]);
            parts.extend(vec![2; a as usize]);
            parts.resize(k, 1);
            displayed(&mut report, "(d) k^2+k-1", kk * kk + kk - 1, &parts);
        }
        None => report.check("(d) k^2+k-1", false, "no admissible (a, b)"),
    }

    for (name, l, r) in [
        ("(e) 28", &[4u64, 2, 2, 2][..], &[3u64, 3, 3, 1][..]),
        ("(e) 27", &[5, 1, 1], &[3, 3, 3]),
        ("(e) 50", &[7, 1], &[5, 5]),
        ("(e) 65", &[8, 1], &[7, 4]),
        ("(e) 85", &[9, 2], &[7, 6]),
    ] {
        equal_targets(&mut report, name, k, &[l, r]);
    }
    report.check(
        "(e) 6 = 2*3",
        Constraint::multiplicative(2, 3).is_ok(),
        "coprime split",
    );
    report.check(
        "(e) 10 = 2*5",
        Constraint::multiplicative(2, 5).is_ok(),
        "coprime split",
    );

    for id in [
        ParametricIdentity::odd_family(),
        ParametricIdentity::even_family(),
    ] {
        let sub = check_parametric(&id, 1000);
        for c in sub.checks {
            report.check(format!("(f) {}: {}", id.name, c.name), c.passed, c.detail);
        }
    }

    report.coverage.extend(
        [
            "40",
            "32",
            "k^2+k-1",
            "small table",
            "odd family",
            "even family",
        ]
        .map(String::from),
    );

    let Some(mut state) = replay_into(&mut report, k, bound, config) else {
        return Ok(report);
    };
    if let Err(e) = inject_parametric(&mut state, bound) {
        report.check("(g) parametric constraints", false, e.to_string());
    }
    let mut sub = CaseReport::new("", None);
    complete(&mut sub, &mut state, bound);
    for c in sub.checks {
        report.check(format!("(g) {}", c.name), c.passed, c.detail);
    }
    Ok(report)
}

/// Runs the case verifier for `k` with every argument up to `bound`;
/// passes exactly when every check passes, including `f(n) = n` for all
/// `n <= bound`.
pub fn theorem_check(k: usize, bound: u64, config: SolverConfig) -> Result<CaseReport, SolveError> {
    match k {
        0..=3 => Err(SolveError::UnsupportedK(k)),
        4 => Ok(k4_full(bound, &config)),
        5..=7 => {
            let (mut report, state) = case_k(k, bound, &config)?;
            let Some(mut state) = state else {
                return Ok(report);
            };
            let mut sub = CaseReport::new("", None);
            complete(&mut sub, &mut state, bound);
            for c in sub.checks {
                report.check(
                    format!("generated constraints: {}", c.name),
                    c.passed,
                    c.detail,
                );
            }
            Ok(report)
        }
        _ => verify_case_general_with(k, bound, &config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parametric_examples() {
        let odd = ParametricIdentity::odd_family();
        assert_eq!(odd.evaluate(5), ([11, 3, 9, 7], 130, 130));
        let even = ParametricIdentity::even_family();
        assert_eq!(even.evaluate(6), ([12, 1, 8, 9], 145, 145));
        assert!(!even.holds_at(5));
        assert!(check_parametric(&odd, 1000).all_passed);
        assert!(check_parametric(&even, 1000).all_passed);
    }

    #[test]
    fn forty_thirty_two() {
        let s = forty_thirty_two_solutions().unwrap();
        assert_eq!(s.len(), 8);
        assert!(s.contains(&(Value::int(-2), Value::int(3))));
        assert!(s.contains(&(Value::int(1), Value::int(-1))));
    }

    #[test]
    fn k4_cases() {
        let r = verify_case_k4(3);
        assert!(r.all_passed, "{:?}", r.failed().collect::<Vec<_>>());
        assert_eq!(
            r.coverage,
            ["f(12)", "f(20)", "f(28)", "f(35)", "f(10)", "f(7)", "f(18)"]
        );
        let r = verify_case_k4(0);
        assert!(r.checks.iter().any(|c| c.detail.starts_with("vacuous")));
    }

    #[test]
    fn small_k_cases() {
        let r = verify_case_k(6, 50).unwrap();
        assert!(r.all_passed, "{:?}", r.failed().collect::<Vec<_>>());
        let r = verify_case_k(5, 7).unwrap();
        assert!(r.all_passed);
        assert!(r.checks.iter().any(|c| c.detail == "pinned 7..=7"));
        assert!(verify_case_k(8, 10).is_err());
    }

    #[test]
    fn general_case() {
        let r = verify_case_general(8, 80).unwrap();
        assert!(r.all_passed, "{:?}", r.failed().collect::<Vec<_>>());
        let d = r.checks.iter().find(|c| c.name == "(d) k^2+k-1").unwrap();
        assert_eq!(d.detail, "71 = 7^2+2^2+2^2+2^2+2^2+2^2+1^2+1^2");
    }

    #[test]
    fn unsupported_k() {
        assert_eq!(
            theorem_check(3, 50, SolverConfig::default()),
            Err(SolveError::UnsupportedK(3))
        );
    }
}
