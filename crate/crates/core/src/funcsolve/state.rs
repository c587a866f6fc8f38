//! Candidate-set store and fixed-point propagation.
//!
//! Every constraint becomes a polynomial equation over the unknowns `f(n)`
//! and `f(n)^2`. Propagation alternates two sound steps:
//!
//! * revision: for an equation whose unknowns are all finite except at most
//!   one, keep exactly the values of each unknown that extend to a solution
//!   over the current candidate sets (or, for the single unknown, solve the
//!   resulting univariate equation exactly);
//! * elimination: two small equations sharing their greatest unknown, one of
//!   them linear in it, are combined into an equation without it.
//!
//! A value is only ever removed when no completion inside the current sets
//! satisfies an equation implied by the constraints, so any function
//! satisfying all constraints (the identity in particular) survives.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::constraint::{generate_with, CandidateSet, Constraint};
use super::poly::{evaluate, roots, Atom, AtomKind, Poly, Roots};
use super::value::Value;
use super::SolveError;
use crate::repr::ReprTable;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolverConfig {
    /// Finite sets larger than this are coarsened to `Unknown`.
    pub set_cap: usize,
    /// Representations generated per target.
    pub rep_cap: usize,
    /// Largest cartesian product of other unknowns enumerated per revision.
    pub combo_limit: usize,
    /// Maximum number of equation revisions over the state's lifetime.
    pub budget: u64,
    pub elimination: bool,
    /// Equations entering elimination have at most this many unknowns.
    pub elimination_atoms: usize,
    pub derived_cap: usize,
    /// Equations per leading unknown considered for elimination.
    pub group_cap: usize,
    /// Run the `n(n-1)` induction sweep after propagation.
    pub induction: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            set_cap: 64,
            rep_cap: 16,
            combo_limit: 4096,
            budget: 20_000_000,
            elimination: true,
            elimination_atoms: 3,
            derived_cap: 50_000,
            group_cap: 48,
            induction: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Target of a sum-of-squares constraint narrowed from its parts.
    Forward,
    /// A part of a sum-of-squares constraint narrowed.
    Backward,
    /// Product or quotient over a coprime split.
    Multiplicative,
    /// `f(n)` against `f(n)^2`.
    Square,
    /// Equation obtained by eliminating an unknown between two others.
    Elimination,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub index: usize,
    pub rule: Rule,
    pub equation: String,
    pub atom: String,
    pub n: u64,
    pub squared: bool,
    pub before: CandidateSet,
    pub after: CandidateSet,
}

impl TraceStep {
    /// Does the step keep the identity function's value?
    pub fn keeps_identity(&self) -> bool {
        let atom = Atom {
            n: self.n,
            kind: if self.squared {
                AtomKind::Square
            } else {
                AtomKind::Value
            },
        };
        self.after.contains(&atom.identity_value())
    }
}

#[derive(Debug, Clone)]
enum Origin {
    Constraint(usize),
    Square(u64),
    SquaredSplit(usize),
    Derived,
}

#[derive(Debug, Clone)]
struct Equation {
    poly: Poly,
    origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Unresolved {
    pub n: u64,
    pub candidates: CandidateSet,
    pub squares: CandidateSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolverReport {
    pub k: usize,
    pub bound: u64,
    pub pinned: Vec<u64>,
    pub unresolved: Vec<Unresolved>,
    pub all_pinned: bool,
    pub identity_preserved: bool,
    pub constraints: usize,
    pub equations: usize,
    pub revisions: u64,
    pub induction: Vec<u64>,
    pub trace_len: usize,
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone)]
pub struct SolverState {
    k: usize,
    bound: u64,
    config: SolverConfig,
    domains: BTreeMap<Atom, CandidateSet>,
    constraints: Vec<Constraint>,
    known: HashSet<Constraint>,
    equations: Vec<Equation>,
    watchers: HashMap<Atom, Vec<usize>>,
    linked: HashSet<u64>,
    queue: BTreeSet<usize>,
    // Elimination bookkeeping: reduced forms, their versions and the pairs
    // already combined.
    reduced: Vec<Option<(Poly, u64)>>,
    stale: BTreeSet<usize>,
    combined: HashSet<(usize, u64, usize, u64)>,
    derived_keys: HashSet<Poly>,
    derived: usize,
    trace: Vec<TraceStep>,
    revisions: u64,
    induction: Vec<u64>,
    table: ReprTable,
}

impl SolverState {
    pub fn new(k: usize, bound: u64, config: SolverConfig) -> Self {
        let mut domains = BTreeMap::new();
        domains.insert(Atom::value(1), CandidateSet::singleton(Value::one()));
        domains.insert(Atom::square(1), CandidateSet::singleton(Value::one()));
        Self {
            k,
            bound,
            config,
            domains,
            constraints: Vec::new(),
            known: HashSet::new(),
            equations: Vec::new(),
            watchers: HashMap::new(),
            linked: HashSet::new(),
            queue: BTreeSet::new(),
            reduced: Vec::new(),
            stale: BTreeSet::new(),
            combined: HashSet::new(),
            derived_keys: HashSet::new(),
            derived: 0,
            trace: Vec::new(),
            revisions: 0,
            induction: Vec::new(),
            table: ReprTable::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn trace(&self) -> &[TraceStep] {
        &self.trace
    }

    pub fn revisions(&self) -> u64 {
        self.revisions
    }

    pub fn repr_table(&mut self) -> &mut ReprTable {
        &mut self.table
    }

    pub fn candidates(&self, n: u64) -> CandidateSet {
        self.domain(Atom::value(n)).clone()
    }

    pub fn square_candidates(&self, n: u64) -> CandidateSet {
        self.domain(Atom::square(n)).clone()
    }

    pub fn is_pinned(&self, n: u64) -> bool {
        self.domain(Atom::value(n)).as_singleton() == Some(&Value::from_u64(n))
    }

    /// No step so far has removed the identity's value from any set.
    pub fn identity_preserved(&self) -> bool {
        self.trace.iter().all(TraceStep::keeps_identity)
    }

    /// Intersects the candidates of `f(n)` with `values` as a hypothesis.
    /// The narrowing is not a deduction and is not traced.
    pub fn assume(&mut self, n: u64, values: CandidateSet) -> Result<(), SolveError> {
        let atom = Atom::value(n);
        let next = match (self.domain(atom), values) {
            (CandidateSet::Unknown, v) => v,
            (CandidateSet::Finite(old), CandidateSet::Finite(v)) => {
                CandidateSet::Finite(old.intersection(&v).cloned().collect())
            }
            (old, CandidateSet::Unknown) => old.clone(),
        };
        if next.values().is_some_and(BTreeSet::is_empty) {
            return Err(SolveError::Contradiction {
                n,
                constraint: "assumption".to_string(),
            });
        }
        self.link(n);
        self.domains.insert(atom, next);
        if let Some(ws) = self.watchers.get(&atom) {
            self.queue.extend(ws.iter().copied());
            self.stale.extend(ws.iter().copied());
        }
        Ok(())
    }

    /// Largest `p` such that `f(1)^2, ..., f(p)^2` are all single values.
    pub fn pinned_square_prefix(&self) -> u64 {
        (1..)
            .find(|&x| self.singleton(Atom::square(x)).is_none())
            .map_or(0, |x| x - 1)
    }

    /// Tuples of values for `f(ns[0]), f(ns[1]), ...` drawn from the current
    /// sets that propagation does not refute. `None` if a set is `Unknown`
    /// or the product exceeds the combination limit.
    pub fn joint_candidates(&self, ns: &[u64]) -> Option<BTreeSet<Vec<Value>>> {
        let sets: Vec<Vec<Value>> = ns
            .iter()
            .map(|&n| Some(self.candidates(n).values()?.iter().cloned().collect()))
            .collect::<Option<_>>()?;
        let total = sets
            .iter()
            .try_fold(1usize, |acc, s| acc.checked_mul(s.len()))?;
        if total > self.config.combo_limit {
            return None;
        }
        let mut out = BTreeSet::new();
        for mut idx in 0..total {
            let tuple: Vec<Value> = sets
                .iter()
                .map(|s| {
                    let v = s[idx % s.len()].clone();
                    idx /= s.len();
                    v
                })
                .collect();
            let mut trial = self.clone();
            trial.trace.clear();
            for (&n, v) in ns.iter().zip(&tuple) {
                trial
                    .domains
                    .insert(Atom::value(n), CandidateSet::singleton(v.clone()));
                if let Some(ws) = trial.watchers.get(&Atom::value(n)) {
                    trial.queue.extend(ws.iter().copied());
                    trial.stale.extend(ws.iter().copied());
                }
            }
            trial.config.budget = u64::MAX;
            if trial.propagate().is_ok() {
                out.insert(tuple);
            }
        }
        Some(out)
    }

    fn domain(&self, atom: Atom) -> &CandidateSet {
        self.domains.get(&atom).unwrap_or(&CandidateSet::Unknown)
    }

    fn singleton(&self, atom: Atom) -> Option<&Value> {
        self.domains.get(&atom).and_then(CandidateSet::as_singleton)
    }

    fn is_finite(&self, atom: Atom) -> bool {
        matches!(self.domains.get(&atom), Some(CandidateSet::Finite(_)))
    }

    /// Adds a constraint (ignoring duplicates) and queues its equations.
    pub fn add_constraint(&mut self, c: Constraint) -> Result<bool, SolveError> {
        c.validate(self.k)?;
        if !self.known.insert(c.clone()) {
            return Ok(false);
        }
        let idx = self.constraints.len();
        for n in c.arguments() {
            self.link(n);
        }
        self.push_equation(c.polynomial(), Origin::Constraint(idx));
        if let Some(sq) = c.squared_polynomial() {
            self.push_equation(sq, Origin::SquaredSplit(idx));
        }
        self.constraints.push(c);
        Ok(true)
    }

    pub fn add_constraints<I>(&mut self, cs: I) -> Result<usize, SolveError>
    where
        I: IntoIterator<Item = Constraint>,
    {
        let mut added = 0;
        for c in cs {
            added += usize::from(self.add_constraint(c)?);
        }
        Ok(added)
    }

    /// Adds the generated constraint family for every target up to `bound`.
    pub fn add_generated(&mut self) -> Result<usize, SolveError> {
        let cs = generate_with(&mut self.table, self.k, self.bound, self.config.rep_cap);
        self.add_constraints(cs)
    }

    fn link(&mut self, n: u64) {
        if n == 1 || !self.linked.insert(n) {
            return;
        }
        let poly = Poly::atom(Atom::square(n)).sub(&Poly::atom(Atom::value(n)).pow(2));
        self.push_equation(poly, Origin::Square(n));
    }

    fn push_equation(&mut self, poly: Poly, origin: Origin) -> usize {
        let id = self.equations.len();
        for atom in poly.atoms() {
            self.watchers.entry(atom).or_default().push(id);
        }
        self.equations.push(Equation { poly, origin });
        self.reduced.push(None);
        self.stale.insert(id);
        self.queue.insert(id);
        id
    }

    fn label(&self, id: usize) -> String {
        let eq = &self.equations[id];
        match eq.origin {
            Origin::Constraint(c) => self.constraints[c].to_string(),
            Origin::Square(n) => format!("f({n})^2 = f({n})*f({n})"),
            Origin::SquaredSplit(c) => match &self.constraints[c] {
                Constraint::Multiplicative { n, m, l } => {
                    format!("f({n})^2 = f({m})^2 f({l})^2")
                }
                other => other.to_string(),
            },
            Origin::Derived => format!("{} = 0", eq.poly),
        }
    }

    fn rule(&self, id: usize, atom: Atom) -> Rule {
        match self.equations[id].origin {
            Origin::Constraint(c) => match &self.constraints[c] {
                Constraint::SumOfSquares { target, .. } if atom == Atom::value(*target) => {
                    Rule::Forward
                }
                Constraint::SumOfSquares { .. } => Rule::Backward,
                Constraint::Multiplicative { .. } => Rule::Multiplicative,
            },
            Origin::SquaredSplit(_) => Rule::Multiplicative,
            Origin::Square(_) => Rule::Square,
            Origin::Derived => Rule::Elimination,
        }
    }

    /// Runs revision and elimination until neither changes anything.
    pub fn propagate(&mut self) -> Result<(), SolveError> {
        loop {
            while let Some(id) = self.queue.pop_first() {
                self.revisions += 1;
                if self.revisions > self.config.budget {
                    return Err(SolveError::BudgetExceeded {
                        revisions: self.revisions,
                        partial: Box::new(self.report()),
                    });
                }
                self.revise(id)?;
            }
            if !self.config.elimination || !self.eliminate()? {
                return Ok(());
            }
        }
    }

    fn reduce(&self, poly: &Poly) -> Poly {
        poly.substitute(|a| self.singleton(a).cloned())
    }

    fn revise(&mut self, id: usize) -> Result<(), SolveError> {
        let reduced = self.reduce(&self.equations[id].poly);
        let atoms: Vec<Atom> = reduced.atoms().into_iter().collect();
        if atoms.is_empty() {
            if reduced.is_zero() {
                return Ok(());
            }
            return Err(SolveError::Contradiction {
                n: self.equations[id].poly.leading_atom().map_or(0, |a| a.n),
                constraint: self.label(id),
            });
        }
        let unknown: Vec<Atom> = atoms
            .iter()
            .copied()
            .filter(|&a| !self.is_finite(a))
            .collect();
        let targets = match unknown.len() {
            0 => atoms.clone(),
            1 => unknown,
            _ => return Ok(()),
        };
        for target in targets {
            if let Some(next) = self.narrow(&reduced, &atoms, target) {
                self.update(target, next, id)?;
            }
        }
        Ok(())
    }

    /// The values of `target` that extend to a solution of `reduced = 0`
    /// over the current sets of the other unknowns; `None` when no sound
    /// finite answer is available.
    fn narrow(&self, reduced: &Poly, atoms: &[Atom], target: Atom) -> Option<CandidateSet> {
        let others: Vec<(Atom, Vec<&Value>)> = atoms
            .iter()
            .filter(|&&a| a != target)
            .map(|&a| (a, self.domain(a).values().map(|s| s.iter().collect())))
            .map(|(a, vals)| vals.map(|v| (a, v)))
            .collect::<Option<_>>()?;
        let mut combos = 1usize;
        for (_, vals) in &others {
            combos = combos.checked_mul(vals.len())?;
        }
        if combos > self.config.combo_limit {
            return None;
        }
        let assignment = |mut idx: usize| -> Vec<&Value> {
            others
                .iter()
                .map(|(_, vals)| {
                    let v = vals[idx % vals.len()];
                    idx /= vals.len();
                    v
                })
                .collect()
        };
        let coefficients = |idx: usize| -> Vec<Value> {
            let chosen = assignment(idx);
            reduced.univariate(target, |a| {
                let i = others.iter().position(|(o, _)| *o == a).expect("assigned");
                chosen[i]
            })
        };
        match self.domain(target) {
            CandidateSet::Finite(vals) => {
                let mut supported = BTreeSet::new();
                for idx in 0..combos {
                    let coeffs = coefficients(idx);
                    for v in vals {
                        if !supported.contains(v) && evaluate(&coeffs, v).is_zero() {
                            supported.insert(v.clone());
                        }
                    }
                    if supported.len() == vals.len() {
                        break;
                    }
                }
                Some(CandidateSet::Finite(supported))
            }
            CandidateSet::Unknown => {
                let mut found = BTreeSet::new();
                for idx in 0..combos {
                    match roots(&coefficients(idx)) {
                        Roots::Finite(rs) => found.extend(rs),
                        Roots::Any | Roots::Inexact => return None,
                    }
                    if found.len() > self.config.set_cap {
                        return None;
                    }
                }
                Some(CandidateSet::Finite(found))
            }
        }
    }

    fn update(&mut self, atom: Atom, next: CandidateSet, id: usize) -> Result<(), SolveError> {
        let before = self.domain(atom).clone();
        if let CandidateSet::Finite(s) = &next {
            if s.is_empty() {
                return Err(SolveError::Contradiction {
                    n: atom.n,
                    constraint: self.label(id),
                });
            }
            if s.len() > self.config.set_cap {
                return Ok(());
            }
        }
        if next == before || !next.is_subset_of(&before) {
            return Ok(());
        }
        let step = TraceStep {
            index: self.trace.len(),
            rule: self.rule(id, atom),
            equation: self.label(id),
            atom: atom.to_string(),
            n: atom.n,
            squared: atom.kind == AtomKind::Square,
            before,
            after: next.clone(),
        };
        self.trace.push(step);
        self.domains.insert(atom, next);
        if let Some(ws) = self.watchers.get(&atom) {
            self.queue.extend(ws.iter().copied());
            self.stale.extend(ws.iter().copied());
        }
        Ok(())
    }

    /// One elimination pass; returns whether a new equation was derived.
    fn eliminate(&mut self) -> Result<bool, SolveError> {
        let stale = std::mem::take(&mut self.stale);
        for id in stale {
            let reduced = self.reduce(&self.equations[id].poly);
            let version = match &self.reduced[id] {
                Some((old, _)) if *old == reduced => continue,
                Some((_, v)) => v + 1,
                None => 0,
            };
            self.reduced[id] = Some((reduced, version));
        }
        let limit = self.config.elimination_atoms;
        let mut groups: BTreeMap<Atom, Vec<usize>> = BTreeMap::new();
        for (id, slot) in self.reduced.iter().enumerate() {
            let Some((poly, _)) = slot else { continue };
            let atoms = poly.atoms();
            if atoms.len() < 2 || atoms.len() > limit {
                continue;
            }
            let lead = *atoms.iter().next_back().expect("non-empty");
            let members = groups.entry(lead).or_default();
            if members.len() < self.config.group_cap {
                members.push(id);
            }
        }
        let mut added = false;
        for (lead, members) in groups {
            for (x, &i) in members.iter().enumerate() {
                for &j in &members[x + 1..] {
                    if self.derived >= self.config.derived_cap {
                        return Ok(added);
                    }
                    let (pi, vi) = self.reduced[i].clone().expect("grouped");
                    let (pj, vj) = self.reduced[j].clone().expect("grouped");
                    if !self.combined.insert((i, vi, j, vj)) {
                        continue;
                    }
                    let derived = if let Some(expr) = pi.solve_linear_for(lead) {
                        pj.substitute_poly(lead, &expr)
                    } else if let Some(expr) = pj.solve_linear_for(lead) {
                        pi.substitute_poly(lead, &expr)
                    } else {
                        continue;
                    };
                    if derived.is_zero() {
                        continue;
                    }
                    let atoms = derived.atoms();
                    if atoms.is_empty() {
                        return Err(SolveError::Contradiction {
                            n: lead.n,
                            constraint: format!("{} = 0", derived),
                        });
                    }
                    if atoms.len() > limit {
                        continue;
                    }
                    let key = derived.monic();
                    if !self.derived_keys.insert(key.clone()) {
                        continue;
                    }
                    self.derived += 1;
                    self.push_equation(key, Origin::Derived);
                    added = true;
                }
            }
        }
        Ok(added)
    }

    /// Pins `f(n)` from `f(n(n-1)) = f(n-1) f(n)`, using one representation
    /// of `n(n-1)` with every part below `n`.
    pub fn pin_by_induction(&mut self, n: u64) -> Result<(), SolveError> {
        let target = n.saturating_mul(n.saturating_sub(1));
        if n < 3 {
            return Err(SolveError::NoSmallRepresentation { n, target });
        }
        let rep = self
            .table
            .enumerate_bounded(target, self.k, n - 1, 1)
            .representations
            .into_iter()
            .next()
            .ok_or(SolveError::NoSmallRepresentation { n, target })?;
        self.add_constraint(Constraint::sum_of_squares(&rep))?;
        self.add_constraint(Constraint::multiplicative(n - 1, n)?)?;
        self.propagate()?;
        if self.is_pinned(n) {
            self.induction.push(n);
            Ok(())
        } else {
            Err(SolveError::InductionFailed { n })
        }
    }

    /// Walks `n = 3..=upto`; each unpinned `n` whose predecessors are all
    /// pinned goes through [`SolverState::pin_by_induction`]. Returns the
    /// arguments pinned this way.
    pub fn induction_sweep(&mut self, upto: u64) -> Result<Vec<u64>, SolveError> {
        let mut pinned = Vec::new();
        let mut prefix_pinned = self.is_pinned(2);
        for n in 3..=upto {
            if !prefix_pinned {
                break;
            }
            if !self.is_pinned(n) {
                match self.pin_by_induction(n) {
                    Ok(()) => pinned.push(n),
                    Err(
                        SolveError::NoSmallRepresentation { .. }
                        | SolveError::InductionFailed { .. },
                    ) => {}
                    Err(e) => return Err(e),
                }
            }
            prefix_pinned = self.is_pinned(n);
        }
        Ok(pinned)
    }

    pub fn report(&self) -> SolverReport {
        let mut pinned = Vec::new();
        let mut unresolved = Vec::new();
        for n in 1..=self.bound {
            if self.is_pinned(n) {
                pinned.push(n);
            } else {
                unresolved.push(Unresolved {
                    n,
                    candidates: self.candidates(n),
                    squares: self.square_candidates(n),
                });
            }
        }
        SolverReport {
            k: self.k,
            bound: self.bound,
            all_pinned: unresolved.is_empty(),
            pinned,
            unresolved,
            identity_preserved: self.identity_preserved(),
            constraints: self.constraints.len(),
            equations: self.equations.len(),
            revisions: self.revisions,
            induction: self.induction.clone(),
            trace_len: self.trace.len(),
            steps: self.trace.clone(),
        }
    }
}

/// Seeds `f(1) = 1`, adds the generated constraints up to `bound`, propagates
/// and (when enabled) runs the induction sweep.
pub fn solve(k: usize, bound: u64, config: SolverConfig) -> Result<SolverReport, SolveError> {
    let mut state = solve_state(k, bound, config)?;
    state.propagate()?;
    Ok(state.report())
}

pub fn solve_state(k: usize, bound: u64, config: SolverConfig) -> Result<SolverState, SolveError> {
    if k < 2 {
        return Err(SolveError::UnsupportedK(k));
    }
    let induction = config.induction;
    let mut state = SolverState::new(k, bound, config);
    state.add_generated()?;
    state.propagate()?;
    if induction {
        state.induction_sweep(bound)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> CandidateSet {
        CandidateSet::of(xs.iter().map(|&x| Value::int(x)))
    }

    fn state_to(k: usize, bound: u64) -> SolverState {
        let config = SolverConfig {
            induction: false,
            ..SolverConfig::default()
        };
        let mut s = SolverState::new(k, bound, config);
        s.add_generated().unwrap();
        s.propagate().unwrap();
        s
    }

    #[test]
    fn k4_to_twelve_gives_one_or_three() {
        let s = state_to(4, 12);
        assert_eq!(s.candidates(3), ints(&[1, 3]));
        assert_eq!(s.candidates(4), ints(&[4]));
        assert!(s.identity_preserved());
    }

    #[test]
    fn k5_to_twenty_gives_one_or_four() {
        let s = state_to(5, 20);
        assert_eq!(s.candidates(4), ints(&[1, 4]));
    }

    #[test]
    fn k4_to_thirty_five_pins_three_five_seven() {
        let s = state_to(4, 35);
        assert_eq!(s.candidates(3), ints(&[3]));
        assert_eq!(s.candidates(5), ints(&[5]));
        assert_eq!(s.candidates(7), ints(&[7]));
    }

    #[test]
    fn quadratic_step_matches_closed_form() {
        let mut s = SolverState::new(4, 12, SolverConfig::default());
        s.add_constraint(Constraint::SumOfSquares {
            target: 4,
            parts: vec![1, 1, 1, 1],
        })
        .unwrap();
        s.add_constraint(Constraint::multiplicative(3, 4).unwrap())
            .unwrap();
        s.add_constraint(Constraint::SumOfSquares {
            target: 12,
            parts: vec![3, 1, 1, 1],
        })
        .unwrap();
        s.propagate().unwrap();
        assert_eq!(s.candidates(3), ints(&[1, 3]));
        assert_eq!(s.candidates(12), ints(&[4, 12]));
        assert!(s.trace().iter().any(|t| t.rule == Rule::Elimination));
    }

    #[test]
    fn sign_resolution_from_multiplicativity() {
        // f(2) in {±2}, f(11) = 11, f(22) = 22  =>  f(2) = 2.
        let mut s = SolverState::new(5, 30, SolverConfig::default());
        s.domains.insert(Atom::value(2), ints(&[-2, 2]));
        s.domains.insert(Atom::value(11), ints(&[11]));
        s.domains.insert(Atom::value(22), ints(&[22]));
        s.add_constraint(Constraint::multiplicative(2, 11).unwrap())
            .unwrap();
        s.propagate().unwrap();
        assert_eq!(s.candidates(2), ints(&[2]));
        assert!(s
            .trace()
            .iter()
            .any(|t| t.rule == Rule::Multiplicative && t.atom == "f(2)"));
    }

    #[test]
    fn division_by_zero_never_prunes() {
        let mut s = SolverState::new(4, 30, SolverConfig::default());
        s.domains.insert(Atom::value(2), ints(&[0, 2]));
        s.domains.insert(Atom::value(14), ints(&[0]));
        s.add_constraint(Constraint::multiplicative(2, 7).unwrap())
            .unwrap();
        s.propagate().unwrap();
        // f(2) = 0 leaves f(7) free, so f(7) stays unknown and both values of
        // f(2) survive.
        assert_eq!(s.candidates(7), CandidateSet::Unknown);
        assert_eq!(s.candidates(2), ints(&[0, 2]));
    }

    #[test]
    fn contradiction_is_reported() {
        let mut s = SolverState::new(4, 12, SolverConfig::default());
        s.domains.insert(Atom::value(3), ints(&[2]));
        s.add_constraint(Constraint::SumOfSquares {
            target: 4,
            parts: vec![1, 1, 1, 1],
        })
        .unwrap();
        s.add_constraint(Constraint::multiplicative(3, 4).unwrap())
            .unwrap();
        s.add_constraint(Constraint::SumOfSquares {
            target: 12,
            parts: vec![3, 1, 1, 1],
        })
        .unwrap();
        assert!(matches!(
            s.propagate(),
            Err(SolveError::Contradiction { .. })
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let config = SolverConfig {
            budget: 10,
            ..SolverConfig::default()
        };
        let err = solve(4, 40, config).unwrap_err();
        assert!(matches!(err, SolveError::BudgetExceeded { .. }));
    }

    #[test]
    fn induction_examples() {
        let mut s = state_to(5, 6);
        for n in 2..=6 {
            s.domains.insert(Atom::value(n), ints(&[n as i64]));
            s.domains.insert(Atom::square(n), ints(&[(n * n) as i64]));
        }
        s.pin_by_induction(7).unwrap();
        assert!(s.is_pinned(7));
        assert!(s.constraints().contains(&Constraint::SumOfSquares {
            target: 42,
            parts: vec![4, 3, 3, 2, 2]
        }));
        assert!(s
            .constraints()
            .contains(&Constraint::Multiplicative { n: 42, m: 6, l: 7 }));
        assert_eq!(
            s.pin_by_induction(3),
            Err(SolveError::NoSmallRepresentation { n: 3, target: 6 })
        );
    }

    #[test]
    fn induction_k6_pins_eight() {
        let mut s = SolverState::new(6, 8, SolverConfig::default());
        for n in 2..=7 {
            s.domains.insert(Atom::value(n), ints(&[n as i64]));
            s.domains.insert(Atom::square(n), ints(&[(n * n) as i64]));
        }
        s.pin_by_induction(8).unwrap();
        assert!(s.is_pinned(8));
        let sos = s
            .constraints()
            .iter()
            .find(|c| c.target() == 56 && matches!(c, Constraint::SumOfSquares { .. }))
            .unwrap();
        let Constraint::SumOfSquares { parts, .. } = sos else {
            unreachable!()
        };
        assert!(parts.iter().all(|&x| x < 8));
    }
}
