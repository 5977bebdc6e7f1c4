//! Exhaustive check that the JML relation of every translated event is
//! contained in the relation of its source event, and likewise for the
//! initial states.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::eventb::Machine;
use crate::jml::{AssignableClause, JmlExpr, JmlMethodSpec, JmlPredicate, MethodKind};
use crate::semantics::{
    enumerate_states, format_state, jml_invariant_states, machine_vars, EbModel, EbStep,
    JmlModel, SemanticsError, State, Stutter, Universe,
};
use crate::translate::{guard_name, run_name, translate_machine, TranslateError, TranslationUnit};

pub const DEFAULT_WITNESSES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "RESOURCE_LIMIT")]
    ResourceLimit,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ResourceLimit => "RESOURCE_LIMIT",
        })
    }
}

/// A pair in the JML relation that the Event-B relation lacks. For the
/// initialisation `pre` is absent and `post` is an initial state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub event: String,
    pub pre: Option<State>,
    pub post: State,
    pub jml_side: String,
    pub eb_side: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pre {
            Some(pre) => write!(f, "pre {} post {}", format_state(pre), format_state(&self.post))?,
            None => write!(f, "initial state {}", format_state(&self.post))?,
        }
        write!(f, "\n      jml: {}\n      event-b: {}", self.jml_side, self.eb_side)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    /// Candidate pairs (or states, for the initialisation) examined.
    pub checked_pairs: u64,
    /// Size of the JML relation (or initial-state set).
    pub jml_pairs: u64,
    pub witnesses: Vec<Counterexample>,
    /// Whether the Event-B relation restricted to invariant states equals
    /// the JML relation. Informational only.
    pub bisimulation: Option<bool>,
    /// Status when the stuttering branch also requires the invariant.
    pub stutter_variant: Option<Status>,
    pub message: Option<String>,
}

impl Verdict {
    fn resource(err: SemanticsError) -> Verdict {
        Verdict {
            status: Status::ResourceLimit,
            checked_pairs: 0,
            jml_pairs: 0,
            witnesses: vec![],
            bisimulation: None,
            stutter_variant: None,
            message: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventVerdict {
    pub event: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub machine: String,
    pub status: Status,
    pub universe: Universe,
    pub init: Verdict,
    pub events: Vec<EventVerdict>,
    pub elapsed_ms: u128,
    pub sensitivity: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub witnesses: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            witnesses: DEFAULT_WITNESSES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Ceiling overruns become a RESOURCE_LIMIT verdict; other semantic errors
/// abort the check.
fn limited(err: SemanticsError) -> Result<Verdict, CheckError> {
    match err {
        SemanticsError::Resource { .. } => Ok(Verdict::resource(err)),
        other => Err(CheckError::Semantics(other)),
    }
}

fn overall(statuses: impl IntoIterator<Item = Status>) -> Status {
    statuses.into_iter().fold(Status::Pass, |acc, s| match (acc, s) {
        (Status::ResourceLimit, _) | (_, Status::ResourceLimit) => Status::ResourceLimit,
        (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
        _ => Status::Pass,
    })
}

fn var_names(m: &Machine) -> Vec<crate::eventb::Ident> {
    m.variables.iter().map(|v| v.name.clone()).collect()
}

fn run_method<'c>(unit: &'c TranslationUnit, event: &str) -> Result<&'c JmlMethodSpec, CheckError> {
    unit.result
        .method(&run_name(event))
        .ok_or_else(|| CheckError::UnknownEvent(event.to_string()))
}

fn describe_jml(jm: &JmlModel, run: &JmlMethodSpec, event: &str, a: &State) -> String {
    let guard = jm.guard_holds(&guard_name(event), a).unwrap_or(false);
    let case = if jm.requires(&run.normal, a) {
        Some(("the guard-true case", &run.normal))
    } else {
        run.exceptional
            .as_ref()
            .filter(|c| jm.requires(c, a))
            .map(|c| ("the guard-false case", c))
    };
    let assignable = |c: &AssignableClause| match c {
        AssignableClause::Nothing => "\\nothing".to_string(),
        AssignableClause::Everything => "\\everything".to_string(),
        AssignableClause::Vars(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
    };
    match case {
        Some((name, c)) => format!(
            "invariant holds at both states; {}() is {guard}; {name} applies and its ensures and frame (assignable {}) hold",
            guard_name(event),
            assignable(&c.assignable)
        ),
        None => format!(
            "invariant holds at both states; {}() is {guard}; no specification case applies",
            guard_name(event)
        ),
    }
}

fn describe_eb(ebm: &EbModel, e: &crate::eventb::Event, a: &State, b: &State) -> String {
    match ebm.step(e, a) {
        Err(err) => format!("evaluation failed: {err}"),
        Ok(EbStep::Stutter) => format!(
            "no parameter valuation enables {}, so only the stuttering pair (pre, pre) is allowed",
            e.name
        ),
        Ok(EbStep::Fire(posts)) => {
            if !ebm.inv_holds(a) {
                "the event is enabled but the invariant fails at pre, so no transition is allowed".into()
            } else if !ebm.inv_holds(b) {
                "the invariant fails at post".into()
            } else {
                let n = ebm.enabling(e, a).map(|v| v.len()).unwrap_or(0);
                format!(
                    "enabled by {n} parameter valuation(s); post is not among the {} allowed post-state(s)",
                    posts.len()
                )
            }
        }
    }
}

/// Checks event `event` of a (possibly mutated) translation.
pub fn check_event_with(
    unit: &TranslationUnit,
    event: &str,
    u: &Universe,
    opts: CheckOptions,
) -> Result<Verdict, CheckError> {
    let m = &unit.source;
    let e = m
        .event(event)
        .ok_or_else(|| CheckError::UnknownEvent(event.to_string()))?;
    let run = run_method(unit, event)?;
    let ebm = match EbModel::new(m, u) {
        Ok(x) => x,
        Err(err) => return limited(err),
    };
    let jm = JmlModel::new(&unit.result, var_names(m), u);
    let inv_states = match jml_invariant_states(m, &unit.result, u) {
        Ok(s) => s,
        Err(err) => return limited(err),
    };
    let n = inv_states.len() as u128;
    if let Err(err) = u.ensure_within("state pairs", n * n) {
        return limited(err);
    }

    let jml_pairs = jm.method_pairs(run, &inv_states);
    let steps: Vec<Result<EbStep, SemanticsError>> =
        inv_states.par_iter().map(|a| ebm.step(e, a)).collect();
    let mut eb_steps = Vec::with_capacity(steps.len());
    for s in steps {
        match s {
            Ok(s) => eb_steps.push(s),
            Err(err) => return limited(err),
        }
    }
    let inv_at: Vec<bool> = inv_states.par_iter().map(|a| ebm.inv_holds(a)).collect();
    let allowed = |i: usize, j: usize, stutter: Stutter| match &eb_steps[i] {
        EbStep::Stutter => i == j && (stutter == Stutter::Literal || inv_at[i]),
        EbStep::Fire(posts) => posts.contains(&inv_states[j]),
    };

    let failing: Vec<(usize, usize)> = jml_pairs
        .iter()
        .copied()
        .filter(|&(i, j)| !allowed(i, j, Stutter::Literal))
        .collect();
    let variant_fails = jml_pairs
        .iter()
        .any(|&(i, j)| !allowed(i, j, Stutter::WithInvariant));

    let index: HashMap<&State, usize> = inv_states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut eb_restricted: HashSet<(usize, usize)> = HashSet::new();
    for (i, step) in eb_steps.iter().enumerate() {
        match step {
            EbStep::Stutter => {
                eb_restricted.insert((i, i));
            }
            EbStep::Fire(posts) => {
                eb_restricted.extend(posts.iter().filter_map(|b| index.get(b).map(|&j| (i, j))));
            }
        }
    }
    let jml_set: HashSet<(usize, usize)> = jml_pairs.iter().copied().collect();

    let witnesses = failing
        .iter()
        .take(opts.witnesses.max(1))
        .map(|&(i, j)| {
            let (a, b) = (&inv_states[i], &inv_states[j]);
            Counterexample {
                event: event.to_string(),
                pre: Some(a.clone()),
                post: b.clone(),
                jml_side: describe_jml(&jm, run, event, a),
                eb_side: describe_eb(&ebm, e, a, b),
            }
        })
        .collect();
    let status = if failing.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(Verdict {
        status,
        checked_pairs: (n * n) as u64,
        jml_pairs: jml_pairs.len() as u64,
        witnesses,
        bisimulation: Some(jml_set == eb_restricted),
        stutter_variant: Some(if variant_fails {
            Status::Fail
        } else {
            Status::Pass
        }),
        message: None,
    })
}

/// Checks the `initially` clause of a translation against the source
/// initialisation.
pub fn check_init_with(
    unit: &TranslationUnit,
    u: &Universe,
    opts: CheckOptions,
) -> Result<Verdict, CheckError> {
    let m = &unit.source;
    let ebm = match EbModel::new(m, u) {
        Ok(x) => x,
        Err(err) => return limited(err),
    };
    let jm = JmlModel::new(&unit.result, var_names(m), u);
    let states = match machine_vars(m).and_then(|v| enumerate_states(&v, u)) {
        Ok(s) => s,
        Err(err) => return limited(err),
    };
    let eb_init = match ebm.init_states() {
        Ok(s) => s,
        Err(err) => return limited(err),
    };
    let jml_init: BTreeSet<State> = states
        .par_iter()
        .filter(|s| jm.initially_holds(s))
        .cloned()
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let failing: Vec<&State> = jml_init.iter().filter(|s| !eb_init.contains(*s)).collect();
    let witnesses = failing
        .iter()
        .take(opts.witnesses.max(1))
        .map(|b| Counterexample {
            event: "initialisation".into(),
            pre: None,
            post: (*b).clone(),
            jml_side: "initially and the invariant hold".into(),
            eb_side: if ebm.inv_holds(b) {
                format!(
                    "not produced by the initialisation actions ({} initial state(s) allowed)",
                    eb_init.len()
                )
            } else {
                "the invariant fails".into()
            },
        })
        .collect();
    Ok(Verdict {
        status: if failing.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        },
        checked_pairs: states.len() as u64,
        jml_pairs: jml_init.len() as u64,
        witnesses,
        bisimulation: Some(jml_init == eb_init),
        stutter_variant: None,
        message: None,
    })
}

pub fn check_event(
    e: &str,
    m: &Machine,
    u: &Universe,
    opts: CheckOptions,
) -> Result<Verdict, CheckError> {
    check_event_with(&translate_machine(m)?, e, u, opts)
}

pub fn check_init(m: &Machine, u: &Universe, opts: CheckOptions) -> Result<Verdict, CheckError> {
    check_init_with(&translate_machine(m)?, u, opts)
}

/// Checks the initialisation and every event of a translation.
pub fn check_unit(
    unit: &TranslationUnit,
    u: &Universe,
    opts: CheckOptions,
) -> Result<Report, CheckError> {
    let start = Instant::now();
    let init = check_init_with(unit, u, opts)?;
    let events = unit
        .source
        .events
        .iter()
        .map(|e| {
            let name = e.name.name.clone();
            Ok(EventVerdict {
                verdict: check_event_with(unit, &name, u, opts)?,
                event: name,
            })
        })
        .collect::<Result<Vec<_>, CheckError>>()?;
    let status = overall(
        std::iter::once(init.status).chain(events.iter().map(|e| e.verdict.status)),
    );
    let changed: Vec<&str> = events
        .iter()
        .filter(|e| e.verdict.stutter_variant.is_some_and(|s| s != e.verdict.status))
        .map(|e| e.event.as_str())
        .collect();
    let sensitivity = if events.iter().all(|e| e.verdict.stutter_variant.is_none()) {
        "not evaluated".to_string()
    } else if changed.is_empty() {
        "requiring the invariant in the stuttering branch changes no verdict".to_string()
    } else {
        format!(
            "requiring the invariant in the stuttering branch changes the verdict of: {}",
            changed.join(", ")
        )
    };
    Ok(Report {
        machine: unit.source.name.name.clone(),
        status,
        universe: u.clone(),
        init,
        events,
        elapsed_ms: start.elapsed().as_millis(),
        sensitivity,
    })
}

pub fn check_machine(m: &Machine, u: &Universe, opts: CheckOptions) -> Result<Report, CheckError> {
    check_unit(&translate_machine(m)?, u, opts)
}

/// Re-evaluates a witness: membership in the JML relation and in the
/// Event-B relation (or initial-state sets).
pub fn replay(
    unit: &TranslationUnit,
    u: &Universe,
    cx: &Counterexample,
) -> Result<(bool, bool), CheckError> {
    let m = &unit.source;
    let ebm = EbModel::new(m, u)?;
    let jm = JmlModel::new(&unit.result, var_names(m), u);
    match &cx.pre {
        None => Ok((
            jm.initially_holds(&cx.post),
            ebm.init_states()?.contains(&cx.post),
        )),
        Some(a) => {
            let e = m
                .event(&cx.event)
                .ok_or_else(|| CheckError::UnknownEvent(cx.event.clone()))?;
            let run = run_method(unit, &cx.event)?;
            let b = &cx.post;
            let jml = jm.inv_holds(a) && jm.inv_holds(b) && jm.method_allows(run, a, b);
            Ok((jml, ebm.allows(e, a, b, Stutter::Literal)?))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    /// Remove every `\old` from the guard-true ensures clause.
    DropOld,
    /// Replace the guard-true ensures clause by `true`.
    WidenEnsuresTrue,
    /// Make the guard-true case assign nothing.
    ShrinkAssignable,
    /// Swap the requires clauses of the two cases.
    NegateGuardLink,
}

impl MutationKind {
    pub const ALL: [MutationKind; 4] = [
        MutationKind::DropOld,
        MutationKind::WidenEnsuresTrue,
        MutationKind::ShrinkAssignable,
        MutationKind::NegateGuardLink,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MutationKind::DropOld => "drop_old",
            MutationKind::WidenEnsuresTrue => "widen_ensures_true",
            MutationKind::ShrinkAssignable => "shrink_assignable",
            MutationKind::NegateGuardLink => "negate_guard_link",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutation {
    pub kind: MutationKind,
    /// Event to mutate; every event when absent.
    pub event: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MutationError {
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("{mutation} is not applicable: {reason}")]
    Inapplicable {
        mutation: &'static str,
        reason: String,
    },
}

fn strip_old_expr(e: &JmlExpr) -> JmlExpr {
    match e {
        JmlExpr::Old(inner) => strip_old_expr(inner),
        JmlExpr::Int(_) | JmlExpr::Var(_) | JmlExpr::Integers | JmlExpr::Naturals => e.clone(),
        JmlExpr::NewSet { set_type, items } => JmlExpr::NewSet {
            set_type: set_type.clone(),
            items: items.iter().map(strip_old_expr).collect(),
        },
        JmlExpr::NewPair {
            left_type,
            right_type,
            left,
            right,
        } => JmlExpr::NewPair {
            left_type: left_type.clone(),
            right_type: right_type.clone(),
            left: Box::new(strip_old_expr(left)),
            right: Box::new(strip_old_expr(right)),
        },
        JmlExpr::Call {
            receiver,
            method,
            args,
        } => JmlExpr::Call {
            receiver: Box::new(strip_old_expr(receiver)),
            method: *method,
            args: args.iter().map(strip_old_expr).collect(),
        },
        JmlExpr::Cross(a, b) => {
            JmlExpr::Cross(Box::new(strip_old_expr(a)), Box::new(strip_old_expr(b)))
        }
        JmlExpr::Arith(op, a, b) => {
            JmlExpr::Arith(*op, Box::new(strip_old_expr(a)), Box::new(strip_old_expr(b)))
        }
    }
}

/// `p` with every `\old` wrapper removed.
pub fn strip_old(p: &JmlPredicate) -> JmlPredicate {
    use JmlPredicate as P;
    let b = |x: &JmlPredicate| Box::new(strip_old(x));
    match p {
        P::Old(inner) => strip_old(inner),
        P::True | P::False | P::Becomes { .. } | P::GuardCall(_) => p.clone(),
        P::And(x, y) => P::And(b(x), b(y)),
        P::Or(x, y) => P::Or(b(x), b(y)),
        P::Not(x) => P::Not(b(x)),
        P::Group(x) => P::Group(b(x)),
        P::ResultIff(x) => P::ResultIff(b(x)),
        P::Exists { var, ty, body } => P::Exists {
            var: var.clone(),
            ty: ty.clone(),
            body: b(body),
        },
        P::Eq(x, y, s) => P::Eq(strip_old_expr(x), strip_old_expr(y), *s),
        P::Has { set, elem } => P::Has {
            set: strip_old_expr(set),
            elem: strip_old_expr(elem),
        },
        P::IsSubset(x, y) => P::IsSubset(strip_old_expr(x), strip_old_expr(y)),
        P::Lt(x, y) => P::Lt(strip_old_expr(x), strip_old_expr(y)),
        P::Le(x, y) => P::Le(strip_old_expr(x), strip_old_expr(y)),
        P::IsEmpty(x) => P::IsEmpty(strip_old_expr(x)),
        P::IsaFunction(x) => P::IsaFunction(strip_old_expr(x)),
    }
}

fn mutate_run(run: &mut JmlMethodSpec, kind: MutationKind) -> Result<(), String> {
    match kind {
        MutationKind::DropOld => {
            if !run.normal.ensures.contains_old() {
                return Err("the ensures clause has no \\old".into());
            }
            run.normal.ensures = strip_old(&run.normal.ensures);
        }
        MutationKind::WidenEnsuresTrue => {
            if run.normal.ensures == JmlPredicate::True {
                return Err("the ensures clause is already true".into());
            }
            run.normal.ensures = JmlPredicate::True;
        }
        MutationKind::ShrinkAssignable => {
            if run.normal.assignable == AssignableClause::Nothing {
                return Err("the method already assigns nothing".into());
            }
            run.normal.assignable = AssignableClause::Nothing;
        }
        MutationKind::NegateGuardLink => {
            let exc = run
                .exceptional
                .as_mut()
                .ok_or_else(|| "the method has a single specification case".to_string())?;
            std::mem::swap(&mut run.normal.requires, &mut exc.requires);
        }
    }
    Ok(())
}

/// A deliberately broken copy of `unit`, used to show the checker can fail.
pub fn mutate_translation(
    unit: &TranslationUnit,
    mutation: &Mutation,
) -> Result<TranslationUnit, MutationError> {
    let mut out = unit.clone();
    let targets: Vec<String> = match &mutation.event {
        Some(e) => {
            if unit.source.event(e).is_none() {
                return Err(MutationError::UnknownEvent(e.clone()));
            }
            vec![run_name(e)]
        }
        None => unit
            .source
            .events
            .iter()
            .map(|e| run_name(&e.name.name))
            .collect(),
    };
    let mut applied = 0;
    let mut reasons = Vec::new();
    for m in out
        .result
        .methods
        .iter_mut()
        .filter(|m| m.kind == MethodKind::Run && targets.contains(&m.name))
    {
        match mutate_run(m, mutation.kind) {
            Ok(()) => applied += 1,
            Err(r) => reasons.push(format!("{}: {r}", m.name)),
        }
    }
    if applied == 0 {
        return Err(MutationError::Inapplicable {
            mutation: mutation.kind.name(),
            reason: if reasons.is_empty() {
                "no run method to mutate".into()
            } else {
                reasons.join("; ")
            },
        });
    }
    Ok(out)
}

/// Structured text rendering, one block per verdict.
pub fn render_report(r: &Report) -> String {
    let mut out = String::new();
    let u = &r.universe;
    let carriers = if u.carriers.is_empty() {
        "default size".to_string()
    } else {
        u.carriers
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(out, "machine {}", r.machine);
    let _ = writeln!(
        out,
        "universe: INT {}..{}, carriers {carriers}, ceiling {}",
        u.int_range.0, u.int_range.1, u.ceiling
    );
    write_verdict(&mut out, "initialisation", &r.init, "initial states");
    for e in &r.events {
        write_verdict(&mut out, &format!("event {}", e.event), &e.verdict, "transitions");
    }
    let _ = writeln!(out, "sensitivity: {}", r.sensitivity);
    let _ = writeln!(out, "overall: {}", r.status);
    let _ = writeln!(out, "time: {} ms", r.elapsed_ms);
    out
}

fn write_verdict(out: &mut String, title: &str, v: &Verdict, unit: &str) {
    let _ = write!(out, "{title}: {}", v.status);
    if let Some(msg) = &v.message {
        let _ = writeln!(out, " ({msg})");
        return;
    }
    let _ = write!(out, " ({} checked, {} JML {unit}", v.checked_pairs, v.jml_pairs);
    if let Some(b) = v.bisimulation {
        let _ = write!(out, ", bisimulation {}", if b { "yes" } else { "no" });
    }
    let _ = writeln!(out, ")");
    for (i, w) in v.witnesses.iter().enumerate() {
        let _ = writeln!(out, "  witness {}: {w}", i + 1);
    }
}

/// Machine-readable rendering.
pub fn report_json(r: &Report) -> String {
    serde_json::to_string_pretty(r).expect("report serializes")
}
