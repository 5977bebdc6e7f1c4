//! Acceptance run: one line per criterion, non-zero exit if any is red.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use eb2jml::checker::{
    check_event_with, check_machine, mutate_translation, replay, CheckOptions, Mutation,
    MutationKind, Status, Verdict,
};
use eb2jml::eventb::{mod_set, parse_machine, render_machine, well_formedness_check, Ident};
use eb2jml::jml::{normalize_jml, render_class};
use eb2jml::semantics::{
    eb_event_rel, jml_method_rel, state, EbModel, Relation, Universe, Value,
};
use eb2jml::translate::{run_name, translate_machine, TranslationUnit};

const FLAGSHIP_BUDGET: Duration = Duration::from_secs(120);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn flagship_universe() -> Universe {
    Universe::default().carrier("PERSON", 2).carrier("CONTENTS", 2)
}

fn golden_class() -> Outcome {
    let m = fixture("ref1_permissions.ebm");
    let mut class = translate_machine(&m).unwrap().result;
    class.methods.retain(|x| x.name.ends_with("edit_owned"));
    let ours = normalize_jml(&render_class(&class));
    let golden = std::fs::read_to_string(fixture_path("ref1_permissions.golden.java")).unwrap();
    let theirs = normalize_jml(&golden);
    if ours == theirs {
        outcome(true, format!("edit_owned pair matches ({} tokens)", ours.split(' ').count()))
    } else {
        let at = ours
            .split(' ')
            .zip(theirs.split(' '))
            .position(|(a, b)| a != b)
            .unwrap_or(0);
        outcome(false, format!("first differing token at {at}"))
    }
}

fn flagship_check() -> Outcome {
    let m = fixture("social.ebm");
    let start = Instant::now();
    let r = check_machine(&m, &flagship_universe(), CheckOptions::default()).unwrap();
    let took = start.elapsed();
    let status_of = |name: &str| -> Status {
        r.events
            .iter()
            .find(|e| e.event == name)
            .map(|e| e.verdict.status)
            .unwrap_or(Status::Fail)
    };
    let parts = [
        ("initialisation", r.init.status),
        ("create_account", status_of("create_account")),
        ("edit_owned", status_of("edit_owned")),
    ];
    let ok = parts.iter().all(|(_, s)| *s == Status::Pass) && took < FLAGSHIP_BUDGET;
    let listed: Vec<String> = parts.iter().map(|(n, s)| format!("{n} {s}")).collect();
    outcome(ok, format!("{} in {} ms", listed.join(", "), took.as_millis()))
}

fn mutant(unit: &TranslationUnit, kind: MutationKind) -> TranslationUnit {
    mutate_translation(unit, &Mutation { kind, event: None }).unwrap()
}

/// FAIL with at least one witness, every one of which replays.
fn killed(unit: &TranslationUnit, u: &Universe, v: &Verdict) -> bool {
    v.status == Status::Fail
        && !v.witnesses.is_empty()
        && v
            .witnesses
            .iter()
            .all(|w| replay(unit, u, w).map(|r| r == (true, false)).unwrap_or(false))
}

fn mutation_kill() -> Outcome {
    let m = fixture("counter.ebm");
    let u = Universe::with_int_range(0, 1);
    let unit = translate_machine(&m).unwrap();
    let opts = CheckOptions::default();
    let run = |kind| {
        let mu = mutant(&unit, kind);
        let v = check_event_with(&mu, "inc", &u, opts).unwrap();
        (killed(&mu, &u, &v), v)
    };
    let (widen_killed, widen) = run(MutationKind::WidenEnsuresTrue);
    let (drop_killed, drop) = run(MutationKind::DropOld);
    let (_, shrink) = run(MutationKind::ShrinkAssignable);

    let swap = fixture("swap.ebm");
    let swap_unit = translate_machine(&swap).unwrap();
    let su = Universe::default();
    let swap_mu = mutant(&swap_unit, MutationKind::DropOld);
    let swap_v = check_event_with(&swap_mu, "swap", &su, opts).unwrap();
    let swap_killed = killed(&swap_mu, &su, &swap_v);

    let ok = widen_killed && drop_killed && shrink.status == Status::Pass;
    outcome(
        ok,
        format!(
            "widen_ensures_true {}{}, drop_old {}{}, shrink_assignable {} \
             (drop_old on swap: {}{})",
            widen.status,
            if widen_killed { " with replayed witness" } else { "" },
            drop.status,
            if drop_killed { " with replayed witness" } else { " (expected FAIL)" },
            shrink.status,
            swap_v.status,
            if swap_killed { " with replayed witness" } else { "" },
        ),
    )
}

fn int_pairs(rel: &Relation) -> BTreeSet<(i64, i64)> {
    let v = Ident::new("v");
    rel.iter()
        .map(|(a, b)| (a[&v].as_int().unwrap(), b[&v].as_int().unwrap()))
        .collect()
}

fn random_events() -> Outcome {
    const N: u64 = 200;
    let u = Universe::default();
    let mut agree = 0;
    let mut first_bad = None;
    for seed in 0..N {
        let ev = gen_oevent(&mut rng_from_seed(seed));
        let text = ev.machine_text();
        let m = parse_machine(&text).unwrap();
        assert!(well_formedness_check(&m).is_empty(), "{text}");
        let rel = eb_event_rel(&m, m.event("ev").unwrap(), &u).unwrap();
        if int_pairs(&rel) == ev.oracle(0, 2) {
            agree += 1;
        } else if first_bad.is_none() {
            first_bad = Some(seed);
        }
    }
    let mut detail = format!("{agree}/{N} events agree with the brute-force oracle over [0,2]");
    if let Some(s) = first_bad {
        detail.push_str(&format!("; first mismatch at seed {s}"));
    }
    outcome(agree == N, detail)
}

fn swap_relations() -> Outcome {
    let m = fixture("swap.ebm");
    let u = Universe::default();
    let class = translate_machine(&m).unwrap().result;
    let eb = eb_event_rel(&m, m.event("swap").unwrap(), &u).unwrap();
    let jml = jml_method_rel(&m, &class, &run_name("swap"), &u).unwrap();
    let mut expected = Relation::new();
    for x in 0..=2 {
        for y in 0..=2 {
            let s = |a, b| state([("x", Value::Int(a)), ("y", Value::Int(b))]);
            expected.insert((s(x, y), s(y, x)));
        }
    }
    let ok = eb == expected && jml == expected;
    outcome(
        ok,
        format!(
            "event-b {} transitions, jml {} transitions, equal: {}",
            eb.len(),
            jml.len(),
            eb == jml
        ),
    )
}

fn round_trip() -> Outcome {
    const N: u64 = 500;
    let mut good = 0;
    let mut first_bad = None;
    for seed in 0..N {
        let m = gen_machine(&mut rng_from_seed(seed));
        let ok = well_formedness_check(&m).is_empty()
            && parse_machine(&render_machine(&m)).is_ok_and(|back| back == m);
        if ok {
            good += 1;
        } else if first_bad.is_none() {
            first_bad = Some(seed);
        }
    }
    let mut detail = format!("{good}/{N} random well-formed machines survive render then parse");
    if let Some(s) = first_bad {
        detail.push_str(&format!("; first failure at seed {s}"));
    }
    outcome(good == N, detail)
}

fn frame_property() -> Outcome {
    let m = fixture("social.ebm");
    let u = flagship_universe();
    let class = translate_machine(&m).unwrap().result;
    let eb = EbModel::new(&m, &u).unwrap();
    let vars: Vec<Ident> = m.variables.iter().map(|v| v.name.clone()).collect();
    let mut checked = 0;
    let mut violations = Vec::new();
    for e in &m.events {
        let rel = jml_method_rel(&m, &class, &run_name(&e.name.name), &u).unwrap();
        let modified = mod_set(&e.actions);
        for (a, b) in &rel {
            checked += 1;
            let enabled = !eb.enabling(e, a).unwrap().is_empty();
            let fine = if enabled {
                vars.iter().filter(|v| !modified.contains(*v)).all(|v| a[v] == b[v])
            } else {
                a == b
            };
            if !fine {
                violations.push(e.name.name.clone());
            }
        }
    }
    let detail = format!(
        "{checked} JML transitions over the flagship events, {} frame violations",
        violations.len()
    );
    outcome(violations.is_empty() && checked > 0, detail)
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 7] = [
        (1, golden_class),
        (2, flagship_check),
        (3, mutation_kill),
        (4, random_events),
        (5, swap_relations),
        (6, round_trip),
        (7, frame_property),
    ];
    let mut red = 0;
    for (n, f) in criteria {
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !o.ok {
            red += 1;
        }
        println!("criterion {n}: {} - {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    if red > 0 {
        println!("{red} of 7 criteria failed");
        std::process::exit(1);
    }
}
