use eb2jml::eventb::{parse_machine, well_formedness_check};
use eb2jml::jml::{normalize_jml, render_class};
use eb2jml::translate::translate_machine;

const REFINED: &str = include_str!("fixtures/ref1_permissions.ebm");
const GOLDEN: &str = include_str!("fixtures/ref1_permissions.golden.java");

fn refined_class() -> eb2jml::jml::JmlClass {
    let m = parse_machine(REFINED).unwrap();
    assert!(well_formedness_check(&m).is_empty());
    translate_machine(&m).unwrap().result
}

#[test]
fn edit_owned_pair_matches_golden_text() {
    let mut class = refined_class();
    class.methods.retain(|m| m.name.ends_with("edit_owned"));
    let ours = normalize_jml(&render_class(&class));
    let theirs = normalize_jml(GOLDEN);
    if ours != theirs {
        let a: Vec<_> = ours.split(' ').collect();
        let b: Vec<_> = theirs.split(' ').collect();
        let at = a.iter().zip(&b).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
        panic!(
            "first difference at token {at}\nours:   {}\ngolden: {}",
            a[at.saturating_sub(8)..(at + 8).min(a.len())].join(" "),
            b[at.saturating_sub(8)..(at + 8).min(b.len())].join(" ")
        );
    }
}

#[test]
fn full_class_has_both_method_pairs() {
    let text = render_class(&refined_class());
    for line in [
        "public abstract boolean guard_create_account();",
        "public abstract void run_create_account();",
        "public abstract boolean guard_edit_owned();",
        "public abstract void run_edit_owned();",
    ] {
        assert!(text.contains(line), "missing {line}");
    }
    assert!(text.contains("assignable contents, pages, owner, viewp, editp;"));
    assert_eq!(text.matches("\nalso\n").count(), 2);
}

#[test]
fn rendering_is_stable() {
    assert_eq!(render_class(&refined_class()), render_class(&refined_class()));
}

