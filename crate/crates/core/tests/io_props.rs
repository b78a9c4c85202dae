use proptest::prelude::*;
use shleib::check::Mode;
use shleib::derived::{
    build_sh_structure, check_codifferential, check_sh_leibniz, jacobi_residual,
};
use shleib::fixtures::{self, document, valid_documents};
use shleib::gauge::check_deformation;
use shleib::io::{
    parse_document, run_command, serialize_document, Command, Report, RunOptions, Verdict,
};
use shleib::Error;

fn all_fixtures() -> Vec<&'static str> {
    let mut texts: Vec<&str> = fixtures::VALID.iter().map(|(_, t)| *t).collect();
    texts.extend([fixtures::HEMI_PERTURBED, fixtures::MC_HEIS_NON_MC]);
    texts
}

fn untimed(mut r: Report) -> Report {
    r.timing_ms = 0;
    r
}

#[test]
fn fixtures_survive_a_round_trip() {
    for text in all_fixtures() {
        let doc = parse_document(text).unwrap();
        let printed = serialize_document(&doc);
        assert_eq!(parse_document(&printed).unwrap(), doc);
        assert_eq!(
            serialize_document(&parse_document(&printed).unwrap()),
            printed
        );
    }
}

#[test]
fn errors_point_at_the_offending_line() {
    let text = "[basis]\nx 0\ny 1\n[bracket]\nx x -> y:1\n[delta 0]\nx -> q:1\n";
    let errs = parse_document(text).unwrap_err();
    let lines: Vec<usize> = errs.iter().map(|e| e.line).collect();
    assert_eq!(lines, vec![5, 7]);
    assert!(errs[0].to_string().starts_with("line 5: "));
    assert!(errs[0].to_string().contains("x x"), "{}", errs[0]);
    assert!(errs[1].to_string().contains('q'), "{}", errs[1]);
}

#[test]
fn structural_errors() {
    let cases = [
        ("[bracket]\n", 0),
        ("[basis]\nx 0\n[delta 1]\n", 3),
        ("[basis]\nx 0\nx 1\n", 3),
        ("[basis]\nx zero\n", 2),
        ("[basis]\nx 0\n[delta 0]\nx -> x:1/0\n", 4),
        ("[basis]\nx 0\n[colour]\n", 3),
        ("[basis]\nx 0\n[meta]\nno equals sign\n", 4),
    ];
    for (text, line) in cases {
        let errs = parse_document(text).unwrap_err();
        assert!(errs.iter().any(|e| e.line == line), "{text:?}: {errs:?}");
    }
}

#[test]
fn reports_are_deterministic() {
    let opts = RunOptions {
        max_const: 4,
        ..RunOptions::default()
    };
    for (name, doc) in valid_documents() {
        for cmd in [Command::CheckSh, Command::Derive, Command::CheckCoalgebra] {
            let a = untimed(run_command(cmd, &doc, &opts).unwrap());
            let b = untimed(run_command(cmd, &doc, &opts).unwrap());
            assert_eq!(a, b, "{name} {cmd}");
            assert_eq!(a.to_json(), b.to_json());
        }
    }
}

#[test]
fn witness_replays_to_its_residual() {
    let doc = document(fixtures::HEMI_PERTURBED);
    let report = run_command(Command::CheckSh, &doc, &RunOptions::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Fail);
    let check = report.checks.iter().find(|c| !c.passes()).unwrap();
    let w = check.witness.as_ref().unwrap();
    let m = doc.model().unwrap();
    let tuple: Vec<usize> = w
        .tuple
        .iter()
        .map(|n| m.basis.position(n).unwrap())
        .collect();
    assert_eq!(tuple.len() as i64 + 1, w.scope["const"]);
    let s = build_sh_structure(&m.bracket, &m.family().unwrap()).unwrap();
    assert_eq!(jacobi_residual(&s, &tuple).render(&m.basis), w.residual);
}

#[test]
fn verdicts_match_direct_calls() {
    let opts = RunOptions::default();
    let mut docs = valid_documents();
    docs.push(("hemi_perturbed", document(fixtures::HEMI_PERTURBED)));
    for (name, doc) in docs {
        let m = doc.model().unwrap();
        let fam = m.family().unwrap();
        let s = build_sh_structure(&m.bracket, &fam).unwrap();
        let sh = check_sh_leibniz(&s, opts.max_const, Mode::Exhaustive)
            .unwrap()
            .is_empty();
        let codiff = check_codifferential(&m.bracket, &fam, opts.max_word_len, Mode::Exhaustive)
            .unwrap()
            .is_empty();
        let deformation = check_deformation(&m.bracket, &fam).unwrap().is_empty();
        let verdict = |cmd| run_command(cmd, &doc, &opts).unwrap().passes();
        assert_eq!(verdict(Command::CheckSh), sh, "{name}");
        assert_eq!(verdict(Command::CheckCodifferential), codiff, "{name}");
        assert_eq!(verdict(Command::CheckDeformation), deformation, "{name}");
    }
}

#[test]
fn non_maurer_cartan_document_fails_validation() {
    let doc = document(fixtures::MC_HEIS_NON_MC);
    let report = run_command(Command::Validate, &doc, &RunOptions::default()).unwrap();
    let mc = report
        .checks
        .iter()
        .find(|c| c.name == "maurer-cartan")
        .unwrap();
    assert_eq!(mc.verdict, Verdict::Fail);
    assert_eq!(mc.scope["order"], 2);
}

#[test]
fn commands_and_scopes_are_validated() {
    for c in Command::ALL {
        assert_eq!(c.name().parse::<Command>().unwrap(), c);
    }
    assert!(matches!(
        "check-everything".parse::<Command>(),
        Err(Error::Malformed(_))
    ));
    let doc = document(fixtures::L2B);
    for opts in [
        RunOptions {
            max_const: 1,
            ..RunOptions::default()
        },
        RunOptions {
            max_const: 9,
            ..RunOptions::default()
        },
        RunOptions {
            max_word_len: 0,
            ..RunOptions::default()
        },
        RunOptions {
            max_arity: 6,
            ..RunOptions::default()
        },
    ] {
        assert!(matches!(
            run_command(Command::CheckSh, &doc, &opts),
            Err(Error::Scope(_))
        ));
    }
    assert!(matches!(
        run_command(
            Command::Gauge,
            &document(fixtures::HEMI_PERTURBED),
            &RunOptions::default()
        ),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn gauge_output_is_a_document() {
    let doc = document(fixtures::HEMI);
    let report = run_command(Command::Gauge, &doc, &RunOptions::default()).unwrap();
    assert!(report.passes());
    let out = parse_document(report.output.as_deref().unwrap()).unwrap();
    assert_eq!(out.deltas.len(), doc.deltas.len());
    assert!(out.gauges.is_empty());
    let checked = run_command(Command::CheckDeformation, &out, &RunOptions::default()).unwrap();
    assert!(checked.passes());
}

#[test]
fn structured_report_fields() {
    let doc = document(fixtures::HEMI_PERTURBED);
    let report = run_command(Command::CheckSh, &doc, &RunOptions::default()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(v["command"], "check-sh");
    assert_eq!(v["verdict"], "fail");
    assert!(v["timing_ms"].is_u64());
    let first = &v["checks"][0];
    for key in ["name", "scope", "verdict", "violations", "witness"] {
        assert!(!first[key].is_null(), "{key}");
    }
    assert!(first["witness"]["tuple"].is_array());
}

proptest! {
    #[test]
    fn coefficients_print_and_parse_back(a in -50i64..50, b in 1i64..20, c in -50i64..50) {
        let text = format!(
            "[basis]\nx 0\ny 1\nz 2\n[delta 0]\nx -> y:{a}/{b}\ny -> z:{c}\n[gauge 1]\nx -> x:{c}/{b}\n"
        );
        let doc = parse_document(&text).unwrap();
        prop_assert_eq!(parse_document(&serialize_document(&doc)).unwrap(), doc);
    }
}
