use super::*;
use crate::expr::{num_equal_report, SampleBox};

fn entry(id: &str) -> SolutionEntry {
    catalog().into_iter().find(|e| e.id == id).unwrap()
}

fn residual(e: &SolutionEntry) -> GridReport {
    verify_on_grid(e, &e.defaults(), &GridSpec::default()).unwrap()
}

#[test]
fn shipped_catalog_loads() {
    let c = catalog();
    assert!(c.len() >= 40);
    assert!(c
        .iter()
        .filter(|e| e.generated.is_some())
        .all(|e| { e.generated.as_ref().unwrap().parent.is_some() }));
}

#[test]
fn x_free_solution_is_exact() {
    let r = residual(&entry("imaged/x-free"));
    assert!(r.pass && r.max_rel <= 1e-9, "{r:?}");
    assert_eq!(r.evaluated, 400);
}

#[test]
fn jacobi_solution_verifies() {
    let r = residual(&entry("cubic0/sd"));
    assert!(r.pass, "{r:?}");
}

#[test]
fn corrupted_exponent_is_caught() {
    let mut e = entry("imaged/x-free");
    e.solution = Some("(delta*(1-m)*t + C)^1".into());
    let r = residual(&e);
    assert!(!r.pass && r.max_rel >= 1e-2, "{r:?}");
}

#[test]
fn identities_reject_inconsistent_constants() {
    let e = entry("kpp/eps-positive");
    let mut b = e.defaults();
    b.insert("lambda".into(), 0.3);
    assert!(matches!(e.check(&b), Err(SolutionError::Constraint(_))));
    assert!(e.check(&e.defaults()).is_ok());
}

#[test]
fn constraints_reject_complex_roots() {
    let e = entry("double/row3-plus");
    let mut b = e.defaults();
    b.insert("b2".into(), 100.0);
    assert!(matches!(e.check(&b), Err(SolutionError::Constraint(_))));
}

#[test]
fn fixed_constants_cannot_move() {
    let e = entry("imaged/x-free");
    let mut b = e.defaults();
    b.insert("delta".into(), 2.0);
    assert!(e.check(&b).is_err());
}

#[test]
fn generated_entries_match_closed_forms() {
    let pairs = [
        ("gen/qfam-ds", "qfam/ds"),
        ("gen/qfam-sd", "qfam/sd"),
        ("gen/qfam-scale", "qfam/scale"),
        ("gen/qfam-stationary-ds", "qfam/stationary-ds"),
        ("gen/pfam-ds", "pfam/ds"),
        ("gen/pfam-sd", "pfam/sd"),
        ("gen/pfam-scale", "pfam/scale"),
        ("gen/pfam-stationary-ds", "pfam/stationary-ds"),
    ];
    for (g, c) in pairs {
        let (g, c) = (entry(g), entry(c));
        let b = g.defaults();
        let u = instantiate(&g, &b).unwrap().solution;
        let v = instantiate(&c, &c.complete(&b)).unwrap().solution;
        let bx = c.grid;
        let sb = SampleBox::new(&[("t", bx.t[0], bx.t[1]), ("x", bx.x[0], bx.x[1])]);
        let d = num_equal_report(&u, &v, &sb, 32).unwrap();
        assert!(d.max <= 1e-8 && d.evaluated > 16, "{}: {d:?}", g.id);
    }
}

#[test]
fn generation_chain_verifies_each_step() {
    let parent = entry("cubic0/ds");
    let link = ChainLink {
        id: "chain/qfam-ds".into(),
        equation: EquationSpec::Imaged {
            F: "-0.25/4".into(),
            H: "-exp(0.5*x)".into(),
            m: "3".into(),
        },
        step: Step::Pullback {
            map: AdditionalMap::Imaged2To2,
            params: [
                ("q".to_string(), "0.5".to_string()),
                ("delta".into(), "-1".into()),
            ]
            .into_iter()
            .collect(),
        },
        grid: None,
    };
    let out = generate(&parent, std::slice::from_ref(&link)).unwrap();
    assert_eq!(out.generated.as_ref().unwrap().from, "cubic0/ds");
    assert_eq!(generate(&parent, &[]).unwrap(), parent);
    let bad = ChainLink {
        equation: EquationSpec::Imaged {
            F: "0".into(),
            H: "-exp(0.5*x)".into(),
            m: "3".into(),
        },
        ..link
    };
    assert!(generate(&parent, &[bad]).is_err());
}

#[test]
fn filters() {
    let e = entry("kpp/eps-positive");
    assert!(e.matches("kpp"));
    assert!(e.matches("class=imaged"));
    assert!(e.matches("m=3"));
    assert!(!e.matches("m=0.5"));
    assert!(entry("cubic0/sd").matches("m=3"));
    assert!(!e.matches("class=double"));
}

#[test]
fn load_rejects_bad_documents() {
    assert!(load("[{}]").is_err());
    let one = serde_json::to_string(&vec![entry("imaged/x-free"), entry("imaged/x-free")]).unwrap();
    assert!(matches!(load(&one), Err(SolutionError::Catalog(_))));
}
