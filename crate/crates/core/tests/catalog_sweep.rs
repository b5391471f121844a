//! Every shipped solution verifies on its grid for three constant bindings,
//! and carrying solutions through additional maps keeps them exact.

use proptest::prelude::*;

use rdsym_core::solutions::{
    catalog, generate, verify_entry, verify_on_grid, ChainLink, EquationSpec, GridSpec, Step,
    CATALOG_TOL,
};
use rdsym_core::transforms::AdditionalMap;

#[test]
fn every_entry_verifies() {
    let cat = catalog();
    assert!(cat.len() >= 40);
    let mut failures = Vec::new();
    for e in &cat {
        match verify_entry(e, 3, 0, &GridSpec::default()) {
            Ok(reports) => {
                for (b, r) in reports {
                    assert_eq!((r.nt, r.nx), (20, 20));
                    if !r.pass || r.max_rel > CATALOG_TOL {
                        failures.push(format!("{}: {b:?} {r:?}", e.id));
                    }
                }
            }
            Err(err) => failures.push(format!("{}: {err}", e.id)),
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn required_families_are_present() {
    let cat = catalog();
    let has = |tag: &str| {
        cat.iter()
            .any(|e| e.id.starts_with(tag) || e.tags.iter().any(|t| t == tag))
    };
    for tag in [
        "fisher",
        "kpp",
        "cubic",
        "cubic0/",
        "qfam/",
        "pfam/",
        "double/",
        "whittaker",
        "generated",
    ] {
        assert!(has(tag), "{tag}");
    }
    let maps: Vec<String> = cat
        .iter()
        .filter_map(|e| match &e.generated.as_ref()?.step {
            Step::Pullback { map, .. } => Some(map.name()),
            _ => None,
        })
        .collect();
    for m in [
        "imaged-1-1",
        "imaged-2-2",
        "imaged-4-3",
        "imaged-6-2",
        "initial-2.2-2.1",
        "initial-6-2.1",
    ] {
        assert!(maps.iter().any(|n| n == m), "{m}");
    }
}

#[test]
fn wrong_exponent_fails_everywhere_it_matters() {
    let cat = catalog();
    for id in ["imaged/x-free", "imaged/stationary", "kpp/eps-positive"] {
        let mut e = cat.iter().find(|e| e.id == id).unwrap().clone();
        let s = e
            .solution
            .take()
            .unwrap()
            .replace("(1/(1-m))", "1")
            .replace("(2/(1-m))", "1");
        e.solution = Some(s);
        let r = verify_on_grid(&e, &e.defaults(), &GridSpec::default()).unwrap();
        assert!(!r.pass && r.max_rel >= 1e-2, "{id}: {r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pullbacks_preserve_exactness(q in -1.0..1.0f64, parent in 0usize..4) {
        let ids = ["cubic0/ds", "cubic0/scale", "cubic0/stationary-power", "cubic0/stationary-ds"];
        let e = catalog().into_iter().find(|e| e.id == ids[parent]).unwrap();
        let link = ChainLink {
            id: "prop/q".into(),
            equation: EquationSpec::Imaged {
                F: format!("-{}", q * q / 4.0),
                H: format!("-exp({q}*x)"),
                m: "3".into(),
            },
            step: Step::Pullback {
                map: AdditionalMap::Imaged2To2,
                params: [("q".to_string(), q.to_string()), ("delta".to_string(), "-1".to_string())]
                    .into_iter()
                    .collect(),
            },
            grid: None,
        };
        let out = generate(&e, &[link]).unwrap();
        let r = verify_on_grid(&out, &out.defaults(), &GridSpec::default()).unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }
}
