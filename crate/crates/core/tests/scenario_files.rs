//! The bundled scenario files match the built-in variants.

use std::path::PathBuf;

use wignerlab::experiment::{build_fr_scenario, fr_scenario_file, FrVariant, Scenario};
use wignerlab::FieldScalar;

fn bundled(v: FrVariant) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{}.json", v.name()))
}

#[test]
fn bundled_files_match_builders() {
    for v in FrVariant::ALL {
        let text = std::fs::read_to_string(bundled(v)).unwrap();
        assert_eq!(text.trim_end(), fr_scenario_file(v).to_json().trim_end(), "{}", v.name());
    }
}

#[test]
fn bundled_files_load_and_run() {
    for v in FrVariant::ALL {
        let loaded = Scenario::<FieldScalar>::load(&bundled(v)).unwrap();
        let built = build_fr_scenario::<FieldScalar>(v);
        assert_eq!(loaded.name(), v.name());
        let p = built.default_policy();
        assert_eq!(loaded.default_policy(), p);
        let a = loaded.run_exact(p).unwrap().by_labels(&["wbar", "w"]);
        let b = built.run_exact(p).unwrap().by_labels(&["wbar", "w"]);
        assert_eq!(a, b, "{}", v.name());
    }
}
