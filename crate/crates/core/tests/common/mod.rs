#![allow(dead_code)]

use std::path::{Path, PathBuf};

use robust_ahp::io::load_panel;
use robust_ahp::ExpertPanel;

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

/// The eight-expert, four-alternative panel whose last two experts lobby for a2.
pub fn eight_experts() -> ExpertPanel {
    load_panel(&data("eight_experts.json")).unwrap().panel
}

/// The four-expert, five-alternative bribery example.
pub fn bribery_example() -> ExpertPanel {
    load_panel(&data("bribery_example.json")).unwrap().panel
}

pub fn assert_close(actual: &[f64], expected: &[f64], tol: f64, what: &str) {
    assert_eq!(actual.len(), expected.len(), "{what}: length");
    for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
        assert!((a - e).abs() <= tol, "{what}[{i}]: got {a}, expected {e} (tol {tol})\n  full: {actual:?}");
    }
}
