mod common;

use common::{fd_model, FD_TOL};
use kgalign::kge::{ModelKind, Norm};

#[test]
fn analytic_gradients_match_central_differences() {
    let mut failures = Vec::new();
    for (i, kind) in ModelKind::ALL.into_iter().enumerate() {
        for dim in [4, 8] {
            let worst = fd_model(kind, Norm::L2, dim, 100, 1000 + i as u64 * 10 + dim as u64);
            if worst > FD_TOL {
                failures.push(format!("{kind} d={dim}: worst relative error {worst:.3e}"));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn transe_l1_gradient_matches_central_differences() {
    for dim in [4, 8] {
        let worst = fd_model(ModelKind::TransE, Norm::L1, dim, 100, 77 + dim as u64);
        assert!(worst <= FD_TOL, "d={dim}: {worst:.3e}");
    }
}
