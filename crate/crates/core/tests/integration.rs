use std::path::Path;
use std::sync::Arc;

use qldpc_tbf::code::{self, load_code_spec};
use qldpc_tbf::collective::{resolve_ensemble, Classifier, Ensemble, PreparedEnsemble, Verdict};
use qldpc_tbf::decoders::{registry, FVector};
use qldpc_tbf::gf2::{syndrome, BinaryMatrix, BitVec};
use qldpc_tbf::setgen::{self, classify_supports, GenSetConfig, Reduction};
use qldpc_tbf::sim::{self, McConfig};
use qldpc_tbf::tanner::build_graph;
use qldpc_tbf::trapping;

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

#[test]
fn shipped_spec_matches_builtin_b1() {
    let from_file = load_code_spec(&data("b1.toml")).unwrap();
    let builtin = code::b1();
    assert_eq!(from_file.hz, builtin.hz);
    assert_eq!(from_file.hx, builtin.hx);
    assert_eq!(from_file.circulant_boundary, builtin.circulant_boundary);
    assert_eq!(from_file.lift, Some(63));
    assert_eq!(from_file.k, Some(24));
}

#[test]
fn matrices_survive_both_file_formats() {
    let b1 = code::b1();
    let mut dense = Vec::new();
    b1.hz.write_dense(&mut dense).unwrap();
    assert_eq!(BinaryMatrix::read_dense(dense.as_slice()).unwrap(), b1.hz);
    let mut coo = Vec::new();
    b1.hx.write_coordinate(&mut coo).unwrap();
    assert_eq!(BinaryMatrix::read_coordinate(coo.as_slice()).unwrap(), b1.hx);
}

#[test]
fn raw_spec_from_written_matrices() {
    let b1 = code::b1();
    let dir = tempfile::tempdir().unwrap();
    b1.hx.write_coordinate(std::fs::File::create(dir.path().join("hx.mtx")).unwrap()).unwrap();
    b1.hz.write_dense(std::fs::File::create(dir.path().join("hz.txt")).unwrap()).unwrap();
    let spec = dir.path().join("raw.toml");
    std::fs::write(&spec, "family = \"raw\"\nhx = \"hx.mtx\"\nhz = \"hz.txt\"\nboundary = 441\n").unwrap();
    let c = load_code_spec(&spec).unwrap();
    assert_eq!(c.hz, b1.hz);
    assert_eq!(c.circulant_boundary, 441);
}

#[test]
fn bb_code_has_stabilizer_structures_but_no_large_classical_ones() {
    let bb = load_code_spec(&data("bb_288.toml")).unwrap();
    assert_eq!(bb.n - bb.hx.rank() - bb.hz.rank(), 12);
    let g = build_graph(&bb.hz);
    let census = trapping::census(&g, &bb, trapping::DEFAULT_MAX_SIZE, trapping::MAX_SYMMETRIC_SIZE).unwrap();
    assert!(census.structures(63, 63).is_empty());
    assert!(census.structures(49, 49).is_empty());
    assert_eq!(census.symmetric_stabilizers.len(), bb.hx.rows());
}

#[test]
fn ensemble_file_with_inline_f_vectors_decodes() {
    let b1 = code::b1();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.ens");
    std::fs::write(&path, "name mine\nf 0100011010\nD9\n").unwrap();
    let ens = resolve_ensemble(path.to_str().unwrap()).unwrap();
    assert_eq!(ens.name, "mine");
    assert_eq!(ens.members[0].regions().unwrap()[0].f, FVector::parse("0100011010").unwrap());

    let classifier = Classifier::new(Arc::new(b1.clone()));
    let prepared = PreparedEnsemble::new(&ens, &b1, 0.01).unwrap();
    let e = BitVec::from_support(b1.n, &[5, 500]);
    let s = syndrome(&b1.hz, &e).unwrap();
    let out = prepared.decode(&e, &s, 50, &classifier).unwrap();
    assert_eq!(out.verdict, Verdict::ExactMatch);
    assert_eq!(out.winner, Some(0));
}

#[test]
fn degenerate_estimates_count_as_success() {
    let b1 = code::b1();
    let classifier = Classifier::new(Arc::new(b1.clone()));
    let row = b1.hx.row(3);
    let e = BitVec::from_support(b1.n, &b1.hx.row_support(3)[..2]);
    let other = e.xor(&row);
    assert_eq!(classifier.classify(&e, &other, true).unwrap(), Verdict::DegenerateSuccess);
    assert_eq!(classifier.classify(&e, &e, true).unwrap(), Verdict::ExactMatch);
}

#[test]
fn run_mc_matches_single_sweep_row() {
    let b1 = code::b1();
    let ens = resolve_ensemble("D4").unwrap();
    let cfg = McConfig {
        p: 0.015,
        trials: 1500,
        max_iters: 50,
        seed: 9,
        early_stop_frames: None,
    };
    let direct = sim::run_mc(&b1, &ens, &cfg).unwrap();
    let rows = sim::sweep(&b1, std::slice::from_ref(&ens), &[0.015], 1500, 50, 9, None).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].stats, direct);
}

#[test]
fn generated_set_replays_clean_on_a_structure() {
    let b1 = code::b1();
    let g = build_graph(&b1.hz);
    let census = trapping::census(&g, &b1, trapping::DEFAULT_MAX_SIZE, trapping::MAX_SYMMETRIC_SIZE).unwrap();
    let support = census.structures(49, 49)[0].var_set.clone();
    let supports = classify_supports(&b1, &[support]);
    assert_eq!(supports[0].reduction, Reduction::Pinned);
    let report = setgen::generate_set(
        &b1,
        &supports,
        GenSetConfig {
            target: 3,
            max_iters: 50,
            budget: Some(400),
        },
        &setgen::all_candidates(),
    )
    .unwrap();
    assert_eq!(report.trace.chosen[0], setgen::seed_vector());
    assert_eq!(report.achieved, 3);
    let replay = setgen::replay(&b1, &supports, &report.specs(), report.achieved, 50, Some(400)).unwrap();
    assert!(replay.iter().all(|&(_, _, fails)| fails == 0), "{replay:?}");
    // chosen members are distinct
    let mut chosen = report.trace.chosen.clone();
    chosen.sort();
    chosen.dedup();
    assert_eq!(chosen.len(), report.trace.chosen.len());
}

#[test]
fn builtin_ensembles_resolve_to_registry_members() {
    for (name, size) in [("D1", 1), ("D4", 4), ("D8", 8), ("D9set", 9), ("D24", 24)] {
        let ens = resolve_ensemble(name).unwrap();
        assert_eq!(ens.len(), size, "{name}");
        for m in &ens.members {
            assert_eq!(registry(&m.name).unwrap(), *m);
        }
    }
    assert!(Ensemble::new("dup", vec![registry("D1").unwrap(), registry("D1").unwrap()]).is_err());
}
