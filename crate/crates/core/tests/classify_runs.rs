use std::fs;

use uslsq::classify::{catalog, classify, seed_phase, ClassRep, ClassifyOptions, DepthPolicy};
use uslsq::isomorph::Certificate;

fn certs(reps: &[ClassRep]) -> Vec<Certificate> {
    reps.iter().map(|r| r.certificate.clone()).collect()
}

fn opts(workers: Option<usize>) -> ClassifyOptions {
    ClassifyOptions { workers, ..Default::default() }
}

#[test]
fn output_is_independent_of_worker_count() {
    let base = classify(5, 2, &opts(Some(1))).unwrap();
    assert_eq!(base.classes.len(), 10);
    for w in [2, 3, 8] {
        let run = classify(5, 2, &opts(Some(w))).unwrap();
        assert_eq!(certs(&run.classes), certs(&base.classes), "workers = {w}");
        assert_eq!(run.classes, base.classes);
        assert_eq!(run.solution_count, base.solution_count);
    }
}

#[test]
fn classes_are_sorted_by_eta_then_certificate() {
    let reps = classify(5, 2, &opts(None)).unwrap().classes;
    for w in reps.windows(2) {
        assert!((&w[0].eta.0, &w[0].certificate) < (&w[1].eta.0, &w[1].certificate));
    }
}

#[test]
fn resume_after_partial_run() {
    let dir = tempfile::tempdir().unwrap();
    let fresh = classify(5, 2, &opts(None)).unwrap();
    let seeds = seed_phase(5, 2, DepthPolicy::default()).unwrap().len();

    let partial = ClassifyOptions { out_dir: Some(dir.path().into()), seed_range: Some(0..seeds / 2), ..opts(None) };
    let run = classify(5, 2, &partial).unwrap();
    assert!(!run.complete());
    assert!(run.classes.is_empty());
    assert!(catalog(dir.path()).is_err());

    // a killed writer can leave a torn last line
    let ckpt = dir.path().join("checkpoint.jsonl");
    let mut text = fs::read_to_string(&ckpt).unwrap();
    text.push_str("{\"seed\": 9");
    fs::write(&ckpt, text).unwrap();

    let full = ClassifyOptions { out_dir: Some(dir.path().into()), ..opts(None) };
    let run = classify(5, 2, &full).unwrap();
    assert!(run.complete());
    assert_eq!(run.classes, fresh.classes);
    assert_eq!(run.solution_count, fresh.solution_count);

    let cat = catalog(dir.path()).unwrap();
    assert_eq!(cat.manifest.class_count, Some(10));
    assert!(cat.manifest.complete);
    assert_eq!(cat.entries.len(), 10);
    for (e, rep) in cat.entries.iter().zip(&fresh.classes) {
        assert_eq!(e.certificate, rep.certificate.to_hex());
        assert_eq!(cat.square(dir.path(), e.class).unwrap(), rep.square);
    }
}

#[test]
fn sharded_runs_merge_to_the_full_result() {
    let dir = tempfile::tempdir().unwrap();
    let fresh = classify(5, 2, &opts(None)).unwrap();
    let seeds = seed_phase(5, 2, DepthPolicy::default()).unwrap().len();
    for range in [10..seeds, 0..4, 4..10] {
        let o = ClassifyOptions { out_dir: Some(dir.path().into()), seed_range: Some(range), ..opts(Some(2)) };
        classify(5, 2, &o).unwrap();
    }
    let o = ClassifyOptions { out_dir: Some(dir.path().into()), seed_range: Some(0..0), ..opts(None) };
    let run = classify(5, 2, &o).unwrap();
    assert!(run.complete());
    assert_eq!(run.classes, fresh.classes);
}

#[test]
fn mismatched_run_directory_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = ClassifyOptions { out_dir: Some(dir.path().into()), ..opts(None) };
    classify(3, 1, &o).unwrap();
    assert!(classify(3, 2, &o).is_err());
    assert!(classify(4, 1, &o).is_err());
}

#[test]
fn bad_parameters_and_ranges_are_rejected() {
    assert!(classify(2, 1, &opts(None)).is_err());
    assert!(classify(5, 0, &opts(None)).is_err());
    let seeds = seed_phase(5, 2, DepthPolicy::default()).unwrap().len();
    let o = ClassifyOptions { seed_range: Some(0..seeds + 1), ..opts(None) };
    assert!(classify(5, 2, &o).is_err());
}

#[test]
fn deeper_seeds_give_the_same_classes() {
    let base = classify(5, 2, &opts(None)).unwrap();
    let o = ClassifyOptions { policy: DepthPolicy { min_depth: 6 }, ..opts(None) };
    let deep = classify(5, 2, &o).unwrap();
    assert!(deep.seed_count >= base.seed_count);
    assert_eq!(deep.classes, base.classes);
}
