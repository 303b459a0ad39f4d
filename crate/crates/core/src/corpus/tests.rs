use super::*;
use std::fs;

fn shipped() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn shipped_corpus_passes() {
    let corpus = load_corpus(&shipped()).unwrap();
    assert_eq!(corpus.tables.len(), 7);
    let report = run_suite(&corpus, SuiteConfig::default());
    assert!(report.all_passed(), "{report}");
}

#[test]
fn empty_manifest_is_an_empty_corpus() {
    let dir = tempdir();
    fs::write(dir.join(MANIFEST), "").unwrap();
    let corpus = load_corpus(&dir).unwrap();
    assert!(corpus.entries.is_empty());
    assert!(run_suite(&corpus, SuiteConfig::default()).all_passed());
}

#[test]
fn broken_manifests_are_rejected() {
    let dir = tempdir();
    assert!(load_corpus(&dir).is_err());
    fs::write(dir.join(MANIFEST), "[[program]]\nid = \"x\"\npath = \"nowhere.tbl\"\noutput = \"x.out\"\n").unwrap();
    let e = load_corpus(&dir).unwrap_err();
    assert!(e.path.ends_with("nowhere.tbl"), "{e}");
    fs::write(dir.join(MANIFEST), "[[program]]\nid = \"x\"\nbogus = 1\n").unwrap();
    assert!(load_corpus(&dir).is_err());
}

#[test]
fn table_files_parse_to_tables() {
    let t = parse_table_file("table: a: Number\n  1\n  2\nend\n").unwrap();
    assert_eq!(t.nrows(), 2);
    assert!(parse_table_file("table: a: Number\n  \"x\"\nend\n").is_err());
}

fn tempdir() -> PathBuf {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static N: AtomicUsize = AtomicUsize::new(0);
    let dir = std::env::temp_dir().join(format!("tabled-corpus-{}-{}", std::process::id(), N.fetch_add(1, Ordering::SeqCst)));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}
