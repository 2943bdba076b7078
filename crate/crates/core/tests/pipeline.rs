use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ver_forge::corpus::{read_corpus, Example};
use ver_forge::encoding::{encode_input, read_records, ENTITY_SEP};
use ver_forge::harness::{
    run_pipeline, FailureKind, PipelineConfig, Stage, AUGMENT_SHARD, CORPUS_FILE, INDEX_FILE, MANIFEST_FILE, RECORDS_FILE,
};
use ver_forge::retrieval::{OverlapIndex, RetrievalMode, MAX_H};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn fixture_config(out: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::load(&fixture("pipeline.conf")).unwrap();
    cfg.out_dir = out.to_path_buf();
    cfg
}

fn outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect()
}

/// A dump of `pages` articles, each linking to its neighbours, so the corpus
/// has several examples per page and plenty of shared entities.
fn write_synthetic_dump(path: &Path, pages: usize) {
    let mut xml = String::from("<mediawiki>\n");
    for i in 0..pages {
        let text = format!(
            "'''Item {i}''' is a [[Group {}]] member near [[Item {}]]. It is linked to [[Item {}]] and [[Place {}]]. Item {i} borders [[Item {}]].",
            i % 17,
            (i + 1) % pages,
            (i * 7 + 3) % pages,
            i % 5,
            (i + 2) % pages
        );
        xml.push_str(&format!(
            "<page><title>Item {i}</title><ns>0</ns><id>{}</id><revision><text>{}</text></revision></page>\n",
            i + 1,
            text.replace('&', "&amp;").replace('<', "&lt;")
        ));
    }
    xml.push_str("</mediawiki>\n");
    fs::write(path, xml).unwrap();
}

#[test]
fn without_retrieval_inputs_are_the_joined_entities() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = run_pipeline(&fixture_config(dir.path()), None).unwrap();
    let corpus = read_corpus(&dir.path().join(CORPUS_FILE)).unwrap();
    let records = read_records(&dir.path().join(RECORDS_FILE)).unwrap();
    let encodable: Vec<&Example> = corpus.iter().filter(|e| encode_input(&e.entities, &[] as &[&str]).is_ok()).collect();
    assert_eq!(records.len(), encodable.len());
    assert_eq!(manifest.records.rejected as usize, corpus.len() - encodable.len());
    for (rec, ex) in records.iter().zip(encodable) {
        assert_eq!(rec.input, ex.entities.join(ENTITY_SEP));
        assert_eq!(rec.target, ex.sentence);
        assert_eq!(rec.meta.h_used, None);
        assert_eq!(rec.meta.source_page, ex.source_page);
    }
    assert!(!dir.path().join(INDEX_FILE).exists());
}

#[test]
fn retrieval_output_does_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("dump.xml");
    write_synthetic_dump(&dump, 700);
    for mode in [RetrievalMode::TopK, RetrievalMode::GreedyCoverage] {
        let mut cfg = PipelineConfig::new(&dump, dir.path().join("one"));
        cfg.retrieval = true;
        cfg.retrieval_mode = mode;
        cfg.seed = 11;
        let manifest = run_pipeline(&cfg, Some(1)).unwrap();
        assert!(manifest.examples.emitted as usize > 2 * AUGMENT_SHARD, "dump too small to span shards");
        let one = outputs(&cfg.out_dir);
        cfg.out_dir = dir.path().join("many");
        run_pipeline(&cfg, Some(4)).unwrap();
        assert_eq!(one, outputs(&cfg.out_dir));
        fs::remove_dir_all(dir.path().join("one")).unwrap();
        fs::remove_dir_all(dir.path().join("many")).unwrap();
    }
}

#[test]
fn retrieval_records_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = fixture_config(dir.path());
    cfg.retrieval = true;
    let manifest = run_pipeline(&cfg, None).unwrap();
    assert!(manifest.reconciles());
    let hist = manifest.h_used_histogram.clone().unwrap();
    assert_eq!(hist.len(), usize::from(MAX_H) + 1);
    assert_eq!(hist.iter().sum::<u64>(), manifest.examples.emitted);

    let corpus = read_corpus(&dir.path().join(CORPUS_FILE)).unwrap();
    let index = OverlapIndex::load(&dir.path().join(INDEX_FILE)).unwrap();
    assert_eq!(index.len(), corpus.len());
    for rec in read_records(&dir.path().join(RECORDS_FILE)).unwrap() {
        let h = rec.meta.h_used.expect("retrieval records carry h");
        let parts: Vec<&str> = rec.input.split(" [SEP] ").collect();
        assert!(parts.len() - 1 <= usize::from(h));
        assert!(!parts[1..].contains(&rec.target.as_str()), "own sentence retrieved: {}", rec.input);
    }

    let manifest_json: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest_json["config"]["retrieval"], true);
    assert_eq!(manifest_json["index_format"], 1);
}

#[test]
fn the_seed_changes_only_the_retrieval_draws() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = fixture_config(&dir.path().join("a"));
    cfg.retrieval = true;
    cfg.seed = 1;
    run_pipeline(&cfg, None).unwrap();
    cfg.out_dir = dir.path().join("b");
    cfg.seed = 2;
    run_pipeline(&cfg, None).unwrap();
    let (a, b) = (outputs(&dir.path().join("a")), outputs(&dir.path().join("b")));
    assert_eq!(a[CORPUS_FILE], b[CORPUS_FILE]);
    assert_eq!(a[INDEX_FILE], b[INDEX_FILE]);
    assert_ne!(a[RECORDS_FILE], b[RECORDS_FILE]);
}

#[test]
fn a_missing_dump_is_an_io_failure_with_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig::new(dir.path().join("absent.xml"), dir.path().join("out"));
    let err = run_pipeline(&cfg, None).unwrap_err();
    assert_eq!(err.stage, Stage::Dump);
    assert_eq!(err.kind, FailureKind::Io);
    assert!(!dir.path().join("out").join(CORPUS_FILE).exists());
}

#[test]
fn a_malformed_dump_is_a_data_failure() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("bad.xml");
    fs::write(&dump, "<mediawiki><page><title>A</title><ns>0</ns><text>x</tex></page>").unwrap();
    let cfg = PipelineConfig::new(&dump, dir.path().join("out"));
    let err = run_pipeline(&cfg, None).unwrap_err();
    assert_eq!(err.stage, Stage::Dump);
    assert_eq!(err.kind, FailureKind::Data);
}

#[test]
fn a_late_failure_leaves_only_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // A directory where the records file would go makes that write fail
    // after the corpus has been written.
    fs::create_dir_all(out.join(format!("{RECORDS_FILE}.partial"))).unwrap();
    let err = run_pipeline(&fixture_config(&out), None).unwrap_err();
    assert_eq!(err.stage, Stage::Write);
    assert_eq!(err.kind, FailureKind::Io);
    assert!(!out.join(CORPUS_FILE).exists());
    assert!(!out.join(MANIFEST_FILE).exists());
}

#[test]
fn a_successful_run_leaves_no_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = run_pipeline(&fixture_config(dir.path()), None).unwrap();
    let names: Vec<String> = outputs(dir.path()).into_keys().collect();
    assert!(names.iter().all(|n| !n.ends_with(".partial")));
    let mut listed = manifest.outputs.clone();
    listed.sort();
    assert_eq!(names, listed);
}

#[test]
fn config_paths_resolve_against_the_config_file() {
    let cfg = PipelineConfig::load(&fixture("pipeline.conf")).unwrap();
    assert_eq!(cfg.dump_path, fixture("mini_dump.xml"));
    assert_eq!(cfg.page_blocklist, Some(fixture("page_blocklist.txt")));
    assert_eq!(cfg.coref_plugin, "pronoun");
    assert!(!cfg.retrieval);
}
