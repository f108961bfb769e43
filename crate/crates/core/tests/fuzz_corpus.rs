//! Replays the checked-in fuzz seed corpus through the same entry points the
//! fuzz targets drive, so parser regressions surface without libFuzzer.

use std::fs;
use std::path::{Path, PathBuf};

use dpcolor::coloring::{read_coloring, write_coloring};
use dpcolor::graph::{dump_edge_list, load_edge_list, parse_edge_list};
use dpcolor::harness::{summarize, write_summary, DatasetSpec, ExperimentConfig};
use dpcolor::IdRemap;

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fuzz", "corpus", target].iter().collect();
    let mut seeds: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            (name(&path), fs::read(&path).unwrap())
        })
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty(), "no seeds for {target}");
    seeds
}

fn name(path: &Path) -> String {
    path.file_name().unwrap().to_string_lossy().into_owned()
}

fn expect(name: &str, ok: bool, valid: &[&str]) {
    assert_eq!(ok, valid.contains(&name), "seed `{name}`");
}

#[test]
fn edge_list_seeds() {
    for (name, data) in corpus("edge_list") {
        let parsed = parse_edge_list(&data);
        expect(&name, parsed.is_ok(), &["dump_header", "loops_and_duplicates", "sparse_ids", "max_id"]);
        if let Ok((g, _)) = parsed {
            g.validate().unwrap();
            let mut text = Vec::new();
            dump_edge_list(&g, &mut text).unwrap();
            assert_eq!(load_edge_list(text.as_slice()).unwrap().0.m(), g.m());
        }
    }
}

#[test]
fn coloring_file_seeds() {
    for (name, data) in corpus("coloring_file") {
        let parsed = read_coloring(data.as_slice());
        expect(&name, parsed.is_ok(), &["basic", "blank_line", "duplicate_id"]);
        let Ok(file) = parsed else { continue };
        let mut remap = IdRemap::new();
        for &(id, _) in &file.entries {
            remap.intern(id);
        }
        match file.to_coloring(&remap) {
            Ok(coloring) => {
                let mut out = Vec::new();
                write_coloring(&mut out, &file.header, &coloring, &remap).unwrap();
                assert_eq!(read_coloring(out.as_slice()).unwrap().entries, file.entries);
            }
            Err(_) => assert_eq!(name, "duplicate_id"),
        }
    }
}

#[test]
fn experiment_config_seeds() {
    for (name, data) in corpus("experiment_config") {
        let parsed = ExperimentConfig::parse(std::str::from_utf8(&data).unwrap());
        let valid = parsed.as_ref().map(|cfg| cfg.validate().is_ok()).unwrap_or(false);
        expect(&name, valid, &["full", "file_dataset"]);
        if name == "negative_eps" {
            assert!(parsed.is_ok(), "range checks belong to validation");
        }
    }
}

#[test]
fn dataset_spec_seeds() {
    for (name, data) in corpus("dataset_spec") {
        let parsed = std::str::from_utf8(&data).unwrap().parse::<DatasetSpec>();
        expect(&name, parsed.is_ok(), &["er", "ba", "file"]);
    }
}

#[test]
fn trial_csv_seeds() {
    for (name, data) in corpus("trial_csv") {
        let parsed = summarize(data.as_slice());
        expect(&name, parsed.is_ok(), &["two_cells", "error_row"]);
        if let Ok(rows) = parsed {
            write_summary(&rows, Vec::new()).unwrap();
        }
    }
}
