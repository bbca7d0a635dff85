use std::fs;
use std::path::{Path, PathBuf};

use commonbath::photonics::{compile, parse_netlist};

fn corpus(dir: &str) -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(dir);
    let mut files: Vec<PathBuf> = fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "net"))
        .collect();
    files.sort();
    files
}

/// Reads the `# expect: <Class> line <n>` header.
fn expectation(text: &str) -> (String, usize) {
    let header = text.lines().next().and_then(|l| l.strip_prefix("# expect:")).expect("expect header");
    let parts: Vec<&str> = header.split_whitespace().collect();
    assert_eq!(parts.len(), 3, "header `{header}`");
    assert_eq!(parts[1], "line");
    (parts[0].to_string(), parts[2].parse().unwrap())
}

#[test]
fn corpus_sizes() {
    assert!(corpus("valid").len() >= 15);
    assert!(corpus("invalid").len() >= 10);
}

#[test]
fn valid_files_round_trip_and_compile() {
    for path in corpus("valid") {
        let text = fs::read_to_string(&path).unwrap();
        let ir = parse_netlist(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = parse_netlist(&ir.to_netlist()).unwrap();
        assert_eq!(again, ir, "{}", path.display());
        assert_eq!(again.to_netlist(), ir.to_netlist());
        let c = compile(&ir).unwrap();
        assert!(c.unitarity_defect() < 1e-9, "{}", path.display());
    }
}

#[test]
fn invalid_files_report_class_and_line() {
    for path in corpus("invalid") {
        let text = fs::read_to_string(&path).unwrap();
        let (class, line) = expectation(&text);
        let err = parse_netlist(&text).expect_err(&path.display().to_string());
        assert_eq!((err.class(), err.line()), (class.as_str(), line), "{}: {err}", path.display());
    }
}
