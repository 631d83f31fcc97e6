use std::fs;

#[test]
fn load_framework_corpus_does_not_panic() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fuzz/corpus/load_framework");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let bytes = fs::read(entry.unwrap().path()).unwrap();
        if let Ok(s) = std::str::from_utf8(&bytes) {
            let _ = tensegrity_core::load_framework(s);
        }
        seen += 1;
    }
    assert!(seen > 0);
}
