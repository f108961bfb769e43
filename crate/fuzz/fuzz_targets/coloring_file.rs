#![no_main]

use dpcolor::coloring::{read_coloring, write_coloring};
use dpcolor::IdRemap;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(file) = read_coloring(data) else {
        return;
    };
    let mut remap = IdRemap::new();
    for &(id, _) in &file.entries {
        remap.intern(id);
    }
    if let Ok(coloring) = file.to_coloring(&remap) {
        let mut out = Vec::new();
        if write_coloring(&mut out, &file.header, &coloring, &remap).is_ok() {
            let again = read_coloring(out.as_slice()).expect("written file is parseable");
            assert_eq!(again.entries, file.entries);
        }
    }
});
