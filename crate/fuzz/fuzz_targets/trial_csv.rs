#![no_main]

use dpcolor::harness::{summarize, write_summary};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = summarize(data) {
        write_summary(&rows, Vec::new()).unwrap();
    }
});
