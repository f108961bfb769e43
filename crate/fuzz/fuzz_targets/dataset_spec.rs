#![no_main]

use dpcolor::harness::DatasetSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = text.parse::<DatasetSpec>();
});
