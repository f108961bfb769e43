#![no_main]

use dpcolor::harness::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(cfg) = ExperimentConfig::parse(text) {
        let _ = cfg.validate();
    }
});
