#![no_main]

use eotx::preset::{PresetFile, PAPER_PRESET};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|arg: &str| {
    let overrides: Vec<String> = arg.split('\n').map(String::from).collect();
    if let Ok(file) = PresetFile::load(PAPER_PRESET, &overrides) {
        let _ = file.transducer();
    }
});
