#![no_main]

use eotx::labchain::ChainFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(file) = ChainFile::from_toml_str(text) {
        if let Ok(cal) = file.calibration() {
            assert!(cal.eta_optical() > 0.0 && cal.eta_optical() <= 1.0);
        }
    }
});
