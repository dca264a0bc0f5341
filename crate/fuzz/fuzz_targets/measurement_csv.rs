#![no_main]

use eotx::labchain::{calibrate_rows, read_measurements, ChainFile};
use libfuzzer_sys::fuzz_target;

const CHAIN: &str = include_str!("../../crates/core/presets/chain_synthetic.toml");

fuzz_target!(|data: &[u8]| {
    let cal = ChainFile::from_toml_str(CHAIN).unwrap().calibration().unwrap();
    if let Ok(rows) = read_measurements(data) {
        if let Ok(out) = calibrate_rows(&cal, &rows) {
            assert_eq!(out.len(), rows.len());
        }
    }
});
