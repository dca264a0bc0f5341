#![no_main]

use eotx::preset::PresetFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(file) = PresetFile::load(text, &[]) {
        // Anything that types must either validate or fail cleanly, and
        // must survive a serialize/parse round trip.
        let _ = file.transducer();
        let again = PresetFile::load(&file.to_toml(), &[]).expect("round trip parses");
        assert_eq!(again.to_toml(), file.to_toml());
    }
});
