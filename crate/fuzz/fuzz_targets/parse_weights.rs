#![no_main]

use libfuzzer_sys::fuzz_target;
use mqmeta::scoring::WeightScheme;

fuzz_target!(|data: &str| {
    if let Ok(w) = WeightScheme::parse(data) {
        w.validate().expect("parsed weights are valid");
    }
});
