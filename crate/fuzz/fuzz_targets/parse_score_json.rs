#![no_main]

use libfuzzer_sys::fuzz_target;
use mqmeta::data::{parse_score_json_str, Orientation};

fuzz_target!(|data: &str| {
    let _ = parse_score_json_str(data, "fuzz", Orientation::LowerBetter);
});
