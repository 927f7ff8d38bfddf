#![no_main]

use libfuzzer_sys::fuzz_target;
use mqmeta::data::{parse_score_tsv_str, Orientation};

fuzz_target!(|data: &str| {
    if let Ok(table) = parse_score_tsv_str(data, "fuzz", Orientation::HigherBetter) {
        let _ = table.to_own_matrix();
    }
});
