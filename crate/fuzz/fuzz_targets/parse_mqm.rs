#![no_main]

use libfuzzer_sys::fuzz_target;
use mqmeta::data::{parse_mqm_str, to_canonical_tsv};

fuzz_target!(|data: &str| {
    // anything that parses must survive a canonical round trip
    if let Ok(set) = parse_mqm_str(data, "fuzz") {
        let again =
            parse_mqm_str(&to_canonical_tsv(&set), "fuzz").expect("canonical output parses");
        assert_eq!(set, again);
    }
});
