#![no_main]

use libfuzzer_sys::fuzz_target;
use mqmeta_cli::config::parse_config_str;

fuzz_target!(|data: &str| {
    let _ = parse_config_str(data);
});
