#![no_main]

use libfuzzer_sys::fuzz_target;
use mqmeta::scoring::{Taxonomy, TaxonomyName};

fuzz_target!(|data: &str| {
    if let Ok(t) = Taxonomy::parse(data, TaxonomyName::Custom("fuzz".into())) {
        let _ = t.lookup("Accuracy/Mistranslation");
    }
});
