#![no_main]

use libfuzzer_sys::fuzz_target;
use wgfem::cli::parse_case_config;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(case) = parse_case_config(&text) {
        assert!(!case.schedule.is_empty());
        assert!(case.solver.validate().is_ok());
    }
});
