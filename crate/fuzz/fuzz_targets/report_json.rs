#![no_main]

use libfuzzer_sys::fuzz_target;
use wqueens::report::Report;

fuzz_target!(|data: &str| {
    if let Ok(report) = Report::from_json(data) {
        if report.success_probability.is_finite()
            && report.solutions.iter().all(|s| s.probability.is_finite())
        {
            let again = Report::from_json(&report.to_json()).expect("serialized report parses");
            assert_eq!(again, report);
        }
    }
});
