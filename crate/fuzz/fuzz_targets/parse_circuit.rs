#![no_main]

use libfuzzer_sys::fuzz_target;
use wqueens::Circuit;

// Anything that parses must survive an emit/parse round trip unchanged.
fuzz_target!(|data: &str| {
    if let Ok(circuit) = Circuit::parse_text(data) {
        let text = circuit.emit_text();
        let again = Circuit::parse_text(&text).expect("emitted text parses");
        assert_eq!(again, circuit);
        assert_eq!(again.emit_text(), text);
    }
});
