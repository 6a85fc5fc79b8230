#![no_main]

use libfuzzer_sys::fuzz_target;
use wqueens::{BitString, BoardLayout};

fuzz_target!(|data: &str| {
    let Ok(bits) = data.parse::<BitString>() else {
        return;
    };
    assert_eq!(bits.to_string(), data);
    let n = (1..=12).find(|n| n * n >= bits.len()).unwrap_or(12);
    let layout = BoardLayout::new(n).unwrap();
    if let Ok(solution) = layout.decode_solution(bits.as_slice()) {
        // Decoding checks rows and columns; diagonals are the circuit's job.
        let mut cols = solution.cols().to_vec();
        cols.sort_unstable();
        assert_eq!(cols, (1..=n).collect::<Vec<_>>());
    }
});
