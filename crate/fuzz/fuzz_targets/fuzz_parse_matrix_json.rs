#![no_main]

use libfuzzer_sys::fuzz_target;
use resolvent_atlas::io;

// Any byte string must either fail cleanly or produce a matrix that
// round-trips through the writer without changing a single entry.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(matrix) = io::parse_matrix_json(text) {
        let rewritten = io::write_matrix_json(&matrix);
        let reparsed = io::parse_matrix_json(&rewritten).expect("writer output parses");
        assert_eq!(matrix.rows(), reparsed.rows());
        assert_eq!(matrix.cols(), reparsed.cols());
        assert_eq!(reparsed.sub(&matrix).max_abs(), 0.0);
    }
});
