#![no_main]

use libfuzzer_sys::fuzz_target;
use resolvent_atlas::io;

// CSV input is real-valued; a successful parse must yield finite real
// entries and survive a JSON round trip unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(matrix) = io::parse_matrix_csv(text) {
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                let entry = matrix[(i, j)];
                assert!(entry.re.is_finite());
                assert_eq!(entry.im, 0.0);
            }
        }
        let reparsed =
            io::parse_matrix_json(&io::write_matrix_json(&matrix)).expect("writer output parses");
        assert_eq!(reparsed.sub(&matrix).max_abs(), 0.0);
    }
});
