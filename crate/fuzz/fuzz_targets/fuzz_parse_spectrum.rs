#![no_main]

use libfuzzer_sys::fuzz_target;
use resolvent_atlas::io;

// Spectrum literals that parse must re-format and re-parse to bitwise
// identical points.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spectrum) = io::parse_spectrum(text) {
        assert!(!spectrum.points().is_empty());
        let formatted: Vec<String> = spectrum
            .points()
            .iter()
            .map(|&z| io::format_complex(z))
            .collect();
        let reparsed = io::parse_spectrum(&formatted.join(",")).expect("formatter output parses");
        assert_eq!(spectrum.points(), reparsed.points());
    }
});
