#![no_main]

use libfuzzer_sys::fuzz_target;
use resolvent_atlas::io;

// Accepted grid specs must materialize exactly the promised number of
// finite points, capped by MAX_GRID_POINTS.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = io::parse_grid(text) {
        let points = grid.points();
        assert_eq!(points.len(), grid.len());
        assert!(!points.is_empty());
        assert!(points.len() <= io::MAX_GRID_POINTS);
        for z in points {
            assert!(z.re.is_finite() && z.im.is_finite());
        }
    }
});
