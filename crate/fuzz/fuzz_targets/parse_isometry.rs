#![no_main]

use arbor::isometry::IsometryJson;
use arbor::schema::parse_json;
use arbor::Isometry;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(json) = parse_json::<IsometryJson>(s) else { return };
    if let Ok(g) = Isometry::try_from(json) {
        assert!(g.matrix().det().is_one());
        assert_eq!(g.translation_length(), g.inverse().translation_length());
    }
});
