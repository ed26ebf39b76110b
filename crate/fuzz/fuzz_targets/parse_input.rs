#![no_main]

use arbor::schema::parse_input;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(input) = parse_input(s) {
        let again = parse_input(&serde_json::to_string(&input).unwrap()).unwrap();
        assert_eq!(again, input);
    }
});
