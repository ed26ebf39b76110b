#![no_main]

use arbor::schema::parse_certificate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(cert) = parse_certificate(s) {
        let again = parse_certificate(&serde_json::to_string(&cert).unwrap()).unwrap();
        assert_eq!(again, cert);
    }
});
