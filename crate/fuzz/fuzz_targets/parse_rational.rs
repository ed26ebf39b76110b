#![no_main]

use arbor::Rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(q) = s.parse::<Rational>() {
        let printed = q.to_string();
        assert_eq!(printed.parse::<Rational>().unwrap(), q);
        assert_eq!(printed.parse::<Rational>().unwrap().to_string(), printed);
    }
});
