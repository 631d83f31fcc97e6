#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(p) = tensegrity_symbolic::parse_poly(s) {
            let again = p.ring().parse(&p.to_string()).expect("printed polynomial reparses");
            assert_eq!(p, again);
        }
    }
});
