#![no_main]

use adamir::analysis::Trace;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = Trace::read_csv(data);
});
