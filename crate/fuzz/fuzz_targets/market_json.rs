#![no_main]

use adamir::FisherMarket;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(market) = FisherMarket::from_json(text) {
        // Anything accepted must survive its own serialization.
        let again = FisherMarket::from_json(&market.to_json().unwrap()).unwrap();
        assert_eq!(again.utilities(), market.utilities());
    }
});
