#![no_main]

use dpcolor::graph::{dump_edge_list, load_edge_list, parse_edge_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok((g, _)) = parse_edge_list(data) else {
        return;
    };
    g.validate().expect("parsed graph is well formed");
    // Dumped graphs reload with the same edge count.
    let mut text = Vec::new();
    dump_edge_list(&g, &mut text).unwrap();
    let (h, _) = load_edge_list(text.as_slice()).expect("dump is parseable");
    assert_eq!(g.m(), h.m());
});
