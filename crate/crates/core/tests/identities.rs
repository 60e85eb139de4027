use chaoslab::gaussian::identities::identity_suite;

#[test]
fn randomized_identities_hold() {
    let start = std::time::Instant::now();
    for r in identity_suite(7, 200, 1e-9).unwrap() {
        assert!(r.passed(), "{}: {}", r.name, r.statistic);
    }
    eprintln!("identity suite took {:?}", start.elapsed());
}
