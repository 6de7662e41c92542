fn main() {
    let t0 = std::time::Instant::now();
    let cfg = invmono::random::RandomMonoidConfig::default();
    let suite = invmono::random::boolean_monoid_suite(200, &cfg);
    let sizes: Vec<usize> = suite.iter().map(|(_, m)| m.size()).collect();
    let max = sizes.iter().max().unwrap();
    let big = sizes.iter().filter(|&&s| s > 500).count();
    println!("generated 200 in {:?}; max size {}, >500: {}, last seed {}",
        t0.elapsed(), max, big, suite.last().unwrap().0);
}
