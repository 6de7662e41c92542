use invmono::selfsim::{depth_truncation, unique_mean_check, Odometer};

fn main() {
    let od = Odometer;
    for n in [6, 7, 8] {
        let t0 = std::time::Instant::now();
        let m = depth_truncation(&od, n, n, &[1], 300_000).unwrap();
        let t1 = t0.elapsed();
        let t0 = std::time::Instant::now();
        let r = unique_mean_check(&od, n, &[1], 300_000).unwrap();
        println!(
            "n={n}: size {} build {:?}, unique_mean {:?} (unique={}, orbit={}, cyl={})",
            m.size(), t1, t0.elapsed(), r.unique, r.single_atom_orbit, r.cylinder_values_match
        );
    }
}
