use cydistill::dataset::{Dataset, RegressionRow};
use cydistill::symreg::{evolve, SymregConfig};
use rand::Rng;

fn planted(n: usize, seed: u64, f: impl Fn(f64, f64) -> f64) -> Dataset {
    let mut rng = cydistill::rng::derive_rng(seed, "probe", 0);
    let rows: Vec<RegressionRow> = (0..n)
        .map(|_| {
            let raw: [f64; 5] = std::array::from_fn(|_| -f64::ln(rng.gen_range(1e-12..1.0)));
            let t: f64 = raw.iter().sum();
            let x: [f64; 5] = std::array::from_fn(|i| raw[i] / t);
            let fv = cydistill::geometry::FeatureVector::from_abs_squares(&x);
            RegressionRow { p2: fv.p2, p3: fv.p3, sigma3: fv.sigma3, y: f(fv.p2, fv.sigma3), weight: 1.0 }
        })
        .collect();
    Dataset::from_rows(rows, 0.0, 3)
}

#[test]
fn gp_probe() {
    let ds1 = planted(1000, 1, |p2, _| p2);
    let ds2 = planted(1000, 2, |p2, s3| 2.0 * p2 + 3.0 * s3);
    let t0 = std::time::Instant::now();
    let mut hits1 = 0;
    let mut hits2 = 0;
    for seed in 0..10u64 {
        let cfg = SymregConfig { seed, ..Default::default() };
        let f1 = evolve(&ds1, &cfg).unwrap();
        if f1.entries.iter().any(|e| e.complexity <= 3 && e.loss <= 1e-10) { hits1 += 1; }
        let f2 = evolve(&ds2, &cfg).unwrap();
        let ok = f2.entries.iter().any(|e| e.complexity <= 9 && e.loss <= 1e-8);
        if ok { hits2 += 1; }
        else {
            let best: Vec<(usize, f64)> = f2.entries.iter().map(|e| (e.complexity, e.loss)).collect();
            println!("seed {seed} miss: {best:?}");
        }
    }
    println!("hits: y=p2 {hits1}/10, y=2p2+3s3 {hits2}/10 in {:?}", t0.elapsed());
    panic!("probe");
}
