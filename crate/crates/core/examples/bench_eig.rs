use rmtlab::ensembles::{build, EnsembleSpec};
use rmtlab::sampling::{derive_stream, ScalarDist};
use rmtlab::spectra::eig_sym;
use std::time::Instant;

fn main() {
    for n in [256usize, 512, 1024, 2048] {
        let stream = derive_stream(1, &[("bench", n as u64)]);
        let m = build(&EnsembleSpec::Wigner { dist: ScalarDist::Rademacher }, n, &stream).unwrap();
        let t0 = Instant::now();
        let s = eig_sym(&m).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        let edge = s.op_norm() / (n as f64).sqrt();
        println!("N = {n:5}: {dt:7.3}s  op_norm/sqrt(N) = {edge:.4}");
    }
}
