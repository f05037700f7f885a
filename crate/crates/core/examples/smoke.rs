use esmc_core::arch::{generate_arch, ArchFamily};
use esmc_core::config::Stage1Config;
use esmc_core::stage1::solve_stage1;
use std::time::Duration;

fn main() {
    let code = esmc_core::code::cube_code();
    let arch = generate_arch(ArchFamily::Square, 5, 6).unwrap();
    let cfg = Stage1Config { time_limit: Duration::from_secs(120), ..Default::default() };
    let t0 = std::time::Instant::now();
    match solve_stage1(&code, &arch, &cfg, None) {
        Ok(out) => println!(
            "cube/square56: bridges={} compat={} optimal={} elapsed={:?}",
            out.total_bridge_size, out.compatible_pairs, out.optimal, t0.elapsed()
        ),
        Err(e) => println!("cube/square56: error {e} after {:?}", t0.elapsed()),
    }
}
