fn main() {
    std::process::exit(esmc_core::cli::run(std::env::args_os()));
}
