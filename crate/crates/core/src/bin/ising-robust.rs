fn main() {
    std::process::exit(ising_robust::cli::run(std::env::args_os()));
}
