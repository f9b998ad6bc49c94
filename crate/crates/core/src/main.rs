fn main() {
    std::process::exit(zstar_core::cli::run(std::env::args_os()));
}
