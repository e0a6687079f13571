fn main() {
    std::process::exit(resonance_core::cli::run(std::env::args_os()));
}
