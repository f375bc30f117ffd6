fn main() {
    std::process::exit(spectral_regularity::cli::run(std::env::args_os()));
}
