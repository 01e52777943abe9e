fn main() {
    std::process::exit(mubar::cli::run(std::env::args_os()));
}
