fn main() {
    std::process::exit(covering_cli::run_from(std::env::args_os()));
}
