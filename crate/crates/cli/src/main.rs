fn main() {
    std::process::exit(quartic_cli::run_from_args(std::env::args_os()));
}
