fn main() {
    std::process::exit(crwm::cli::run_cli(std::env::args_os()));
}
