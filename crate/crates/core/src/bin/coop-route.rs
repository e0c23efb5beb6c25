fn main() {
    std::process::exit(coop_route::cli::run_cli(std::env::args_os()));
}
