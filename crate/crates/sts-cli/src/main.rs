fn main() {
    std::process::exit(sts_cli::run_args(std::env::args_os()));
}
