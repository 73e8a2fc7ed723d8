fn main() {
    std::process::exit(hypwave_cli::run(std::env::args_os()));
}
