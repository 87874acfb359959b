fn main() {
    std::process::exit(cascade_cli::run(std::env::args_os()));
}
