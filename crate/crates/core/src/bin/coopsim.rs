fn main() {
    std::process::exit(coopsim::cli::main_with_args(std::env::args_os()));
}
