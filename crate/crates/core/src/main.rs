fn main() {
    std::process::exit(polarlab::cli::main_with_args(std::env::args_os()));
}
