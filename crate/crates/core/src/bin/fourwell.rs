fn main() {
    std::process::exit(fourwell::cli::main_with_args(std::env::args_os()));
}
