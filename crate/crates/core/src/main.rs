fn main() {
    std::process::exit(regpolar::cli::main_with_args(std::env::args_os()));
}
