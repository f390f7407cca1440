fn main() {
    std::process::exit(formsteklov::cli::main_with_args(std::env::args_os()));
}
