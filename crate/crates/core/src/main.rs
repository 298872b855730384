fn main() {
    std::process::exit(specmat::cli::main_with_args(std::env::args_os()));
}
