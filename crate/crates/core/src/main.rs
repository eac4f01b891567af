fn main() {
    std::process::exit(casimir_shear::cli::main_with_args(std::env::args_os()));
}
