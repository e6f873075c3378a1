fn main() {
    std::process::exit(cvforge_cli::main_with_args(std::env::args_os()));
}
