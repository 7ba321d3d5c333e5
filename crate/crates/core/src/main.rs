fn main() {
    std::process::exit(grassmann_newton::cli::main_with_args(std::env::args_os()));
}
