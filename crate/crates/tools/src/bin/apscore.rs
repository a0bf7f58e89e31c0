fn main() {
    std::process::exit(apmetric_tools::cli::main_with_args(std::env::args_os()));
}
