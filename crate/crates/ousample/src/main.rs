fn main() {
    std::process::exit(ousample::cli::main_with_args(std::env::args_os()));
}
