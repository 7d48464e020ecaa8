fn main() {
    std::process::exit(cyclo_drf::cli::main_with_args(std::env::args_os()));
}
